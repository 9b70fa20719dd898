//! A fixed corpus of small Σ^B_0 formulas with their bounds, shared by the
//! acceptance suite and the CLI.

use crate::error::Result;
use crate::formula::{parse, Formula};
use crate::generic::InductionProblem;
use crate::translate::TranslationEnv;

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub text: &'static str,
    /// `X=3,x=1` style: string lengths and number values.
    pub bounds: &'static str,
}

impl CorpusEntry {
    pub fn formula(&self) -> Result<Formula> {
        parse(self.text)
    }

    pub fn env(&self) -> Result<TranslationEnv> {
        TranslationEnv::parse_bounds(self.bounds)
    }
}

const fn e(text: &'static str, bounds: &'static str) -> CorpusEntry {
    CorpusEntry { text, bounds }
}

/// Every entry has bounds at most 6 and at most 6 string bits in total.
pub const CORPUS: &[CorpusEntry] = &[
    e("X(0)", "X=1"),
    e("!X(0) | X(1)", "X=2"),
    e("A i < |X| . X(i)", "X=3"),
    e("E i < |X| . X(i) & !Y(i)", "X=3,Y=3"),
    e("A i < 3 . X(i) <-> Y(i)", "X=3,Y=3"),
    e("E i < 4 . X(i) & X(i + 1)", "X=4"),
    e("|X| = 3", "X=3"),
    e("|X| <= x", "X=2,x=3"),
    e("x + 1 = 2 * y", "x=3,y=2"),
    e("A i < x . E j < x . i <= j & X(j)", "X=4,x=3"),
    e("E i < |X| . X(i) & A j < i . !X(j)", "X=4"),
    e("X(x) | !Y(x)", "X=3,Y=3,x=1"),
    e("A i < 2 . A j < 2 . X(i * 2 + j) -> Y(i + j)", "X=4,Y=2"),
    e("!(E i < 5 . X(i))", "X=5"),
    e("E i < |X| . E j < |X| . i < j & X(i) & X(j)", "X=5"),
    e("A i < |X| . i = 0 | (X(i) -> E j < i . X(j))", "X=4"),
    e("X(0) & X(1) -> X(0) | X(1)", "X=2"),
    e("E i < 3 . s(i) = |X|", "X=2"),
    e("A i < 6 . X(i) -> i < 3", "X=6"),
    e("X(0) <-> !X(1)", "X=2"),
    e("A i < |X| . A j < |Y| . i = j -> (X(i) <-> Y(j))", "X=3,Y=3"),
    e("x * x <= |X| + y", "X=4,x=2,y=1"),
    e("E i < |X| . X(i) & (A j < |X| . X(j) -> j <= i)", "X=4"),
    e("A i < 3 . X(i) | X(i + 3)", "X=6"),
    e("!X(2) & (X(0) | X(1))", "X=3"),
    e("E i < 2 . E j < 2 . X(i) & Y(j) & i != j", "X=2,Y=2"),
    e("A i < |X| . i < |X|", "X=3"),
    e("0 = 1 | X(0)", "X=1"),
    e("E i < 4 . X(i) & !X(i + 1) & X(i + 2)", "X=5"),
    e("A i < 2 . (X(i) -> Y(i)) & (Y(i) -> W(i))", "W=2,X=2,Y=2"),
    e("E i < x . X(i)", "X=3,x=0"),
    e("A i < |X| + |Y| . X(i) | Y(i)", "X=3,Y=3"),
    e("|X| + |Y| = 5 & !X(|X|)", "X=2,Y=3"),
    e("E i < |X| . A j < |Y| . Y(j) -> X(i + j)", "X=3,Y=2"),
];

#[derive(Clone, Copy, Debug)]
pub struct InductionEntry {
    pub matrix: &'static str,
    pub z: &'static str,
    pub t: u64,
    pub a: u64,
    /// Bounds for the other free strings.
    pub bounds: &'static str,
}

impl InductionEntry {
    pub fn problem(&self) -> Result<InductionProblem> {
        Ok(InductionProblem {
            matrix: parse(self.matrix)?,
            x: "x".into(),
            z: self.z.into(),
            t: self.t,
            a: self.a,
        })
    }

    pub fn env(&self) -> Result<TranslationEnv> {
        TranslationEnv::parse_bounds(self.bounds)
    }
}

const fn ind(matrix: &'static str, t: u64, a: u64, bounds: &'static str) -> InductionEntry {
    InductionEntry {
        matrix,
        z: "Z",
        t,
        a,
        bounds,
    }
}

/// Matrices `ψ(x, Z)` for the induction trichotomy, with `a ≤ 8`.
pub const INDUCTION_CORPUS: &[InductionEntry] = &[
    ind("A i < x . Z(i)", 4, 5, ""),
    ind("E i < |Z| . Z(i) & X(i)", 4, 3, "X=3"),
    ind("|Z| = x", 3, 4, ""),
    ind("A i < |Z| . Z(i) <-> X(i + x)", 3, 8, "X=4"),
    ind("E i < |Z| . i + 1 = x & Z(i)", 4, 6, ""),
    ind("X(x) & |Z| = 0", 2, 8, "X=4"),
    ind("x * x < |Z| + |X|", 4, 4, "X=2"),
    ind("x <= |X| & (A i < x . Z(i) <-> X(i))", 4, 6, "X=3"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaClass;

    #[test]
    fn corpus_is_small_and_bounded() {
        assert!(CORPUS.len() >= 30);
        for c in CORPUS {
            let f = c.formula().unwrap();
            assert_eq!(f.classify(), FormulaClass::SigmaB0, "{}", c.text);
            let env = c.env().unwrap();
            assert!(env.num_vars() <= 6, "{}", c.text);
            assert!(env.str_bounds.values().chain(env.num_values.values()).all(|&b| b <= 6));
            let (nums, strs) = f.free_vars();
            assert!(nums.iter().all(|x| env.num_values.contains_key(x)), "{}", c.text);
            assert!(strs.iter().all(|x| env.str_bounds.contains_key(x)), "{}", c.text);
        }
        for c in INDUCTION_CORPUS {
            let p = c.problem().unwrap();
            assert_eq!(p.matrix.classify(), FormulaClass::SigmaB0);
            assert!(p.a <= 8);
            c.env().unwrap();
        }
    }
}
