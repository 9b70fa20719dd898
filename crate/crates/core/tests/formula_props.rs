use bvlab_core::corpus::CORPUS;
use bvlab_core::formula::{eval_standard, parse, BitString, Formula, FormulaClass, NumEnv, StrEnv, Term};
use bvlab_core::instances::{random_formula, rng};
use bvlab_core::Limits;
use proptest::prelude::*;
use rand::Rng;

/// Plain recursive evaluation, saturating on overflow.
fn term(t: &Term, nums: &NumEnv, strs: &StrEnv) -> u64 {
    match t {
        Term::Zero => 0,
        Term::Num(k) => *k,
        Term::Var(x) => nums[x],
        Term::Succ(a) => term(a, nums, strs) + 1,
        Term::Plus(a, b) => term(a, nums, strs) + term(b, nums, strs),
        Term::Times(a, b) => term(a, nums, strs) * term(b, nums, strs),
        Term::Len(x) => strs[x].len() as u64,
    }
}

fn reference(f: &Formula, nums: &NumEnv, strs: &StrEnv) -> bool {
    let quant = |x: &str, bound: &Term, body: &Formula, all: bool| {
        let b = term(bound, nums, strs);
        let mut hit = (0..b).map(|v| {
            let mut n = nums.clone();
            n.insert(x.to_string(), v);
            reference(body, &n, strs)
        });
        if all {
            hit.all(|v| v)
        } else {
            hit.any(|v| v)
        }
    };
    match f {
        Formula::Eq(a, b) => term(a, nums, strs) == term(b, nums, strs),
        Formula::Leq(a, b) => term(a, nums, strs) <= term(b, nums, strs),
        Formula::Member(x, t) => {
            let i = term(t, nums, strs) as usize;
            strs[x].bits().get(i).copied().unwrap_or(false)
        }
        Formula::Not(a) => !reference(a, nums, strs),
        Formula::And(a, b) => reference(a, nums, strs) && reference(b, nums, strs),
        Formula::Or(a, b) => reference(a, nums, strs) || reference(b, nums, strs),
        Formula::Imp(a, b) => !reference(a, nums, strs) || reference(b, nums, strs),
        Formula::ForallNum(x, t, g) => quant(x, t, g, true),
        Formula::ExistsNum(x, t, g) => quant(x, t, g, false),
        Formula::ForallStr(..) | Formula::ExistsStr(..) => unreachable!("corpus is Sigma^B_0"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printing_round_trips(seed in any::<u64>(), depth in 0u32..=4) {
        let f = random_formula(&mut rng(seed), &["X", "Y"], &["x", "y"], depth);
        prop_assert_eq!(parse(&f.to_string())?, f);
    }

    #[test]
    fn conjunction_preserves_sigma_b0(s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = random_formula(&mut rng(s1), &["X"], &["x"], 3);
        let g = random_formula(&mut rng(s2), &["X"], &["x"], 3);
        prop_assert_eq!(f.classify(), FormulaClass::SigmaB0);
        prop_assert_eq!(Formula::and(f, g).classify(), FormulaClass::SigmaB0);
    }

    #[test]
    fn corpus_matches_reference_evaluator(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lim = Limits::default();
        for entry in CORPUS {
            let (f, env) = (entry.formula()?, entry.env()?);
            let strs: StrEnv = env
                .str_bounds
                .iter()
                .map(|(x, &len)| (x.clone(), BitString::from_value(r.gen(), len as usize)))
                .collect();
            prop_assert_eq!(
                eval_standard(&f, &env.num_values, &strs, &lim)?,
                reference(&f, &env.num_values, &strs),
                "{}", entry.text
            );
        }
    }
}
