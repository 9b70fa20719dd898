//! Ideals, filters, dense sets and generic filters of a finite circuit
//! algebra, and the generic structure they induce.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{AlgebraElement, Assignment, TruthTable};
use crate::error::{Error, Result};
use crate::formula::{eval_standard, BitString, Formula, StrEnv};
use crate::limits::Limits;
use crate::translate::{bool_value, BString, TranslationEnv};

/// The principal ideal `{X : X ≤ c}` with `c ≠ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    generator: AlgebraElement,
}

impl Ideal {
    pub fn principal(generator: AlgebraElement) -> Result<Self> {
        if generator.is_one() {
            return Err(Error::Invalid("an ideal may not contain 1".into()));
        }
        Ok(Ideal { generator })
    }

    /// `{0}`.
    pub fn zero(n: u32) -> Self {
        Ideal {
            generator: AlgebraElement::zero(n),
        }
    }

    pub fn generator(&self) -> &AlgebraElement {
        &self.generator
    }

    pub fn num_vars(&self) -> u32 {
        self.generator.num_vars()
    }

    pub fn contains_table(&self, t: &TruthTable) -> bool {
        t.leq(self.generator.table()).unwrap_or(false)
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        self.contains_table(x.table())
    }

    /// Atoms not in the ideal, in table order.
    pub fn atoms_outside(&self) -> impl Iterator<Item = Assignment> + '_ {
        let n = self.num_vars();
        (0..1usize << n)
            .filter(|&i| !self.generator.table().get(i))
            .map(move |i| Assignment::from_index(i, n))
    }
}

/// The principal filter `{X : g ≤ X}` with `g ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    generator: AlgebraElement,
}

impl Filter {
    pub fn principal(generator: AlgebraElement) -> Result<Self> {
        if generator.is_zero() {
            return Err(Error::Invalid("a filter may not contain 0".into()));
        }
        Ok(Filter { generator })
    }

    pub fn generator(&self) -> &AlgebraElement {
        &self.generator
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        self.generator.leq(x).unwrap_or(false)
    }
}

/// A set of algebra elements given by a membership test on canonical tables.
#[derive(Clone)]
pub struct DenseSet {
    pub name: String,
    pub description: String,
    member: Arc<dyn Fn(&TruthTable) -> bool + Send + Sync>,
}

impl DenseSet {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        member: impl Fn(&TruthTable) -> bool + Send + Sync + 'static,
    ) -> Self {
        DenseSet {
            name: name.into(),
            description: description.into(),
            member: Arc::new(member),
        }
    }

    /// `{Z : Z ≤ x}`.
    pub fn below(x: &AlgebraElement) -> Self {
        let t = x.table().clone();
        DenseSet::new("below", format!("Z <= {x}"), move |z| z.leq(&t).unwrap_or(false))
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        (self.member)(x.table())
    }

    pub fn contains_table(&self, t: &TruthTable) -> bool {
        (self.member)(t)
    }
}

impl fmt::Debug for DenseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseSet({}: {})", self.name, self.description)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityVerdict {
    Dense,
    /// An element outside the ideal with nothing of `D ∖ I` below it.
    NotDense(AlgebraElement),
    /// Sampling found no counterexample.
    Unrefuted {
        samples: u64,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum DensityMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

const EXHAUSTIVE_MAX_N: u32 = 4;
const SUBSET_MAX_ONES: u32 = 16;

fn table_of_mask(n: u32, mask: u64) -> TruthTable {
    TruthTable::from_fn(n, |i| (mask >> i) & 1 == 1)
}

/// Whether some nonzero-outside-`I` element of `D` lies below `x`, by
/// enumerating the sub-elements of `x`.
fn has_dense_below(d: &DenseSet, ideal: &Ideal, x: &TruthTable) -> Option<TruthTable> {
    let ones: Vec<usize> = x.ones().collect();
    let n = x.num_vars();
    (1u64..1 << ones.len()).find_map(|sub| {
        let t = TruthTable::from_fn(n, |i| {
            ones.iter().position(|&o| o == i).is_some_and(|k| (sub >> k) & 1 == 1)
        });
        (!ideal.contains_table(&t) && d.contains_table(&t)).then_some(t)
    })
}

/// Density of `D` over `I`: every `X ∉ I` has some `X' ∈ D ∖ I` with `X' ≤ X`.
pub fn is_dense(d: &DenseSet, ideal: &Ideal, mode: DensityMode) -> Result<DensityVerdict> {
    let n = ideal.num_vars();
    match mode {
        DensityMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::Scale {
                    what: "variables for exhaustive density",
                    value: n as u64,
                    max: EXHAUSTIVE_MAX_N as u64,
                });
            }
            let size = 1usize << (1usize << n);
            let mask_of = |t: &TruthTable| t.words()[0];
            let c = mask_of(ideal.generator.table());
            // below[m]: some member of D \ I is a subset of m
            let mut below = vec![false; size];
            for m in 0..size as u64 {
                if m & !c != 0 && d.contains_table(&table_of_mask(n, m)) {
                    below[m as usize] = true;
                }
            }
            for bit in 0..1usize << n {
                for m in 0..size {
                    if m >> bit & 1 == 1 && below[m ^ (1 << bit)] {
                        below[m] = true;
                    }
                }
            }
            Ok(match (0..size as u64).find(|&m| m & !c != 0 && !below[m as usize]) {
                Some(m) => DensityVerdict::NotDense(AlgebraElement::from_table(table_of_mask(n, m))),
                None => DensityVerdict::Dense,
            })
        }
        DensityMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let bits: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
                let x = TruthTable::from_fn(n, |i| bits[i]);
                if ideal.contains_table(&x) || x.count_ones() > SUBSET_MAX_ONES as u64 {
                    continue;
                }
                if has_dense_below(d, ideal, &x).is_none() {
                    return Ok(DensityVerdict::NotDense(AlgebraElement::from_table(x)));
                }
            }
            Ok(DensityVerdict::Unrefuted { samples })
        }
    }
}

/// The point ultrafilter `{X : X(A) = 1}` at the atom `e_A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericFilter {
    atom: Assignment,
}

impl GenericFilter {
    pub fn at(atom: Assignment) -> Self {
        GenericFilter { atom }
    }

    pub fn atom(&self) -> &Assignment {
        &self.atom
    }

    pub fn num_vars(&self) -> u32 {
        self.atom.len() as u32
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        x.num_vars() == self.num_vars() && x.at(&self.atom)
    }

    /// Every point filter over `n` variables.
    pub fn all(n: u32) -> impl Iterator<Item = GenericFilter> {
        Assignment::all(n).map(GenericFilter::at)
    }
}

fn meets(g: &GenericFilter, ideal: &Ideal, d: &DenseSet) -> bool {
    // below an atom the only candidates are 0 and the atom itself
    let atom = AlgebraElement::atom(g.atom());
    !ideal.contains(&atom) && d.contains(&atom)
}

/// A point filter at an atom outside `I` meeting every listed dense set. Atoms
/// are tried in an order shuffled by `seed`.
pub fn build_generic(ideal: &Ideal, dense: &[DenseSet], seed: u64) -> Result<GenericFilter> {
    let mut atoms: Vec<Assignment> = ideal.atoms_outside().collect();
    if atoms.is_empty() {
        return Err(Error::Inconsistent("no atom lies outside the ideal".into()));
    }
    atoms.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    atoms
        .into_iter()
        .map(GenericFilter::at)
        .find(|g| dense.iter().all(|d| meets(g, ideal, d)))
        .ok_or_else(|| Error::Inconsistent("no atom filter meets every listed set".into()))
}

/// Descends `1 ≥ d_1 ≥ d_2 ≥ …` through the listed sets, each `d_k ∈ D_k ∖ I`,
/// then picks an atom below the last one. Elements with more than 16 atoms
/// below them are only refined by atoms.
pub fn rs_descent(ideal: &Ideal, dense: &[DenseSet], seed: u64) -> Result<GenericFilter> {
    let n = ideal.num_vars();
    let mut current = TruthTable::one(n);
    for d in dense {
        let next = if current.count_ones() <= SUBSET_MAX_ONES as u64 {
            has_dense_below(d, ideal, &current)
        } else {
            // descend through atoms when the element is too large to enumerate
            current
                .ones()
                .map(|i| TruthTable::from_fn(n, |j| j == i))
                .find(|t| !ideal.contains_table(t) && d.contains_table(t))
        };
        current = next.ok_or_else(|| Error::Inconsistent(format!("{} is not dense below the descent", d.name)))?;
    }
    let mut atoms: Vec<usize> = current.ones().filter(|&i| !ideal.generator.table().get(i)).collect();
    atoms.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let i = *atoms
        .first()
        .ok_or_else(|| Error::Inconsistent("descent ended inside the ideal".into()))?;
    Ok(GenericFilter::at(Assignment::from_index(i, n)))
}

/// `i_G(X) = {y < |X| : X(y) ∈ G}`.
pub fn i_g(x: &BString, g: &GenericFilter) -> Result<BitString> {
    if x.num_vars() != g.num_vars() {
        return Err(Error::Arity {
            expected: g.num_vars() as usize,
            got: x.num_vars() as usize,
        });
    }
    Ok(BitString(x.entries().iter().map(|e| g.contains(e)).collect()))
}

/// The strings `i_G(X)` of a finite part of `M[G]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenericStructure {
    pub strings: StrEnv,
}

pub fn realize(m: &BTreeMap<String, BString>, g: &GenericFilter) -> Result<GenericStructure> {
    let strings = m
        .iter()
        .map(|(k, x)| Ok((k.clone(), i_g(x, g)?)))
        .collect::<Result<_>>()?;
    Ok(GenericStructure { strings })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcingVerdict {
    pub formula: String,
    pub bounds: String,
    pub assignment: String,
    /// Truth in the realized structure.
    pub lhs: bool,
    /// Membership of the Boolean value in `G`.
    pub rhs: bool,
    pub agree: bool,
}

/// Compares `M[G] ⊨ φ` with `⟦φ⟧ ∈ G`.
pub fn forcing_check(
    f: &Formula,
    env: &TranslationEnv,
    args: &BTreeMap<String, BString>,
    g: &GenericFilter,
    limits: &Limits,
) -> Result<ForcingVerdict> {
    let n = g.num_vars();
    let structure = realize(args, g)?;
    let lhs = eval_standard(f, &env.num_values, &structure.strings, limits)?;
    let rhs = g.contains(&bool_value(f, env, args, n, limits)?);
    Ok(ForcingVerdict {
        formula: f.to_string(),
        bounds: env.to_string(),
        assignment: g.atom().to_string(),
        lhs,
        rhs,
        agree: lhs == rhs,
    })
}

/// The ideal generated by `¬⋀T`: its complement filter is generated by `⋀T`,
/// so every atom filter outside it contains all of `T`.
pub fn consistent_set_to_ideal(t: &[AlgebraElement], n: u32) -> Result<Ideal> {
    let meet = AlgebraElement::meet_all(n, t)?;
    if meet.is_zero() {
        return Err(Error::Inconsistent("the meet of the set is zero".into()));
    }
    Ideal::principal(meet.complement())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InductionCase {
    /// No witness at 0.
    A,
    /// A witness at `a`.
    B,
    /// A witness at `x` and none at `x + 1`.
    C { x: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrichotomyReport {
    /// The holding cases in the order (a), (b), (c).
    pub cases: Vec<InductionCase>,
    /// `∃Z<t ψ(v, Z)` in the realized structure for `v ≤ a`.
    pub profile: Vec<bool>,
    /// Whether the same profile results from Boolean values with constant
    /// witnesses.
    pub boolean_agrees: bool,
}

/// A Σ^B_0 matrix `ψ(x, Z)` with a distinguished number variable and witness
/// string, the witness bound `t` and the induction length `a`.
#[derive(Clone, Debug)]
pub struct InductionProblem {
    pub matrix: Formula,
    pub x: String,
    pub z: String,
    pub t: u64,
    pub a: u64,
}

/// Decides which of the three induction cases hold in `realize(args, G)`.
pub fn ind_trichotomy_check(
    p: &InductionProblem,
    env: &TranslationEnv,
    args: &BTreeMap<String, BString>,
    g: &GenericFilter,
    limits: &Limits,
) -> Result<TrichotomyReport> {
    let max_len = p.t.saturating_sub(1);
    if max_len > limits.max_string_len {
        return Err(Error::Scale {
            what: "witness bound",
            value: max_len,
            max: limits.max_string_len,
        });
    }
    let work = (p.a + 1).saturating_mul(1u64 << p.t.min(63));
    if work > limits.max_expansion {
        return Err(Error::Budget {
            budget: limits.max_expansion,
        });
    }
    let n = g.num_vars();
    let realized = realize(args, g)?.strings;
    let mut profile = Vec::new();
    let mut boolean_profile = Vec::new();
    for v in 0..=p.a {
        let mut nums = env.num_values.clone();
        nums.insert(p.x.clone(), v);
        let mut truth = false;
        let mut forced = false;
        for len in 0..p.t as usize {
            let mut benv = env.str_bounds.clone();
            benv.insert(p.z.clone(), len as u64);
            let zenv = TranslationEnv::new(nums.clone(), benv)?;
            for w in 0..1u64 << len {
                let z = BitString::from_value(w, len);
                let mut strs = realized.clone();
                strs.insert(p.z.clone(), z.clone());
                truth = truth || eval_standard(&p.matrix, &nums, &strs, limits)?;
                let mut bargs = args.clone();
                bargs.insert(p.z.clone(), BString::constant(&z, n));
                forced = forced || g.contains(&bool_value(&p.matrix, &zenv, &bargs, n, limits)?);
                if truth && forced {
                    break;
                }
            }
        }
        profile.push(truth);
        boolean_profile.push(forced);
    }
    let mut cases = Vec::new();
    if !profile[0] {
        cases.push(InductionCase::A);
    }
    if profile[p.a as usize] {
        cases.push(InductionCase::B);
    }
    if let Some(x) = (0..p.a).find(|&x| profile[x as usize] && !profile[x as usize + 1]) {
        cases.push(InductionCase::C { x });
    }
    if cases.is_empty() {
        return Err(Error::Inconsistent("no induction case holds".into()));
    }
    Ok(TrichotomyReport {
        boolean_agrees: boolean_profile == profile,
        cases,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn p(k: u32, n: u32) -> AlgebraElement {
        AlgebraElement::var(k, n).unwrap()
    }

    #[test]
    fn i_g_examples() {
        let x = BString::new(1, vec![p(0, 1), p(0, 1).complement()]).unwrap();
        let g = GenericFilter::at(Assignment::from_bits(vec![true]));
        assert_eq!(i_g(&x, &g).unwrap().to_string(), "10");
        let z = BString::constant(&"000".parse().unwrap(), 2);
        assert_eq!(
            i_g(&z, &GenericFilter::at(Assignment::from_index(3, 2)))
                .unwrap()
                .to_string(),
            "000"
        );
        assert!(i_g(&z, &g).is_err());
    }

    #[test]
    fn ideal_and_filter_membership() {
        assert!(Ideal::principal(AlgebraElement::one(2)).is_err());
        assert!(Filter::principal(AlgebraElement::zero(2)).is_err());
        let i = Ideal::principal(p(0, 2).complement()).unwrap();
        assert!(i.contains(&AlgebraElement::zero(2)));
        assert!(!i.contains(&p(0, 2)));
        let f = Filter::principal(p(0, 2)).unwrap();
        assert!(f.contains(&AlgebraElement::one(2)));
        assert!(!f.contains(&p(1, 2)));
    }

    #[test]
    fn density_examples() {
        let i = Ideal::zero(2);
        let all = DenseSet::new("all", "B", |_| true);
        assert_eq!(
            is_dense(&all, &i, DensityMode::Exhaustive).unwrap(),
            DensityVerdict::Dense
        );
        let top = DenseSet::new("top", "{1}", |t| t.is_one());
        match is_dense(&top, &i, DensityMode::Exhaustive).unwrap() {
            DensityVerdict::NotDense(w) => assert!(!w.is_one() && !w.is_zero()),
            v => panic!("{v:?}"),
        }
        let x0 = p(0, 2).join(&p(1, 2)).unwrap();
        let t = [x0.clone()];
        let ideal = consistent_set_to_ideal(&t, 2).unwrap();
        assert_eq!(
            is_dense(&DenseSet::below(&x0), &ideal, DensityMode::Exhaustive).unwrap(),
            DensityVerdict::Dense
        );
        assert!(is_dense(&all, &Ideal::zero(5), DensityMode::Exhaustive).is_err());
        assert!(matches!(
            is_dense(&top, &Ideal::zero(3), DensityMode::Sampled { samples: 50, seed: 1 }).unwrap(),
            DensityVerdict::NotDense(_)
        ));
    }

    #[test]
    fn generic_filters() {
        let g1 = build_generic(&Ideal::zero(1), &[], 4).unwrap();
        assert_eq!(g1, build_generic(&Ideal::zero(1), &[], 4).unwrap());
        let i = Ideal::principal(p(0, 3).complement()).unwrap();
        for seed in 0..8 {
            assert!(build_generic(&i, &[], seed).unwrap().atom().bits()[0]);
        }
        // a non-tautology: tau = p0 | p1; any generic meeting "below not tau" falsifies tau
        let tau = p(0, 3).join(&p(1, 3)).unwrap();
        let d = DenseSet::below(&tau.complement());
        let i = consistent_set_to_ideal(&[tau.complement()], 3).unwrap();
        for seed in 0..8 {
            let g = build_generic(&i, std::slice::from_ref(&d), seed).unwrap();
            assert!(g.contains(&tau.complement()));
            let r = rs_descent(&i, std::slice::from_ref(&d), seed).unwrap();
            assert!(!r.contains(&tau));
        }
    }

    #[test]
    fn consistent_sets() {
        let i = consistent_set_to_ideal(&[AlgebraElement::one(2)], 2).unwrap();
        assert!(i.generator().is_zero());
        let i = consistent_set_to_ideal(&[p(0, 1)], 1).unwrap();
        let atoms: Vec<_> = i.atoms_outside().collect();
        assert_eq!(atoms, vec![Assignment::from_bits(vec![true])]);
        assert!(consistent_set_to_ideal(&[p(0, 1), p(0, 1).complement()], 1).is_err());
    }

    #[test]
    fn realize_and_force() {
        assert!(
            realize(&BTreeMap::new(), &GenericFilter::at(Assignment::from_bits(vec![])))
                .unwrap()
                .strings
                .is_empty()
        );
        let args: BTreeMap<_, _> = [("X".to_string(), BString::new(1, vec![p(0, 1)]).unwrap())].into();
        let g = GenericFilter::at(Assignment::from_bits(vec![true]));
        assert_eq!(realize(&args, &g).unwrap().strings["X"].to_string(), "1");
        let env = TranslationEnv::for_args(Default::default(), &args).unwrap();
        let v = forcing_check(&parse("X(0)").unwrap(), &env, &args, &g, &Limits::default()).unwrap();
        assert!(v.lhs && v.rhs && v.agree);
        let v = forcing_check(&parse("1 = 0").unwrap(), &env, &args, &g, &Limits::default()).unwrap();
        assert!(!v.lhs && !v.rhs && v.agree);
    }

    #[test]
    fn trichotomy_examples() {
        let lim = Limits::default();
        let args = BTreeMap::new();
        let env = TranslationEnv::default();
        let g = GenericFilter::at(Assignment::from_bits(vec![]));
        let prob = |m: &str, a| InductionProblem {
            matrix: parse(m).unwrap(),
            x: "x".into(),
            z: "Z".into(),
            t: 2,
            a,
        };
        let r = ind_trichotomy_check(&prob("x = 0", 2), &env, &args, &g, &lim).unwrap();
        assert_eq!(r.cases, vec![InductionCase::C { x: 0 }]);
        assert!(r.boolean_agrees);
        let r = ind_trichotomy_check(&prob("x = x", 3), &env, &args, &g, &lim).unwrap();
        assert_eq!(r.cases, vec![InductionCase::B]);
        let r = ind_trichotomy_check(&prob("Z(0) & 1 <= x", 3), &env, &args, &g, &lim).unwrap();
        assert_eq!(r.cases, vec![InductionCase::A, InductionCase::B]);
    }
}
