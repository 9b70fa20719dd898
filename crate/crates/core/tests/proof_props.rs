use bvlab_core::circuit::AlgebraElement;
use bvlab_core::instances::{mutate_proof, random_consistent_set, random_ef_proof, random_element, rng};
use bvlab_core::proof::{
    check_ef, check_ef_s, check_wf, l_consistent, l_entails, leq_ef, ConsistencyVerdict, EntailVerdict, ProofBuilder,
    Scheme, SearchLimits,
};
use proptest::prelude::*;
use rand::Rng;

fn lit(k: u32, positive: bool, n: u32) -> AlgebraElement {
    let v = AlgebraElement::var(k, n).unwrap();
    if positive {
        v
    } else {
        v.complement()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entailment_proofs_are_sound(seed in any::<u64>(), n in 1u32..=3, size in 1usize..=3) {
        let mut r = rng(seed);
        let mut s: Vec<AlgebraElement> = (0..size).map(|_| lit(r.gen_range(0..n), r.gen(), n)).collect();
        if r.gen() {
            let (a, b) = (s[0].clone(), lit(r.gen_range(0..n), r.gen(), n));
            s.push(a.implies(&b)?);
        }
        let target = if r.gen() { s[r.gen_range(0..s.len())].clone() } else { random_element(&mut r, n) };
        let meet = AlgebraElement::meet_all(n, &s)?;
        match l_entails(&s, &target, 400, n, &SearchLimits::default())? {
            EntailVerdict::Entailed(p) => {
                prop_assert!(check_ef_s(&p, &s, n).is_ok());
                prop_assert!(p.total_size() <= 400);
                prop_assert!(meet.leq(&target)?);
            }
            EntailVerdict::SemanticallyRefuted(a) => {
                prop_assert!(meet.at(&a) && !target.at(&a));
            }
            EntailVerdict::NotFound | EntailVerdict::BudgetExhausted => prop_assert!(meet.leq(&target)?),
        }
    }

    #[test]
    fn ef_order_implies_algebra_order(seed in any::<u64>(), n in 1u32..=4) {
        let mut r = rng(seed);
        let (x, y) = (random_element(&mut r, n), random_element(&mut r, n));
        let mut pb = ProofBuilder::new(n);
        let (a, b) = (pb.b.import(x.witness()), pb.b.import(y.witness()));
        let or = pb.b.or(a, b);
        pb.axiom(Scheme::OrI1, &[a, b]);
        let joined = AlgebraElement::from_circuit(pb.b.finish(or), n)?;
        let p = pb.finish();
        prop_assert!(leq_ef(&x, &joined, &p)?);
        prop_assert!(x.leq(&joined)?);
        if leq_ef(&y, &joined, &p)? {
            prop_assert!(y.leq(&joined)?);
        }
    }

    #[test]
    fn consistency_is_monotone_in_size(seed in any::<u64>(), n in 1u32..=2, l in 1usize..=60) {
        let mut r = rng(seed);
        let k = r.gen_range(0..n);
        let mut s = vec![lit(k, true, n), lit(k, false, n)];
        if r.gen() {
            s.push(random_element(&mut r, n));
        }
        let lim = SearchLimits::default();
        if let ConsistencyVerdict::Inconsistent(p) = l_consistent(&s, l, n, &lim)? {
            prop_assert!(p.total_size() <= l);
            prop_assert!(matches!(l_consistent(&s, l + 20, n, &lim)?, ConsistencyVerdict::Inconsistent(_)));
        }
        let good = random_consistent_set(&mut r, n, 3);
        prop_assert!(matches!(l_consistent(&good, l, n, &lim)?, ConsistencyVerdict::Consistent(_)));
    }

    #[test]
    fn wf_accepts_ef_proofs(seed in any::<u64>(), base in 1u32..=3, exts in 0u32..=3, steps in 1usize..=8) {
        let mut r = rng(seed);
        let p = random_ef_proof(&mut r, base, exts, steps);
        prop_assert!(check_ef(&p).is_ok());
        prop_assert!(check_wf(&p).is_ok());
        let (bad, _) = mutate_proof(&mut r, &p);
        if check_ef(&bad).is_ok() {
            prop_assert!(check_wf(&bad).is_ok());
        }
    }
}
