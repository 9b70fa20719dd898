use bvlab_core::circuit::{Assignment, Circuit, CircuitBuilder};
use bvlab_core::instances::{dwphp_family, random_circuit, random_node, random_rand_circuit, rng, FamilyKind};
use bvlab_core::proof::{l_consistent, ConsistencyVerdict, SearchLimits};
use bvlab_core::random::{
    dwphp_range_experiment, dwphp_surjection_set, eval_R, leq_R, resolve, RandCircuit, RandElement, SurjectionOutcome,
    TriBool,
};
use bvlab_core::Limits;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `c ∧ (z0 ∨ z1)` or `c ∨ (z0 ∧ z1)`, which hold with probability 0 or
/// at least 3/4, and at most 1/4 or 1.
fn resolved_block(seed: u64, n: u32) -> RandElement {
    let mut r = rng(seed);
    let mut b = CircuitBuilder::new(n, 2);
    let leaves: Vec<_> = (0..n).map(|k| b.var(k)).collect();
    let gates = r.gen_range(1..=5);
    let c = random_node(&mut r, &mut b, &leaves, gates);
    let (z0, z1) = (b.rvar(0), b.rvar(1));
    let root = if r.gen() {
        let z = b.or(z0, z1);
        b.and(c, z)
    } else {
        let z = b.and(z0, z1);
        b.or(c, z)
    };
    RandElement::new(RandCircuit::block(b.finish(root), n, 2).unwrap(), &Limits::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plain_circuits_evaluate_exactly(seed in any::<u64>(), n in 1u32..=5) {
        let c = random_circuit(&mut rng(seed), n, 0, 10);
        let rc = RandCircuit::plain(c.clone(), n)?;
        for a in Assignment::all(n) {
            let want = if c.eval(&a)? { TriBool::One } else { TriBool::Zero };
            prop_assert_eq!(eval_R(&rc, &a, &Limits::default())?, want);
        }
    }

    #[test]
    fn resolved_elements_form_an_algebra(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), n in 1u32..=3) {
        let lim = Limits::default();
        let (x, y, z) = (resolved_block(s1, n), resolved_block(s2, n), resolved_block(s3, n));
        for e in [x.meet(&y)?, x.join(&y)?, x.complement(), x.meet(&y.join(&z)?)?] {
            prop_assert_eq!(&resolve(e.circuit(), &lim)?, e.table());
        }
        prop_assert_eq!(x.meet(&y.join(&z)?)?, x.meet(&y)?.join(&x.meet(&z)?)?);
        prop_assert_eq!(x.meet(&y)?.complement(), x.complement().join(&y.complement())?);
        prop_assert!(x.meet(&x.complement())?.table().is_zero());
        prop_assert!(x.join(&x.complement())?.table().is_one());
        prop_assert_eq!(x.leq(&y)?, leq_R(x.circuit(), y.circuit(), n, &lim)?);
        prop_assert!(x.meet(&y)?.leq(&x)?);
    }

    #[test]
    fn unused_random_variables_change_nothing(seed in any::<u64>(), m in 0u32..=3, extra in 1u32..=3, blocks in 1usize..=3) {
        let lim = Limits::default();
        let c = random_rand_circuit(&mut rng(seed), 3, m, blocks);
        let wide = c.with_rand(m + extra);
        for a in Assignment::all(3) {
            prop_assert_eq!(eval_R(&c, &a, &lim)?, eval_R(&wide, &a, &lim)?);
        }
    }

    #[test]
    fn range_avoidance_bound(seed in any::<u64>(), a in 2u32..=5, kind in 0usize..3, m in 0u32..=3) {
        let kind = [FamilyKind::Random, FamilyKind::Injective, FamilyKind::Constant][kind];
        let inst = dwphp_family(&mut rng(seed), a, kind);
        let r = dwphp_range_experiment(&inst, m, &Limits::default())?;
        let bound = (1u64 << (3 * a)) - (1u64 << (2 * a));
        prop_assert!(r.p_prime >= bound);
        prop_assert_eq!(r.p_prime == bound, r.range_size == 1 << a);
        prop_assert_eq!(r.injective, r.range_size == 1 << a);
        prop_assert!((4 * r.p_prime as u128) << m >= 3u128 << (2 * a + m));
        prop_assert!(r.pass);
    }

    #[test]
    fn surjection_sets_are_consistent(seed in any::<u64>(), m in 2usize..=3) {
        let mut r = StdRng::seed_from_u64(seed);
        let n = r.gen_range(1..m);
        let k = m as u32;
        let d: Vec<Circuit> = (0..n).map(|_| random_circuit(&mut rng(r.gen()), k, 0, 3)).collect();
        // half the time C_i copies parameter p_i, which makes the map onto
        let c: Vec<Circuit> = (0..m)
            .map(|i| {
                if r.gen() {
                    Circuit::var((n + i) as u32, n as u32 + k)
                } else {
                    random_circuit(&mut rng(r.gen()), n as u32 + k, 0, 3)
                }
            })
            .collect();
        let reached: Vec<usize> = Assignment::all(k)
            .map(|a| {
                let mut x: Vec<bool> = d.iter().map(|dj| dj.eval_with(a.bits(), &[])).collect();
                x.extend_from_slice(a.bits());
                c.iter().enumerate().map(|(i, ci)| (ci.eval_with(&x, &[]) as usize) << i).sum()
            })
            .collect();
        match dwphp_surjection_set(m, n, &c, &d, &Limits::default())? {
            SurjectionOutcome::Set(members) => {
                prop_assert_eq!(members.len(), 1 << m);
                prop_assert!((0..1usize << m).all(|y| reached.contains(&y)));
                let elems: Vec<_> = members.iter().map(|s| s.element.clone()).collect();
                prop_assert!(elems.iter().all(|e| e.is_one()));
                let v = l_consistent(&elems, 50, k, &SearchLimits::default())?;
                prop_assert!(matches!(v, ConsistencyVerdict::Consistent(_)));
            }
            SurjectionOutcome::Missing(ys) => {
                prop_assert!(!ys.is_empty());
                for y in ys {
                    let y: usize = y.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum();
                    prop_assert!(!reached.contains(&y));
                }
            }
        }
    }
}
