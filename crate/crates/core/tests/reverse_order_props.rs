mod common;

use common::*;
use penrose::reverse_order::generate::check_feasible;
use penrose::reverse_order::DEFAULT_TOL;
use penrose::*;
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOL;

fn small_sig() -> impl Strategy<Value = AlgebraSignature> {
    prop_oneof![Just(sig(&[1])), Just(sig(&[2]))]
}

fn dims() -> impl Strategy<Value = Dims> {
    (1usize..5, 1usize..5, 1usize..5).prop_map(|(p, m, k)| Dims::new(p, m, k))
}

fn kind() -> impl Strategy<Value = InstanceKind> {
    proptest::sample::select(InstanceKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn range_family_verdicts_coincide(seed in any::<u64>(), s in small_sig(), d in dims()) {
        let (t, sop) = gen_instance(InstanceKind::Generic, d, None, &s, seed).unwrap();
        let r = check_thm21(&t, &sop, TOL).unwrap();
        prop_assume!(!r.boundary_flag);
        prop_assert!(r.agree(), "{:?}", r);
    }

    #[test]
    fn domain_family_verdicts_coincide(seed in any::<u64>(), s in small_sig(), d in dims()) {
        let (t, sop) = gen_instance(InstanceKind::Generic, d, None, &s, seed).unwrap();
        let r = check_thm22(&t, &sop, TOL).unwrap();
        prop_assume!(!r.boundary_flag);
        prop_assert!(r.agree(), "{:?}", r);
    }

    #[test]
    fn certificates_are_consistent(seed in any::<u64>(), s in small_sig(), d in dims(), kind in kind()) {
        prop_assume!(check_feasible(kind, d, None).is_ok());
        let (t, sop) = gen_instance(kind, d, None, &s, seed).unwrap();
        let c = check_corollary(&t, &sop, TOL).unwrap();
        prop_assume!(!c.boundary_flag);
        prop_assert!(c.consistent, "{:?}", c);
    }

    #[test]
    fn law_verdict_matches_an_independent_oracle(seed in any::<u64>(), s in small_sig(), d in dims(), kind in kind()) {
        prop_assume!(check_feasible(kind, d, None).is_ok());
        let (t, sop) = gen_instance(kind, d, None, &s, seed).unwrap();
        let c = check_corollary(&t, &sop, TOL).unwrap();
        prop_assume!(!c.boundary_flag);
        let ts = t.flat().matmul(sop.flat());
        let lhs = oracle_pinv(&ts);
        let rhs = oracle_pinv(sop.flat()).matmul(&oracle_pinv(t.flat()));
        let r = rel(&lhs, &rhs);
        prop_assume!(!(TOL / 100.0..=TOL * 100.0).contains(&r));
        prop_assert_eq!(c.rol_holds, r <= TOL);
    }

    #[test]
    fn gram_pairs_satisfy_everything(seed in any::<u64>(), s in small_sig(), m in 1usize..5, k in 1usize..5) {
        let mut g = rng(seed);
        let t = random_op(&mut g, &s, m, k);
        let c = check_corollary(&t, &adjoint_op(&t), TOL).unwrap();
        prop_assume!(!c.boundary_flag);
        prop_assert!(c.all_true(), "{:?}", c);
    }

    #[test]
    fn block_conditions_mirror_the_families(seed in any::<u64>(), s in small_sig(), d in dims(), kind in kind()) {
        prop_assume!(check_feasible(kind, d, None).is_ok());
        let (t, sop) = gen_instance(kind, d, None, &s, seed).unwrap();
        prop_assume!(!sop.is_zero());
        let c = check_corollary(&t, &sop, TOL).unwrap();
        let b = block_conditions(&t, &sop, TOL).unwrap();
        prop_assume!(!c.boundary_flag && !b.boundary_flag);
        prop_assert_eq!(b.thm21_verdicts(), c.thm21.verdicts());
        prop_assert_eq!(b.thm22_verdicts(), c.thm22.verdicts());
        // c2 is condition (ii) of the range family in block form
        prop_assert_eq!(b.c2.holds, c.thm21.ii.holds);
    }

    #[test]
    fn kinds_meet_their_contracts(seed in any::<u64>(), s in small_sig(), d in dims(), kind in kind()) {
        prop_assume!(check_feasible(kind, d, None).is_ok());
        let (t, sop) = gen_instance(kind, d, None, &s, seed).unwrap();
        prop_assert_eq!((t.rows(), t.cols(), sop.cols()), (d.p, d.m, d.k));
        let c = check_corollary(&t, &sop, TOL).unwrap();
        match kind {
            InstanceKind::RolHolds => prop_assert!(!c.boundary_flag && c.all_true()),
            InstanceKind::Thm21Only => prop_assert!(c.thm21.all_hold() && !c.thm22.all_hold() && !c.rol_holds),
            InstanceKind::Thm22Only => prop_assert!(c.thm22.all_hold() && !c.thm21.all_hold() && !c.rol_holds),
            InstanceKind::SAdjoint => prop_assert_eq!(&sop, &adjoint_op(&t)),
            InstanceKind::Generic => {}
        }
    }
}

/// The "(3) implies (2)" step of the range-family proof: once `c3a` and `c3b`
/// hold, `c2` does too.
#[test]
fn commutator_conditions_force_orthogonality() {
    let mut seen = 0;
    for seed in 0..200u64 {
        for kind in [InstanceKind::RolHolds, InstanceKind::Thm21Only, InstanceKind::Thm22Only] {
            let s = if seed % 2 == 0 { sig(&[1]) } else { sig(&[2]) };
            let (t, sop) = gen_instance(kind, Dims::new(4, 4, 4), None, &s, seed).unwrap();
            let b = block_conditions(&t, &sop, TOL).unwrap();
            if b.boundary_flag {
                continue;
            }
            if b.c3a.holds && b.c3b.holds {
                seen += 1;
                assert!(b.c2.holds, "seed {seed} {kind}: {:?}", b.c2);
            }
        }
    }
    assert!(seen >= 100, "only {seen} instances exercised the implication");
}

#[test]
fn column_pair_satisfies_the_law() {
    // Direct arithmetic: TS = diag(2, 0), S^+ = [[.5,.5],[0,0]], T^+ = [[.5,0],[.5,0]],
    // so S^+ T^+ = diag(.5, 0) = (TS)^+.
    let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
    let s = AdjointableOp::from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let half = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.0]]);
    let ts = moore_penrose(&compose(&t, &s).unwrap(), RankTol::Auto).unwrap();
    assert!(rel(ts.pseudoinverse.flat(), &half) <= 1e-15);
    assert!(rel(&oracle_pinv(&CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]])), &half) <= 1e-15);
    let c = check_corollary(&t, &s, TOL).unwrap();
    assert!(c.all_true() && c.consistent && !c.boundary_flag);
    assert!(c.residual_rol <= 1e-15);
}

#[test]
fn projection_pair_violates_the_law() {
    // TS = diag(1, 0) = (TS)^+, while S^+ T^+ = diag(.5, 0): residual .5 / (1 + 1).
    let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
    let s = AdjointableOp::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let c = check_corollary(&t, &s, TOL).unwrap();
    assert!(c.all_false() && c.consistent && !c.boundary_flag);
    assert!((c.residual_rol - 0.25).abs() <= 1e-15);
    assert!(!c.greville.tstar_t_s_in_ran_s.holds);
    assert!(!c.greville.s_sstar_tstar_in_ran_tstar.holds);
    let b = block_conditions(&t, &s, TOL).unwrap();
    assert_eq!(b.thm21_verdicts(), [false; 3]);
    assert_eq!(b.thm22_verdicts(), [false; 3]);
}

#[test]
fn invertible_pair_satisfies_the_law() {
    let t = AdjointableOp::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
    let s = AdjointableOp::from_real_rows(&[&[1.0, -1.0], &[-1.0, 2.0]]);
    let c = check_corollary(&t, &s, TOL).unwrap();
    assert!(c.all_true() && c.consistent);
}

#[test]
fn incompatible_pairs_are_rejected() {
    let t = AdjointableOp::zero(&sig(&[1]), 2, 3);
    let s = AdjointableOp::zero(&sig(&[1]), 2, 2);
    assert!(matches!(check_corollary(&t, &s, TOL), Err(Error::Conformability(_))));
    let s2 = AdjointableOp::zero(&sig(&[2]), 3, 2);
    assert!(check_thm21(&t, &s2, TOL).is_err());
    assert!(matches!(
        block_conditions(&t, &AdjointableOp::zero(&sig(&[1]), 3, 2), TOL),
        Err(Error::DegenerateDecomposition(_))
    ));
}
