mod common;

use common::*;
use penrose::canonical_forms::{col_block_form, lemma1_form, pinv_via_gram, row_block_form};
use penrose::*;
use proptest::prelude::*;
use rand::RngExt;

fn sig_strategy() -> impl Strategy<Value = AlgebraSignature> {
    prop_oneof![Just(sig(&[1])), Just(sig(&[2])), Just(sig(&[1, 2]))]
}

fn unitary_defect(b: &CMatrix) -> f64 {
    (&b.adjoint_mul(b) - &CMatrix::identity(b.cols())).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn lemma1_invariants(seed in any::<u64>(), s in sig_strategy(), m in 1usize..5, k in 1usize..5) {
        let mut g = rng(seed);
        let t = random_op(&mut g, &s, m, k);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        prop_assume!(!p.boundary_flag);
        let l = lemma1_form(&t, RankTol::Auto).unwrap();
        prop_assert_eq!(l.rank, p.rank);
        prop_assert!(unitary_defect(&l.domain_basis()) <= 1e-12 * k as f64 * s.dim() as f64);
        prop_assert!(unitary_defect(&l.codomain_basis()) <= 1e-12 * m as f64 * s.dim() as f64);
        let tn = t.flat().frobenius_norm();
        prop_assert!(l.off_block_mass <= 1e-10 * (1.0 + tn));
        prop_assert!(l.rank == 0 || l.t1_min_singular_value > 0.0);
        prop_assert!(l.reconstruction_residual <= 1e-10);
        prop_assert!(l.residual_vs_pinv <= 1e-9);
        prop_assert!(rel(&l.pseudoinverse_flat, &oracle_pinv(t.flat())) <= 1e-9);
    }

    #[test]
    fn row_block_invariants(seed in any::<u64>(), s in sig_strategy(), m in 1usize..5, k in 1usize..5) {
        let mut g = rng(seed);
        let t = random_op(&mut g, &s, m, k);
        prop_assume!(!moore_penrose(&t, RankTol::Auto).unwrap().boundary_flag);
        let r = g.random_range(0..=k);
        let p = random_projection(&mut g, &s, k, r);
        let f = row_block_form(&t, &p, RankTol::Auto).unwrap();
        prop_assert!(f.rank == 0 || f.d_check.min_eigenvalue > 0.0);
        prop_assert!(f.d_check.inverse_residual <= 1e-10);
        prop_assert!(f.d_check.hermitian_residual <= 1e-12);
        let tn = t.flat().frobenius_norm();
        prop_assert!(f.gram_off_block_mass <= 1e-10 * (1.0 + tn * tn));
        prop_assert_eq!(f.t1.cols() + f.t2.cols(), k * s.dim());
        prop_assert!(f.residual_vs_pinv <= 1e-9);
        prop_assert!(rel(f.pinv_formula.flat(), &oracle_pinv(t.flat())) <= 1e-9);
    }

    #[test]
    fn col_block_invariants(seed in any::<u64>(), s in sig_strategy(), m in 1usize..5, k in 1usize..5) {
        let mut g = rng(seed);
        let t = random_op(&mut g, &s, m, k);
        prop_assume!(!moore_penrose(&t, RankTol::Auto).unwrap().boundary_flag);
        let r = g.random_range(0..=m);
        let q = random_projection(&mut g, &s, m, r);
        let f = col_block_form(&t, &q, RankTol::Auto).unwrap();
        prop_assert!(f.rank == 0 || f.dfrak_check.min_eigenvalue > 0.0);
        prop_assert!(f.dfrak_check.inverse_residual <= 1e-10);
        prop_assert!(f.residual_vs_pinv <= 1e-9);
        prop_assert!(rel(f.pinv_formula.flat(), &oracle_pinv(t.flat())) <= 1e-9);
    }

    #[test]
    fn every_route_gives_the_same_inverse(seed in any::<u64>(), s in sig_strategy(), m in 1usize..5, k in 1usize..5) {
        let mut g = rng(seed);
        let t = random_op(&mut g, &s, m, k);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        let gram = moore_penrose(&compose(&t, &adjoint_op(&t)).unwrap(), RankTol::Auto).unwrap();
        prop_assume!(!p.boundary_flag && !gram.boundary_flag);
        let x = p.pseudoinverse.flat();
        let l = lemma1_form(&t, RankTol::Auto).unwrap();
        // the projection onto Ran(T^*) splits the domain along the range/kernel pair
        let ran_star = compose(&p.pseudoinverse, &t).unwrap();
        let rf = row_block_form(&t, &ran_star, RankTol::Auto).unwrap();
        prop_assert!(rf.t2.frobenius_norm() <= 1e-10 * (1.0 + t.flat().frobenius_norm()));
        let via_gram = pinv_via_gram(&t).unwrap();
        prop_assert!(rel(&l.pseudoinverse_flat, x) <= 1e-9);
        prop_assert!(rel(rf.pinv_formula.flat(), x) <= 1e-9);
        prop_assert!(rel(via_gram.flat(), x) <= 1e-9);
    }
}

#[test]
fn row_vector_inverse_is_half_the_adjoint() {
    // T T^* = 2, so T^+ = T^* / 2.
    let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0]]);
    let expect = CMatrix::from_real_rows(&[&[0.5], &[0.5]]);
    let l = lemma1_form(&t, RankTol::Auto).unwrap();
    assert!(rel(&l.pseudoinverse_flat, &expect) <= 1e-15);
    assert!(rel(pinv_via_gram(&t).unwrap().flat(), &expect) <= 1e-15);
    let id = AdjointableOp::identity(&sig(&[1]), 2);
    let rf = row_block_form(&t, &id, RankTol::Auto).unwrap();
    assert!(rel(rf.pinv_formula.flat(), &expect) <= 1e-15);
    assert!((rf.d[(0, 0)].re - 2.0).abs() < 1e-15);
    let q = AdjointableOp::identity(&sig(&[1]), 1);
    let cf = col_block_form(&t, &q, RankTol::Auto).unwrap();
    assert!(rel(cf.pinv_formula.flat(), &expect) <= 1e-15);
}

#[test]
fn degenerate_and_invalid_inputs() {
    let s2 = sig(&[2]);
    let z = AdjointableOp::zero(&s2, 2, 3);
    let rf = row_block_form(&z, &AdjointableOp::identity(&s2, 3), RankTol::Auto).unwrap();
    assert_eq!(rf.rank, 0);
    assert_eq!(rf.pinv_formula, AdjointableOp::zero(&s2, 3, 2));
    assert_eq!(pinv_via_gram(&z).unwrap(), AdjointableOp::zero(&s2, 3, 2));

    let t = AdjointableOp::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
    let not_a_projection = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
    assert!(matches!(
        row_block_form(&t, &not_a_projection, RankTol::Auto),
        Err(Error::InvalidDecomposition(_))
    ));
    assert!(matches!(
        col_block_form(&t, &AdjointableOp::identity(&sig(&[1]), 3), RankTol::Auto),
        Err(Error::InvalidDecomposition(_))
    ));
}
