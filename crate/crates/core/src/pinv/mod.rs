//! Moore-Penrose inverses, Penrose-equation residuals and theta-inverse
//! membership.
//!
//! The pseudoinverse of an operator is computed on its flattening by
//! inverting the retained singular values and then projected back onto the
//! left-multiplication pattern. In exact arithmetic the result is already on
//! the pattern: the pseudoinverse of an element of a finite-dimensional
//! C*-algebra stays in that algebra.

pub mod svd;

use std::collections::BTreeSet;

use crate::error::{conform, Result};
use crate::matrix::{relative_residual, CMatrix};
use crate::operators::{adjoint_op, compose, unflatten, AdjointableOp};

pub use svd::{svd_factor, SvdFactors};

/// Off-pattern tolerance used when unflattening a computed pseudoinverse.
pub const UNFLATTEN_TOL: f64 = 1e-8;

/// Width of the indeterminacy band around the rank cutoff: a singular value
/// in `[cutoff / BAND, cutoff * BAND]` sets the boundary flag.
pub const BOUNDARY_BAND: f64 = 10.0;

/// Rank decision rule.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum RankTol {
    /// Retain `sigma > max(rows, cols) * eps * sigma_1` on the flattening.
    #[default]
    Auto,
    /// Retain `sigma > tol`.
    Absolute(f64),
}

impl RankTol {
    pub fn cutoff(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankTol::Auto => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            RankTol::Absolute(t) => t,
        }
    }
}

/// Pseudoinverse of a plain complex matrix with its rank decision.
#[derive(Clone, Debug)]
pub struct MatrixPinv {
    pub pseudoinverse: CMatrix,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub cutoff: f64,
    pub boundary_flag: bool,
}

/// Pseudoinverse of `m` by way of [`svd_factor`].
pub fn pinv_matrix(m: &CMatrix, rank_tol: RankTol) -> MatrixPinv {
    let f = svd_factor(m);
    pinv_from_factors(m.shape(), &f, rank_tol)
}

pub(crate) fn pinv_from_factors(shape: (usize, usize), f: &SvdFactors, rank_tol: RankTol) -> MatrixPinv {
    let (rows, cols) = shape;
    let cutoff = rank_tol.cutoff(rows, cols, f.largest());
    let rank = f.singular_values.iter().take_while(|&&s| s > cutoff).count();
    let boundary_flag = cutoff > 0.0
        && f
            .singular_values
            .iter()
            .any(|&s| s >= cutoff / BOUNDARY_BAND && s <= cutoff * BOUNDARY_BAND);
    // X = V_r diag(1/sigma) U_r^H
    let mut x = CMatrix::zeros(cols, rows);
    for j in 0..rank {
        let inv = 1.0 / f.singular_values[j];
        let uj = f.u.column(j);
        let vj = f.v.column(j);
        for c in 0..rows {
            let w = uj[c].conj() * inv;
            for r in 0..cols {
                x[(r, c)] += vj[r] * w;
            }
        }
    }
    MatrixPinv {
        pseudoinverse: x,
        rank,
        singular_values: f.singular_values.clone(),
        cutoff,
        boundary_flag,
    }
}

/// A Moore-Penrose inverse together with its diagnostics.
#[derive(Clone, Debug)]
pub struct PinvResult {
    pub pseudoinverse: AdjointableOp,
    /// Rank of the flattening.
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Residuals of `TXT = T`, `XTX = X`, `(TX)^* = TX`, `(XT)^* = XT`.
    pub penrose_residuals: [f64; 4],
    pub boundary_flag: bool,
    pub cutoff: f64,
}

pub fn moore_penrose(t: &AdjointableOp, rank_tol: RankTol) -> Result<PinvResult> {
    let mp = pinv_matrix(t.flat(), rank_tol);
    let x = unflatten(&mp.pseudoinverse, t.signature(), (t.cols(), t.rows()), UNFLATTEN_TOL)?;
    let penrose_residuals = penrose_residuals(t, &x)?;
    Ok(PinvResult {
        pseudoinverse: x,
        rank: mp.rank,
        singular_values: mp.singular_values,
        penrose_residuals,
        boundary_flag: mp.boundary_flag,
        cutoff: mp.cutoff,
    })
}

/// Relative residuals of the four Penrose equations for the candidate `x`.
pub fn penrose_residuals(t: &AdjointableOp, x: &AdjointableOp) -> Result<[f64; 4]> {
    if x.signature() != t.signature() || x.rows() != t.cols() || x.cols() != t.rows() {
        return Err(conform(format!(
            "candidate of shape {}x{} for a {}x{} operator",
            x.rows(),
            x.cols(),
            t.rows(),
            t.cols()
        )));
    }
    let tx = compose(t, x)?;
    let xt = compose(x, t)?;
    let txt = compose(&tx, t)?;
    let xtx = compose(&xt, x)?;
    Ok([
        relative_residual(txt.flat(), t.flat()),
        relative_residual(xtx.flat(), x.flat()),
        relative_residual(tx.flat(), adjoint_op(&tx).flat()),
        relative_residual(xt.flat(), adjoint_op(&xt).flat()),
    ])
}

/// Which Penrose equations a candidate satisfies.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaClassReport {
    /// Equation indices in `1..=4`.
    pub satisfied: BTreeSet<u8>,
    pub residuals: [f64; 4],
}

impl ThetaClassReport {
    pub fn contains_all(&self, theta: &[u8]) -> bool {
        theta.iter().all(|i| self.satisfied.contains(i))
    }

    /// Largest residual among the equations in `theta`.
    pub fn max_residual(&self, theta: &[u8]) -> f64 {
        theta
            .iter()
            .map(|&i| self.residuals[usize::from(i) - 1])
            .fold(0.0, f64::max)
    }
}

pub fn theta_class(t: &AdjointableOp, x: &AdjointableOp, tol: f64) -> Result<ThetaClassReport> {
    let residuals = penrose_residuals(t, x)?;
    let satisfied = (1u8..=4).filter(|&i| residuals[usize::from(i) - 1] <= tol).collect();
    Ok(ThetaClassReport { satisfied, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let t = AdjointableOp::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        assert_eq!(p.rank, 1);
        let expect = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.0]]);
        assert!((p.pseudoinverse.flat() - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn invertible_case() {
        let t = AdjointableOp::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        let inv = t.flat().inverse().unwrap();
        assert!(relative_residual(&inv, p.pseudoinverse.flat()) < 1e-12);
    }

    #[test]
    fn rank_one_case_substitution() {
        // X = [[0.5,0],[0.5,0]]: TX = [[1,0],[0,0]], XT = [[.5,.5],[.5,.5]],
        // both Hermitian; TXT = T and XTX = X hold exactly.
        let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let x = AdjointableOp::from_real_rows(&[&[0.5, 0.0], &[0.5, 0.0]]);
        assert_eq!(penrose_residuals(&t, &x).unwrap(), [0.0; 4]);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        assert!(relative_residual(x.flat(), p.pseudoinverse.flat()) < 1e-15);
        assert!(!p.boundary_flag);
    }

    #[test]
    fn theta_class_examples() {
        let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        let full = theta_class(&t, &p.pseudoinverse, 1e-10).unwrap();
        assert_eq!(full.satisfied, BTreeSet::from([1, 2, 3, 4]));
        let zero = AdjointableOp::zero(t.signature(), 2, 2);
        let z = theta_class(&t, &zero, 1e-10).unwrap();
        assert_eq!(z.satisfied, BTreeSet::from([2, 3, 4]));
        let bad = AdjointableOp::zero(t.signature(), 3, 2);
        assert!(theta_class(&t, &bad, 1e-10).is_err());
    }

    #[test]
    fn zero_operator() {
        let t = AdjointableOp::zero(&crate::AlgebraSignature::new(&[1, 2]).unwrap(), 2, 3);
        let p = moore_penrose(&t, RankTol::Auto).unwrap();
        assert_eq!(p.rank, 0);
        assert!(p.pseudoinverse.is_zero());
        assert!(!p.boundary_flag);
        assert_eq!((p.pseudoinverse.rows(), p.pseudoinverse.cols()), (3, 2));
    }

    #[test]
    fn absolute_tolerance_truncates() {
        let t = AdjointableOp::from_real_rows(&[&[1.0, 0.0], &[0.0, 1e-3]]);
        let p = moore_penrose(&t, RankTol::Absolute(1e-2)).unwrap();
        assert_eq!(p.rank, 1);
        let p = moore_penrose(&t, RankTol::Absolute(1e-5)).unwrap();
        assert_eq!(p.rank, 2);
        assert!(!p.boundary_flag);
        let p = moore_penrose(&t, RankTol::Absolute(2e-3)).unwrap();
        assert!(p.boundary_flag);
    }
}
