//! Block decompositions of an operator against orthogonal splittings of its
//! domain and codomain, and the closed-form pseudoinverses they yield.
//!
//! All blocks are coordinates in orthonormal bases of the flattened spaces.
//! Bases of `Ran(T^*)`, `Ker(T)`, `Ran(T)` and `Ker(T^*)` come from the
//! deterministic factorization in [`crate::pinv::svd`]; bases of the
//! summands of a user-supplied projection come from factoring the
//! projection itself.

use crate::algebra::min_eigenvalue_hermitian;
use crate::error::{Error, Result};
use crate::matrix::{relative_residual, CMatrix};
use crate::operators::{adjoint_op, compose, unflatten, AdjointableOp, Projection};
use crate::pinv::{moore_penrose, pinv_from_factors, svd_factor, RankTol, UNFLATTEN_TOL};

/// `T = [[T1, 0], [0, 0]] : Ran(T^*) (+) Ker(T) -> Ran(T) (+) Ker(T^*)`.
#[derive(Clone, Debug)]
pub struct Lemma1Form {
    pub rank: usize,
    pub basis_ran_tstar: CMatrix,
    pub basis_ker_t: CMatrix,
    pub basis_ran_t: CMatrix,
    pub basis_ker_tstar: CMatrix,
    /// The invertible `rank x rank` block.
    pub t1: CMatrix,
    pub t1_inverse: CMatrix,
    pub t1_min_singular_value: f64,
    /// Mass of the transformed operator outside the `(1,1)` block.
    pub off_block_mass: f64,
    /// `||T - B_ran [[T1,0],[0,0]] B_dom^H|| / (1 + ||T||)` on flattenings.
    pub reconstruction_residual: f64,
    /// Flattening of `[[T1^{-1}, 0], [0, 0]]` mapped back to standard coordinates.
    pub pseudoinverse_flat: CMatrix,
    /// Relative distance between `pseudoinverse_flat` and [`moore_penrose`].
    pub residual_vs_pinv: f64,
}

impl Lemma1Form {
    /// Concatenated domain basis `[Ran(T^*) | Ker(T)]`.
    pub fn domain_basis(&self) -> CMatrix {
        CMatrix::hstack(&[&self.basis_ran_tstar, &self.basis_ker_t])
    }

    /// Concatenated codomain basis `[Ran(T) | Ker(T^*)]`.
    pub fn codomain_basis(&self) -> CMatrix {
        CMatrix::hstack(&[&self.basis_ran_t, &self.basis_ker_tstar])
    }
}

pub fn lemma1_form(t: &AdjointableOp, rank_tol: RankTol) -> Result<Lemma1Form> {
    let flat = t.flat();
    let (m, n) = flat.shape();
    let f = svd_factor(flat);
    let mp = pinv_from_factors((m, n), &f, rank_tol);
    let r = mp.rank;

    let basis_ran_t = f.u.columns(0, r);
    let basis_ker_tstar = f.u.columns(r, m - r);
    let basis_ran_tstar = f.v.columns(0, r);
    let basis_ker_t = f.v.columns(r, n - r);

    let transformed = f.u.adjoint_mul(&flat.matmul(&f.v));
    let t1 = transformed.submatrix(0, 0, r, r);
    let mut kept = CMatrix::zeros(m, n);
    kept.set_block(0, 0, &t1);
    let off_block_mass = (&transformed - &kept).frobenius_norm();
    let rebuilt = f.u.matmul(&kept).matmul(&f.v.adjoint());
    let reconstruction_residual = relative_residual(flat, &rebuilt);

    let t1_inverse = t1
        .inverse()
        .ok_or_else(|| Error::Singular("T1 block of the range/kernel decomposition".into()))?;
    let t1_min_singular_value = svd_factor(&t1).singular_values.last().copied().unwrap_or(f64::INFINITY);
    let pseudoinverse_flat = basis_ran_tstar.matmul(&t1_inverse).matmul(&basis_ran_t.adjoint());
    let reference = moore_penrose(t, rank_tol)?;
    let residual_vs_pinv = relative_residual(&pseudoinverse_flat, reference.pseudoinverse.flat());

    Ok(Lemma1Form {
        rank: r,
        basis_ran_tstar,
        basis_ker_t,
        basis_ran_t,
        basis_ker_tstar,
        t1,
        t1_inverse,
        t1_min_singular_value,
        off_block_mass,
        reconstruction_residual,
        pseudoinverse_flat,
        residual_vs_pinv,
    })
}

/// Summary of an invertibility check on a Gram-type block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramCheck {
    /// Smallest eigenvalue of the Hermitian part; `+inf` for an empty block.
    pub min_eigenvalue: f64,
    /// `||D D^{-1} - I||_F`.
    pub inverse_residual: f64,
    /// `||D - D^*||_F / (1 + ||D||_F)`.
    pub hermitian_residual: f64,
}

impl GramCheck {
    fn of(d: &CMatrix, d_inv: &CMatrix) -> Self {
        Self {
            min_eigenvalue: min_eigenvalue_hermitian(&d.hermitian_part()),
            inverse_residual: (&d.matmul(d_inv) - &CMatrix::identity(d.rows())).frobenius_norm(),
            hermitian_residual: relative_residual(d, &d.adjoint()),
        }
    }

    /// Positive, invertible and self-adjoint to the given accuracy.
    pub fn passes(&self, tol: f64) -> bool {
        self.min_eigenvalue > 0.0 && self.inverse_residual <= tol && self.hermitian_residual <= tol
    }
}

/// `T = [[T1, T2], [0, 0]] : E1 (+) E2 -> Ran(T) (+) Ker(T^*)` with
/// `D = T1 T1^* + T2 T2^*` and `T^+ = [[T1^* D^{-1}, 0], [T2^* D^{-1}, 0]]`.
#[derive(Clone, Debug)]
pub struct RowBlockForm {
    pub rank: usize,
    pub t1: CMatrix,
    pub t2: CMatrix,
    pub d: CMatrix,
    pub d_inverse: CMatrix,
    pub d_check: GramCheck,
    /// Mass of `T T^*` outside its `(1,1)` block in the `Ran(T) (+) Ker(T^*)` basis.
    pub gram_off_block_mass: f64,
    pub pinv_formula: AdjointableOp,
    pub residual_vs_pinv: f64,
}

/// `T = [[T1, 0], [T2, 0]] : Ran(T^*) (+) Ker(T) -> F1 (+) F2` with
/// `Dfrak = T1^* T1 + T2^* T2` and `T^+ = [[Dfrak^{-1} T1^*, Dfrak^{-1} T2^*], [0, 0]]`.
#[derive(Clone, Debug)]
pub struct ColBlockForm {
    pub rank: usize,
    pub t1: CMatrix,
    pub t2: CMatrix,
    pub dfrak: CMatrix,
    pub dfrak_inverse: CMatrix,
    pub dfrak_check: GramCheck,
    pub pinv_formula: AdjointableOp,
    pub residual_vs_pinv: f64,
}

/// Orthonormal bases of `Ran(P)` and `Ker(P)` on the flattened space.
fn projection_bases(p: &AdjointableOp) -> Result<(CMatrix, CMatrix)> {
    let p = Projection::new(p.clone())?;
    let flat = p.op().flat();
    let f = svd_factor(flat);
    let k = f.singular_values.iter().filter(|&&s| s > 0.5).count();
    let n = flat.rows();
    Ok((f.u.columns(0, k), f.u.columns(k, n - k)))
}

fn invert_gram(d: &CMatrix, what: &str) -> Result<CMatrix> {
    d.inverse().ok_or_else(|| Error::Singular(what.to_string()))
}

pub fn row_block_form(t: &AdjointableOp, p: &AdjointableOp, rank_tol: RankTol) -> Result<RowBlockForm> {
    if p.signature() != t.signature() || p.rows() != t.cols() {
        return Err(Error::InvalidDecomposition(format!(
            "projection of size {} does not act on the {}-dimensional domain",
            p.rows(),
            t.cols()
        )));
    }
    let (w1, w2) = projection_bases(p)?;
    row_block_form_in_bases(t, &w1, &w2, rank_tol)
}

/// [`row_block_form`] against explicit orthonormal bases `w1`, `w2` of the
/// domain summands.
pub fn row_block_form_in_bases(
    t: &AdjointableOp,
    w1: &CMatrix,
    w2: &CMatrix,
    rank_tol: RankTol,
) -> Result<RowBlockForm> {
    let flat = t.flat();
    let (m, n) = flat.shape();
    if w1.rows() != n || w2.rows() != n || w1.cols() + w2.cols() != n {
        return Err(Error::InvalidDecomposition("domain bases do not split the domain".into()));
    }
    let f = svd_factor(flat);
    let r = pinv_from_factors((m, n), &f, rank_tol).rank;
    let ur = f.u.columns(0, r);

    let t1 = ur.adjoint_mul(&flat.matmul(w1));
    let t2 = ur.adjoint_mul(&flat.matmul(w2));
    let d = &t1.matmul(&t1.adjoint()) + &t2.matmul(&t2.adjoint());
    let d_inverse = invert_gram(&d, "D = T1 T1* + T2 T2*")?;
    let d_check = GramCheck::of(&d, &d_inverse);

    let gram = f.u.adjoint_mul(&flat.matmul(&flat.adjoint()).matmul(&f.u));
    let mut gram_kept = CMatrix::zeros(m, m);
    gram_kept.set_block(0, 0, &gram.submatrix(0, 0, r, r));
    let gram_off_block_mass = (&gram - &gram_kept).frobenius_norm();

    let left = &w1.matmul(&t1.adjoint()) + &w2.matmul(&t2.adjoint());
    let x = left.matmul(&d_inverse).matmul(&ur.adjoint());
    let pinv_formula = unflatten(&x, t.signature(), (t.cols(), t.rows()), UNFLATTEN_TOL)?;
    let reference = moore_penrose(t, rank_tol)?;
    let residual_vs_pinv = relative_residual(pinv_formula.flat(), reference.pseudoinverse.flat());

    Ok(RowBlockForm {
        rank: r,
        t1,
        t2,
        d,
        d_inverse,
        d_check,
        gram_off_block_mass,
        pinv_formula,
        residual_vs_pinv,
    })
}

pub fn col_block_form(t: &AdjointableOp, q: &AdjointableOp, rank_tol: RankTol) -> Result<ColBlockForm> {
    if q.signature() != t.signature() || q.rows() != t.rows() {
        return Err(Error::InvalidDecomposition(format!(
            "projection of size {} does not act on the {}-dimensional codomain",
            q.rows(),
            t.rows()
        )));
    }
    let (y1, y2) = projection_bases(q)?;
    let flat = t.flat();
    let (m, n) = flat.shape();
    let f = svd_factor(flat);
    let r = pinv_from_factors((m, n), &f, rank_tol).rank;
    let vr = f.v.columns(0, r);

    let tv = flat.matmul(&vr);
    let t1 = y1.adjoint_mul(&tv);
    let t2 = y2.adjoint_mul(&tv);
    let dfrak = &t1.adjoint_mul(&t1) + &t2.adjoint_mul(&t2);
    let dfrak_inverse = invert_gram(&dfrak, "Dfrak = T1* T1 + T2* T2")?;
    let dfrak_check = GramCheck::of(&dfrak, &dfrak_inverse);

    let right = &t1.adjoint().matmul(&y1.adjoint()) + &t2.adjoint().matmul(&y2.adjoint());
    let x = vr.matmul(&dfrak_inverse).matmul(&right);
    let pinv_formula = unflatten(&x, t.signature(), (t.cols(), t.rows()), UNFLATTEN_TOL)?;
    let reference = moore_penrose(t, rank_tol)?;
    let residual_vs_pinv = relative_residual(pinv_formula.flat(), reference.pseudoinverse.flat());

    Ok(ColBlockForm {
        rank: r,
        t1,
        t2,
        dfrak,
        dfrak_inverse,
        dfrak_check,
        pinv_formula,
        residual_vs_pinv,
    })
}

/// `T^+ = T^* (T T^*)^+`.
pub fn pinv_via_gram(t: &AdjointableOp) -> Result<AdjointableOp> {
    let ts = adjoint_op(t);
    let gram = compose(t, &ts)?;
    let gp = moore_penrose(&gram, RankTol::Auto)?;
    compose(&ts, &gp.pseudoinverse)
}
