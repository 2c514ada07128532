#![allow(dead_code)]

use nalgebra::DMatrix;
use penrose::reverse_order::generate::Sampler;
use penrose::{AdjointableOp, AlgebraSignature, CMatrix, C64};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sig(blocks: &[usize]) -> AlgebraSignature {
    AlgebraSignature::new(blocks).unwrap()
}

pub fn signatures() -> [AlgebraSignature; 3] {
    [sig(&[1]), sig(&[2]), sig(&[1, 2])]
}

pub fn gaussian(rng: &mut ChaCha8Rng, s: &AlgebraSignature, rows: usize, cols: usize) -> AdjointableOp {
    Sampler { rng, sig: s }.gaussian(rows, cols)
}

/// Random operator whose rank is full or deficient with equal odds.
pub fn random_op(rng: &mut ChaCha8Rng, s: &AlgebraSignature, rows: usize, cols: usize) -> AdjointableOp {
    if rng.random_bool(0.5) {
        gaussian(rng, s, rows, cols)
    } else {
        let r = rng.random_range(0..=rows.min(cols));
        Sampler { rng, sig: s }.with_rank(rows, cols, r).unwrap()
    }
}

/// Orthogonal projection of module rank `r` on `A^n`.
pub fn random_projection(rng: &mut ChaCha8Rng, s: &AlgebraSignature, n: usize, r: usize) -> AdjointableOp {
    let w = Sampler { rng, sig: s }.isometry(n, r).unwrap();
    penrose::compose(&w, &penrose::adjoint_op(&w)).unwrap()
}

pub fn to_na(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Real embedding `[[Re, -Im], [Im, Re]]`. Its singular values are those of
/// `m`, each twice, and its pseudoinverse embeds the pseudoinverse of `m`.
pub fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Singular values through nalgebra's real SVD of the embedding, descending.
pub fn oracle_singular_values(m: &CMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return vec![];
    }
    let mut v: Vec<f64> = real_embedding(m).singular_values().iter().copied().collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    v.into_iter().step_by(2).collect()
}

/// Pseudoinverse from a full-rank factorization `A = F G` built with
/// column-pivoted QR: `F` spans the range, `G = F^* A`, and
/// `A^+ = G^+ F^*` with `G^+` from a second QR of `G^*`. Uses no SVD, so it is
/// independent of ours and of nalgebra's, whose singular vectors are
/// inaccurate on some block-structured flattenings. The numerical rank is the
/// number of pivots above `gap` times the largest; callers pass a gap that
/// sits inside the spectral gap of their input.
pub fn oracle_pinv_with_rank(m: &CMatrix, gap: f64) -> (CMatrix, usize) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (CMatrix::zeros(c, r), 0);
    }
    let a = to_na(m);
    let qr = a.clone().col_piv_qr();
    let rr = qr.r();
    let d = r.min(c);
    let top = rr[(0, 0)].norm();
    let rank = (0..d).filter(|&i| rr[(i, i)].norm() > gap * top).count();
    if rank == 0 || top == 0.0 {
        return (CMatrix::zeros(c, r), 0);
    }
    let q = qr.q();
    let f = q.columns(0, rank).into_owned();
    let g = f.adjoint() * &a;
    let qr2 = g.adjoint().qr();
    let (q2, r2) = (qr2.q(), qr2.r());
    let z = r2.adjoint().solve_lower_triangular(&f.adjoint()).expect("nonsingular triangular factor");
    (from_na(&(q2 * z)), rank)
}

/// [`oracle_pinv_with_rank`] with a gap suited to inputs whose discarded
/// singular values are roundoff.
pub fn oracle_pinv(m: &CMatrix) -> CMatrix {
    oracle_pinv_with_rank(m, 1e-10).0
}

pub fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    penrose::matrix::relative_residual(a, b)
}
