//! One-sided (Hestenes) Jacobi SVD for complex matrices.
//!
//! Columns are orthogonalized pairwise in cyclic order until every pair is
//! orthogonal to working precision. The sweep order is fixed, and each right
//! singular vector is rotated so that its first nonzero component is real and
//! nonnegative, so the factorization is a deterministic function of the input.

use crate::matrix::{dot_conj, CMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 80;

/// Entries of a unit vector below this magnitude are skipped when picking
/// the phase reference component.
const PHASE_FLOOR: f64 = 1e-12;

/// Full singular value decomposition `M = U diag(sigma) V^H`.
///
/// `u` is `m x m` and `v` is `n x n`, both unitary; `singular_values` holds
/// `min(m, n)` values in nonincreasing order. Columns of `u` (resp. `v`)
/// beyond the paired ones span the orthogonal complement of the range of
/// `M` (resp. `M^H`) only together with the zero singular values.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl SvdFactors {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `U_{:, :r} diag(sigma_{:r}) V_{:, :r}^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = CMatrix::zeros(m, n);
        for (j, &s) in self.singular_values.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let uj = self.u.column(j);
            let vj = self.v.column(j);
            for c in 0..n {
                let w = vj[c].conj() * s;
                for r in 0..m {
                    out[(r, c)] += uj[r] * w;
                }
            }
        }
        out
    }
}

/// Computes the SVD of `m`. Empty inputs give identity factors and no
/// singular values.
pub fn svd_factor(m: &CMatrix) -> SvdFactors {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return SvdFactors {
            u: CMatrix::identity(rows),
            singular_values: Vec::new(),
            v: CMatrix::identity(cols),
        };
    }
    let mut f = if rows >= cols {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.adjoint());
        SvdFactors {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        }
    };
    fix_phases(&mut f);
    f
}

/// Jacobi on a matrix with at least as many rows as columns.
fn jacobi_tall(m: &CMatrix) -> SvdFactors {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let eps = f64::EPSILON;

    let mut norms: Vec<f64> = (0..n).map(|j| sq_norm(a.column(j))).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot_conj(a.column(p), a.column(q));
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
                norms[p] = sq_norm(a.column(p));
                norms[q] = sq_norm(a.column(q));
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sigma: Vec<f64> = (0..n).map(|j| sq_norm(a.column(j)).sqrt()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let singular_values: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    let mut v_sorted = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        v_sorted.column_mut(dst).copy_from_slice(v.column(src));
    }

    // Columns whose norm is at roundoff level carry no direction; they are
    // replaced by a deterministic completion below.
    let smax = singular_values[0];
    let floor = smax * (rows as f64) * eps;
    let mut u = CMatrix::zeros(rows, rows);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(rows);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma[src];
        if s <= floor || s == 0.0 {
            continue;
        }
        let mut col: Vec<C64> = a.column(src).iter().map(|z| z / s).collect();
        if orthonormalize_against(&mut col, &basis) > 0.5 {
            u.column_mut(dst).copy_from_slice(&col);
            basis.push(col);
        }
    }
    complete_basis(&mut u, &mut basis);
    SvdFactors {
        u,
        singular_values,
        v: v_sorted,
    }
}

#[inline]
fn sq_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Replaces columns `p, q` by `c x_p - s conj(phase) x_q` and
/// `s x_p + c conj(phase) x_q`.
fn rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let rows = m.rows();
    let ph = phase.conj();
    for i in 0..rows {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * ph;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Two passes of modified Gram-Schmidt against `basis`, then normalization.
/// Returns the norm remaining after projection (before normalizing).
fn orthonormalize_against(col: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    let before = sq_norm(col).sqrt();
    if before == 0.0 {
        return 0.0;
    }
    for _ in 0..2 {
        for b in basis {
            let h = dot_conj(b, col);
            for (x, y) in col.iter_mut().zip(b) {
                *x -= h * y;
            }
        }
    }
    let after = sq_norm(col).sqrt();
    if after > 0.0 {
        for x in col.iter_mut() {
            *x /= after;
        }
    }
    after / before
}

/// Fills every zero column of `u` with a unit vector orthogonal to the rest.
/// The standard basis vector with the largest component outside the current
/// span is used, lowest index on ties.
fn complete_basis(u: &mut CMatrix, basis: &mut Vec<Vec<C64>>) {
    let n = u.rows();
    for j in 0..u.cols() {
        if u.column(j).iter().any(|z| *z != ZERO) {
            continue;
        }
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..n {
            let mut e = vec![ZERO; n];
            e[i] = C64::new(1.0, 0.0);
            let r = orthonormalize_against(&mut e, basis);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, e));
            }
        }
        if let Some((r, e)) = best {
            if r > 0.0 {
                u.column_mut(j).copy_from_slice(&e);
                basis.push(e);
            }
        }
    }
}

fn fix_phases(f: &mut SvdFactors) {
    let paired = f.singular_values.len();
    for j in 0..f.v.cols() {
        let Some(k) = f.v.column(j).iter().position(|z| z.norm() > PHASE_FLOOR) else {
            continue;
        };
        let z = f.v.column(j)[k];
        let rot = z.conj() / z.norm();
        for x in f.v.column_mut(j) {
            *x *= rot;
        }
        f.v.column_mut(j)[k] = C64::new(z.norm(), 0.0);
        if j < paired {
            for x in f.u.column_mut(j) {
                *x *= rot;
            }
        }
    }
}
