//! Seeded construction of operator pairs `T : A^m -> A^p`, `S : A^k -> A^m`
//! with prescribed reverse-order-law behaviour.
//!
//! Every constructed pair is checked after the fact; a pair that misses its
//! contract (or lands on a boundary-flagged rank decision) is discarded and
//! redrawn from the same random stream, up to [`MAX_ATTEMPTS`] times.
//!
//! Ranks are module ranks: an operator of rank `r` over an algebra of
//! dimension `d` has a flattening of rank `r d`.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSignature};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::operators::{adjoint_op, compose, unflatten, AdjointableOp};
use crate::pinv::{svd_factor, UNFLATTEN_TOL};

use super::{check_corollary, check_thm21, check_thm22, DEFAULT_TOL};

pub const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// No constraint.
    Generic,
    /// `Ran(S) = Ran(T^*)`, so both Greville inclusions hold.
    RolHolds,
    /// The range-projection family holds, the domain-projection family does not.
    Thm21Only,
    /// The domain-projection family holds, the range-projection family does not.
    Thm22Only,
    /// `S = T^*`.
    SAdjoint,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Generic,
        InstanceKind::RolHolds,
        InstanceKind::Thm21Only,
        InstanceKind::Thm22Only,
        InstanceKind::SAdjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Generic => "generic",
            InstanceKind::RolHolds => "rol_holds",
            InstanceKind::Thm21Only => "thm21_only",
            InstanceKind::Thm22Only => "thm22_only",
            InstanceKind::SAdjoint => "s_adjoint",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown instance kind `{s}`")))
    }
}

/// Module dimensions: `T` is `p x m`, `S` is `m x k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub p: usize,
    pub m: usize,
    pub k: usize,
}

impl Dims {
    pub fn new(p: usize, m: usize, k: usize) -> Self {
        Self { p, m, k }
    }
}

/// Module ranks of `T` and `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub t: usize,
    pub s: usize,
}

/// Checks that `kind` admits some instance at `dims` (and at `ranks`, when given).
pub fn check_feasible(kind: InstanceKind, dims: Dims, ranks: Option<Ranks>) -> Result<()> {
    let Dims { p, m, k } = dims;
    let infeasible = |why: String| Err(Error::Infeasible(format!("{kind} at dims ({p},{m},{k}): {why}")));
    if p == 0 || m == 0 || k == 0 {
        return infeasible("all dimensions must be positive".into());
    }
    if let Some(r) = ranks {
        if r.t > p.min(m) || r.s > m.min(k) {
            return infeasible(format!("ranks ({}, {}) exceed the dimensions", r.t, r.s));
        }
    }
    match kind {
        InstanceKind::Generic => Ok(()),
        InstanceKind::SAdjoint => {
            if p != k {
                return infeasible("S = T* needs p = k".into());
            }
            Ok(())
        }
        InstanceKind::RolHolds => match ranks {
            Some(r) if r.t != r.s => infeasible("needs equal ranks".into()),
            Some(r) if r.t == 0 => infeasible("needs a positive rank".into()),
            _ => Ok(()),
        },
        InstanceKind::Thm21Only => {
            if m.min(k) < 2 {
                return infeasible("needs rank(S) >= 2".into());
            }
            if let Some(r) = ranks {
                if thm21_split(dims, r).is_none() {
                    return infeasible(format!("ranks ({}, {}) do not admit the block split", r.t, r.s));
                }
            }
            Ok(())
        }
        InstanceKind::Thm22Only => {
            if m < 2 || p < 2 {
                return infeasible("needs m >= 2 and p >= 2".into());
            }
            if let Some(r) = ranks {
                if thm22_split(dims, r).is_none() {
                    return infeasible(format!("ranks ({}, {}) do not admit the block split", r.t, r.s));
                }
            }
            Ok(())
        }
    }
}

/// `(r1, r2)` with `T1` of rank `r1 < rank(S)` on `Ran(S)` and `T2` of rank
/// `r2 <= m - rank(S)` on `Ker(S^*)`.
fn thm21_split(dims: Dims, r: Ranks) -> Option<(usize, usize)> {
    if r.s < 2 || r.t == 0 {
        return None;
    }
    let r1 = r.t.min(r.s - 1);
    let r2 = r.t - r1;
    (r2 <= dims.m - r.s).then_some((r1, r2))
}

/// `(r1, r2)` with `1 <= r1 <= rank(S)` and `1 <= r2 <= m - rank(S)`.
fn thm22_split(dims: Dims, r: Ranks) -> Option<(usize, usize)> {
    if r.s == 0 || r.t < 2 || r.s >= dims.m {
        return None;
    }
    let r1 = r.s.min(r.t - 1);
    let r2 = r.t - r1;
    (r2 >= 1 && r2 <= dims.m - r.s).then_some((r1, r2))
}

/// Draws an operator pair of the given kind. Deterministic in all arguments.
pub fn gen_instance(
    kind: InstanceKind,
    dims: Dims,
    ranks: Option<Ranks>,
    signature: &AlgebraSignature,
    seed: u64,
) -> Result<(AdjointableOp, AdjointableOp)> {
    check_feasible(kind, dims, ranks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Sampler { rng: &mut rng, sig: signature };
    for _ in 0..MAX_ATTEMPTS {
        let r = ranks.unwrap_or_else(|| g.ranks(kind, dims));
        let pair = match kind {
            InstanceKind::Generic => g.generic(dims, r)?,
            InstanceKind::SAdjoint => {
                let t = g.with_rank(dims.p, dims.m, r.t)?;
                let s = adjoint_op(&t);
                (t, s)
            }
            InstanceKind::RolHolds => g.rol_holds(dims, r.t)?,
            InstanceKind::Thm21Only => g.thm21_only(dims, r)?,
            InstanceKind::Thm22Only => g.thm22_only(dims, r)?,
        };
        if meets_contract(kind, &pair.0, &pair.1)? {
            return Ok(pair);
        }
    }
    Err(Error::GenerationFailure {
        kind: kind.to_string(),
        attempts: MAX_ATTEMPTS,
    })
}

fn meets_contract(kind: InstanceKind, t: &AdjointableOp, s: &AdjointableOp) -> Result<bool> {
    Ok(match kind {
        InstanceKind::Generic | InstanceKind::SAdjoint => true,
        InstanceKind::RolHolds => {
            let c = check_corollary(t, s, DEFAULT_TOL)?;
            !c.boundary_flag && c.all_true()
        }
        InstanceKind::Thm21Only => {
            let a = check_thm21(t, s, DEFAULT_TOL)?;
            let b = check_thm22(t, s, DEFAULT_TOL)?;
            !a.boundary_flag && !b.boundary_flag && a.all_hold() && !b.all_hold()
        }
        InstanceKind::Thm22Only => {
            let a = check_thm21(t, s, DEFAULT_TOL)?;
            let b = check_thm22(t, s, DEFAULT_TOL)?;
            !a.boundary_flag && !b.boundary_flag && b.all_hold() && !a.all_hold()
        }
    })
}

/// Random building blocks over a fixed signature.
pub struct Sampler<'a, R> {
    pub rng: &'a mut R,
    pub sig: &'a AlgebraSignature,
}

impl<R: rand::Rng> Sampler<'_, R> {
    fn normal(&mut self) -> f64 {
        StandardNormal.sample(self.rng)
    }

    /// Entries with independent standard complex Gaussian coordinates.
    pub fn gaussian(&mut self, rows: usize, cols: usize) -> AdjointableOp {
        let d = self.sig.dim();
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let entries: Vec<AlgebraElement> = (0..rows * cols)
            .map(|_| {
                let coords: Vec<C64> = (0..d)
                    .map(|_| C64::new(self.normal() * scale, self.normal() * scale))
                    .collect();
                AlgebraElement::from_coords(self.sig, &coords).expect("coordinate count matches")
            })
            .collect();
        AdjointableOp::from_entries(self.sig, rows, cols, &entries).expect("entries conform")
    }

    /// Unitary polar factor of a Gaussian operator.
    pub fn unitary(&mut self, n: usize) -> Result<AdjointableOp> {
        let g = self.gaussian(n, n);
        let f = svd_factor(g.flat());
        let w = f.u.matmul(&f.v.adjoint());
        unflatten(&w, self.sig, (n, n), UNFLATTEN_TOL)
    }

    /// `Q (I + B)` with `Q` unitary and `||B|| <= 1/2`: singular values of
    /// the flattening lie in `[1/2, 3/2]`.
    pub fn invertible(&mut self, n: usize) -> Result<AdjointableOp> {
        let q = self.unitary(n)?;
        let b = self.gaussian(n, n);
        let nb = b.norm();
        let b = if nb > 0.0 { b.scale(C64::new(0.5 / nb, 0.0)) } else { b };
        let id = AdjointableOp::identity(self.sig, n);
        compose(&q, &id.add(&b)?)
    }

    /// `n x r` operator with orthonormal columns.
    pub fn isometry(&mut self, n: usize, r: usize) -> Result<AdjointableOp> {
        Ok(self.unitary(n)?.slice(0, 0, n, r))
    }

    /// `rows x cols` operator of module rank `r`, well conditioned on its range.
    pub fn with_rank(&mut self, rows: usize, cols: usize, r: usize) -> Result<AdjointableOp> {
        if r == 0 {
            return Ok(AdjointableOp::zero(self.sig, rows, cols));
        }
        let u = self.isometry(rows, r)?;
        let core = self.invertible(r)?;
        let v = self.isometry(cols, r)?;
        compose(&compose(&u, &core)?, &adjoint_op(&v))
    }

    fn ranks(&mut self, kind: InstanceKind, dims: Dims) -> Ranks {
        let Dims { p, m, k } = dims;
        match kind {
            InstanceKind::Generic | InstanceKind::SAdjoint => Ranks {
                t: self.rng.random_range(1..=p.min(m)),
                s: self.rng.random_range(1..=m.min(k)),
            },
            InstanceKind::RolHolds => {
                let r = self.rng.random_range(1..=p.min(m).min(k));
                Ranks { t: r, s: r }
            }
            InstanceKind::Thm21Only => {
                let s = self.rng.random_range(2..=m.min(k));
                let r1 = self.rng.random_range(1..=(s - 1).min(p));
                let r2 = self.rng.random_range(0..=(m - s).min(p - r1));
                Ranks { t: r1 + r2, s }
            }
            InstanceKind::Thm22Only => {
                let s = self.rng.random_range(1..=(m - 1).min(k));
                let r1 = self.rng.random_range(1..=s.min(p - 1));
                let r2 = self.rng.random_range(1..=(m - s).min(p - r1));
                Ranks { t: r1 + r2, s }
            }
        }
    }

    fn generic(&mut self, dims: Dims, r: Ranks) -> Result<(AdjointableOp, AdjointableOp)> {
        let t = self.with_rank(dims.p, dims.m, r.t)?;
        let s = self.with_rank(dims.m, dims.k, r.s)?;
        Ok((t, s))
    }

    fn rol_holds(&mut self, dims: Dims, r: usize) -> Result<(AdjointableOp, AdjointableOp)> {
        let w = self.isometry(dims.m, r)?;
        let s1 = self.invertible(r)?;
        let v = self.isometry(dims.k, r)?;
        let s = compose(&compose(&w, &s1)?, &adjoint_op(&v))?;
        let u = self.isometry(dims.p, r)?;
        let t1 = self.invertible(r)?;
        let t = compose(&compose(&u, &t1)?, &adjoint_op(&w))?;
        Ok((t, s))
    }

    /// Shared frame: `W = [W1 | W2]` unitary on `A^m` with `Ran(S) = Ran(W1)`,
    /// and `S = W1 S1 V^*`.
    fn frame(&mut self, dims: Dims, s_rank: usize, s1: &AdjointableOp) -> Result<(AdjointableOp, AdjointableOp, AdjointableOp)> {
        let w = self.unitary(dims.m)?;
        let w1 = w.slice(0, 0, dims.m, s_rank);
        let w2 = w.slice(0, s_rank, dims.m, dims.m - s_rank);
        let v = self.isometry(dims.k, s_rank)?;
        let s = compose(&compose(&w1, s1)?, &adjoint_op(&v))?;
        Ok((s, w1, w2))
    }

    /// `T = U [T1 | T2] [W1 | W2]^*` for blocks `T1 : Ran(S) -> A^r`, `T2 : Ker(S^*) -> A^r`.
    fn assemble_t(
        &mut self,
        dims: Dims,
        t1: &AdjointableOp,
        t2: &AdjointableOp,
        w1: &AdjointableOp,
        w2: &AdjointableOp,
    ) -> Result<AdjointableOp> {
        let u = self.isometry(dims.p, t1.rows())?;
        let inner = compose(t1, &adjoint_op(w1))?.add(&compose(t2, &adjoint_op(w2))?)?;
        compose(&u, &inner)
    }

    /// Stacks `[X1; 0]` and `[0; X2]` under a common unitary `Z`, giving
    /// blocks with orthogonal ranges.
    fn orthogonal_pair(
        &mut self,
        x1: &AdjointableOp,
        x2: &AdjointableOp,
    ) -> Result<(AdjointableOp, AdjointableOp)> {
        let (r1, c1) = (x1.rows(), x1.cols());
        let (r2, c2) = (x2.rows(), x2.cols());
        let z = self.unitary(r1 + r2)?;
        let top = AdjointableOp::assemble(&[vec![x1], vec![&AdjointableOp::zero(self.sig, r2, c1)]])?;
        let bottom = AdjointableOp::assemble(&[vec![&AdjointableOp::zero(self.sig, r1, c2)], vec![x2]])?;
        Ok((compose(&z, &top)?, compose(&z, &bottom)?))
    }

    /// `T2^* T1 = 0` with `T1` not injective on `Ran(S)` and a generic `S1`.
    fn thm21_only(&mut self, dims: Dims, r: Ranks) -> Result<(AdjointableOp, AdjointableOp)> {
        let (r1, r2) = thm21_split(dims, r).ok_or_else(|| Error::Infeasible("thm21_only split".into()))?;
        let s_rank = r.s;
        let s1 = self.invertible(s_rank)?;
        let (s, w1, w2) = self.frame(dims, s_rank, &s1)?;
        let x1 = self.invertible(s_rank)?.slice(0, 0, r1, s_rank);
        let x2 = self.invertible(dims.m - s_rank)?.slice(0, 0, r2, dims.m - s_rank);
        let (t1, t2) = self.orthogonal_pair(&x1, &x2)?;
        let t = self.assemble_t(dims, &t1, &t2, &w1, &w2)?;
        Ok((t, s))
    }

    /// `S1` unitary and `T_i = H Y_i` with `[Y1 | Y2]` a co-isometry whose
    /// blocks have orthogonal ranges. Then `D = H H^*` and
    /// `T2^* D^{-1} T1 = Y2^* Y1 = 0`, while `T2^* T1 = Y2^* H^* H Y1` is
    /// nonzero for a generic invertible `H`.
    fn thm22_only(&mut self, dims: Dims, r: Ranks) -> Result<(AdjointableOp, AdjointableOp)> {
        let (r1, r2) = thm22_split(dims, r).ok_or_else(|| Error::Infeasible("thm22_only split".into()))?;
        let s_rank = r.s;
        let s1 = self.unitary(s_rank)?;
        let (s, w1, w2) = self.frame(dims, s_rank, &s1)?;
        let x1 = self.unitary(s_rank)?.slice(0, 0, r1, s_rank);
        let x2 = self.unitary(dims.m - s_rank)?.slice(0, 0, r2, dims.m - s_rank);
        let (y1, y2) = self.orthogonal_pair(&x1, &x2)?;
        let h = self.invertible(r1 + r2)?;
        let t = self.assemble_t(dims, &compose(&h, &y1)?, &compose(&h, &y2)?, &w1, &w2)?;
        Ok((t, s))
    }
}

/// Gaussian complex matrix; handy for callers building their own inputs.
pub fn gaussian_matrix<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    })
}
