//! Certified predicates for the reverse order law `(TS)^+ = S^+ T^+`.
//!
//! For `S : E -> F` and `T : F -> G` three families of conditions are
//! evaluated, each as a relative residual with a verdict:
//!
//! * the range-projection family: `TS(TS)^+ = TSS^+T^+`,
//!   `T^*TS = SS^+T^*TS`, and `S^+T^+ ∈ (TS){1,2,3}`, which are mutually
//!   equivalent;
//! * the domain-projection family: `(TS)^+TS = S^+T^+TS`,
//!   `TSS^* = TSS^*T^+T`, and `S^+T^+ ∈ (TS){1,2,4}`, also mutually
//!   equivalent;
//! * Greville's inclusions `Ran(T^*TS) ⊆ Ran(S)` and
//!   `Ran(SS^*T^*) ⊆ Ran(T^*)`.
//!
//! The law itself holds exactly when both families hold, and exactly when
//! both inclusions hold. A [`RolCertificate`] records all of it and whether
//! the verdicts are mutually consistent.
//!
//! Ranges are always closed in finite dimensions, so no closedness
//! hypothesis is checked.

pub mod generate;

use serde::{Deserialize, Serialize};

use crate::canonical_forms::{lemma1_form, row_block_form_in_bases};
use crate::error::{conform, Error, Result};
use crate::matrix::{relative_residual, CMatrix};
use crate::operators::{adjoint_op, compose, range_inclusion, AdjointableOp};
use crate::pinv::{moore_penrose, pinv_matrix, theta_class, PinvResult, RankTol};

pub use generate::{gen_instance, Dims, InstanceKind, Ranks};

/// Default verdict tolerance on relative residuals.
pub const DEFAULT_TOL: f64 = 1e-8;

/// A residual within this factor of the tolerance (either side) makes the
/// verdict indeterminate and sets the boundary flag.
pub const AMBIGUITY_BAND: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub residual: f64,
    pub holds: bool,
}

impl Condition {
    pub fn new(residual: f64, tol: f64) -> Self {
        Self {
            residual,
            holds: residual <= tol,
        }
    }

    fn from_identity(lhs: &CMatrix, rhs: &CMatrix, tol: f64) -> Self {
        Self::new(relative_residual(lhs, rhs), tol)
    }

    /// `lhs = 0`, normalized like any other identity.
    fn vanishes(lhs: &CMatrix, tol: f64) -> Self {
        let n = lhs.frobenius_norm();
        Self::new(n / (1.0 + n), tol)
    }

    pub fn is_ambiguous(&self, tol: f64) -> bool {
        !self.residual.is_finite()
            || (self.residual >= tol / AMBIGUITY_BAND && self.residual <= tol * AMBIGUITY_BAND)
    }
}

/// Three mutually equivalent conditions (i)-(iii) of one family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub i: Condition,
    pub ii: Condition,
    pub iii: Condition,
    pub boundary_flag: bool,
}

impl TheoremReport {
    pub fn conditions(&self) -> [Condition; 3] {
        [self.i, self.ii, self.iii]
    }

    pub fn verdicts(&self) -> [bool; 3] {
        [self.i.holds, self.ii.holds, self.iii.holds]
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts().iter().all(|&v| v)
    }

    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        v[0] == v[1] && v[1] == v[2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrevilleReport {
    /// `Ran(T^* T S) ⊆ Ran(S)`.
    pub tstar_t_s_in_ran_s: Condition,
    /// `Ran(S S^* T^*) ⊆ Ran(T^*)`.
    pub s_sstar_tstar_in_ran_tstar: Condition,
}

impl GrevilleReport {
    pub fn both_hold(&self) -> bool {
        self.tstar_t_s_in_ran_s.holds && self.s_sstar_tstar_in_ran_tstar.holds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolCertificate {
    pub tol: f64,
    /// `||(TS)^+ - S^+T^+|| / (1 + ||(TS)^+||)`.
    pub residual_rol: f64,
    pub rol_holds: bool,
    pub thm21: TheoremReport,
    pub thm22: TheoremReport,
    pub greville: GrevilleReport,
    pub consistent: bool,
    pub boundary_flag: bool,
}

impl RolCertificate {
    /// Every condition group (law, both families, both inclusions) holds.
    pub fn all_true(&self) -> bool {
        self.rol_holds && self.thm21.all_hold() && self.thm22.all_hold() && self.greville.both_hold()
    }

    /// Every condition group fails.
    pub fn all_false(&self) -> bool {
        !self.rol_holds
            && !self.thm21.all_hold()
            && !self.thm22.all_hold()
            && !self.greville.both_hold()
    }
}

/// Pseudoinverses shared by all checks of one pair.
struct PairData {
    ts: AdjointableOp,
    t_pinv: PinvResult,
    s_pinv: PinvResult,
    ts_pinv: PinvResult,
    /// `S^+ T^+`.
    candidate: AdjointableOp,
}

impl PairData {
    fn new(t: &AdjointableOp, s: &AdjointableOp) -> Result<Self> {
        if t.signature() != s.signature() || t.cols() != s.rows() {
            return Err(conform(format!(
                "T is {}x{} over {}, S is {}x{} over {}: TS is not defined",
                t.rows(),
                t.cols(),
                t.signature(),
                s.rows(),
                s.cols(),
                s.signature()
            )));
        }
        let ts = compose(t, s)?;
        let t_pinv = moore_penrose(t, RankTol::Auto)?;
        let s_pinv = moore_penrose(s, RankTol::Auto)?;
        let ts_pinv = moore_penrose(&ts, RankTol::Auto)?;
        let candidate = compose(&s_pinv.pseudoinverse, &t_pinv.pseudoinverse)?;
        Ok(Self {
            ts,
            t_pinv,
            s_pinv,
            ts_pinv,
            candidate,
        })
    }

    fn rank_flag(&self) -> bool {
        self.t_pinv.boundary_flag || self.s_pinv.boundary_flag || self.ts_pinv.boundary_flag
    }

    fn thm21(&self, t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<TheoremReport> {
        let ts = &self.ts;
        let tp = &self.t_pinv.pseudoinverse;
        let sp = &self.s_pinv.pseudoinverse;
        // (i) TS (TS)^+ = T S S^+ T^+
        let lhs = compose(ts, &self.ts_pinv.pseudoinverse)?;
        let rhs = compose(&compose(ts, sp)?, tp)?;
        let i = Condition::from_identity(lhs.flat(), rhs.flat(), tol);
        // (ii) T^* T S = S S^+ T^* T S
        let tsts = compose(&adjoint_op(t), ts)?;
        let rhs = compose(&compose(s, sp)?, &tsts)?;
        let ii = Condition::from_identity(tsts.flat(), rhs.flat(), tol);
        // (iii) S^+ T^+ in (TS){1,2,3}
        let theta = theta_class(ts, &self.candidate, tol)?;
        let iii = Condition {
            residual: theta.max_residual(&[1, 2, 3]),
            holds: theta.contains_all(&[1, 2, 3]),
        };
        Ok(report(i, ii, iii, self.rank_flag(), tol))
    }

    fn thm22(&self, t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<TheoremReport> {
        let ts = &self.ts;
        let tp = &self.t_pinv.pseudoinverse;
        // (i) (TS)^+ T S = S^+ T^+ T S
        let lhs = compose(&self.ts_pinv.pseudoinverse, ts)?;
        let rhs = compose(&self.candidate, ts)?;
        let i = Condition::from_identity(lhs.flat(), rhs.flat(), tol);
        // (ii) T S S^* = T S S^* T^+ T
        let tsss = compose(ts, &adjoint_op(s))?;
        let rhs = compose(&tsss, &compose(tp, t)?)?;
        let ii = Condition::from_identity(tsss.flat(), rhs.flat(), tol);
        // (iii) S^+ T^+ in (TS){1,2,4}
        let theta = theta_class(ts, &self.candidate, tol)?;
        let iii = Condition {
            residual: theta.max_residual(&[1, 2, 4]),
            holds: theta.contains_all(&[1, 2, 4]),
        };
        Ok(report(i, ii, iii, self.rank_flag(), tol))
    }
}

fn report(i: Condition, ii: Condition, iii: Condition, rank_flag: bool, tol: f64) -> TheoremReport {
    let ambiguous = [i, ii, iii].iter().any(|c| c.is_ambiguous(tol));
    TheoremReport {
        i,
        ii,
        iii,
        boundary_flag: rank_flag || ambiguous,
    }
}

/// Conditions (i)-(iii) of the range-projection family.
pub fn check_thm21(t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<TheoremReport> {
    PairData::new(t, s)?.thm21(t, s, tol)
}

/// Conditions (i)-(iii) of the domain-projection family.
pub fn check_thm22(t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<TheoremReport> {
    PairData::new(t, s)?.thm22(t, s, tol)
}

/// Full certificate: the law, both families and Greville's inclusions.
pub fn check_corollary(t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<RolCertificate> {
    let data = PairData::new(t, s)?;
    let residual_rol = relative_residual(data.ts_pinv.pseudoinverse.flat(), data.candidate.flat());
    let rol = Condition::new(residual_rol, tol);
    let thm21 = data.thm21(t, s, tol)?;
    let thm22 = data.thm22(t, s, tol)?;

    let tstar = adjoint_op(t);
    let g1 = range_inclusion(&compose(&tstar, &data.ts)?, s, tol)?;
    let g2 = range_inclusion(&compose(&compose(s, &adjoint_op(s))?, &tstar)?, &tstar, tol)?;
    let greville = GrevilleReport {
        tstar_t_s_in_ran_s: Condition::new(g1.residual, tol),
        s_sstar_tstar_in_ran_tstar: Condition::new(g2.residual, tol),
    };

    let consistent = thm21.agree()
        && thm22.agree()
        && rol.holds == (thm21.all_hold() && thm22.all_hold())
        && rol.holds == greville.both_hold();
    let boundary_flag = thm21.boundary_flag
        || thm22.boundary_flag
        || g1.boundary_flag
        || g2.boundary_flag
        || rol.is_ambiguous(tol)
        || greville.tstar_t_s_in_ran_s.is_ambiguous(tol)
        || greville.s_sstar_tstar_in_ran_tstar.is_ambiguous(tol);

    Ok(RolCertificate {
        tol,
        residual_rol,
        rol_holds: rol.holds,
        thm21,
        thm22,
        greville,
        consistent,
        boundary_flag,
    })
}

/// The conditions of both families rewritten in terms of the blocks
/// `S = [[S1, 0], [0, 0]] : Ran(S^*) (+) Ker(S) -> Ran(S) (+) Ker(S^*)` and
/// `T = [[T1, T2], [0, 0]] : Ran(S) (+) Ker(S^*) -> Ran(T) (+) Ker(T^*)`,
/// with `D = T1 T1^* + T2 T2^*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockConditionReport {
    /// `T1 S1 (T1 S1)^+ = T1 T1^* D^{-1}`.
    pub c1: Condition,
    /// `T2^* T1 = 0`.
    pub c2: Condition,
    /// `T1 T1^* D^{-1} T1 = T1`.
    pub c3a: Condition,
    /// `[T1 T1^*, D^{-1}] = 0`.
    pub c3b: Condition,
    /// `(T1 S1)^+ T1 S1 = S1^{-1} T1^* D^{-1} T1 S1`.
    pub d1: Condition,
    /// `T1 S1 S1^* T1^* D^{-1} T1 = T1 S1 S1^*`.
    pub d2a: Condition,
    /// `T1 S1 S1^* T1^* D^{-1} T2 = 0`.
    pub d2b: Condition,
    /// `[S1 S1^*, T1^* D^{-1} T1] = 0`.
    pub d3: Condition,
    pub rank_t: usize,
    pub rank_s: usize,
    pub boundary_flag: bool,
}

impl BlockConditionReport {
    /// Block-level counterparts of conditions (i), (ii), (iii) of the
    /// range-projection family: `c1`, `c2`, and `c3a ∧ c3b`.
    pub fn thm21_verdicts(&self) -> [bool; 3] {
        [self.c1.holds, self.c2.holds, self.c3a.holds && self.c3b.holds]
    }

    /// Block-level counterparts of the domain-projection family: `d1`,
    /// `d2a ∧ d2b`, and `c3a ∧ d3` (membership in the {1,2,4} class needs
    /// the first Penrose equation, which is `c3a` at block level).
    pub fn thm22_verdicts(&self) -> [bool; 3] {
        [
            self.d1.holds,
            self.d2a.holds && self.d2b.holds,
            self.c3a.holds && self.d3.holds,
        ]
    }

    pub fn all(&self) -> [(&'static str, Condition); 8] {
        [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3a", self.c3a),
            ("c3b", self.c3b),
            ("d1", self.d1),
            ("d2a", self.d2a),
            ("d2b", self.d2b),
            ("d3", self.d3),
        ]
    }
}

pub fn block_conditions(t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<BlockConditionReport> {
    if t.signature() != s.signature() || t.cols() != s.rows() {
        return Err(conform("block conditions need a composable pair"));
    }
    let ls = lemma1_form(s, RankTol::Auto)?;
    if ls.rank == 0 {
        return Err(Error::DegenerateDecomposition(
            "S = 0 has no invertible block S1".into(),
        ));
    }
    let s_flag = moore_penrose(s, RankTol::Auto)?.boundary_flag;
    let t_flag = moore_penrose(t, RankTol::Auto)?.boundary_flag;
    let rf = row_block_form_in_bases(t, &ls.basis_ran_t, &ls.basis_ker_tstar, RankTol::Auto)?;

    let s1 = &ls.t1;
    let s1_inv = &ls.t1_inverse;
    let t1 = &rf.t1;
    let t2 = &rf.t2;
    let d_inv = &rf.d_inverse;

    let t1s1 = t1.matmul(s1);
    let t1s1_p = pinv_matrix(&t1s1, RankTol::Auto);
    let t1s1_pinv = &t1s1_p.pseudoinverse;
    let t1t1s = t1.matmul(&t1.adjoint());
    let s1s1s = s1.matmul(&s1.adjoint());
    let t1s_dinv = t1.adjoint().matmul(d_inv);
    let k = t1s_dinv.matmul(t1); // T1^* D^{-1} T1
    let t1s1s1s = t1.matmul(&s1s1s);

    let c1 = Condition::from_identity(&t1s1.matmul(t1s1_pinv), &t1t1s.matmul(d_inv), tol);
    let c2 = Condition::vanishes(&t2.adjoint().matmul(t1), tol);
    let c3a = Condition::from_identity(&t1t1s.matmul(d_inv).matmul(t1), t1, tol);
    let c3b = Condition::from_identity(&t1t1s.matmul(d_inv), &d_inv.matmul(&t1t1s), tol);
    let d1 = Condition::from_identity(
        &t1s1_pinv.matmul(&t1s1),
        &s1_inv.matmul(&k).matmul(s1),
        tol,
    );
    let d2a = Condition::from_identity(&t1s1s1s.matmul(&k), &t1s1s1s, tol);
    let d2b = Condition::vanishes(&t1s1s1s.matmul(&t1s_dinv).matmul(t2), tol);
    let d3 = Condition::from_identity(&s1s1s.matmul(&k), &k.matmul(&s1s1s), tol);

    let conds = [c1, c2, c3a, c3b, d1, d2a, d2b, d3];
    let boundary_flag =
        s_flag || t_flag || t1s1_p.boundary_flag || conds.iter().any(|c| c.is_ambiguous(tol));
    Ok(BlockConditionReport {
        c1,
        c2,
        c3a,
        c3b,
        d1,
        d2a,
        d2b,
        d3,
        rank_t: rf.rank,
        rank_s: ls.rank,
        boundary_flag,
    })
}
