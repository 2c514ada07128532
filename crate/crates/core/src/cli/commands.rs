use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraSignature;
use crate::error::{Error, Result};
use crate::operators::AdjointableOp;
use crate::pinv::{moore_penrose, RankTol};
use crate::reverse_order::generate::check_feasible;
use crate::reverse_order::{
    block_conditions, check_corollary, gen_instance, BlockConditionReport, Dims, InstanceKind, RolCertificate,
};

use super::format::{
    read_operator, sha256_hex, write_operator, CertificateOutput, InputDigests, OperatorFile, TOOL_NAME, TOOL_VERSION,
};
use super::{EXIT_FAILS, EXIT_HOLDS, EXIT_INDETERMINATE, EXIT_INVALID};

fn fail(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "penrose: {e}");
    EXIT_INVALID
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn cmd_pinv(path: &Path, tol: Option<f64>, out_path: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let rank_tol = tol.map_or(RankTol::Auto, RankTol::Absolute);
    let result = read_operator(path).and_then(|(t, _)| Ok((moore_penrose(&t, rank_tol)?, t)));
    let (p, t) = match result {
        Ok(r) => r,
        Err(e) => return fail(err, &e),
    };
    if let Some(dest) = out_path {
        if let Err(e) = write_operator(dest, &p.pseudoinverse) {
            return fail(err, &e);
        }
    }
    let _ = writeln!(out, "signature: {}", t.signature());
    let _ = writeln!(out, "shape: {}x{}", t.rows(), t.cols());
    let _ = writeln!(out, "rank: {}", p.rank);
    let _ = writeln!(out, "rank cutoff: {:.6e}", p.cutoff);
    let _ = writeln!(out, "singular values: {}", fmt_list(&p.singular_values));
    let _ = writeln!(out, "penrose residuals: {}", fmt_list(&p.penrose_residuals));
    let _ = writeln!(out, "boundary flag: {}", p.boundary_flag);
    EXIT_HOLDS
}

fn exit_code(c: &RolCertificate) -> i32 {
    if c.boundary_flag {
        EXIT_INDETERMINATE
    } else if c.rol_holds {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}

/// Certificate for a parsed pair; the byte strings are the file contents
/// the operators were read from.
pub fn certify(t: &AdjointableOp, s: &AdjointableOp, t_bytes: &[u8], s_bytes: &[u8], tol: f64) -> Result<CertificateOutput> {
    let certificate = check_corollary(t, s, tol)?;
    let blocks = if s.is_zero() {
        None
    } else {
        match block_conditions(t, s, tol) {
            Ok(b) => Some(b),
            Err(Error::DegenerateDecomposition(_)) => None,
            Err(e) => return Err(e),
        }
    };
    Ok(CertificateOutput {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        tol,
        rank_tol: "auto".into(),
        inputs: InputDigests {
            t_sha256: sha256_hex(t_bytes),
            s_sha256: sha256_hex(s_bytes),
        },
        exit_code: exit_code(&certificate),
        certificate,
        block_conditions: blocks,
    })
}

fn write_human_certificate(out: &mut dyn Write, c: &CertificateOutput) {
    let cert = &c.certificate;
    let verdict = match c.exit_code {
        EXIT_HOLDS => "holds",
        EXIT_FAILS => "fails",
        _ => "indeterminate",
    };
    let _ = writeln!(out, "reverse order law: {verdict} (residual_rol = {:.6e}, tol = {:.1e})", cert.residual_rol, c.tol);
    let groups = [("thm21", &cert.thm21), ("thm22", &cert.thm22)];
    for (name, rep) in groups {
        for (label, cond) in ["i", "ii", "iii"].iter().zip(rep.conditions()) {
            let _ = writeln!(out, "{name}.{label}: {} (residual {:.6e})", cond.holds, cond.residual);
        }
    }
    let g = &cert.greville;
    let _ = writeln!(out, "greville.tstar_t_s_in_ran_s: {} (residual {:.6e})", g.tstar_t_s_in_ran_s.holds, g.tstar_t_s_in_ran_s.residual);
    let _ = writeln!(
        out,
        "greville.s_sstar_tstar_in_ran_tstar: {} (residual {:.6e})",
        g.s_sstar_tstar_in_ran_tstar.holds, g.s_sstar_tstar_in_ran_tstar.residual
    );
    if let Some(b) = &c.block_conditions {
        for (name, cond) in b.all() {
            let _ = writeln!(out, "block.{name}: {} (residual {:.6e})", cond.holds, cond.residual);
        }
    }
    let _ = writeln!(out, "consistent: {}", cert.consistent);
    let _ = writeln!(out, "boundary_flag: {}", cert.boundary_flag);
}

pub fn cmd_check(path_t: &Path, path_s: &Path, tol: f64, machine: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = read_operator(path_t).and_then(|(t, tb)| {
        let (s, sb) = read_operator(path_s)?;
        if s.signature() != t.signature() {
            return Err(Error::InvalidInput(format!(
                "{}: signature {} does not match {}",
                path_s.display(),
                s.signature(),
                t.signature()
            )));
        }
        certify(&t, &s, &tb, &sb, tol)
    });
    let c = match result {
        Ok(c) => c,
        Err(e) => return fail(err, &e),
    };
    if machine {
        let _ = out.write_all(c.to_json().as_bytes());
    } else {
        write_human_certificate(out, &c);
    }
    c.exit_code
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub dims: Dims,
    pub count: usize,
    pub seed: u64,
    pub signature: AlgebraSignature,
    /// `None` cycles through every kind feasible at `dims`.
    pub kinds: Option<Vec<InstanceKind>>,
    pub tol: f64,
    pub jobs: Option<usize>,
    pub dump_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    pub kind: InstanceKind,
    /// Set when the generator exhausted its retry budget.
    pub generation_error: Option<String>,
    pub residual_rol: f64,
    pub rol_holds: bool,
    pub all_true: bool,
    pub all_false: bool,
    pub consistent: bool,
    /// Block-level verdicts equal the operator-level ones; `None` when `S = 0`.
    pub blocks_agree: Option<bool>,
    /// The instance meets the contract of its kind.
    pub contract_met: bool,
    pub flagged: bool,
    pub inconsistent: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub count: usize,
    pub generation_failures: usize,
    pub flagged: usize,
    pub rol_holds: usize,
    pub all_true: usize,
    pub all_false: usize,
    pub inconsistent: usize,
}

/// How often a verdict matched its reference verdict over unflagged instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub condition: String,
    pub reference: String,
    pub agree: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSettings {
    pub dims: [usize; 3],
    pub signature: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub kinds: Vec<InstanceKind>,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub tool: String,
    pub version: String,
    pub settings: FuzzSettings,
    pub per_kind: BTreeMap<InstanceKind, KindSummary>,
    pub agreement: Vec<Agreement>,
    pub flagged: usize,
    pub generation_failures: usize,
    pub inconsistent: usize,
    pub instances: Vec<InstanceRecord>,
}

struct Evaluated {
    record: InstanceRecord,
    pair: Option<(AdjointableOp, AdjointableOp)>,
    cert: Option<RolCertificate>,
    blocks: Option<BlockConditionReport>,
}

fn contract_met(kind: InstanceKind, c: &RolCertificate) -> bool {
    match kind {
        InstanceKind::Generic => true,
        InstanceKind::RolHolds | InstanceKind::SAdjoint => c.all_true(),
        InstanceKind::Thm21Only => c.thm21.all_hold() && !c.thm22.all_hold(),
        InstanceKind::Thm22Only => c.thm22.all_hold() && !c.thm21.all_hold(),
    }
}

fn blocks_agree(c: &RolCertificate, b: &BlockConditionReport) -> bool {
    b.thm21_verdicts() == c.thm21.verdicts() && b.thm22_verdicts() == c.thm22.verdicts()
}

fn evaluate(config: &FuzzConfig, kinds: &[InstanceKind], index: usize) -> Evaluated {
    let kind = kinds[index % kinds.len()];
    let seed = config.seed.wrapping_add(index as u64);
    let mut record = InstanceRecord {
        index,
        seed,
        kind,
        generation_error: None,
        residual_rol: 0.0,
        rol_holds: false,
        all_true: false,
        all_false: false,
        consistent: false,
        blocks_agree: None,
        contract_met: false,
        flagged: false,
        inconsistent: false,
    };
    let checked = gen_instance(kind, config.dims, None, &config.signature, seed).and_then(|(t, s)| {
        let cert = check_corollary(&t, &s, config.tol)?;
        let blocks = match block_conditions(&t, &s, config.tol) {
            Ok(b) => Some(b),
            Err(Error::DegenerateDecomposition(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((t, s, cert, blocks))
    });
    let (t, s, cert, blocks) = match checked {
        Ok(x) => x,
        Err(e) => {
            record.generation_error = Some(e.to_string());
            return Evaluated { record, pair: None, cert: None, blocks: None };
        }
    };
    record.residual_rol = cert.residual_rol;
    record.rol_holds = cert.rol_holds;
    record.all_true = cert.all_true();
    record.all_false = cert.all_false();
    record.consistent = cert.consistent;
    record.blocks_agree = blocks.as_ref().map(|b| blocks_agree(&cert, b));
    record.contract_met = contract_met(kind, &cert);
    record.flagged = cert.boundary_flag || blocks.as_ref().is_some_and(|b| b.boundary_flag);
    record.inconsistent =
        !record.flagged && (!record.consistent || record.blocks_agree == Some(false) || !record.contract_met);
    Evaluated {
        record,
        pair: Some((t, s)),
        cert: Some(cert),
        blocks,
    }
}

fn agreement_table(evals: &[Evaluated]) -> Vec<Agreement> {
    type Pick = fn(&RolCertificate, Option<&BlockConditionReport>) -> Option<(bool, bool)>;
    let rows: [(&str, &str, Pick); 14] = [
        ("thm21.ii", "thm21.i", |c, _| Some((c.thm21.ii.holds, c.thm21.i.holds))),
        ("thm21.iii", "thm21.i", |c, _| Some((c.thm21.iii.holds, c.thm21.i.holds))),
        ("thm22.ii", "thm22.i", |c, _| Some((c.thm22.ii.holds, c.thm22.i.holds))),
        ("thm22.iii", "thm22.i", |c, _| Some((c.thm22.iii.holds, c.thm22.i.holds))),
        ("thm21_and_thm22", "rol", |c, _| Some((c.thm21.all_hold() && c.thm22.all_hold(), c.rol_holds))),
        ("greville.tstar_t_s_in_ran_s", "rol", |c, _| {
            Some((c.greville.tstar_t_s_in_ran_s.holds, c.rol_holds))
        }),
        ("greville.s_sstar_tstar_in_ran_tstar", "rol", |c, _| {
            Some((c.greville.s_sstar_tstar_in_ran_tstar.holds, c.rol_holds))
        }),
        ("greville.both", "rol", |c, _| Some((c.greville.both_hold(), c.rol_holds))),
        ("block.c1", "thm21.i", |c, b| b.map(|b| (b.thm21_verdicts()[0], c.thm21.i.holds))),
        ("block.c2", "thm21.ii", |c, b| b.map(|b| (b.thm21_verdicts()[1], c.thm21.ii.holds))),
        ("block.c3", "thm21.iii", |c, b| b.map(|b| (b.thm21_verdicts()[2], c.thm21.iii.holds))),
        ("block.d1", "thm22.i", |c, b| b.map(|b| (b.thm22_verdicts()[0], c.thm22.i.holds))),
        ("block.d2", "thm22.ii", |c, b| b.map(|b| (b.thm22_verdicts()[1], c.thm22.ii.holds))),
        ("block.d3", "thm22.iii", |c, b| b.map(|b| (b.thm22_verdicts()[2], c.thm22.iii.holds))),
    ];
    rows.iter()
        .map(|(name, reference, pick)| {
            let pairs: Vec<(bool, bool)> = evals
                .iter()
                .filter(|e| !e.record.flagged)
                .filter_map(|e| e.cert.as_ref().and_then(|c| pick(c, e.blocks.as_ref())))
                .collect();
            Agreement {
                condition: (*name).into(),
                reference: (*reference).into(),
                agree: pairs.iter().filter(|(a, b)| a == b).count(),
                total: pairs.len(),
            }
        })
        .collect()
}

/// An instance index with its `(T, S)` pair.
pub type IndexedPair = (usize, AdjointableOp, AdjointableOp);

/// Runs the batch and builds its report. Inconsistent instances are
/// returned alongside so the caller can dump them.
pub fn run_fuzz(config: &FuzzConfig) -> Result<(FuzzReport, Vec<IndexedPair>)> {
    if config.count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    if !(config.tol.is_finite() && config.tol > 0.0) {
        return Err(Error::InvalidInput("tol must be a positive number".into()));
    }
    let kinds: Vec<InstanceKind> = match &config.kinds {
        Some(list) if list.is_empty() => return Err(Error::InvalidInput("kinds: empty list".into())),
        Some(list) => {
            for &k in list {
                check_feasible(k, config.dims, None)?;
            }
            list.clone()
        }
        None => InstanceKind::ALL
            .into_iter()
            .filter(|&k| check_feasible(k, config.dims, None).is_ok())
            .collect(),
    };
    if kinds.is_empty() {
        return Err(Error::Infeasible("no instance kind is feasible at these dims".into()));
    }
    let work = || {
        (0..config.count)
            .into_par_iter()
            .map(|i| evaluate(config, &kinds, i))
            .collect::<Vec<_>>()
    };
    let evals = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("jobs: {e}")))?
            .install(work),
        None => work(),
    };

    let mut per_kind: BTreeMap<InstanceKind, KindSummary> = kinds.iter().map(|&k| (k, KindSummary::default())).collect();
    for e in &evals {
        let r = &e.record;
        let s = per_kind.get_mut(&r.kind).expect("kind registered");
        s.count += 1;
        if r.generation_error.is_some() {
            s.generation_failures += 1;
            continue;
        }
        s.flagged += usize::from(r.flagged);
        s.rol_holds += usize::from(r.rol_holds);
        s.all_true += usize::from(r.all_true);
        s.all_false += usize::from(r.all_false);
        s.inconsistent += usize::from(r.inconsistent);
    }
    let agreement = agreement_table(&evals);
    let report = FuzzReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        settings: FuzzSettings {
            dims: [config.dims.p, config.dims.m, config.dims.k],
            signature: config.signature.block_sizes().to_vec(),
            count: config.count,
            seed: config.seed,
            kinds,
            tol: config.tol,
        },
        flagged: per_kind.values().map(|s| s.flagged).sum(),
        generation_failures: per_kind.values().map(|s| s.generation_failures).sum(),
        inconsistent: per_kind.values().map(|s| s.inconsistent).sum(),
        per_kind,
        agreement,
        instances: evals.iter().map(|e| e.record.clone()).collect(),
    };
    let bad = evals
        .into_iter()
        .filter(|e| e.record.inconsistent)
        .filter_map(|e| e.pair.map(|(t, s)| (e.record.index, t, s)))
        .collect();
    Ok((report, bad))
}

/// Writes `T`, `S` and the certificate `check` would produce for them.
/// Returns the three paths.
pub fn dump_instance(dir: &Path, index: usize, t: &AdjointableOp, s: &AdjointableOp, tol: f64) -> Result<[PathBuf; 3]> {
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    let stem = format!("instance-{index:06}");
    let pt = dir.join(format!("{stem}-T.json"));
    let ps = dir.join(format!("{stem}-S.json"));
    let pc = dir.join(format!("{stem}-certificate.json"));
    let tb = write_operator(&pt, t)?;
    let sb = write_operator(&ps, s)?;
    // Certify what a replay will read back, not the in-memory pair.
    let t2 = OperatorFile::parse(std::str::from_utf8(&tb).expect("utf8"))?.to_op()?;
    let s2 = OperatorFile::parse(std::str::from_utf8(&sb).expect("utf8"))?.to_op()?;
    let c = certify(&t2, &s2, &tb, &sb, tol)?;
    std::fs::write(&pc, c.to_json()).map_err(|e| Error::InvalidInput(format!("{}: {e}", pc.display())))?;
    Ok([pt, ps, pc])
}

fn write_human_fuzz(out: &mut dyn Write, r: &FuzzReport) {
    let st = &r.settings;
    let _ = writeln!(
        out,
        "fuzz: {} instances, dims {:?}, signature {:?}, seed {}, tol {:.1e}",
        st.count, st.dims, st.signature, st.seed, st.tol
    );
    let _ = writeln!(
        out,
        "{:<12} {:>6} {:>8} {:>8} {:>8} {:>9} {:>8} {:>12}",
        "kind", "count", "holds", "all_true", "all_false", "flagged", "gen_fail", "inconsistent"
    );
    for (k, s) in &r.per_kind {
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>8} {:>8} {:>8} {:>9} {:>8} {:>12}",
            k.name(),
            s.count,
            s.rol_holds,
            s.all_true,
            s.all_false,
            s.flagged,
            s.generation_failures,
            s.inconsistent
        );
    }
    let _ = writeln!(out, "agreement over unflagged instances:");
    for a in &r.agreement {
        let _ = writeln!(out, "  {:<36} vs {:<10} {}/{}", a.condition, a.reference, a.agree, a.total);
    }
    let _ = writeln!(
        out,
        "flagged: {}  generation failures: {}  unflagged inconsistencies: {}",
        r.flagged, r.generation_failures, r.inconsistent
    );
}

pub fn cmd_fuzz(config: &FuzzConfig, machine: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (report, bad) = match run_fuzz(config) {
        Ok(x) => x,
        Err(e) => return fail(err, &e),
    };
    for (index, t, s) in &bad {
        match dump_instance(&config.dump_dir, *index, t, s, config.tol) {
            Ok([pt, ..]) => {
                let _ = writeln!(err, "penrose: inconsistent instance {index} written to {}", pt.display());
            }
            Err(e) => {
                let _ = writeln!(err, "penrose: could not dump instance {index}: {e}");
            }
        }
    }
    if machine {
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        let _ = out.write_all(text.as_bytes());
    } else {
        write_human_fuzz(out, &report);
    }
    if report.inconsistent == 0 {
        EXIT_HOLDS
    } else {
        EXIT_FAILS
    }
}
