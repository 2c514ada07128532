//! On-disk operator files and certificate documents.
//!
//! Operator files are JSON:
//!
//! ```json
//! { "signature": [1, 2], "rows": 1, "cols": 1,
//!   "entries": [ [ [[1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]] ] ] }
//! ```
//!
//! `entries` lists the operator entries in row-major order. Each entry is a
//! list of blocks, one per signature block, and a block of size `n` is a
//! row-major list of `n * n` `[re, im]` pairs. Floats are written in
//! shortest round-trip form and parsed with correct rounding, so a
//! write/read cycle is bit-exact.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraElement, AlgebraSignature};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::operators::AdjointableOp;
use crate::reverse_order::{BlockConditionReport, RolCertificate};

pub const TOOL_NAME: &str = "penrose";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub signature: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Vec<[f64; 2]>>>,
}

impl OperatorFile {
    pub fn from_op(t: &AdjointableOp) -> Self {
        let entries = t
            .entries()
            .iter()
            .map(|e| {
                e.blocks()
                    .iter()
                    .map(|b| b.to_row_major().iter().map(|z| [z.re, z.im]).collect())
                    .collect()
            })
            .collect();
        Self {
            signature: t.signature().block_sizes().to_vec(),
            rows: t.rows(),
            cols: t.cols(),
            entries,
        }
    }

    pub fn to_op(&self) -> Result<AdjointableOp> {
        let sig = AlgebraSignature::new(&self.signature).map_err(|e| invalid("signature", e))?;
        let sizes = sig.block_sizes();
        if self.entries.len() != self.rows * self.cols {
            return Err(invalid(
                "entries",
                format!("{} entries, expected rows * cols = {}", self.entries.len(), self.rows * self.cols),
            ));
        }
        let mut elements = Vec::with_capacity(self.entries.len());
        for (e, entry) in self.entries.iter().enumerate() {
            if entry.len() != sizes.len() {
                return Err(invalid(
                    &format!("entries[{e}]"),
                    format!("{} blocks, signature expects {}", entry.len(), sizes.len()),
                ));
            }
            let mut blocks = Vec::with_capacity(sizes.len());
            for (b, (block, &n)) in entry.iter().zip(sizes).enumerate() {
                if block.len() != n * n {
                    return Err(invalid(
                        &format!("entries[{e}][{b}]"),
                        format!("{} values, a {n}x{n} block needs {}", block.len(), n * n),
                    ));
                }
                if let Some(v) = block.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
                    return Err(invalid(&format!("entries[{e}][{b}][{v}]"), "non-finite value"));
                }
                let data: Vec<C64> = block.iter().map(|z| C64::new(z[0], z[1])).collect();
                blocks.push(CMatrix::from_row_major(n, n, &data));
            }
            elements.push(AlgebraElement::new(&sig, blocks)?);
        }
        AdjointableOp::from_entries(&sig, self.rows, self.cols, &elements)
    }

    /// Parses and validates file contents, naming the first offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| invalid("document", e))?;
        let obj = v.as_object().ok_or_else(|| invalid("document", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "signature" | "rows" | "cols" | "entries") {
                return Err(invalid(key, "unknown field"));
            }
        }
        let field = |name: &str| obj.get(name).ok_or_else(|| invalid(name, "missing"));
        let signature = field("signature")?
            .as_array()
            .ok_or_else(|| invalid("signature", "expected a list of block sizes"))?
            .iter()
            .enumerate()
            .map(|(i, n)| as_size(n).filter(|&n| n > 0).ok_or_else(|| invalid(&format!("signature[{i}]"), "expected a positive integer")))
            .collect::<Result<Vec<_>>>()?;
        let rows = as_size(field("rows")?).ok_or_else(|| invalid("rows", "expected a nonnegative integer"))?;
        let cols = as_size(field("cols")?).ok_or_else(|| invalid("cols", "expected a nonnegative integer"))?;
        let entries = field("entries")?
            .as_array()
            .ok_or_else(|| invalid("entries", "expected a list"))?
            .iter()
            .enumerate()
            .map(|(e, entry)| {
                let path = format!("entries[{e}]");
                list(entry, &path, "a list of blocks")?
                    .iter()
                    .enumerate()
                    .map(|(b, block)| {
                        let path = format!("{path}[{b}]");
                        list(block, &path, "a list of [re, im] pairs")?
                            .iter()
                            .enumerate()
                            .map(|(k, pair)| pair_of(pair, &format!("{path}[{k}]")))
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        let file = Self { signature, rows, cols, entries };
        file.to_op()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("operator files serialize");
        s.push('\n');
        s
    }
}

fn invalid(field: &str, why: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{field}: {why}"))
}

fn as_size(v: &Value) -> Option<usize> {
    v.as_u64().and_then(|n| usize::try_from(n).ok())
}

fn list<'a>(v: &'a Value, path: &str, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(path, format!("expected {what}")))
}

fn pair_of(v: &Value, path: &str) -> Result<[f64; 2]> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok([re, im]),
            _ => Err(invalid(path, "expected numbers")),
        },
        _ => Err(invalid(path, "expected an [re, im] pair")),
    }
}

pub fn read_operator(path: &std::path::Path) -> Result<(AdjointableOp, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let op = std::str::from_utf8(&bytes)
        .map_err(|e| invalid("document", e))
        .and_then(OperatorFile::parse)
        .and_then(|f| f.to_op())
        .map_err(|e| {
            let msg = match e {
                Error::InvalidInput(m) => m,
                other => other.to_string(),
            };
            Error::InvalidInput(format!("{}: {msg}", path.display()))
        })?;
    Ok((op, bytes))
}

pub fn write_operator(path: &std::path::Path, t: &AdjointableOp) -> Result<Vec<u8>> {
    let bytes = OperatorFile::from_op(t).to_json().into_bytes();
    std::fs::write(path, &bytes).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigests {
    pub t_sha256: String,
    pub s_sha256: String,
}

/// Machine-readable output of `check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateOutput {
    pub tool: String,
    pub version: String,
    /// Verdict tolerance on relative residuals.
    pub tol: f64,
    /// Rank decision rule used for every pseudoinverse.
    pub rank_tol: String,
    pub inputs: InputDigests,
    pub certificate: RolCertificate,
    /// Present when `S` is nonzero.
    pub block_conditions: Option<BlockConditionReport>,
    pub exit_code: i32,
}

impl CertificateOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid("certificate", e))
    }
}
