//! Finite-dimensional C*-algebras `A = M_{n_1}(C) (+) ... (+) M_{n_r}(C)`.
//!
//! Every finite-dimensional C*-algebra is of this form, so elements are
//! stored as their lists of diagonal blocks. Involution is the blockwise
//! conjugate transpose and the C*-norm is the largest singular value over
//! all blocks.

use std::fmt;
use std::sync::Arc;

use crate::error::{conform, Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::pinv::svd::svd_factor;

/// Block sizes `[n_1, ..., n_r]` of a block-diagonal algebra.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSignature(Arc<[usize]>);

impl AlgebraSignature {
    pub fn new(block_sizes: &[usize]) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidInput("signature must have at least one block".into()));
        }
        if let Some(pos) = block_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidInput(format!("signature block {pos} has size 0")));
        }
        Ok(Self(block_sizes.into()))
    }

    /// The signature `[1]`: the algebra is `C` itself.
    pub fn scalar() -> Self {
        Self(Arc::from([1usize].as_slice()))
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.0
    }

    /// Complex dimension `sum n_j^2`.
    pub fn dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn is_scalar(&self) -> bool {
        self.0.as_ref() == [1]
    }
}

impl fmt::Debug for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.block_sizes())
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    signature: AlgebraSignature,
    blocks: Vec<CMatrix>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraElement")
            .field("signature", &self.signature)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl AlgebraElement {
    pub fn new(signature: &AlgebraSignature, blocks: Vec<CMatrix>) -> Result<Self> {
        let sizes = signature.block_sizes();
        if blocks.len() != sizes.len() {
            return Err(conform(format!(
                "element has {} blocks, signature {} expects {}",
                blocks.len(),
                signature,
                sizes.len()
            )));
        }
        for (j, (b, &n)) in blocks.iter().zip(sizes).enumerate() {
            if b.shape() != (n, n) {
                return Err(conform(format!(
                    "block {j} is {}x{}, signature {} expects {n}x{n}",
                    b.rows(),
                    b.cols(),
                    signature
                )));
            }
        }
        Ok(Self {
            signature: signature.clone(),
            blocks,
        })
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        Self {
            signature: signature.clone(),
            blocks: signature.block_sizes().iter().map(|&n| CMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn identity(signature: &AlgebraSignature) -> Self {
        Self {
            signature: signature.clone(),
            blocks: signature.block_sizes().iter().map(|&n| CMatrix::identity(n)).collect(),
        }
    }

    /// `z` times the identity.
    pub fn scalar(signature: &AlgebraSignature, z: C64) -> Self {
        Self::identity(signature).scale(z)
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.max_abs() == 0.0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(conform(format!(
                "signature mismatch: {} vs {}",
                self.signature, other.signature
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Blockwise product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.matmul(b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(z)).collect(),
        }
    }

    /// The involution: blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            blocks: self.blocks.iter().map(CMatrix::adjoint).collect(),
        }
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| svd_factor(b).largest())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part, over all blocks.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| min_eigenvalue_hermitian(&b.hermitian_part()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Positivity within `tol`: `||a - a*|| <= tol (1 + ||a||)` and every
    /// block eigenvalue is at least `-tol ||a||`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let norm = self.norm();
        let skew = self.sub(&self.adjoint()).map(|d| d.norm()).unwrap_or(f64::INFINITY);
        if skew > tol * (1.0 + norm) {
            return false;
        }
        self.min_hermitian_eigenvalue() >= -tol * norm
    }

    /// Coordinates in the column-major stacking of each block, blocks in order.
    pub fn to_coords(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.signature.dim());
        for b in &self.blocks {
            out.extend_from_slice(b.as_slice());
        }
        out
    }

    pub fn from_coords(signature: &AlgebraSignature, coords: &[C64]) -> Result<Self> {
        if coords.len() != signature.dim() {
            return Err(conform(format!(
                "{} coordinates for an algebra of dimension {}",
                coords.len(),
                signature.dim()
            )));
        }
        let mut blocks = Vec::with_capacity(signature.block_sizes().len());
        let mut off = 0;
        for &n in signature.block_sizes() {
            blocks.push(CMatrix::from_fn(n, n, |i, j| coords[off + j * n + i]));
            off += n * n;
        }
        Ok(Self {
            signature: signature.clone(),
            blocks,
        })
    }
}

/// Smallest eigenvalue of a Hermitian matrix. The shift by the spectral
/// radius makes the matrix positive semidefinite, whose eigenvalues are then
/// its singular values.
pub(crate) fn min_eigenvalue_hermitian(h: &CMatrix) -> f64 {
    if h.is_empty() {
        return f64::INFINITY;
    }
    let shift = svd_factor(h).largest();
    let n = h.rows();
    let mut shifted = h.clone();
    for i in 0..n {
        shifted[(i, i)] += C64::new(shift, 0.0);
    }
    let f = svd_factor(&shifted);
    f.singular_values.last().copied().unwrap_or(0.0) - shift
}
