//! Adjointable operators `A^k -> A^m`.
//!
//! An operator is an `m x k` matrix over `A`, acting on column vectors by left
//! multiplication. Internally each operator keeps, for every algebra block of
//! size `n`, the `(m n) x (k n)` complex matrix assembled from that block of
//! every entry; products and adjoints are computed blockwise there.
//!
//! The flattening is the faithful representation on stacked coordinates
//! (see [`crate::module_space::ModuleVector::stacked`]). With column-major
//! stacking, left multiplication by a block `a` of size `n` on `M_n(C)` acts
//! as `I_n (x) a`, so entry `(i, j)` contributes the block-diagonal
//! repetition of its blocks at rows `i d ..` and columns `j d ..`, where
//! `d = sum n_j^2`. Flattening is a *-homomorphism: the adjoint flattens to
//! the conjugate transpose and composition flattens to the matrix product.

use crate::algebra::{AlgebraElement, AlgebraSignature};
use crate::error::{conform, Error, Result};
use crate::matrix::{relative_residual, CMatrix, C64};
use crate::module_space::ModuleVector;
use crate::pinv::{moore_penrose, RankTol};

/// Relative off-pattern tolerance for [`Projection::new`].
pub const PROJECTION_TOL: f64 = 1e-8;

#[derive(Clone)]
pub struct AdjointableOp {
    signature: AlgebraSignature,
    rows: usize,
    cols: usize,
    blocks: Vec<CMatrix>,
    flat: CMatrix,
}

impl std::fmt::Debug for AdjointableOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdjointableOp")
            .field("signature", &self.signature)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("flat", &self.flat)
            .finish()
    }
}

impl PartialEq for AdjointableOp {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.rows == other.rows
            && self.cols == other.cols
            && self.blocks == other.blocks
    }
}

impl AdjointableOp {
    fn from_blocks(signature: &AlgebraSignature, rows: usize, cols: usize, blocks: Vec<CMatrix>) -> Self {
        let flat = flatten_blocks(signature, rows, cols, &blocks);
        Self {
            signature: signature.clone(),
            rows,
            cols,
            blocks,
            flat,
        }
    }

    /// Builds an operator from its entries in row-major order.
    pub fn from_entries(
        signature: &AlgebraSignature,
        rows: usize,
        cols: usize,
        entries: &[AlgebraElement],
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(conform(format!(
                "{} entries for a {rows}x{cols} operator",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| e.signature() != signature) {
            return Err(conform(format!(
                "entry {pos} has signature {}, expected {signature}",
                entries[pos].signature()
            )));
        }
        let blocks = signature
            .block_sizes()
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let mut m = CMatrix::zeros(rows * n, cols * n);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set_block(i * n, j * n, &entries[i * cols + j].blocks()[b]);
                    }
                }
                m
            })
            .collect();
        Ok(Self::from_blocks(signature, rows, cols, blocks))
    }

    /// A plain complex matrix as an operator over the signature `[1]`.
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self::from_blocks(&AlgebraSignature::scalar(), m.rows(), m.cols(), vec![m.clone()])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Self::from_matrix(&CMatrix::from_real_rows(rows))
    }

    pub fn zero(signature: &AlgebraSignature, rows: usize, cols: usize) -> Self {
        let blocks = signature
            .block_sizes()
            .iter()
            .map(|&n| CMatrix::zeros(rows * n, cols * n))
            .collect();
        Self::from_blocks(signature, rows, cols, blocks)
    }

    pub fn identity(signature: &AlgebraSignature, n: usize) -> Self {
        let blocks = signature
            .block_sizes()
            .iter()
            .map(|&b| CMatrix::identity(n * b))
            .collect();
        Self::from_blocks(signature, n, n, blocks)
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    /// Module dimension of the codomain.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Module dimension of the domain.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The cached flattening, `(rows d) x (cols d)`.
    pub fn flat(&self) -> &CMatrix {
        &self.flat
    }

    /// Per-algebra-block matrices, block `b` being `(rows n_b) x (cols n_b)`.
    pub fn block_matrices(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn entry(&self, i: usize, j: usize) -> AlgebraElement {
        let blocks = self
            .signature
            .block_sizes()
            .iter()
            .zip(&self.blocks)
            .map(|(&n, m)| m.submatrix(i * n, j * n, n, n))
            .collect();
        AlgebraElement::new(&self.signature, blocks).expect("blocks conform by construction")
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<AlgebraElement> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j))
            .collect()
    }

    /// Frobenius norm of the flattening.
    pub fn norm(&self) -> f64 {
        self.flat.frobenius_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.flat.max_abs() == 0.0
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(conform(format!(
                "signature mismatch: {} vs {}",
                self.signature, other.signature
            )));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(conform(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(Self::from_blocks(&self.signature, self.rows, self.cols, blocks))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Ok(Self::from_blocks(&self.signature, self.rows, self.cols, blocks))
    }

    pub fn scale(&self, z: C64) -> Self {
        let blocks = self.blocks.iter().map(|b| b.scale(z)).collect();
        Self::from_blocks(&self.signature, self.rows, self.cols, blocks)
    }

    /// Sub-operator on module rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn slice(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let blocks = self
            .signature
            .block_sizes()
            .iter()
            .zip(&self.blocks)
            .map(|(&n, m)| m.submatrix(r0 * n, c0 * n, nr * n, nc * n))
            .collect();
        Self::from_blocks(&self.signature, nr, nc, blocks)
    }

    /// Assembles a block operator from a grid of operators, given row by row.
    pub fn assemble(grid: &[Vec<&AdjointableOp>]) -> Result<Self> {
        let first = grid
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| conform("empty operator grid"))?;
        let signature = first.signature.clone();
        let row_dims: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let col_dims: Vec<usize> = grid[0].iter().map(|op| op.cols).collect();
        for (bi, row) in grid.iter().enumerate() {
            if row.len() != col_dims.len() {
                return Err(conform("ragged operator grid"));
            }
            for (bj, op) in row.iter().enumerate() {
                if op.signature != signature || op.rows != row_dims[bi] || op.cols != col_dims[bj] {
                    return Err(conform(format!("grid block ({bi}, {bj}) does not conform")));
                }
            }
        }
        let rows: usize = row_dims.iter().sum();
        let cols: usize = col_dims.iter().sum();
        let blocks = signature
            .block_sizes()
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let mut m = CMatrix::zeros(rows * n, cols * n);
                let mut r0 = 0;
                for (bi, row) in grid.iter().enumerate() {
                    let mut c0 = 0;
                    for (bj, op) in row.iter().enumerate() {
                        m.set_block(r0 * n, c0 * n, &op.blocks[b]);
                        c0 += col_dims[bj];
                    }
                    r0 += row_dims[bi];
                }
                m
            })
            .collect();
        Ok(Self::from_blocks(&signature, rows, cols, blocks))
    }
}

fn flatten_blocks(signature: &AlgebraSignature, rows: usize, cols: usize, blocks: &[CMatrix]) -> CMatrix {
    let d = signature.dim();
    let mut flat = CMatrix::zeros(rows * d, cols * d);
    let mut offset = 0;
    for (&n, bm) in signature.block_sizes().iter().zip(blocks) {
        for i in 0..rows {
            for j in 0..cols {
                for c in 0..n {
                    let r0 = i * d + offset + c * n;
                    let c0 = j * d + offset + c * n;
                    for s in 0..n {
                        for r in 0..n {
                            flat[(r0 + r, c0 + s)] = bm[(i * n + r, j * n + s)];
                        }
                    }
                }
            }
        }
        offset += n * n;
    }
    flat
}

/// `(T x)_i = sum_j T_ij x_j`.
pub fn apply(t: &AdjointableOp, x: &ModuleVector) -> Result<ModuleVector> {
    if x.signature() != t.signature() || x.len() != t.cols {
        return Err(conform(format!(
            "cannot apply a {}x{} operator over {} to a vector of length {} over {}",
            t.rows,
            t.cols,
            t.signature,
            x.len(),
            x.signature()
        )));
    }
    let mut out = Vec::with_capacity(t.rows);
    for i in 0..t.rows {
        let mut acc = AlgebraElement::zero(&t.signature);
        for (j, xj) in x.components().iter().enumerate() {
            acc = acc.add(&t.entry(i, j).mul(xj)?)?;
        }
        out.push(acc);
    }
    ModuleVector::new(&t.signature, out)
}

/// The adjoint: transpose of the entry matrix with every entry adjoined.
pub fn adjoint_op(t: &AdjointableOp) -> AdjointableOp {
    let blocks = t.blocks.iter().map(CMatrix::adjoint).collect();
    AdjointableOp::from_blocks(&t.signature, t.cols, t.rows, blocks)
}

/// The product `T S` (apply `S` first).
pub fn compose(t: &AdjointableOp, s: &AdjointableOp) -> Result<AdjointableOp> {
    if t.signature != s.signature {
        return Err(conform(format!(
            "signature mismatch: {} vs {}",
            t.signature, s.signature
        )));
    }
    if t.cols != s.rows {
        return Err(conform(format!(
            "cannot compose {}x{} after {}x{}",
            t.rows, t.cols, s.rows, s.cols
        )));
    }
    let blocks = t.blocks.iter().zip(&s.blocks).map(|(a, b)| a.matmul(b)).collect();
    Ok(AdjointableOp::from_blocks(&t.signature, t.rows, s.cols, blocks))
}

/// Owned copy of the cached flattening.
pub fn flatten(t: &AdjointableOp) -> CMatrix {
    t.flat.clone()
}

/// Projects a `(m d) x (k d)` matrix onto the left-multiplication pattern and
/// rebuilds the operator. Fails with [`Error::Structure`] when the discarded
/// off-pattern mass exceeds `tol (1 + ||M||_F)`.
pub fn unflatten(
    m: &CMatrix,
    signature: &AlgebraSignature,
    shape: (usize, usize),
    tol: f64,
) -> Result<AdjointableOp> {
    let (rows, cols) = shape;
    let d = signature.dim();
    if m.shape() != (rows * d, cols * d) {
        return Err(conform(format!(
            "a {}x{} matrix cannot be the flattening of a {rows}x{cols} operator over {signature}",
            m.rows(),
            m.cols()
        )));
    }
    let mut blocks = Vec::with_capacity(signature.block_sizes().len());
    let mut offset = 0;
    for &n in signature.block_sizes() {
        let inv = 1.0 / n as f64;
        let bm = CMatrix::from_fn(rows * n, cols * n, |gi, gj| {
            let (i, r) = (gi / n, gi % n);
            let (j, s) = (gj / n, gj % n);
            let first = m[(i * d + offset + r, j * d + offset + s)];
            let mut acc = C64::new(0.0, 0.0);
            let mut equal = true;
            for c in 0..n {
                let z = m[(i * d + offset + c * n + r, j * d + offset + c * n + s)];
                equal &= z == first;
                acc += z;
            }
            // keep exact copies exact; the mean rounds for n = 3
            if equal {
                first
            } else {
                acc * inv
            }
        });
        blocks.push(bm);
        offset += n * n;
    }
    let op = AdjointableOp::from_blocks(signature, rows, cols, blocks);
    let mass = (m - &op.flat).frobenius_norm();
    let limit = tol * (1.0 + m.frobenius_norm());
    if mass > limit || !mass.is_finite() {
        return Err(Error::Structure { mass, limit });
    }
    Ok(op)
}

/// Off-pattern mass `||M - flatten(unflatten(M))||_F` without a tolerance.
pub fn off_pattern_mass(m: &CMatrix, signature: &AlgebraSignature, shape: (usize, usize)) -> Result<f64> {
    let op = unflatten(m, signature, shape, f64::INFINITY)?;
    Ok((m - &op.flat).frobenius_norm())
}

/// Verdict of a range inclusion test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inclusion {
    pub holds: bool,
    pub residual: f64,
    /// Set when the projection onto `Ran(C)` came from a rank decision near
    /// the cutoff.
    pub boundary_flag: bool,
}

/// Tests `Ran(B) ⊆ Ran(C)` through `||(I - C C^+) B|| / (1 + ||B||)`.
pub fn range_inclusion(b: &AdjointableOp, c: &AdjointableOp, tol: f64) -> Result<Inclusion> {
    if b.signature != c.signature || b.rows != c.rows {
        return Err(conform("range inclusion needs operators with a common codomain"));
    }
    let cp = moore_penrose(c, RankTol::Auto)?;
    let proj = compose(c, &cp.pseudoinverse)?;
    let residual_op = b.sub(&compose(&proj, b)?)?;
    let residual = residual_op.norm() / (1.0 + b.norm());
    Ok(Inclusion {
        holds: residual <= tol,
        residual,
        boundary_flag: cp.boundary_flag,
    })
}

/// An orthogonal projection `P = P^* = P^2`.
#[derive(Clone, Debug)]
pub struct Projection(AdjointableOp);

impl Projection {
    /// Accepts `p` when both `P - P^*` and `P^2 - P` are within
    /// [`PROJECTION_TOL`] relative.
    pub fn new(p: AdjointableOp) -> Result<Self> {
        if p.rows != p.cols {
            return Err(Error::InvalidDecomposition("projection must be square".into()));
        }
        let sa = relative_residual(p.flat(), adjoint_op(&p).flat());
        let idem = relative_residual(p.flat(), compose(&p, &p)?.flat());
        if sa > PROJECTION_TOL || idem > PROJECTION_TOL {
            return Err(Error::InvalidDecomposition(format!(
                "not an orthogonal projection: self-adjointness residual {sa:.3e}, idempotence residual {idem:.3e}"
            )));
        }
        Ok(Self(p))
    }

    /// `T T^+`, the projection onto `Ran(T)`.
    pub fn onto_range(t: &AdjointableOp) -> Result<Self> {
        let tp = moore_penrose(t, RankTol::Auto)?;
        Self::new(compose(t, &tp.pseudoinverse)?)
    }

    /// `I - T^+ T`, the projection onto `Ker(T)`.
    pub fn onto_kernel(t: &AdjointableOp) -> Result<Self> {
        let tp = moore_penrose(t, RankTol::Auto)?;
        let id = AdjointableOp::identity(t.signature(), t.cols);
        Self::new(id.sub(&compose(&tp.pseudoinverse, t)?)?)
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let id = AdjointableOp::identity(self.0.signature(), self.0.rows);
        Self(id.sub(&self.0).expect("same shape"))
    }

    pub fn op(&self) -> &AdjointableOp {
        &self.0
    }

    pub fn into_op(self) -> AdjointableOp {
        self.0
    }
}

impl AsRef<AdjointableOp> for Projection {
    fn as_ref(&self) -> &AdjointableOp {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module_space::inner_product;

    fn sig(s: &[usize]) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_op(signature: &AlgebraSignature, rows: usize, cols: usize, seed: u64) -> AdjointableOp {
        // Cheap deterministic filler; randomized coverage lives in the integration tests.
        let d = signature.dim();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        };
        let entries: Vec<AlgebraElement> = (0..rows * cols)
            .map(|_| {
                let coords: Vec<C64> = (0..d).map(|_| c(next(), next())).collect();
                AlgebraElement::from_coords(signature, &coords).unwrap()
            })
            .collect();
        AdjointableOp::from_entries(signature, rows, cols, &entries).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = sig(&[1, 2]);
        let x = ModuleVector::basis(&s, 3, 2);
        assert_eq!(apply(&AdjointableOp::identity(&s, 3), &x).unwrap(), x);
        let z = apply(&AdjointableOp::zero(&s, 2, 3), &x).unwrap();
        assert_eq!(z, ModuleVector::zero(&s, 2));

        let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let x = ModuleVector::from_scalars(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let y = apply(&t, &x).unwrap();
        assert_eq!(y, ModuleVector::from_scalars(&[c(2.0, 0.0), c(0.0, 0.0)]));
    }

    #[test]
    fn apply_rejects_mismatch() {
        let t = AdjointableOp::identity(&sig(&[1]), 2);
        assert!(apply(&t, &ModuleVector::zero(&sig(&[1]), 3)).is_err());
        assert!(apply(&t, &ModuleVector::zero(&sig(&[2]), 2)).is_err());
    }

    #[test]
    fn adjoint_defining_identity() {
        let s = sig(&[1, 2]);
        let t = sample_op(&s, 2, 3, 1);
        let x = ModuleVector::new(&s, sample_op(&s, 3, 1, 2).entries()).unwrap();
        let y = ModuleVector::new(&s, sample_op(&s, 2, 1, 3).entries()).unwrap();
        let lhs = inner_product(&apply(&t, &x).unwrap(), &y).unwrap();
        let rhs = inner_product(&x, &apply(&adjoint_op(&t), &y).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-12 * (1.0 + lhs.norm()));
        assert_eq!(adjoint_op(&adjoint_op(&t)), t);
        let id = AdjointableOp::identity(&s, 2);
        assert_eq!(adjoint_op(&id), id);
    }

    #[test]
    fn compose_examples() {
        let s = sig(&[2]);
        let t = sample_op(&s, 2, 3, 4);
        let u = sample_op(&s, 3, 2, 5);
        assert_eq!(compose(&t, &AdjointableOp::identity(&s, 3)).unwrap(), t);
        let tu = compose(&t, &u).unwrap();
        let lhs = adjoint_op(&tu);
        let rhs = compose(&adjoint_op(&u), &adjoint_op(&t)).unwrap();
        assert!(relative_residual(lhs.flat(), rhs.flat()) <= 1e-12);
        let flat_prod = t.flat().matmul(u.flat());
        assert!(relative_residual(&flat_prod, tu.flat()) <= 1e-12);
        assert!(compose(&t, &t).is_err());
    }

    #[test]
    fn flatten_scalar_signature_is_identity_map() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(AdjointableOp::from_matrix(&m).flat(), &m);
    }

    #[test]
    fn flatten_matches_action_on_basis_matrices() {
        // Column-stacked basis E11, E21, E12, E22: column q of the 4x4 block
        // must be the stacking of a * E_q.
        let s = sig(&[2]);
        let a = CMatrix::from_row_major(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(4.0, 1.0)]);
        let elem = AlgebraElement::new(&s, vec![a.clone()]).unwrap();
        let t = AdjointableOp::from_entries(&s, 1, 1, &[elem]).unwrap();
        let flat = t.flat();
        for q in 0..4 {
            let mut e = CMatrix::zeros(2, 2);
            e[(q % 2, q / 2)] = c(1.0, 0.0);
            let image = a.matmul(&e);
            assert_eq!(flat.column(q), image.as_slice(), "basis matrix {q}");
        }
        assert_eq!(adjoint_op(&t).flat(), &flat.adjoint());
    }

    #[test]
    fn flatten_is_faithful_on_vectors() {
        let s = sig(&[1, 2]);
        let t = sample_op(&s, 3, 2, 9);
        let x = ModuleVector::new(&s, sample_op(&s, 2, 1, 10).entries()).unwrap();
        let tx = apply(&t, &x).unwrap().stacked();
        let xs = CMatrix::from_fn(x.stacked().len(), 1, |i, _| x.stacked()[i]);
        let fx = t.flat().matmul(&xs);
        let err: f64 = tx.iter().zip(fx.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * (1.0 + fx.frobenius_norm()));
    }

    #[test]
    fn right_action_commutes() {
        let s = sig(&[2]);
        let t = sample_op(&s, 2, 2, 11);
        let x = ModuleVector::new(&s, sample_op(&s, 2, 1, 12).entries()).unwrap();
        let a = sample_op(&s, 1, 1, 13).entry(0, 0);
        let lhs = apply(&t, &x.mul_right(&a).unwrap()).unwrap();
        let rhs = apply(&t, &x).unwrap().mul_right(&a).unwrap();
        let diff: f64 = lhs
            .stacked()
            .iter()
            .zip(rhs.stacked())
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-12);
    }

    #[test]
    fn unflatten_round_trip_and_rejection() {
        let s = sig(&[1, 2]);
        let t = sample_op(&s, 2, 3, 14);
        assert_eq!(unflatten(t.flat(), &s, (2, 3), 1e-12).unwrap(), t);
        let z = unflatten(&CMatrix::zeros(10, 15), &s, (2, 3), 1e-12).unwrap();
        assert!(z.is_zero());
        // A generic matrix is not A-linear.
        let mut bad = t.flat().clone();
        bad[(1, 2)] += c(1.0, 0.0);
        assert!(matches!(unflatten(&bad, &s, (2, 3), 1e-10), Err(Error::Structure { .. })));
        assert!(unflatten(&bad, &s, (3, 3), 1e-10).is_err());
    }

    #[test]
    fn range_inclusion_examples() {
        let b = AdjointableOp::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let c_op = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let r = range_inclusion(&b, &c_op, 1e-8).unwrap();
        assert!(r.holds && r.residual <= 1e-14, "{r:?}");

        let id = AdjointableOp::identity(&sig(&[2]), 2);
        let r = range_inclusion(&compose(&id, &id).unwrap(), &id, 1e-8).unwrap();
        assert!(r.holds && r.residual == 0.0);
        let zero = AdjointableOp::zero(&sig(&[2]), 2, 2);
        assert!(!range_inclusion(&id, &zero, 1e-8).unwrap().holds);
    }

    #[test]
    fn projection_validation() {
        let p = AdjointableOp::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(Projection::new(p).is_ok());
        let oblique = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(Projection::new(oblique), Err(Error::InvalidDecomposition(_))));
        let t = AdjointableOp::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let ker = Projection::onto_kernel(&t).unwrap();
        let expect = CMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        assert!((ker.op().flat() - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn assemble_blocks() {
        let s = sig(&[1]);
        let a = AdjointableOp::identity(&s, 1);
        let z = AdjointableOp::zero(&s, 1, 2);
        let z2 = AdjointableOp::zero(&s, 2, 1);
        let i2 = AdjointableOp::identity(&s, 2);
        let big = AdjointableOp::assemble(&[vec![&a, &z], vec![&z2, &i2]]).unwrap();
        assert_eq!(big, AdjointableOp::identity(&s, 3));
        assert_eq!(big.slice(1, 1, 2, 2), i2);
    }
}
