//! The free Hilbert A-module `A^k`.
//!
//! Vectors are k-tuples of algebra elements with the A-valued inner product
//! `<x, y> = sum_i x_i^* y_i`. A direct sum `A^k (+) A^m` is the
//! concatenation of component lists, i.e. `A^{k+m}`.

use crate::algebra::{AlgebraElement, AlgebraSignature};
use crate::error::{conform, Result};
use crate::matrix::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector {
    signature: AlgebraSignature,
    components: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn new(signature: &AlgebraSignature, components: Vec<AlgebraElement>) -> Result<Self> {
        if let Some(pos) = components.iter().position(|c| c.signature() != signature) {
            return Err(conform(format!(
                "component {pos} has signature {}, expected {signature}",
                components[pos].signature()
            )));
        }
        Ok(Self {
            signature: signature.clone(),
            components,
        })
    }

    pub fn zero(signature: &AlgebraSignature, len: usize) -> Self {
        Self {
            signature: signature.clone(),
            components: vec![AlgebraElement::zero(signature); len],
        }
    }

    /// The vector with the identity in slot `i` and zeros elsewhere.
    pub fn basis(signature: &AlgebraSignature, len: usize, i: usize) -> Self {
        let mut v = Self::zero(signature, len);
        v.components[i] = AlgebraElement::identity(signature);
        v
    }

    /// Vector over the scalar signature `[1]` from complex numbers.
    pub fn from_scalars(values: &[C64]) -> Self {
        let sig = AlgebraSignature::scalar();
        let components = values.iter().map(|&z| AlgebraElement::scalar(&sig, z)).collect();
        Self {
            signature: sig,
            components,
        }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    /// Right module action `x a`, applied component-wise.
    pub fn mul_right(&self, a: &AlgebraElement) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.mul(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            signature: self.signature.clone(),
            components,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_conformable(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            signature: self.signature.clone(),
            components,
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            signature: self.signature.clone(),
            components: self.components.iter().map(|c| c.scale(z)).collect(),
        }
    }

    /// `(x, y)` as an element of `A^{k+m}`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.signature != other.signature {
            return Err(conform("direct sum of vectors over different algebras"));
        }
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        Ok(Self {
            signature: self.signature.clone(),
            components,
        })
    }

    /// Stacked complex coordinates: components in order, each in the
    /// column-major block stacking of [`AlgebraElement::to_coords`].
    pub fn stacked(&self) -> Vec<C64> {
        self.components.iter().flat_map(|c| c.to_coords()).collect()
    }

    pub fn from_stacked(signature: &AlgebraSignature, coords: &[C64]) -> Result<Self> {
        let d = signature.dim();
        if !coords.len().is_multiple_of(d) {
            return Err(conform(format!(
                "{} coordinates is not a multiple of the algebra dimension {d}",
                coords.len()
            )));
        }
        let components = coords
            .chunks(d)
            .map(|c| AlgebraElement::from_coords(signature, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            signature: signature.clone(),
            components,
        })
    }

    fn check_conformable(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(conform(format!(
                "signature mismatch: {} vs {}",
                self.signature, other.signature
            )));
        }
        if self.len() != other.len() {
            return Err(conform(format!("length mismatch: {} vs {}", self.len(), other.len())));
        }
        Ok(())
    }
}

/// `<x, y> = sum_i x_i^* y_i`.
pub fn inner_product(x: &ModuleVector, y: &ModuleVector) -> Result<AlgebraElement> {
    x.check_conformable(y)?;
    let mut acc = AlgebraElement::zero(x.signature());
    for (a, b) in x.components.iter().zip(&y.components) {
        acc = acc.add(&a.adjoint().mul(b)?)?;
    }
    Ok(acc)
}

/// `||x|| = ||<x, x>||^{1/2}`.
pub fn vector_norm(x: &ModuleVector) -> f64 {
    inner_product(x, x)
        .expect("a vector is conformable with itself")
        .norm()
        .sqrt()
}

/// Inner product on `E_1 (+) E_2`: `<x_1, x_2> + <y_1, y_2>` for
/// `p = (x_1, y_1)` and `q = (x_2, y_2)`.
pub fn direct_sum_inner(
    p: (&ModuleVector, &ModuleVector),
    q: (&ModuleVector, &ModuleVector),
) -> Result<AlgebraElement> {
    inner_product(p.0, q.0)?.add(&inner_product(p.1, q.1)?)
}
