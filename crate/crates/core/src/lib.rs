//! Moore-Penrose inverses and reverse-order-law certificates for adjointable
//! operators on free Hilbert modules over finite-dimensional C*-algebras.

pub mod algebra;
pub mod canonical_forms;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod module_space;
pub mod operators;
pub mod pinv;
pub mod reverse_order;

pub use algebra::{AlgebraElement, AlgebraSignature};
pub use error::{Error, Result};
pub use matrix::{CMatrix, C64};
pub use module_space::{direct_sum_inner, inner_product, vector_norm, ModuleVector};
pub use operators::{adjoint_op, apply, compose, flatten, range_inclusion, unflatten, AdjointableOp, Projection};
pub use pinv::{moore_penrose, svd_factor, theta_class, PinvResult, RankTol, SvdFactors, ThetaClassReport};
pub use reverse_order::{
    block_conditions, check_corollary, check_thm21, check_thm22, gen_instance, BlockConditionReport, Dims, InstanceKind,
    Ranks, RolCertificate, TheoremReport,
};
