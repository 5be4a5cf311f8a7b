//! Exact symbolic engine for quasi-Poisson structures on moduli spaces
//! of flat connections over marked surfaces, assembled by fusion and
//! coisotropic reduction from disk blocks, together with their
//! deformation quantization truncated at second order in the formal
//! parameter. Every identity the engine asserts is an exact polynomial
//! identity over the rationals.

pub mod algebra;
pub mod associator;
pub mod bundled;
pub mod error;
pub mod funalg;
pub mod linalg;
pub mod moduli;
pub mod rational;
pub mod starprod;

pub use algebra::{bar, direct_sum, env_mul, insert_legs, pbw_normalize, EnvElement, LieAlgebraSpec, TensorSeries, UniversalMorphism};
pub use associator::{associator_truncate, braiding, fusion_coherence_defect, fusion_element, phi_element, FusionElement, TruncatedAssociator};
pub use error::CoreError;
pub use funalg::{
    coisotropic_check, left_invariant_field, right_invariant_field, Derivation, Gen, MatrixGroupModel, PolyFun,
    QuasiPoissonAlgebra, Sign,
};
pub use moduli::{
    assemble, builtin_program, manin_validate, validate_program, Assembly, BuiltinKind, FusionProgram,
    ManinTripleData, SkeletonGraph, Step, Subspace,
};
pub use rational::Rational;
pub use starprod::{
    associativity_defect, quantize_fusion, quantize_program, Quantization, StarProduct,
};
