//! Numerical verification of a functional equation for characteristic
//! elements of elliptic curves (and weight-`k` newforms) over false Tate
//! curve extensions `Q(μ_{p^∞}, a^{1/p^∞})`.

pub mod charelem;
pub mod classify;
pub mod cyclotomic;
pub mod error;
pub mod euler;
pub mod group;
pub mod linalg;
pub mod padic;
pub mod reps;
pub mod scalar;
pub mod verify;

pub use charelem::{evaluate, local_error_eval, EvalResult, EvalValue, LocalErrorData, LocalModuleSpec, ModuleKind};
pub use classify::{assemble_error_term, classify_primes, count_points_weight2, ErrorTermClass, PrimeClassification};
pub use cyclotomic::{CycElem, Cyclotomic, RatCyc};
pub use error::{Error, Result};
pub use euler::{euler_factor, euler_ratio_product, twisted_frobenius_data, FormData, TwistConvention};
pub use group::{decomposition_data, geometric_sum, DecompData, FalseTateGroup, GroupAlgElem, GroupElem};
pub use linalg::Matrix;
pub use padic::{PadicCtx, PadicScalar, Valuation};
pub use reps::{enumerate_irreps, ArtinRep, RepContext, RepLabel};
pub use scalar::Scalar;
pub use verify::{emit_report, ingest_form, verify_functional_equation, VerificationReport, VerifyOptions};

/// Matrices over `Q_p(ζ_{p^n})`.
pub type CycMatrix = Matrix<CycElem>;
