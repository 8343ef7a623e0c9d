//! Reduced biquaternion matrix computations and the equality-constrained
//! least squares problem `min ||AX - B||_F s.t. CX = D` with reduced
//! biquaternion data, solved for real or complex `X` through the real and
//! complex representations.

pub mod error;
pub mod field;
pub mod flops;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod lse;
pub mod perturbation;
pub mod rbq;
pub mod repr;
pub mod solver;

pub use error::{Error, Result};
pub use field::FieldMatrix;
pub use lse::{lse_oracle, solve_lse, LseInstance, LseSolution};
pub use perturbation::{bound_complex, bound_real, measure_eps, perturb, PerturbationReport, PerturbationSpec};
pub use rbq::{RBMatrix, RBScalar};
pub use solver::{residual_metrics, solve_complex, solve_real, Mode, RblseProblem, RblseSolution};
