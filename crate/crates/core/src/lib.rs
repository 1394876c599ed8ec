//! Numerical toolkit for tensor products of finite-dimensional ℓp spaces:
//! injective and projective norms, exponent formulas, unit-ball volumes and
//! volume ratios.

pub mod certificate;
pub mod error;
pub mod exponent;
pub mod harness;
pub mod idnorm;
pub mod io;
pub mod lp;
pub mod norm;
pub mod rates;
pub mod sampling;
pub mod space;
pub mod tensor;
pub mod volume;

pub use certificate::NormCertificate;
pub use error::{Error, Result};
pub use exponent::{ExtExponent, Rational};
pub use space::SpaceSpec;
pub use tensor::Tensor;
