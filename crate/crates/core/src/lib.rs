//! Dixonian elliptic functions `sm` and `cm`.
//!
//! `sm` and `cm` solve `cm' = -sm²`, `sm' = cm²` with `cm(0) = 1`, `sm(0) = 0`,
//! parametrize the Fermat cubic `x³ + y³ = 1`, and are elliptic with period
//! lattice generated by `3K` and `3Kγ` where `γ = exp(2πi/3)`.
//!
//! Evaluation starts from exact Taylor coefficients about the origin and
//! reaches the rest of the plane through lattice reduction, the three-fold
//! rotation symmetry, translation by `2K` near poles, and repeated
//! duplication.
//!
//! ```
//! use dixon::{Complex, EllipticValue};
//!
//! let k = dixon::constants().k;
//! let s = dixon::sm(Complex::new(k, 0.0)).unwrap();
//! assert!((s.finite().unwrap() - 1.0).norm() < 1e-12);
//! assert!(matches!(dixon::sm(Complex::new(-k, 0.0)).unwrap(), EllipticValue::Pole { .. }));
//! ```

pub mod cli;
pub mod constants;
mod error;
pub mod evaluator;
pub mod identities;
pub mod inverse;
pub mod par;
pub mod quadrature;
pub mod render;
pub mod selftest;
pub mod series;

pub use constants::DixonConstants;
pub use error::{Error, Result};
pub use evaluator::{EllipticValue, Evaluator, LatticeReduction};
pub use identities::{FunctionPair, WeierstrassValue};
pub use inverse::{sm_inverse, InverseResult};

/// The scalar type used throughout.
pub type Complex = num_complex::Complex64;

/// Constants of the default evaluator.
pub fn constants() -> &'static DixonConstants {
    Evaluator::global().constants()
}

/// `sm(z)` using the default evaluator.
pub fn sm(z: Complex) -> Result<EllipticValue> {
    Evaluator::global().sm(z)
}

/// `cm(z)` using the default evaluator.
pub fn cm(z: Complex) -> Result<EllipticValue> {
    Evaluator::global().cm(z)
}

/// Both functions at once using the default evaluator.
pub fn sm_cm(z: Complex) -> Result<(EllipticValue, EllipticValue)> {
    Evaluator::global().sm_cm(z)
}

/// Weierstrass `℘(z)` for `g₂ = 0`, `g₃ = 1/27` using the default evaluator.
pub fn wp(z: Complex) -> Result<EllipticValue> {
    Evaluator::global().wp(z)
}
