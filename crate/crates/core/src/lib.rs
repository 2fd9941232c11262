//! Finite truncations of the quantum groups SU_q(2) and U_q(2), the standard
//! Podleś sphere and the SU_q(3) q-Clifford algebra, together with their
//! q-deformed Dirac operators and the numerical checks of their spectral data.
//!
//! Everything numeric is generic over [`scalar::Real`]; [`Hp`] (double-double)
//! is the working precision for identity checks and `f64` is available for
//! quick exploration.

pub mod clifford_su3;
pub mod coordalg;
pub mod dirac_su2;
pub mod error;
pub mod fit;
pub mod half;
pub mod linalg;
pub mod operator;
pub mod podles;
pub mod qscalar;
pub mod scalar;
pub mod spinhilbert;
pub mod uq2;
pub mod uqsu2;

pub use error::{Error, Result};
pub use half::HalfInt;

/// High-precision real scalar (106-bit double-double).
pub type Hp = qd::Quad;
/// Complex scalar at working precision.
pub type HpComplex = num_complex::Complex<Hp>;
pub type QParamHp = qscalar::QParam<Hp>;
pub type OperatorHp = operator::BlockOperator<Hp>;
