//! Near-field communication modes between two linear apertures.
//!
//! Models a link between two ideal continuous line apertures in a common
//! plane: a transmit segment of length `L_T` rotated by `θ` about its center,
//! and a receive segment of length `L_R` on the y-axis at horizontal distance
//! `z`, centered at `y_c`. Fields propagate with the scalar free-space Green
//! function `G(r) = e^{−jκr}/(4πr)`, `κ = 2π/λ`.
//!
//! The crate computes, for such a link:
//!
//! * exact communication modes by SVD of the discretized coupling operator
//!   ([`modes::svd_modes`]),
//! * near-orthogonal transmit/receive basis sets built from focusing
//!   functions at nulls of the coupling kernel ([`basis::focusing_basis`]),
//!   plus the closed-form small-aperture (steering) and Fresnel variants,
//! * closed-form degrees-of-freedom counters for parallel, perpendicular and
//!   rotated apertures ([`modes::count_generic`] and friends),
//! * cross-correlation audits, beam patterns and parameter sweeps
//!   ([`analysis`]).
//!
//! Everything is generic over the scalar type through [`Scalar`]; the
//! `f64`-concrete aliases below are the intended entry point for most users.

// Validation guards use `!(x > 0)` so that NaN inputs are rejected; `x <= 0`
// would wave them through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
pub mod em;
pub mod geometry;
pub mod modes;

use num_traits::{FromPrimitive, ToPrimitive};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floating-point scalar the library is generic over.
///
/// `nalgebra::RealField` supplies the transcendentals and lets the same code
/// back the dense eigen/SVD solves; `num_traits` supplies checked conversions
/// to and from literals and counts. Implemented by `f32` and `f64`.
pub trait Scalar:
    nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync + 'static
{
}

/// Convert an `f64` literal into the working scalar type.
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal conversion")
}

/// Convert the working scalar back to `f64` (for counts and serialization).
pub(crate) fn as_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar conversion")
}

/// `e^{jφ}` as a complex number.
pub(crate) fn cis<T: Scalar>(phase: T) -> num_complex::Complex<T> {
    num_complex::Complex::new(phase.cos(), phase.sin())
}

/// Phase of a complex number, radians in (−π, π].
pub(crate) fn carg<T: Scalar>(v: num_complex::Complex<T>) -> T {
    v.im.atan2(v.re)
}

/// Default precision used by the concrete type aliases.
pub type Real = f64;
/// Complex sample at default precision.
pub type Complex64 = num_complex::Complex<f64>;
/// Link description at default precision.
pub type Scenario = geometry::ScenarioGeometry<Real>;
/// Aperture quadrature mesh at default precision.
pub type Mesh = geometry::AntennaMesh<Real>;
/// Complex-valued sampled function at default precision.
pub type Profile = em::SampledProfile<Real>;
/// Basis family at default precision.
pub type Basis = basis::BasisSet<Real>;
/// SVD mode solution at default precision.
pub type Modes = modes::ModeSolution<Real>;
/// Closed-form counter report at default precision.
pub type Counts = modes::ModeCountReport<Real>;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Geometry violates a model invariant (non-positive size, segments too
    /// close, rotation out of range, ...).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    /// Mesh violates a discretization invariant (spacing, compatibility).
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    /// Argument outside the documented domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Operation not defined for this configuration (e.g. the Fresnel
    /// downlink closed form with a rotated transmitter).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
