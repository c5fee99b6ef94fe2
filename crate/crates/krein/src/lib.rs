//! Spectral-data machinery for reflectionless Jacobi matrices.
//!
//! A whole-line Jacobi matrix J with `‖J‖ ≤ R` is encoded by its Krein
//! function ξ (a `[0,1]`-valued function on (-R, R), here piecewise constant)
//! together with a half-line spectral measure ν₊. This crate implements both
//! directions of that encoding and the constructions built on top of it:
//!
//! - [`sets`]: finite gap sets and the metrics h, |·Δ·|, δ;
//! - [`krein`]: closed-form evaluation of H(z) from ξ, boundary values,
//!   Hilbert transforms, atom weights, and measure extraction;
//! - [`measures`]: spectral measures, Stieltjes transforms, the ν₊/ν₋
//!   splitting, and a weak-* metric;
//! - [`spectral`]: Green functions of coefficient windows, torus coordinates
//!   (μ, σ) for the reflectionless operators with spectrum in K, half-line
//!   reconstruction, and the reflectionless verifier;
//! - [`approx`]: gap subdivision with small bands, Krein-function averaging,
//!   point-mass splitting, the finite-gap approximation pipeline, and data
//!   transport between nearby sets;
//! - [`toda`]: polynomial Toda flows on periodic operators with discriminant
//!   band structure.

pub mod approx;
pub mod chebyshev;
pub mod config;
pub mod error;
pub mod krein;
pub mod measures;
pub mod sets;
pub mod spectral;
pub mod toda;

mod floquet;

pub use config::Config;
pub use error::{Error, Result};
pub use krein::KreinFunction;
pub use measures::{AcBand, SpectralMeasure, SplitSpec};
pub use sets::{FiniteGapSet, Interval};
pub use spectral::{Boundary, JacobiMatrix, TorusPoint};
pub use toda::PeriodicJacobi;
