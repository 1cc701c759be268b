//! Tomograms and photon statistics of one-mode Gaussian light.
//!
//! A state is described by its quadrature means and covariance matrix
//! ([`GaussianState`]). From it the crate computes optical and symplectic
//! tomograms, the photon-number distribution, and photon-number tomograms,
//! and transforms optical tomograms (closed form, tabulated or simulated)
//! into photon statistics.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod gaussian_state;
pub mod homodyne;
pub mod photon_statistics;
pub mod pnt_transform;
pub mod polynomials;
pub mod quadrature;
pub mod tomograms;

pub use error::{Error, Result};
pub use gaussian_state::{CovarianceMatrix, GaussianState, PhaseSpacePoint};
pub use photon_statistics::{DisplacementAmplitude, PhotonDistribution};
pub use quadrature::QuadratureSpec;
pub use tomograms::{GaussianTomogram, OpticalTomogram, SymplecticFrame, SymplecticTomogram, TomogramTable};
