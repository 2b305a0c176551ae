//! Elliptic dynamical R matrices of types A, B, C, D in the vector
//! representation, the Jimbo-Miwa-Okado face weights, and residual checks for
//! the identities relating them.

pub mod error;
pub mod faceweights;
pub mod liealg;
pub mod linalg;
pub mod qspecial;
pub mod scalar;
pub mod trigr;
pub mod twistor;
pub mod vectorrep;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used by the `f64` aliases.
pub type C64 = num_complex::Complex<f64>;
pub type Spec = liealg::AlgebraSpec<f64>;
pub type Params = qspecial::ModulusParams<f64>;
pub type Weight = liealg::DynamicalWeight<f64>;
pub type Heights = liealg::Height<f64>;
pub type Plaquette = faceweights::FacePlaquette<f64>;
pub type Kappa = faceweights::KappaSpec<f64>;
pub type Matrix = linalg::CMat<f64>;
