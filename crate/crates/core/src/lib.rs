//! Complex-valued kernel adaptive filtering.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernels`]: complex vectors, the real/complex Gaussian, polynomial and
//!   complex linear kernels, Gram matrices and positive-definiteness checks.
//! - [`wirtinger`]: finite-difference Wirtinger (W) and conjugate Wirtinger
//!   (CW) derivatives and a numerical check of the calculus rules.
//! - [`dictionary`]: kernel expansions (centers plus complex coefficients),
//!   RKHS distances and the novelty admission rule.
//! - [`filters`]: streaming NCLMS, widely-linear NCLMS, NCKLMS1 (complexified
//!   real kernels), NCKLMS2 (pure complex kernels) and a dual-channel real KLMS.
//! - [`signals`]: input generator, nonlinear channels, noise and framing.
//! - [`harness`]: Monte-Carlo learning curves, steady-state summaries and CSV
//!   output.

pub mod dictionary;
pub mod error;
pub mod filters;
pub mod harness;
pub mod kernels;
pub mod signals;
pub mod wirtinger;

pub use error::{Error, Result};
pub use num_complex::Complex64;
