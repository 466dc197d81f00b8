//! Gibbs posterior sampling for linear inverse problems with Markov
//! diffusion priors.
//!
//! The observation model is `y = H x0 + e` with `H` a linear operator
//! (identity, periodic convolution, or subsampling mask) and `e` white
//! Gaussian noise. Regularization comes from a variance-preserving
//! diffusion prior over an extended state `x0..xT`; the sampler draws
//! from the joint posterior by sweeping one exact Gaussian block per
//! level:
//!
//! - level 0 conditions on `x1` and the data; for identity/circulant
//!   operators the block is diagonal in the Fourier plane and is drawn
//!   by FFT, otherwise a dense Cholesky factorization is used,
//! - interior levels condition on their two chain neighbors and are
//!   drawn per pixel,
//! - the terminal level is one forward transition.
//!
//! The denoiser that defines the backward mean is pluggable; this crate
//! ships closed-form denoisers for Gaussian and Gaussian-mixture priors
//! so that every conditional, the full chain, and the reported
//! uncertainties can be checked against dense oracles.
//!
//! Modules:
//!
//! - [`schedule`] — variance-preserving noise schedule,
//! - [`operators`] — observation models and the Gaussian likelihood,
//! - [`denoiser`] — backward-mean interface and analytic implementations,
//! - [`diffusion`] — forward noising and ancestral sampling,
//! - [`gibbs`] — the posterior sampler itself,
//! - [`oracle`] — dense closed-form posteriors used for verification,
//! - [`diagnostics`] — traces, autocorrelation, coverage, run reports,
//! - [`config`], [`io`], [`experiment`] — reproducible experiment harness.

pub mod config;
pub mod denoiser;
pub mod diagnostics;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod field;
pub(crate) mod fourier;
pub mod gibbs;
pub mod io;
pub mod operators;
pub mod oracle;
pub mod schedule;

pub use error::{Error, Result};
pub use field::ImageField;
pub use schedule::Schedule;
