//! # hararms
//!
//! Adaptive rejection samplers for univariate and multivariate targets:
//!
//! - [`hull`]: piecewise-linear log-scale hulls (ARS and ARMS flavours),
//!   their log-space integrals, and sampling from `exp(h) / M`.
//! - [`samplers`]: ARS, Metropolis-Hastings, univariate ARMS, ARMS inside a
//!   Gibbs sweep, and hit-and-run ARMS (HARARMS), which runs ARMS along a
//!   uniformly random line through the current point.
//! - [`targets`]: the target-density contract, Gaussian mixtures and line
//!   restrictions.
//! - [`spline`]: truncated-power-basis regression splines and the profile
//!   log-likelihood of the knot locations.
//! - [`experiments`]: synthetic datasets, likelihood grid scans, the mixture
//!   comparison, free-knot fits and AIC/BIC model selection.
//!
//! ```
//! use hararms::samplers::{run_chain, SamplerConfig, SamplerKind};
//! use hararms::targets::{BoundingBox, GaussianMixture, MixtureSpec};
//!
//! let target = GaussianMixture::new(
//!     MixtureSpec::four_modes(),
//!     Some(BoundingBox::cube(2, -30.0, 30.0).unwrap()),
//! )
//! .unwrap();
//! let config = SamplerConfig { n_iterations: 200, burn_in: 20, seed: 1, ..Default::default() };
//! let out = run_chain(SamplerKind::Hararms, &target, &config, &[5.0, 5.0]).unwrap();
//! assert_eq!(out.samples.len(), 180);
//! ```

pub mod error;
pub mod experiments;
pub mod hull;
pub mod interval;
pub mod math;
pub mod samplers;
pub mod spline;
pub mod targets;

pub use error::{Error, Result};
pub use interval::Interval;
