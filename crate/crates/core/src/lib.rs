//! Quantum probability spaces for binary variables observed in separate
//! contexts.
//!
//! Given univariate and bivariate marginals of `n` binary variables, this
//! crate checks whether a single classical space can explain them, builds
//! a density matrix `ρ` that reproduces every marginal regardless, and
//! compares outcome rankings derived from `ρ` with those from the
//! conditional-independence approximation.
//!
//! ```
//! use qps::{density, event_matrix, marginals};
//!
//! let set = marginals::MarginalSet::new(vec![0.5; 3], vec![0.45, 0.45, 0.1]).unwrap();
//! let k = event_matrix::build(3).unwrap();
//! let res = density::build_density(&k, &marginals::to_lambda(&set)).unwrap();
//! assert!(res.residual < 1e-9);
//! assert!((res.joint.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod classical;
pub mod cli;
pub mod density;
pub mod event_matrix;
pub mod goldens;
pub mod io;
pub mod marginals;
pub mod ranking;
pub mod report;
pub mod selftest;
pub mod spectral;
