//! Anchored convex phase retrieval.
//!
//! Recovers a complex signal `x` (up to a global phase) from phaseless
//! measurements `b_i = |a_i^* x|^2 + noise` by solving
//!
//! ```text
//! maximize  Re(a0^* x)   subject to  |a_i^* x|^2 <= b_i
//! ```
//!
//! where `a0` is an anchor vector correlated with the target. The crate
//! provides the measurement operators (dense Gaussian and coded diffraction),
//! a spectral anchor, a primal-dual solver for the program, closed-form
//! probability and VC-style bounds from the accompanying analysis, and the
//! experiment drivers used by the `phasemax` command-line tool.

pub mod anchor;
pub mod error;
pub mod experiments;
pub mod measurements;
pub mod metrics;
pub mod rng;
pub mod signal;
pub mod solver;
pub mod theory;

pub use anchor::{anchor_correlation, constant_anchor, spectral_anchor, AnchorReport};
pub use error::{Error, Result};
pub use measurements::{
    CodedDiffraction, DenseEnsemble, MeasurementEnsemble, NoiseModel, Observations,
};
pub use metrics::phase_align_error;
pub use rng::RngStream;
pub use signal::{real_inner, ComplexSignal};
pub use solver::{feasibility_residual, solve_phasemax, Solution, SolverConfig};

pub use num_complex::Complex64;
