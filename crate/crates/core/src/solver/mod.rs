//! Solver for the anchored program
//!
//! ```text
//! maximize ⟨a0, x⟩  subject to  |(A x)_i| <= sqrt(b_i)
//! ```
//!
//! plus feasibility diagnostics and a brute-force oracle for tiny real
//! instances.

mod oracle;
mod pdhg;

pub use oracle::{oracle_grid_search, oracle_solve_small, oracle_vertex_enumeration};
pub use pdhg::{disk_project, solve_phasemax, Solution, SolverConfig};

use crate::error::{check_len, Result};
use crate::measurements::{MeasurementEnsemble, Observations};
use crate::signal::ComplexSignal;

/// `max_i (|(A x)_i|^2 − b_i)₊`.
pub fn feasibility_residual(
    ens: &MeasurementEnsemble,
    obs: &Observations,
    x: &ComplexSignal,
) -> Result<f64> {
    check_len(ens.m(), obs.len())?;
    let ax = ens.forward(x)?;
    Ok(max_violation(ax.as_slice(), obs.values()))
}

pub(crate) fn max_violation(ax: &[num_complex::Complex64], b: &[f64]) -> f64 {
    ax.iter()
        .zip(b)
        .map(|(z, &bi)| z.norm_sqr() - bi)
        .fold(0.0, f64::max)
}
