//! Error metrics that quotient out the global phase.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::signal::{cdot, ComplexSignal};

/// Unit-modulus `ω` minimizing `‖xhat − ω·xstar‖₂`, i.e. the phase of
/// `xstar^* xhat`. When `xstar^* xhat = 0` every phase is optimal and `1` is
/// returned.
pub fn optimal_phase(xhat: &[Complex64], xstar: &[Complex64]) -> Complex64 {
    let c = cdot(xstar, xhat);
    let m = c.norm();
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        c / m
    }
}

/// Relative error `min_φ ‖xhat − e^{iφ} xstar‖₂ / ‖xstar‖₂`.
pub fn phase_align_error(xhat: &ComplexSignal, xstar: &ComplexSignal) -> Result<f64> {
    check_len(xstar.len(), xhat.len())?;
    let ref_norm = xstar.norm();
    if ref_norm == 0.0 {
        return Err(Error::ZeroVector("reference signal"));
    }
    let w = optimal_phase(xhat.as_slice(), xstar.as_slice());
    let resid: f64 = xhat
        .iter()
        .zip(xstar.iter())
        .map(|(a, b)| (a - w * b).norm_sqr())
        .sum();
    Ok(resid.sqrt() / ref_norm)
}

/// Returns `xhat` rotated by the global phase that best aligns it with
/// `xstar`.
pub fn align_to(xhat: &ComplexSignal, xstar: &ComplexSignal) -> Result<ComplexSignal> {
    check_len(xstar.len(), xhat.len())?;
    let w = optimal_phase(xhat.as_slice(), xstar.as_slice());
    Ok(xhat.scale(w.conj()))
}
