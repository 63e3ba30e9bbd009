use rayon::prelude::*;

use super::geometry::{in_cprime_delta, in_r_delta, GeometryContext};
use crate::error::{check_len, Error, Result};
use crate::rng::{sample_complex_gaussian, RngStream};
use crate::signal::ComplexSignal;

/// Per-direction probability estimates from [`empirical_pmin`].
#[derive(Clone, Debug, PartialEq)]
pub struct PminEstimate {
    pub min: f64,
    pub estimates: Vec<f64>,
    pub directions: Vec<ComplexSignal>,
    pub num_a: usize,
    /// Candidate directions drawn, including rejected ones.
    pub attempts: usize,
}

const MAX_ATTEMPTS_PER_DIRECTION: usize = 1000;

/// Fraction of `num_a` complex Gaussian draws `a` with
/// `Re(conj(a^* x⋆) · a^* h) > η⁻¹ / 2`.
pub fn cut_probability(
    h: &ComplexSignal,
    ctx: &GeometryContext,
    num_a: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    check_len(ctx.n(), h.len())?;
    if num_a < 1 {
        return Err(Error::InvalidArgument("num_a must be at least 1".into()));
    }
    let x = ctx.xstar().as_slice();
    let h = h.as_slice();
    let half = 0.5 * ctx.eta_inv;
    let mut hits = 0usize;
    for _ in 0..num_a {
        let mut ax = num_complex::Complex64::new(0.0, 0.0);
        let mut ah = ax;
        for (xk, hk) in x.iter().zip(h) {
            let a = rng.complex_gaussian().conj();
            ax += a * xk;
            ah += a * hk;
        }
        if (ax.conj() * ah).re > half {
            hits += 1;
        }
    }
    Ok(hits as f64 / num_a as f64)
}

/// Rejection-samples `num_h` directions in `C'_δ ∩ R_δ` at norm
/// `(1 + 1e-6) (tη)⁻¹` and estimates each one's cut probability from
/// `num_a` fresh measurements. Direction `j` uses the stream
/// `rng.fork(j)`, so the result is independent of scheduling.
pub fn empirical_pmin(
    ctx: &GeometryContext,
    num_h: usize,
    num_a: usize,
    rng: &mut RngStream,
) -> Result<PminEstimate> {
    if num_h < 1 || num_a < 1 {
        return Err(Error::InvalidArgument("num_h and num_a must be at least 1".into()));
    }
    let radius = if ctx.eta_inv > 0.0 {
        (1.0 + 1e-6) * ctx.error_radius()
    } else {
        1.0
    };
    let mut directions = Vec::with_capacity(num_h);
    let mut attempts = 0;
    while directions.len() < num_h {
        if attempts >= MAX_ATTEMPTS_PER_DIRECTION * num_h {
            return Err(Error::Degenerate(format!(
                "only {} of {num_h} directions accepted after {attempts} draws",
                directions.len()
            )));
        }
        attempts += 1;
        let g = sample_complex_gaussian(ctx.n(), rng)?;
        let Ok(unit) = g.normalized() else { continue };
        let h = unit.scale(num_complex::Complex64::new(radius, 0.0));
        if in_cprime_delta(&h, ctx)? && in_r_delta(&h, ctx)? {
            directions.push(h);
        }
    }
    let base = rng.clone();
    let estimates = directions
        .par_iter()
        .enumerate()
        .map(|(j, h)| cut_probability(h, ctx, num_a, &mut base.fork(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let min = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PminEstimate {
        min,
        estimates,
        directions,
        num_a,
        attempts,
    })
}
