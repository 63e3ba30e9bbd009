use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `sqrt(α² + 1) + α`, without cancellation for large negative `α`.
fn root_plus(alpha: f64) -> f64 {
    let s = alpha.hypot(1.0);
    if alpha >= 0.0 {
        s + alpha
    } else {
        1.0 / (s - alpha)
    }
}

/// `sqrt(α² + 1) − α`, without cancellation for large positive `α`.
fn root_minus(alpha: f64) -> f64 {
    root_plus(-alpha)
}

pub(crate) fn nonnegative_branch(alpha: f64, beta: f64) -> f64 {
    let s = alpha.hypot(1.0);
    1.0 - root_minus(alpha) / (2.0 * s) * (-beta * root_plus(alpha)).exp()
}

pub(crate) fn negative_branch(alpha: f64, beta: f64) -> f64 {
    let s = alpha.hypot(1.0);
    root_plus(alpha) / (2.0 * s) * (beta / root_plus(alpha)).exp()
}

/// `P(α v + β / v > g)` for independent `v ~ Rayleigh(1)` and
/// `g ~ Normal(0, 1)`.
pub fn rayleigh_normal_cdf(alpha: f64, beta: f64) -> f64 {
    let p = if beta >= 0.0 {
        nonnegative_branch(alpha, beta)
    } else {
        negative_branch(alpha, beta)
    };
    p.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub draws: u64,
}

impl MonteCarloEstimate {
    /// Binomial standard error evaluated at probability `p`.
    pub fn standard_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.draws as f64).sqrt()
    }
}

/// Monte Carlo estimate of `P(α v + β / v > g)` from `draws` samples, split
/// into fixed chunks that each use a forked stream so the result does not
/// depend on the thread count.
pub fn rayleigh_normal_monte_carlo(
    alpha: f64,
    beta: f64,
    draws: u64,
    rng: &RngStream,
) -> MonteCarloEstimate {
    const CHUNK: u64 = 1 << 16;
    let chunks = draws.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.fork(c);
            let count = CHUNK.min(draws - c * CHUNK);
            let mut hits = 0u64;
            for _ in 0..count {
                // Inverse-CDF Rayleigh draw: v = sqrt(-2 ln U), U in (0, 1].
                let u = 1.0 - r.uniform();
                let v = (-2.0 * u.ln()).sqrt();
                let g = r.standard_normal();
                if alpha * v + beta / v > g {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    MonteCarloEstimate {
        estimate: hits as f64 / draws.max(1) as f64,
        draws,
    }
}

fn check_pmin_args(delta: f64, t: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Natural log of [`pmin_lower_bound`]; stays finite when the bound
/// underflows.
pub fn ln_pmin_lower_bound(delta: f64, t: f64) -> Result<f64> {
    check_pmin_args(delta, t)?;
    // (1 − sqrt(1 − δ²)) / 2 = δ² / (2 (1 + sqrt(1 − δ²)))
    let prefactor = delta * delta / (2.0 * (1.0 + (1.0 - delta * delta).sqrt()));
    Ok(prefactor.ln() - 2.0 * std::f64::consts::SQRT_2 * t / (delta * delta))
}

/// Lower bound `(1/2 − sqrt(1 − δ²)/2) · exp(−2√2 t / δ²)` on the probability
/// that a complex Gaussian measurement cuts off an error direction.
pub fn pmin_lower_bound(delta: f64, t: f64) -> Result<f64> {
    Ok(ln_pmin_lower_bound(delta, t)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values of E[Φ(α v + β / v)] by adaptive quadrature
    // (scipy.integrate.quad, epsabs 1e-13).
    const QUADRATURE: [(f64, f64, f64); 5] = [
        (0.5, -1.0, 0.3900262946673114),
        (2.0, -1.0, 0.7480401401854343),
        (-2.0, 1.0, 0.25195985981456576),
        (1.0, 0.5, 0.9562034897331168),
        (0.0, -1.0, 0.18393972058572067),
    ];

    #[test]
    fn symmetric_point_is_half() {
        assert_eq!(rayleigh_normal_cdf(0.0, 0.0), 0.5);
    }

    #[test]
    fn matches_quadrature() {
        for (a, b, q) in QUADRATURE {
            assert!((rayleigh_normal_cdf(a, b) - q).abs() <= 1e-12, "({a}, {b})");
        }
        assert!((rayleigh_normal_cdf(0.0, -1.0) - 0.5 * (-1.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn monte_carlo_agrees() {
        let rng = RngStream::new(1234, 0);
        for (a, b) in [(0.0, -1.0), (1.0, 0.5)] {
            let mc = rayleigh_normal_monte_carlo(a, b, 2_000_000, &rng.fork((a * 10.0 + b * 100.0) as u64));
            let f = rayleigh_normal_cdf(a, b);
            let se = mc.standard_error_at(f);
            assert!((mc.estimate - f).abs() <= 4.0 * se, "({a}, {b}): {} vs {f}", mc.estimate);
        }
    }

    #[test]
    fn branches_meet_at_zero() {
        for i in 0..=200 {
            let a = -10.0 + 0.1 * i as f64;
            let d = (nonnegative_branch(a, 0.0) - negative_branch(a, 0.0)).abs();
            assert!(d <= 1e-12, "alpha {a}: {d}");
        }
    }

    #[test]
    fn bounded_and_monotone_on_grid() {
        let grid: Vec<f64> = (0..=80).map(|i| -10.0 + 0.25 * i as f64).collect();
        for &a in &grid {
            let mut prev = -1.0;
            for &b in &grid {
                let p = rayleigh_normal_cdf(a, b);
                assert!((0.0..=1.0).contains(&p));
                assert!(p >= prev - 1e-15, "beta monotonicity at ({a}, {b})");
                prev = p;
            }
        }
        for &b in &grid {
            let mut prev = -1.0;
            for &a in &grid {
                let p = rayleigh_normal_cdf(a, b);
                assert!(p >= prev - 1e-15, "alpha monotonicity at ({a}, {b})");
                prev = p;
            }
        }
    }

    #[test]
    fn pmin_values() {
        // 0.5 e^{-2√2}, evaluated with 50-digit arithmetic (mpmath).
        let frozen = 0.029552873280978118881536629112052841346445906233532;
        assert!((pmin_lower_bound(1.0, 1.0).unwrap() - frozen).abs() <= 1e-16);
        // δ = 0.9, t = 10 underflows nothing but is tiny.
        let frozen = 1.9287171478042554921116326068189552372620164523945e-16;
        let got = pmin_lower_bound(0.9, 10.0).unwrap();
        assert!((got - frozen).abs() <= 1e-12 * frozen);
    }

    #[test]
    fn pmin_limits_and_monotonicity() {
        assert!(pmin_lower_bound(1e-6, 1.0).unwrap() == 0.0);
        assert!(ln_pmin_lower_bound(1e-6, 1.0).unwrap().is_finite());
        let mut prev = f64::INFINITY;
        for t in [0.01, 0.1, 1.0, 2.0, 5.0, 10.0] {
            let p = pmin_lower_bound(0.7, t).unwrap();
            assert!(p < prev && p <= 0.5);
            prev = p;
        }
        assert!(pmin_lower_bound(0.0, 1.0).is_err());
        assert!(pmin_lower_bound(1.1, 1.0).is_err());
        assert!(pmin_lower_bound(0.5, 0.0).is_err());
    }
}
