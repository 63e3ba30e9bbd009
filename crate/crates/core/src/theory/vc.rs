use crate::error::{Error, Result};

/// Sharp Sauer–Shelah bound `min(Σ_{i<=d} C(n, i), 2^n)` on the shatter
/// coefficient of a class with VC dimension `d`.
pub fn sauer_bound(n: u64, d: u64) -> f64 {
    if n <= d {
        return 2f64.powi(n.min(i32::MAX as u64) as i32);
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for i in 0..d {
        term = term * (n - i) as f64 / (i + 1) as f64;
        sum += term;
    }
    sum.min(2f64.powf(n as f64))
}

/// The relaxation `(e n / d)^d`.
pub fn sauer_relaxation(n: u64, d: u64) -> f64 {
    let (n, d) = (n as f64, d as f64);
    (std::f64::consts::E * n / d).powf(d)
}

/// `ln(8 · shatter · e^{−n t² / 8})` from the log of the shatter coefficient.
pub fn ln_vc_deviation_bound(n: u64, ln_shatter: f64, t: f64) -> f64 {
    8f64.ln() + ln_shatter - n as f64 * t * t / 8.0
}

/// `8 · shatter · e^{−n t² / 8}`. May exceed 1.
pub fn vc_deviation_bound(n: u64, shatter: f64, t: f64) -> f64 {
    8.0 * shatter * (-(n as f64) * t * t / 8.0).exp()
}

fn check_sample_args(p_min: f64, n_dim: u64, failure_prob: f64) -> Result<()> {
    if !(p_min > 0.0 && p_min < 1.0) {
        return Err(Error::InvalidArgument(format!("p_min must lie in (0, 1), got {p_min}")));
    }
    if n_dim < 1 {
        return Err(Error::InvalidArgument("n_dim must be at least 1".into()));
    }
    if !(failure_prob > 0.0 && failure_prob < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "failure_prob must lie in (0, 1), got {failure_prob}"
        )));
    }
    Ok(())
}

/// `M = (8 / p²)(2 c N + 2 ln(8/ε))` with `c = 2 ln(8e / p²)`, before rounding.
pub fn sample_complexity_real(p_min: f64, n_dim: u64, failure_prob: f64) -> Result<f64> {
    check_sample_args(p_min, n_dim, failure_prob)?;
    let p2 = p_min * p_min;
    let c = 2.0 * (8.0 * std::f64::consts::E / p2).ln();
    Ok(8.0 / p2 * (2.0 * c * n_dim as f64 + 2.0 * (8.0 / failure_prob).ln()))
}

/// Number of measurements `⌈M⌉` sufficient for recovery with probability
/// at least `1 − failure_prob`.
pub fn sample_complexity(p_min: f64, n_dim: u64, failure_prob: f64) -> Result<u128> {
    let m = sample_complexity_real(p_min, n_dim, failure_prob)?;
    if !(m < u128::MAX as f64) {
        return Err(Error::InvalidArgument(format!("sample complexity {m:e} overflows")));
    }
    Ok(m.ceil() as u128)
}

/// `(16 N ln(e M / 2N) + 8 ln(8/ε)) / M`; `M` suffices once this drops
/// below `p_min²`.
pub fn uniform_deviation_ratio(m: f64, n_dim: u64, failure_prob: f64) -> f64 {
    let n = n_dim as f64;
    (16.0 * n * (std::f64::consts::E * m / (2.0 * n)).ln() + 8.0 * (8.0 / failure_prob).ln()) / m
}
