//! Numerical checks of the closed forms, geometry predicates and VC
//! arithmetic, reported as pass/fail lines with observed and required values.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::anchor::spectral_anchor;
use crate::error::{Error, Result};
use crate::measurements::{observe, DenseEnsemble, MeasurementEnsemble, NoiseModel};
use crate::metrics::optimal_phase;
use crate::rng::{sample_complex_gaussian, RngStream};
use crate::solver::{solve_phasemax, SolverConfig};
use crate::theory::{
    check_certificate, empirical_pmin, in_c_delta, in_cprime_delta, in_r_delta,
    ln_vc_deviation_bound, negative_branch, nonnegative_branch, pmin_lower_bound,
    rayleigh_normal_cdf, rayleigh_normal_monte_carlo, sample_complexity, sauer_bound,
    sauer_relaxation, uniform_deviation_ratio, vc_deviation_bound, GeometryContext,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ClosedForms,
    Geometry,
    Vc,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-forms" => Ok(Suite::ClosedForms),
            "geometry" => Ok(Suite::Geometry),
            "vc" => Ok(Suite::Vc),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidArgument(format!(
                "unknown suite '{s}' (expected closed-forms, geometry, vc or all)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    LessThan,
    Equal,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::LessThan => "<",
            Relation::Equal => "==",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub observed: f64,
    pub relation: Relation,
    pub required: f64,
    pub passed: bool,
}

impl Check {
    fn new(suite: &'static str, name: String, observed: f64, relation: Relation, required: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => observed <= required,
            Relation::AtLeast => observed >= required,
            Relation::LessThan => observed < required,
            Relation::Equal => observed == required,
        };
        Self { suite, name, observed, relation, required, passed }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} [{}] {}: observed {:.6e} {} {:.6e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.observed,
                c.relation,
                c.required
            );
        }
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            self.checks.len() - self.failures(),
            self.checks.len()
        );
        s
    }
}

/// Sample sizes for the Monte Carlo checks.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyScale {
    pub mc_draws: u64,
    pub pmin_directions: usize,
    pub pmin_measurements: usize,
    pub pmin_dim: usize,
    pub certificate_seeds: u64,
}

impl Default for VerifyScale {
    fn default() -> Self {
        Self {
            mc_draws: 1_000_000,
            pmin_directions: 200,
            pmin_measurements: 100_000,
            pmin_dim: 8,
            certificate_seeds: 20,
        }
    }
}

impl VerifyScale {
    /// Reduced sizes for smoke tests.
    pub fn quick() -> Self {
        Self {
            mc_draws: 100_000,
            pmin_directions: 20,
            pmin_measurements: 5_000,
            pmin_dim: 4,
            certificate_seeds: 5,
        }
    }
}

pub fn run_verify(suite: Suite, seed: u64) -> Result<VerifyReport> {
    run_verify_scaled(suite, seed, &VerifyScale::default())
}

pub fn run_verify_scaled(suite: Suite, seed: u64, scale: &VerifyScale) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if matches!(suite, Suite::ClosedForms | Suite::All) {
        closed_forms(seed, scale, &mut report.checks)?;
    }
    if matches!(suite, Suite::Geometry | Suite::All) {
        geometry(seed, scale, &mut report.checks)?;
    }
    if matches!(suite, Suite::Vc | Suite::All) {
        vc(&mut report.checks)?;
    }
    Ok(report)
}

pub const ALPHA_GRID: [f64; 5] = [-2.0, -0.5, 0.0, 0.5, 2.0];
pub const BETA_GRID: [f64; 5] = [-1.0, -0.1, 0.0, 0.1, 1.0];

fn closed_forms(seed: u64, scale: &VerifyScale, out: &mut Vec<Check>) -> Result<()> {
    const S: &str = "closed-forms";
    let base = RngStream::new(seed, 1);
    for (i, &a) in ALPHA_GRID.iter().enumerate() {
        for (j, &b) in BETA_GRID.iter().enumerate() {
            let mc = rayleigh_normal_monte_carlo(a, b, scale.mc_draws, &base.fork((i * 5 + j) as u64));
            let f = rayleigh_normal_cdf(a, b);
            out.push(Check::new(
                S,
                format!("monte carlo alpha={a} beta={b} |p_mc - p|"),
                (mc.estimate - f).abs(),
                Relation::AtMost,
                4.0 * mc.standard_error_at(f),
            ));
        }
    }

    let gap = (0..=200)
        .map(|i| {
            let a = -10.0 + 0.1 * i as f64;
            (nonnegative_branch(a, 0.0) - negative_branch(a, 0.0)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new(S, "branch gap at beta=0".into(), gap, Relation::AtMost, 1e-12));

    let (delta, t, eta_inv) = (0.9, 10.0, 1e-3);
    let bound = pmin_lower_bound(delta, t)?;
    let mut rng = RngStream::new(seed, 2);
    let xstar = sample_complex_gaussian(scale.pmin_dim, &mut rng)?;
    let ctx = GeometryContext::normalizing(&xstar, delta, t, eta_inv)?;
    let est = empirical_pmin(&ctx, scale.pmin_directions, scale.pmin_measurements, &mut rng)?;
    // Standard error at max(p_hat, bound): the null value when p_hat is below it.
    let margin = est
        .estimates
        .iter()
        .map(|&p| {
            let p_ref = p.max(bound);
            let se = (p_ref * (1.0 - p_ref) / est.num_a as f64).sqrt();
            p - (bound - 4.0 * se)
        })
        .fold(f64::INFINITY, f64::min);
    out.push(Check::new(
        S,
        format!("cut probability minus (pmin bound - 4 se), {} directions", est.estimates.len()),
        margin,
        Relation::AtLeast,
        0.0,
    ));
    Ok(())
}

/// Outcome of the certificate-implies-recovery check on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateOutcome {
    pub all_excluded: bool,
    pub error: f64,
}

/// Draws a noiseless instance at `n = 3`, `m = 30`, rotates `x⋆` so that
/// `a0^* x⋆` is real and positive, samples directions `h ∈ R_δ` with
/// `‖h‖ > error_radius` and reports whether all were certified excluded,
/// together with the solver's distance to `x⋆`.
pub fn certificate_instance(seed: u64, error_radius: f64, samples: usize) -> Result<CertificateOutcome> {
    let (n, m) = (3, 30);
    let mut rng = RngStream::new(seed, 3);
    let x = sample_complex_gaussian(n, &mut rng)?.normalized()?;
    let ens: MeasurementEnsemble = DenseEnsemble::gaussian(n, m, &mut rng)?.into();
    let obs = observe(&ens, &x, NoiseModel::None, &mut rng)?;
    let a0 = spectral_anchor(&ens, &obs, 50, &mut rng)?.a0;
    let xstar = x.scale(optimal_phase(a0.as_slice(), x.as_slice()));
    let delta = crate::anchor::anchor_correlation(&a0, &xstar)?.clamp(0.05, 0.95);
    let ctx = GeometryContext::new(xstar.clone(), delta, 1.0, 0.0)?;

    let mut all_excluded = true;
    let mut taken = 0;
    while taken < samples {
        let dir = sample_complex_gaussian(n, &mut rng)?.normalized()?;
        let h = dir.scale(Complex64::new(error_radius * (1.0 + 3.0 * rng.uniform()), 0.0));
        if !in_r_delta(&h, &ctx)? {
            continue;
        }
        taken += 1;
        if !check_certificate(&h, &a0, &ens, &ctx)?.certified_excluded {
            all_excluded = false;
            break;
        }
    }
    let cfg = SolverConfig {
        max_iters: 20_000,
        ..SolverConfig::default()
    };
    let sol = solve_phasemax(&ens, &obs, &a0, &cfg)?;
    let error = sol.xhat.sub(&xstar)?.norm();
    Ok(CertificateOutcome { all_excluded, error })
}

fn geometry(seed: u64, scale: &VerifyScale, out: &mut Vec<Check>) -> Result<()> {
    const S: &str = "geometry";
    let mut rng = RngStream::new(seed, 4);

    let mut violations = 0usize;
    let mut mismatches = 0usize;
    for k in 0..5000 {
        let delta = 0.05 + 0.9 * (k % 19) as f64 / 18.0;
        let x = sample_complex_gaussian(4, &mut rng)?;
        let ctx = GeometryContext::normalizing(&x, delta, 1.0, 0.0)?;
        let shift = Complex64::new(3.0 * rng.uniform(), 2.0 * rng.standard_normal());
        let y = sample_complex_gaussian(4, &mut rng)?.add(&ctx.xstar().scale(shift))?;
        if in_c_delta(&y, &ctx)? && !in_cprime_delta(&y, &ctx)? {
            violations += 1;
        }
        // R_δ against an explicit projection.
        let c = ctx.xstar().dot(&y)?;
        let perp = y.sub(&ctx.xstar().scale(c))?.norm();
        let rhs = delta * c.im.abs();
        if (perp - rhs).abs() > 1e-9 * (1.0 + rhs) && in_r_delta(&y, &ctx)? != (perp >= rhs) {
            mismatches += 1;
        }
    }
    out.push(Check::new(S, "C_delta outside C'_delta (5000 draws)".into(), violations as f64, Relation::Equal, 0.0));
    out.push(Check::new(S, "R_delta disagreements with projection (5000 draws)".into(), mismatches as f64, Relation::Equal, 0.0));

    let ts = [0.01, 0.1, 1.0, 10.0];
    let increases = ts
        .windows(2)
        .filter(|w| pmin_lower_bound(0.9, w[1]).unwrap() >= pmin_lower_bound(0.9, w[0]).unwrap())
        .count();
    out.push(Check::new(S, "pmin bound increases in t".into(), increases as f64, Relation::Equal, 0.0));

    let radius = 1e-3;
    let tol = 1e-5;
    let mut certified = 0usize;
    let mut broken = 0usize;
    for s in 0..scale.certificate_seeds {
        let o = certificate_instance(seed.wrapping_add(s), radius, 2000)?;
        if o.all_excluded {
            certified += 1;
            if o.error > radius + tol {
                broken += 1;
            }
        }
    }
    out.push(Check::new(
        S,
        format!("certified instances with error > radius ({certified} of {} certified)", scale.certificate_seeds),
        broken as f64,
        Relation::Equal,
        0.0,
    ));
    Ok(())
}

/// Binomial sums by Pascal's triangle in exact integers.
fn pascal_sum(n: u64, d: u64) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row.iter().take(d as usize + 1).sum()
}

pub const SAMPLE_GRID_PMIN: [f64; 3] = [0.01, 0.05, 0.3];
pub const SAMPLE_GRID_N: [u64; 2] = [10, 500];
pub const SAMPLE_GRID_FAILURE: [f64; 2] = [0.1, 0.01];

fn vc(out: &mut Vec<Check>) -> Result<()> {
    const S: &str = "vc";
    out.push(Check::new(S, "sauer_bound(4, 2)".into(), sauer_bound(4, 2), Relation::Equal, 11.0));
    let mut bad_exact = 0;
    let mut bad_relax = 0;
    let mut bad_full = 0;
    for n in 4..=64u64 {
        for d in 2..=8u64 {
            let s = sauer_bound(n, d);
            if n > d {
                bad_exact += usize::from(s != pascal_sum(n, d) as f64);
                bad_relax += usize::from(s > sauer_relaxation(n, d));
            } else {
                bad_full += usize::from(s != 2f64.powi(n as i32));
            }
        }
    }
    out.push(Check::new(S, "sauer sum != binomial sum (n 4..64, d 2..8)".into(), bad_exact as f64, Relation::Equal, 0.0));
    out.push(Check::new(S, "sauer sum > (en/d)^d (n 4..64, d 2..8)".into(), bad_relax as f64, Relation::Equal, 0.0));
    out.push(Check::new(S, "sauer bound != 2^n when n <= d".into(), bad_full as f64, Relation::Equal, 0.0));

    out.push(Check::new(S, "deviation bound at t=0 over 8 shatter".into(), vc_deviation_bound(100, 7.0, 0.0) / 8.0, Relation::Equal, 7.0));
    let e1 = vc_deviation_bound(500, 1.0, 0.1) / 8.0;
    let e2 = vc_deviation_bound(1000, 1.0, 0.1) / 8.0;
    out.push(Check::new(S, "deviation factor squares when n doubles, relative gap".into(), ((e2 - e1 * e1) / e2).abs(), Relation::AtMost, 1e-14));
    // 60-digit reference for n = 1000, shatter = (e 1000 / 64)^64, t = 0.2.
    let frozen: f64 = 8.52994212091657464973315998481467874912557802072306843559183e102;
    let got = ln_vc_deviation_bound(1000, sauer_relaxation(1000, 64).ln(), 0.2).exp();
    out.push(Check::new(S, "deviation bound reference, relative error".into(), ((got - frozen) / frozen).abs(), Relation::AtMost, 1e-12));

    for &p in &SAMPLE_GRID_PMIN {
        for &n in &SAMPLE_GRID_N {
            for &eps in &SAMPLE_GRID_FAILURE {
                let m = sample_complexity(p, n, eps)?;
                out.push(Check::new(
                    S,
                    format!("sufficiency ratio at M={m} (p_min={p}, N={n}, failure_prob={eps})"),
                    uniform_deviation_ratio(m as f64, n, eps),
                    Relation::LessThan,
                    p * p,
                ));
            }
        }
    }
    Ok(())
}
