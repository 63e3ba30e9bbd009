//! Primal-dual hybrid gradient iteration for the anchored program.
//!
//! With `f(x) = −⟨a0, x⟩` and `g` the indicator of the product of disks
//! `{w : |w_i| <= sqrt(b_i)}`, each step is
//!
//! ```text
//! y  <- y + σ A x̄ ;   y <- y − σ P(y / σ)
//! x' <- x + τ a0 − τ A^* y
//! x̄  <- 2 x' − x
//! ```
//!
//! with `τ σ ‖A‖² = step_scale² < 1`.

use num_complex::Complex64;

use super::max_violation;
use crate::error::{check_len, Error, Result};
use crate::measurements::{operator_norm, MeasurementEnsemble, Observations};
use crate::rng::RngStream;
use crate::signal::{norm_sqr, real_dot, ComplexSignal};

const NORM_SEED: u64 = 0x0005_EED0_F00D;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `‖x_k − x_{k−1}‖ / ‖x_k‖` falls below this ...
    pub tol_rel_change: f64,
    /// ... and the largest constraint violation is below this.
    pub tol_feas: f64,
    /// Fraction of the stability bound `τσ‖A‖² < 1` to use.
    pub step_scale: f64,
    /// Power iterations used to estimate `‖A‖`.
    pub norm_est_iters: usize,
    /// Ratio `τ/σ`. `None` picks `Σ b_i / (4 n ‖a0‖²)`, which makes the
    /// iteration invariant to rescaling of the signal, the operator and the
    /// anchor. `Some(1.0)` gives equal primal and dual steps.
    pub primal_weight: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol_rel_change: 1e-9,
            tol_feas: 1e-9,
            step_scale: 0.95,
            norm_est_iters: 30,
            primal_weight: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        if !(self.tol_rel_change > 0.0 && self.tol_feas > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.step_scale > 0.0 && self.step_scale < 1.0) {
            return bad("step_scale must lie in (0, 1)");
        }
        if self.norm_est_iters < 1 {
            return bad("norm_est_iters must be at least 1");
        }
        if let Some(w) = self.primal_weight {
            if !(w.is_finite() && w > 0.0) {
                return bad("primal_weight must be finite and positive");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub xhat: ComplexSignal,
    pub iters_used: usize,
    /// `⟨a0, xhat⟩`.
    pub objective: f64,
    /// `max_i (|a_i^* xhat|² − b_i)₊`.
    pub feas_residual: f64,
    pub converged: bool,
    /// Forward plus adjoint applications, including norm estimation.
    pub operator_applications: usize,
    pub op_norm: f64,
}

/// Projection onto the closed disk `{w : |w| <= r}`.
pub fn disk_project(z: Complex64, r: f64) -> Complex64 {
    debug_assert!(r >= 0.0);
    let m = z.norm();
    if m <= r {
        z
    } else if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z * (r / m)
    }
}

pub fn solve_phasemax(
    ens: &MeasurementEnsemble,
    obs: &Observations,
    a0: &ComplexSignal,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let (n, m) = (ens.n(), ens.m());
    if m == 0 {
        return Err(Error::InvalidArgument(
            "no constraints: the program is unbounded".into(),
        ));
    }
    check_len(m, obs.len())?;
    check_len(n, a0.len())?;
    let b = obs.values();
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("observations"));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("observations must be non-negative".into()));
    }
    let a0_sq = a0.norm_sqr();
    if a0_sq == 0.0 {
        return Err(Error::ZeroVector("anchor"));
    }

    let op_norm = operator_norm(ens, cfg.norm_est_iters, &mut RngStream::new(NORM_SEED, 0))?;
    if op_norm == 0.0 {
        return Err(Error::Degenerate("measurement operator is zero".into()));
    }
    let mut applications = 2 * cfg.norm_est_iters + 1;

    let weight = cfg.primal_weight.unwrap_or_else(|| {
        let w = b.iter().sum::<f64>() / (4.0 * n as f64 * a0_sq);
        if w > 0.0 && w.is_finite() {
            w
        } else {
            1.0
        }
    });
    let tau = cfg.step_scale * weight.sqrt() / op_norm;
    let sigma = cfg.step_scale / (weight.sqrt() * op_norm);

    let radii: Vec<f64> = b.iter().map(|v| v.sqrt()).collect();
    let a0 = a0.as_slice();
    let zero = Complex64::new(0.0, 0.0);

    let mut x = vec![zero; n];
    let mut x_next = vec![zero; n];
    let mut x_bar = vec![zero; n];
    let mut aty = vec![zero; n];
    let mut y = vec![zero; m];
    let mut ax_bar = vec![zero; m];
    // A x_{k-1}, kept from A x̄ via A x_k = (A x̄_k + A x_{k-1}) / 2.
    let mut ax_prev = vec![zero; m];
    let mut ax = vec![zero; m];
    let mut rel_change = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0;

    for k in 0..cfg.max_iters {
        ens.forward_into(&x_bar, &mut ax_bar);
        applications += 1;
        if k == 0 {
            ax.copy_from_slice(&ax_bar);
        } else {
            for ((a, &ab), &ap) in ax.iter_mut().zip(&ax_bar).zip(&ax_prev) {
                *a = (ab + ap) * 0.5;
            }
            if rel_change <= cfg.tol_rel_change && max_violation(&ax, b) <= cfg.tol_feas {
                converged = true;
                break;
            }
        }

        for ((yi, &ab), &r) in y.iter_mut().zip(&ax_bar).zip(&radii) {
            let v = *yi + ab * sigma;
            *yi = v - disk_project(v / sigma, r) * sigma;
        }

        ens.adjoint_into(&y, &mut aty);
        applications += 1;
        let mut diff_sq = 0.0;
        for ((xn, &xo), (&a, &g)) in x_next.iter_mut().zip(&x).zip(a0.iter().zip(&aty)) {
            *xn = xo + (a - g) * tau;
            diff_sq += (*xn - xo).norm_sqr();
        }
        rel_change = diff_sq.sqrt() / norm_sqr(&x_next).sqrt().max(f64::MIN_POSITIVE);
        for ((xb, &xn), &xo) in x_bar.iter_mut().zip(&x_next).zip(&x) {
            *xb = xn * 2.0 - xo;
        }
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut ax_prev, &mut ax);
        iters = k + 1;
    }

    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("solver iterate"));
    }
    ens.forward_into(&x, &mut ax);
    applications += 1;
    let feas_residual = max_violation(&ax, b);
    let objective = real_dot(a0, &x);
    Ok(Solution {
        xhat: ComplexSignal::new(x)?,
        iters_used: iters,
        objective,
        feas_residual,
        converged: converged && feas_residual <= cfg.tol_feas,
        operator_applications: applications,
        op_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::spectral_anchor;
    use crate::measurements::{observe, DenseEnsemble, NoiseModel};
    use crate::metrics::phase_align_error;
    use crate::rng::sample_complex_gaussian;
    use crate::signal::cdot;
    use std::f64::consts::PI;

    #[test]
    fn disk_project_cases() {
        let z = Complex64::new(0.3, -0.4);
        assert_eq!(disk_project(z, 1.0), z);
        assert_eq!(disk_project(z, 0.5), z);
        let far = Complex64::from_polar(4.0, 1.2);
        let p = disk_project(far, 2.0);
        assert!((p - Complex64::from_polar(2.0, 1.2)).norm() < 1e-15);
        assert_eq!(disk_project(far, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn disk_project_polar_oracle() {
        let mut rng = RngStream::new(77, 0);
        for _ in 0..1000 {
            let z = rng.complex_gaussian() * 3.0;
            let r = rng.uniform() * 3.0;
            let p = disk_project(z, r);
            assert!((p.norm() - z.norm().min(r)).abs() <= 1e-14);
            if z.norm() > 0.0 && p.norm() > 0.0 {
                let d = (p.arg() - z.arg()).rem_euclid(2.0 * PI);
                assert!(d.min(2.0 * PI - d) <= 1e-14);
            }
        }
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SolverConfig { max_iters: 0, ..ok.clone() },
            SolverConfig { tol_feas: 0.0, ..ok.clone() },
            SolverConfig { step_scale: 1.0, ..ok.clone() },
            SolverConfig { norm_est_iters: 0, ..ok.clone() },
            SolverConfig { primal_weight: Some(-1.0), ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    fn instance(seed: u64, n: usize, m: usize) -> (MeasurementEnsemble, ComplexSignal, Observations) {
        let mut rng = RngStream::new(seed, 0);
        let ens: MeasurementEnsemble = DenseEnsemble::gaussian(n, m, &mut rng).unwrap().into();
        let xs = sample_complex_gaussian(n, &mut rng).unwrap();
        let obs = observe(&ens, &xs, NoiseModel::None, &mut rng).unwrap();
        (ens, xs, obs)
    }

    #[test]
    fn rejects_bad_inputs() {
        let (ens, xs, obs) = instance(1, 4, 20);
        let cfg = SolverConfig::default();
        assert!(matches!(
            solve_phasemax(&ens, &obs, &ComplexSignal::zeros(4), &cfg),
            Err(Error::ZeroVector(_))
        ));
        let short = Observations::from_values(vec![1.0; 19]).unwrap();
        assert!(solve_phasemax(&ens, &short, &xs, &cfg).is_err());

        let empty: MeasurementEnsemble =
            DenseEnsemble::gaussian(4, 0, &mut RngStream::new(0, 0)).unwrap().into();
        let none = Observations::from_values(vec![]).unwrap();
        assert!(solve_phasemax(&empty, &none, &xs, &cfg).is_err());
    }

    #[test]
    fn recovers_with_true_anchor() {
        let (ens, xs, obs) = instance(5, 16, 160);
        let a0 = xs.normalized().unwrap();
        let sol = solve_phasemax(&ens, &obs, &a0, &SolverConfig::default()).unwrap();
        assert!(sol.converged, "{sol:?}");
        assert!(phase_align_error(&sol.xhat, &xs).unwrap() < 1e-6);
        assert!(sol.feas_residual <= 1e-9);
    }

    #[test]
    fn objective_dominates_truth_and_solution_is_real_aligned() {
        let (ens, xs, obs) = instance(6, 12, 120);
        let mut rng = RngStream::new(6, 1);
        let a0 = spectral_anchor(&ens, &obs, 50, &mut rng).unwrap().a0;
        let cfg = SolverConfig::default();
        let sol = solve_phasemax(&ens, &obs, &a0, &cfg).unwrap();
        assert!(sol.converged);
        let truth_value = cdot(a0.as_slice(), xs.as_slice()).norm();
        let eps = cfg.tol_feas * ens.m() as f64 + cfg.tol_rel_change * a0.norm();
        assert!(sol.objective >= truth_value - eps - 1e-9 * truth_value);
        let im = cdot(a0.as_slice(), sol.xhat.as_slice()).im;
        assert!(im.abs() <= 1e-6 * a0.norm() * sol.xhat.norm());
    }

    #[test]
    fn anchor_phase_does_not_change_error() {
        let (ens, xs, obs) = instance(7, 10, 100);
        let a0 = xs.add(&sample_complex_gaussian(10, &mut RngStream::new(1, 1)).unwrap())
            .unwrap()
            .normalized()
            .unwrap();
        let cfg = SolverConfig::default();
        let s1 = solve_phasemax(&ens, &obs, &a0, &cfg).unwrap();
        let s2 = solve_phasemax(&ens, &obs, &a0.scale(Complex64::from_polar(1.0, 2.0)), &cfg).unwrap();
        let e1 = phase_align_error(&s1.xhat, &xs).unwrap();
        let e2 = phase_align_error(&s2.xhat, &xs).unwrap();
        assert!((e1 - e2).abs() <= 1e-6, "{e1} vs {e2}");
    }

    #[test]
    fn deterministic() {
        let (ens, xs, obs) = instance(8, 8, 64);
        let a0 = xs.normalized().unwrap();
        let cfg = SolverConfig::default();
        let s1 = solve_phasemax(&ens, &obs, &a0, &cfg).unwrap();
        let s2 = solve_phasemax(&ens, &obs, &a0, &cfg).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn equal_steps_still_converge() {
        let (ens, xs, obs) = instance(9, 8, 80);
        let a0 = xs.normalized().unwrap();
        let cfg = SolverConfig {
            max_iters: 20_000,
            primal_weight: Some(1.0),
            ..SolverConfig::default()
        };
        let sol = solve_phasemax(&ens, &obs, &a0, &cfg).unwrap();
        assert!(phase_align_error(&sol.xhat, &xs).unwrap() < 1e-6);
    }

    #[test]
    fn zero_radius_constraints_are_kept() {
        let (ens, xs, obs) = instance(10, 6, 60);
        let mut b = obs.values().to_vec();
        b[0] = 0.0;
        let obs = Observations::from_values(b).unwrap();
        let cfg = SolverConfig {
            max_iters: 20_000,
            ..SolverConfig::default()
        };
        let sol = solve_phasemax(&ens, &obs, &xs.normalized().unwrap(), &cfg).unwrap();
        let ax = ens.forward(&sol.xhat).unwrap();
        assert!(sol.converged);
        assert!(ax[0].norm_sqr() <= 1e-8);
    }
}
