//! Anchor vectors: the constant anchor for non-negative signals and the
//! spectral anchor, the principal eigenvector of
//! `Σ = (1/M) Σ_i b_i a_i a_i^*`.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::measurements::{normalize, MeasurementEnsemble, Observations};
use crate::rng::RngStream;
use crate::signal::{cdot, real_dot, ComplexSignal};

#[derive(Clone, Debug)]
pub struct AnchorReport {
    /// Unit-norm anchor.
    pub a0: ComplexSignal,
    pub power_iters: usize,
    /// `⟨v, Σ v⟩` at exit; estimates the top eigenvalue of `Σ`.
    pub rayleigh_quotient: f64,
    /// Rayleigh quotient of each iterate, starting with the random start.
    pub rayleigh_history: Vec<f64>,
}

/// Power method on `Σ`, applied matrix-free as `v ↦ A^*(b ∘ A v) / M`.
pub fn spectral_anchor(
    ens: &MeasurementEnsemble,
    obs: &Observations,
    iters: usize,
    rng: &mut RngStream,
) -> Result<AnchorReport> {
    if iters < 1 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    check_len(ens.m(), obs.len())?;
    let b = obs.values();
    if b.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(
            "all measurements are zero; Σ has no principal direction".into(),
        ));
    }
    let inv_m = 1.0 / ens.m() as f64;
    let n = ens.n();
    let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_gaussian()).collect();
    normalize(&mut v);
    let mut av = vec![Complex64::new(0.0, 0.0); ens.m()];
    let mut sv = vec![Complex64::new(0.0, 0.0); n];

    let mut apply = |v: &[Complex64], sv: &mut [Complex64]| {
        ens.forward_into(v, &mut av);
        av.iter_mut().zip(b).for_each(|(z, &bi)| *z *= bi * inv_m);
        ens.adjoint_into(&av, sv);
    };

    let mut history = Vec::with_capacity(iters + 1);
    apply(&v, &mut sv);
    history.push(real_dot(&v, &sv));
    for _ in 0..iters {
        std::mem::swap(&mut v, &mut sv);
        if normalize(&mut v) == 0.0 {
            return Err(Error::Degenerate(
                "power iterate vanished; start vector orthogonal to the range of Σ".into(),
            ));
        }
        apply(&v, &mut sv);
        history.push(real_dot(&v, &sv));
    }
    Ok(AnchorReport {
        a0: ComplexSignal::new(v)?,
        power_iters: iters,
        rayleigh_quotient: *history.last().unwrap(),
        rayleigh_history: history,
    })
}

/// `|a0^* xstar| / (‖a0‖ ‖xstar‖)`, in `[0, 1]`.
pub fn anchor_correlation(a0: &ComplexSignal, xstar: &ComplexSignal) -> Result<f64> {
    check_len(a0.len(), xstar.len())?;
    let na = a0.norm();
    let nx = xstar.norm();
    if na == 0.0 {
        return Err(Error::ZeroVector("anchor"));
    }
    if nx == 0.0 {
        return Err(Error::ZeroVector("signal"));
    }
    Ok((cdot(a0.as_slice(), xstar.as_slice()).norm() / (na * nx)).min(1.0))
}

/// `1/sqrt(n)` in every entry; suited to non-negative signals.
pub fn constant_anchor(n: usize) -> Result<ComplexSignal> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let v = 1.0 / (n as f64).sqrt();
    Ok(ComplexSignal::from_vec_unchecked(vec![Complex64::new(v, 0.0); n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{observe, DenseEnsemble, NoiseModel};
    use crate::rng::sample_complex_gaussian;

    #[test]
    fn constant_anchor_entries() {
        let a = constant_anchor(4).unwrap();
        assert!(a.iter().all(|z| *z == Complex64::new(0.5, 0.0)));
        for n in [1, 7, 100] {
            assert!((constant_anchor(n).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(constant_anchor(0).is_err());
    }

    #[test]
    fn constant_anchor_correlation_is_l1_ratio() {
        let xs = ComplexSignal::from_real(&[0.0, 1.0, 2.0, 0.5, 3.0]).unwrap();
        let l1: f64 = xs.iter().map(|z| z.re).sum();
        let expect = l1 / ((5f64).sqrt() * xs.norm());
        let got = anchor_correlation(&constant_anchor(5).unwrap(), &xs).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn correlation_extremes() {
        let mut rng = RngStream::new(8, 0);
        let xs = sample_complex_gaussian(6, &mut rng).unwrap();
        assert!((anchor_correlation(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);

        // y orthogonal to xs (complex sense) with the same norm.
        let g = sample_complex_gaussian(6, &mut rng).unwrap();
        let proj = cdot(xs.as_slice(), g.as_slice()) / xs.norm_sqr();
        let y = g.sub(&xs.scale(proj)).unwrap();
        assert!(anchor_correlation(&y, &xs).unwrap() < 1e-14);

        let y = y.scale(Complex64::new(xs.norm() / y.norm(), 0.0));
        let a0 = xs.add(&y).unwrap().normalized().unwrap();
        let got = anchor_correlation(&a0, &xs).unwrap();
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        assert!(anchor_correlation(&ComplexSignal::zeros(6), &xs).is_err());
    }

    #[test]
    fn rank_one_sigma_recovers_row() {
        let row = sample_complex_gaussian(5, &mut RngStream::new(9, 0)).unwrap();
        let ens: MeasurementEnsemble = DenseEnsemble::from_rows(vec![row.clone()]).unwrap().into();
        let obs = Observations::from_values(vec![1.0]).unwrap();
        let rep = spectral_anchor(&ens, &obs, 5, &mut RngStream::new(0, 0)).unwrap();
        assert!((anchor_correlation(&rep.a0, &row).unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.a0.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_quotient_non_decreasing() {
        let mut rng = RngStream::new(10, 0);
        let ens: MeasurementEnsemble = DenseEnsemble::gaussian(16, 128, &mut rng).unwrap().into();
        let xs = sample_complex_gaussian(16, &mut rng).unwrap();
        let obs = observe(&ens, &xs, NoiseModel::None, &mut rng).unwrap();
        let rep = spectral_anchor(&ens, &obs, 50, &mut rng).unwrap();
        assert_eq!(rep.rayleigh_history.len(), 51);
        for w in rep.rayleigh_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0].abs(), "{:?}", w);
        }
    }

    #[test]
    fn zero_measurements_rejected() {
        let mut rng = RngStream::new(11, 0);
        let ens: MeasurementEnsemble = DenseEnsemble::gaussian(4, 8, &mut rng).unwrap().into();
        let obs = Observations::from_values(vec![0.0; 8]).unwrap();
        assert!(matches!(
            spectral_anchor(&ens, &obs, 10, &mut rng),
            Err(Error::Degenerate(_))
        ));
        let short = Observations::from_values(vec![1.0; 7]).unwrap();
        assert!(spectral_anchor(&ens, &short, 10, &mut rng).is_err());
    }

    #[test]
    fn anchor_is_phase_covariant() {
        let mut rng = RngStream::new(12, 0);
        let ens: MeasurementEnsemble = DenseEnsemble::gaussian(8, 64, &mut rng).unwrap().into();
        let xs = sample_complex_gaussian(8, &mut rng).unwrap();
        let wx = xs.scale(Complex64::from_polar(1.0, 0.7));
        let b1 = observe(&ens, &xs, NoiseModel::None, &mut rng).unwrap();
        let b2 = observe(&ens, &wx, NoiseModel::None, &mut rng).unwrap();
        let r1 = spectral_anchor(&ens, &b1, 30, &mut RngStream::new(5, 5)).unwrap();
        let r2 = spectral_anchor(&ens, &b2, 30, &mut RngStream::new(5, 5)).unwrap();
        assert!(r1.a0.sub(&r2.a0).unwrap().norm() < 1e-10);
    }
}
