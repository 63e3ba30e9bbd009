//! Region and cone predicates relative to a unit-norm target, and the
//! exclusion certificate for candidate error directions `h = x − x⋆`.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::measurements::MeasurementEnsemble;
use crate::signal::{cdot, norm_sqr, real_dot, ComplexSignal};

#[derive(Clone, Debug)]
pub struct GeometryContext {
    xstar: ComplexSignal,
    pub delta: f64,
    pub t: f64,
    /// Noise bound `η⁻¹`.
    pub eta_inv: f64,
}

impl GeometryContext {
    /// `xstar` must already have unit norm (to 1e-12).
    pub fn new(xstar: ComplexSignal, delta: f64, t: f64, eta_inv: f64) -> Result<Self> {
        if (xstar.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "target must be unit norm, got {}",
                xstar.norm()
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
        }
        if !(eta_inv >= 0.0 && eta_inv.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta_inv must be >= 0, got {eta_inv}")));
        }
        Ok(Self { xstar, delta, t, eta_inv })
    }

    /// Like [`GeometryContext::new`] but rescales `xstar` to unit norm first.
    pub fn normalizing(xstar: &ComplexSignal, delta: f64, t: f64, eta_inv: f64) -> Result<Self> {
        Self::new(xstar.normalized()?, delta, t, eta_inv)
    }

    pub fn xstar(&self) -> &ComplexSignal {
        &self.xstar
    }

    pub fn n(&self) -> usize {
        self.xstar.len()
    }

    /// `(tη)⁻¹`, the error radius in the recovery guarantee.
    pub fn error_radius(&self) -> f64 {
        self.eta_inv / self.t
    }

    /// `(x⋆^* h, ‖h − (x⋆^* h) x⋆‖)` via `‖h⊥‖² = ‖h‖² − |x⋆^* h|²`.
    fn split(&self, h: &[Complex64]) -> (Complex64, f64) {
        let c = cdot(self.xstar.as_slice(), h);
        let perp = (norm_sqr(h) - c.norm_sqr()).max(0.0).sqrt();
        (c, perp)
    }
}

/// `‖h − (x⋆^* h) x⋆‖ >= δ |Im(x⋆^* h)|`.
pub fn in_r_delta(h: &ComplexSignal, ctx: &GeometryContext) -> Result<bool> {
    check_len(ctx.n(), h.len())?;
    let (c, perp) = ctx.split(h.as_slice());
    Ok(perp >= ctx.delta * c.im.abs())
}

/// `Re(x⋆^* y) >= δ ‖y‖`.
pub fn in_c_delta(y: &ComplexSignal, ctx: &GeometryContext) -> Result<bool> {
    check_len(ctx.n(), y.len())?;
    Ok(real_dot(ctx.xstar.as_slice(), y.as_slice()) >= ctx.delta * y.norm())
}

/// `δ ⟨x⋆, z⟩ >= −sqrt(1 − δ²) sqrt(‖z‖² − |x⋆^* z|²)`: the closure of the
/// complement of the polar cone of `C_δ`.
pub fn in_cprime_delta(z: &ComplexSignal, ctx: &GeometryContext) -> Result<bool> {
    check_len(ctx.n(), z.len())?;
    let (c, perp) = ctx.split(z.as_slice());
    Ok(ctx.delta * c.re >= -(1.0 - ctx.delta * ctx.delta).sqrt() * perp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub h: ComplexSignal,
    pub in_r_delta: bool,
    /// `⟨a0, h⟩ >= 0`.
    pub anchor_inequality_holds: bool,
    /// First `i` with `⟨a_i a_i^* x⋆, h⟩ > η⁻¹ / 2`.
    pub first_violated_constraint: Option<usize>,
    pub certified_excluded: bool,
}

/// Evaluates whether `h` violates at least one of `⟨a0, h⟩ >= 0` and
/// `⟨a_i a_i^* x⋆, h⟩ <= η⁻¹/2`; `⟨a_i a_i^* x⋆, h⟩` is computed as
/// `Re(conj(a_i^* x⋆) · a_i^* h)`.
pub fn check_certificate(
    h: &ComplexSignal,
    a0: &ComplexSignal,
    ens: &MeasurementEnsemble,
    ctx: &GeometryContext,
) -> Result<CertificateReport> {
    check_len(ctx.n(), h.len())?;
    check_len(ctx.n(), a0.len())?;
    check_len(ctx.n(), ens.n())?;
    let ax = ens.forward(ctx.xstar())?;
    let ah = ens.forward(h)?;
    let half = 0.5 * ctx.eta_inv;
    let first_violated_constraint = ax
        .iter()
        .zip(ah.iter())
        .position(|(u, v)| (u.conj() * v).re > half);
    let anchor_inequality_holds = real_dot(a0.as_slice(), h.as_slice()) >= 0.0;
    Ok(CertificateReport {
        h: h.clone(),
        in_r_delta: in_r_delta(h, ctx)?,
        anchor_inequality_holds,
        certified_excluded: !anchor_inequality_holds || first_violated_constraint.is_some(),
        first_violated_constraint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{DenseEnsemble, MeasurementEnsemble};
    use crate::rng::{sample_complex_gaussian, RngStream};
    use proptest::prelude::*;

    fn ctx(seed: u64, n: usize, delta: f64) -> GeometryContext {
        let x = sample_complex_gaussian(n, &mut RngStream::new(seed, 0)).unwrap();
        GeometryContext::normalizing(&x, delta, 1.0, 0.0).unwrap()
    }

    /// `h⊥` built explicitly as `(I − x⋆ x⋆^*) h`.
    fn explicit_perp(h: &ComplexSignal, x: &ComplexSignal) -> (Complex64, ComplexSignal) {
        let c = x.dot(h).unwrap();
        (c, h.sub(&x.scale(c)).unwrap())
    }

    /// Unit vector orthogonal to `x` in the complex sense.
    fn orthogonal_unit(x: &ComplexSignal, rng: &mut RngStream) -> ComplexSignal {
        let g = sample_complex_gaussian(x.len(), rng).unwrap();
        explicit_perp(&g, x).1.normalized().unwrap()
    }

    #[test]
    fn context_validation() {
        let x = ComplexSignal::from_real(&[2.0, 0.0]).unwrap();
        assert!(GeometryContext::new(x.clone(), 0.5, 1.0, 0.0).is_err());
        assert!(GeometryContext::normalizing(&x, 0.5, 1.0, 0.0).is_ok());
        assert!(GeometryContext::normalizing(&x, 1.0, 1.0, 0.0).is_err());
        assert!(GeometryContext::normalizing(&x, 0.5, 0.0, 0.0).is_err());
        assert!(GeometryContext::normalizing(&x, 0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn r_delta_examples() {
        let c = ctx(1, 5, 0.6);
        let x = c.xstar().clone();
        assert!(in_r_delta(&x, &c).unwrap());
        assert!(!in_r_delta(&x.scale(Complex64::i()), &c).unwrap());
    }

    #[test]
    fn r_delta_matches_projection_oracle() {
        let c = ctx(2, 6, 0.8);
        let mut rng = RngStream::new(2, 1);
        for _ in 0..2000 {
            let mut h = sample_complex_gaussian(6, &mut rng).unwrap();
            // Bias towards the boundary: mostly along i·x⋆.
            let tilt = Complex64::new(0.0, 3.0 * rng.standard_normal());
            h = h.add(&c.xstar().scale(tilt)).unwrap();
            let (proj, perp) = explicit_perp(&h, c.xstar());
            let lhs = perp.norm();
            let rhs = c.delta * proj.im.abs();
            if (lhs - rhs).abs() > 1e-9 * (1.0 + rhs) {
                assert_eq!(in_r_delta(&h, &c).unwrap(), lhs >= rhs);
            }
        }
    }

    #[test]
    fn c_delta_examples() {
        let c = ctx(3, 4, 0.7);
        let x = c.xstar().clone();
        assert!(in_c_delta(&x, &c).unwrap());
        let mut rng = RngStream::new(3, 1);
        let u = orthogonal_unit(&x, &mut rng);
        assert!(!in_c_delta(&u, &c).unwrap());
        for eps in [0.1, 0.5, 1.0, 1.5, 3.0] {
            let y = x.add(&u.scale(Complex64::new(eps, 0.0))).unwrap();
            let expect = 1.0 / (1.0f64 + eps * eps).sqrt() >= c.delta;
            assert_eq!(in_c_delta(&y, &c).unwrap(), expect, "eps {eps}");
        }
    }

    #[test]
    fn cprime_delta_examples() {
        let c = ctx(4, 4, 0.5);
        let x = c.xstar().clone();
        assert!(!in_cprime_delta(&x.scale(Complex64::new(-1.0, 0.0)), &c).unwrap());
        let mut rng = RngStream::new(4, 1);
        for _ in 0..200 {
            let z = sample_complex_gaussian(4, &mut rng).unwrap();
            if real_dot(x.as_slice(), z.as_slice()) >= 0.0 {
                assert!(in_cprime_delta(&z, &c).unwrap());
            }
        }
    }

    #[test]
    fn cprime_matches_decomposition_oracle() {
        let c = ctx(5, 5, 0.9);
        let mut rng = RngStream::new(5, 1);
        for _ in 0..2000 {
            let z = sample_complex_gaussian(5, &mut rng)
                .unwrap()
                .add(&c.xstar().scale(Complex64::new(-2.0 * rng.uniform(), 0.0)))
                .unwrap();
            let (proj, perp) = explicit_perp(&z, c.xstar());
            let lhs = c.delta * proj.re;
            let rhs = -(1.0 - c.delta * c.delta).sqrt() * perp.norm();
            if (lhs - rhs).abs() > 1e-9 {
                assert_eq!(in_cprime_delta(&z, &c).unwrap(), lhs >= rhs);
            }
        }
    }

    proptest! {
        #[test]
        fn c_delta_inside_cprime_delta(seed in 0u64..10_000, delta in 0.05f64..0.95, scale in 0.0f64..3.0) {
            let c = ctx(seed, 4, delta);
            let mut rng = RngStream::new(seed, 7);
            let y = sample_complex_gaussian(4, &mut rng).unwrap()
                .add(&c.xstar().scale(Complex64::new(scale, 0.0))).unwrap();
            if in_c_delta(&y, &c).unwrap() {
                prop_assert!(in_cprime_delta(&y, &c).unwrap());
            }
        }
    }

    fn small_ensemble(seed: u64) -> (MeasurementEnsemble, DenseEnsemble) {
        let d = DenseEnsemble::gaussian(4, 12, &mut RngStream::new(seed, 3)).unwrap();
        (d.clone().into(), d)
    }

    #[test]
    fn certificate_anchor_direction() {
        let c = ctx(6, 4, 0.5);
        let (ens, dense) = small_ensemble(6);
        let a0 = sample_complex_gaussian(4, &mut RngStream::new(6, 9)).unwrap();
        let h = a0.scale(Complex64::new(2.5, 0.0));
        let rep = check_certificate(&h, &a0, &ens, &c).unwrap();
        assert!(rep.anchor_inequality_holds);
        let any_positive = (0..12).any(|i| {
            let u = cdot(dense.row(i), c.xstar().as_slice());
            let v = cdot(dense.row(i), h.as_slice());
            (u.conj() * v).re > 0.0
        });
        assert_eq!(rep.certified_excluded, any_positive);

        let neg = check_certificate(&a0.scale(Complex64::new(-1.0, 0.0)), &a0, &ens, &c).unwrap();
        assert!(!neg.anchor_inequality_holds);
        assert!(neg.certified_excluded);
    }

    #[test]
    fn certificate_matches_scalar_loop() {
        let x = sample_complex_gaussian(4, &mut RngStream::new(7, 0)).unwrap();
        let c = GeometryContext::normalizing(&x, 0.5, 2.0, 0.3).unwrap();
        let (ens, dense) = small_ensemble(7);
        let mut rng = RngStream::new(7, 1);
        for _ in 0..100 {
            let h = sample_complex_gaussian(4, &mut rng).unwrap();
            let a0 = sample_complex_gaussian(4, &mut rng).unwrap();
            let rep = check_certificate(&h, &a0, &ens, &c).unwrap();
            let mut first = None;
            for i in 0..12 {
                let mut u = Complex64::new(0.0, 0.0);
                let mut v = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    u += dense.row(i)[k].conj() * c.xstar()[k];
                    v += dense.row(i)[k].conj() * h[k];
                }
                if first.is_none() && u.re * v.re + u.im * v.im > 0.15 {
                    first = Some(i);
                }
            }
            let anchor: f64 = (0..4).map(|k| a0[k].re * h[k].re + a0[k].im * h[k].im).sum();
            assert_eq!(rep.first_violated_constraint, first);
            assert_eq!(rep.anchor_inequality_holds, anchor >= 0.0);
            assert_eq!(rep.certified_excluded, anchor < 0.0 || first.is_some());
        }
    }
}
