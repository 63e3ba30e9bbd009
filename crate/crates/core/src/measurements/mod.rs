//! Linear measurement ensembles `A: C^n -> C^m`, the phaseless observation
//! process and operator-norm estimation.
//!
//! Row `i` of an ensemble is the measurement vector `a_i`; the forward map
//! returns `(A x)_i = a_i^* x` and the adjoint is the exact conjugate
//! transpose with respect to the standard complex inner product.

mod cdp;
mod dense;
mod noise;

pub use cdp::CodedDiffraction;
pub use dense::DenseEnsemble;
pub use noise::{observe, NoiseModel, Observations};

use num_complex::Complex64;

use crate::error::{check_len, Result};
use crate::rng::RngStream;
use crate::signal::{norm_sqr, ComplexSignal};

#[derive(Clone, Debug)]
pub enum MeasurementEnsemble {
    Dense(DenseEnsemble),
    CodedDiffraction(CodedDiffraction),
}

impl MeasurementEnsemble {
    /// Signal length.
    pub fn n(&self) -> usize {
        match self {
            Self::Dense(d) => d.n(),
            Self::CodedDiffraction(c) => c.n(),
        }
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        match self {
            Self::Dense(d) => d.m(),
            Self::CodedDiffraction(c) => c.m(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Dense(_) => "dense-gaussian",
            Self::CodedDiffraction(_) => "coded-diffraction",
        }
    }

    pub fn forward(&self, x: &ComplexSignal) -> Result<ComplexSignal> {
        check_len(self.n(), x.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.m()];
        self.forward_into(x.as_slice(), &mut out);
        Ok(ComplexSignal::from_vec_unchecked(out))
    }

    pub fn adjoint(&self, z: &ComplexSignal) -> Result<ComplexSignal> {
        check_len(self.m(), z.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.n()];
        self.adjoint_into(z.as_slice(), &mut out);
        Ok(ComplexSignal::from_vec_unchecked(out))
    }

    /// Slice-level forward map; `x.len() == n`, `out.len() == m`.
    pub fn forward_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n());
        debug_assert_eq!(out.len(), self.m());
        match self {
            Self::Dense(d) => d.forward_into(x, out),
            Self::CodedDiffraction(c) => c.forward_into(x, out),
        }
    }

    /// Slice-level adjoint; `z.len() == m`, `out.len() == n`. Overwrites `out`.
    pub fn adjoint_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(z.len(), self.m());
        debug_assert_eq!(out.len(), self.n());
        match self {
            Self::Dense(d) => d.adjoint_into(z, out),
            Self::CodedDiffraction(c) => c.adjoint_into(z, out),
        }
    }
}

impl From<DenseEnsemble> for MeasurementEnsemble {
    fn from(d: DenseEnsemble) -> Self {
        Self::Dense(d)
    }
}

impl From<CodedDiffraction> for MeasurementEnsemble {
    fn from(c: CodedDiffraction) -> Self {
        Self::CodedDiffraction(c)
    }
}

/// Estimates the largest singular value `‖A‖` by power iteration on `A^* A`,
/// starting from a complex Gaussian vector drawn from `rng`.
pub fn operator_norm(
    ens: &MeasurementEnsemble,
    iters: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if iters < 1 {
        return Err(crate::Error::InvalidArgument("iters must be at least 1".into()));
    }
    let n = ens.n();
    let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_gaussian()).collect();
    normalize(&mut v);
    let mut av = vec![Complex64::new(0.0, 0.0); ens.m()];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut estimate = 0.0;
    for _ in 0..iters {
        ens.forward_into(&v, &mut av);
        // ‖A v‖ with ‖v‖ = 1 is a lower bound that converges to ‖A‖.
        estimate = norm_sqr(&av).sqrt();
        ens.adjoint_into(&av, &mut w);
        if normalize(&mut w) == 0.0 {
            return Ok(0.0);
        }
        std::mem::swap(&mut v, &mut w);
    }
    ens.forward_into(&v, &mut av);
    Ok(estimate.max(norm_sqr(&av).sqrt()))
}

pub(crate) fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = norm_sqr(v).sqrt();
    if nrm > 0.0 {
        let inv = 1.0 / nrm;
        v.iter_mut().for_each(|z| *z *= inv);
    }
    nrm
}
