use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Error, Result};
use crate::rng::{sample_rademacher, RngStream};
use crate::signal::ComplexSignal;

/// Coded diffraction patterns: measurement `(k, l)` is `a = f_k ∘ φ_l`, the
/// `k`-th unitary DFT basis vector modulated by mask `l`. Outputs are
/// ordered mask-major, so block `l` of `A x` is `DFT(φ_l ∘ x) / sqrt(n)`.
#[derive(Clone)]
pub struct CodedDiffraction {
    n: usize,
    masks: Vec<Vec<Complex64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CodedDiffraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodedDiffraction")
            .field("n", &self.n)
            .field("masks", &self.masks.len())
            .finish()
    }
}

impl CodedDiffraction {
    /// `num_masks` independent Rademacher masks of length `n`.
    pub fn rademacher(n: usize, num_masks: usize, rng: &mut RngStream) -> Result<Self> {
        if num_masks < 1 {
            return Err(Error::InvalidArgument("at least one mask is required".into()));
        }
        let masks = (0..num_masks)
            .map(|_| sample_rademacher(n, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(masks)
    }

    pub fn from_masks(masks: Vec<ComplexSignal>) -> Result<Self> {
        let n = masks
            .first()
            .map(|m| m.len())
            .ok_or_else(|| Error::InvalidArgument("at least one mask is required".into()))?;
        for m in &masks {
            check_len(n, m.len())?;
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            masks: masks.into_iter().map(ComplexSignal::into_vec).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n * self.masks.len()
    }

    pub fn num_masks(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, l: usize) -> &[Complex64] {
        &self.masks[l]
    }

    pub(crate) fn forward_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let scale = 1.0 / (self.n as f64).sqrt();
        for (block, mask) in out.chunks_exact_mut(self.n).zip(&self.masks) {
            for ((o, &phi), &v) in block.iter_mut().zip(mask).zip(x) {
                *o = phi * v;
            }
            self.fwd.process(block);
            block.iter_mut().for_each(|z| *z *= scale);
        }
    }

    pub(crate) fn adjoint_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        let scale = 1.0 / (self.n as f64).sqrt();
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for (block, mask) in z.chunks_exact(self.n).zip(&self.masks) {
            buf.copy_from_slice(block);
            self.inv.process(&mut buf);
            for ((o, &phi), &v) in out.iter_mut().zip(mask).zip(&buf) {
                *o += phi.conj() * v * scale;
            }
        }
    }
}
