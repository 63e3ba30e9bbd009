//! Reproducible random streams and the sampling distributions used by the
//! experiments.
//!
//! Every stream is a ChaCha20 generator keyed by `seed` and positioned on the
//! 64-bit ChaCha stream `stream_id`, so parallel trials draw from disjoint,
//! replayable sequences.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derives an independent child stream. The child depends only on
    /// `(seed, stream_id, tag)`, never on how much of `self` was consumed.
    pub fn fork(&self, tag: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(0x5851_F42D)));
        RngStream::new(key, tag)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn coin(&mut self) -> bool {
        self.inner.random::<bool>()
    }

    /// `Normal(0, 1/2) + i Normal(0, 1/2)`, so that `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re: f64 = self.standard_normal();
        let im: f64 = self.standard_normal();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

impl rand::RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// I.i.d. circularly-symmetric complex Gaussian entries with unit second moment.
pub fn sample_complex_gaussian(n: usize, rng: &mut RngStream) -> Result<ComplexSignal> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(ComplexSignal::from_vec_unchecked(
        (0..n).map(|_| rng.complex_gaussian()).collect(),
    ))
}

/// I.i.d. symmetric `±1` entries with zero imaginary part.
pub fn sample_rademacher(n: usize, rng: &mut RngStream) -> Result<ComplexSignal> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(ComplexSignal::from_vec_unchecked(
        (0..n)
            .map(|_| Complex64::new(if rng.coin() { 1.0 } else { -1.0 }, 0.0))
            .collect(),
    ))
}
