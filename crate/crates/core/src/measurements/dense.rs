use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::rng::RngStream;
use crate::signal::ComplexSignal;

/// Explicitly stored measurement vectors, one per row, row-major.
#[derive(Clone, Debug)]
pub struct DenseEnsemble {
    n: usize,
    m: usize,
    rows: Vec<Complex64>,
}

impl DenseEnsemble {
    /// `m` i.i.d. rows with entries `Normal(0, 1/2) + i Normal(0, 1/2)`.
    pub fn gaussian(n: usize, m: usize, rng: &mut RngStream) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let rows = (0..n * m).map(|_| rng.complex_gaussian()).collect();
        Ok(Self { n, m, rows })
    }

    /// `m` i.i.d. rows with real standard-normal entries.
    pub fn real_gaussian(n: usize, m: usize, rng: &mut RngStream) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let rows = (0..n * m)
            .map(|_| Complex64::new(rng.standard_normal(), 0.0))
            .collect();
        Ok(Self { n, m, rows })
    }

    pub fn from_rows(rows: Vec<ComplexSignal>) -> Result<Self> {
        let n = rows
            .first()
            .map(|r| r.len())
            .ok_or_else(|| Error::InvalidArgument("at least one row is required".into()))?;
        let m = rows.len();
        let mut flat = Vec::with_capacity(n * m);
        for r in rows {
            check_len(n, r.len())?;
            flat.extend_from_slice(r.as_slice());
        }
        Ok(Self { n, m, rows: flat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Measurement vector `a_i`.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn forward_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (o, row) in out.iter_mut().zip(self.rows.chunks_exact(self.n)) {
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, v) in row.iter().zip(x) {
                // conj(a) * v
                re += a.re * v.re + a.im * v.im;
                im += a.re * v.im - a.im * v.re;
            }
            *o = Complex64::new(re, im);
        }
    }

    pub(crate) fn adjoint_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (zi, row) in z.iter().zip(self.rows.chunks_exact(self.n)) {
            for (o, a) in out.iter_mut().zip(row) {
                o.re += a.re * zi.re - a.im * zi.im;
                o.im += a.re * zi.im + a.im * zi.re;
            }
        }
    }
}
