//! Complex vectors viewed as a real inner-product space of dimension `2N`.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

/// A fixed-length vector of finite complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSignal(Vec<Complex64>);

impl ComplexSignal {
    /// Wraps `entries`, rejecting empty vectors and non-finite values.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("signal length must be at least 1".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "signal length must be at least 1");
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Builds a signal with zero imaginary parts.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `x^* y` with the conjugate on `self`.
    pub fn dot(&self, other: &ComplexSignal) -> Result<Complex64> {
        check_len(self.len(), other.len())?;
        Ok(cdot(&self.0, &other.0))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    /// Unit-norm copy of `self`. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector("signal"));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &ComplexSignal) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &ComplexSignal) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

impl std::ops::Index<usize> for ComplexSignal {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl AsRef<[Complex64]> for ComplexSignal {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Real inner product `Re(x^* y)`.
pub fn real_inner(x: &ComplexSignal, y: &ComplexSignal) -> Result<f64> {
    check_len(x.len(), y.len())?;
    Ok(real_dot(&x.0, &y.0))
}

pub(crate) fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn real_dot(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

pub(crate) fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}
