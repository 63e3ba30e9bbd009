use serde::{Deserialize, Serialize};

use super::MeasurementEnsemble;
use crate::error::{check_len, Error, Result};
use crate::rng::RngStream;
use crate::signal::ComplexSignal;

/// Additive noise on the squared magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    None,
    /// `ξ_i ~ Uniform[0, eta_inv]`; non-negative by construction.
    Uniform { eta_inv: f64 },
    /// `ξ_i ~ Normal(0, sigma^2)`; negative `b_i` are clipped to zero.
    Gaussian { sigma: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Uniform { eta_inv } if eta_inv.is_finite() && eta_inv >= 0.0 => Ok(()),
            NoiseModel::Uniform { eta_inv } => Err(Error::InvalidArgument(format!(
                "uniform noise bound must be finite and >= 0, got {eta_inv}"
            ))),
            NoiseModel::Gaussian { sigma } if sigma.is_finite() && sigma > 0.0 => Ok(()),
            NoiseModel::Gaussian { sigma } => Err(Error::InvalidArgument(format!(
                "gaussian noise sigma must be finite and > 0, got {sigma}"
            ))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseModel::None => "none",
            NoiseModel::Uniform { .. } => "uniform",
            NoiseModel::Gaussian { .. } => "gaussian",
        }
    }

    /// `eta_inv` for uniform, `sigma` for gaussian, zero otherwise.
    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Uniform { eta_inv } => eta_inv,
            NoiseModel::Gaussian { sigma } => sigma,
        }
    }

    /// Gaussian model whose input SNR `10 log10(‖x‖⁴ / σ²)` equals `snr_db`
    /// for a signal of squared norm `signal_energy`.
    pub fn gaussian_for_snr(snr_db: f64, signal_energy: f64) -> Result<Self> {
        let sigma = signal_energy / 10f64.powf(snr_db / 20.0);
        let model = NoiseModel::Gaussian { sigma };
        model.validate()?;
        Ok(model)
    }
}

/// Phaseless measurements `b` together with the noise that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct Observations {
    b: Vec<f64>,
    pub noise: NoiseModel,
    pub snr_db: Option<f64>,
}

impl Observations {
    /// Wraps externally supplied measurements; every entry must be finite and
    /// non-negative.
    pub fn from_values(b: Vec<f64>) -> Result<Self> {
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        if let Some(v) = b.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidArgument(format!("negative measurement {v}")));
        }
        Ok(Self {
            b,
            noise: NoiseModel::None,
            snr_db: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Draws `b_i = |(A xstar)_i|^2 + ξ_i`.
pub fn observe(
    ens: &MeasurementEnsemble,
    xstar: &ComplexSignal,
    noise: NoiseModel,
    rng: &mut RngStream,
) -> Result<Observations> {
    noise.validate()?;
    check_len(ens.n(), xstar.len())?;
    let clean = ens.forward(xstar)?;
    let b = clean
        .iter()
        .map(|z| {
            let v = z.norm_sqr();
            match noise {
                NoiseModel::None => v,
                NoiseModel::Uniform { eta_inv } => v + eta_inv * rng.uniform(),
                NoiseModel::Gaussian { sigma } => (v + sigma * rng.standard_normal()).max(0.0),
            }
        })
        .collect();
    let snr_db = match noise {
        NoiseModel::Gaussian { sigma } if xstar.norm_sqr() > 0.0 => {
            Some(10.0 * (xstar.norm_sqr().powi(2) / (sigma * sigma)).log10())
        }
        _ => None,
    };
    Ok(Observations { b, noise, snr_db })
}
