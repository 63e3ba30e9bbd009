//! Monte Carlo sweeps over the sampling ratio `M/N` with dense Gaussian
//! measurements.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::anchor::{anchor_correlation, spectral_anchor};
use crate::error::{Error, Result};
use crate::measurements::{observe, DenseEnsemble, MeasurementEnsemble, NoiseModel};
use crate::metrics::phase_align_error;
use crate::rng::{sample_complex_gaussian, RngStream};
use crate::signal::ComplexSignal;
use crate::solver::{solve_phasemax, SolverConfig};

/// Noise as given on the command line. Gaussian noise is specified by its
/// target SNR and converted to `σ` per trial from the drawn signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    None,
    Uniform { eta_inv: f64 },
    GaussianSnr { snr_db: f64 },
}

impl NoiseSpec {
    pub fn model_for(&self, xstar: &ComplexSignal) -> Result<NoiseModel> {
        let model = match *self {
            NoiseSpec::None => NoiseModel::None,
            NoiseSpec::Uniform { eta_inv } => NoiseModel::Uniform { eta_inv },
            NoiseSpec::GaussianSnr { snr_db } => {
                if !snr_db.is_finite() {
                    return Err(Error::InvalidArgument(format!("snr must be finite, got {snr_db}")));
                }
                NoiseModel::gaussian_for_snr(snr_db, xstar.norm_sqr())?
            }
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Uniform { eta_inv } => NoiseModel::Uniform { eta_inv }.validate(),
            NoiseSpec::GaussianSnr { snr_db } if snr_db.is_finite() => Ok(()),
            NoiseSpec::GaussianSnr { snr_db } => {
                Err(Error::InvalidArgument(format!("snr must be finite, got {snr_db}")))
            }
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = Error;

    /// `none`, `uniform:<eta_inv>` or `gaussian:<snr_db>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognized noise spec '{s}'"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let value = || -> Result<f64> { arg.ok_or_else(bad)?.trim().parse().map_err(|_| bad()) };
        let spec = match kind.trim() {
            "none" if arg.is_none() => NoiseSpec::None,
            "uniform" => NoiseSpec::Uniform { eta_inv: value()? },
            "gaussian" => NoiseSpec::GaussianSnr { snr_db: value()? },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses `a,b,c` or the inclusive range `lo:hi:step`.
pub fn parse_ratios(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("unrecognized ratio list '{s}'"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let ratios = match parts.as_slice() {
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(bad());
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| lo + i as f64 * step).collect()
        }
        _ => return Err(bad()),
    };
    if ratios.iter().any(|r| !r.is_finite()) {
        return Err(bad());
    }
    Ok(ratios)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub noise: NoiseSpec,
    pub anchor_iters: usize,
    pub solver: SolverConfig,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    /// Wall-clock times make the CSV non-reproducible; when false the
    /// `runtime_ms` column is left empty.
    pub record_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 128,
            ratios: vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
            trials: 20,
            noise: NoiseSpec::None,
            anchor_iters: 50,
            solver: SolverConfig::default(),
            seed: 0,
            out_path: None,
            record_timing: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.ratios.is_empty() {
            return Err(Error::InvalidArgument("at least one ratio is required".into()));
        }
        if let Some(r) = self.ratios.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
            return Err(Error::InvalidArgument(format!("ratios must be >= 1, got {r}")));
        }
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.anchor_iters < 1 {
            return Err(Error::InvalidArgument("anchor_iters must be at least 1".into()));
        }
        self.noise.validate()?;
        self.solver.validate()
    }
}

/// One CSV row. Field order and names define the CSV header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub m: usize,
    pub ratio: f64,
    pub trial: usize,
    pub seed: u64,
    pub noise_kind: &'static str,
    pub noise_param: f64,
    pub snr_db: Option<f64>,
    pub anchor_corr: f64,
    pub rel_error: f64,
    pub iters: usize,
    pub converged: bool,
    pub runtime_ms: Option<f64>,
}

pub const CSV_HEADER: &str =
    "n,m,ratio,trial,seed,noise_kind,noise_param,snr_db,anchor_corr,rel_error,iters,converged,runtime_ms";

fn stream_id(ratio_idx: usize, trial: usize) -> u64 {
    ((ratio_idx as u64) << 32) | trial as u64
}

fn run_trial(cfg: &SweepConfig, ratio_idx: usize, trial: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let ratio = cfg.ratios[ratio_idx];
    let m = (ratio * cfg.n as f64).round() as usize;
    let mut rng = RngStream::new(cfg.seed, stream_id(ratio_idx, trial));
    let xstar = sample_complex_gaussian(cfg.n, &mut rng)?;
    let ens: MeasurementEnsemble = DenseEnsemble::gaussian(cfg.n, m, &mut rng)?.into();
    let noise = cfg.noise.model_for(&xstar)?;
    let obs = observe(&ens, &xstar, noise, &mut rng)?;
    let anchor = spectral_anchor(&ens, &obs, cfg.anchor_iters, &mut rng)?;
    let sol = solve_phasemax(&ens, &obs, &anchor.a0, &cfg.solver)?;
    Ok(TrialRecord {
        n: cfg.n,
        m,
        ratio,
        trial,
        seed: cfg.seed,
        noise_kind: noise.kind(),
        noise_param: noise.parameter(),
        snr_db: obs.snr_db,
        anchor_corr: anchor_correlation(&anchor.a0, &xstar)?,
        rel_error: phase_align_error(&sol.xhat, &xstar)?,
        iters: sol.iters_used,
        converged: sol.converged,
        runtime_ms: cfg
            .record_timing
            .then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Runs every (ratio, trial) pair in parallel. Records come back ordered by
/// ratio, then trial. If `out_path` is set the CSV is written there; the file
/// is created before any trial runs so a bad path fails fast.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let file = cfg.out_path.as_ref().map(std::fs::File::create).transpose()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.ratios.len())
        .flat_map(|r| (0..cfg.trials).map(move |t| (r, t)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(r, t)| run_trial(cfg, r, t))
        .collect::<Result<Vec<_>>>()?;
    if let Some(file) = file {
        write_csv(std::io::BufWriter::new(file), &records)?;
    }
    Ok(records)
}

pub fn write_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[TrialRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSummary {
    pub ratio: f64,
    pub trials: usize,
    pub median: f64,
    pub q90: f64,
    pub converged: usize,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-ratio median and 0.9-quantile of `rel_error`, in first-seen ratio order.
pub fn summarize(records: &[TrialRecord]) -> Vec<RatioSummary> {
    let mut ratios: Vec<f64> = Vec::new();
    for r in records {
        if !ratios.contains(&r.ratio) {
            ratios.push(r.ratio);
        }
    }
    ratios
        .into_iter()
        .map(|ratio| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.ratio == ratio).collect();
            let mut errs: Vec<f64> = group.iter().map(|r| r.rel_error).collect();
            errs.sort_by(f64::total_cmp);
            RatioSummary {
                ratio,
                trials: group.len(),
                median: quantile(&errs, 0.5),
                q90: quantile(&errs, 0.9),
                converged: group.iter().filter(|r| r.converged).count(),
            }
        })
        .collect()
}

pub fn format_summary(summary: &[RatioSummary]) -> String {
    let mut s = format!("{:>8} {:>7} {:>12} {:>12} {:>10}\n", "ratio", "trials", "median", "q90", "converged");
    for r in summary {
        let _ = writeln!(
            s,
            "{:>8.3} {:>7} {:>12.4e} {:>12.4e} {:>10}",
            r.ratio, r.trials, r.median, r.q90, r.converged
        );
    }
    s
}
