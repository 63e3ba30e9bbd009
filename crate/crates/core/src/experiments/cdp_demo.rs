//! Image recovery from coded diffraction patterns.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::pgm::{read_pgm, write_pgm, GrayImage};
use crate::anchor::{anchor_correlation, spectral_anchor};
use crate::error::{Error, Result};
use crate::measurements::{observe, CodedDiffraction, MeasurementEnsemble, NoiseModel};
use crate::metrics::{align_to, phase_align_error};
use crate::rng::RngStream;
use crate::signal::ComplexSignal;
use crate::solver::{solve_phasemax, SolverConfig};

#[derive(Clone, Debug)]
pub struct CdpConfig {
    pub num_masks: usize,
    pub anchor_iters: usize,
    pub solver: SolverConfig,
    pub seed: u64,
    /// Writes `<prefix>.pgm` and `<prefix>.f64` when set.
    pub out_prefix: Option<PathBuf>,
    pub record_timing: bool,
}

impl Default for CdpConfig {
    fn default() -> Self {
        Self {
            num_masks: 20,
            anchor_iters: 50,
            solver: SolverConfig::default(),
            seed: 0,
            out_prefix: None,
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CdpReport {
    pub width: usize,
    pub height: usize,
    pub num_masks: usize,
    pub seed: u64,
    pub anchor_corr: f64,
    pub rel_error: f64,
    pub iters: usize,
    pub converged: bool,
    pub operator_applications: usize,
    pub runtime_ms: Option<f64>,
    /// Phase-aligned real part of the estimate, row-major.
    pub recovered: Vec<f64>,
}

impl CdpReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "image      {}x{}", self.width, self.height);
        let _ = writeln!(s, "masks      {}", self.num_masks);
        let _ = writeln!(s, "seed       {}", self.seed);
        let _ = writeln!(s, "anchor     {:.17e}", self.anchor_corr);
        let _ = writeln!(s, "rel_error  {:.17e}", self.rel_error);
        let _ = writeln!(s, "iters      {}", self.iters);
        let _ = writeln!(s, "converged  {}", self.converged);
        let _ = writeln!(s, "op_apps    {}", self.operator_applications);
        if let Some(ms) = self.runtime_ms {
            let _ = writeln!(s, "runtime_ms {ms:.1}");
        }
        s
    }

    pub fn recovered_image(&self) -> GrayImage {
        let pixels = self
            .recovered
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

fn image_signal(img: &GrayImage) -> Result<ComplexSignal> {
    if img.pixels.iter().all(|&p| p == 0) {
        return Err(Error::Degenerate(
            "image is all zero; a zero signal has no recoverable phase".into(),
        ));
    }
    let values: Vec<f64> = img.pixels.iter().map(|&p| p as f64 / 255.0).collect();
    ComplexSignal::from_real(&values)
}

pub fn run_cdp_on_image(img: &GrayImage, cfg: &CdpConfig) -> Result<CdpReport> {
    if cfg.num_masks < 1 {
        return Err(Error::InvalidArgument("num_masks must be at least 1".into()));
    }
    let start = Instant::now();
    let xstar = image_signal(img)?;
    let mut rng = RngStream::new(cfg.seed, 0);
    let ens: MeasurementEnsemble =
        CodedDiffraction::rademacher(xstar.len(), cfg.num_masks, &mut rng)?.into();
    let obs = observe(&ens, &xstar, NoiseModel::None, &mut rng)?;
    let anchor = spectral_anchor(&ens, &obs, cfg.anchor_iters, &mut rng)?;
    let sol = solve_phasemax(&ens, &obs, &anchor.a0, &cfg.solver)?;
    let aligned = align_to(&sol.xhat, &xstar)?;
    let report = CdpReport {
        width: img.width,
        height: img.height,
        num_masks: cfg.num_masks,
        seed: cfg.seed,
        anchor_corr: anchor_correlation(&anchor.a0, &xstar)?,
        rel_error: phase_align_error(&sol.xhat, &xstar)?,
        iters: sol.iters_used,
        converged: sol.converged,
        // Anchor power iterations cost one forward and one adjoint each.
        operator_applications: sol.operator_applications + 2 * (cfg.anchor_iters + 1),
        runtime_ms: cfg
            .record_timing
            .then(|| start.elapsed().as_secs_f64() * 1e3),
        recovered: aligned.iter().map(|z| z.re).collect(),
    };
    if let Some(prefix) = &cfg.out_prefix {
        write_outputs(prefix, &report)?;
    }
    Ok(report)
}

pub fn run_cdp_demo(image_path: &Path, cfg: &CdpConfig) -> Result<CdpReport> {
    run_cdp_on_image(&read_pgm(image_path)?, cfg)
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn write_outputs(prefix: &Path, report: &CdpReport) -> Result<()> {
    write_pgm(&with_suffix(prefix, ".pgm"), &report.recovered_image())?;
    let raw: Vec<u8> = report.recovered.iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(with_suffix(prefix, ".f64"), raw)?;
    Ok(())
}

/// Reads a sidecar written by the demo.
pub fn read_f64_sidecar(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::ImageFormat("sidecar length is not a multiple of 8".into()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(num_masks: usize) -> CdpConfig {
        CdpConfig {
            num_masks,
            record_timing: false,
            ..CdpConfig::default()
        }
    }

    #[test]
    fn zero_image_rejected() {
        let img = GrayImage::new(4, 4, vec![0; 16]).unwrap();
        assert!(matches!(run_cdp_on_image(&img, &quick(4)), Err(Error::Degenerate(_))));
        assert!(run_cdp_on_image(&GrayImage::gradient(4, 4).unwrap(), &quick(0)).is_err());
    }

    #[test]
    fn small_image_recovered_and_written() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("rec");
        let img = GrayImage::gradient(8, 8).unwrap();
        let cfg = CdpConfig {
            out_prefix: Some(prefix.clone()),
            ..quick(8)
        };
        let rep = run_cdp_on_image(&img, &cfg).unwrap();
        assert!(rep.rel_error <= 1e-4, "{}", rep.rel_error);
        let back = read_pgm(&with_suffix(&prefix, ".pgm")).unwrap();
        assert_eq!(back, img);
        let raw = read_f64_sidecar(&with_suffix(&prefix, ".f64")).unwrap();
        assert_eq!(raw, rep.recovered);
        assert!(rep.to_text().contains("rel_error"));
        assert!(!rep.to_text().contains("runtime_ms"));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            run_cdp_demo(Path::new("/nonexistent/image.pgm"), &quick(2)),
            Err(Error::Io(_))
        ));
    }
}
