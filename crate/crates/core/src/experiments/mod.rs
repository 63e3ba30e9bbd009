//! Drivers for the numerical experiments and verification suites exposed by
//! the command-line tool.

pub mod cdp_demo;
pub mod pgm;
pub mod sweep;
pub mod verify;

pub use cdp_demo::{run_cdp_demo, run_cdp_on_image, CdpConfig, CdpReport};
pub use pgm::{read_pgm, write_pgm, GrayImage};
pub use sweep::{
    format_summary, parse_ratios, run_sweep, summarize, write_csv, NoiseSpec, RatioSummary,
    SweepConfig, TrialRecord, CSV_HEADER,
};
pub use verify::{run_verify, run_verify_scaled, Suite, VerifyReport, VerifyScale};
