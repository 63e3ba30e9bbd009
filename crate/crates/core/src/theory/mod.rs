//! Computable forms of the recovery analysis: the Rayleigh–normal closed
//! form, the cut-probability lower bound, cone and region membership, the
//! exclusion certificate and VC-style sample-complexity arithmetic.

mod closed_form;
mod empirical;
mod geometry;
mod vc;

pub use closed_form::{
    ln_pmin_lower_bound, pmin_lower_bound, rayleigh_normal_cdf, rayleigh_normal_monte_carlo,
    MonteCarloEstimate,
};
pub use empirical::{cut_probability, empirical_pmin, PminEstimate};
pub use geometry::{
    check_certificate, in_c_delta, in_cprime_delta, in_r_delta, CertificateReport,
    GeometryContext,
};
pub use vc::{
    ln_vc_deviation_bound, sample_complexity, sample_complexity_real, sauer_bound,
    sauer_relaxation, uniform_deviation_ratio, vc_deviation_bound,
};

pub(crate) use closed_form::{negative_branch, nonnegative_branch};
