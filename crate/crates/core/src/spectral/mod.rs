//! Spectral bound, peripheral spectrum, dominance and spectral projections.

mod projection;
mod report;

pub use projection::{contour_projection, multiplicity, spectral_projection, spectral_projection_with, ProjectionResiduals, SpectralProjectionResult, PROJ_TOL};
pub use report::{spectrum_report, spectrum_report_from, strip_width, ClusterInfo, SpectrumReport, TolProfile};
