//! Cone predicates and the characterizations of eventual positivity: spectral
//! projection, resolvent, eigenvector, power-method and trajectory tests.

mod cone;
mod extras;
mod laplace;
mod pf;
mod semigroup;

pub use cone::{classify_entries, classify_matrix, classify_real, cone_classify, sign_normalized, ConeClass, ConeMargins, DEFAULT_STRICT_MARGIN, DEFAULT_ZERO_TOL};
pub use extras::{dim2_no_gap_check, first_negative_time, square_generator_certify, SquareGeneratorCertificate};
pub use laplace::{gauss_legendre, laplace_crosscheck, Evolution, LaplaceCheck, MatrixEvolution, GAP_MIN, TAIL_LIMIT};
pub use pf::{check_projection_pf, check_projection_pf_with, ProjectionPfCheck};
pub use resolvent_tests::{
    asymptotic_positivity_trace, distance_to_cone, geometric_schedule, resolvent_eventual_positivity, resolvent_interval_extend,
    resolvent_power_positivity, resolvent_power_projection, IntervalExtension, PowerProjectionTrace, ResolventMode,
    ResolventPositivityReport, Strength, VectorEvidence, MAX_RESOLVENT_POWER,
};
pub use semigroup::{
    certify_matrix_semigroup, default_t_grid, log_grid, power_shift, CertifyOptions, ConditionResult, Conditions,
    PositivityCertificate, TrajectoryWitness, Verdict, Witnesses, DEFAULT_T_MAX, MAX_HORIZON,
};
