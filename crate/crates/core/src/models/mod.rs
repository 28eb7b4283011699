//! Parametric generators with closed-form semigroups and resolvents where available.

pub mod bessel;
pub mod delay;
pub mod dtn;
pub mod reflection;
pub mod robin;
pub mod rotation;
pub mod sequence;
pub mod shift_flip;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexVector, SquareOperator};

pub use bessel::{bessel_j, bessel_j_prime, bessel_zero};
pub use delay::{build_delay, delay_characteristic_roots, DelayModel, RootBox};
pub use dtn::{build_dtn, dirichlet_window, dtn_fejer_experiment, dtn_sweep_row, lambda_star_bracket, DtnModel, FejerResult, SweepRow};
pub use reflection::{build_reflection, Reflection};
pub use robin::{build_robin_squared, RobinSquared};
pub use rotation::{build_rotation, Rotation, RotationVariant};
pub use sequence::{build_sequence, SequenceModel};
pub use shift_flip::{build_shift_flip, ShiftFlip};

/// Closed-form evaluators; `None` means the model has no formula for that map.
pub trait ExactEvaluators: Send + Sync {
    fn dim(&self) -> usize;

    fn semigroup_apply(&self, _t: f64, _f: &ComplexVector) -> Option<Result<ComplexVector>> {
        None
    }

    fn resolvent_apply(&self, _lambda: Complex64, _f: &ComplexVector) -> Option<Result<ComplexVector>> {
        None
    }
}

/// A named model with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Rotation,
    RotationDamped { mu: f64 },
    RotationShifted { mu: f64 },
    Reflection { n: usize },
    Sequence { n: usize },
    Dtn { lambda: f64, modes: usize, m_grid: usize },
    Delay { n: usize },
    RobinSquared { n: usize, beta: f64 },
    ShiftFlip { n: usize },
}

/// Optional parameter overrides, as passed on the command line.
#[derive(Debug, Clone, Default)]
pub struct ModelParams {
    pub mu: Option<f64>,
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    pub modes: Option<usize>,
    pub m_grid: Option<usize>,
    pub beta: Option<f64>,
}

pub const MODEL_IDS: [&str; 9] = [
    "rotation",
    "rotation-damped",
    "rotation-shifted",
    "reflection",
    "sequence",
    "dtn",
    "delay",
    "robin-squared",
    "shift-flip",
];

/// Default DtN parameter: a tenth above the third Dirichlet eigenvalue of the disc.
pub fn default_dtn_lambda() -> f64 {
    bessel_zero(2, 1).map(|j| j * j + 0.1).unwrap_or(26.47)
}

impl ModelSpec {
    pub fn from_id(id: &str, p: &ModelParams) -> Result<Self> {
        Ok(match id {
            "rotation" => ModelSpec::Rotation,
            "rotation-damped" => ModelSpec::RotationDamped { mu: p.mu.unwrap_or(1.0) },
            "rotation-shifted" => ModelSpec::RotationShifted { mu: p.mu.unwrap_or(1.0) },
            "reflection" => ModelSpec::Reflection { n: p.n.unwrap_or(41) },
            "sequence" => ModelSpec::Sequence { n: p.n.unwrap_or(6) },
            "dtn" => ModelSpec::Dtn {
                lambda: p.lambda.unwrap_or_else(default_dtn_lambda),
                modes: p.modes.unwrap_or(16),
                m_grid: p.m_grid.unwrap_or(512),
            },
            "delay" => ModelSpec::Delay { n: p.n.unwrap_or(200) },
            "robin-squared" => ModelSpec::RobinSquared { n: p.n.unwrap_or(64), beta: p.beta.unwrap_or(1.0) },
            "shift-flip" => ModelSpec::ShiftFlip { n: p.n.unwrap_or(50) },
            other => return Err(Error::InvalidInput(format!("unknown model id {other:?}"))),
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            ModelSpec::Rotation => "rotation",
            ModelSpec::RotationDamped { .. } => "rotation-damped",
            ModelSpec::RotationShifted { .. } => "rotation-shifted",
            ModelSpec::Reflection { .. } => "reflection",
            ModelSpec::Sequence { .. } => "sequence",
            ModelSpec::Dtn { .. } => "dtn",
            ModelSpec::Delay { .. } => "delay",
            ModelSpec::RobinSquared { .. } => "robin-squared",
            ModelSpec::ShiftFlip { .. } => "shift-flip",
        }
    }

    /// The matrix generator used for spectral analysis and certification. The DtN model
    /// is collocated on `2K+1` angles; the shift-flip model has no matrix realization.
    pub fn generator(&self) -> Result<SquareOperator> {
        Ok(match *self {
            ModelSpec::Rotation => build_rotation(RotationVariant::Plain, 0.0)?.0,
            ModelSpec::RotationDamped { mu } => build_rotation(RotationVariant::Damped, mu)?.0,
            ModelSpec::RotationShifted { mu } => build_rotation(RotationVariant::Shifted, mu)?.0,
            ModelSpec::Reflection { n } => build_reflection(n)?.0,
            ModelSpec::Sequence { n } => build_sequence(n)?.0,
            ModelSpec::Dtn { lambda, modes, m_grid } => build_dtn(lambda, modes, m_grid)?.grid_operator()?,
            ModelSpec::Delay { n } => build_delay(n)?.0,
            ModelSpec::RobinSquared { n, beta } => build_robin_squared(n, beta)?.a,
            ModelSpec::ShiftFlip { .. } => {
                return Err(Error::InvalidInput("shift-flip is defined by exact evaluators only".into()))
            }
        })
    }

    pub fn evaluators(&self) -> Result<Option<Box<dyn ExactEvaluators>>> {
        Ok(match *self {
            ModelSpec::Rotation => Some(Box::new(build_rotation(RotationVariant::Plain, 0.0)?.1)),
            ModelSpec::RotationDamped { mu } => Some(Box::new(build_rotation(RotationVariant::Damped, mu)?.1)),
            ModelSpec::RotationShifted { mu } => Some(Box::new(build_rotation(RotationVariant::Shifted, mu)?.1)),
            ModelSpec::Reflection { n } => Some(Box::new(build_reflection(n)?.1)),
            ModelSpec::Sequence { n } => Some(Box::new(build_sequence(n)?.1)),
            ModelSpec::ShiftFlip { n } => Some(Box::new(build_shift_flip(n)?)),
            _ => None,
        })
    }
}
