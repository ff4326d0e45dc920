use std::process::ExitCode;

use towerlab_core::algebra::AlgebraError;
use towerlab_core::bounds::BoundsError;
use towerlab_core::dynamics::DynamicsError;
use towerlab_core::pointcount::PointCountError;
use towerlab_core::spectra::SpectraError;
use towerlab_core::towers::TowerError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, config or input descriptions.
    Usage(String),
    /// Bad reduction, disconnected graph and similar.
    Domain(String),
    /// An enumeration, precision or dimension cap was hit.
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Cap(_) => 3,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Cap(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self {
            CliError::Usage(_) => "usage error",
            CliError::Domain(_) => "domain error",
            CliError::Cap(_) => "cap exceeded",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        let msg = e.to_string();
        match e {
            AlgebraError::EnumerationCap { .. } | AlgebraError::RootSearchBudget { .. } => CliError::Cap(msg),
            AlgebraError::DegenerateReduction(_) => CliError::Domain(msg),
            AlgebraError::NotPrime(_)
            | AlgebraError::Parse { .. }
            | AlgebraError::UnknownVariable { .. }
            | AlgebraError::NonHomogeneous { .. }
            | AlgebraError::ExponentArity { .. }
            | AlgebraError::ZeroPolynomial
            | AlgebraError::ConstantPolynomial => CliError::Usage(msg),
            _ => CliError::Domain(msg),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        let msg = e.to_string();
        match e {
            DynamicsError::Algebra(a) => a.into(),
            DynamicsError::PrecisionExceeded { .. } => CliError::Cap(msg),
            DynamicsError::BadReduction(_) => CliError::Domain(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<TowerError> for CliError {
    fn from(e: TowerError) -> Self {
        let msg = e.to_string();
        match e {
            TowerError::Algebra(a) => a.into(),
            TowerError::Dynamics(d) => d.into(),
            TowerError::NotOnCurve { .. } | TowerError::IndeterminateProjection(_) => CliError::Domain(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<PointCountError> for CliError {
    fn from(e: PointCountError) -> Self {
        match e {
            PointCountError::Tower(t) => t.into(),
            PointCountError::OmegaPoint { .. } => CliError::Domain(e.to_string()),
            PointCountError::LevelRange { .. } => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        let msg = e.to_string();
        match e {
            BoundsError::Tower(t) => t.into(),
            BoundsError::PointCount(p) => p.into(),
            BoundsError::Overflow(_) => CliError::Cap(msg),
            _ => CliError::Domain(msg),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        let msg = e.to_string();
        match e {
            SpectraError::DimensionCap { .. } => CliError::Cap(msg),
            SpectraError::Disconnected { .. }
            | SpectraError::NoNonzeroEigenvalue
            | SpectraError::NotCayley
            | SpectraError::NoConvergence => CliError::Domain(msg),
            _ => CliError::Usage(msg),
        }
    }
}
