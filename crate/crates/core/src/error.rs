use thiserror::Error;

/// Errors raised by the grid, functional, solver and phase-diagram layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid radius: {0}")]
    InvalidRadius(f64),

    #[error("invalid number of intervals: {0} (need at least {min})", min = crate::grid::MIN_INTERVALS)]
    InvalidIntervals(usize),

    #[error("field has {got} samples but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field contains a non-finite sample at node {0}")]
    NonFinite(usize),

    #[error("non-decayed boundary: |f| = {0:e} at the outer radius")]
    NonDecayedBoundary(f64),

    #[error("invalid scaling parameter lambda = {0}")]
    InvalidScale(f64),

    #[error("alpha = {alpha} outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("invalid coupling: {0}")]
    InvalidCoupling(f64),

    #[error("invalid mass: {0}")]
    InvalidMass(f64),

    #[error("zero field")]
    ZeroField,

    #[error("field is not supported in the unit ball (|f| = {0:e} beyond r = 1)")]
    NotInUnitBall(f64),

    #[error("undefined at alpha=1/2")]
    UndefinedAtHalf,

    #[error("critical mass undefined at alpha=1/2")]
    CriticalMassAtHalf,

    #[error("minimizer has not converged (status {0})")]
    NotConverged(String),

    #[error("Lagrange multiplier must be positive, got {0}")]
    NonPositiveMultiplier(f64),

    #[error("decay window is empty; increase R")]
    EmptyDecayWindow,

    #[error("I_M = 0 regime: coupling {coupling} is not above the threshold {threshold}")]
    ZeroEnergyRegime { coupling: f64, threshold: f64 },

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("split mass {split} must lie strictly between 0 and {mass}")]
    InvalidSplit { split: f64, mass: f64 },

    #[error("no bump count up to {0} produced a negative G-test")]
    NoNegativeBump(usize),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
