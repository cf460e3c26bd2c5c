use crate::params::Field;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter {0} is out of range")]
    OutOfRange(Field),
    #[error("invalid spectral grid: {0}")]
    InvalidGrid(&'static str),
    #[error("response diverges at {omega} cm^-1 (undamped pole)")]
    DivergentResponse { omega: f64 },
    #[error("resonances are degenerate: Rabi splitting {splitting} cm^-1 is not positive")]
    DegenerateResonances { splitting: f64 },
    #[error("estimate is outside its validity range: {0}")]
    OutsideValidity(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("damped mode-coupling matrix requires g3_ratio = 0 (got {g3_ratio})")]
    UnsupportedElectricalAnharmonicity { g3_ratio: f64 },
    #[error("damped mode-coupling matrix is singular for kappa = 3 gamma_m (kappa - 3 gamma_m = {difference})")]
    DegenerateLinewidths { difference: f64 },
    #[error("leading polynomial coefficient is zero")]
    LeadingZero,
    #[error("configuration is unstable: a resonance has Im = {imag} >= 0")]
    UnstableConfiguration { imag: f64 },
    #[error("time step {dt} exceeds the limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("invalid pulse: {0}")]
    InvalidPulse(&'static str),
    #[error("trajectory has not decayed: |beta(t_end)|/max|beta| = {ratio}")]
    IncompleteDecay { ratio: f64 },
    #[error("probe spectrum vanishes at {omega} cm^-1")]
    SpectralHole { omega: f64 },
    #[error("no peak found in window [{lo}, {hi}] cm^-1")]
    MissingPeak { lo: f64, hi: f64 },
    #[error("optimizer did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}
