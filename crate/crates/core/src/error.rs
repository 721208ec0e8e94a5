use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the numerical routines.
///
/// The variants split into two families that the command-line runner maps to
/// different exit codes: input validation problems, and budget / convergence
/// problems that arise from a well-formed request.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point {z} lies within {tol:e} of the pole {pole}")]
    PoleProximity { z: String, pole: String, tol: f64 },
    #[error("argument lift is not monotone near angle {angle}")]
    LiftNonMonotone { angle: f64 },
    #[error("root {modulus} escaped the closed unit disk")]
    RootEscape { modulus: f64 },
    #[error("a preimage lies at the origin (|z| = {modulus:e}); perturb w")]
    LogSingularity { modulus: f64 },
    #[error("multiplier at the fixed point vanishes (|F'(0)| = {modulus:e})")]
    ZeroMultiplier { modulus: f64 },
    #[error("work estimate {predicted:.3e} exceeds the budget {budget:.3e}")]
    BudgetExceeded { predicted: f64, budget: f64 },
    #[error("base point is not fixed: |F(p) - p| = {residual:e}")]
    NotFixed { residual: f64 },
    #[error("orbit passes within {distance:e} of a partition endpoint at step {step}")]
    ExceptionalPoint { step: usize, distance: f64 },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("spectral gap lost: subleading ratio {ratio} > {limit}")]
    GapLost { ratio: f64, limit: f64 },
    #[error("no primitivity witness of length <= {max_len}")]
    NotFoundWithinBudget { max_len: usize },
    #[error("summability violated: {0}")]
    SummabilityViolated(String),
    #[error("Poincare series diverges at s = {s}")]
    DivergentSeries { s: String },
    #[error("correlation terms fail to decay (last ratio {ratio})")]
    NonDecaying { ratio: f64 },
    #[error("variance {sigma2:e} is degenerate")]
    DegenerateVariance { sigma2: f64 },
    #[error("map is not doubly parabolic: {0}")]
    NotDoublyParabolic(String),
    #[error("bisection failed on [{lo}, {hi}]")]
    BisectionFail { lo: f64, hi: f64 },
    #[error("no return to the core interval within {cap} iterations")]
    NoReturnWithinCap { cap: usize },
    #[error("estimated tail {tail:e} exceeds {limit:e}")]
    TailBoundExceeded { tail: f64, limit: f64 },
}

impl Error {
    /// Budget or convergence failures, as opposed to malformed requests.
    pub fn is_runtime(&self) -> bool {
        !matches!(
            self,
            Error::InvalidInput(_) | Error::NotDoublyParabolic(_) | Error::NotFixed { .. }
        )
    }
}
