use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dγ^{0} has a (0,2)-component; the almost complex structure is not integrable")]
    IntegrabilityError(usize),
    #[error("d∘d ≠ 0: {0}")]
    FlatnessError(String),
    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    JacobiError(usize, usize, usize),
    #[error("endomorphism has a constant term; Neumann series not available")]
    NotPerturbative,
    #[error("coframe change 1+φ+φ̄ is singular at the evaluation point")]
    NonInvertibleCoframe,
    #[error("Beltrami differential is not integrable")]
    NotIntegrable,
    #[error("∂∂̄-equation has no solution: {0}")]
    NotSolvable(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("obstruction does not vanish at order {order} ({component})")]
    ObstructionNonvanishing { order: u32, component: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, NilError>;
