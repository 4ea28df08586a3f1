use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("variable index must be positive")]
    ZeroVariable,

    #[error("variable x{var} is outside the ring x1..x{n}")]
    VariableOutOfRange { var: u32, n: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("polynomial is not homogeneous of degree {expected}")]
    NotHomogeneous { expected: usize },

    #[error("monomial {0} is not squarefree")]
    NotSquarefree(String),

    #[error("degree {requested} exceeds the manifold dimension {dim}")]
    DegreeTooLarge { requested: usize, dim: usize },

    #[error("dimension {n} requires n = 1 mod 4")]
    NotOneModFour { n: usize },

    #[error("unsupported dimension class: n = {n} is divisible by 4 and no explicit orientable example is constructed for it")]
    UnsupportedDimension { n: usize },

    #[error("direct method is capped at n <= {cap}, got n = {n}")]
    ExceedsDirectCap { n: usize, cap: usize },

    #[error("x{i}^{e} has no closed form in the last variable unless the exponent is a power of two")]
    NotPowerOfTwo { i: usize, e: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration of {count} cases exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("invalid Dold parameters: {0}")]
    InvalidDold(String),
}

pub type Result<T> = std::result::Result<T, Error>;
