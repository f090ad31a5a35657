use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("element {element} is not valid for {group}")]
    InvalidElement { element: String, group: String },

    #[error("window of {requested} elements exceeds the cap of {cap}")]
    WindowOverflow { requested: u128, cap: usize },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("probe {probe} does not converge for leaf {leaf}: tail spread {spread:.3e} (tolerance {tolerance:.1e})")]
    DivergentProbe {
        probe: String,
        leaf: String,
        spread: f64,
        tolerance: f64,
    },

    #[error("unsupported coefficient algebra pattern: {reason} (subtree {subtree})")]
    UnsupportedAlgebraPattern { reason: String, subtree: String },

    #[error("coefficient is not slowly oscillating: {0}")]
    NotSlowlyOscillating(String),

    #[error("term count {count} exceeds the cap of {cap}")]
    TermCapExceeded { count: usize, cap: usize },

    #[error("margin {margin} is smaller than the required {required}")]
    MarginTooSmall { margin: usize, required: usize },

    #[error("group is not abelian; use the block eigensolver route")]
    NonAbelianGroup,

    #[error("dual data does not match the group: {0}")]
    DualMismatch(String),

    #[error("limit kernel has a coefficient outside Constant/Periodic: {0}")]
    UnsupportedLimitKernel(String),

    #[error("periods are incommensurable within the cell cap: {0}")]
    IncommensurablePeriods(String),

    #[error("eigensolver did not converge: {0}")]
    EigenNonConvergence(String),

    #[error("empty region: {0}")]
    EmptyBox(String),

    #[error("kernel has no terms")]
    EmptyKernel,

    #[error("{0}")]
    Invalid(String),
}
