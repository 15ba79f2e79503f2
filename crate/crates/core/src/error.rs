//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when evaluating the channel model.
///
/// All constructors validate their inputs up front and return one of these
/// variants instead of producing NaN or silently clamping.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The time-bandwidth product `alpha * beta` must exceed 1 for the
    /// localization filter to be a well-defined trace-class operator.
    #[error("inadmissible channel: alpha*beta = {product} must be > 1 (alpha = {alpha}, beta = {beta})")]
    Inadmissible { alpha: f64, beta: f64, product: f64 },

    /// A scalar argument fell outside the mathematical domain of the
    /// operation; `requirement` describes the constraint that failed.
    #[error("domain error: {name} = {value} violates {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A basis-function order beyond the supported range was requested.
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    /// A water-filling problem would require more subchannels than the
    /// solver is willing to enumerate.
    #[error("water-filling would activate more than {max} subchannels; reduce the energy budget")]
    TooManySubchannels { max: usize },

    /// A sample grid is malformed or too coarse/short for the requested
    /// operation.  The message says which adequacy condition failed.
    #[error("inadequate grid: {reason}")]
    InadequateGrid { reason: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }
}
