use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("generator x_{0} has no assigned matrix")]
    UnboundGenerator(u32),
    #[error("backend does not supply M-order {0}")]
    UnboundOrder(usize),
    #[error("backend does not supply W_{{2*{0}}}")]
    UnboundW(usize),
    #[error("Q_m is undetermined for m = N/2 (m = {m}, N = {n})")]
    SingularCase { m: i64, n: i64 },
    #[error("series truncated: coefficient of degree {0} is not available")]
    Truncated(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
