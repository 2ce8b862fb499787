use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("size limit exceeded: {what} is {got}, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        got: u128,
        limit: u128,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A formula was evaluated outside the hypotheses it is stated under.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("file error: {0}")]
    File(String),
}

impl Error {
    pub(crate) fn size_limit(
        what: &'static str,
        got: impl Into<u128>,
        limit: impl Into<u128>,
    ) -> Self {
        Error::SizeLimit {
            what,
            got: got.into(),
            limit: limit.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::File(err.to_string())
    }
}
