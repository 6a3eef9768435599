use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("{what} = {value} outside domain: {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    /// A failure raised by an evaluator inside a sandwich sum.
    #[error("sandwich step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("malformed container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    /// True for failures caused by the environment (memory, files) rather
    /// than by the mathematical input.
    pub fn is_resource(&self) -> bool {
        match self {
            Error::Resource(_) | Error::Format(_) | Error::Io(_) => true,
            Error::Step { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}
