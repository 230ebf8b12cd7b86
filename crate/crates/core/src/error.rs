use thiserror::Error;

/// Location of a floor evaluation inside a counting problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloorSite {
    /// 1-based index of the coefficient `alpha_j`.
    pub j: usize,
    /// The integer argument `n` (or `d*n` on the Möbius route).
    pub n: u64,
}

impl std::fmt::Display for FloorSite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "j={}, n={}", self.j, self.n)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid real specification: {0}")]
    InvalidSpec(String),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("precision exhausted after {bits} bits{}", site.map(|s| format!(" at {s}")).unwrap_or_default())]
    PrecisionExhausted { bits: u32, site: Option<FloorSite> },

    #[error("no convergent found: {0}")]
    NoConvergent(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn exhausted(bits: u32) -> Self {
        Error::PrecisionExhausted { bits, site: None }
    }

    /// Attaches a floor site to a precision failure; other errors pass through.
    pub fn at(self, site: FloorSite) -> Self {
        match self {
            Error::PrecisionExhausted { bits, site: None } => Error::PrecisionExhausted {
                bits,
                site: Some(site),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
