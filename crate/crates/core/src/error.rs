use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("root finder failed for {kind} zero n={n} of order l={l}: bracket [{lo}, {hi}] ({detail})")]
    ZeroNotFound {
        kind: &'static str,
        l: u32,
        n: u32,
        lo: f64,
        hi: f64,
        detail: String,
    },

    #[error("quadrature did not converge: last two estimates {previous} and {last}")]
    Quadrature { previous: f64, last: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "search window too small: level {level_count} has total {level_total:.6} but the \
         window ceiling is {ceiling:.6} (need at least twice the level); enlarge n_max/l_max"
    )]
    WindowTooSmall {
        level_count: usize,
        level_total: f64,
        ceiling: f64,
    },

    #[error("length mismatch: computed table has {computed} rows, reference has {reference}")]
    LengthMismatch { computed: usize, reference: usize },

    #[error("reference row for mode (n={n}, l={l}, |m|={m}) has no match in the computed table")]
    UnmatchedReference { n: u32, l: u32, m: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
