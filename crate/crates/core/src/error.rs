use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input table is missing a required column.
    #[error("schema error: missing column `{0}`")]
    Schema(String),
    /// Data violates an invariant (gap year, non-positive value, bad parameter).
    #[error("validation error: {0}")]
    Validation(String),
    /// Configuration is malformed; every violation is listed.
    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("year {year} outside grid {start}..={end}")]
    Range { year: i32, start: i32, end: i32 },
    /// Non-finite state produced by a simulation.
    #[error("numerical error in {what} at year {year}")]
    Numerical { what: String, year: i32 },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("no interior optimum: quadratic coefficient {0} is not negative")]
    NoOptimum(f64),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Argument(_) => 2,
            Error::Schema(_) | Error::Validation(_) | Error::Range { .. } | Error::Domain(_) => 3,
            Error::Numerical { .. } | Error::Fit(_) | Error::NoOptimum(_) | Error::Calibration(_) => 4,
            Error::Trial { source, .. } => source.exit_code(),
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
