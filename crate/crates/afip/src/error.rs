use thiserror::Error;

/// Every failure mode the pipeline can surface. Each variant carries enough
/// context to point at the offending file, line, or game.
#[derive(Debug, Error)]
pub enum Error {
    #[error("MalformedInnings: {0:?} is not thirds notation (whole innings, or `W.d` with d in 0..=2)")]
    MalformedInnings(String),

    #[error("SchemaError: required column {0:?} is missing")]
    SchemaError(String),

    #[error("ParseError: line {line}: {msg}")]
    ParseError { line: u64, msg: String },

    #[error("UnmatchedGame: no {opponent} pitching rows for game on {date}")]
    UnmatchedGame { date: chrono::NaiveDate, opponent: String },

    #[error("AmbiguousMatch: {date} vs {opponent}: {batting} batting game(s) but {pitching} opponent pitching game(s)")]
    AmbiguousMatch {
        date: chrono::NaiveDate,
        opponent: String,
        batting: usize,
        pitching: usize,
    },

    #[error("UndefinedFip: zero outs recorded, FIP is undefined")]
    UndefinedFip,

    #[error("EmptySample: operation requires at least one value")]
    EmptySample,

    #[error("InvalidPercentile: {0} is outside [0, 100]")]
    InvalidPercentile(f64),

    #[error("InvalidBinWidth: {0} (must be > 0)")]
    InvalidBinWidth(f64),

    #[error("NonFiniteValue: sample contains a NaN or infinite value")]
    NonFiniteValue,

    #[error("DegenerateCorrelation: zero variance in x or y")]
    DegenerateCorrelation,

    #[error("OneSidedSeason: season has no {0} games")]
    OneSidedSeason(&'static str),

    #[error("InvalidTransform: scale {0} is not positive")]
    InvalidTransform(f64),

    #[error("UnknownOpponent: pitcher {pitcher} on {date}: no sample for {opponent}")]
    UnknownOpponent {
        pitcher: String,
        date: chrono::NaiveDate,
        opponent: String,
    },

    #[error("MixedSeries: games span more than one team or season ({0})")]
    MixedSeries(String),

    #[error("IoError: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CsvError: {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }

    pub fn csv(path: &std::path::Path, source: csv::Error) -> Self {
        Error::Csv { path: path.display().to_string(), source }
    }
}
