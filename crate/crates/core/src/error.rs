use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("machines were built against different symbol tables")]
    TableMismatch,

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("no accepting path")]
    NoPath,

    #[error("no analysis for `{substring}` at character {offset}")]
    NoAnalysis { offset: usize, substring: String },

    #[error("every analysis was removed by the language-model filters")]
    EmptyAfterFiltering,

    #[error("no pronunciation for `{0}`")]
    NoPronunciation(String),

    #[error("unknown paradigm `{0}`")]
    UnknownParadigm(String),

    #[error("undeclared state `{0}`")]
    UndeclaredState(String),

    #[error("unresolved sub-lexicon `{0}`")]
    UnresolvedLexicon(String),

    #[error("component `{0}` is empty")]
    EmptyComponent(String),

    #[error("number lexicon does not cover `{witness}`")]
    Uncovered { witness: String },

    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },

    #[error("{}: {inner}", path.display())]
    InFile {
        path: PathBuf,
        inner: Box<Error>,
    },

    #[error("component `{name}`: {inner}")]
    Component {
        name: String,
        inner: Box<Error>,
    },

    #[error("{stage}: {inner}")]
    Stage {
        stage: &'static str,
        inner: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::InFile {
            path: path.into(),
            inner: Box::new(self),
        }
    }

    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            inner: Box::new(self),
        }
    }

    /// Strips file and stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { inner, .. }
            | Error::Stage { inner, .. }
            | Error::Component { inner, .. } => inner.root(),
            e => e,
        }
    }
}
