use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        field: String,
        message: String,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error("insufficient data for {team}: {found} observations, need at least {required}")]
    InsufficientData {
        team: String,
        found: usize,
        required: usize,
    },

    #[error("no Elo rating for {0}")]
    UnknownTeam(String),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("fit did not converge after {iterations} iterations (log-likelihood trace: {trace:?})")]
    NoConvergence { iterations: usize, trace: Vec<f64> },

    #[error("overparameterized: {n_obs} observations for {n_params} parameters")]
    Overparameterized { n_obs: usize, n_params: usize },

    #[error("fitting {team}: {source}")]
    Team {
        team: String,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn for_team(self, team: &str) -> Self {
        match self {
            e @ (Error::InsufficientData { .. } | Error::Team { .. }) => e,
            other => Error::Team {
                team: team.to_string(),
                source: Box::new(other),
            },
        }
    }
}
