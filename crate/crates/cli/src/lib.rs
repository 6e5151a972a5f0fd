//! Support code for the `qubo-persist` binary: graph sources and the
//! experiment drivers behind the `experiment` subcommand.

pub mod experiments;

use std::fs;
use std::path::Path;

use qubo_persist::decompose::DecomposeError;
use qubo_persist::graphs::{gen_cfat, gen_g, gen_gnp, gen_hamming, gen_u, Graph, GraphError};
use qubo_persist::oracle::OracleError;
use qubo_persist::persistency::PersistencyError;
use qubo_persist::problems::ProblemError;
use qubo_persist::ModelError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Persistency(#[from] PersistencyError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Generated graph families. `param` means: c-fat `c`, Hamming `d`
/// (with `n` the word length), g/U density in percent, gnp probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Cfat,
    Hamming,
    G,
    U,
    Gnp,
}

pub fn generate(family: Family, n: usize, param: f64, seed: u64) -> Result<Graph, Error> {
    let whole = |what: &str| -> Result<usize, Error> {
        if param < 0.0 || param.fract() != 0.0 {
            return Err(GraphError::InvalidParameter(format!("{what} must be a non-negative integer, got {param}")).into());
        }
        Ok(param as usize)
    };
    Ok(match family {
        Family::Cfat => gen_cfat(n, whole("c")?)?,
        Family::Hamming => gen_hamming(n as u32, whole("d")? as u32)?,
        Family::G => gen_g(n, param, seed)?,
        Family::U => gen_u(n, param, seed)?,
        Family::Gnp => gen_gnp(n, param, seed)?,
    })
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(rows)?)?;
    Ok(())
}
