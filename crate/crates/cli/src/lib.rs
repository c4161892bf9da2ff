//! Command-line front end and artifact emission: CSV, SVG, and run
//! manifests for the searches, flows, and verification routines.

pub mod args;
pub mod commands;
pub mod csv;
pub mod manifest;
pub mod svg;

use std::path::Path;

/// Exit codes: 0 success, 2 search failure, 3 input error, 4 internal.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    match commands::dispatch(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) | CliError::Input(_) => 3,
                CliError::SearchFailure(_) => 2,
                CliError::Internal(_) => 4,
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    SearchFailure(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Input(s) => write!(f, "{s}"),
            CliError::SearchFailure(s) => write!(f, "{s}"),
            CliError::Internal(s) => write!(f, "{s}"),
        }
    }
}

impl From<shrinker_core::Error> for CliError {
    fn from(e: shrinker_core::Error) -> Self {
        use shrinker_core::Error as E;
        match e {
            E::SearchFailure { .. } => CliError::SearchFailure(e.to_string()),
            E::Input(_) | E::Domain(_) | E::Geometry(_) | E::NotFound(_) => {
                CliError::Input(e.to_string())
            }
            E::FlowStalled(_) | E::Io(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Writes a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
