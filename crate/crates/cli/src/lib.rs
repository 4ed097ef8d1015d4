//! Command-line front end for `kronecker-stab`.

pub mod args;
pub mod commands;
pub mod figure;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use args::{Cli, Command, Format};
pub use commands::execute;

/// Failure of a command. Usage errors exit with 2, domain errors with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<kronecker_stab::Error> for CliError {
    fn from(e: kronecker_stab::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<kronecker_stab::lifting::LiftError> for CliError {
    fn from(e: kronecker_stab::lifting::LiftError) -> Self {
        match e {
            kronecker_stab::lifting::LiftError::EmptyPath => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

/// Parses a complex literal.
///
/// Grammar: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, with optional spaces and
/// exponents (`1e-3+2.5i`). `j` is accepted in place of `i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('j', "i");
    if cleaned.is_empty() {
        return Err(CliError::Usage("empty complex literal".into()));
    }
    Complex64::from_str(&cleaned).map_err(|_| CliError::Usage(format!("cannot parse complex literal {s:?}")))
}

/// Parses `z0,z1`.
pub fn parse_pair(s: &str) -> Result<(Complex64, Complex64), CliError> {
    let mut parts = s.split(',');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => Ok((parse_complex(a)?, parse_complex(b)?)),
        _ => Err(CliError::Usage(format!("expected z0,z1, got {s:?}"))),
    }
}
