//! Subcommand implementations.

pub mod export;
pub mod fit;
pub mod risk;
pub mod severity;
pub mod synth;

use crate::CliError;

pub(crate) fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub(crate) fn numeric_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Parses a year range flag: `2016` or `2016-2018`.
pub(crate) fn parse_year_range(range: &str) -> Result<(i32, i32), CliError> {
    let bad = || CliError::Input(format!("bad --range {range:?}; expected YYYY or YYYY-YYYY"));
    let parts: Vec<&str> = range.split('-').collect();
    match parts.as_slice() {
        [year] => {
            let y: i32 = year.parse().map_err(|_| bad())?;
            Ok((y, y))
        }
        [first, last] => {
            let a: i32 = first.parse().map_err(|_| bad())?;
            let b: i32 = last.parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            Ok((a, b))
        }
        _ => Err(bad()),
    }
}
