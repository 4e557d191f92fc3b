//! One module per subcommand.  Each `run` takes the shared [`crate::run::Run`]
//! context, loads its inputs, computes, and writes a JSON report plus plot
//! artifacts through the context so every output lands in the chosen
//! directory with the seed recorded.

pub mod etch;
pub mod fano;
pub mod g2;
pub mod lifetime;
pub mod michelson;
pub mod simulate;
pub mod sweep;

use crate::errors::CliError;

/// Parses `"VALUE"` or `"VALUE,SIGMA"` into a (value, one-sigma) pair.
pub fn parse_value_sigma(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let mut parts = text.split(',');
    let bad = || CliError::input(format!("{what} expects VALUE or VALUE,SIGMA, got '{text}'"));
    let value: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let sigma: f64 = match parts.next() {
        Some(s) => s.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !value.is_finite() || !sigma.is_finite() || sigma < 0.0 {
        return Err(bad());
    }
    Ok((value, sigma))
}
