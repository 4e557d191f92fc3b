use std::fmt::Write as _;
use std::path::Path;

use crate::histogram::DEFAULT_REP_PERIOD_NS;
use crate::{CoincidenceHistogram, CorrelationError};

/// Reads a coincidence histogram CSV: `# bin_width_ns=<w>`, optional
/// `# rep_period_ns=<T>` (default 12.5), optional `delay_ns,counts`
/// header, then rows.
pub fn load_coincidences(
    path: impl AsRef<Path>,
) -> Result<CoincidenceHistogram, CorrelationError> {
    parse_coincidences(&std::fs::read_to_string(path)?)
}

/// Parses the coincidence CSV format from a string.
pub fn parse_coincidences(text: &str) -> Result<CoincidenceHistogram, CorrelationError> {
    let mut declared_width: Option<f64> = None;
    let mut rep_period = DEFAULT_REP_PERIOD_NS;
    let mut delays = Vec::new();
    let mut counts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("bin_width_ns=") {
                declared_width = Some(parse_positive(v, "bin_width_ns", line_no)?);
            } else if let Some(v) = rest.strip_prefix("rep_period_ns=") {
                rep_period = parse_positive(v, "rep_period_ns", line_no)?;
            }
            continue;
        }
        if line.starts_with("delay_ns") {
            continue;
        }
        let mut parts = line.split(',');
        let (t_str, c_str) = match (parts.next(), parts.next()) {
            (Some(t), Some(c)) if parts.next().is_none() => (t, c),
            _ => {
                return Err(CorrelationError::Parse {
                    line: line_no,
                    message: format!("expected `delay_ns,counts`, got {line:?}"),
                })
            }
        };
        let t: f64 = t_str.trim().parse().map_err(|_| CorrelationError::Parse {
            line: line_no,
            message: format!("bad delay value {t_str:?}"),
        })?;
        let c: f64 = c_str.trim().parse().map_err(|_| CorrelationError::Parse {
            line: line_no,
            message: format!("bad count value {c_str:?}"),
        })?;
        if !(c.is_finite() && c >= 0.0 && c.fract() == 0.0) {
            return Err(CorrelationError::Parse {
                line: line_no,
                message: format!("counts must be non-negative integers, got {c_str:?}"),
            });
        }
        delays.push(t);
        counts.push(c as u64);
    }
    let width = declared_width.ok_or(CorrelationError::Parse {
        line: 1,
        message: "missing `# bin_width_ns=` header".into(),
    })?;
    let hist = CoincidenceHistogram::with_rep_period(delays, counts, rep_period)?;
    if (hist.bin_width_ns() - width).abs() > 1e-3 * width {
        return Err(CorrelationError::Parse {
            line: 1,
            message: format!(
                "declared bin_width_ns={width} disagrees with axis spacing {}",
                hist.bin_width_ns()
            ),
        });
    }
    Ok(hist)
}

fn parse_positive(
    text: &str,
    name: &str,
    line: usize,
) -> Result<f64, CorrelationError> {
    let v: f64 = text.trim().parse().map_err(|_| CorrelationError::Parse {
        line,
        message: format!("bad {name} value {text:?}"),
    })?;
    if !(v.is_finite() && v > 0.0) {
        return Err(CorrelationError::Parse {
            line,
            message: format!("{name} must be positive, got {v}"),
        });
    }
    Ok(v)
}

/// Writes the histogram in the same CSV format `load_coincidences` reads.
pub fn save_coincidences(
    path: impl AsRef<Path>,
    hist: &CoincidenceHistogram,
) -> Result<(), CorrelationError> {
    let mut out = String::new();
    let _ = writeln!(out, "# bin_width_ns={}", hist.bin_width_ns());
    let _ = writeln!(out, "# rep_period_ns={}", hist.rep_period_ns());
    out.push_str("delay_ns,counts\n");
    for (&t, &c) in hist.delays_ns().iter().zip(hist.counts()) {
        let _ = writeln!(out, "{t},{c}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_rep_period_header() {
        let text = "# bin_width_ns=0.5\n# rep_period_ns=13.1\ndelay_ns,counts\n-0.5,3\n0,9\n0.5,2\n";
        let h = parse_coincidences(text).unwrap();
        assert_eq!(h.rep_period_ns(), 13.1);
        assert_eq!(h.counts(), &[3, 9, 2]);
    }

    #[test]
    fn default_rep_period_applies() {
        let h = parse_coincidences("# bin_width_ns=1\n0,1\n1,2\n").unwrap();
        assert_eq!(h.rep_period_ns(), 12.5);
    }

    #[test]
    fn missing_width_header_fails() {
        assert!(matches!(
            parse_coincidences("0,1\n1,2\n"),
            Err(CorrelationError::Parse { line: 1, .. })
        ));
    }
}
