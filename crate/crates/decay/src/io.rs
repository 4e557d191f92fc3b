use std::fmt::Write as _;
use std::path::Path;

use crate::histogram::BIN_TOL;
use crate::{DecayError, DecayHistogram};

/// Reads a TCSPC histogram CSV:
/// `# bin_width_ps=<w>`, optional `time_ps,counts` header, then rows.
pub fn load_histogram(path: impl AsRef<Path>) -> Result<DecayHistogram, DecayError> {
    parse_histogram(&std::fs::read_to_string(path)?)
}

/// Parses the histogram CSV format from a string.
pub fn parse_histogram(text: &str) -> Result<DecayHistogram, DecayError> {
    let mut declared_width: Option<f64> = None;
    let mut centers = Vec::new();
    let mut counts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(value) = rest.strip_prefix("bin_width_ps=") {
                let w: f64 = value.trim().parse().map_err(|_| DecayError::Parse {
                    line: line_no,
                    message: format!("bad bin_width_ps value {value:?}"),
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(DecayError::Parse {
                        line: line_no,
                        message: format!("bin_width_ps must be positive, got {w}"),
                    });
                }
                declared_width = Some(w);
            }
            continue;
        }
        if line.starts_with("time_ps") {
            continue; // column header
        }
        let mut parts = line.split(',');
        let (t_str, c_str) = match (parts.next(), parts.next()) {
            (Some(t), Some(c)) if parts.next().is_none() => (t, c),
            _ => {
                return Err(DecayError::Parse {
                    line: line_no,
                    message: format!("expected `time_ps,counts`, got {line:?}"),
                })
            }
        };
        let t: f64 = t_str.trim().parse().map_err(|_| DecayError::Parse {
            line: line_no,
            message: format!("bad time value {t_str:?}"),
        })?;
        let c: f64 = c_str.trim().parse().map_err(|_| DecayError::Parse {
            line: line_no,
            message: format!("bad count value {c_str:?}"),
        })?;
        if !(c.is_finite() && c >= 0.0 && c.fract() == 0.0) {
            return Err(DecayError::Parse {
                line: line_no,
                message: format!("counts must be non-negative integers, got {c_str:?}"),
            });
        }
        centers.push(t);
        counts.push(c as u64);
    }
    let width = declared_width.ok_or(DecayError::Parse {
        line: 1,
        message: "missing `# bin_width_ps=` header".into(),
    })?;
    let hist = DecayHistogram::new(centers, counts)?;
    if (hist.bin_width_ps() - width).abs() > BIN_TOL.max(1e-3) * width {
        return Err(DecayError::Parse {
            line: 1,
            message: format!(
                "declared bin_width_ps={width} disagrees with axis spacing {}",
                hist.bin_width_ps()
            ),
        });
    }
    Ok(hist)
}

/// Writes the histogram in the same CSV format `load_histogram` reads.
pub fn save_histogram(
    path: impl AsRef<Path>,
    hist: &DecayHistogram,
) -> Result<(), DecayError> {
    let mut out = String::new();
    let _ = writeln!(out, "# bin_width_ps={}", hist.bin_width_ps());
    out.push_str("time_ps,counts\n");
    for (&t, &c) in hist.bin_centers().iter().zip(hist.counts()) {
        let _ = writeln!(out, "{t},{c}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let text = "# bin_width_ps=4\ntime_ps,counts\n0,10\n4,20\n8,5\n";
        let h = parse_histogram(text).unwrap();
        assert_eq!(h.bin_width_ps(), 4.0);
        assert_eq!(h.counts(), &[10, 20, 5]);
    }

    #[test]
    fn missing_width_header_fails() {
        let err = parse_histogram("time_ps,counts\n0,1\n4,2\n").unwrap_err();
        assert!(matches!(err, DecayError::Parse { line: 1, .. }));
    }

    #[test]
    fn fractional_counts_fail_with_line_number() {
        let err = parse_histogram("# bin_width_ps=4\n0,1\n4,2.5\n").unwrap_err();
        match err {
            DecayError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn width_disagreement_fails() {
        let err = parse_histogram("# bin_width_ps=8\n0,1\n4,2\n8,3\n").unwrap_err();
        assert!(matches!(err, DecayError::Parse { .. }));
    }
}
