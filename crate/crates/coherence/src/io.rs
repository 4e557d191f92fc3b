use std::fmt::Write as _;
use std::path::Path;

use crate::{CoherenceError, FringeScan, VisibilityTrace};

/// Reads a fringe scan CSV: `# stage_delay_ps=<t>` header, optional
/// `position_nm,intensity` column header, then rows.
pub fn load_fringe_scan(path: impl AsRef<Path>) -> Result<FringeScan, CoherenceError> {
    parse_fringe_scan(&std::fs::read_to_string(path)?)
}

/// Parses the fringe scan CSV format from a string.
pub fn parse_fringe_scan(text: &str) -> Result<FringeScan, CoherenceError> {
    let mut stage_delay: Option<f64> = None;
    let mut positions = Vec::new();
    let mut intensities = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("stage_delay_ps=") {
                stage_delay =
                    Some(v.trim().parse().map_err(|_| CoherenceError::Parse {
                        line: line_no,
                        message: format!("bad stage_delay_ps value {v:?}"),
                    })?);
            }
            continue;
        }
        if line.starts_with("position_nm") {
            continue;
        }
        let (x, y) = two_columns(line, line_no)?;
        positions.push(x);
        intensities.push(y);
    }
    let delay = stage_delay.ok_or(CoherenceError::Parse {
        line: 1,
        message: "missing `# stage_delay_ps=` header".into(),
    })?;
    FringeScan::new(positions, intensities, delay)
}

/// Writes a fringe scan in the format `load_fringe_scan` reads.
pub fn save_fringe_scan(
    path: impl AsRef<Path>,
    scan: &FringeScan,
) -> Result<(), CoherenceError> {
    let mut out = String::new();
    let _ = writeln!(out, "# stage_delay_ps={}", scan.stage_delay_ps());
    out.push_str("position_nm,intensity\n");
    for (&x, &y) in scan.positions_nm().iter().zip(scan.intensities()) {
        let _ = writeln!(out, "{x},{y}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a visibility trace CSV with columns `delay_ps,visibility,err`.
pub fn load_visibility_trace(path: impl AsRef<Path>) -> Result<VisibilityTrace, CoherenceError> {
    parse_visibility_trace(&std::fs::read_to_string(path)?)
}

/// Parses the visibility trace CSV format from a string.
pub fn parse_visibility_trace(text: &str) -> Result<VisibilityTrace, CoherenceError> {
    let mut delays = Vec::new();
    let mut vis = Vec::new();
    let mut errs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("delay_ps") {
            continue;
        }
        let mut parts = line.split(',');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(v), Some(e)) if parts.next().is_none() => {
                delays.push(number(t, line_no)?);
                vis.push(number(v, line_no)?);
                errs.push(number(e, line_no)?);
            }
            _ => {
                return Err(CoherenceError::Parse {
                    line: line_no,
                    message: format!("expected `delay_ps,visibility,err`, got {line:?}"),
                })
            }
        }
    }
    VisibilityTrace::new(delays, vis, errs)
}

/// Writes a visibility trace in the format `load_visibility_trace` reads.
pub fn save_visibility_trace(
    path: impl AsRef<Path>,
    trace: &VisibilityTrace,
) -> Result<(), CoherenceError> {
    let mut out = String::from("delay_ps,visibility,err\n");
    for i in 0..trace.delays_ps().len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            trace.delays_ps()[i],
            trace.visibilities()[i],
            trace.uncertainties()[i]
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn two_columns(line: &str, line_no: usize) -> Result<(f64, f64), CoherenceError> {
    let mut parts = line.split(',');
    match (parts.next(), parts.next()) {
        (Some(a), Some(b)) if parts.next().is_none() => {
            Ok((number(a, line_no)?, number(b, line_no)?))
        }
        _ => Err(CoherenceError::Parse {
            line: line_no,
            message: format!("expected two comma-separated columns, got {line:?}"),
        }),
    }
}

fn number(text: &str, line_no: usize) -> Result<f64, CoherenceError> {
    text.trim().parse().map_err(|_| CoherenceError::Parse {
        line: line_no,
        message: format!("bad numeric value {text:?}"),
    })
}
