use std::fmt::Write as _;
use std::path::Path;

use crate::{DesignLabel, EtchError, EtchRecord, EtchSeries, RecordFlag};

const HEADER: &str = "device_id,design,cycle,Ec_RT_eV,Ec_LT_eV,Q,flag";

/// Reads an etch series CSV with columns
/// `device_id,design,cycle,Ec_RT_eV,Ec_LT_eV,Q,flag`; empty fields are
/// absent values.
pub fn load_series(path: impl AsRef<Path>) -> Result<EtchSeries, EtchError> {
    parse_series(&std::fs::read_to_string(path)?)
}

/// Parses the etch series CSV format from a string.
pub fn parse_series(text: &str) -> Result<EtchSeries, EtchError> {
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("device_id") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(EtchError::Parse {
                line: line_no,
                message: format!("expected 7 columns `{HEADER}`, got {}", fields.len()),
            });
        }
        let design = DesignLabel::parse(fields[1]).ok_or_else(|| EtchError::Parse {
            line: line_no,
            message: format!("unknown design {:?} (want d1|d2|d3|other)", fields[1]),
        })?;
        let cycle: u32 = fields[2].parse().map_err(|_| EtchError::Parse {
            line: line_no,
            message: format!("bad cycle {:?}", fields[2]),
        })?;
        let flag = RecordFlag::parse(fields[6]).ok_or_else(|| EtchError::Parse {
            line: line_no,
            message: format!("unknown flag {:?} (want ok|poor_vacuum)", fields[6]),
        })?;
        records.push(EtchRecord {
            device_id: fields[0].to_string(),
            design,
            cycle,
            e_c_rt_ev: optional_number(fields[3], "Ec_RT_eV", line_no)?,
            e_c_lt_ev: optional_number(fields[4], "Ec_LT_eV", line_no)?,
            q: optional_number(fields[5], "Q", line_no)?,
            flag,
        });
    }
    EtchSeries::new(records)
}

fn optional_number(
    text: &str,
    name: &str,
    line: usize,
) -> Result<Option<f64>, EtchError> {
    if text.is_empty() {
        return Ok(None);
    }
    text.parse().map(Some).map_err(|_| EtchError::Parse {
        line,
        message: format!("bad {name} value {text:?}"),
    })
}

/// Writes the series in the format `load_series` reads.
pub fn save_series(path: impl AsRef<Path>, series: &EtchSeries) -> Result<(), EtchError> {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in series.records() {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.device_id,
            r.design.as_str(),
            r.cycle,
            opt(r.e_c_rt_ev),
            opt(r.e_c_lt_ev),
            opt(r.q),
            r.flag.as_str()
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}
