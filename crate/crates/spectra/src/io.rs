use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::{AxisKind, Spectrum, SpectrumError};

/// Loads a spectrum from CSV.
///
/// Expected layout: one or more `#` metadata lines carrying
/// `axis=wavelength_nm` (or `axis=energy_ev`) and an optional free-text
/// `label=...`, then `axis,intensity` rows. Rows may arrive in descending
/// axis order (spectrometers sweep wavelength); samples are sorted ascending
/// on load with the axis/intensity pairing preserved.
pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Spectrum, SpectrumError> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_spectrum(&text)
}

/// Parses the CSV format of [`load_spectrum`] from a string.
pub fn parse_spectrum(text: &str) -> Result<Spectrum, SpectrumError> {
    let mut axis_kind: Option<AxisKind> = None;
    let mut label = String::new();
    let mut axis = Vec::new();
    let mut intensity = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            parse_metadata(meta.trim(), lineno, &mut axis_kind, &mut label)?;
            continue;
        }
        // Tolerate a literal column-header row.
        if line.eq_ignore_ascii_case("axis,intensity") {
            continue;
        }
        let mut fields = line.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(SpectrumError::Parse {
                    line: lineno,
                    message: format!("expected 'axis,intensity', got '{line}'"),
                })
            }
        };
        let x: f64 = a.parse().map_err(|_| SpectrumError::Parse {
            line: lineno,
            message: format!("invalid axis value '{a}'"),
        })?;
        let y: f64 = b.parse().map_err(|_| SpectrumError::Parse {
            line: lineno,
            message: format!("invalid intensity value '{b}'"),
        })?;
        if !x.is_finite() || !y.is_finite() {
            return Err(SpectrumError::Parse {
                line: lineno,
                message: "non-finite sample".to_string(),
            });
        }
        axis.push(x);
        intensity.push(y);
    }

    let kind = axis_kind.ok_or_else(|| SpectrumError::Parse {
        line: 1,
        message: "missing '# axis=wavelength_nm' or '# axis=energy_ev' header".to_string(),
    })?;
    Spectrum::from_unsorted(axis, intensity, kind, label)
}

fn parse_metadata(
    meta: &str,
    lineno: usize,
    axis_kind: &mut Option<AxisKind>,
    label: &mut String,
) -> Result<(), SpectrumError> {
    // `label=` swallows the rest of the line so labels may contain spaces.
    let (head, tail_label) = match meta.split_once("label=") {
        Some((head, tail)) => (head, Some(tail)),
        None => (meta, None),
    };
    for token in head.split_whitespace() {
        if let Some(value) = token.strip_prefix("axis=") {
            *axis_kind = Some(match value {
                "wavelength_nm" => AxisKind::Wavelength,
                "energy_ev" => AxisKind::Energy,
                other => {
                    return Err(SpectrumError::Parse {
                        line: lineno,
                        message: format!("unknown axis kind '{other}'"),
                    })
                }
            });
        }
    }
    if let Some(tail) = tail_label {
        *label = tail.trim().to_string();
    }
    Ok(())
}

/// Writes a spectrum in the format accepted by [`load_spectrum`].
pub fn save_spectrum(path: impl AsRef<Path>, spectrum: &Spectrum) -> Result<(), SpectrumError> {
    let mut out = String::new();
    out.push_str(&format!(
        "# axis={} label={}\n",
        spectrum.axis_kind().header_key(),
        spectrum.label()
    ));
    out.push_str("axis,intensity\n");
    for (x, y) in spectrum.axis().iter().zip(spectrum.intensity()) {
        out.push_str(&format!("{x},{y}\n"));
    }
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
