use cbr_fit::{least_squares_fit, CurveModel};
use cbr_spectra::CONSTANTS;

use crate::CoherenceError;

/// One piezo scan of interference fringes at a fixed coarse delay.
#[derive(Debug, Clone)]
pub struct FringeScan {
    positions_nm: Vec<f64>,
    intensities: Vec<f64>,
    stage_delay_ps: f64,
}

const MIN_SAMPLES: usize = 8;

impl FringeScan {
    /// Builds a scan from piezo mirror positions (nm) and detected
    /// intensities (counts); `stage_delay_ps` is the coarse delay the
    /// linear stage was parked at.
    pub fn new(
        positions_nm: Vec<f64>,
        intensities: Vec<f64>,
        stage_delay_ps: f64,
    ) -> Result<Self, CoherenceError> {
        let n = positions_nm.len();
        if n < MIN_SAMPLES || intensities.len() != n {
            return Err(CoherenceError::TooFewPoints {
                n: n.min(intensities.len()),
                min: MIN_SAMPLES,
            });
        }
        for (i, &x) in positions_nm.iter().enumerate() {
            if !x.is_finite() {
                return Err(CoherenceError::NonFinite { what: "position", index: i });
            }
        }
        for (i, &y) in intensities.iter().enumerate() {
            if !y.is_finite() {
                return Err(CoherenceError::NonFinite { what: "intensity", index: i });
            }
            if y < 0.0 {
                return Err(CoherenceError::NegativeIntensity { index: i });
            }
        }
        if !(stage_delay_ps.is_finite()) {
            return Err(CoherenceError::NonFinite { what: "stage delay", index: 0 });
        }
        Ok(Self { positions_nm, intensities, stage_delay_ps })
    }

    pub fn positions_nm(&self) -> &[f64] {
        &self.positions_nm
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn stage_delay_ps(&self) -> f64 {
        self.stage_delay_ps
    }
}

/// Converts a stage displacement (mm) to interferometer delay (ps). The
/// beam traverses the moved arm twice, so t = 2 dx / c.
pub fn stage_delay_ps(displacement_mm: f64) -> f64 {
    let c_mm_per_ps = CONSTANTS.c_m_per_s * 1e-9;
    2.0 * displacement_mm / c_mm_per_ps
}

/// Quadrature sums of the mean-subtracted intensities at spatial
/// frequency `freq` (cycles per nm): returns (sum cos, sum sin, mean).
fn quadrature(positions: &[f64], intensities: &[f64], freq: f64) -> (f64, f64, f64) {
    let n = positions.len() as f64;
    let mean = intensities.iter().sum::<f64>() / n;
    let mut sc = 0.0;
    let mut ss = 0.0;
    for (&x, &y) in positions.iter().zip(intensities) {
        let phase = 2.0 * std::f64::consts::PI * freq * x;
        sc += (y - mean) * phase.cos();
        ss += (y - mean) * phase.sin();
    }
    (sc, ss, mean)
}

/// Extracts the fringe visibility from one piezo scan by fitting
/// I(x) = I0 (1 + nu cos(4 pi x / lambda + phi)). Returns the fitted nu
/// (clamped to [0, 1] through the fit bounds) and its 1-sigma
/// uncertainty. `wavelength_nm` is the emission wavelength; the fringe
/// period in mirror displacement is half of it.
pub fn fringe_visibility(
    scan: &FringeScan,
    wavelength_nm: f64,
) -> Result<(f64, f64), CoherenceError> {
    if !(wavelength_nm.is_finite() && wavelength_nm > 0.0) {
        return Err(CoherenceError::NonPositiveValue {
            name: "wavelength",
            value: wavelength_nm,
        });
    }
    let period = wavelength_nm / 2.0;
    let x = scan.positions_nm();
    let y = scan.intensities();
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - x.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < period {
        return Err(CoherenceError::ScanTooShort { span_nm: span, need_nm: period });
    }
    // The visibility is treated as constant over the scan, which only
    // holds for short scans.
    if span > 2.0 * period {
        return Err(CoherenceError::ScanTooLong { span_nm: span, limit_nm: 2.0 * period });
    }

    let expected_freq = 2.0 / wavelength_nm;
    let (sc, ss, mean) = quadrature(x, y, expected_freq);
    if mean <= 0.0 {
        return Err(CoherenceError::NonPositiveBaseline(mean));
    }
    let n = x.len() as f64;
    let nu_init = (2.0 * (sc * sc + ss * ss).sqrt() / (n * mean)).min(1.0);
    if nu_init < 1e-12 {
        // No fringe power at the expected period, so the phase is
        // undetermined and the cosine fit would be rank deficient.
        // Report nu = 0 with an amplitude sensitivity set by the
        // residual scatter.
        let dof = (x.len() - 1) as f64;
        let s2 = y.iter().map(|&yi| (yi - mean) * (yi - mean)).sum::<f64>() / dof;
        return Ok((0.0, (2.0 / n).sqrt() * s2.sqrt() / mean));
    }

    // Guard against data recorded at the wrong fringe period: scan the
    // quadrature amplitude over a frequency band and require the peak to
    // sit within 20% of the expected spatial frequency. Skipped when the
    // fringes are too weak for the peak location to mean anything.
    if nu_init > 0.02 {
        let mut best_freq = expected_freq;
        let mut best_amp = 0.0;
        let steps = 600;
        for i in 0..=steps {
            let f = expected_freq * (0.4 + 2.1 * i as f64 / steps as f64);
            let (c, s, _) = quadrature(x, y, f);
            let amp = c * c + s * s;
            if amp > best_amp {
                best_amp = amp;
                best_freq = f;
            }
        }
        if (best_freq - expected_freq).abs() > 0.2 * expected_freq {
            return Err(CoherenceError::PeriodMismatch {
                found_nm: 2.0 / best_freq,
                expected_nm: wavelength_nm,
            });
        }
    }

    let phi_init = (-ss).atan2(sc);
    let model = CurveModel::new(
        move |x: f64, p: &[f64]| {
            p[0] * (1.0 + p[1] * (4.0 * std::f64::consts::PI * x / wavelength_nm + p[2]).cos())
        },
        3,
        x,
        y,
    )
    .with_bounds(vec![
        (0.0, f64::INFINITY),
        (0.0, 1.0),
        (f64::NEG_INFINITY, f64::INFINITY),
    ]);
    let result = least_squares_fit(&model, &[mean, nu_init, phi_init])?;
    if !result.converged {
        return Err(CoherenceError::NotConverged {
            iterations: result.iterations,
            cost: result.cost_trace.last().copied().unwrap_or(f64::NAN),
        });
    }
    if result.params[0] <= 0.0 {
        return Err(CoherenceError::NonPositiveBaseline(result.params[0]));
    }
    let nu = result.params[1].clamp(0.0, 1.0);
    let err = result.uncertainties()[1];
    Ok((nu, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_from(f: impl Fn(f64) -> f64, step: f64, n: usize) -> FringeScan {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        FringeScan::new(xs, ys, 0.0).unwrap()
    }

    #[test]
    fn constant_intensity_has_zero_visibility() {
        let scan = scan_from(|_| 1000.0, 20.0, 25);
        let (nu, _) = fringe_visibility(&scan, 800.0).unwrap();
        assert!(nu.abs() < 1e-9, "nu = {nu}");
    }

    #[test]
    fn perfect_fringes_have_unit_visibility() {
        let lambda = 800.0;
        let scan = scan_from(
            |x| 500.0 * (1.0 + (4.0 * std::f64::consts::PI * x / lambda).cos()),
            20.0,
            25,
        );
        let (nu, _) = fringe_visibility(&scan, lambda).unwrap();
        assert!((nu - 1.0).abs() < 1e-9, "nu = {nu}");
    }

    #[test]
    fn half_visibility_recovered_noiselessly() {
        let lambda = 800.0;
        let scan = scan_from(
            |x| 200.0 * (1.0 + 0.5 * (4.0 * std::f64::consts::PI * x / lambda).cos()),
            20.0,
            22,
        );
        let (nu, err) = fringe_visibility(&scan, lambda).unwrap();
        assert!((nu - 0.5).abs() < 1e-6, "nu = {nu}");
        assert!(err < 1e-6);
    }

    #[test]
    fn wrong_period_is_rejected() {
        let lambda = 800.0;
        // Fringes at 1.6x the expected spatial frequency.
        let scan = scan_from(
            |x| 200.0 * (1.0 + 0.6 * (1.6 * 4.0 * std::f64::consts::PI * x / lambda).cos()),
            20.0,
            22,
        );
        assert!(matches!(
            fringe_visibility(&scan, lambda),
            Err(CoherenceError::PeriodMismatch { .. })
        ));
    }

    #[test]
    fn short_and_long_scans_are_rejected() {
        let lambda = 800.0;
        let f = |x: f64| 200.0 * (1.0 + 0.5 * (4.0 * std::f64::consts::PI * x / lambda).cos());
        // 8 samples * 20 nm = 140 nm span < 400 nm period.
        let short = scan_from(f, 20.0, 8);
        assert!(matches!(
            fringe_visibility(&short, lambda),
            Err(CoherenceError::ScanTooShort { .. })
        ));
        // 60 samples * 20 nm span > 800 nm limit.
        let long = scan_from(f, 20.0, 60);
        assert!(matches!(
            fringe_visibility(&long, lambda),
            Err(CoherenceError::ScanTooLong { .. })
        ));
    }

    #[test]
    fn stage_delay_doubles_path() {
        // 1 mm of stage travel adds 2 mm of path: 2 mm / c = 6.671... ps.
        let t = stage_delay_ps(1.0);
        assert!((t - 2.0 / 0.299_792_458).abs() < 1e-9, "t = {t}");
    }
}
