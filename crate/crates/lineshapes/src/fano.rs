use cbr_fit::{least_squares_fit, CurveModel};
use cbr_spectra::{AxisKind, PhotonEnergy, Spectrum, CONSTANTS};
use serde::Serialize;

use crate::LineshapeError;

/// Minimum number of samples a windowed Fano fit needs for its 5 parameters.
const MIN_FIT_SAMPLES: usize = 8;
/// Auto-window half width in units of the estimated linewidth.
const WINDOW_HALF_WIDTHS: f64 = 5.0;

/// Parameters of the Fano profile
/// `I(E) = B + A (q + Omega)^2 / (1 + Omega^2)`, `Omega = 2 (E - E_c) / Gamma_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanoParams {
    /// Resonance amplitude `A`.
    pub amplitude: f64,
    /// Background level `B`.
    pub background: f64,
    /// Asymmetry parameter `q` (0 gives an inverted Lorentzian dip).
    pub q: f64,
    /// Resonance center `E_c` in eV.
    pub center_ev: f64,
    /// Full linewidth `Gamma_c` in eV, strictly positive.
    pub gamma_ev: f64,
}

impl FanoParams {
    pub fn new(
        amplitude: f64,
        background: f64,
        q: f64,
        center_ev: f64,
        gamma_ev: f64,
    ) -> Result<Self, LineshapeError> {
        for (name, value) in [
            ("amplitude", amplitude),
            ("background", background),
            ("q", q),
            ("center_ev", center_ev),
        ] {
            if !value.is_finite() {
                return Err(LineshapeError::NonFiniteParam { name, value });
            }
        }
        if !gamma_ev.is_finite() || gamma_ev <= 0.0 {
            return Err(LineshapeError::InvalidGamma(gamma_ev));
        }
        Ok(Self { amplitude, background, q, center_ev, gamma_ev })
    }
}

/// Evaluates the Fano profile at photon energy `e_ev`.
pub fn fano_value(e_ev: f64, params: &FanoParams) -> f64 {
    let omega = 2.0 * (e_ev - params.center_ev) / params.gamma_ev;
    let shape = params.q + omega;
    params.background + params.amplitude * shape * shape / (1.0 + omega * omega)
}

/// Cavity quality factor `Q = E_c / Gamma_c`.
pub fn quality_factor(center: PhotonEnergy, gamma_ev: f64) -> Result<f64, LineshapeError> {
    if !gamma_ev.is_finite() || gamma_ev <= 0.0 {
        return Err(LineshapeError::InvalidGamma(gamma_ev));
    }
    Ok(center.ev() / gamma_ev)
}

/// Result of a windowed Fano fit.
#[derive(Debug, Clone)]
pub struct FanoFit {
    pub params: FanoParams,
    /// One-sigma uncertainties ordered `[A, B, q, E_c, Gamma_c]`.
    pub uncertainties: [f64; 5],
    pub reduced_chi2: f64,
    /// Energy window `[lo, hi]` (eV) the fit actually used.
    pub window: (f64, f64),
    pub iterations: usize,
}

impl FanoFit {
    /// `Q = E_c / Gamma_c`.
    pub fn quality(&self) -> f64 {
        self.params.center_ev / self.params.gamma_ev
    }

    /// Resonance center expressed as a vacuum wavelength in nm.
    pub fn center_nm(&self) -> f64 {
        CONSTANTS.hc_ev_nm / self.params.center_ev
    }

    /// Serializable record of this fit.
    pub fn report(&self) -> FanoReport {
        FanoReport {
            model: "fano",
            params: self.params,
            uncertainties: FanoUncertainties {
                amplitude: self.uncertainties[0],
                background: self.uncertainties[1],
                q: self.uncertainties[2],
                center_ev: self.uncertainties[3],
                gamma_ev: self.uncertainties[4],
            },
            reduced_chi2: self.reduced_chi2,
            window: [self.window.0, self.window.1],
            e_c_ev: self.params.center_ev,
            e_c_nm: self.center_nm(),
            q_factor: self.quality(),
        }
    }
}

/// JSON-serializable Fano fit record.
#[derive(Debug, Clone, Serialize)]
pub struct FanoReport {
    pub model: &'static str,
    pub params: FanoParams,
    pub uncertainties: FanoUncertainties,
    pub reduced_chi2: f64,
    pub window: [f64; 2],
    #[serde(rename = "E_c_eV")]
    pub e_c_ev: f64,
    #[serde(rename = "E_c_nm")]
    pub e_c_nm: f64,
    #[serde(rename = "Q")]
    pub q_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanoUncertainties {
    pub amplitude: f64,
    pub background: f64,
    pub q: f64,
    pub center_ev: f64,
    pub gamma_ev: f64,
}

/// Fits a Fano dip to a spectrum.
///
/// Fitting happens on the energy axis; wavelength spectra are converted
/// first, so `window` is always `(lo, hi)` in eV. With `window = None` the
/// window is placed automatically at +-5 estimated linewidths around the
/// deepest dip. Initial values follow the shape of a reflectance dip:
/// center at the minimum, linewidth from the half-depth width, `q = 0`,
/// background from the window edges.
pub fn fit_fano(
    spectrum: &Spectrum,
    window: Option<(f64, f64)>,
) -> Result<FanoFit, LineshapeError> {
    let spectrum = spectrum.to_axis_kind(AxisKind::Energy)?;
    let axis = spectrum.axis();
    let intensity = spectrum.intensity();

    let (lo, hi) = match window {
        Some((lo, hi)) => {
            if lo >= hi || hi < axis[0] || lo > axis[axis.len() - 1] {
                return Err(LineshapeError::WindowOutsideAxis { lo, hi });
            }
            (lo, hi)
        }
        None => auto_window(axis, intensity)?,
    };

    let start = axis.partition_point(|&x| x < lo);
    let end = axis.partition_point(|&x| x <= hi);
    let n = end.saturating_sub(start);
    if n < MIN_FIT_SAMPLES {
        return Err(LineshapeError::TooFewSamples { n, min: MIN_FIT_SAMPLES });
    }
    let x = &axis[start..end];
    let y = &intensity[start..end];

    let init = initial_guess(x, y)?;
    let bounds = vec![
        (0.0, f64::INFINITY),           // amplitude
        (f64::NEG_INFINITY, f64::INFINITY), // background
        (f64::NEG_INFINITY, f64::INFINITY), // q
        (x[0], x[n - 1]),               // center stays inside the window
        (1e-12, f64::INFINITY),         // linewidth
    ];
    let model = CurveModel::new(
        |e, p: &[f64]| {
            let params = FanoParams {
                amplitude: p[0],
                background: p[1],
                q: p[2],
                center_ev: p[3],
                gamma_ev: p[4],
            };
            fano_value(e, &params)
        },
        5,
        x,
        y,
    )
    .with_bounds(bounds);

    let fit = least_squares_fit(&model, &init)?;
    if !fit.converged {
        return Err(LineshapeError::FitFailed {
            iterations: fit.iterations,
            cost: fit.cost(),
        });
    }
    let err = fit.uncertainties();
    Ok(FanoFit {
        params: FanoParams::new(
            fit.params[0],
            fit.params[1],
            fit.params[2],
            fit.params[3],
            fit.params[4],
        )?,
        uncertainties: [err[0], err[1], err[2], err[3], err[4]],
        reduced_chi2: fit.reduced_chi2,
        window: (x[0], x[n - 1]),
        iterations: fit.iterations,
    })
}

/// Places the automatic fit window around the deepest interior dip.
fn auto_window(axis: &[f64], intensity: &[f64]) -> Result<(f64, f64), LineshapeError> {
    let (i_min, gamma_est) = dip_estimate(axis, intensity)?;
    let c = axis[i_min];
    Ok((c - WINDOW_HALF_WIDTHS * gamma_est, c + WINDOW_HALF_WIDTHS * gamma_est))
}

/// Finds the deepest interior minimum and a half-depth width estimate.
fn dip_estimate(axis: &[f64], intensity: &[f64]) -> Result<(usize, f64), LineshapeError> {
    let n = axis.len();
    let mut i_min = 0;
    for i in 1..n {
        if intensity[i] < intensity[i_min] {
            i_min = i;
        }
    }
    if i_min == 0 || i_min == n - 1 {
        return Err(LineshapeError::NoDip);
    }
    // Background from the outermost tenth of the samples on each side.
    let edge = (n / 10).max(1);
    let left: f64 = intensity[..edge].iter().sum::<f64>() / edge as f64;
    let right: f64 = intensity[n - edge..].iter().sum::<f64>() / edge as f64;
    let background = 0.5 * (left + right);
    let depth = background - intensity[i_min];
    if depth <= 0.0 {
        return Err(LineshapeError::NoDip);
    }
    let half = intensity[i_min] + 0.5 * depth;
    // Half-depth crossings; fall back to the window edge if a side never
    // recovers to the background.
    let mut e_left = axis[0];
    for i in (0..i_min).rev() {
        if intensity[i] >= half {
            e_left = axis[i];
            break;
        }
    }
    let mut e_right = axis[n - 1];
    for i in i_min + 1..n {
        if intensity[i] >= half {
            e_right = axis[i];
            break;
        }
    }
    let gamma = (e_right - e_left).max(axis[1] - axis[0]);
    Ok((i_min, gamma))
}

/// Initial parameter vector `[A, B, q, E_c, Gamma_c]` for the window data.
fn initial_guess(x: &[f64], y: &[f64]) -> Result<Vec<f64>, LineshapeError> {
    let (i_min, gamma_est) = dip_estimate(x, y)?;
    let edge = (x.len() / 10).max(1);
    let level = 0.5
        * (y[..edge].iter().sum::<f64>() / edge as f64
            + y[y.len() - edge..].iter().sum::<f64>() / edge as f64);
    let b = y[i_min];
    let a = (level - b).max(1e-12);
    Ok(vec![a, b, 0.0, x[i_min], gamma_est])
}
