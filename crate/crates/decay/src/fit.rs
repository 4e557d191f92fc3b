use cbr_fit::{least_squares_fit, CurveModel, FitModel, FitResult};
use serde::Serialize;

use crate::histogram::BIN_TOL;
use crate::{convolve_model_with_irf, DecayError, DecayHistogram, DecayModel, DecayModelKind, Irf};

/// Minimum peak signal-to-noise ratio for a lifetime fit.
const MIN_PEAK_SNR: f64 = 3.0;
/// Minimum tail points for the log-linear lifetime initializer.
const MIN_TAIL_POINTS: usize = 5;

/// Residual model: IRF-convolved decay vs Poisson-weighted counts.
struct ConvolvedDecay<'a> {
    kind: DecayModelKind,
    irf: &'a Irf,
    grid: &'a [f64],
    counts: &'a [f64],
    weights: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl FitModel for ConvolvedDecay<'_> {
    fn param_count(&self) -> usize {
        self.kind.param_count()
    }

    fn residual_count(&self) -> usize {
        self.grid.len()
    }

    fn residuals(&self, params: &[f64], out: &mut [f64]) {
        // Bounds keep lifetimes positive, so construction cannot fail.
        let model = DecayModel::from_params(self.kind, params)
            .expect("bounded parameters are always valid");
        let expected = convolve_model_with_irf(&model, self.irf, self.grid)
            .expect("grid validated before fitting");
        for i in 0..out.len() {
            out[i] = self.weights[i] * (expected[i] - self.counts[i]);
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        self.bounds.clone()
    }
}

/// Converged lifetime fit: the fitted model plus engine diagnostics.
#[derive(Debug, Clone)]
pub struct LifetimeFit {
    pub model: DecayModel,
    pub result: FitResult,
    /// One-sigma lifetime uncertainties, same order as
    /// [`DecayModel::lifetimes_ps`].
    pub tau_err_ps: Vec<f64>,
    pub t0_err_ps: f64,
    pub background_err: f64,
}

impl LifetimeFit {
    pub fn report(&self) -> LifetimeReport {
        LifetimeReport {
            kind: self.model.kind().as_str().to_string(),
            tau_ps: self.model.lifetimes_ps(),
            tau_err_ps: self.tau_err_ps.clone(),
            amplitudes: self.model.components().iter().map(|&(a, _)| a).collect(),
            t0_ps: self.model.t0_ps(),
            background: self.model.background(),
            reduced_chi2: self.result.reduced_chi2,
        }
    }
}

/// JSON-serializable lifetime fit record.
#[derive(Debug, Clone, Serialize)]
pub struct LifetimeReport {
    pub kind: String,
    pub tau_ps: Vec<f64>,
    pub tau_err_ps: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub t0_ps: f64,
    pub background: f64,
    pub reduced_chi2: f64,
}

/// Fits an IRF-convolved decay model to a TCSPC histogram.
///
/// Initialization: background from the pre-rise bins, `t0` at the
/// histogram peak, lifetime from a log-linear regression of the tail,
/// amplitude scaled so the convolved peak matches the data peak. Residuals
/// are weighted `1/sqrt(max(count, 1))`. Bi-exponential results are
/// normalized so the slow component comes first.
pub fn fit_lifetime(
    hist: &DecayHistogram,
    irf: &Irf,
    kind: DecayModelKind,
) -> Result<LifetimeFit, DecayError> {
    if (hist.bin_width_ps() - irf.bin_width_ps()).abs() > BIN_TOL * irf.bin_width_ps() {
        return Err(DecayError::BinWidthMismatch {
            hist: hist.bin_width_ps(),
            irf: irf.bin_width_ps(),
        });
    }
    let grid = hist.bin_centers();
    let y = hist.counts_f64();
    let n = y.len();
    let peak = hist.peak_index();
    let width = hist.bin_width_ps();
    let span = grid[n - 1] - grid[0];

    // Background estimate from bins before the rise.
    let head = (n / 50).max(3).min(n);
    let bg_floor = y[..head].iter().sum::<f64>() / head as f64;
    let rise_level = bg_floor + 5.0 * (bg_floor + 1.0).sqrt();
    let rise = y.iter().position(|&c| c > rise_level).unwrap_or(0);
    let bg_init = if rise >= 3 {
        y[..rise].iter().sum::<f64>() / rise as f64
    } else {
        y.iter().cloned().fold(f64::INFINITY, f64::min)
    };

    let snr = (y[peak] - bg_init) / y[peak].max(1.0).sqrt();
    if snr <= MIN_PEAK_SNR {
        return Err(DecayError::LowSnr { snr });
    }

    let tau_init = tail_lifetime(grid, &y, peak, bg_init).unwrap_or(span / 10.0);
    let t0_init = grid[peak];

    // Amplitude scale: convolve a unit-amplitude model and match the peak.
    let probe = match kind {
        DecayModelKind::SingleExp => DecayModel::single_exp(1.0, tau_init, t0_init, 0.0)?,
        DecayModelKind::BiExp => {
            DecayModel::bi_exp(0.5, tau_init, 0.5, tau_init / 3.0, t0_init, 0.0)?
        }
    };
    let conv = convolve_model_with_irf(&probe, irf, grid)?;
    let conv_peak = conv.iter().cloned().fold(0.0, f64::max);
    if conv_peak <= 0.0 {
        return Err(DecayError::InitFailed {
            message: "probe convolution produced no signal on the grid".into(),
        });
    }
    let amp = (y[peak] - bg_init).max(1.0) / conv_peak;

    let init = match kind {
        DecayModelKind::SingleExp => vec![amp, tau_init, t0_init, bg_init.max(0.0)],
        DecayModelKind::BiExp => vec![
            amp / 2.0,
            tau_init,
            amp / 2.0,
            tau_init / 3.0,
            t0_init,
            bg_init.max(0.0),
        ],
    };
    let tau_bounds = (width / 10.0, 1000.0 * span);
    let amp_bounds = (0.0, f64::INFINITY);
    let t0_bounds = (grid[0] - span, grid[n - 1] + span);
    let bg_bounds = (0.0, f64::INFINITY);
    let bounds = match kind {
        DecayModelKind::SingleExp => vec![amp_bounds, tau_bounds, t0_bounds, bg_bounds],
        DecayModelKind::BiExp => {
            vec![amp_bounds, tau_bounds, amp_bounds, tau_bounds, t0_bounds, bg_bounds]
        }
    };

    let weights: Vec<f64> = y.iter().map(|&c| 1.0 / c.max(1.0).sqrt()).collect();
    let model = ConvolvedDecay { kind, irf, grid, counts: &y, weights, bounds };
    let fit = least_squares_fit(&model, &init)?;
    if !fit.converged {
        return Err(DecayError::NotConverged { iterations: fit.iterations, cost: fit.cost() });
    }
    let tau_indices: &[usize] = match kind {
        DecayModelKind::SingleExp => &[1],
        DecayModelKind::BiExp => &[1, 3],
    };
    for &i in tau_indices {
        if fit.at_bounds[i] {
            return Err(DecayError::LifetimeAtBound { tau_ps: fit.params[i] });
        }
    }

    let err = fit.uncertainties();
    let (fitted, tau_err) = match kind {
        DecayModelKind::SingleExp => (
            DecayModel::single_exp(fit.params[0], fit.params[1], fit.params[2], fit.params[3])?,
            vec![err[1]],
        ),
        DecayModelKind::BiExp => {
            // Slow component first; swap if the optimizer crossed them.
            let (mut a, mut b) = ((fit.params[0], fit.params[1], err[1]), (fit.params[2], fit.params[3], err[3]));
            if a.1 < b.1 {
                std::mem::swap(&mut a, &mut b);
            }
            (
                DecayModel::bi_exp(a.0, a.1, b.0, b.1, fit.params[4], fit.params[5])?,
                vec![a.2, b.2],
            )
        }
    };
    let (t0_err, bg_err) = match kind {
        DecayModelKind::SingleExp => (err[2], err[3]),
        DecayModelKind::BiExp => (err[4], err[5]),
    };
    Ok(LifetimeFit {
        model: fitted,
        result: fit,
        tau_err_ps: tau_err,
        t0_err_ps: t0_err,
        background_err: bg_err,
    })
}

/// Log-linear regression of the after-peak tail, excluding bins that have
/// decayed into the background.
fn tail_lifetime(grid: &[f64], y: &[f64], peak: usize, bg: f64) -> Option<f64> {
    let n = y.len();
    let start = peak + (n - peak) / 10 + 1;
    let floor = bg + 3.0 * (bg + 1.0).sqrt();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in start..n {
        let s = y[i] - bg;
        if y[i] > floor && s > 0.0 {
            pts.push((grid[i], s.ln()));
        }
    }
    if pts.len() < MIN_TAIL_POINTS {
        return None;
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let slope = (m * sxy - sx * sy) / denom;
    if slope < 0.0 && slope.is_finite() {
        Some(-1.0 / slope)
    } else {
        None
    }
}

/// One emitter's Purcell factor at a cavity-transition detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurcellPoint {
    /// `E_c - E_transition`, eV.
    pub detuning_ev: f64,
    pub f_p: f64,
    pub sigma: f64,
}

/// Lorentzian fit of Purcell factor versus cavity detuning.
#[derive(Debug, Clone, Serialize)]
pub struct PurcellTrend {
    pub center_ev: f64,
    pub center_err_ev: f64,
    pub fwhm_ev: f64,
    pub fwhm_err_ev: f64,
    /// Enhancement above baseline at the center.
    pub peak: f64,
    pub peak_err: f64,
    pub baseline: f64,
    pub baseline_err: f64,
    pub reduced_chi2: f64,
    #[serde(skip)]
    pub result: FitResult,
}

/// Fits `F_P(x) = baseline + peak * (G/2)^2 / ((x - center)^2 + (G/2)^2)`
/// to weighted (detuning, F_P, sigma) points.
pub fn fit_purcell_vs_detuning(points: &[PurcellPoint]) -> Result<PurcellTrend, DecayError> {
    const MIN_POINTS: usize = 5;
    if points.len() < MIN_POINTS {
        return Err(DecayError::TooFewPoints { n: points.len(), min: MIN_POINTS });
    }
    for p in points {
        if !(p.sigma.is_finite() && p.sigma > 0.0) {
            return Err(DecayError::NonPositiveValue { name: "sigma", value: p.sigma });
        }
        if !(p.detuning_ev.is_finite() && p.f_p.is_finite()) {
            return Err(DecayError::NonFinite { what: "purcell point", index: 0 });
        }
    }
    let x: Vec<f64> = points.iter().map(|p| p.detuning_ev).collect();
    let y: Vec<f64> = points.iter().map(|p| p.f_p).collect();
    let w: Vec<f64> = points.iter().map(|p| 1.0 / p.sigma).collect();
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - x.iter().cloned().fold(f64::INFINITY, f64::min);
    if span <= 0.0 {
        return Err(DecayError::InitFailed { message: "zero detuning spread".into() });
    }

    let i_max = (0..y.len()).fold(0, |b, i| if y[i] > y[b] { i } else { b });
    let baseline0 = y.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let init = vec![(y[i_max] - baseline0).max(1e-6), x[i_max], span / 4.0, baseline0];
    let bounds = vec![
        (0.0, f64::INFINITY),                       // peak height
        (x[0] - span, x[x.len() - 1] + span),       // center
        (span * 1e-6, 100.0 * span),                // FWHM
        (0.0, f64::INFINITY),                       // baseline
    ];
    let model = CurveModel::new(
        |xi, p: &[f64]| {
            let hw = p[2] / 2.0;
            p[3] + p[0] * hw * hw / ((xi - p[1]).powi(2) + hw * hw)
        },
        4,
        &x,
        &y,
    )
    .with_weights(&w)
    .with_bounds(bounds);
    let fit = least_squares_fit(&model, &init)?;
    if !fit.converged {
        return Err(DecayError::NotConverged { iterations: fit.iterations, cost: fit.cost() });
    }
    let err = fit.uncertainties();
    Ok(PurcellTrend {
        center_ev: fit.params[1],
        center_err_ev: err[1],
        fwhm_ev: fit.params[2],
        fwhm_err_ev: err[2],
        peak: fit.params[0],
        peak_err: err[0],
        baseline: fit.params[3],
        baseline_err: err[3],
        reduced_chi2: fit.reduced_chi2,
        result: fit,
    })
}
