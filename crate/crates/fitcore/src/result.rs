use nalgebra::DMatrix;

/// Outcome of a least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Best-fit parameters.
    pub params: Vec<f64>,
    /// Parameter covariance `(J^T J)^-1` at the solution (unscaled; see
    /// [`parameter_uncertainties`] for the chi-square-scaled errors).
    pub covariance: DMatrix<f64>,
    /// Sum of squared weighted residuals divided by the degrees of freedom
    /// (`n - k`, floored at 1).
    pub reduced_chi2: f64,
    /// Number of damped-step trials performed.
    pub iterations: usize,
    /// Whether a convergence criterion was met before the iteration cap.
    pub converged: bool,
    /// Per-parameter flag: solution sits on a box bound.
    pub at_bounds: Vec<bool>,
    /// Cost after each *accepted* step, starting with the initial cost.
    /// Non-increasing by construction.
    pub cost_trace: Vec<f64>,
}

impl FitResult {
    /// Final cost (sum of squared weighted residuals).
    pub fn cost(&self) -> f64 {
        *self.cost_trace.last().expect("trace holds at least the initial cost")
    }

    /// `sqrt(diag(covariance) * reduced_chi2)`, one entry per parameter.
    pub fn uncertainties(&self) -> Vec<f64> {
        parameter_uncertainties(self)
    }
}

/// One-sigma parameter uncertainties: `sqrt(diag(cov) * reduced_chi2)`.
///
/// The chi-square scaling makes the errors consistent whether or not the
/// caller supplied absolute weights; with correct `1/sigma` weights the
/// reduced chi-square is near 1 and the scaling is a no-op.
pub fn parameter_uncertainties(result: &FitResult) -> Vec<f64> {
    (0..result.params.len())
        .map(|i| (result.covariance[(i, i)].max(0.0) * result.reduced_chi2).sqrt())
        .collect()
}
