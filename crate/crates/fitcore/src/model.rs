use nalgebra::DMatrix;

/// A residual model for [`least_squares_fit`](crate::least_squares_fit).
///
/// Implementations evaluate a weighted residual vector for a parameter
/// vector; the engine minimizes the sum of squared residuals. Data is
/// captured by the implementing type.
pub trait FitModel {
    /// Number of free parameters.
    fn param_count(&self) -> usize;

    /// Length of the residual vector.
    fn residual_count(&self) -> usize;

    /// Writes the residual vector for `params` into `out`
    /// (`out.len() == residual_count()`).
    fn residuals(&self, params: &[f64], out: &mut [f64]);

    /// Analytic Jacobian `d r_i / d p_j`, if the model provides one.
    /// Default `None` selects central finite differences.
    fn jacobian(&self, _params: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Per-parameter `(lower, upper)` bounds. Defaults to unbounded.
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(f64::NEG_INFINITY, f64::INFINITY); self.param_count()]
    }
}

/// Curve-fit adapter: residuals `w_i * (f(x_i, p) - y_i)` for a scalar model
/// function. Covers every fit in this workspace that compares a model curve
/// against sampled data.
pub struct CurveModel<'a, F> {
    f: F,
    x: &'a [f64],
    y: &'a [f64],
    weights: Option<&'a [f64]>,
    n_params: usize,
    bounds: Option<Vec<(f64, f64)>>,
}

impl<'a, F> CurveModel<'a, F>
where
    F: Fn(f64, &[f64]) -> f64,
{
    /// `f(x, params)` evaluated against samples `(x, y)`; panics if the
    /// sample arrays disagree in length.
    pub fn new(f: F, n_params: usize, x: &'a [f64], y: &'a [f64]) -> Self {
        assert_eq!(x.len(), y.len(), "x and y must have equal length");
        Self { f, x, y, weights: None, n_params, bounds: None }
    }

    /// Attaches per-sample weights (typically `1 / sigma_i`).
    pub fn with_weights(mut self, weights: &'a [f64]) -> Self {
        assert_eq!(weights.len(), self.x.len(), "weights must match samples");
        self.weights = Some(weights);
        self
    }

    /// Attaches box bounds, one `(lower, upper)` pair per parameter.
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        assert_eq!(bounds.len(), self.n_params, "bounds must match parameters");
        self.bounds = Some(bounds);
        self
    }
}

impl<F> FitModel for CurveModel<'_, F>
where
    F: Fn(f64, &[f64]) -> f64,
{
    fn param_count(&self) -> usize {
        self.n_params
    }

    fn residual_count(&self) -> usize {
        self.x.len()
    }

    fn residuals(&self, params: &[f64], out: &mut [f64]) {
        for (i, (&x, &y)) in self.x.iter().zip(self.y).enumerate() {
            let w = self.weights.map_or(1.0, |w| w[i]);
            out[i] = w * ((self.f)(x, params) - y);
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        self.bounds
            .clone()
            .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); self.n_params])
    }
}
