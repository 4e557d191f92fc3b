use nalgebra::DMatrix;

use crate::{FitError, FitModel};

/// Central-difference Jacobian with per-parameter step
/// `h_j = max(1e-8, 1e-8 * |p_j|)`.
///
/// Probe points are clamped into the model's bounds so models with hard
/// domain edges (decay times, widths) are never evaluated outside them; a
/// clamped side degrades to a one-sided difference.
pub fn numerical_jacobian<M: FitModel>(
    model: &M,
    params: &[f64],
) -> Result<DMatrix<f64>, FitError> {
    let n = model.residual_count();
    let k = model.param_count();
    let bounds = model.bounds();
    let mut jac = DMatrix::zeros(n, k);
    let mut probe = params.to_vec();
    let mut r_hi = vec![0.0; n];
    let mut r_lo = vec![0.0; n];

    for j in 0..k {
        let h = 1e-8_f64.max(1e-8 * params[j].abs());
        let (lb, ub) = bounds[j];
        let hi = (params[j] + h).min(ub);
        let lo = (params[j] - h).max(lb);
        if hi == lo {
            // Parameter pinned by zero-width bounds: no leverage.
            continue;
        }
        probe[j] = hi;
        model.residuals(&probe, &mut r_hi);
        probe[j] = lo;
        model.residuals(&probe, &mut r_lo);
        probe[j] = params[j];
        let inv = 1.0 / (hi - lo);
        for i in 0..n {
            let d = (r_hi[i] - r_lo[i]) * inv;
            if !d.is_finite() {
                return Err(FitError::NonFiniteProbe { index: j });
            }
            jac[(i, j)] = d;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CurveModel;

    #[test]
    fn matches_analytic_derivatives() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let y = vec![0.0; 40];
        // f = p0 * exp(-p1 * x): dr/dp0 = exp(-p1 x), dr/dp1 = -p0 x exp(-p1 x)
        let model = CurveModel::new(|x, p: &[f64]| p[0] * (-p[1] * x).exp(), 2, &x, &y);
        let p = [2.0, 0.7];
        let jac = numerical_jacobian(&model, &p).unwrap();
        for (i, &xi) in x.iter().enumerate() {
            let e = (-p[1] * xi).exp();
            assert!((jac[(i, 0)] - e).abs() < 1e-6);
            assert!((jac[(i, 1)] + p[0] * xi * e).abs() < 1e-6);
        }
    }

    #[test]
    fn reports_non_finite_probes() {
        let x = vec![1.0, 2.0];
        let y = vec![0.0, 0.0];
        let model = CurveModel::new(|x, p: &[f64]| (x / p[0]).ln(), 1, &x, &y);
        match numerical_jacobian(&model, &[-0.5]) {
            Err(FitError::NonFiniteProbe { index: 0 }) => {}
            other => panic!("expected NonFiniteProbe, got {other:?}"),
        }
    }
}
