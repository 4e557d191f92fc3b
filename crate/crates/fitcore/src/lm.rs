use nalgebra::{Cholesky, DMatrix, DVector};

use crate::{numerical_jacobian, FitError, FitModel, FitResult};

/// Iteration cap for the damped Gauss-Newton loop.
const MAX_ITERATIONS: usize = 500;
/// Initial damping factor.
const LAMBDA_INIT: f64 = 1e-3;
/// Damping growth/shrink factors on rejected/accepted steps.
const LAMBDA_UP: f64 = 10.0;
const LAMBDA_DOWN: f64 = 10.0;
/// Damping ceiling; exceeding it means no acceptable step exists.
const LAMBDA_MAX: f64 = 1e12;
/// Converged when the relative parameter step drops below this.
const REL_STEP_TOL: f64 = 1e-10;
/// Converged when the relative cost decrease of an accepted step drops
/// below this.
const REL_COST_TOL: f64 = 1e-12;

/// Minimizes the sum of squared residuals of `model` starting from `init`.
///
/// Returns `Ok` with [`FitResult::converged`] = false when the iteration cap
/// or damping ceiling is hit; hard failures (bad init, dead parameters,
/// non-finite residuals at the start) are errors.
pub fn least_squares_fit<M: FitModel>(model: &M, init: &[f64]) -> Result<FitResult, FitError> {
    let k = model.param_count();
    let n = model.residual_count();
    if init.len() != k {
        return Err(FitError::BadInit { expected: k, got: init.len() });
    }
    let bounds = model.bounds();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if lo > hi {
            return Err(FitError::BadBounds { index: i, lower: lo, upper: hi });
        }
    }

    let mut params: Vec<f64> = init
        .iter()
        .zip(&bounds)
        .map(|(&p, &(lo, hi))| p.clamp(lo, hi))
        .collect();
    let mut residual = vec![0.0; n];
    model.residuals(&params, &mut residual);
    let mut cost = sum_sq(&residual);
    if !cost.is_finite() {
        return Err(FitError::NonFiniteInit);
    }

    let mut lambda = LAMBDA_INIT;
    let mut converged = false;
    let mut iterations = 0;
    let mut cost_trace = vec![cost];
    let mut trial = vec![0.0; n];
    let mut jac_current: Option<DMatrix<f64>> = None;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let jac = match &jac_current {
            Some(j) => j.clone(),
            None => {
                let j = jacobian_of(model, &params)?;
                if iterations == 1 {
                    check_rank(&j)?;
                }
                jac_current = Some(j.clone());
                j
            }
        };

        let normal = jac.transpose() * &jac; // J^T J
        let gradient = jac.transpose() * DVector::from_column_slice(&residual); // J^T r

        // Parameters pinned at a bound with the gradient pushing outward are
        // excluded from the step (active-set clamping).
        let free: Vec<usize> = (0..k)
            .filter(|&i| {
                let (lo, hi) = bounds[i];
                let at_lo = params[i] <= lo && gradient[i] > 0.0;
                let at_hi = params[i] >= hi && gradient[i] < 0.0;
                !(at_lo || at_hi)
            })
            .collect();
        if free.is_empty() {
            converged = true;
            break;
        }

        let step = match damped_step(&normal, &gradient, &free, lambda, k) {
            Some(step) => step,
            None => {
                // Normal matrix not factorizable at this damping: stiffen.
                lambda *= LAMBDA_UP;
                if lambda > LAMBDA_MAX {
                    break;
                }
                continue;
            }
        };

        let mut candidate = params.clone();
        for i in 0..k {
            let (lo, hi) = bounds[i];
            candidate[i] = (params[i] + step[i]).clamp(lo, hi);
        }
        let applied: f64 = candidate
            .iter()
            .zip(&params)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = params.iter().map(|p| p * p).sum::<f64>().sqrt() + 1e-30;
        model.residuals(&candidate, &mut trial);
        let trial_cost = sum_sq(&trial);

        if trial_cost.is_finite() && trial_cost < cost {
            // Accepted: relax damping, test convergence on the applied step.
            let rel_decrease = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);

            params = candidate;
            std::mem::swap(&mut residual, &mut trial);
            cost = trial_cost;
            cost_trace.push(cost);
            jac_current = None;
            lambda = (lambda / LAMBDA_DOWN).max(1e-13);

            if applied / scale < REL_STEP_TOL || rel_decrease < REL_COST_TOL || cost == 0.0 {
                converged = true;
                break;
            }
        } else {
            // Rejected. A proposal that changes the cost by less than the
            // convergence tolerance (or barely moves the parameters) means
            // the minimum is resolved to working precision: stop instead of
            // stiffening the damping forever.
            if trial_cost.is_finite() {
                let rel_change = (trial_cost - cost).abs() / cost.max(f64::MIN_POSITIVE);
                if rel_change < REL_COST_TOL || applied / scale < REL_STEP_TOL {
                    converged = true;
                    break;
                }
            }
            lambda *= LAMBDA_UP;
            if lambda > LAMBDA_MAX {
                break;
            }
        }
    }

    let jac = match jac_current {
        Some(j) => j,
        None => jacobian_of(model, &params)?,
    };
    let normal = jac.transpose() * &jac;
    let covariance = invert_normal(&normal);
    let dof = n.saturating_sub(k).max(1);
    let reduced_chi2 = cost / dof as f64;
    let at_bounds = (0..k)
        .map(|i| {
            let (lo, hi) = bounds[i];
            params[i] <= lo || params[i] >= hi
        })
        .collect();

    Ok(FitResult {
        params,
        covariance,
        reduced_chi2,
        iterations,
        converged,
        at_bounds,
        cost_trace,
    })
}

fn jacobian_of<M: FitModel>(model: &M, params: &[f64]) -> Result<DMatrix<f64>, FitError> {
    match model.jacobian(params) {
        Some(j) => Ok(j),
        None => numerical_jacobian(model, params),
    }
}

/// Errors out if any Jacobian column is identically zero: such a parameter
/// cannot be determined and silently returning it unchanged would hide a
/// caller bug.
fn check_rank(jac: &DMatrix<f64>) -> Result<(), FitError> {
    let dead: Vec<usize> = (0..jac.ncols())
        .filter(|&j| jac.column(j).iter().all(|&v| v == 0.0))
        .collect();
    if dead.is_empty() {
        Ok(())
    } else {
        Err(FitError::RankDeficient { indices: dead })
    }
}

/// Solves `(A_ff + lambda * diag(A_ff)) s_f = -g_f` on the free parameter
/// set; returns `None` if the damped matrix cannot be factorized.
fn damped_step(
    normal: &DMatrix<f64>,
    gradient: &DVector<f64>,
    free: &[usize],
    lambda: f64,
    k: usize,
) -> Option<Vec<f64>> {
    let m = free.len();
    let mut a = DMatrix::zeros(m, m);
    let mut g = DVector::zeros(m);
    let max_diag = free
        .iter()
        .map(|&i| normal[(i, i)])
        .fold(0.0_f64, f64::max);
    for (r, &i) in free.iter().enumerate() {
        for (c, &j) in free.iter().enumerate() {
            a[(r, c)] = normal[(i, j)];
        }
        // Floor the Marquardt scaling so parameters with (numerically) no
        // leverage still produce a solvable system; their steps are huge and
        // get caught by the bounds.
        let d = normal[(i, i)].max(1e-12 * max_diag).max(f64::MIN_POSITIVE);
        a[(r, r)] += lambda * d;
        g[r] = gradient[i];
    }
    let chol = Cholesky::new(a)?;
    let sol = chol.solve(&(-g));
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut step = vec![0.0; k];
    for (r, &i) in free.iter().enumerate() {
        step[i] = sol[r];
    }
    Some(step)
}

/// Covariance of the solution: plain inverse when the normal matrix is
/// numerically invertible (near-degenerate directions then show up as large
/// variances), SVD pseudo-inverse as the fallback.
fn invert_normal(normal: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(inv) = normal.clone().try_inverse() {
        if inv.iter().all(|v| v.is_finite()) {
            return inv;
        }
    }
    normal
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-14 * normal.amax().max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DMatrix::zeros(normal.nrows(), normal.ncols()))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}
