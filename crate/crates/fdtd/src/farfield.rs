//! Near-to-far-field transform for a horizontal line in homogeneous air.
//!
//! The upward-travelling field recorded on the line is decomposed into its
//! plane-wave angular spectrum by a direct (zero-padding-free) transform
//! `a(kx) = sum Ez(x) exp(-i kx x) dx`; the stationary-phase far field of a
//! 2-D aperture then carries intensity
//!
//! ```text
//!   I(theta) ~ k cos^2(theta) |a(k sin(theta))|^2
//! ```
//!
//! with `theta` measured from the surface normal (+y).  Only propagating
//! components `|kx| <= k` map to real angles; evanescent content is discarded
//! by construction.  The collection-cone fraction integrates `I(theta)` inside
//! the numerical-aperture half-angle against the full upper half-space.

use crate::dft::C64;
use crate::FdtdError;

/// Far-field intensity sampled on a uniform angle grid over (-pi/2, pi/2).
#[derive(Debug, Clone)]
pub struct FarField {
    pub thetas: Vec<f64>,
    pub intensity: Vec<f64>,
}

/// Default angular sampling.
pub const N_THETA: usize = 721;

/// Angular spectrum of a line of Ez samples at vacuum wavenumber `k` (rad/nm).
pub fn far_field_from_line(
    ez: &[C64],
    xs: &[f64],
    k: f64,
    n_theta: usize,
) -> Result<FarField, FdtdError> {
    if ez.len() != xs.len() || ez.len() < 2 {
        return Err(FdtdError::FarField {
            what: format!("line has {} field samples for {} positions", ez.len(), xs.len()),
        });
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(FdtdError::FarField {
            what: format!("wavenumber must be positive, got {k}"),
        });
    }
    if n_theta < 9 {
        return Err(FdtdError::FarField {
            what: "angle grid too coarse".into(),
        });
    }
    let dx = xs[1] - xs[0];
    let mut thetas = Vec::with_capacity(n_theta);
    let mut intensity = Vec::with_capacity(n_theta);
    let half = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    for it in 0..n_theta {
        let theta = -half + std::f64::consts::PI * it as f64 / (n_theta - 1) as f64;
        let kx = k * theta.sin();
        let mut a = C64::ZERO;
        for (e, &x) in ez.iter().zip(xs) {
            a = a.add(e.mul(C64::phasor(kx * x)));
        }
        let a = a.scale(dx);
        let c = theta.cos();
        let val = k * c * c * a.abs2();
        total += val;
        thetas.push(theta);
        intensity.push(val);
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(FdtdError::FarField {
            what: "far-field norm vanished or is not finite".into(),
        });
    }
    Ok(FarField { thetas, intensity })
}

/// Fraction of the upper-half-space far-field power inside the collection
/// cone of numerical aperture `na` (half-angle `asin(na)`).
///
/// Integrates the sampled intensity with the trapezoid rule, splitting the
/// boundary interval exactly at the cone edge, so a constant (isotropic)
/// intensity yields `asin(na) / (pi/2)` to rounding.
pub fn angular_fraction(ff: &FarField, na: f64) -> Result<f64, FdtdError> {
    let (inside, total) = cone_integrals(ff, na)?;
    if !(total > 0.0) {
        return Err(FdtdError::FarField {
            what: "far-field norm vanished".into(),
        });
    }
    Ok(inside / total)
}

/// Absolute power integrated over the collection cone (no normalisation).
/// Zero is a valid result here — e.g. a perfectly transmitted beam.
pub fn cone_power(ff: &FarField, na: f64) -> Result<f64, FdtdError> {
    Ok(cone_integrals(ff, na)?.0)
}

fn cone_integrals(ff: &FarField, na: f64) -> Result<(f64, f64), FdtdError> {
    if !(na.is_finite() && na > 0.0 && na <= 1.0) {
        return Err(FdtdError::FarField {
            what: format!("numerical aperture must lie in (0, 1], got {na}"),
        });
    }
    if ff.thetas.len() != ff.intensity.len() || ff.thetas.len() < 2 {
        return Err(FdtdError::FarField {
            what: "angle grid and intensity grid do not match".into(),
        });
    }
    let theta_na = na.asin();
    let mut inside = 0.0;
    let mut total = 0.0;
    for w in 0..ff.thetas.len() - 1 {
        let (t0, t1) = (ff.thetas[w], ff.thetas[w + 1]);
        let (i0, i1) = (ff.intensity[w], ff.intensity[w + 1]);
        let seg = 0.5 * (i0 + i1) * (t1 - t0);
        total += seg;
        // Overlap of [t0, t1] with [-theta_na, theta_na], with linear
        // interpolation of the intensity at a partial cut.
        let lo = t0.max(-theta_na);
        let hi = t1.min(theta_na);
        if hi > lo {
            let f = |t: f64| i0 + (i1 - i0) * (t - t0) / (t1 - t0);
            inside += 0.5 * (f(lo) + f(hi)) * (hi - lo);
        }
    }
    if !(total.is_finite() && inside.is_finite()) {
        return Err(FdtdError::FarField {
            what: "far-field integral is not finite".into(),
        });
    }
    Ok((inside, total))
}
