//! Convolutional absorbing boundary (recursive-convolution PML).
//!
//! Each absorbing side carries a polynomial-graded conductivity profile
//! `sigma(depth) = sigma_max (depth/L)^m` with `sigma_max` scaled from the
//! matched-impedance optimum `0.8 (m + 1) / dx`.  The split memory variables
//! follow the recursive convolution
//!
//! ```text
//!   psi <- b psi + c (spatial derivative),   b = exp(-(sigma + alpha) dt),
//!                                            c = sigma / (sigma + alpha) (b - 1),
//! ```
//!
//! with a small constant frequency shift `alpha` for late-time stability.  The
//! coefficient arrays cover the full axis and are identically zero outside the
//! absorbing strips, so the update loops stay branch-free; sides configured as
//! mirrors simply keep zero coefficients everywhere.

use crate::config::SimulationConfig;
use crate::grid::{Boundary, Grid};

/// Constant complex-frequency shift (1/nm); zero would make the convolution a
/// pure decaying exponential, a small positive value damps the DC tail.
const ALPHA: f64 = 1e-4;

/// Per-axis recursive-convolution coefficients at field sample positions.
pub struct CpmlCoeffs {
    /// At E columns (x-derivative entering the E update).
    pub be_x: Vec<f64>,
    pub ce_x: Vec<f64>,
    /// At half-integer x positions (x-derivative entering the Hy update).
    pub bh_x: Vec<f64>,
    pub ch_x: Vec<f64>,
    /// At E rows (y-derivative entering the E update).
    pub be_y: Vec<f64>,
    pub ce_y: Vec<f64>,
    /// At half-integer y positions (y-derivative entering the Hx update).
    pub bh_y: Vec<f64>,
    pub ch_y: Vec<f64>,
}

fn coeffs(sigma: f64, dt: f64) -> (f64, f64) {
    if sigma <= 0.0 {
        return (0.0, 0.0);
    }
    let b = (-(sigma + ALPHA) * dt).exp();
    let c = sigma / (sigma + ALPHA) * (b - 1.0);
    (b, c)
}

impl CpmlCoeffs {
    pub fn build(grid: &Grid, config: &SimulationConfig) -> CpmlCoeffs {
        let nx = grid.nx;
        let ny = grid.ny;
        let dx = grid.dx;
        let dt = grid.dt;
        let n = grid.npml as f64;
        let m = config.pml.order;
        let sigma_max = config.pml.sigma_scale * 0.8 * (m + 1.0) / dx;
        let profile = |depth_cells: f64| -> f64 {
            if depth_cells <= 0.0 {
                0.0
            } else {
                sigma_max * (depth_cells / n).powf(m)
            }
        };

        let mut c = CpmlCoeffs {
            be_x: vec![0.0; nx],
            ce_x: vec![0.0; nx],
            bh_x: vec![0.0; nx],
            ch_x: vec![0.0; nx],
            be_y: vec![0.0; ny],
            ce_y: vec![0.0; ny],
            bh_y: vec![0.0; ny],
            ch_y: vec![0.0; ny],
        };
        let npml = grid.npml;

        // x axis: depth measured inward from each absorbing side's interface.
        for i in 0..nx {
            let mut depth_e = 0.0_f64;
            let mut depth_h = 0.0_f64;
            if grid.boundaries.left == Boundary::Cpml {
                depth_e = depth_e.max(npml as f64 - i as f64);
                depth_h = depth_h.max(npml as f64 - i as f64 - 0.5);
            }
            if grid.boundaries.right == Boundary::Cpml {
                let interface = (nx - 1 - npml) as f64;
                depth_e = depth_e.max(i as f64 - interface);
                depth_h = depth_h.max(i as f64 + 0.5 - interface);
            }
            let (be, ce) = coeffs(profile(depth_e), dt);
            let (bh, ch) = coeffs(profile(depth_h), dt);
            c.be_x[i] = be;
            c.ce_x[i] = ce;
            c.bh_x[i] = bh;
            c.ch_x[i] = ch;
        }

        // y axis.
        for j in 0..ny {
            let mut depth_e = 0.0_f64;
            let mut depth_h = 0.0_f64;
            if grid.boundaries.bottom == Boundary::Cpml {
                depth_e = depth_e.max(npml as f64 - j as f64);
                depth_h = depth_h.max(npml as f64 - j as f64 - 0.5);
            }
            if grid.boundaries.top == Boundary::Cpml {
                let interface = (ny - 1 - npml) as f64;
                depth_e = depth_e.max(j as f64 - interface);
                depth_h = depth_h.max(j as f64 + 0.5 - interface);
            }
            let (be, ce) = coeffs(profile(depth_e), dt);
            let (bh, ch) = coeffs(profile(depth_h), dt);
            c.be_y[j] = be;
            c.ce_y[j] = ce;
            c.bh_y[j] = bh;
            c.ch_y[j] = ch;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundaries, DomainSpec, Grid};
    use crate::geometry::Structure;

    fn test_grid(boundaries: Boundaries) -> Grid {
        Grid::build(
            &Structure::Uniform { eps: 1.0 },
            &SimulationConfig::default(),
            &DomainSpec {
                half_width_nm: 400.0,
                height_nm: 600.0,
            },
            boundaries,
        )
        .unwrap()
    }

    #[test]
    fn coefficients_vanish_in_the_interior() {
        let grid = test_grid(Boundaries::open());
        let cfg = SimulationConfig::default();
        let c = CpmlCoeffs::build(&grid, &cfg);
        let mid_i = grid.nx / 2;
        let mid_j = grid.ny / 2;
        assert_eq!(c.be_x[mid_i], 0.0);
        assert_eq!(c.ce_x[mid_i], 0.0);
        assert_eq!(c.be_y[mid_j], 0.0);
        assert_eq!(c.ch_y[mid_j], 0.0);
    }

    #[test]
    fn mirror_sides_get_no_absorber() {
        let grid = test_grid(Boundaries::closed());
        let cfg = SimulationConfig::default();
        let c = CpmlCoeffs::build(&grid, &cfg);
        assert!(c.ce_x.iter().all(|&v| v == 0.0));
        assert!(c.ce_y.iter().all(|&v| v == 0.0));
        assert!(c.ch_x.iter().all(|&v| v == 0.0));
        assert!(c.ch_y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn profile_is_mirror_symmetric_and_graded() {
        let grid = test_grid(Boundaries::open());
        let cfg = SimulationConfig::default();
        let c = CpmlCoeffs::build(&grid, &cfg);
        let nx = grid.nx;
        for i in 0..=grid.npml {
            // E-position profile mirrors exactly between left and right sides.
            assert_eq!(c.be_x[i], c.be_x[nx - 1 - i]);
            assert_eq!(c.ce_x[i], c.ce_x[nx - 1 - i]);
        }
        // conductivity grows outward: |c| larger at the outer edge
        assert!(c.ce_x[0].abs() > c.ce_x[grid.npml - 1].abs());
        // absorbing region coefficients are active
        assert!(c.ce_x[0].abs() > 0.0 && c.be_x[0] < 1.0);
    }
}
