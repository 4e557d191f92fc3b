//! Device geometry for the etched bullseye cavity.
//!
//! A circular Bragg resonator is described by its as-fabricated dimensions: a
//! central disc of radius `r`, surrounded by `n_rings` fully etched trenches of
//! width `t` repeating with period `p`, patterned into a suspended membrane of
//! thickness `d` that rests on an oxide spacer above a gold back reflector.
//!
//! Post-fabrication digital etching removes a conformal skin of thickness
//! `etch_depth` from every exposed semiconductor surface.  In cross section
//! this maps the nominal dimensions to effective ones:
//!
//! ```text
//!   r -> r - etch_depth        (disc sidewall recedes)
//!   d -> d - etch_depth        (top surface recedes)
//!   t -> t + etch_depth        (trench widens; + 2x if both walls recede)
//! ```
//!
//! The struct stores the nominal dimensions plus the accumulated etch depth, so
//! applying two etch steps composes exactly: `etch(etch(g, a), b) == etch(g, a + b)`.
//! The raster builder samples [`Structure::medium_at`] which folds the etch
//! transform in; the cross section is symmetric in `|x|` by construction.

use serde::{Deserialize, Serialize};

use crate::FdtdError;

/// Medium at a point of the cross section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Medium {
    /// Lossless dielectric with the given relative permittivity.
    Dielectric(f64),
    /// Dispersive gold, handled by the auxiliary-current update.
    Gold,
}

/// Drude-pole description of the gold mirror, `eps(E) = eps_inf - Ep^2 / (E^2 + i g E)`.
///
/// The default coefficients are a least-squares fit of the single-pole model to
/// tabulated room-temperature gold optical constants over the 1.4-1.8 eV band;
/// the residual on both n and k stays below 5 % there (checked by a unit test).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoldModel {
    /// High-frequency permittivity offset.
    pub eps_inf: f64,
    /// Plasma energy in eV.
    pub omega_p_ev: f64,
    /// Collision rate in eV.
    pub gamma_ev: f64,
}

impl Default for GoldModel {
    fn default() -> Self {
        GoldModel {
            eps_inf: 14.81,
            omega_p_ev: 9.69,
            gamma_ev: 0.0585,
        }
    }
}

impl GoldModel {
    /// Complex relative permittivity at photon energy `e_ev` (e^{-i w t} convention).
    pub fn permittivity(&self, e_ev: f64) -> (f64, f64) {
        let e2 = e_ev * e_ev;
        let g = self.gamma_ev;
        // eps = eps_inf - Ep^2/(E^2 + igE) = eps_inf - Ep^2 (E^2 - igE)/(E^4 + g^2 E^2)
        let denom = e2 * (e2 + g * g);
        let wp2 = self.omega_p_ev * self.omega_p_ev;
        let re = self.eps_inf - wp2 * e2 / denom;
        let im = wp2 * g * e_ev / denom;
        (re, im)
    }

    /// Complex refractive index (n, k) at photon energy `e_ev`.
    pub fn refractive_index(&self, e_ev: f64) -> (f64, f64) {
        let (er, ei) = self.permittivity(e_ev);
        let mag = (er * er + ei * ei).sqrt();
        let n = ((mag + er) / 2.0).sqrt();
        let k = ((mag - er) / 2.0).sqrt();
        (n, k)
    }
}

/// As-fabricated bullseye dimensions plus the accumulated etch depth (all nm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbrGeometry {
    /// Grating period (trench + ridge width).
    pub period_nm: f64,
    /// Trench width.
    pub trench_nm: f64,
    /// Central disc radius.
    pub disc_radius_nm: f64,
    /// Membrane thickness.
    pub membrane_nm: f64,
    /// Oxide spacer thickness between membrane and gold.
    pub oxide_nm: f64,
    /// Membrane refractive index.
    pub n_membrane: f64,
    /// Oxide refractive index.
    pub n_oxide: f64,
    /// Number of trenches around the disc.
    pub n_rings: u32,
    /// Accumulated etch depth applied to the nominal dimensions.
    pub etch_depth_nm: f64,
    /// Whether the etch widens each trench from both sidewalls (2x per trench)
    /// instead of the single outward-facing wall.
    pub double_sided_trench: bool,
    /// Dispersion model for the gold back reflector.
    pub gold: GoldModel,
}

impl Default for CbrGeometry {
    fn default() -> Self {
        CbrGeometry {
            period_nm: 380.0,
            trench_nm: 100.0,
            disc_radius_nm: 333.0,
            membrane_nm: 148.0,
            oxide_nm: 200.0,
            n_membrane: 3.3,
            n_oxide: 1.64,
            n_rings: 6,
            etch_depth_nm: 0.0,
            double_sided_trench: false,
            gold: GoldModel::default(),
        }
    }
}

impl CbrGeometry {
    /// Validate dimensions and the etch invariant.
    pub fn validate(&self) -> Result<(), FdtdError> {
        let positive = [
            ("period_nm", self.period_nm),
            ("trench_nm", self.trench_nm),
            ("disc_radius_nm", self.disc_radius_nm),
            ("membrane_nm", self.membrane_nm),
            ("oxide_nm", self.oxide_nm),
            ("n_membrane", self.n_membrane),
            ("n_oxide", self.n_oxide),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(FdtdError::Geometry {
                    message: format!("{name} must be finite and positive, got {value}"),
                });
            }
        }
        if self.trench_nm >= self.period_nm {
            return Err(FdtdError::Geometry {
                message: format!(
                    "trench width {} nm must be smaller than the period {} nm",
                    self.trench_nm, self.period_nm
                ),
            });
        }
        if !self.etch_depth_nm.is_finite() || self.etch_depth_nm < 0.0 {
            return Err(FdtdError::Geometry {
                message: format!("etch depth must be finite and >= 0, got {}", self.etch_depth_nm),
            });
        }
        let limit = self
            .disc_radius_nm
            .min(self.membrane_nm)
            .min(self.period_nm - self.trench_nm);
        let applied = if self.double_sided_trench {
            2.0 * self.etch_depth_nm
        } else {
            self.etch_depth_nm
        };
        if applied >= limit {
            return Err(FdtdError::Geometry {
                message: format!(
                    "etch depth {} nm would consume a feature (limit {} nm from min(r, d, p - t))",
                    self.etch_depth_nm, limit
                ),
            });
        }
        Ok(())
    }

    /// Effective disc radius after etching.
    pub fn disc_radius_eff(&self) -> f64 {
        self.disc_radius_nm - self.etch_depth_nm
    }

    /// Effective membrane thickness after etching.
    pub fn membrane_eff(&self) -> f64 {
        self.membrane_nm - self.etch_depth_nm
    }

    /// Effective trench width after etching.
    pub fn trench_eff(&self) -> f64 {
        if self.double_sided_trench {
            self.trench_nm + 2.0 * self.etch_depth_nm
        } else {
            self.trench_nm + self.etch_depth_nm
        }
    }

    /// Outer radius of the patterned region (unaffected by the etch transform).
    pub fn pattern_radius(&self) -> f64 {
        self.disc_radius_nm + self.n_rings as f64 * self.period_nm
    }

    /// True when radial coordinate `rho >= 0` falls inside a trench (air gap).
    pub fn in_trench(&self, rho: f64) -> bool {
        let r_eff = self.disc_radius_eff();
        if rho < r_eff {
            return false;
        }
        // Trench k nominally spans [r + k p, r + k p + t].  Etching recedes the
        // outward-facing wall of disc and rings by the etch depth; with
        // double-sided trenches the inward-facing wall recedes too.
        let delta = self.etch_depth_nm;
        let inner_shift = delta; // outward-facing wall always recedes
        let outer_shift = if self.double_sided_trench { delta } else { 0.0 };
        for k in 0..self.n_rings {
            let a = self.disc_radius_nm + k as f64 * self.period_nm - inner_shift;
            let b = self.disc_radius_nm + k as f64 * self.period_nm + self.trench_nm + outer_shift;
            if rho >= a && rho < b {
                return true;
            }
            if rho < a {
                return false;
            }
        }
        false
    }
}

/// Apply one etch step of `delta_nm` to a geometry, returning the etched copy.
///
/// The transform is cumulative and validates that no feature is etched away.
pub fn build_geometry(base: &CbrGeometry, delta_nm: f64) -> Result<CbrGeometry, FdtdError> {
    if !delta_nm.is_finite() || delta_nm < 0.0 {
        return Err(FdtdError::Geometry {
            message: format!("etch step must be finite and >= 0, got {delta_nm}"),
        });
    }
    let mut etched = base.clone();
    etched.etch_depth_nm += delta_nm;
    etched.validate()?;
    Ok(etched)
}

/// What fills the simulated cross section.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    /// Patterned bullseye on the full layer stack.
    Cbr(CbrGeometry),
    /// The same layer stack without the pattern (reference for relative spectra).
    Planar(CbrGeometry),
    /// Homogeneous medium (bulk emission reference, calibration runs).
    Uniform { eps: f64 },
}

/// Thickness of gold included below the oxide; the domain bottom is a mirror
/// boundary inside the gold, which is many skin depths (~25 nm) thick.
pub const GOLD_THICKNESS_NM: f64 = 120.0;

impl Structure {
    /// Gold model when the structure contains the layer stack.
    pub fn gold(&self) -> Option<&GoldModel> {
        match self {
            Structure::Cbr(g) | Structure::Planar(g) => Some(&g.gold),
            Structure::Uniform { .. } => None,
        }
    }

    /// Geometry of the stack, if any.
    pub fn geometry(&self) -> Option<&CbrGeometry> {
        match self {
            Structure::Cbr(g) | Structure::Planar(g) => Some(g),
            Structure::Uniform { .. } => None,
        }
    }

    /// Medium at (x, y), with y measured upward from the bottom of the gold.
    ///
    /// Evaluates at |x| so the cross section is mirror symmetric exactly.
    pub fn medium_at(&self, x: f64, y: f64) -> Medium {
        let rho = x.abs();
        match self {
            Structure::Uniform { eps } => Medium::Dielectric(*eps),
            Structure::Planar(g) | Structure::Cbr(g) => {
                if y < GOLD_THICKNESS_NM {
                    return Medium::Gold;
                }
                let y_ox_top = GOLD_THICKNESS_NM + g.oxide_nm;
                if y < y_ox_top {
                    return Medium::Dielectric(g.n_oxide * g.n_oxide);
                }
                let y_mem_top = y_ox_top + g.membrane_eff();
                if y < y_mem_top {
                    let patterned = matches!(self, Structure::Cbr(_));
                    if patterned && (g.in_trench(rho) || rho >= g.pattern_radius()) {
                        return Medium::Dielectric(1.0);
                    }
                    return Medium::Dielectric(g.n_membrane * g.n_membrane);
                }
                Medium::Dielectric(1.0)
            }
        }
    }

    /// Static permittivity used by the field update at a point (gold uses its
    /// high-frequency offset; the auxiliary current supplies the dispersion).
    pub fn static_eps(&self, x: f64, y: f64) -> f64 {
        match self.medium_at(x, y) {
            Medium::Dielectric(e) => e,
            Medium::Gold => self.gold().map(|g| g.eps_inf).unwrap_or(1.0),
        }
    }
}
