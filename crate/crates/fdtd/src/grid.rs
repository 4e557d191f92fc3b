//! Cartesian raster of the cross section and the standard domain layouts.
//!
//! The electric field samples live at integer grid points `(i, j)`; the cell
//! permittivity is the arithmetic average of the structure permittivity over an
//! 8x8 subsample of the cell, which smooths material boundaries onto the grid
//! and makes the raster vary continuously under nm-scale etch steps.  Cells
//! with any gold subsamples carry the dispersive update scaled by the gold
//! filling fraction; since the out-of-plane field is tangential to every
//! interface, arithmetic mixing of eps(omega) is the correct effective medium
//! and the mirror plane converges at second order like the dielectric edges.
//!
//! The x axis is centred: `nx` is odd and column `(nx - 1) / 2` sits at x = 0,
//! so a mirror-symmetric structure rasterises to an exactly mirror-symmetric
//! permittivity array.

use crate::config::SimulationConfig;
use crate::geometry::{Medium, Structure, GOLD_THICKNESS_NM};
use crate::FdtdError;

/// Per-side boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Perfect electric conductor (also the backing behind every absorber).
    Pec,
    /// Convolutional absorbing layer.
    Cpml,
}

/// Boundary assignment for the four domain edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundaries {
    pub left: Boundary,
    pub right: Boundary,
    pub top: Boundary,
    pub bottom: Boundary,
}

impl Boundaries {
    /// Absorbing on all four sides (homogeneous reference runs).
    pub fn open() -> Self {
        Boundaries {
            left: Boundary::Cpml,
            right: Boundary::Cpml,
            top: Boundary::Cpml,
            bottom: Boundary::Cpml,
        }
    }

    /// Absorbing top and sides, mirror bottom (layer-stack runs: the gold is
    /// backed by a conductor inside the metal where fields have died off).
    pub fn stack() -> Self {
        Boundaries {
            left: Boundary::Cpml,
            right: Boundary::Cpml,
            top: Boundary::Cpml,
            bottom: Boundary::Pec,
        }
    }

    /// Mirror on all four sides (energy-conservation checks).
    pub fn closed() -> Self {
        Boundaries {
            left: Boundary::Pec,
            right: Boundary::Pec,
            top: Boundary::Pec,
            bottom: Boundary::Pec,
        }
    }
}

/// Physical extents of the interior (absorber-free) region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    /// Interior half-width in nm (domain spans roughly +/- this plus absorber).
    pub half_width_nm: f64,
    /// Interior height in nm above y = 0.
    pub height_nm: f64,
}

/// Margin between the outermost ring and the side absorber.
pub const SIDE_PAD_NM: f64 = 260.0;
/// Air gap between the membrane top and the top absorber.
pub const AIR_PAD_NM: f64 = 560.0;

/// Vertical stations of the standard stack layout (all nm above the domain floor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackLayout {
    pub y_gold_top: f64,
    pub y_oxide_top: f64,
    /// Top of the *unetched* membrane; the etched surface sits below this.
    pub y_membrane_top: f64,
    /// Mid-plane of the etched membrane (standard emitter position).
    pub y_membrane_mid: f64,
    /// Height of the beam line source in the air region.
    pub y_beam_source: f64,
    /// Height of the top flux/spectrum monitor (above the beam source).
    pub y_top_monitor: f64,
}

impl StackLayout {
    /// Layout for a geometry; positions that depend on the etch use its
    /// effective dimensions, while the domain extents use the nominal ones so
    /// every member of an etch sweep shares one grid.
    pub fn of(geometry: &crate::geometry::CbrGeometry) -> StackLayout {
        let y_gold_top = GOLD_THICKNESS_NM;
        let y_oxide_top = y_gold_top + geometry.oxide_nm;
        let y_membrane_top = y_oxide_top + geometry.membrane_nm;
        let y_membrane_mid = y_oxide_top + geometry.membrane_eff() / 2.0;
        StackLayout {
            y_gold_top,
            y_oxide_top,
            y_membrane_top,
            y_membrane_mid,
            y_beam_source: y_membrane_top + 300.0,
            y_top_monitor: y_membrane_top + 380.0,
        }
    }

    /// Interior domain size enclosing the pattern with standard margins.
    pub fn domain(&self, geometry: &crate::geometry::CbrGeometry) -> DomainSpec {
        DomainSpec {
            half_width_nm: geometry.pattern_radius() + SIDE_PAD_NM,
            height_nm: self.y_membrane_top + AIR_PAD_NM,
        }
    }
}

/// Rasterised simulation domain.
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dt: f64,
    /// Static relative permittivity at each E sample, row-major `j * nx + i`.
    pub eps: Vec<f64>,
    /// Cells carrying the dispersive gold update, with the gold filling
    /// fraction of each (1.0 in the bulk, fractional in the interface shell).
    pub gold_cells: Vec<(usize, f64)>,
    pub boundaries: Boundaries,
    /// Absorber thickness in cells.
    pub npml: usize,
}

impl Grid {
    /// Flat index of (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Centre column index (x = 0).
    pub fn ic(&self) -> usize {
        (self.nx - 1) / 2
    }

    /// x coordinate of column i, exact negation under mirror.
    #[inline]
    pub fn x_of(&self, i: usize) -> f64 {
        (i as f64 - self.ic() as f64) * self.dx
    }

    /// y coordinate of row j (y = 0 at the bottom edge).
    #[inline]
    pub fn y_of(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Column nearest an x coordinate.
    pub fn i_of_x(&self, x: f64) -> usize {
        let i = (x / self.dx + self.ic() as f64).round();
        i.clamp(0.0, (self.nx - 1) as f64) as usize
    }

    /// Row nearest a y coordinate.
    pub fn j_of_y(&self, y: f64) -> usize {
        let j = (y / self.dx).round();
        j.clamp(0.0, (self.ny - 1) as f64) as usize
    }

    /// Build the raster for a structure.
    ///
    /// The interior spans `+/- domain.half_width_nm` horizontally and
    /// `0..domain.height_nm` vertically; absorbing sides extend beyond it.
    /// With a mirror bottom, y = 0 is the conductor plane.
    pub fn build(
        structure: &Structure,
        config: &SimulationConfig,
        domain: &DomainSpec,
        boundaries: Boundaries,
    ) -> Result<Grid, FdtdError> {
        config.validate()?;
        if let Some(g) = structure.geometry() {
            g.validate()?;
        }
        if let Structure::Uniform { eps } = structure {
            if !(eps.is_finite() && *eps >= 1.0) {
                return Err(FdtdError::Geometry {
                    message: format!("uniform permittivity must be >= 1, got {eps}"),
                });
            }
        }
        if !(domain.half_width_nm > 0.0 && domain.height_nm > 0.0) {
            return Err(FdtdError::Config {
                message: "domain extents must be positive".into(),
            });
        }
        let dx = config.dx();
        let npml = config.pml.cells;
        let pad = |b: Boundary| if b == Boundary::Cpml { npml } else { 0 };

        let half_cells = (domain.half_width_nm / dx).ceil() as usize
            + pad(boundaries.left).max(pad(boundaries.right));
        let nx = 2 * half_cells + 1;
        let ny = (domain.height_nm / dx).ceil() as usize + pad(boundaries.top) + 1;

        let mut grid = Grid {
            nx,
            ny,
            dx,
            dt: config.dt(),
            eps: vec![1.0; nx * ny],
            gold_cells: Vec::new(),
            boundaries,
            npml,
        };

        // 8x8 subsampling; offsets are symmetric about the cell centre so the
        // mirrored column sees the same |x| sample multiset exactly.
        const SUB: usize = 8;
        let offsets: Vec<f64> = (0..SUB)
            .map(|s| ((s as f64 + 0.5) / SUB as f64 - 0.5) * dx)
            .collect();
        for j in 0..ny {
            let y0 = grid.y_of(j);
            for i in 0..nx {
                let x0 = grid.x_of(i);
                let mut gold = 0usize;
                let mut eps_sum = 0.0;
                let mut eps_n = 0usize;
                // Accumulate x offsets as +/- pairs: a mirrored column sees
                // each pair swapped, and two-term sums commute exactly, so the
                // raster is bitwise mirror-symmetric.
                for oy in &offsets {
                    for p in 0..SUB / 2 {
                        let mut pair = 0.0;
                        for ox in [offsets[p], offsets[SUB - 1 - p]] {
                            match structure.medium_at(x0 + ox, y0 + oy) {
                                Medium::Gold => gold += 1,
                                Medium::Dielectric(e) => {
                                    pair += e;
                                    eps_n += 1;
                                }
                            }
                        }
                        eps_sum += pair;
                    }
                }
                let idx = grid.idx(i, j);
                if gold > 0 {
                    // Fractional gold fill: for the out-of-plane field E is
                    // tangential to every interface, so the arithmetic mean of
                    // eps(omega) is the correct effective medium. A Drude term
                    // mixes linearly, so a partially filled cell keeps the
                    // full dispersive update scaled by the filling fraction,
                    // with the static parts mixed into the background eps.
                    let f = gold as f64 / (SUB * SUB) as f64;
                    let eps_inf = structure.gold().map(|g| g.eps_inf).unwrap_or(1.0);
                    let diel = if eps_n > 0 { eps_sum / eps_n as f64 } else { 0.0 };
                    grid.eps[idx] = f * eps_inf + (1.0 - f) * diel;
                    grid.gold_cells.push((idx, f));
                } else if eps_n > 0 {
                    grid.eps[idx] = eps_sum / eps_n as f64;
                } else {
                    grid.eps[idx] = 1.0;
                }
            }
        }
        Ok(grid)
    }
}
