//! Leapfrog time stepping of the 2-D TM fields (Ez, Hx, Hy).
//!
//! The electric field lives at integer grid points, Hx half a cell up, Hy half
//! a cell right, and the two families leapfrog in time.  Gold cells carry an
//! auxiliary polarisation current integrated alongside the E update, which
//! realises the single-pole Drude permittivity exactly in the continuum limit.
//!
//! Updates run in parallel over fixed eight-row stripes.  Every cell's
//! arithmetic depends only on its own neighbourhood and the stripe boundaries
//! never move, so results are bitwise independent of how many worker threads
//! execute the stripes; all reductions (energy probes, spectra) run serially.
//!
//! A run terminates when the interior energy falls below `energy_floor` times
//! its peak (after the sources have rung down) or at the configured period
//! cap.  Unstable configurations — energy growing tenfold beyond its peak for
//! a hundred consecutive steps, or any non-finite value — abort with a
//! stability error instead of producing garbage spectra.

use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{omega_of_ev, SimulationConfig};
use crate::cpml::CpmlCoeffs;
use crate::dft::{C64, LineMonitor, LineOrientation, PointProbe, TimeProbe};
use crate::geometry::Structure;
use crate::grid::{Boundaries, DomainSpec, Grid};
use crate::source::{Footprint, Source};
use crate::FdtdError;

/// Rows per parallel stripe; fixed so chunk boundaries (and therefore every
/// floating-point operation) are identical for any worker-thread count.
const STRIPE: usize = 8;

/// Steps between energy samples.
const ENERGY_CHECK_EVERY: usize = 25;

/// Consecutive violating samples (spanning 100 steps) that signal divergence.
const VIOLATIONS_TO_ABORT: usize = 4;

/// Summary of a completed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub peak_energy: f64,
    pub final_energy: f64,
    /// True when the energy criterion ended the run (false: period cap).
    pub stopped_on_energy: bool,
}

pub struct Simulation {
    grid: Grid,
    cpml: CpmlCoeffs,
    ez: Vec<f64>,
    hx: Vec<f64>,
    hy: Vec<f64>,
    psi_ezx: Vec<f64>,
    psi_ezy: Vec<f64>,
    psi_hxy: Vec<f64>,
    psi_hyx: Vec<f64>,
    jz: Vec<f64>,
    j_alpha: f64,
    j_beta: f64,
    dt_over_eps: Vec<f64>,
    sources: Vec<Source>,
    monitors: Vec<LineMonitor>,
    point_probes: Vec<PointProbe>,
    time_probes: Vec<TimeProbe>,
    omegas: Vec<f64>,
    dec: usize,
    energy_floor: f64,
    max_periods: f64,
    step_count: usize,
}

impl Simulation {
    pub fn new(
        structure: &Structure,
        config: &SimulationConfig,
        domain: &DomainSpec,
        boundaries: Boundaries,
    ) -> Result<Simulation, FdtdError> {
        let grid = Grid::build(structure, config, domain, boundaries)?;
        let cpml = CpmlCoeffs::build(&grid, config);
        let n = grid.nx * grid.ny;
        let dt = grid.dt;
        let dt_over_eps = grid.eps.iter().map(|&e| dt / e).collect();
        // Drude auxiliary-current coefficients (semi-implicit in the collision
        // term): J' = a J + b E with a = (2 - g dt)/(2 + g dt), b = 2 wp^2 dt/(2 + g dt).
        let (j_alpha, j_beta) = match structure.gold() {
            Some(g) => {
                let wp = omega_of_ev(g.omega_p_ev);
                let ga = omega_of_ev(g.gamma_ev);
                let denom = 2.0 + ga * dt;
                ((2.0 - ga * dt) / denom, 2.0 * wp * wp * dt / denom)
            }
            None => (0.0, 0.0),
        };
        Ok(Simulation {
            cpml,
            ez: vec![0.0; n],
            hx: vec![0.0; n],
            hy: vec![0.0; n],
            psi_ezx: vec![0.0; n],
            psi_ezy: vec![0.0; n],
            psi_hxy: vec![0.0; n],
            psi_hyx: vec![0.0; n],
            jz: vec![0.0; n],
            j_alpha,
            j_beta,
            dt_over_eps,
            sources: Vec::new(),
            monitors: Vec::new(),
            point_probes: Vec::new(),
            time_probes: Vec::new(),
            omegas: config.frequencies_ev.iter().map(|&f| omega_of_ev(f)).collect(),
            dec: config.dft_decimation,
            energy_floor: config.energy_floor,
            max_periods: config.max_periods,
            step_count: 0,
            grid,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.step_count as f64 * self.grid.dt
    }

    pub fn add_source(&mut self, source: Source) -> Result<(), FdtdError> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let ok = match &source.footprint {
            Footprint::Point { i, j } => *i >= 1 && *i < nx - 1 && *j >= 1 && *j < ny - 1,
            Footprint::Line { j, i0, amps } => {
                *j >= 1 && *j < ny - 1 && *i0 >= 1 && i0 + amps.len() <= nx - 1
            }
        };
        if !ok {
            return Err(FdtdError::Config {
                message: "source footprint extends onto the domain boundary".into(),
            });
        }
        self.sources.push(source);
        Ok(())
    }

    pub fn add_hline_monitor(&mut self, j: usize, i0: usize, i1: usize) -> Result<usize, FdtdError> {
        if j < 1 || j >= self.grid.ny - 1 || i1 >= self.grid.nx || i0 > i1 {
            return Err(FdtdError::Config {
                message: format!("horizontal monitor out of bounds (j = {j}, span {i0}..{i1})"),
            });
        }
        self.monitors.push(LineMonitor::new(
            LineOrientation::Horizontal,
            j,
            i0,
            i1,
            self.omegas.len(),
        ));
        Ok(self.monitors.len() - 1)
    }

    pub fn add_vline_monitor(&mut self, i: usize, j0: usize, j1: usize) -> Result<usize, FdtdError> {
        if i < 1 || i >= self.grid.nx - 1 || j1 >= self.grid.ny || j0 > j1 || j0 < 1 {
            return Err(FdtdError::Config {
                message: format!("vertical monitor out of bounds (i = {i}, span {j0}..{j1})"),
            });
        }
        self.monitors.push(LineMonitor::new(
            LineOrientation::Vertical,
            i,
            j0,
            j1,
            self.omegas.len(),
        ));
        Ok(self.monitors.len() - 1)
    }

    pub fn add_point_probe(&mut self, i: usize, j: usize) -> usize {
        self.point_probes.push(PointProbe {
            i,
            j,
            ez: vec![C64::ZERO; self.omegas.len()],
        });
        self.point_probes.len() - 1
    }

    pub fn add_time_probe(&mut self, i: usize, j: usize) -> usize {
        self.time_probes.push(TimeProbe {
            i,
            j,
            series: Vec::new(),
        });
        self.time_probes.len() - 1
    }

    pub fn monitor(&self, id: usize) -> &LineMonitor {
        &self.monitors[id]
    }

    pub fn point_probe(&self, id: usize) -> &PointProbe {
        &self.point_probes[id]
    }

    pub fn time_probe(&self, id: usize) -> &TimeProbe {
        &self.time_probes[id]
    }

    /// Photon energies (as angular frequencies) the monitors record.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn ez_field(&self) -> &[f64] {
        &self.ez
    }

    /// Direct field access for seeding initial conditions in tests.
    pub fn ez_field_mut(&mut self) -> &mut [f64] {
        &mut self.ez
    }

    fn update_h(&mut self) {
        let nx = self.grid.nx;
        let ny = self.grid.ny;
        let inv_dx = 1.0 / self.grid.dx;
        let dt = self.grid.dt;
        let ez = &self.ez[..];

        let bh_y = &self.cpml.bh_y[..];
        let ch_y = &self.cpml.ch_y[..];
        self.hx
            .par_chunks_mut(STRIPE * nx)
            .zip(self.psi_hxy.par_chunks_mut(STRIPE * nx))
            .enumerate()
            .for_each(|(ci, (hxc, pc))| {
                let j0 = ci * STRIPE;
                let rows = hxc.len() / nx;
                for lj in 0..rows {
                    let j = j0 + lj;
                    if j + 1 >= ny {
                        continue;
                    }
                    let b = bh_y[j];
                    let cf = ch_y[j];
                    let ezj = &ez[j * nx..(j + 1) * nx];
                    let ezj1 = &ez[(j + 1) * nx..(j + 2) * nx];
                    let hr = &mut hxc[lj * nx..(lj + 1) * nx];
                    if cf == 0.0 {
                        for i in 0..nx {
                            let d = (ezj1[i] - ezj[i]) * inv_dx;
                            hr[i] -= dt * d;
                        }
                    } else {
                        let pr = &mut pc[lj * nx..(lj + 1) * nx];
                        for i in 0..nx {
                            let d = (ezj1[i] - ezj[i]) * inv_dx;
                            let p = b * pr[i] + cf * d;
                            pr[i] = p;
                            hr[i] -= dt * (d + p);
                        }
                    }
                }
            });

        let bh_x = &self.cpml.bh_x[..];
        let ch_x = &self.cpml.ch_x[..];
        self.hy
            .par_chunks_mut(STRIPE * nx)
            .zip(self.psi_hyx.par_chunks_mut(STRIPE * nx))
            .enumerate()
            .for_each(|(ci, (hyc, pc))| {
                let j0 = ci * STRIPE;
                let rows = hyc.len() / nx;
                for lj in 0..rows {
                    let j = j0 + lj;
                    if j >= ny {
                        continue;
                    }
                    let ezj = &ez[j * nx..(j + 1) * nx];
                    let hr = &mut hyc[lj * nx..(lj + 1) * nx];
                    let pr = &mut pc[lj * nx..(lj + 1) * nx];
                    for i in 0..nx - 1 {
                        let d = (ezj[i + 1] - ezj[i]) * inv_dx;
                        let p = bh_x[i] * pr[i] + ch_x[i] * d;
                        pr[i] = p;
                        hr[i] += dt * (d + p);
                    }
                }
            });
    }

    fn update_e(&mut self) {
        let nx = self.grid.nx;
        let ny = self.grid.ny;
        let inv_dx = 1.0 / self.grid.dx;

        // Advance the gold polarisation current with the pre-update field; the
        // drive is scaled by the cell's gold filling fraction.
        let (ja, jb) = (self.j_alpha, self.j_beta);
        for &(idx, fill) in &self.grid.gold_cells {
            self.jz[idx] = ja * self.jz[idx] + fill * jb * self.ez[idx];
        }

        let hx = &self.hx[..];
        let hy = &self.hy[..];
        let jz = &self.jz[..];
        let dte = &self.dt_over_eps[..];
        let be_x = &self.cpml.be_x[..];
        let ce_x = &self.cpml.ce_x[..];
        let be_y = &self.cpml.be_y[..];
        let ce_y = &self.cpml.ce_y[..];

        self.ez
            .par_chunks_mut(STRIPE * nx)
            .zip(self.psi_ezx.par_chunks_mut(STRIPE * nx))
            .zip(self.psi_ezy.par_chunks_mut(STRIPE * nx))
            .enumerate()
            .for_each(|(ci, ((ezc, pxc), pyc))| {
                let j0 = ci * STRIPE;
                let rows = ezc.len() / nx;
                for lj in 0..rows {
                    let j = j0 + lj;
                    if j == 0 || j + 1 >= ny {
                        continue; // conductor backing at top and bottom rows
                    }
                    let bey = be_y[j];
                    let cey = ce_y[j];
                    let row = j * nx;
                    let er = &mut ezc[lj * nx..(lj + 1) * nx];
                    let pxr = &mut pxc[lj * nx..(lj + 1) * nx];
                    let pyr = &mut pyc[lj * nx..(lj + 1) * nx];
                    for i in 1..nx - 1 {
                        let idx = row + i;
                        let dhy = (hy[idx] - hy[idx - 1]) * inv_dx;
                        let dhx = (hx[idx] - hx[idx - nx]) * inv_dx;
                        let px = be_x[i] * pxr[i] + ce_x[i] * dhy;
                        pxr[i] = px;
                        let py = bey * pyr[i] + cey * dhx;
                        pyr[i] = py;
                        er[i] += dte[idx] * (dhy + px - dhx - py - jz[idx]);
                    }
                }
            });
    }

    fn inject_and_record(&mut self) {
        let dt = self.grid.dt;
        // Sources act as currents over the step just taken, evaluated at its
        // temporal midpoint.
        let t_mid = (self.step_count as f64 + 0.5) * dt;
        let nx = self.grid.nx;
        for s in &self.sources {
            let v = s.amplitude * s.pulse.value(t_mid) * dt;
            match &s.footprint {
                Footprint::Point { i, j } => {
                    self.ez[j * nx + i] += v;
                }
                Footprint::Line { j, i0, amps } => {
                    let row = j * nx;
                    for (k, a) in amps.iter().enumerate() {
                        self.ez[row + i0 + k] += v * a;
                    }
                }
            }
        }
        self.step_count += 1;
        let t = self.step_count as f64 * dt;

        for p in &mut self.time_probes {
            p.series.push(self.ez[p.j * nx + p.i]);
        }

        if self.step_count % self.dec != 0 {
            return;
        }
        // Decimated spectra: E referenced to t, H to t - dt/2.
        let weight = dt * self.dec as f64;
        let ez = &self.ez[..];
        let hx = &self.hx[..];
        let hy = &self.hy[..];
        for (f, &omega) in self.omegas.iter().enumerate() {
            let ph_e = C64::phasor(omega * t).scale(weight);
            let ph_h = C64::phasor(omega * (t - 0.5 * dt)).scale(weight);
            for m in &mut self.monitors {
                let base = f * m.len;
                match m.orientation {
                    LineOrientation::Horizontal => {
                        let j = m.fixed;
                        for c in 0..m.len {
                            let i = m.a0 + c;
                            let idx = j * nx + i;
                            let e = ez[idx];
                            let h = 0.5 * (hx[idx] + hx[idx - nx]);
                            m.ez[base + c] = m.ez[base + c].add(ph_e.scale(e));
                            m.ht[base + c] = m.ht[base + c].add(ph_h.scale(h));
                        }
                    }
                    LineOrientation::Vertical => {
                        let i = m.fixed;
                        for c in 0..m.len {
                            let j = m.a0 + c;
                            let idx = j * nx + i;
                            let e = ez[idx];
                            let h = 0.5 * (hy[idx] + hy[idx - 1]);
                            m.ez[base + c] = m.ez[base + c].add(ph_e.scale(e));
                            m.ht[base + c] = m.ht[base + c].add(ph_h.scale(h));
                        }
                    }
                }
            }
            for p in &mut self.point_probes {
                let e = ez[p.j * nx + p.i];
                p.ez[f] = p.ez[f].add(ph_e.scale(e));
            }
        }
    }

    /// Advance one full leapfrog step (H, then E, then sources and records).
    pub fn step(&mut self) {
        self.update_h();
        self.update_e();
        self.inject_and_record();
    }

    /// One step returning the discretely conserved energy
    /// `1/2 sum eps Ez^2 + 1/2 sum H(n-1/2) H(n+1/2)` evaluated mid-step; in a
    /// lossless mirror-boxed domain this invariant is constant to rounding.
    pub fn step_with_staggered_energy(&mut self) -> f64 {
        let hx_old = self.hx.clone();
        let hy_old = self.hy.clone();
        self.update_h();
        let mut energy = 0.0;
        for (idx, &e) in self.ez.iter().enumerate() {
            energy += 0.5 * self.grid.eps[idx] * e * e;
        }
        for idx in 0..self.hx.len() {
            energy += 0.5 * (hx_old[idx] * self.hx[idx] + hy_old[idx] * self.hy[idx]);
        }
        self.update_e();
        self.inject_and_record();
        energy
    }

    /// Instantaneous field energy `1/2 sum (eps Ez^2 + Hx^2 + Hy^2)`.
    pub fn energy(&self) -> f64 {
        let mut e_sum = 0.0;
        for (idx, &e) in self.ez.iter().enumerate() {
            e_sum += self.grid.eps[idx] * e * e;
        }
        let mut h_sum = 0.0;
        for idx in 0..self.hx.len() {
            h_sum += self.hx[idx] * self.hx[idx] + self.hy[idx] * self.hy[idx];
        }
        0.5 * (e_sum + h_sum)
    }

    /// Run until the ring-down criterion or the period cap.
    pub fn run(&mut self) -> Result<RunStats, FdtdError> {
        if self.sources.is_empty() {
            return Err(FdtdError::Config {
                message: "run() needs at least one source; use step() to evolve seeded fields".into(),
            });
        }
        // Every monitored frequency must fall in the flat part of some pulse
        // spectrum, or its normalisation would divide by numerical noise.
        for &omega in &self.omegas {
            let covered = self.sources.iter().any(|s| {
                let r = omega / s.pulse.omega0;
                (0.5..=1.75).contains(&r)
            });
            if !covered {
                return Err(FdtdError::Config {
                    message: format!(
                        "monitor frequency {:.4} rad/nm lies outside the source bandwidth",
                        omega
                    ),
                });
            }
        }
        let period = 2.0 * std::f64::consts::PI / self.sources[0].pulse.omega0;
        let max_steps = (self.max_periods * period / self.grid.dt).ceil() as usize;
        let source_end = self
            .sources
            .iter()
            .map(|s| s.pulse.end_time())
            .fold(0.0_f64, f64::max);

        let mut peak = 0.0_f64;
        let mut violations = 0usize;
        let start_step = self.step_count;
        loop {
            self.step();
            let n = self.step_count - start_step;
            if self.step_count % ENERGY_CHECK_EVERY == 0 {
                let e = self.energy();
                if !e.is_finite() {
                    return Err(FdtdError::Stability {
                        step: self.step_count,
                        energy_ratio: f64::INFINITY,
                        suspect: "courant_factor or absorber profile".into(),
                    });
                }
                if self.time() > source_end {
                    if peak > 0.0 && e > 10.0 * peak {
                        violations += 1;
                        if violations >= VIOLATIONS_TO_ABORT {
                            return Err(FdtdError::Stability {
                                step: self.step_count,
                                energy_ratio: e / peak,
                                suspect: "courant_factor or absorber profile".into(),
                            });
                        }
                    } else {
                        violations = 0;
                    }
                    if peak > 0.0 && e < self.energy_floor * peak {
                        return Ok(RunStats {
                            steps: n,
                            peak_energy: peak,
                            final_energy: e,
                            stopped_on_energy: true,
                        });
                    }
                }
                peak = peak.max(e);
            }
            if n >= max_steps {
                let e = self.energy();
                return Ok(RunStats {
                    steps: n,
                    peak_energy: peak.max(e),
                    final_energy: e,
                    stopped_on_energy: false,
                });
            }
        }
    }

    /// Advance exactly `n` steps with stability checks only (no termination
    /// criterion); for property tests driving seeded or short evolutions.
    pub fn run_steps(&mut self, n: usize) -> Result<(), FdtdError> {
        for _ in 0..n {
            self.step();
            if self.step_count % ENERGY_CHECK_EVERY == 0 {
                let e = self.energy();
                if !e.is_finite() {
                    return Err(FdtdError::Stability {
                        step: self.step_count,
                        energy_ratio: f64::INFINITY,
                        suspect: "courant_factor or absorber profile".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Dump the Ez field as little-endian f64 with a JSON sidecar.
    pub fn write_snapshot(&self, dir: &Path, name: &str) -> Result<(), FdtdError> {
        std::fs::create_dir_all(dir)?;
        let mut bytes = Vec::with_capacity(self.ez.len() * 8);
        for &v in &self.ez {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(dir.join(format!("{name}.f64")), bytes)?;
        let sidecar = serde_json::json!({
            "field": "Ez",
            "nx": self.grid.nx,
            "ny": self.grid.ny,
            "dx_nm": self.grid.dx,
            "time_nm": self.time(),
            "dtype": "f64le",
            "layout": "row-major, index = j * nx + i",
        });
        let mut f = std::fs::File::create(dir.join(format!("{name}.json")))?;
        writeln!(f, "{}", serde_json::to_string_pretty(&sidecar).expect("static json"))?;
        Ok(())
    }
}
