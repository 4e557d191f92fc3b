//! Temporary diagnostic: grid convergence and the full default ladder.

use cbr_fdtd::{
    beam_calibration, etch_sweep, reflectance_with_calibration, CbrGeometry, SimulationConfig,
};
use cbr_lineshapes::fit_fano;

#[test]
#[ignore]
fn convergence_and_full_ladder() {
    let base = CbrGeometry {
        n_rings: 4,
        ..CbrGeometry::default()
    };

    // Grid convergence of the dip centre between 20 and 30 cells/wavelength.
    let mut centers = Vec::new();
    for res in [20.0, 30.0] {
        let mut cfg = SimulationConfig::default();
        cfg.resolution = res;
        cfg.pml.cells = (10.0 * res / 20.0).round() as usize;
        let t0 = std::time::Instant::now();
        let cal = beam_calibration(&base, &cfg).unwrap();
        let rf = reflectance_with_calibration(&base, &cfg, &cal).unwrap();
        let spec = rf.to_spectrum("r").unwrap();
        let fit = fit_fano(&spec, None).unwrap();
        eprintln!(
            "res {res}: Ec {:.6} eV  Gamma {:.2} meV  ({:.1} s)",
            fit.params.center_ev,
            1000.0 * fit.params.gamma_ev,
            t0.elapsed().as_secs_f64()
        );
        centers.push(fit.params.center_ev);
    }
    eprintln!(
        "relative Ec shift 20 -> 30 cells: {:.4} %",
        100.0 * ((centers[1] - centers[0]) / centers[0]).abs()
    );

    // Full default ladder.
    let cfg = SimulationConfig::default();
    let deltas: Vec<f64> = (0..15).map(|k| 1.2 * k as f64).collect();
    let t0 = std::time::Instant::now();
    let table = etch_sweep(&base, &cfg, &deltas).unwrap();
    eprintln!("full sweep of {} depths in {:.1} s", deltas.len(), t0.elapsed().as_secs_f64());
    for r in &table.rows {
        eprintln!(
            "delta {:4.1}  Ec {:.5} eV ({:.2} nm)  Gamma {:5.2} meV  Q {:6.1}  Fp {:5.3} at {:.5} eV (dE {:+5.2} meV)",
            r.delta_nm,
            r.ec_ev,
            1239.84198 / r.ec_ev,
            1000.0 * r.gamma_ev,
            r.q,
            r.fp_peak,
            r.fp_peak_ev,
            1000.0 * (r.fp_peak_ev - r.ec_ev),
        );
    }
    eprintln!("sensitivity {:.3} nm/nm", table.sensitivity_nm_per_nm().unwrap());
}
