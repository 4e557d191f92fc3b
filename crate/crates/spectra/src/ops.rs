use crate::{PhotonEnergy, Spectrum, SpectrumError, CONSTANTS};

/// Converts a vacuum wavelength in nm to photon energy, `E = hc / lambda`.
pub fn nm_to_ev(wavelength_nm: f64) -> Result<PhotonEnergy, SpectrumError> {
    if !wavelength_nm.is_finite() || wavelength_nm <= 0.0 {
        return Err(SpectrumError::InvalidWavelength(wavelength_nm));
    }
    PhotonEnergy::new(CONSTANTS.hc_ev_nm / wavelength_nm)
}

/// Converts a photon energy to vacuum wavelength in nm.
pub fn ev_to_nm(energy: PhotonEnergy) -> f64 {
    CONSTANTS.hc_ev_nm / energy.ev()
}

/// Laser energy for resonant two-photon excitation of the biexciton:
/// `E_laser = E_X - E_b / 2`, with the biexciton binding energy in meV.
pub fn tpe_laser_energy(
    exciton: PhotonEnergy,
    binding_mev: f64,
) -> Result<PhotonEnergy, SpectrumError> {
    if !binding_mev.is_finite() || binding_mev <= 0.0 {
        return Err(SpectrumError::InvalidBinding(binding_mev));
    }
    let ev = exciton.ev() - binding_mev * 1e-3 / 2.0;
    PhotonEnergy::new(ev).map_err(|_| SpectrumError::NonPositiveResult(ev))
}

/// Pointwise ratio of a measured (or simulated) spectrum against a reference,
/// e.g. a cavity reflectance normalized by the bare layer stack.
///
/// The reference is converted to the numerator's axis kind if needed and
/// resampled by linear interpolation when the grids differ; in that case the
/// result is restricted to the overlapping axis range. Spectra with no
/// overlap, or a reference that is zero anywhere on the output grid, are
/// rejected.
pub fn relative_reflectance(
    spectrum: &Spectrum,
    reference: &Spectrum,
) -> Result<Spectrum, SpectrumError> {
    let reference = reference.to_axis_kind(spectrum.axis_kind())?;
    let label = format!("{} / {}", spectrum.label(), reference.label());

    if spectrum.axis() == reference.axis() {
        let mut ratio = Vec::with_capacity(spectrum.len());
        for (i, (&num, &den)) in spectrum
            .intensity()
            .iter()
            .zip(reference.intensity())
            .enumerate()
        {
            if den == 0.0 {
                return Err(SpectrumError::ZeroReference { index: i, axis: spectrum.axis()[i] });
            }
            ratio.push(num / den);
        }
        return Spectrum::new(spectrum.axis().to_vec(), ratio, spectrum.axis_kind(), label);
    }

    // Differing grids: interpolate the reference onto the numerator's samples
    // over the common range.
    let lo = spectrum.axis()[0].max(reference.axis()[0]);
    let hi = spectrum.axis()[spectrum.len() - 1].min(reference.axis()[reference.len() - 1]);
    if lo >= hi {
        return Err(SpectrumError::DisjointAxes);
    }
    let mut axis = Vec::new();
    let mut ratio = Vec::new();
    for (&x, &num) in spectrum.axis().iter().zip(spectrum.intensity()) {
        if x < lo || x > hi {
            continue;
        }
        let den = reference.value_at(x).expect("x inside reference range");
        if den == 0.0 {
            return Err(SpectrumError::ZeroReference { index: axis.len(), axis: x });
        }
        axis.push(x);
        ratio.push(num / den);
    }
    if axis.len() < 2 {
        return Err(SpectrumError::DisjointAxes);
    }
    Spectrum::new(axis, ratio, spectrum.axis_kind(), label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_energy_conversion() {
        // hc = 1239.84198 eV nm: the 784 nm exciton line sits at 1.5814 eV.
        let e = nm_to_ev(784.0).unwrap();
        assert!((e.ev() - 1.5814).abs() < 5e-5, "got {}", e.ev());
        // 1239.84198 / 800 = 1.54980...
        let e800 = nm_to_ev(800.0).unwrap();
        assert!((e800.ev() - 1239.841_98 / 800.0).abs() < 1e-15);
        assert!((e800.ev() - 1.549_80).abs() < 5e-6, "got {}", e800.ev());
        // Round trip.
        let nm = ev_to_nm(e);
        assert!((nm - 784.0).abs() < 1e-12);
        assert!(nm_to_ev(0.0).is_err());
        assert!(nm_to_ev(-5.0).is_err());
    }

    #[test]
    fn two_photon_excitation_energy() {
        // Half the biexciton binding below the exciton: 1.581 eV with
        // E_b = 3.8 meV puts the laser at 1.5791 eV.
        let e = tpe_laser_energy(PhotonEnergy::new(1.581).unwrap(), 3.8).unwrap();
        assert!((e.ev() - 1.5791).abs() < 1e-12);
        assert!(tpe_laser_energy(PhotonEnergy::new(1.581).unwrap(), 0.0).is_err());
        assert!(tpe_laser_energy(PhotonEnergy::new(1.581).unwrap(), -3.8).is_err());
    }

    #[test]
    fn reflectance_on_identical_grids() {
        let axis = vec![1.50, 1.55, 1.60];
        let a = Spectrum::new(axis.clone(), vec![0.5, 0.2, 0.5], AxisKind::Energy, "cavity")
            .unwrap();
        let b = Spectrum::new(axis, vec![1.0, 0.8, 0.5], AxisKind::Energy, "stack").unwrap();
        let r = relative_reflectance(&a, &b).unwrap();
        assert_eq!(r.intensity(), &[0.5, 0.25, 1.0]);
        assert_eq!(r.label(), "cavity / stack");
    }

    #[test]
    fn reflectance_zero_reference_reports_index() {
        let axis = vec![1.50, 1.55, 1.60];
        let a = Spectrum::new(axis.clone(), vec![0.5, 0.2, 0.5], AxisKind::Energy, "a").unwrap();
        let b = Spectrum::new(axis, vec![1.0, 0.0, 0.5], AxisKind::Energy, "b").unwrap();
        match relative_reflectance(&a, &b) {
            Err(SpectrumError::ZeroReference { index, axis }) => {
                assert_eq!(index, 1);
                assert!((axis - 1.55).abs() < 1e-12);
            }
            other => panic!("expected ZeroReference, got {other:?}"),
        }
    }

    #[test]
    fn reflectance_resamples_mismatched_grids() {
        let a = Spectrum::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 2.0, 2.0, 2.0],
            AxisKind::Energy,
            "a",
        )
        .unwrap();
        // Reference on a shifted, coarser grid with value 4 everywhere.
        let b = Spectrum::new(vec![1.5, 3.5], vec![4.0, 4.0], AxisKind::Energy, "b").unwrap();
        let r = relative_reflectance(&a, &b).unwrap();
        assert_eq!(r.axis(), &[2.0, 3.0]);
        assert_eq!(r.intensity(), &[0.5, 0.5]);
    }

    #[test]
    fn reflectance_rejects_disjoint_ranges() {
        let a = Spectrum::new(vec![1.0, 2.0], vec![1.0, 1.0], AxisKind::Energy, "a").unwrap();
        let b = Spectrum::new(vec![5.0, 6.0], vec![1.0, 1.0], AxisKind::Energy, "b").unwrap();
        assert!(matches!(
            relative_reflectance(&a, &b),
            Err(SpectrumError::DisjointAxes)
        ));
    }

    #[test]
    fn reflectance_converts_axis_kind() {
        // Numerator in energy, reference in wavelength over the same band.
        let a = Spectrum::new(vec![1.50, 1.55], vec![1.0, 1.0], AxisKind::Energy, "a").unwrap();
        let b = Spectrum::new(
            vec![750.0, 850.0],
            vec![2.0, 2.0],
            AxisKind::Wavelength,
            "b",
        )
        .unwrap();
        let r = relative_reflectance(&a, &b).unwrap();
        assert_eq!(r.axis_kind(), AxisKind::Energy);
        for &v in r.intensity() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }
}
