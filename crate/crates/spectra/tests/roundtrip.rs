use cbr_spectra::{load_spectrum, save_spectrum, AxisKind, Spectrum};

#[test]
fn save_load_round_trip_preserves_samples_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let original = Spectrum::new(
        vec![779.25, 780.0, 781.5, 784.0],
        vec![0.0, 1.25e3, 7.5, 0.125],
        AxisKind::Wavelength,
        "resonator d1, cooldown 2",
    )
    .unwrap();
    save_spectrum(&path, &original).unwrap();
    let loaded = load_spectrum(&path).unwrap();
    assert_eq!(loaded, original);

    // Saving again must produce byte-identical files (reports are diffed).
    let path2 = dir.path().join("spectrum2.csv");
    save_spectrum(&path2, &loaded).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&path2).unwrap()
    );
}
