use crate::{ops, SpectrumError};

/// A photon energy in eV. Guaranteed positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhotonEnergy(f64);

impl PhotonEnergy {
    pub fn new(ev: f64) -> Result<Self, SpectrumError> {
        if !ev.is_finite() || ev <= 0.0 {
            return Err(SpectrumError::InvalidEnergy(ev));
        }
        Ok(Self(ev))
    }

    /// The energy value in eV.
    pub fn ev(self) -> f64 {
        self.0
    }

    /// The energy value in meV.
    pub fn mev(self) -> f64 {
        self.0 * 1e3
    }
}

/// Which physical quantity a spectrum's sample axis carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Wavelength in nm.
    Wavelength,
    /// Photon energy in eV.
    Energy,
}

impl AxisKind {
    /// The key used in CSV headers (`# axis=...`).
    pub fn header_key(self) -> &'static str {
        match self {
            AxisKind::Wavelength => "wavelength_nm",
            AxisKind::Energy => "energy_ev",
        }
    }
}

/// A sampled optical spectrum: strictly ascending axis, non-negative finite
/// intensities, and a label carried through to reports and plots.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    axis: Vec<f64>,
    intensity: Vec<f64>,
    axis_kind: AxisKind,
    label: String,
}

impl Spectrum {
    /// Builds a spectrum, validating the axis ordering and the intensities.
    pub fn new(
        axis: Vec<f64>,
        intensity: Vec<f64>,
        axis_kind: AxisKind,
        label: impl Into<String>,
    ) -> Result<Self, SpectrumError> {
        if axis.len() != intensity.len() {
            return Err(SpectrumError::LengthMismatch {
                axis: axis.len(),
                intensity: intensity.len(),
            });
        }
        if axis.len() < 2 {
            return Err(SpectrumError::TooShort(axis.len()));
        }
        for (i, &x) in axis.iter().enumerate() {
            if !x.is_finite() {
                return Err(SpectrumError::NonFinite { what: "axis", index: i });
            }
            if i > 0 && x <= axis[i - 1] {
                return Err(SpectrumError::NonMonotoneAxis { index: i });
            }
        }
        for (i, &y) in intensity.iter().enumerate() {
            if !y.is_finite() {
                return Err(SpectrumError::NonFinite { what: "intensity", index: i });
            }
            if y < 0.0 {
                return Err(SpectrumError::NegativeIntensity { index: i, value: y });
            }
        }
        Ok(Self { axis, intensity, axis_kind: axis_kind, label: label.into() })
    }

    /// Builds a spectrum from possibly descending samples, sorting the
    /// (axis, intensity) pairs into ascending order first. Instrument files
    /// recorded against wavelength often come out descending in energy.
    pub fn from_unsorted(
        axis: Vec<f64>,
        intensity: Vec<f64>,
        axis_kind: AxisKind,
        label: impl Into<String>,
    ) -> Result<Self, SpectrumError> {
        if axis.len() != intensity.len() {
            return Err(SpectrumError::LengthMismatch {
                axis: axis.len(),
                intensity: intensity.len(),
            });
        }
        for (i, &x) in axis.iter().enumerate() {
            if !x.is_finite() {
                return Err(SpectrumError::NonFinite { what: "axis", index: i });
            }
        }
        let mut pairs: Vec<(f64, f64)> = axis.into_iter().zip(intensity).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("axis checked finite"));
        let (axis, intensity): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        Self::new(axis, intensity, axis_kind, label)
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn axis_kind(&self) -> AxisKind {
        self.axis_kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Linear interpolation of the intensity at `x`; `None` outside the axis.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let axis = &self.axis;
        if x < axis[0] || x > axis[axis.len() - 1] {
            return None;
        }
        let hi = axis.partition_point(|&a| a < x);
        if hi == 0 {
            return Some(self.intensity[0]);
        }
        let lo = hi - 1;
        if hi == axis.len() {
            return Some(self.intensity[lo]);
        }
        let t = (x - axis[lo]) / (axis[hi] - axis[lo]);
        Some(self.intensity[lo] + t * (self.intensity[hi] - self.intensity[lo]))
    }

    /// Converts the sample axis to `kind` (no-op when it already matches).
    /// Wavelength <-> energy conversion reverses the sample order, so the
    /// result is re-sorted ascending with pairing preserved.
    pub fn to_axis_kind(&self, kind: AxisKind) -> Result<Spectrum, SpectrumError> {
        if kind == self.axis_kind {
            return Ok(self.clone());
        }
        let mut converted = Vec::with_capacity(self.axis.len());
        for &x in &self.axis {
            let y = match kind {
                AxisKind::Energy => ops::nm_to_ev(x)?.ev(),
                AxisKind::Wavelength => ops::ev_to_nm(PhotonEnergy::new(x)?),
            };
            converted.push(y);
        }
        Spectrum::from_unsorted(converted, self.intensity.clone(), kind, self.label.clone())
    }
}
