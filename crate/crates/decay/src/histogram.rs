use crate::DecayError;

/// Relative tolerance for bin-uniformity and bin-width comparisons.
pub(crate) const BIN_TOL: f64 = 1e-6;

/// Uniformly binned TCSPC arrival-time histogram (times in ps).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayHistogram {
    bin_centers: Vec<f64>,
    counts: Vec<u64>,
    bin_width: f64,
}

/// Checks a time axis for uniform, strictly increasing spacing and returns
/// the bin width.
pub(crate) fn uniform_bin_width(centers: &[f64]) -> Result<f64, DecayError> {
    if centers.len() < 2 {
        return Err(DecayError::TooShort { n: centers.len(), min: 2 });
    }
    for (i, &t) in centers.iter().enumerate() {
        if !t.is_finite() {
            return Err(DecayError::NonFinite { what: "bin center", index: i });
        }
    }
    let width = centers[1] - centers[0];
    if width <= 0.0 {
        return Err(DecayError::NonUniformBins { index: 1 });
    }
    for i in 2..centers.len() {
        let d = centers[i] - centers[i - 1];
        if (d - width).abs() > BIN_TOL * width {
            return Err(DecayError::NonUniformBins { index: i });
        }
    }
    Ok(width)
}

impl DecayHistogram {
    pub fn new(bin_centers: Vec<f64>, counts: Vec<u64>) -> Result<Self, DecayError> {
        if bin_centers.len() != counts.len() {
            return Err(DecayError::TooShort {
                n: bin_centers.len().min(counts.len()),
                min: bin_centers.len().max(counts.len()),
            });
        }
        let bin_width = uniform_bin_width(&bin_centers)?;
        Ok(Self { bin_centers, counts, bin_width })
    }

    pub fn bin_centers(&self) -> &[f64] {
        &self.bin_centers
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width_ps(&self) -> f64 {
        self.bin_width
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Index of the maximum-count bin (first one on ties).
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }
}

/// Instrument response function as unit-mass weights on a uniform lag grid.
///
/// Lags are measured from the peak bin: `lag[k] = center[k] - center[argmax]`.
/// This pins the convolution so that a delta-like IRF reproduces the model
/// unchanged and a shared translation of histogram and IRF only moves the
/// fitted time offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Irf {
    lags: Vec<f64>,
    weights: Vec<f64>,
    bin_width: f64,
}

impl Irf {
    /// Builds an IRF from a measured count histogram, normalizing the
    /// weights to unit total mass.
    pub fn from_histogram(hist: &DecayHistogram) -> Result<Self, DecayError> {
        let values = hist.counts_f64();
        Self::from_raw(hist.bin_centers(), &values)
    }

    /// Builds an IRF from raw non-negative sample values on a uniform axis.
    pub fn from_raw(centers: &[f64], values: &[f64]) -> Result<Self, DecayError> {
        if centers.len() != values.len() {
            return Err(DecayError::TooShort {
                n: centers.len().min(values.len()),
                min: centers.len().max(values.len()),
            });
        }
        let bin_width = uniform_bin_width(centers)?;
        let mut total = 0.0;
        let mut peak = 0;
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(DecayError::NonFinite { what: "IRF value", index: i });
            }
            if v < 0.0 {
                return Err(DecayError::Negative { what: "IRF value", index: i });
            }
            total += v;
            if v > values[peak] {
                peak = i;
            }
        }
        if total <= 0.0 {
            return Err(DecayError::ZeroAreaIrf);
        }
        let t_peak = centers[peak];
        let lags = centers.iter().map(|&t| t - t_peak).collect();
        let weights = values.iter().map(|&v| v / total).collect();
        Ok(Self { lags, weights, bin_width })
    }

    /// A single-bin identity IRF for the given bin width.
    pub fn delta(bin_width: f64) -> Result<Self, DecayError> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(DecayError::NonPositiveValue { name: "bin_width", value: bin_width });
        }
        Ok(Self { lags: vec![0.0], weights: vec![1.0], bin_width })
    }

    pub fn lags_ps(&self) -> &[f64] {
        &self.lags
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bin_width_ps(&self) -> f64 {
        self.bin_width
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn rejects_non_uniform_axis() {
        let mut t = axis(10, 4.0);
        t[7] += 0.5;
        let err = DecayHistogram::new(t, vec![0; 10]).unwrap_err();
        match err {
            DecayError::NonUniformBins { index } => assert_eq!(index, 7),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bin_width_comes_from_spacing() {
        let h = DecayHistogram::new(axis(16, 8.0), vec![1; 16]).unwrap();
        assert_eq!(h.bin_width_ps(), 8.0);
        assert_eq!(h.total_counts(), 16);
    }

    #[test]
    fn irf_weights_are_unit_mass_with_zero_peak_lag() {
        let t = axis(11, 4.0);
        let v: Vec<f64> = (0..11)
            .map(|i| (-((i as f64 - 6.0) / 2.0).powi(2)).exp())
            .collect();
        let irf = Irf::from_raw(&t, &v).unwrap();
        let total: f64 = irf.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Peak bin (index 6) sits at lag zero.
        assert_eq!(irf.lags_ps()[6], 0.0);
        assert_eq!(irf.bin_width_ps(), 4.0);
    }

    #[test]
    fn zero_irf_is_rejected() {
        let t = axis(5, 1.0);
        assert!(matches!(
            Irf::from_raw(&t, &[0.0; 5]),
            Err(DecayError::ZeroAreaIrf)
        ));
    }

    #[test]
    fn peak_index_finds_maximum() {
        let h = DecayHistogram::new(axis(6, 1.0), vec![1, 5, 9, 4, 9, 2]).unwrap();
        assert_eq!(h.peak_index(), 2);
    }
}
