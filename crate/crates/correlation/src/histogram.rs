use crate::CorrelationError;

/// Default pulsed-excitation repetition period (80 MHz), ns.
pub(crate) const DEFAULT_REP_PERIOD_NS: f64 = 12.5;

/// Uniformly binned coincidence-delay histogram (delays in ns).
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    delays: Vec<f64>,
    counts: Vec<u64>,
    bin_width: f64,
    rep_period: f64,
}

impl CoincidenceHistogram {
    /// Builds a histogram with the default 12.5 ns repetition period.
    pub fn new(delays_ns: Vec<f64>, counts: Vec<u64>) -> Result<Self, CorrelationError> {
        Self::with_rep_period(delays_ns, counts, DEFAULT_REP_PERIOD_NS)
    }

    pub fn with_rep_period(
        delays_ns: Vec<f64>,
        counts: Vec<u64>,
        rep_period_ns: f64,
    ) -> Result<Self, CorrelationError> {
        if !(rep_period_ns.is_finite() && rep_period_ns > 0.0) {
            return Err(CorrelationError::NonPositiveRepPeriod(rep_period_ns));
        }
        if delays_ns.len() != counts.len() || delays_ns.len() < 2 {
            return Err(CorrelationError::TooShort {
                n: delays_ns.len().min(counts.len()),
                min: 2,
            });
        }
        for (i, &t) in delays_ns.iter().enumerate() {
            if !t.is_finite() {
                return Err(CorrelationError::NonFinite { what: "delay", index: i });
            }
        }
        let width = delays_ns[1] - delays_ns[0];
        if width <= 0.0 {
            return Err(CorrelationError::NonUniformBins { index: 1 });
        }
        for i in 2..delays_ns.len() {
            let d = delays_ns[i] - delays_ns[i - 1];
            if (d - width).abs() > 1e-6 * width {
                return Err(CorrelationError::NonUniformBins { index: i });
            }
        }
        Ok(Self { delays: delays_ns, counts, bin_width: width, rep_period: rep_period_ns })
    }

    pub fn delays_ns(&self) -> &[f64] {
        &self.delays
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width_ns(&self) -> f64 {
        self.bin_width
    }

    pub fn rep_period_ns(&self) -> f64 {
        self.rep_period
    }

    /// Sum of counts in bins whose centers fall within
    /// `center +- half_width` (bin-center rule).
    pub fn window_counts(&self, center_ns: f64, half_width_ns: f64) -> (u64, usize) {
        let eps = 1e-9 * self.bin_width;
        let mut total = 0u64;
        let mut bins = 0usize;
        for (&t, &c) in self.delays.iter().zip(&self.counts) {
            if (t - center_ns).abs() <= half_width_ns + eps {
                total += c;
                bins += 1;
            }
        }
        (total, bins)
    }
}
