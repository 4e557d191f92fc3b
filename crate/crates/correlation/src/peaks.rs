use crate::{CoincidenceHistogram, CorrelationError};

/// Measured side-peak comb: centroid positions and the mean residual
/// offset from the nominal `k * rep_period` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakLocations {
    /// Centroid delay of each detected side peak, ns, ascending.
    pub centers_ns: Vec<f64>,
    /// Nominal multiplier `k` for each center (never zero).
    pub orders: Vec<i64>,
    /// Mean residual `centroid - k * rep_period`; feed into
    /// [`g2_zero_at`](crate::g2_zero_at).
    pub offset_ns: f64,
}

/// Locates the side peaks of the coincidence comb by centroiding counts
/// within `+-rep_period/4` of each nominal position `k * rep_period`
/// (`k != 0`; the zero-delay feature is a dip, not a peak).
///
/// Fails if fewer than three side peaks fit in the histogram span, if an
/// expected peak window is empty, or if the residual spread exceeds
/// `rep_period/10` — the signature of a repetition-period mismatch above
/// about ten percent.
pub fn locate_peaks(
    hist: &CoincidenceHistogram,
) -> Result<PeakLocations, CorrelationError> {
    let rep = hist.rep_period_ns();
    let delays = hist.delays_ns();
    let (lo, hi) = (delays[0], delays[delays.len() - 1]);
    let quarter = rep / 4.0;

    let k_min = ((lo + quarter) / rep).ceil() as i64;
    let k_max = ((hi - quarter) / rep).floor() as i64;
    let orders: Vec<i64> = (k_min..=k_max).filter(|&k| k != 0).collect();
    const MIN_PEAKS: usize = 3;
    if orders.len() < MIN_PEAKS {
        return Err(CorrelationError::TooFewPeaks { n: orders.len(), min: MIN_PEAKS });
    }

    let mut centers = Vec::with_capacity(orders.len());
    let mut residuals = Vec::with_capacity(orders.len());
    for &k in &orders {
        let nominal = k as f64 * rep;
        let mut w_sum = 0.0;
        let mut wt_sum = 0.0;
        for (&t, &c) in delays.iter().zip(hist.counts()) {
            if (t - nominal).abs() <= quarter {
                w_sum += c as f64;
                wt_sum += c as f64 * t;
            }
        }
        if w_sum <= 0.0 {
            return Err(CorrelationError::MissingPeak { nominal_ns: nominal });
        }
        let centroid = wt_sum / w_sum;
        centers.push(centroid);
        residuals.push(centroid - nominal);
    }

    let offset = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let spread = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let limit = rep / 10.0;
    if spread > limit {
        return Err(CorrelationError::PeriodMismatch { spread_ns: spread, limit_ns: limit });
    }
    Ok(PeakLocations { centers_ns: centers, orders, offset_ns: offset })
}
