use serde::Serialize;

use crate::{CoincidenceHistogram, CorrelationError};

/// Default integration window around each comb position, ns.
pub const DEFAULT_WINDOW_NS: f64 = 2.0;

/// Zero-delay autocorrelation from nearest-side-peak normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Result {
    pub g2_0: f64,
    /// Poisson counting uncertainty on `g2_0`.
    pub uncertainty: f64,
    pub window_ns: f64,
    pub rep_period_ns: f64,
    pub central_counts: u64,
    /// Counts in the windows at `-rep_period` and `+rep_period`.
    pub side_counts: (u64, u64),
}

impl G2Result {
    pub fn report(&self) -> G2Report {
        G2Report {
            g2_0: self.g2_0,
            err: self.uncertainty,
            window_ns: self.window_ns,
            rep_period_ns: self.rep_period_ns,
        }
    }
}

/// JSON-serializable g2(0) record.
#[derive(Debug, Clone, Serialize)]
pub struct G2Report {
    pub g2_0: f64,
    pub err: f64,
    pub window_ns: f64,
    pub rep_period_ns: f64,
}

/// `g2(0)` with windows centered on the nominal comb (offset zero).
pub fn g2_zero(
    hist: &CoincidenceHistogram,
    window_ns: f64,
) -> Result<G2Result, CorrelationError> {
    g2_zero_at(hist, window_ns, 0.0)
}

/// `g2(0)` with all three windows shifted by a measured comb offset
/// (see [`locate_peaks`](crate::locate_peaks)).
///
/// `g2_0 = N(|t - c| < w/2) / mean(N(|t - c -+ T| < w/2))` using only the
/// two nearest side peaks; bins count toward a window when their centers
/// fall inside it. The uncertainty propagates `sqrt(N)` on the central and
/// side sums: `sigma = g2 sqrt(1/max(Nc, 1) + 1/(N- + N+))`, with the
/// central count floored at one so an empty dip still carries an error
/// bar.
pub fn g2_zero_at(
    hist: &CoincidenceHistogram,
    window_ns: f64,
    offset_ns: f64,
) -> Result<G2Result, CorrelationError> {
    let rep = hist.rep_period_ns();
    if !(window_ns.is_finite() && window_ns > 0.0 && window_ns < rep) {
        return Err(CorrelationError::BadWindow { window: window_ns, rep });
    }
    let delays = hist.delays_ns();
    let (lo, hi) = (delays[0], delays[delays.len() - 1]);
    let need = 1.5 * rep;
    if lo > -need || hi < need {
        return Err(CorrelationError::SpanTooShort { span: hi - lo, need });
    }

    let half = window_ns / 2.0;
    let (center, _) = hist.window_counts(offset_ns, half);
    let (minus, minus_bins) = hist.window_counts(offset_ns - rep, half);
    let (plus, plus_bins) = hist.window_counts(offset_ns + rep, half);
    if minus_bins == 0 {
        return Err(CorrelationError::EmptySideWindow { side: "negative-delay" });
    }
    if plus_bins == 0 {
        return Err(CorrelationError::EmptySideWindow { side: "positive-delay" });
    }
    let side_sum = minus + plus;
    if side_sum == 0 {
        return Err(CorrelationError::ZeroSideCounts);
    }

    let g2 = 2.0 * center as f64 / side_sum as f64;
    // Floor the central count at one so a zero-count dip still reports a
    // finite error bar; for center > 0 the prefactor reduces to g2 itself.
    let nc = (center as f64).max(1.0);
    let sigma =
        (2.0 * nc / side_sum as f64) * (1.0 / nc + 1.0 / side_sum as f64).sqrt();
    Ok(G2Result {
        g2_0: g2,
        uncertainty: sigma,
        window_ns,
        rep_period_ns: rep,
        central_counts: center,
        side_counts: (minus, plus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Comb histogram: `sides` counts spread across each side-peak window,
    /// `center` across the central window, zero elsewhere.
    fn comb(center: u64, sides: u64) -> CoincidenceHistogram {
        let bw = 0.5;
        let n = 201; // +-50 ns
        let delays: Vec<f64> = (0..n).map(|i| (i as f64 - 100.0) * bw).collect();
        let mut counts = vec![0u64; n];
        for (i, &t) in delays.iter().enumerate() {
            for k in -3i64..=3 {
                let c = k as f64 * 12.5;
                if (t - c).abs() <= 1.0 {
                    // 5 bins per window (bin-center rule, +-1 ns, 0.5 ns bins)
                    let total = if k == 0 { center } else { sides };
                    counts[i] = total / 5;
                }
            }
        }
        CoincidenceHistogram::new(delays, counts).unwrap()
    }

    #[test]
    fn empty_center_gives_zero() {
        let h = comb(0, 10_000);
        let r = g2_zero(&h, 2.0).unwrap();
        assert_eq!(r.g2_0, 0.0);
        assert!(r.uncertainty > 0.0, "zero-count dip still has an error bar");
        assert_eq!(r.central_counts, 0);
        assert_eq!(r.side_counts, (10_000, 10_000));
    }

    #[test]
    fn flat_comb_gives_unity() {
        let h = comb(10_000, 10_000);
        let r = g2_zero(&h, 2.0).unwrap();
        assert_eq!(r.g2_0, 1.0);
    }

    #[test]
    fn antibunched_comb_matches_hand_propagation() {
        let h = comb(300, 10_000);
        let r = g2_zero(&h, 2.0).unwrap();
        assert!((r.g2_0 - 0.030).abs() < 1e-12);
        let expect = 0.030 * (1.0 / 300.0_f64 + 1.0 / 20_000.0).sqrt();
        assert!((r.uncertainty - expect).abs() < 1e-12);
        assert!((r.uncertainty - 0.002).abs() <= 3e-4, "sigma {}", r.uncertainty);
    }

    #[test]
    fn scaling_counts_leaves_g2_unchanged() {
        let a = comb(300, 10_000);
        let scaled: Vec<u64> = a.counts().iter().map(|&c| c * 7).collect();
        let b = CoincidenceHistogram::new(a.delays_ns().to_vec(), scaled).unwrap();
        let ra = g2_zero(&a, 2.0).unwrap();
        let rb = g2_zero(&b, 2.0).unwrap();
        assert_eq!(ra.g2_0, rb.g2_0);
    }

    #[test]
    fn window_must_fit_inside_period() {
        let h = comb(300, 10_000);
        assert!(matches!(
            g2_zero(&h, 12.5),
            Err(CorrelationError::BadWindow { .. })
        ));
        assert!(matches!(
            g2_zero(&h, -1.0),
            Err(CorrelationError::BadWindow { .. })
        ));
    }

    #[test]
    fn short_span_is_rejected() {
        let delays: Vec<f64> = (0..41).map(|i| (i as f64 - 20.0) * 0.5).collect();
        let h = CoincidenceHistogram::new(delays, vec![1; 41]).unwrap();
        assert!(matches!(
            g2_zero(&h, 2.0),
            Err(CorrelationError::SpanTooShort { .. })
        ));
    }

    #[test]
    fn zero_side_counts_is_an_error() {
        let h = comb(300, 0);
        assert!(matches!(
            g2_zero(&h, 2.0),
            Err(CorrelationError::ZeroSideCounts)
        ));
    }

    #[test]
    fn report_has_flat_keys() {
        let h = comb(300, 10_000);
        let r = g2_zero(&h, 2.0).unwrap();
        let json = serde_json::to_value(r.report()).unwrap();
        for key in ["g2_0", "err", "window_ns", "rep_period_ns"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
