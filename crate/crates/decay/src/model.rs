use crate::DecayError;

/// Decay-law family fitted to a TCSPC histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModelKind {
    /// One exponential, `A exp(-(t - t0)/tau)`.
    SingleExp,
    /// Two exponentials sharing one time offset,
    /// `B exp(-(t - t0)/tau_slow) + C exp(-(t - t0)/tau_fast)`.
    BiExp,
}

impl DecayModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SingleExp => "single_exp",
            Self::BiExp => "bi_exp",
        }
    }

    /// Free parameter count including shared offset and background.
    pub fn param_count(self) -> usize {
        match self {
            Self::SingleExp => 4,
            Self::BiExp => 6,
        }
    }
}

/// A causal (bi-)exponential decay law. The model value is zero before the
/// shared offset `t0`; the constant background is *not* part of
/// [`value`](Self::value) — convolution adds it, since a constant is
/// invariant under unit-mass convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayModel {
    kind: DecayModelKind,
    /// `(amplitude, lifetime ps)` pairs; slow component first for `BiExp`.
    components: Vec<(f64, f64)>,
    t0_ps: f64,
    background: f64,
}

impl DecayModel {
    pub fn single_exp(
        amplitude: f64,
        tau_ps: f64,
        t0_ps: f64,
        background: f64,
    ) -> Result<Self, DecayError> {
        Self::build(DecayModelKind::SingleExp, vec![(amplitude, tau_ps)], t0_ps, background)
    }

    pub fn bi_exp(
        amp_slow: f64,
        tau_slow_ps: f64,
        amp_fast: f64,
        tau_fast_ps: f64,
        t0_ps: f64,
        background: f64,
    ) -> Result<Self, DecayError> {
        Self::build(
            DecayModelKind::BiExp,
            vec![(amp_slow, tau_slow_ps), (amp_fast, tau_fast_ps)],
            t0_ps,
            background,
        )
    }

    fn build(
        kind: DecayModelKind,
        components: Vec<(f64, f64)>,
        t0_ps: f64,
        background: f64,
    ) -> Result<Self, DecayError> {
        for &(a, tau) in &components {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(DecayError::NonPositiveLifetime(tau));
            }
            if !(a.is_finite() && a >= 0.0) {
                return Err(DecayError::NegativeAmplitude(a));
            }
        }
        if !t0_ps.is_finite() {
            return Err(DecayError::NonFinite { what: "t0", index: 0 });
        }
        if !(background.is_finite() && background >= 0.0) {
            return Err(DecayError::Negative { what: "background", index: 0 });
        }
        Ok(Self { kind, components, t0_ps, background })
    }

    pub fn kind(&self) -> DecayModelKind {
        self.kind
    }

    /// `(amplitude, lifetime ps)` pairs, slow component first for `BiExp`.
    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn t0_ps(&self) -> f64 {
        self.t0_ps
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn lifetimes_ps(&self) -> Vec<f64> {
        self.components.iter().map(|&(_, tau)| tau).collect()
    }

    /// Shortest component lifetime; drives the convolution oversampling
    /// decision.
    pub fn min_lifetime_ps(&self) -> f64 {
        self.components
            .iter()
            .map(|&(_, tau)| tau)
            .fold(f64::INFINITY, f64::min)
    }

    /// Background-free decay value at time `t_ps`; zero before `t0`.
    pub fn value(&self, t_ps: f64) -> f64 {
        let dt = t_ps - self.t0_ps;
        if dt < 0.0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|&(a, tau)| a * (-dt / tau).exp())
            .sum()
    }

    /// Analytic mean of the decay over the bin `[t - w/2, t + w/2]`:
    /// `(1/w) Int A exp(-(s - t0)/tau) H(s - t0) ds`, summed over
    /// components. Exact for exponentials, continuous in `t0` even when the
    /// onset falls inside the bin, and background-free like
    /// [`value`](Self::value).
    pub fn bin_mean(&self, t_center: f64, width: f64) -> f64 {
        let hi = t_center + 0.5 * width;
        if hi <= self.t0_ps {
            return 0.0;
        }
        let a = (t_center - 0.5 * width).max(self.t0_ps);
        let mut acc = 0.0;
        for &(amp, tau) in &self.components {
            acc += amp
                * tau
                * ((-(a - self.t0_ps) / tau).exp() - (-(hi - self.t0_ps) / tau).exp());
        }
        acc / width
    }

    /// Packs the fit parameter vector:
    /// single `[A, tau, t0, bg]`, bi `[B, tau_slow, C, tau_fast, t0, bg]`.
    pub fn to_params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.kind.param_count());
        for &(a, tau) in &self.components {
            p.push(a);
            p.push(tau);
        }
        p.push(self.t0_ps);
        p.push(self.background);
        p
    }

    /// Inverse of [`to_params`](Self::to_params).
    pub fn from_params(kind: DecayModelKind, p: &[f64]) -> Result<Self, DecayError> {
        match kind {
            DecayModelKind::SingleExp => {
                assert_eq!(p.len(), 4, "single_exp packs 4 parameters");
                Self::single_exp(p[0], p[1], p[2], p[3])
            }
            DecayModelKind::BiExp => {
                assert_eq!(p.len(), 6, "bi_exp packs 6 parameters");
                Self::bi_exp(p[0], p[1], p[2], p[3], p[4], p[5])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_is_causal() {
        let m = DecayModel::single_exp(100.0, 230.0, 50.0, 2.0).unwrap();
        assert_eq!(m.value(49.999), 0.0);
        assert!((m.value(50.0) - 100.0).abs() < 1e-12);
        assert!((m.value(280.0) - 100.0 * (-1.0_f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn bi_exp_sums_components() {
        let m = DecayModel::bi_exp(60.0, 230.0, 40.0, 120.0, 0.0, 0.0).unwrap();
        let t = 100.0;
        let expect = 60.0 * (-t / 230.0_f64).exp() + 40.0 * (-t / 120.0_f64).exp();
        assert!((m.value(t) - expect).abs() < 1e-12);
        assert_eq!(m.min_lifetime_ps(), 120.0);
    }

    #[test]
    fn bin_mean_matches_fine_riemann_sum() {
        let m = DecayModel::bi_exp(5.0, 90.0, 3.0, 20.0, 103.7, 0.0).unwrap();
        let width = 8.0;
        // Bins fully before, straddling, and after the onset.
        for &t in &[95.0, 100.0, 104.0, 107.9, 200.0, 400.0] {
            let n = 40_000;
            let mut sum = 0.0;
            for j in 0..n {
                let s = t - width / 2.0 + (j as f64 + 0.5) * width / n as f64;
                sum += m.value(s);
            }
            let numeric = sum / n as f64;
            let analytic = m.bin_mean(t, width);
            assert!(
                (analytic - numeric).abs() <= 1e-6 * numeric.max(1e-9),
                "t={t}: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn bin_mean_is_continuous_in_t0() {
        // Sliding the onset across a bin edge must not jump the value.
        let width = 4.0;
        let t = 100.0;
        let mut prev: Option<f64> = None;
        for k in 0..400 {
            let t0 = 96.0 + k as f64 * 0.02; // crosses the bin edge at 98
            let m = DecayModel::single_exp(10.0, 50.0, t0, 0.0).unwrap();
            let v = m.bin_mean(t, width);
            if let Some(p) = prev {
                assert!((v - p).abs() < 0.1, "jump at t0={t0}");
            }
            prev = Some(v);
        }
    }

    #[test]
    fn param_round_trip() {
        let m = DecayModel::bi_exp(3.0, 200.0, 5.0, 90.0, 12.0, 1.5).unwrap();
        let p = m.to_params();
        assert_eq!(p, vec![3.0, 200.0, 5.0, 90.0, 12.0, 1.5]);
        let back = DecayModel::from_params(DecayModelKind::BiExp, &p).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            DecayModel::single_exp(1.0, 0.0, 0.0, 0.0),
            Err(DecayError::NonPositiveLifetime(_))
        ));
        assert!(matches!(
            DecayModel::single_exp(-1.0, 10.0, 0.0, 0.0),
            Err(DecayError::NegativeAmplitude(_))
        ));
    }
}
