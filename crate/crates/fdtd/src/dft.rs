//! Running discrete Fourier transforms recorded during time stepping.
//!
//! Monitors accumulate `sum f(t_n) exp(-i w t_n) dt` at a decimated cadence;
//! the magnetic field, which leapfrogs the electric field by half a step, is
//! accumulated with its phase referenced to `t_n - dt/2` so that fluxes formed
//! from the two spectra are time-centred.  The Poynting flux through a line is
//!
//! ```text
//!   horizontal (along +y):  S = 1/2 Re(Ez conj(Hx)) dx   summed over the line
//!   vertical   (along +x):  S = -1/2 Re(Ez conj(Hy)) dy
//! ```

/// Minimal complex value; spectra are long flat arrays of these.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

impl C64 {
    pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> C64 {
        C64 { re, im }
    }

    /// exp(-i phi) as a phasor.
    pub fn phasor(phi: f64) -> C64 {
        C64 {
            re: phi.cos(),
            im: -phi.sin(),
        }
    }

    pub fn conj(self) -> C64 {
        C64 {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, s: f64) -> C64 {
        C64 {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn mul(self, o: C64) -> C64 {
        C64 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    pub fn add(self, o: C64) -> C64 {
        C64 {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    pub fn sub(self, o: C64) -> C64 {
        C64 {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    pub fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.abs2().sqrt()
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }
}

/// Orientation of a line monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrientation {
    /// Fixed row, spanning columns; positive flux points along +y.
    Horizontal,
    /// Fixed column, spanning rows; positive flux points along +x.
    Vertical,
}

/// A line of cells recording Ez and the tangential H spectra.
pub struct LineMonitor {
    pub orientation: LineOrientation,
    /// Row index (horizontal) or column index (vertical).
    pub fixed: usize,
    /// First cell index along the line.
    pub a0: usize,
    /// Number of cells along the line.
    pub len: usize,
    /// Ez spectra, `freq * len + cell`.
    pub ez: Vec<C64>,
    /// Tangential H (interpolated to the Ez points), same layout.
    pub ht: Vec<C64>,
}

impl LineMonitor {
    pub fn new(orientation: LineOrientation, fixed: usize, a0: usize, a1: usize, n_freq: usize) -> LineMonitor {
        assert!(a1 >= a0, "monitor range is empty");
        let len = a1 - a0 + 1;
        LineMonitor {
            orientation,
            fixed,
            a0,
            len,
            ez: vec![C64::ZERO; n_freq * len],
            ht: vec![C64::ZERO; n_freq * len],
        }
    }

    /// Directed power through the line at each frequency (+y for horizontal
    /// lines, +x for vertical ones).
    pub fn flux(&self, dx: f64) -> Vec<f64> {
        let n_freq = self.ez.len() / self.len;
        let mut out = Vec::with_capacity(n_freq);
        let sign = match self.orientation {
            LineOrientation::Horizontal => 1.0,
            LineOrientation::Vertical => -1.0,
        };
        for f in 0..n_freq {
            let mut s = 0.0;
            for c in 0..self.len {
                let e = self.ez[f * self.len + c];
                let h = self.ht[f * self.len + c];
                s += e.mul(h.conj()).re;
            }
            out.push(0.5 * sign * s * dx);
        }
        out
    }

    /// Ez spectrum along the line at one frequency index.
    pub fn ez_row(&self, f: usize) -> &[C64] {
        &self.ez[f * self.len..(f + 1) * self.len]
    }
}

/// A single-cell probe recording the Ez spectrum.
pub struct PointProbe {
    pub i: usize,
    pub j: usize,
    pub ez: Vec<C64>,
}

/// A single-cell probe recording the Ez time series every step.
pub struct TimeProbe {
    pub i: usize,
    pub j: usize,
    pub series: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phasor_accumulation_recovers_amplitude() {
        // DFT of cos(w t) over many periods: |acc| -> A T / 2
        let omega = 0.01;
        let dt = 0.5;
        let steps = 200_000;
        let mut acc = C64::ZERO;
        for n in 0..steps {
            let t = n as f64 * dt;
            let f = 3.0 * (omega * t).cos();
            acc = acc.add(C64::phasor(omega * t).scale(f * dt));
        }
        let total_t = steps as f64 * dt;
        let expect = 3.0 * total_t / 2.0;
        assert!(
            (acc.abs() - expect).abs() / expect < 1e-3,
            "got {}, expected {}",
            acc.abs(),
            expect
        );
    }

    #[test]
    fn flux_sign_follows_propagation_direction() {
        // Upward plane wave: Hx = +Ez  ->  positive flux through horizontal line.
        let mut m = LineMonitor::new(LineOrientation::Horizontal, 5, 0, 9, 1);
        for c in 0..10 {
            m.ez[c] = C64::new(1.0, 0.3);
            m.ht[c] = m.ez[c];
        }
        let f = m.flux(2.0);
        assert!(f[0] > 0.0);
        // 1/2 * |E|^2 * len * dx
        let expect = 0.5 * (1.0 + 0.09) * 10.0 * 2.0;
        assert!((f[0] - expect).abs() < 1e-12);
    }
}
