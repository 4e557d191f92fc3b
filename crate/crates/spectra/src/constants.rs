/// Physical constants (CODATA 2018) used throughout the workspace.
///
/// Kept in one struct so unit-sensitive code paths all draw from the same
/// values instead of scattering literals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Planck constant times speed of light, eV * nm.
    pub hc_ev_nm: f64,
    /// Reduced Planck constant, eV * s.
    pub hbar_ev_s: f64,
    /// Vacuum speed of light, m / s.
    pub c_m_per_s: f64,
}

/// Workspace-wide constants instance.
pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hc_ev_nm: 1239.841_98,
    hbar_ev_s: 6.582_119_569e-16,
    c_m_per_s: 299_792_458.0,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CONSTANTS
    }
}

impl PhysicalConstants {
    /// Reduced Planck constant in eV * ps (convenient for lifetimes and
    /// interferometer delays quoted in picoseconds).
    pub fn hbar_ev_ps(&self) -> f64 {
        self.hbar_ev_s * 1e12
    }

    /// Vacuum speed of light in nm / ps.
    pub fn c_nm_per_ps(&self) -> f64 {
        self.c_m_per_s * 1e-3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_units_are_consistent() {
        // 299792458 m/s = 299792.458 nm/ps
        assert!((CONSTANTS.c_nm_per_ps() - 299_792.458).abs() < 1e-9);
        assert!((CONSTANTS.hbar_ev_ps() - 6.582_119_569e-4).abs() < 1e-19);
    }
}
