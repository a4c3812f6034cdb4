use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the ion-trap-cavity Hamiltonian, angular frequencies in rad/s.
///
/// `kappa` is the cavity energy decay rate in 1/s (decay time `1/kappa`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub omega0: f64,
    pub omega_c: f64,
    pub omega_l: f64,
    pub nu: f64,
    pub g: f64,
    pub g_cap: f64,
    pub eta_c: f64,
    pub eta_l: f64,
    pub phi: f64,
    pub kappa: f64,
}

impl Default for PhysicalParams {
    /// `g = 2 pi 30 MHz`, `G = 2 pi 0.5 MHz`, `eta = 0.2`, `phi = pi/4`, no
    /// decay. Bare frequencies are left at zero; only the lab-frame
    /// integrator reads them.
    fn default() -> Self {
        Self {
            omega0: 0.0,
            omega_c: 0.0,
            omega_l: 0.0,
            nu: 0.0,
            g: 2.0 * PI * 3e7,
            g_cap: 2.0 * PI * 5e5,
            eta_c: 0.2,
            eta_l: 0.2,
            phi: FRAC_PI_4,
            kappa: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega0", self.omega0),
            ("omega_c", self.omega_c),
            ("omega_l", self.omega_l),
            ("nu", self.nu),
            ("g", self.g),
            ("g_cap", self.g_cap),
            ("eta_c", self.eta_c),
            ("eta_l", self.eta_l),
            ("phi", self.phi),
            ("kappa", self.kappa),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(Error::Domain { field, reason: format!("{v} is not finite") });
            }
        }
        for (field, v) in [("g", self.g), ("g_cap", self.g_cap), ("nu", self.nu), ("kappa", self.kappa)] {
            if v < 0.0 {
                return Err(Error::Domain { field, reason: format!("{v} must be >= 0") });
            }
        }
        for (field, v) in [("eta_c", self.eta_c), ("eta_l", self.eta_l)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Domain { field, reason: format!("{v} must lie in [0, 1)") });
            }
        }
        Ok(())
    }

    /// Same parameters with both couplings multiplied by `factor`.
    pub fn with_couplings_scaled(&self, factor: f64) -> Self {
        Self { g: self.g * factor, g_cap: self.g_cap * factor, ..*self }
    }
}

/// Hz to rad/s.
pub fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// rad/s to Hz.
pub fn rad_to_hz(rad: f64) -> f64 {
    rad / (2.0 * PI)
}
