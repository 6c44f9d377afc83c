//! Physical constants (CODATA 2018) and the unit conversions used at the
//! CLI boundary. Everything internal is SI: rad/s, meters, joules, siemens.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;

/// Planck constant (J·s), exact since the 2019 SI redefinition.
pub const H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant (J·s), h/2π.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Elementary charge (C), exact.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Graphene Fermi velocity, adopted convention v_F = c/300.
pub const V_FERMI: f64 = C / 300.0;

/// Angular frequency in rad/s, guaranteed positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    omega: f64,
}

impl Frequency {
    pub fn from_omega(omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInput(format!(
                "angular frequency must be positive and finite, got {omega}"
            )));
        }
        Ok(Frequency { omega })
    }

    pub fn from_thz(f_thz: f64) -> Result<Self> {
        Frequency::from_omega(thz_to_omega(f_thz)?)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn thz(&self) -> f64 {
        omega_to_thz(self.omega)
    }

    /// Free-space wavelength c/f (m).
    pub fn vacuum_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * C / self.omega
    }
}

/// Convert a frequency in THz to angular frequency in rad/s.
pub fn thz_to_omega(f_thz: f64) -> Result<f64> {
    if !(f_thz > 0.0) || !f_thz.is_finite() {
        return Err(Error::InvalidInput(format!(
            "frequency must be positive and finite, got {f_thz} THz"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * f_thz * 1e12)
}

/// Inverse of [`thz_to_omega`].
pub fn omega_to_thz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI * 1e12)
}

/// Convert an energy in eV to joules.
pub fn ev_to_joule(ev: f64) -> f64 {
    ev * E_CHARGE
}

/// Convert picoseconds to seconds.
pub fn ps_to_seconds(ps: f64) -> f64 {
    ps * 1e-12
}

/// Convert micrometers to meters.
pub fn um_to_meters(um: f64) -> f64 {
    um * 1e-6
}
