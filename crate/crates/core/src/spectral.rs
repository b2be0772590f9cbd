//! Ohmic-class reservoir spectra and the thermal occupation factor.
//!
//! All frequencies are measured in units of the qubit transition frequency,
//! so `omega = 1.0` is resonance. The spectral density family is
//!
//! ```text
//! J(ω) = α² ω_c^{1-s} ω^s exp(-ω / ω_c)
//! ```
//!
//! with `s < 1` sub-Ohmic, `s = 1` Ohmic and `s > 1` super-Ohmic.

use std::fmt;

use crate::error::{Error, Result};

/// Shape of an Ohmic-class spectral density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    coupling_sq: f64,
    cutoff: f64,
    exponent: f64,
}

impl SpectralParams {
    pub fn new(coupling_sq: f64, cutoff: f64, exponent: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("coupling_sq", coupling_sq)?;
        positive("cutoff", cutoff)?;
        positive("exponent", exponent)?;
        Ok(Self {
            coupling_sq,
            cutoff,
            exponent,
        })
    }

    /// `s = 1/2`.
    pub fn sub_ohmic(coupling_sq: f64, cutoff: f64) -> Result<Self> {
        Self::new(coupling_sq, cutoff, 0.5)
    }

    /// `s = 1`.
    pub fn ohmic(coupling_sq: f64, cutoff: f64) -> Result<Self> {
        Self::new(coupling_sq, cutoff, 1.0)
    }

    /// `s = 3`.
    pub fn super_ohmic(coupling_sq: f64, cutoff: f64) -> Result<Self> {
        Self::new(coupling_sq, cutoff, 3.0)
    }

    pub fn coupling_sq(&self) -> f64 {
        self.coupling_sq
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// The ω-independent prefactor `α² ω_c^{1-s}`.
    pub(crate) fn prefactor(&self) -> f64 {
        self.coupling_sq * self.cutoff.powf(1.0 - self.exponent)
    }

    /// Evaluates `J(ω)` without the domain check.
    pub(crate) fn density_unchecked(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        self.prefactor() * omega.powf(self.exponent) * (-omega / self.cutoff).exp()
    }

    /// Human-readable class: sub-Ohmic, Ohmic or super-Ohmic.
    pub fn class_name(&self) -> &'static str {
        if self.exponent < 1.0 {
            "sub-ohmic"
        } else if self.exponent == 1.0 {
            "ohmic"
        } else {
            "super-ohmic"
        }
    }
}

/// Which limit of `1 + 2N(ω)` is used for the thermal reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureRegime {
    /// `1 + 2N(ω) = 1`.
    ZeroT,
    /// `1 + 2N(ω) = 2 kT / ω`, with `kT` in units of the transition energy.
    HighT { kt: f64 },
}

impl TemperatureRegime {
    pub fn high(kt: f64) -> Result<Self> {
        if kt.is_finite() && kt > 0.0 {
            Ok(Self::HighT { kt })
        } else {
            Err(Error::Domain(format!("kT must be finite and > 0, got {kt}")))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::ZeroT)
    }
}

impl fmt::Display for TemperatureRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroT => write!(f, "T=0"),
            Self::HighT { kt } => write!(f, "kT={kt}"),
        }
    }
}

/// Spectral density `J(ω)`; zero at `ω = 0`.
pub fn spectral_density(omega: f64, params: &SpectralParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega >= 0, got {omega}")));
    }
    Ok(params.density_unchecked(omega))
}

/// `1 + 2N(ω)` in the selected temperature limit.
pub fn thermal_factor(omega: f64, regime: TemperatureRegime) -> Result<f64> {
    match regime {
        TemperatureRegime::ZeroT => Ok(1.0),
        TemperatureRegime::HighT { kt } => {
            if !(kt > 0.0) {
                return Err(Error::Domain(format!("kT must be > 0, got {kt}")));
            }
            if !(omega > 0.0) {
                return Err(Error::Domain(format!(
                    "high-temperature factor diverges at omega = {omega}"
                )));
            }
            Ok(2.0 * kt / omega)
        }
    }
}
