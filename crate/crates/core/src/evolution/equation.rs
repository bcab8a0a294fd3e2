use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::fractional_power;

/// Which member of the family is being solved.
///
/// | family   | equation                                   |
/// |----------|--------------------------------------------|
/// | `Kdv`    | `u_t + u_xxx = 3(u²)_x`                    |
/// | `KdvB`   | `u_t + u_xxx + ε|∂_x|^{2α}u = 2(u²)_x`     |
/// | `Mkdv`   | `u_t + u_xxx = 6u²u_x = 2(u³)_x`           |
/// | `MkdvB`  | `u_t + u_xxx + ε|∂_x|^{2α}u = 2(u³)_x`     |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Kdv,
    KdvB,
    Mkdv,
    MkdvB,
}

impl Family {
    pub fn is_dissipative(self) -> bool {
        matches!(self, Family::KdvB | Family::MkdvB)
    }

    pub fn is_cubic(self) -> bool {
        matches!(self, Family::Mkdv | Family::MkdvB)
    }

    /// Power `p` in the flux `c·(u^p)_x`.
    pub fn power(self) -> u32 {
        if self.is_cubic() {
            3
        } else {
            2
        }
    }

    /// Coefficient `c` in the flux `c·(u^p)_x`.
    pub fn flux_coefficient(self) -> f64 {
        match self {
            Family::Kdv => 3.0,
            Family::KdvB | Family::Mkdv | Family::MkdvB => 2.0,
        }
    }

    /// Fraction of the half-spectrum kept before forming products: exact
    /// removal of aliasing for quadratic (2/3) and cubic (1/2) fluxes.
    pub fn default_dealias_fraction(self) -> f64 {
        if self.is_cubic() {
            0.5
        } else {
            2.0 / 3.0
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Kdv => "kdv",
            Family::KdvB => "kdv-b",
            Family::Mkdv => "mkdv",
            Family::MkdvB => "mkdv-b",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "kdv" => Ok(Family::Kdv),
            "kdv-b" => Ok(Family::KdvB),
            "mkdv" => Ok(Family::Mkdv),
            "mkdv-b" => Ok(Family::MkdvB),
            other => Err(Error::param(format!("unknown equation family '{other}'"))),
        }
    }
}

/// Equation family with its dissipation parameters.
///
/// Conservative families carry `ε = 0` and `α = 1`; dissipative ones need
/// `ε ∈ (0, 1]` and `α ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    family: Family,
    epsilon: f64,
    alpha: f64,
}

impl EquationSpec {
    pub fn new(family: Family, epsilon: f64, alpha: f64) -> Result<Self> {
        if family.is_dissipative() {
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(Error::param(format!(
                    "{family} requires ε ∈ (0, 1], got {epsilon}"
                )));
            }
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::param(format!("α must lie in (0, 1], got {alpha}")));
            }
            Ok(Self { family, epsilon, alpha })
        } else {
            if epsilon != 0.0 {
                let hint = if family.is_cubic() { "mkdv-b" } else { "kdv-b" };
                return Err(Error::param(format!(
                    "{family} is conservative and requires ε = 0, got {epsilon} (use {hint})"
                )));
            }
            Ok(Self { family, epsilon: 0.0, alpha: 1.0 })
        }
    }

    pub fn kdv() -> Self {
        Self { family: Family::Kdv, epsilon: 0.0, alpha: 1.0 }
    }

    pub fn mkdv() -> Self {
        Self { family: Family::Mkdv, epsilon: 0.0, alpha: 1.0 }
    }

    pub fn kdv_b(epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::KdvB, epsilon, alpha)
    }

    pub fn mkdv_b(epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::MkdvB, epsilon, alpha)
    }

    /// MKdV-B for `ε > 0`, MKdV for `ε = 0`.
    pub fn cubic(epsilon: f64, alpha: f64) -> Result<Self> {
        if epsilon == 0.0 {
            Ok(Self::mkdv())
        } else {
            Self::mkdv_b(epsilon, alpha)
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Symbol of the linear part, `iξ³ - ε|ξ|^{2α}`.
    pub fn linear_symbol(&self, xi: f64) -> Complex64 {
        Complex64::new(-self.epsilon * fractional_power(xi, 2.0 * self.alpha), xi * xi * xi)
    }
}
