//! Named initial profiles.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::mass;
use crate::grid::{RadialField, RadialGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `exp(-r^2 / (2 w^2))`
    Gaussian,
    /// `exp(-r / w)`
    Exponential,
    /// `(r / w) exp(-r / w)`
    Shell,
    /// `exp(-r^2 / (2 w^2)) (1 - r^2)^2` on the unit ball, zero outside.
    CutGaussian,
}

impl Profile {
    pub fn shape(self, r: f64, width: f64) -> f64 {
        let x = r / width;
        match self {
            Profile::Gaussian => (-0.5 * x * x).exp(),
            Profile::Exponential => (-x).exp(),
            Profile::Shell => x * (-x).exp(),
            Profile::CutGaussian => {
                if r < 1.0 {
                    (-0.5 * x * x).exp() * (1.0 - r * r).powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Samples the profile and scales it to the requested mass; the outer node is zero.
    pub fn build(self, grid: &RadialGrid, width: f64, target_mass: f64) -> Result<RadialField> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidOption(format!("profile width {width}")));
        }
        if !(target_mass.is_finite() && target_mass > 0.0) {
            return Err(Error::InvalidMass(target_mass));
        }
        let f = RadialField::from_fn(grid, |r| self.shape(r, width))?.with_dirichlet();
        let m = mass(&f);
        if m.is_nan() || m <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(f.scaled((target_mass / m).sqrt()))
    }
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Profile::Gaussian),
            "exponential" => Ok(Profile::Exponential),
            "shell" => Ok(Profile::Shell),
            "cut-gaussian" => Ok(Profile::CutGaussian),
            other => Err(Error::Parse(format!("unknown profile `{other}`"))),
        }
    }
}
