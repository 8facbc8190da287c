use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Annealing schedule `λ(s)` on the dimensionless time `s = t/τ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `sin²(πs/2)`; flat at both ends.
    #[default]
    SinSquared,
    /// `3s² − 2s³`; flat at both ends.
    Smoothstep,
    Linear,
}

/// `sin(πs)`, exactly zero at integer `s`.
fn sin_pi(s: f64) -> f64 {
    if s.fract() == 0.0 {
        0.0
    } else {
        (PI * s).sin()
    }
}

impl Schedule {
    pub const ALL: [Schedule; 3] = [Schedule::SinSquared, Schedule::Smoothstep, Schedule::Linear];

    pub fn lambda(self, s: f64) -> f64 {
        match self {
            Schedule::SinSquared => {
                let v = sin_pi(0.5 * s);
                v * v
            }
            Schedule::Smoothstep => s * s * (3.0 - 2.0 * s),
            Schedule::Linear => s,
        }
    }

    /// `dλ/ds`.
    pub fn dlambda(self, s: f64) -> f64 {
        match self {
            Schedule::SinSquared => 0.5 * PI * sin_pi(s),
            Schedule::Smoothstep => 6.0 * s * (1.0 - s),
            Schedule::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Schedule::SinSquared => "sin_squared",
            Schedule::Smoothstep => "smoothstep",
            Schedule::Linear => "linear",
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Schedule::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown schedule {s:?}")))
    }
}
