//! External potentials: the transverse confinement `V⊥(y)` and the longitudinal,
//! possibly time-dependent, `V∥(t, z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2;

/// Shape of the transverse confinement on the unit scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransverseShape {
    /// `strength * |y|^2`.
    Harmonic { strength: f64 },
    /// `0` inside `|y| < radius`, `depth` outside.
    SquareWell { depth: f64, radius: f64 },
}

/// `V⊥(y) = shape(y) + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversePotential {
    #[serde(flatten)]
    pub shape: TransverseShape,
    #[serde(default)]
    pub offset: f64,
}

impl TransversePotential {
    pub fn harmonic(strength: f64) -> Self {
        Self { shape: TransverseShape::Harmonic { strength }, offset: 0.0 }
    }

    pub fn square_well(depth: f64, radius: f64) -> Self {
        Self { shape: TransverseShape::SquareWell { depth, radius }, offset: 0.0 }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.shape {
            TransverseShape::Harmonic { strength } => strength > 0.0 && strength.is_finite(),
            TransverseShape::SquareWell { depth, radius } => depth > 0.0 && radius > 0.0 && depth.is_finite(),
        };
        if ok && self.offset.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("transverse potential is not confining: {self:?}")))
        }
    }

    pub fn eval(&self, y: [f64; 2]) -> f64 {
        let r2 = y[0] * y[0] + y[1] * y[1];
        self.offset
            + match self.shape {
                TransverseShape::Harmonic { strength } => strength * r2,
                TransverseShape::SquareWell { depth, radius } => {
                    if r2 < radius * radius {
                        0.0
                    } else {
                        depth
                    }
                }
            }
    }

    /// Samples on a 2D grid in storage order.
    pub fn sample(&self, grid: &Grid2) -> Vec<f64> {
        (0..grid.len()).map(|i| self.eval(grid.point(i))).collect()
    }
}

/// `V∥(t, x, y)`. The one-dimensional equation only sees `y = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExternalPotential {
    #[default]
    Zero,
    Constant { value: f64 },
    /// `strength * (x - center)^2`.
    Harmonic {
        strength: f64,
        #[serde(default)]
        center: f64,
    },
    /// `amplitude * exp(-(x - center)^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `strength_x (x - center)^2 + strength_y |y|^2`.
    HarmonicXy {
        strength_x: f64,
        strength_y: f64,
        #[serde(default)]
        center: f64,
    },
    /// `base(t, z) * (1 + depth * sin(frequency * t))`.
    Modulated {
        base: Box<ExternalPotential>,
        depth: f64,
        frequency: f64,
    },
    Sum { terms: Vec<ExternalPotential> },
}

impl ExternalPotential {
    pub fn eval(&self, t: f64, x: f64, y: [f64; 2]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Harmonic { strength, center } => strength * (x - center).powi(2),
            Self::Gaussian { amplitude, width, center } => {
                amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp()
            }
            Self::HarmonicXy { strength_x, strength_y, center } => {
                strength_x * (x - center).powi(2) + strength_y * (y[0] * y[0] + y[1] * y[1])
            }
            Self::Modulated { base, depth, frequency } => {
                base.eval(t, x, y) * (1.0 + depth * (frequency * t).sin())
            }
            Self::Sum { terms } => terms.iter().map(|p| p.eval(t, x, y)).sum(),
        }
    }

    /// `V∥(t, (x, 0))`.
    pub fn eval_line(&self, t: f64, x: f64) -> f64 {
        self.eval(t, x, [0.0, 0.0])
    }

    /// `∂_t V∥(t, z)`.
    pub fn time_derivative(&self, t: f64, x: f64, y: [f64; 2]) -> f64 {
        match self {
            Self::Modulated { base, depth, frequency } => {
                base.time_derivative(t, x, y) * (1.0 + depth * (frequency * t).sin())
                    + base.eval(t, x, y) * depth * frequency * (frequency * t).cos()
            }
            Self::Sum { terms } => terms.iter().map(|p| p.time_derivative(t, x, y)).sum(),
            _ => 0.0,
        }
    }

    pub fn is_autonomous(&self) -> bool {
        match self {
            Self::Modulated { depth, frequency, base } => {
                (*depth == 0.0 || *frequency == 0.0) && base.is_autonomous()
            }
            Self::Sum { terms } => terms.iter().all(|p| p.is_autonomous()),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { value } => *value == 0.0,
            Self::Sum { terms } => terms.iter().all(|p| p.is_zero()),
            _ => false,
        }
    }

    /// Whether the potential varies with `y`.
    pub fn depends_on_y(&self) -> bool {
        match self {
            Self::HarmonicXy { strength_y, .. } => *strength_y != 0.0,
            Self::Modulated { base, .. } => base.depends_on_y(),
            Self::Sum { terms } => terms.iter().any(|p| p.depends_on_y()),
            _ => false,
        }
    }
}
