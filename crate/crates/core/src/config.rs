use serde::{Deserialize, Serialize};

/// Numeric guards used throughout the pipeline.
///
/// The underlying theory assumes exact genericity; these thresholds decide
/// what counts as a tangency, a triple point, or an integer in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residual for refined crossing positions.
    pub position: f64,
    /// A crossing angle within this of 0 or π is a tangency.
    pub angle_guard: f64,
    /// Refined crossings closer than this in parameter are the same crossing.
    pub merge_radius: f64,
    /// Distinct crossings closer than this in position form a triple point.
    pub triple_radius: f64,
    /// Closest approach below this without a transversal crossing is a tangency.
    pub touch_radius: f64,
    /// Absolute tolerance for turning integrals over one arc.
    pub quadrature: f64,
    /// Distance to the nearest integer accepted for rotation and winding numbers.
    pub integrality: f64,
    /// Minimum admissible speed `|Γ'|`.
    pub immersion: f64,
    /// Samples per component for the immersion check.
    pub immersion_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            position: 1e-12,
            angle_guard: 1e-6,
            merge_radius: 1e-9,
            triple_radius: 1e-7,
            touch_radius: 1e-7,
            quadrature: 1e-9,
            integrality: 1e-6,
            immersion: 1e-9,
            immersion_samples: 4096,
        }
    }
}
