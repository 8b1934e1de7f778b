use thiserror::Error;

use crate::crossings::GenericityReport;
use crate::geom::Vec2;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse curve: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid path in component {component}: {reason}")]
    InvalidPath { component: usize, reason: String },

    #[error("unknown component {0}")]
    UnknownComponent(usize),

    #[error("turning rate is only defined on Fourier paths (component {0})")]
    NotSmooth(usize),

    #[error("vanishing derivative on component {component} at t = {t}")]
    NonImmersion { component: usize, t: f64 },

    #[error("turning integral {raw} is not within tolerance of an integer multiple of 2π")]
    RotationNotIntegral { raw: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}] (estimated error {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("curve is not a generic immersion: {0}")]
    NotGeneric(GenericityReport),

    #[error("point ({}, {}) lies too close to the curve", .0.x, .0.y)]
    TooCloseToCurve(Vec2),

    #[error("winding number {raw} is not within tolerance of an integer")]
    WindingNotIntegral { raw: f64 },

    #[error("adjacent probes around component {component} at t = {t} differ by {difference} instead of 1")]
    ProbeStraddle {
        component: usize,
        t: f64,
        difference: i64,
    },

    #[error("index is not constant along arc {arc} (missed crossing?)")]
    ConstancyAudit { arc: usize },

    #[error("double point {point}: branch-average index {from_arcs} disagrees with quadrant probes {from_probes}")]
    DoublePointIndexMismatch {
        point: usize,
        from_arcs: String,
        from_probes: String,
    },

    #[error("smoothed component {component} mixes arc indices")]
    SmoothingIndexMismatch { component: usize },

    #[error("smoothed component {component} has turning {turns} turns, expected ±1")]
    SmoothingRotation { component: usize, turns: f64 },

    #[error("index weight is undefined at {0}")]
    WeightUndefined(String),

    #[error("evaluation point q = {0} must be positive")]
    InvalidQ(f64),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("scenario {name}: {reason}")]
    Scenario { name: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
