use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not inside the open unit disc")]
    OutsideDisc { x: f64, y: f64 },

    #[error("invalid polar/depth coordinates (depth {depth}, arg {arg})")]
    BadCoordinates { depth: f64, arg: f64 },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("sequence is empty")]
    EmptySequence,

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("radial shift by beta = {shift} from a point at beta = {available} from the origin passes the origin")]
    ShiftPastOrigin { shift: f64, available: f64 },

    #[error("partition enumeration is capped at {cap} nodes, got {nodes}")]
    TooManyNodes { nodes: usize, cap: usize },

    #[error("harmonic measure of E_{node} is {omega}, below the required {bound}")]
    EstimateViolated { node: usize, omega: f64, bound: f64 },

    #[error("bounded interpolation level {gamma} is within tolerance at grid resolution {resolution}; retry with resolution {suggested}")]
    GammaResolution {
        gamma: f64,
        resolution: usize,
        suggested: usize,
    },

    #[error("condition (a) fails: fitted constant {fitted} exceeds {bound}")]
    DensityViolated { fitted: f64, bound: f64 },

    #[error("linear program: {0}")]
    Lp(String),
}
