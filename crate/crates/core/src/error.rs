use thiserror::Error;

use crate::point::PointKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown axiom `{0}` (expected one of sep, ssd, sym, ptri, sssd, lbd, zsd)")]
    UnknownAxiom(String),

    #[error("point kind mismatch: space expects {expected}, got {found}")]
    KindMismatch {
        expected: PointKind,
        found: PointKind,
    },

    #[error("sampler produces {sampler} points but the space expects {space}")]
    SamplerMismatch {
        space: PointKind,
        sampler: PointKind,
    },

    #[error("non-finite distance {value} between {x} and {y}")]
    NonFinite { value: f64, x: String, y: String },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("space `{0}` declares no lower bound")]
    MissingLowerBound(String),

    #[error("points must be distinct, both are {0}")]
    EqualPoints(String),

    #[error("alignment parameters violate {0}")]
    ParameterConstraint(String),

    #[error("word of length {len} exceeds the length cap {cap}")]
    WordTooLong { len: usize, cap: usize },

    #[error("invalid symbol {symbol:?} at position {position}{context}")]
    InvalidSymbol {
        symbol: char,
        position: usize,
        context: String,
    },

    #[error("malformed alignment: {0}")]
    MalformedAlignment(String),

    #[error("oracle size bound exceeded: total length {len} > {max}")]
    OracleBound { len: usize, max: usize },

    #[error("map `{map}` leaves the point domain at {point}")]
    LeavesDomain { map: String, point: String },

    #[error("unknown space `{0}`")]
    UnknownSpace(String),

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("invalid phi function: {0}")]
    InvalidPhi(String),

    #[error("distance {value} at orbit indices ({m}, {n}) lies below r = {r}, outside the domain of phi")]
    PhiDomain {
        m: usize,
        n: usize,
        value: f64,
        r: f64,
    },

    #[error("orbit not Cauchy: verdict {0}")]
    OrbitNotCauchy(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis check failed for {variant}: {condition}")]
    HypothesisFailed {
        variant: String,
        condition: String,
        certificate: Box<crate::orbit::FixedPointCertificate>,
    },

    #[error(
        "conclusion falsified for {variant}: residual {residual} exceeds tolerance {tolerance}"
    )]
    ResidualExceeded {
        variant: String,
        residual: f64,
        tolerance: f64,
        certificate: Box<crate::orbit::FixedPointCertificate>,
    },

    #[error("multi-start check failed for {variant}: {detail}")]
    Disagreement {
        variant: String,
        detail: String,
        certificate: Box<crate::orbit::FixedPointCertificate>,
    },

    #[error("division by zero in min-ratio condition at ({x}, {y})")]
    ZeroDenominator { x: String, y: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("report parse error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
