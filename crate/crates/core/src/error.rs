use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no analytic spectral basis for {0} domains")]
    UnsupportedBasis(&'static str),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unknown nonlinearity `{0}`")]
    UnknownNonlinearity(String),
    #[error("c_f is undefined: the nonlinearity vanishes on the scanned range")]
    UndefinedCf,
    #[error("hypothesis not satisfied: {0}")]
    HypothesisNotMet(String),
    #[error("no sign witness: F(t) <= 0 on the scanned range")]
    NoSignWitness,
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("no feasible witness: the positivity margin is never positive on the search grid")]
    NoFeasibleWitness,
    #[error("ball B({center:?}, {radius}) is not contained in the domain")]
    Containment { center: Vec<f64>, radius: f64 },
    #[error("sigma = {sigma} lies outside ({lo}, 1)")]
    SigmaOutOfRange { sigma: f64, lo: f64 },
    #[error("condition unverifiable: {0}")]
    ConditionUnverifiable(String),
    #[error("numerical failure in {stage}: {detail}")]
    NumericalFailure { stage: String, detail: String },
    #[error("degenerate mountain-pass geometry: {0}")]
    DegenerateGeometry(String),
    #[error("solutions not distinct: H-distance {distance:e} <= {tolerance:e}")]
    NotDistinct { distance: f64, tolerance: f64 },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
