use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no period is common to all series")]
    EmptyIntersection,
    #[error("non-positive price {value} for {entity} at {period}")]
    NonPositivePrice {
        entity: String,
        period: String,
        value: f64,
    },
    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("zero variance: {0}")]
    DegenerateVariance(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("top two eigenvalues coincide ({lambda1} vs {lambda2})")]
    DegenerateDominantPair { lambda1: f64, lambda2: f64 },
    #[error("entity sets differ: {0:?}")]
    EntityMismatch(Vec<String>),
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("layer {layer}: {source}")]
    Layer {
        layer: String,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid generator parameter: {0}")]
    InvalidParams(String),
    #[error("design matrix is rank deficient: column `{0}` is linearly dependent")]
    RankDeficient(String),
    #[error("too few observations: n = {n}, k = {k}")]
    TooFewObservations { n: usize, k: usize },
    #[error("regressor `{0}` has no within-entity variation")]
    NoWithinVariation(String),
    #[error("regressor names differ between estimates: {0}")]
    NameMismatch(String),
    #[error("under-identified: {instruments} instruments for {endogenous} endogenous regressors")]
    UnderIdentified {
        instruments: usize,
        endogenous: usize,
    },
    #[error("near-singular design: {0}")]
    NearSingularDesign(String),
    #[error("invalid degrees of freedom {0}")]
    InvalidDf(f64),
}

impl Error {
    pub fn in_layer(self, layer: impl Into<String>) -> Self {
        Error::Layer {
            layer: layer.into(),
            source: Box::new(self),
        }
    }
}
