use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("observable {observable} is not defined for the {model} model")]
    ObservableMismatch {
        observable: String,
        model: &'static str,
    },

    #[error("trajectory blew up: path {path}, step {step}, t = {time:.6} ({substep})")]
    BlowUp {
        path: usize,
        step: usize,
        time: f64,
        substep: &'static str,
    },

    #[error("sampled function: {0}")]
    InvalidSampledFunction(String),

    #[error("grid is not uniform at row {row}: expected t = {expected}, got {got}")]
    NonUniformGrid { row: usize, expected: f64, got: f64 },

    #[error("empty trajectory store")]
    EmptyStore,

    #[error("kernel density estimate needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("kernel density estimate of a zero-variance sample")]
    DegenerateSample,

    #[error("no exponential decay observed: {0}")]
    NoDecayObserved(String),

    #[error(transparent)]
    Chain(#[from] poly_algebra::PolyError),

    #[error("store i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("store manifest: {0}")]
    Manifest(String),
}
