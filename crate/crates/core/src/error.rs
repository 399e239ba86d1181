use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("size bound exceeded: {size} vertices > bound {bound}")]
    SizeBound { size: usize, bound: usize },
    #[error("depth insufficient: {0}")]
    DepthInsufficient(String),
    #[error("generator misbehaviour: {0}")]
    Generator(String),
    #[error("refinement needed: approximant splits into {} parts", split.len())]
    RefinementNeeded { split: Vec<Vec<String>> },
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn assertion<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Assertion(msg.into()))
}
