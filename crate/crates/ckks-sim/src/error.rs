use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CkksError {
    #[error("{op}: level budget exhausted (level {level})")]
    Depth { op: String, level: u32 },
    #[error("capacity exceeded: {needed} slots needed, {slots} available")]
    Capacity { needed: usize, slots: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameters: {0}")]
    Params(String),
}

pub type Result<T, E = CkksError> = std::result::Result<T, E>;
