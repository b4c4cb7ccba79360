use ckks_sim::CkksError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EncryptedError {
    #[error(transparent)]
    Core(#[from] fhe_regress_core::Error),
    #[error(transparent)]
    Ckks(#[from] CkksError),
    #[error("iteration {iteration}: {source}")]
    Depth {
        iteration: usize,
        #[source]
        source: CkksError,
    },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = EncryptedError> = std::result::Result<T, E>;
