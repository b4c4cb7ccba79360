//! Leveled CKKS semantics without cryptography.
//!
//! Ciphertexts are plain slot grids tagged with a remaining multiplicative
//! level. Multiplications rescale (one level each) and fail loudly at level
//! zero; additions and rotations are free; `refresh` models bootstrapping as
//! a level reset. The default mode is noise-free, so any straight-line
//! program decrypts to exactly what the same program computes in the clear.

mod cipher;
mod error;
mod evaluator;
mod params;

pub use cipher::{decrypt, decrypt_padded, encode, padded_width, CipherMatrix, SlotValue};
pub use error::{CkksError, Result};
pub use evaluator::{Evaluator, RefreshEvent, RefreshReport};
pub use params::{HeParams, DEFAULT_LOG_N, DEFAULT_LOG_P, DEFAULT_LOG_Q};

pub type CipherMatrix64 = CipherMatrix<f64>;
pub type CipherMatrix32 = CipherMatrix<f32>;
