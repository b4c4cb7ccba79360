//! Fixed-Hessian trainers evaluated as straight-line programs over the
//! CKKS simulator.
//!
//! The data owner packs the bias-augmented design matrix, the (transformed)
//! targets, a zero weight vector and the inverse fixed-Hessian diagonal
//! into ciphertexts. Each iteration is one fixed circuit of slotwise
//! multiplications, additions and rotations; when the weight ciphertext
//! lacks the levels for another iteration it is refreshed.

mod error;
mod pack;
mod step;
mod train;

pub use error::{EncryptedError, Result};
pub use pack::{
    pack_inputs, pack_sharded, shard_dataset, shard_plan, EncryptedTrainingState, PackedBlock,
    ShardPlan,
};
pub use step::{
    encrypted_gradient_step, encrypted_gradient_step_lffr, encrypted_gradient_step_linear,
    predicted_refreshes, RefreshPolicy, StepKind, LFFR_STEP_DEPTH, LINEAR_STEP_DEPTH,
};
pub use train::{train_encrypted, train_encrypted_with, EncryptedOptions};
