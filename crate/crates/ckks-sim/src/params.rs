use serde::{Deserialize, Serialize};

use crate::error::{CkksError, Result};

/// Ring-degree exponent used by default.
pub const DEFAULT_LOG_N: u32 = 16;
/// Total modulus bits used by default.
pub const DEFAULT_LOG_Q: u32 = 1200;
/// Bits consumed by one rescale.
pub const DEFAULT_LOG_P: u32 = 30;

/// Leveled CKKS parameter set.
///
/// Only the level budget `log_q / log_p` and the slot count matter to the
/// simulator; nothing here is a security estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeParams {
    pub log_n: u32,
    pub log_q: u32,
    pub log_p: u32,
    pub slots: usize,
    /// Set when `slots` was chosen directly instead of derived from `log_n`.
    pub slots_override: bool,
}

impl HeParams {
    /// Derives `slots = 2^(log_n - 1)`.
    pub fn new(log_n: u32, log_q: u32, log_p: u32) -> Result<Self> {
        if !(1..=40).contains(&log_n) {
            return Err(CkksError::Params(format!("log_n must lie in 1..=40, got {log_n}")));
        }
        if log_p == 0 {
            return Err(CkksError::Params("log_p must be positive".into()));
        }
        let p = Self { log_n, log_q, log_p, slots: 1usize << (log_n - 1), slots_override: false };
        if p.initial_levels() < 2 {
            return Err(CkksError::Params(format!(
                "log_q / log_p = {} / {} gives fewer than 2 levels",
                log_q, log_p
            )));
        }
        Ok(p)
    }

    /// Replaces the derived slot count, e.g. to keep unit tests small.
    pub fn with_slots(mut self, slots: usize) -> Result<Self> {
        if slots == 0 {
            return Err(CkksError::Params("slots must be positive".into()));
        }
        self.slots = slots;
        self.slots_override = true;
        Ok(self)
    }

    /// Multiplicative depth of a fresh ciphertext, `floor(log_q / log_p)`.
    pub fn initial_levels(&self) -> u32 {
        self.log_q / self.log_p
    }

    /// Magnitude of the optional per-multiplication perturbation,
    /// `2^(-log_p / 2)`.
    pub fn noise_magnitude(&self) -> f64 {
        (-(self.log_p as f64) / 2.0).exp2()
    }
}

impl Default for HeParams {
    fn default() -> Self {
        Self::new(DEFAULT_LOG_N, DEFAULT_LOG_Q, DEFAULT_LOG_P).expect("default parameters are valid")
    }
}
