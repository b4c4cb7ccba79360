use ckks_sim::{CipherMatrix, CkksError, Evaluator, HeParams};
use fhe_regress_core::link::{POLY3_C0, POLY3_C1, POLY3_C3};
use fhe_regress_core::Scalar;

use crate::error::{EncryptedError, Result};
use crate::pack::EncryptedTrainingState;

/// Multiplicative depth of one linear-regression iteration:
/// `x*beta`, `residual*x`, `bbar*grad`.
pub const LINEAR_STEP_DEPTH: u32 = 3;
/// Multiplicative depth of one LFFR iteration: `x*beta`, `z^2`, `z^3`,
/// `s(1-s)`, `residual*s(1-s)`, `weight*x`, `bbar*grad`.
pub const LFFR_STEP_DEPTH: u32 = 7;

/// When the weight ciphertext gets refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RefreshPolicy {
    /// Before an iteration whose depth exceeds the remaining levels.
    #[default]
    WhenNeeded,
    /// Before every iteration after the first.
    EveryIteration,
    /// Never; the run fails with a depth error once levels run out.
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Linear,
    Lffr,
}

impl StepKind {
    pub fn depth(self) -> u32 {
        match self {
            StepKind::Linear => LINEAR_STEP_DEPTH,
            StepKind::Lffr => LFFR_STEP_DEPTH,
        }
    }
}

/// Refreshes the [`RefreshPolicy::WhenNeeded`] policy performs over
/// `iterations` steps of `depth` levels each.
pub fn predicted_refreshes(iterations: usize, depth: u32, params: &HeParams) -> Result<usize> {
    let per_refresh = (params.initial_levels() / depth) as usize;
    if per_refresh == 0 {
        return Err(EncryptedError::Config(format!(
            "one iteration needs {depth} levels, the budget is {}",
            params.initial_levels()
        )));
    }
    Ok(iterations.div_ceil(per_refresh).saturating_sub(1))
}

fn prepare<T: Scalar>(st: &mut EncryptedTrainingState<T>, depth: u32) {
    st.evaluator.set_iteration(st.iteration);
    st.evaluator.report_mut().levels_per_iteration = depth;
    let refresh = match st.policy {
        RefreshPolicy::WhenNeeded => st.ct_beta.level() < depth,
        RefreshPolicy::EveryIteration => st.iteration > 0,
        RefreshPolicy::Never => false,
    };
    if refresh {
        st.ct_beta = st.evaluator.refresh(&st.ct_beta, "beta");
    }
}

fn finish<T: Scalar>(
    st: &mut EncryptedTrainingState<T>,
    outcome: std::result::Result<CipherMatrix<T>, CkksError>,
) -> Result<()> {
    let beta = outcome.map_err(|source| match source {
        CkksError::Depth { .. } => EncryptedError::Depth { iteration: st.iteration, source },
        other => other.into(),
    })?;
    st.ct_beta = beta;
    st.evaluator.report_mut().level_trace.push(st.ct_beta.level());
    st.iteration += 1;
    Ok(())
}

/// `beta - bbar * sum_b grad_b`, given per-block doubled gradient terms.
fn apply_update<T: Scalar>(
    ev: &mut Evaluator,
    beta: &CipherMatrix<T>,
    bbar: &CipherMatrix<T>,
    terms: Vec<CipherMatrix<T>>,
) -> std::result::Result<CipherMatrix<T>, CkksError> {
    let mut g = ev.sum_rows(&terms[0]);
    for t in &terms[1..] {
        let part = ev.sum_rows(t);
        g = ev.add(&g, &part)?;
    }
    let delta = ev.mult_labeled(bbar, &g, "bbar*grad")?;
    ev.sub(beta, &delta)
}

fn linear_circuit<T: Scalar>(
    st: &mut EncryptedTrainingState<T>,
) -> std::result::Result<CipherMatrix<T>, CkksError> {
    let ev = &mut st.evaluator;
    let mut terms = Vec::with_capacity(st.blocks.len());
    for b in &st.blocks {
        let prod = ev.mult_labeled(&b.ct_x, &st.ct_beta, "x*beta")?;
        let z = ev.sum_cols(&prod);
        let r = ev.sub(&z, &b.ct_y)?;
        let q = ev.mult_labeled(&r, &b.ct_x, "residual*x")?;
        terms.push(ev.add(&q, &q)?);
    }
    apply_update(ev, &st.ct_beta, &st.ct_bbar, terms)
}

fn lffr_circuit<T: Scalar>(
    st: &mut EncryptedTrainingState<T>,
) -> std::result::Result<CipherMatrix<T>, CkksError> {
    let ev = &mut st.evaluator;
    let mut terms = Vec::with_capacity(st.blocks.len());
    for b in &st.blocks {
        let prod = ev.mult_labeled(&b.ct_x, &st.ct_beta, "x*beta")?;
        let z = ev.sum_cols(&prod);
        let z2 = ev.mult_labeled(&z, &z, "z^2")?;
        let z3 = ev.mult_labeled(&z2, &z, "z^3")?;
        let lin = ev.mult_const(&z, T::lit(POLY3_C1));
        let lin = ev.add_const(&lin, T::lit(POLY3_C0));
        let cubic = ev.mult_const(&z3, T::lit(POLY3_C3));
        let s = ev.add(&lin, &cubic)?;
        let neg = ev.mult_const(&s, -T::one());
        let one_minus = ev.add_const(&neg, T::one());
        let slope = ev.mult_labeled(&s, &one_minus, "s(1-s)")?;
        let r = ev.sub(&s, &b.ct_y)?;
        let w = ev.mult_labeled(&r, &slope, "residual*s(1-s)")?;
        let q = ev.mult_labeled(&w, &b.ct_x, "weight*x")?;
        terms.push(ev.add(&q, &q)?);
    }
    apply_update(ev, &st.ct_beta, &st.ct_bbar, terms)
}

/// One fixed-Hessian step of linear regression.
pub fn encrypted_gradient_step_linear<T: Scalar>(st: &mut EncryptedTrainingState<T>) -> Result<()> {
    prepare(st, LINEAR_STEP_DEPTH);
    let out = linear_circuit(st);
    finish(st, out)
}

/// One fixed-Hessian step of LFFR with the degree-3 sigmoid.
pub fn encrypted_gradient_step_lffr<T: Scalar>(st: &mut EncryptedTrainingState<T>) -> Result<()> {
    prepare(st, LFFR_STEP_DEPTH);
    let out = lffr_circuit(st);
    finish(st, out)
}

pub fn encrypted_gradient_step<T: Scalar>(st: &mut EncryptedTrainingState<T>, kind: StepKind) -> Result<()> {
    match kind {
        StepKind::Linear => encrypted_gradient_step_linear(st),
        StepKind::Lffr => encrypted_gradient_step_lffr(st),
    }
}
