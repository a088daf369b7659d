//! The bank of H-infinity observers and recursive past-cost accounting that
//! forms the information state of the closed loop.
//!
//! Each model M runs
//!
//! ```text
//! x_hat(t+1) = a_hat x_hat(t) + b u(t) + g_hat y(t),          x_hat(0) = 0,
//! l(t+1)     = l(t) - P x_hat(t)^2 - g^2 y(t)^2
//!              + (P x_hat(t) + g^2 c y(t))^2 / X,             l(0) = 0,
//! ```
//!
//! and the closed loop is finite gain iff every l stays nonpositive. l(t+1)
//! is the exact supremum of the accumulated cost over all disturbances
//! consistent with the observed history (the verify module re-derives it
//! from first principles).

use thiserror::Error;

use crate::model::ModelSet;
use crate::riccati::{solve_riccati, RiccatiError, SolvedModel};

/// Absolute slack accepted at the l = 0 boundary; l(0) = 0 exactly and
/// certified runs may graze zero.
pub const TOL_NEG: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ObserverError {
    /// P < 1: the past cost is strictly convex in y(t) and unbounded above.
    #[error("gain infeasible: P = {0} < 1, past cost unbounded above")]
    GainInfeasible(f64),
}

/// One-step past-cost update. Every component that advances an l value goes
/// through this single expression, so independently advanced recursions stay
/// bitwise identical.
#[inline]
pub fn past_cost_update(
    p: f64,
    x: f64,
    gamma_sq: f64,
    c: f64,
    x_hat: f64,
    l: f64,
    y: f64,
) -> f64 {
    let n = p * x_hat + gamma_sq * c * y;
    l - p * x_hat * x_hat - gamma_sq * y * y + n * n / x
}

/// State estimate and past cost of a single model's observer.
#[derive(Debug, Clone, Copy)]
pub struct ObserverState {
    pub solved: SolvedModel,
    pub x_hat: f64,
    pub l: f64,
    pub t: usize,
}

impl ObserverState {
    /// Fresh observer: x_hat(0) = 0, l(0) = 0.
    pub fn new(solved: SolvedModel) -> Self {
        ObserverState {
            solved,
            x_hat: 0.0,
            l: 0.0,
            t: 0,
        }
    }
}

/// Advance one observer with the shared input/measurement pair.
pub fn observer_step(state: &ObserverState, u: f64, y: f64) -> ObserverState {
    let sm = &state.solved;
    // Grouped as (a_hat x + g_hat y) + b u: a dead-beat control
    // u = -b (a_hat x + g_hat y) then cancels exactly, leaving x_hat = 0.
    let x_next = sm.a_hat * state.x_hat + sm.g_hat * y + sm.model.b * u;
    let g2 = sm.gamma * sm.gamma;
    let l_next = past_cost_update(sm.p, sm.x, g2, sm.model.c, state.x_hat, state.l, y);
    ObserverState {
        solved: state.solved,
        x_hat: x_next,
        l: l_next,
        t: state.t + 1,
    }
}

/// The l component of [`observer_step`] evaluated before committing the
/// step; the l update does not depend on u. Requires P >= 1 (otherwise the
/// supremum interpretation breaks down).
pub fn alpha_closed_form(state: &ObserverState, y: f64) -> Result<f64, ObserverError> {
    let sm = &state.solved;
    if !sm.feasible_gain {
        return Err(ObserverError::GainInfeasible(sm.p));
    }
    let g2 = sm.gamma * sm.gamma;
    Ok(past_cost_update(
        sm.p,
        sm.x,
        g2,
        sm.model.c,
        state.x_hat,
        state.l,
        y,
    ))
}

/// The bank of observers, one per model, advanced in lockstep.
#[derive(Debug, Clone)]
pub struct InformationState {
    pub bank: Vec<ObserverState>,
    pub t: usize,
}

impl InformationState {
    /// Solve every model of the set at the shared gain and start all
    /// observers at zero.
    pub fn new(set: &ModelSet, gamma: f64) -> Result<Self, RiccatiError> {
        let bank = set
            .models
            .iter()
            .map(|m| solve_riccati(m, gamma).map(ObserverState::new))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InformationState { bank, t: 0 })
    }
}

/// Advance every member with the same (u, y).
pub fn bank_step(info: &InformationState, u: f64, y: f64) -> InformationState {
    InformationState {
        bank: info.bank.iter().map(|s| observer_step(s, u, y)).collect(),
        t: info.t + 1,
    }
}

/// True iff every member's past cost is nonpositive (within [`TOL_NEG`]).
pub fn finite_gain_ok(info: &InformationState) -> bool {
    info.bank.iter().all(|s| s.l <= TOL_NEG)
}
