//! Certainty-equivalence dead-beat controller for the unknown-input-sign
//! family {(a, +1, 1), (a, -1, 1)} and the merged two-observer recursion.
//!
//! Both signs share the same Riccati solution (P depends on a^2 only), so
//! one set of gains drives two observers. The control law zeroes the
//! observer of whichever model currently carries the larger past cost:
//!
//! ```text
//! u(t) = -(a_hat x_hat_1(t) + g_hat y(t))   if l_1(t+1) >= l_{-1}(t+1)
//! u(t) =   a_hat x_hat_{-1}(t) + g_hat y(t) otherwise,
//! ```
//!
//! where the compared l values already incorporate y(t). Ties route to the
//! b = +1 branch. Under this law at most one estimate is ever nonzero, which
//! collapses the bank to the single recursion tracked by [`MergedState`].

use thiserror::Error;

use crate::model::Model;
use crate::observer::{alpha_closed_form, observer_step, past_cost_update, ObserverState};
use crate::riccati::{solve_riccati, RiccatiError, SolvedModel};

#[derive(Debug, Error, PartialEq)]
pub enum DeadbeatError {
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    /// P <= 1: past costs are unbounded above (or their threshold P/(P-1)
    /// degenerates), so the supervisor has nothing meaningful to compare.
    #[error("P = {0} <= 1: certainty-equivalence controller undefined")]
    GainInfeasible(f64),
}

/// Controller gains shared by both input signs.
#[derive(Debug, Clone, Copy)]
pub struct CeController {
    pub a: f64,
    pub gamma: f64,
    pub p: f64,
    /// X = P + gamma^2 - 1.
    pub x: f64,
    pub a_hat: f64,
    pub g_hat: f64,
}

impl CeController {
    pub fn new(a: f64, gamma: f64) -> Result<Self, DeadbeatError> {
        let solved = solve_riccati(&Model { a, b: 1.0, c: 1.0 }, gamma)?;
        if solved.p <= 1.0 {
            return Err(DeadbeatError::GainInfeasible(solved.p));
        }
        Ok(CeController {
            a,
            gamma,
            p: solved.p,
            x: solved.x,
            a_hat: solved.a_hat,
            g_hat: solved.g_hat,
        })
    }

    /// Fresh observers for b = +1 and b = -1, sharing this controller's
    /// gains bit for bit.
    pub fn observer_pair(&self) -> [ObserverState; 2] {
        let mk = |b: f64| {
            ObserverState::new(SolvedModel {
                model: Model {
                    a: self.a,
                    b,
                    c: 1.0,
                },
                gamma: self.gamma,
                p: self.p,
                x: self.x,
                a_hat: self.a_hat,
                g_hat: self.g_hat,
                feasible_gain: true,
            })
        };
        [mk(1.0), mk(-1.0)]
    }
}

/// The dead-beat control law. `l1_next`/`lm1_next` are the past costs
/// already advanced with y(t) (see [`alpha_closed_form`]); the returned u
/// zeroes the argmax model's estimate at t+1.
pub fn control(
    ctrl: &CeController,
    x_hat_1: f64,
    x_hat_m1: f64,
    l1_next: f64,
    lm1_next: f64,
    y: f64,
) -> f64 {
    if l1_next >= lm1_next {
        -(ctrl.a_hat * x_hat_1 + ctrl.g_hat * y)
    } else {
        ctrl.a_hat * x_hat_m1 + ctrl.g_hat * y
    }
}

/// Compressed closed-loop state: the one possibly-nonzero estimate
/// x_hat = x_hat_1 + x_hat_{-1} plus both past costs. The model with the
/// (weakly) larger l has estimate zero.
#[derive(Debug, Clone, Copy)]
pub struct MergedState {
    pub x_hat: f64,
    pub l1: f64,
    pub lm1: f64,
    pub t: usize,
}

impl Default for MergedState {
    fn default() -> Self {
        Self::new()
    }
}

impl MergedState {
    pub fn new() -> Self {
        MergedState {
            x_hat: 0.0,
            l1: 0.0,
            lm1: 0.0,
            t: 0,
        }
    }
}

/// One step of the merged recursion: x_hat advances by
/// a_hat x_hat + 2 g_hat y regardless of branch; the larger-l model updates
/// its cost with estimate 0, the smaller-l model with estimate x_hat.
pub fn merged_step(ctrl: &CeController, s: &MergedState, y: f64) -> MergedState {
    let g2 = ctrl.gamma * ctrl.gamma;
    let with_zero = |l| past_cost_update(ctrl.p, ctrl.x, g2, 1.0, 0.0, l, y);
    let with_xhat = |l| past_cost_update(ctrl.p, ctrl.x, g2, 1.0, s.x_hat, l, y);
    let (l1, lm1) = if s.l1 >= s.lm1 {
        (with_zero(s.l1), with_xhat(s.lm1))
    } else {
        (with_xhat(s.l1), with_zero(s.lm1))
    };
    // Summed as (a_hat x + g_hat y) + g_hat y to replicate the two-observer
    // arithmetic bit for bit.
    let x_hat = ctrl.a_hat * s.x_hat + ctrl.g_hat * y + ctrl.g_hat * y;
    MergedState {
        x_hat,
        l1,
        lm1,
        t: s.t + 1,
    }
}

/// Runs the two-observer bank under the dead-beat law and the merged
/// recursion side by side on the same measurement sequence, returning the
/// largest absolute deviation seen in (x_hat_1 + x_hat_{-1}, l_1, l_{-1}).
pub fn equivalence_check(ctrl: &CeController, y_seq: &[f64]) -> f64 {
    let mut bank = ctrl.observer_pair();
    let mut merged = MergedState::new();
    let mut worst = 0.0f64;
    for &y in y_seq {
        let l1n = alpha_closed_form(&bank[0], y).expect("P > 1 by construction");
        let lm1n = alpha_closed_form(&bank[1], y).expect("P > 1 by construction");
        let u = control(ctrl, bank[0].x_hat, bank[1].x_hat, l1n, lm1n, y);
        bank = [observer_step(&bank[0], u, y), observer_step(&bank[1], u, y)];
        merged = merged_step(ctrl, &merged, y);
        worst = worst
            .max((merged.x_hat - (bank[0].x_hat + bank[1].x_hat)).abs())
            .max((merged.l1 - bank[0].l).abs())
            .max((merged.lm1 - bank[1].l).abs());
    }
    worst
}
