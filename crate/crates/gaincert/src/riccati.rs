//! Stationary scalar H-infinity Riccati fixed point and derived observer
//! gains.
//!
//! The fixed point
//!
//! ```text
//! P = ( a^2 / (P + gamma^2 c^2 - 1) + gamma^-2 )^-1
//! ```
//!
//! collapses to the quadratic
//!
//! ```text
//! P^2 + P (a^2 g^2 - g^2 + g^2 c^2 - 1) - g^2 (g^2 c^2 - 1) = 0,
//! ```
//!
//! of which the larger root is taken (the "+sqrt" branch of the c = 1
//! closed form). The observer gains come from the denominator
//! X = P + gamma^2 c^2 - 1:  a_hat = a P / X,  g_hat = gamma^2 a c / X.

use serde::Serialize;
use thiserror::Error;

use crate::model::Model;

/// Accepted residual magnitude for a stationary solution.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// |X| below this counts as a vanishing denominator.
pub const DENOM_TOL: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum RiccatiError {
    /// No positive stationary solution exists for this (model, gamma).
    #[error("no positive stationary Riccati solution for this (model, gamma)")]
    Infeasible,
    #[error("denominator P + gamma^2 c^2 - 1 vanishes")]
    SingularDenominator,
}

/// A model paired with its gain candidate and everything needed to run its
/// observer. Constructed by [`solve_riccati`], which establishes the
/// invariants (P > 0, residual below [`RESIDUAL_TOL`], X > 0, P <= gamma^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolvedModel {
    pub model: Model,
    pub gamma: f64,
    /// Stationary Riccati solution.
    pub p: f64,
    /// Denominator X = P + gamma^2 c^2 - 1.
    pub x: f64,
    /// Observer pole a_hat = a P / X.
    pub a_hat: f64,
    /// Measurement gain g_hat = gamma^2 a c / X.
    pub g_hat: f64,
    /// P >= 1. When false, gamma is certified NOT to be an upper bound of
    /// the l2-gain, and past costs are unbounded above.
    pub feasible_gain: bool,
}

/// Larger-root solution of the stationary Riccati quadratic, refined by one
/// fixed-point sweep. `Infeasible` when the larger root is nonpositive,
/// complex, or leaves X <= 0.
pub fn solve_riccati(model: &Model, gamma: f64) -> Result<SolvedModel, RiccatiError> {
    if !(gamma.is_finite() && gamma > 0.0) || model.validate().is_err() {
        return Err(RiccatiError::Infeasible);
    }
    let (a, c) = (model.a, model.c);
    let g2 = gamma * gamma;
    let q = a * a * g2 - g2 + g2 * c * c - 1.0;
    let r = g2 * (g2 * c * c - 1.0);
    let disc = q * q + 4.0 * r;
    if disc < 0.0 {
        return Err(RiccatiError::Infeasible);
    }
    // Larger root, evaluated without cancellation on either sign of q.
    let root = disc.sqrt();
    let p0 = if q <= 0.0 {
        (-q + root) / 2.0
    } else {
        2.0 * r / (q + root)
    };
    if p0 <= 0.0 || !p0.is_finite() {
        return Err(RiccatiError::Infeasible);
    }
    let x0 = p0 + g2 * c * c - 1.0;
    if x0 <= 0.0 {
        return Err(RiccatiError::Infeasible);
    }
    // One fixed-point sweep polishes the root.
    let p = 1.0 / (a * a / x0 + 1.0 / g2);
    let x = p + g2 * c * c - 1.0;
    if p <= 0.0 || p.is_nan() || x <= 0.0 {
        return Err(RiccatiError::Infeasible);
    }
    match riccati_residual(p, model, gamma) {
        Ok(res) if res.abs() < RESIDUAL_TOL => {}
        _ => return Err(RiccatiError::Infeasible),
    }
    debug_assert!(p <= g2 * (1.0 + 1e-9), "P = {p} exceeds gamma^2 = {g2}");
    Ok(SolvedModel {
        model: *model,
        gamma,
        p,
        x,
        a_hat: a * p / x,
        g_hat: g2 * a * c / x,
        feasible_gain: p >= 1.0,
    })
}

/// Defect of a candidate P in the stationary equation:
/// `P - (a^2/(P + gamma^2 c^2 - 1) + gamma^-2)^-1`.
pub fn riccati_residual(p: f64, model: &Model, gamma: f64) -> Result<f64, RiccatiError> {
    let g2 = gamma * gamma;
    let x = p + g2 * model.c * model.c - 1.0;
    if x.abs() < DENOM_TOL {
        return Err(RiccatiError::SingularDenominator);
    }
    Ok(p - 1.0 / (model.a * model.a / x + 1.0 / g2))
}
