//! Shared domain types for the scalar uncertain plant and the finite-gain
//! accounting every other module consumes.
//!
//! The plant is
//!
//! ```text
//! x(t+1) = a x(t) + b u(t) + w(t),    x(0) = x0,
//! y(t)   = c x(t) + v(t),
//! ```
//!
//! and the closed loop is finite gain (bounded by `gamma`) when the running
//! cost
//!
//! ```text
//! alpha(T) = sum_{tau <= T+1} x(tau)^2
//!          - gamma^2 sum_{tau <= T} w(tau)^2
//!          - gamma^2 sum_{tau <= T+1} v(tau)^2
//!          - P x(0)^2
//! ```
//!
//! stays nonpositive for all T. Index convention: u(t) is applied after y(t)
//! is observed, so a run of horizon T carries one more state and one more
//! measurement-noise sample than controls (x and v run 0..=T+1, u/y/w run
//! 0..=T, matching the sum limits above literally).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::sig17;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("model field `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("model set must be nonempty")]
    Empty,
    #[error("duplicate model triple at index {0}")]
    Duplicate(usize),
    #[error("gamma must be positive and finite, got {0}")]
    BadGamma(f64),
    #[error("invalid model set JSON: {0}")]
    Json(String),
}

/// One feasible parameter triple (a, b, c) of the uncertain plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    /// Pole.
    pub a: f64,
    /// Input gain.
    pub b: f64,
    /// Output gain.
    pub c: f64,
}

impl Model {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, ModelError> {
        let m = Model { a, b, c };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.a.is_finite() {
            return Err(ModelError::NonFinite("a"));
        }
        if !self.b.is_finite() {
            return Err(ModelError::NonFinite("b"));
        }
        if !self.c.is_finite() {
            return Err(ModelError::NonFinite("c"));
        }
        Ok(())
    }
}

/// Ordered finite set of candidate models.
///
/// JSON form: `{"models": [{"a": .., "b": .., "c": ..}, ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSet {
    pub models: Vec<Model>,
}

impl ModelSet {
    /// Nonempty, all-finite, duplicate-free set.
    pub fn new(models: Vec<Model>) -> Result<Self, ModelError> {
        if models.is_empty() {
            return Err(ModelError::Empty);
        }
        for (i, m) in models.iter().enumerate() {
            m.validate()?;
            if models[..i].iter().any(|p| p == m) {
                return Err(ModelError::Duplicate(i));
            }
        }
        Ok(ModelSet { models })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let raw: ModelSet =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        ModelSet::new(raw.models)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model set serializes")
    }
}

/// Candidate l2-gain bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSpec {
    gamma: f64,
}

impl GainSpec {
    pub fn new(gamma: f64) -> Result<Self, ModelError> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(ModelError::BadGamma(gamma));
        }
        Ok(GainSpec { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("time {t} out of range for horizon {horizon}")]
    OutOfRange { t: usize, horizon: usize },
    #[error("sequence `{name}` has length {got}, expected {want}")]
    BadLength {
        name: &'static str,
        got: usize,
        want: usize,
    },
    #[error("stored x diverges from the recomputed dynamics at t = {t}")]
    Inconsistent { t: usize },
}

/// Time-indexed record of one closed-loop run.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    /// Horizon T; see the module docs for the per-sequence index ranges.
    pub horizon: usize,
    pub gamma: f64,
    /// The realization the plant actually ran with.
    pub true_model: Model,
    /// Riccati solution of the true model, weighting the x(0) penalty.
    pub p_true: f64,
    /// States x(0..=T+1).
    pub x: Vec<f64>,
    /// Controls u(0..=T).
    pub u: Vec<f64>,
    /// Measurements y(0..=T).
    pub y: Vec<f64>,
    /// Process disturbances w(0..=T).
    pub w: Vec<f64>,
    /// Measurement noises v(0..=T+1); v(T+1) enters alpha(T) but its
    /// measurement is never consumed by the controller.
    pub v: Vec<f64>,
    /// Per-model observer estimates, each 0..=T+1.
    pub x_hat: Vec<Vec<f64>>,
    /// Per-model past costs, each 0..=T+1.
    pub l: Vec<Vec<f64>>,
    /// Running cost alpha(0..=T).
    pub alpha: Vec<f64>,
    /// PRNG that realized stochastic plans ("chacha8") or "none".
    pub prng: String,
}

impl SimulationTrace {
    /// Checks the per-sequence lengths and that the stored states reproduce
    /// the dynamics exactly when recomputed from (x0, u, w).
    pub fn validate(&self) -> Result<(), TraceError> {
        let t = self.horizon;
        self.check_len("x", self.x.len(), t + 2)?;
        self.check_len("u", self.u.len(), t + 1)?;
        self.check_len("y", self.y.len(), t + 1)?;
        self.check_len("w", self.w.len(), t + 1)?;
        self.check_len("v", self.v.len(), t + 2)?;
        self.check_len("alpha", self.alpha.len(), t + 1)?;
        for (i, xh) in self.x_hat.iter().enumerate() {
            self.check_len(if i == 0 { "x_hat[0]" } else { "x_hat[i]" }, xh.len(), t + 2)?;
        }
        for l in &self.l {
            self.check_len("l[i]", l.len(), t + 2)?;
        }
        let m = &self.true_model;
        for tau in 0..=t {
            // Same expression order as the simulator, so the match is exact.
            let next = m.a * self.x[tau] + m.b * self.u[tau] + self.w[tau];
            if next.to_bits() != self.x[tau + 1].to_bits() {
                return Err(TraceError::Inconsistent { t: tau });
            }
        }
        Ok(())
    }

    fn check_len(&self, name: &'static str, got: usize, want: usize) -> Result<(), TraceError> {
        if got != want {
            return Err(TraceError::BadLength { name, got, want });
        }
        Ok(())
    }

    /// CSV with header `t,x,u,y,w,v,xhat_1,xhat_m1,l_1,l_m1,alpha` for the
    /// two-model bank (generic banks get `xhat_<i>`/`l_<i>` columns). The
    /// final row holds the trailing x(T+1), v(T+1) and observer states; its
    /// u/y/w/alpha cells are empty.
    pub fn to_csv(&self) -> String {
        let n = self.x_hat.len();
        let mut head = String::from("t,x,u,y,w,v");
        if n == 2 {
            head.push_str(",xhat_1,xhat_m1,l_1,l_m1");
        } else {
            for i in 0..n {
                head.push_str(&format!(",xhat_{i}"));
            }
            for i in 0..n {
                head.push_str(&format!(",l_{i}"));
            }
        }
        head.push_str(",alpha\n");
        let mut out = head;
        for t in 0..=self.horizon + 1 {
            let last = t == self.horizon + 1;
            let cell = |v: &Vec<f64>| if last { String::new() } else { sig17(v[t]) };
            out.push_str(&format!(
                "{t},{},{},{},{},{}",
                sig17(self.x[t]),
                cell(&self.u),
                cell(&self.y),
                cell(&self.w),
                sig17(self.v[t]),
            ));
            for xh in &self.x_hat {
                out.push_str(&format!(",{}", sig17(xh[t])));
            }
            for l in &self.l {
                out.push_str(&format!(",{}", sig17(l[t])));
            }
            out.push(',');
            if !last {
                out.push_str(&sig17(self.alpha[t]));
            }
            out.push('\n');
        }
        out
    }
}

/// Accumulated cost alpha(T) evaluated literally from the trace, with the
/// x(0) penalty weighted by `p`.
pub fn alpha_direct(trace: &SimulationTrace, p: f64, t: usize) -> Result<f64, TraceError> {
    if t > trace.horizon {
        return Err(TraceError::OutOfRange {
            t,
            horizon: trace.horizon,
        });
    }
    if trace.x.len() < t + 2 || trace.v.len() < t + 2 || trace.w.len() < t + 1 {
        return Err(TraceError::BadLength {
            name: "x/v/w",
            got: trace.x.len().min(trace.v.len()),
            want: t + 2,
        });
    }
    let g2 = trace.gamma * trace.gamma;
    let sum_x: f64 = trace.x[..=t + 1].iter().map(|x| x * x).sum();
    let sum_w: f64 = trace.w[..=t].iter().map(|w| w * w).sum();
    let sum_v: f64 = trace.v[..=t + 1].iter().map(|v| v * v).sum();
    Ok(sum_x - g2 * sum_w - g2 * sum_v - p * trace.x[0] * trace.x[0])
}
