//! Learning-enabled robust control for scalar uncertain linear systems:
//! H-infinity observer banks with recursive past-cost accounting, a
//! certainty-equivalence dead-beat controller for the unknown-input-sign
//! family, and closed-form l2-gain certification with a minimal-gamma
//! solver, plus the independent oracles that check all of it against first
//! principles.

pub mod certify;
pub mod cli;
pub mod deadbeat;
pub mod model;
pub(crate) mod numfmt;
pub mod observer;
pub mod riccati;
pub mod verify;

pub use certify::{
    certify, curvature_condition, figure_quadfuns, gamma_star, interval_pair, strong_negativity,
    sweep, CertificationReport, IntervalPair, SweepRow,
};
pub use deadbeat::{control, equivalence_check, merged_step, CeController, MergedState};
pub use model::{alpha_direct, GainSpec, Model, ModelSet, SimulationTrace};
pub use observer::{
    alpha_closed_form, bank_step, finite_gain_ok, observer_step, past_cost_update,
    InformationState, ObserverState,
};
pub use riccati::{riccati_residual, solve_riccati, SolvedModel};
pub use verify::{
    adversarial_gain, final_layer_alpha, gain_ratio, lemma_oracle_batch, past_cost_oracle,
    simulate_closed_loop, simulate_with_signals, worst_y_bruteforce, AdversarialPlan,
    DisturbancePlan, OracleResult, PlanKind,
};
