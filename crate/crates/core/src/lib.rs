//! Causal power in noisy-OR / noisy-AND Bayes nets.
//!
//! A [`ChengModel`] is a DAG of binary variables whose edges either facilitate
//! their target (noisy-OR) or prevent it (noisy-AND-NOT), each with its own
//! causal power `q`. The crate compiles models to Boolean equations, computes
//! exact joints and powers, applies interventions, estimates powers from
//! weighted frequency data, and converts to and from Rubin's sufficient
//! component-cause model.

pub mod assignment;
pub mod attribution;
pub mod boolean;
pub mod error;
pub mod estimation;
pub mod fixtures;
pub mod inference;
pub mod intervention;
pub mod model;
pub mod rubin;
pub mod simulate;

pub use assignment::{Assignment, Probability};
pub use attribution::{forecast_removal, paf, prob_causation};
pub use boolean::{
    compile, estimator_polarity, outer_form, reduce, reduce_about, reduce_given, BoolExpr, Literal, OuterForm,
};
pub use error::{Error, Result};
pub use estimation::{
    conditioning_set, delta_p, estimate_facilitating, estimate_power, estimate_preventive, exact_frequencies,
    identifiability, Dataset, Identifiability, PowerEstimate, PowerKind, Reason, Status,
};
pub use inference::{
    direct_power, joint, joint_by_enumeration, markov_check, probability, total_power, AnalyticPower, JointTable,
    MarkovReport,
};
pub use intervention::{intervene, intervene_all};
pub use model::{
    build_model, parse_model, validate, write_model, ChengModel, Edge, EdgeId, ModelSpec, Observability, Polarity,
    Scope, Variable,
};
pub use rubin::{cheng_to_rubin, independence_residual, rubin_prob_e, rubin_to_cheng, RubinModel};
pub use simulate::{recovery, sample, RecoveryReport};
