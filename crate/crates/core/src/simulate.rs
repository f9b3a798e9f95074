//! Seeded forward sampling and estimator recovery experiments.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64(seed)`. A Bernoulli(p)
//! draw takes the top 53 bits of one `next_u64`, scales them into [0, 1) and
//! compares with `< p`. For each record, variables are visited in topological
//! order: an exogenous variable takes one draw at its base rate; an endogenous
//! one first takes one draw per incoming edge, in the order the edges were
//! declared, for that edge's q bit, then evaluates its gate.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Result;
use crate::estimation::{estimate_power, Dataset, PowerEstimate, PowerKind, Reason, Status};
use crate::inference::{direct_power, total_power};
use crate::intervention::intervene;
use crate::model::ChengModel;

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> bool {
    ((rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) < p
}

/// `n` records over the observed variables.
pub fn sample(model: &ChengModel, n: usize, seed: u64) -> Result<Dataset> {
    let observed: Vec<usize> = (0..model.len()).filter(|&v| model.var_at(v).is_observed()).collect();
    let mut data = Dataset::new(observed.iter().map(|&v| model.var_at(v).name.clone()).collect())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![false; model.len()];
    let mut qbits = vec![false; model.edges().len()];
    for _ in 0..n {
        for &v in model.topological_order() {
            if model.is_exogenous(v) {
                values[v] = bernoulli(&mut rng, model.var_at(v).base_rate.unwrap_or(0.0));
            } else {
                for &k in model.incoming(v) {
                    qbits[k] = bernoulli(&mut rng, model.edge(k).q);
                }
                values[v] = model.gate_value(v, &values, &qbits);
            }
        }
        let bits = observed
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (u64::from(values[v]) << i));
        data.push_bits(bits, 1.0)?;
    }
    Ok(data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub cause: String,
    pub effect: String,
    pub kind: PowerKind,
    pub true_power: f64,
    pub estimates: Vec<(u64, PowerEstimate)>,
    /// Mean absolute error over the identified estimates.
    pub mae: Option<f64>,
    /// When the cause is a deterministic copy of its parent: the same
    /// experiment after intervening to hold the cause at 1.
    pub rescue: Option<Box<RecoveryReport>>,
}

impl RecoveryReport {
    pub fn all_identified(&self) -> bool {
        self.estimates.iter().all(|(_, e)| e.is_identified())
    }
}

/// Sample `n` records per seed, estimate, and compare with the analytic power.
pub fn recovery(
    model: &ChengModel,
    cause: &str,
    effect: &str,
    kind: PowerKind,
    n: usize,
    seeds: &[u64],
) -> Result<RecoveryReport> {
    let true_power = match kind {
        PowerKind::Direct => direct_power(model, cause, effect)?.value,
        PowerKind::Total => total_power(model, cause, effect)?.value,
    };
    let mut estimates = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let data = sample(model, n, seed)?;
        estimates.push((seed, estimate_power(model, &data, cause, effect, kind)?));
    }
    let errors: Vec<f64> = estimates
        .iter()
        .filter_map(|(_, e)| e.value.map(|v| (v - true_power).abs()))
        .collect();
    let mae = (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64);
    let deterministic_cause = estimates.iter().any(|(_, e)| {
        matches!(&e.status, Status::NotIdentified(Reason::DeterministicIntermediate(v)) if v == cause)
    });
    let rescue = if deterministic_cause && model.variable(cause)?.pinned.is_none() {
        let pinned = intervene(model, cause, true)?;
        Some(Box::new(recovery(&pinned, cause, effect, kind, n, seeds)?))
    } else {
        None
    };
    Ok(RecoveryReport {
        cause: cause.to_string(),
        effect: effect.to_string(),
        kind,
        true_power,
        estimates,
        mae,
        rescue,
    })
}
