//! Causal power from frequency data.
//!
//! A facilitating power is `ΔP / (1 - P(e | c=0))`, a preventive power
//! `-ΔP / P(e | c=0)`, both computed within a conditioning stratum. Which one
//! applies, and which stratum, is read off the model; whether the model lets
//! the power be recovered at all is decided by [`identifiability`].

mod dataset;

pub use dataset::{exact_frequencies, Dataset, Record, MAX_COLUMNS};

use std::fmt;

use crate::assignment::{Assignment, Probability};
use crate::boolean::reduce_given;
use crate::error::{Error, Result};
use crate::inference::{power_polarity, uninfluenced_causes};
use crate::model::{directed_paths, influence_class, ChengModel, EdgeId, Polarity};

/// Estimates this close outside [0, 1] are treated as rounding, not misfit.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Direct,
    Total,
}

impl fmt::Display for PowerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerKind::Direct => f.write_str("direct"),
            PowerKind::Total => f.write_str("total"),
        }
    }
}

/// Why a power cannot be estimated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// A variable on a cause-effect path is a copy of its single parent.
    DeterministicIntermediate(String),
    /// A facilitating edge on a path is gated by an unobserved preventer.
    HiddenPreventer { preventer: String, edge: EdgeId },
    /// The formula produced a value outside [0, 1].
    ModelMisfit,
    /// An intervened cause has no structurally known cause-absent baseline.
    NoBaseline,
}

impl Reason {
    pub fn detail(&self) -> String {
        match self {
            Reason::DeterministicIntermediate(v) => format!("{v} is determined by its only parent"),
            Reason::HiddenPreventer { preventer, edge } => {
                format!("unobserved {preventer} prevents edge {edge}")
            }
            Reason::ModelMisfit => "estimate outside [0,1]".to_string(),
            Reason::NoBaseline => "cause-absent stratum is not structurally empty of the effect".to_string(),
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::DeterministicIntermediate(_) => f.write_str("deterministic intermediate"),
            Reason::HiddenPreventer { .. } => f.write_str("hidden preventer on pathway"),
            Reason::ModelMisfit => f.write_str("model misfit"),
            Reason::NoBaseline => f.write_str("no baseline under intervention"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Identifiability {
    Identified,
    NotIdentified(Reason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Identified,
    NotIdentified(Reason),
    Undefined(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Identified => f.write_str("Identified"),
            Status::NotIdentified(r) => write!(f, "NotIdentified: {r}"),
            Status::Undefined(r) => write!(f, "Undefined: {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerEstimate {
    /// Present iff `status` is `Identified`.
    pub value: Option<f64>,
    /// Output of the formula whenever it could be evaluated.
    pub raw: Option<f64>,
    /// Set by [`estimate_power`]; `None` when an estimator is called directly.
    pub kind: Option<PowerKind>,
    pub polarity: Polarity,
    pub conditioning: Assignment,
    pub status: Status,
    pub delta_p: Option<f64>,
}

impl PowerEstimate {
    fn not_identified(reason: Reason, polarity: Polarity, conditioning: Assignment) -> Self {
        PowerEstimate {
            value: None,
            raw: None,
            kind: None,
            polarity,
            conditioning,
            status: Status::NotIdentified(reason),
            delta_p: None,
        }
    }

    fn undefined(reason: &str, polarity: Polarity, conditioning: Assignment, delta_p: Option<f64>) -> Self {
        PowerEstimate {
            value: None,
            raw: None,
            kind: None,
            polarity,
            conditioning,
            status: Status::Undefined(reason.to_string()),
            delta_p,
        }
    }

    fn from_raw(raw: f64, polarity: Polarity, conditioning: Assignment, delta_p: f64) -> Self {
        let in_range = (-ROUNDING_SLACK..=1.0 + ROUNDING_SLACK).contains(&raw);
        PowerEstimate {
            value: in_range.then(|| raw.clamp(0.0, 1.0)),
            raw: Some(raw),
            kind: None,
            polarity,
            conditioning,
            status: if in_range {
                Status::Identified
            } else {
                Status::NotIdentified(Reason::ModelMisfit)
            },
            delta_p: Some(delta_p),
        }
    }

    pub fn is_identified(&self) -> bool {
        self.status == Status::Identified
    }
}

fn strata(data: &Dataset, c: &str, e: &str, cond: &Assignment) -> Result<(Probability, Probability)> {
    data.column(c)?;
    data.column(e)?;
    let event = Assignment::new().with(e, true);
    let with = cond.clone().with(c, true);
    let without = cond.clone().with(c, false);
    Ok((data.conditional(&event, &with)?, data.conditional(&event, &without)?))
}

/// `P(e=1 | c=1, cond) - P(e=1 | c=0, cond)`; `None` when a stratum is empty.
pub fn delta_p(data: &Dataset, c: &str, e: &str, cond: &Assignment) -> Result<Option<f64>> {
    let (p1, p0) = strata(data, c, e, cond)?;
    Ok(match (p1, p0) {
        (Probability::Defined(a), Probability::Defined(b)) => Some(a - b),
        _ => None,
    })
}

/// `ΔP / (1 - P(e=1 | c=0, cond))`.
pub fn estimate_facilitating(data: &Dataset, c: &str, e: &str, cond: &Assignment) -> Result<PowerEstimate> {
    let (p1, p0) = strata(data, c, e, cond)?;
    let (Probability::Defined(p1), Probability::Defined(p0)) = (p1, p0) else {
        return Ok(PowerEstimate::undefined("empty stratum", Polarity::Facilitating, cond.clone(), None));
    };
    let dp = p1 - p0;
    if 1.0 - p0 <= 0.0 {
        return Ok(PowerEstimate::undefined("ceiling effect", Polarity::Facilitating, cond.clone(), Some(dp)));
    }
    Ok(PowerEstimate::from_raw(dp / (1.0 - p0), Polarity::Facilitating, cond.clone(), dp))
}

/// `-ΔP / P(e=1 | f=0, cond)`.
pub fn estimate_preventive(data: &Dataset, f: &str, e: &str, cond: &Assignment) -> Result<PowerEstimate> {
    let (p1, p0) = strata(data, f, e, cond)?;
    let (Probability::Defined(p1), Probability::Defined(p0)) = (p1, p0) else {
        return Ok(PowerEstimate::undefined("empty stratum", Polarity::Preventive, cond.clone(), None));
    };
    let dp = p1 - p0;
    if p0 <= 0.0 {
        return Ok(PowerEstimate::undefined("floor effect", Polarity::Preventive, cond.clone(), Some(dp)));
    }
    Ok(PowerEstimate::from_raw(-dp / p0, Polarity::Preventive, cond.clone(), dp))
}

/// Observed causes of `e` that `c` does not influence, each held at 0.
pub fn conditioning_set(model: &ChengModel, c: &str, e: &str) -> Result<Assignment> {
    let ci = model.index_of(c)?;
    let ei = model.index_of(e)?;
    Ok(uninfluenced_causes(model, ci, ei)
        .into_iter()
        .map(|x| model.var_at(x))
        .filter(|v| v.is_observed())
        .map(|v| (v.name.clone(), false))
        .collect())
}

fn is_deterministic(model: &ChengModel, v: usize) -> bool {
    let incoming = model.incoming(v);
    let facs: Vec<usize> = incoming
        .iter()
        .copied()
        .filter(|&k| model.edge(k).polarity == Polarity::Facilitating)
        .collect();
    facs.len() == 1 && model.edge(facs[0]).q == 1.0 && incoming.len() == 1
}

/// Whether the power of `c` on `e` can be recovered from the observed joint.
///
/// Fails when a variable on some `c -> e` path (the cause included, the effect
/// excluded) is a q=1 copy of its single parent, or when a facilitating edge on
/// some path is covered by an unobserved preventer of its target.
pub fn identifiability(model: &ChengModel, c: &str, e: &str) -> Result<Identifiability> {
    let paths = directed_paths(model, c, e)?;
    let mut on_path: Vec<usize> = paths
        .iter()
        .flat_map(|p| p.iter().map(|&k| model.edge_source(k)))
        .collect();
    on_path.sort_unstable();
    on_path.dedup();
    let topo_pos = |v: usize| model.topological_order().iter().position(|&x| x == v);
    on_path.sort_by_key(|&v| topo_pos(v));
    for &v in &on_path {
        if !model.is_exogenous(v) && is_deterministic(model, v) {
            return Ok(Identifiability::NotIdentified(Reason::DeterministicIntermediate(
                model.var_at(v).name.clone(),
            )));
        }
    }
    let mut edges: Vec<usize> = paths.iter().flatten().copied().collect();
    edges.sort_unstable();
    edges.dedup();
    for &k in &edges {
        if model.edge(k).is_preventive() {
            continue;
        }
        let g = model.edge_target(k);
        for &j in model.incoming(g) {
            let src = model.var_at(model.edge_source(j));
            if model.covers(j, k) && !src.is_observed() {
                return Ok(Identifiability::NotIdentified(Reason::HiddenPreventer {
                    preventer: src.name.clone(),
                    edge: model.edge(k).id(),
                }));
            }
        }
    }
    Ok(Identifiability::Identified)
}

fn check_data(model: &ChengModel, data: &Dataset, c: &str, e: &str) -> Result<()> {
    for col in data.columns() {
        let v = model
            .variable(col)
            .map_err(|_| Error::DataModelMismatch(format!("column {col} is not a model variable")))?;
        if !v.is_observed() {
            return Err(Error::DataModelMismatch(format!("column {col} is unobserved in the model")));
        }
    }
    for name in [c, e] {
        let v = model.variable(name)?;
        if !v.is_observed() {
            return Err(Error::DataModelMismatch(format!("{name} is unobserved in the model")));
        }
        if !data.has_column(name) {
            return Err(Error::DataModelMismatch(format!("dataset has no column {name}")));
        }
    }
    Ok(())
}

/// Estimate the direct or total power of `c` on `e` from `data`, choosing the
/// stratum and the formula from the model.
///
/// A cause that was pinned at 1 by an intervention has no cause-absent records.
/// If the effect's equation is identically 0 with the cause and the stratum
/// variables switched off, the missing baseline is known to be 0 and the power
/// is the effect frequency in the stratum; otherwise it is not identified.
pub fn estimate_power(
    model: &ChengModel,
    data: &Dataset,
    c: &str,
    e: &str,
    kind: PowerKind,
) -> Result<PowerEstimate> {
    check_data(model, data, c, e)?;
    let mut cond = conditioning_set(model, c, e)?;
    if kind == PowerKind::Direct {
        if model.edge_between(c, e).is_none() {
            return Err(Error::NoDirectEdge(c.to_string(), e.to_string()));
        }
        let ei = model.index_of(e)?;
        for &k in model.incoming(ei) {
            let v = model.var_at(model.edge_source(k));
            if v.name != c && v.is_observed() {
                cond.set(v.name.clone(), false);
            }
        }
    }
    for name in cond.names() {
        if !data.has_column(name) {
            return Err(Error::DataModelMismatch(format!("dataset has no column {name}")));
        }
    }

    let mut estimate = match identifiability(model, c, e)? {
        Identifiability::NotIdentified(reason) => {
            let polarity = influence_class(model, c, e)?.net.unwrap_or(Polarity::Facilitating);
            PowerEstimate::not_identified(reason, polarity, cond)
        }
        Identifiability::Identified => match model.variable(c)?.pinned {
            Some(_) => estimate_pinned(model, data, c, e, cond)?,
            None => match power_polarity(model, c, e, &cond)? {
                Polarity::Facilitating => estimate_facilitating(data, c, e, &cond)?,
                Polarity::Preventive => estimate_preventive(data, c, e, &cond)?,
            },
        },
    };
    estimate.kind = Some(kind);
    Ok(estimate)
}

fn estimate_pinned(model: &ChengModel, data: &Dataset, c: &str, e: &str, cond: Assignment) -> Result<PowerEstimate> {
    let net = influence_class(model, c, e)?.net;
    if net != Some(Polarity::Facilitating) {
        return Ok(PowerEstimate::not_identified(Reason::NoBaseline, Polarity::Preventive, cond));
    }
    let baseline = reduce_given(model, e, &cond.clone().with(c, false))?;
    if !baseline.is_false() {
        return Ok(PowerEstimate::not_identified(Reason::NoBaseline, Polarity::Facilitating, cond));
    }
    let p1 = data.conditional(&Assignment::new().with(e, true), &cond.clone().with(c, true))?;
    Ok(match p1 {
        Probability::Defined(p) => PowerEstimate::from_raw(p, Polarity::Facilitating, cond, p),
        Probability::Undefined => PowerEstimate::undefined("empty stratum", Polarity::Facilitating, cond, None),
    })
}
