//! Exact semantics of a Cheng model by enumeration.
//!
//! [`joint`] multiplies per-variable gate probabilities (noisy-OR terms with
//! their preventers marginalised analytically). [`joint_by_enumeration`] instead
//! enumerates every exogenous draw and every q bit and evaluates the compiled
//! Boolean equations; the two must agree.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::assignment::{Assignment, Probability};
use crate::boolean::{compile, estimator_polarity, reduce_about, BoolExpr, Literal};
use crate::error::{Error, Result};
use crate::intervention::intervene_all;
use crate::model::{directed_paths, ChengModel, Path, Polarity, Scope};

/// Largest model [`joint`] will enumerate.
pub const ENUMERATION_CAP: usize = 20;
/// Largest number of exogenous variables plus q bits [`joint_by_enumeration`] will visit.
pub const QBIT_ENUMERATION_CAP: usize = 24;
/// Absolute tolerance for probability equalities.
pub const TOLERANCE: f64 = 1e-9;

/// Probability of each of the `2^n` assignments. Bit `i` of a cell index is
/// the value of `variables[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    variables: Vec<String>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(variables: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << variables.len() {
            return Err(Error::Mismatch);
        }
        Ok(JointTable { variables, probs })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probs_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn mask(&self, a: &Assignment) -> Result<(usize, usize)> {
        let mut mask = 0;
        let mut bits = 0;
        for (name, value) in a.iter() {
            let c = self.column(name)?;
            mask |= 1 << c;
            if value {
                bits |= 1 << c;
            }
        }
        Ok((mask, bits))
    }

    /// Mass of the event `a`.
    pub fn marginal(&self, a: &Assignment) -> Result<f64> {
        let (mask, bits) = self.mask(a)?;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == bits)
            .map(|(_, p)| p)
            .sum())
    }

    /// `P(event | given)`, undefined when `given` has zero mass.
    pub fn probability(&self, event: &Assignment, given: &Assignment) -> Result<Probability> {
        let den = self.marginal(given)?;
        let Some(both) = event.merged(given) else {
            self.mask(event)?;
            return Ok(Probability::ratio(0.0, den));
        };
        let num = self.marginal(&both)?;
        Ok(Probability::ratio(num, den))
    }

    /// Assignment columns followed by a `probability` column, one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = self.variables.join(",");
        out.push_str(",probability\n");
        for (i, p) in self.probs.iter().enumerate() {
            for c in 0..self.variables.len() {
                let _ = write!(out, "{},", i >> c & 1);
            }
            let _ = writeln!(out, "{p}");
        }
        out
    }
}

fn check_size(model: &ChengModel) -> Result<()> {
    if model.len() > ENUMERATION_CAP {
        return Err(Error::TooLarge {
            size: model.len(),
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

fn bit(cell: usize, v: usize) -> bool {
    cell >> v & 1 == 1
}

/// `(P(v=0), P(v=1))` for endogenous `v` given the parent values in `cell`.
/// Both are summed directly so structurally impossible values come out exactly 0.
fn gate_distribution(model: &ChengModel, v: usize, cell: usize) -> (f64, f64) {
    let incoming = model.incoming(v);
    let fac: Vec<usize> = incoming
        .iter()
        .copied()
        .filter(|&k| model.edge(k).polarity == Polarity::Facilitating && bit(cell, model.edge_source(k)))
        .collect();
    if fac.is_empty() {
        return (1.0, 0.0);
    }
    let prev: Vec<usize> = incoming
        .iter()
        .copied()
        .filter(|&k| model.edge(k).is_preventive() && bit(cell, model.edge_source(k)))
        .collect();
    let mut p0 = 0.0;
    let mut p1 = 0.0;
    for fired in 0usize..1 << prev.len() {
        let mut w = 1.0;
        for (b, &j) in prev.iter().enumerate() {
            let q = model.edge(j).q;
            w *= if fired >> b & 1 == 1 { q } else { 1.0 - q };
        }
        if w == 0.0 {
            continue;
        }
        let mut none = 1.0;
        for &i in &fac {
            let blocked = prev
                .iter()
                .enumerate()
                .any(|(b, &j)| fired >> b & 1 == 1 && model.covers(j, i));
            if !blocked {
                none *= 1.0 - model.edge(i).q;
            }
        }
        p0 += w * none;
        p1 += w * (1.0 - none);
    }
    (p0, p1)
}

fn local_factor(model: &ChengModel, v: usize, cell: usize) -> f64 {
    let value = bit(cell, v);
    match model.var_at(v).base_rate {
        Some(b) if model.is_exogenous(v) => {
            if value {
                b
            } else {
                1.0 - b
            }
        }
        _ => {
            let (p0, p1) = gate_distribution(model, v, cell);
            if value {
                p1
            } else {
                p0
            }
        }
    }
}

/// Markov-factorised joint distribution of all model variables.
pub fn joint(model: &ChengModel) -> Result<JointTable> {
    check_size(model)?;
    let n = model.len();
    let order = model.topological_order();
    let probs = (0..1usize << n)
        .map(|cell| {
            let mut p = 1.0;
            for &v in order {
                p *= local_factor(model, v, cell);
                if p == 0.0 {
                    break;
                }
            }
            p
        })
        .collect();
    JointTable::new(model.names().map(str::to_string).collect(), probs)
}

/// Index-resolved form of a compiled equation for the enumeration loop.
enum Lowered {
    Var(usize),
    Q(usize),
    Sum(Vec<Lowered>),
    Product(Vec<Lowered>),
    Not(Box<Lowered>),
}

impl Lowered {
    fn from_expr(model: &ChengModel, expr: &BoolExpr) -> Result<Lowered> {
        Ok(match expr {
            BoolExpr::Var(v) => Lowered::Var(model.index_of(v)?),
            BoolExpr::Q(id) => Lowered::Q(
                model
                    .edge_index(id)
                    .ok_or_else(|| Error::MissingLiteral(Literal::Q(id.clone()).to_string()))?,
            ),
            BoolExpr::Sum(c) => Lowered::Sum(c.iter().map(|x| Self::from_expr(model, x)).collect::<Result<_>>()?),
            BoolExpr::Product(c) => {
                Lowered::Product(c.iter().map(|x| Self::from_expr(model, x)).collect::<Result<_>>()?)
            }
            BoolExpr::Complement(c) => Lowered::Not(Box::new(Self::from_expr(model, c)?)),
        })
    }

    fn eval(&self, values: &[bool], qbits: usize) -> bool {
        match self {
            Lowered::Var(v) => values[*v],
            Lowered::Q(k) => qbits >> k & 1 == 1,
            Lowered::Sum(c) => c.iter().any(|x| x.eval(values, qbits)),
            Lowered::Product(c) => c.iter().all(|x| x.eval(values, qbits)),
            Lowered::Not(c) => !c.eval(values, qbits),
        }
    }
}

/// The joint obtained by enumerating every exogenous draw and every q bit,
/// evaluating the compiled equations for each configuration.
pub fn joint_by_enumeration(model: &ChengModel) -> Result<JointTable> {
    check_size(model)?;
    let n = model.len();
    let exo: Vec<usize> = (0..n).filter(|&v| model.is_exogenous(v)).collect();
    let m = model.edges().len();
    let size = exo.len() + m;
    if size > QBIT_ENUMERATION_CAP {
        return Err(Error::TooLarge {
            size,
            cap: QBIT_ENUMERATION_CAP,
        });
    }
    let equations: Vec<(usize, Lowered)> = model
        .topological_order()
        .iter()
        .filter(|&&v| !model.is_exogenous(v))
        .map(|&v| Ok((v, Lowered::from_expr(model, &compile(model, &model.var_at(v).name)?)?)))
        .collect::<Result<_>>()?;

    let mut probs = vec![0.0; 1 << n];
    let mut values = vec![false; n];
    for draw in 0usize..1 << exo.len() {
        let mut w_exo = 1.0;
        for (b, &v) in exo.iter().enumerate() {
            let on = draw >> b & 1 == 1;
            values[v] = on;
            let base = model.var_at(v).base_rate.unwrap_or(0.0);
            w_exo *= if on { base } else { 1.0 - base };
        }
        if w_exo == 0.0 {
            continue;
        }
        for qbits in 0usize..1 << m {
            let mut w = w_exo;
            for k in 0..m {
                let q = model.edge(k).q;
                w *= if qbits >> k & 1 == 1 { q } else { 1.0 - q };
            }
            if w == 0.0 {
                continue;
            }
            for (v, eq) in &equations {
                values[*v] = eq.eval(&values, qbits);
            }
            let cell = values
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
            probs[cell] += w;
        }
    }
    JointTable::new(model.names().map(str::to_string).collect(), probs)
}

/// `P(event | given)` under the model.
pub fn probability(model: &ChengModel, event: &Assignment, given: &Assignment) -> Result<Probability> {
    for name in event.names().chain(given.names()) {
        model.index_of(name)?;
    }
    joint(model)?.probability(event, given)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport {
    /// Largest `|P(x) - Π P(x_v | x_pa(v))|` with conditionals read off the table.
    pub max_factorization_error: f64,
    /// Largest deviation of the exogenous joint from the product of its marginals.
    pub max_exogenous_dependence: f64,
    /// Largest deviation of table conditionals from the model's gate parameters.
    pub max_parameter_error: f64,
    pub total_mass: f64,
}

impl MarkovReport {
    pub fn passes(&self) -> bool {
        self.max_factorization_error <= TOLERANCE
            && self.max_exogenous_dependence <= TOLERANCE
            && self.max_parameter_error <= TOLERANCE
            && (self.total_mass - 1.0).abs() <= TOLERANCE
    }
}

/// Check that `table` factorises according to the model's graph and matches
/// the model's local parameters.
pub fn markov_check(model: &ChengModel, table: &JointTable) -> Result<MarkovReport> {
    let n = model.len();
    if table.variables().len() != n {
        return Err(Error::Mismatch);
    }
    // model variable index -> table column
    let col: Vec<usize> = model
        .names()
        .map(|name| table.column(name).map_err(|_| Error::Mismatch))
        .collect::<Result<_>>()?;
    let to_model_cell = |cell: usize| (0..n).fold(0usize, |acc, v| acc | (usize::from(bit(cell, col[v])) << v));

    let probs: Vec<f64> = {
        let mut p = vec![0.0; 1 << n];
        for (cell, &x) in table.probs().iter().enumerate() {
            p[to_model_cell(cell)] = x;
        }
        p
    };
    let total_mass: f64 = probs.iter().sum();

    // Family marginals: mass of (v, parents) and of parents alone, per cell.
    let parents: Vec<usize> = (0..n)
        .map(|v| {
            model
                .incoming(v)
                .iter()
                .fold(0usize, |acc, &k| acc | 1 << model.edge_source(k))
        })
        .collect();
    let sum_where = |mask: usize, bits: usize| -> f64 {
        probs
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == bits)
            .map(|(_, p)| p)
            .sum()
    };
    let mut family_cache: Vec<std::collections::HashMap<usize, f64>> = vec![Default::default(); n];
    let mut parent_cache: Vec<std::collections::HashMap<usize, f64>> = vec![Default::default(); n];

    let mut max_factorization_error: f64 = 0.0;
    let mut max_parameter_error: f64 = 0.0;
    for (cell, &p) in probs.iter().enumerate() {
        let mut product = 1.0;
        for v in 0..n {
            let pa = parents[v];
            let fam = pa | 1 << v;
            let pa_mass = *parent_cache[v].entry(cell & pa).or_insert_with(|| sum_where(pa, cell & pa));
            let fam_mass = *family_cache[v].entry(cell & fam).or_insert_with(|| sum_where(fam, cell & fam));
            if pa_mass <= 0.0 {
                product = 0.0;
                break;
            }
            let conditional = fam_mass / pa_mass;
            product *= conditional;
            let expected = local_factor(model, v, cell);
            max_parameter_error = max_parameter_error.max((conditional - expected).abs());
        }
        max_factorization_error = max_factorization_error.max((p - product).abs());
    }

    let exo: Vec<usize> = (0..n).filter(|&v| model.is_exogenous(v)).collect();
    let exo_mask = exo.iter().fold(0usize, |acc, &v| acc | 1 << v);
    let marg: Vec<f64> = exo.iter().map(|&v| sum_where(1 << v, 1 << v)).collect();
    let mut max_exogenous_dependence: f64 = 0.0;
    for draw in 0usize..1 << exo.len() {
        let mut bits = 0;
        let mut product = 1.0;
        for (b, &v) in exo.iter().enumerate() {
            if draw >> b & 1 == 1 {
                bits |= 1 << v;
                product *= marg[b];
            } else {
                product *= 1.0 - marg[b];
            }
        }
        let mass = sum_where(exo_mask, bits);
        max_exogenous_dependence = max_exogenous_dependence.max((mass - product).abs());
    }

    Ok(MarkovReport {
        max_factorization_error,
        max_exogenous_dependence,
        max_parameter_error,
        total_mass,
    })
}

/// An analytic causal power together with the direction it acts in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPower {
    pub value: f64,
    pub polarity: Polarity,
}

fn effect_probability(model: &ChengModel, effect: &str, settings: &Assignment) -> Result<f64> {
    let m = intervene_all(model, settings)?;
    let p = probability(&m, &Assignment::new().with(effect, true), &Assignment::new())?;
    Ok(p.value().unwrap_or(0.0))
}

fn check_routes(what: &str, left: f64, right: f64) -> Result<()> {
    if (left - right).abs() > TOLERANCE {
        return Err(Error::RouteMismatch {
            what: what.to_string(),
            left,
            right,
        });
    }
    Ok(())
}

/// The q of the edge `cause -> effect`, cross-checked against the effect
/// probability with the cause switched on and the other inputs of the gate
/// switched off (for a preventer: its covered facilitators switched on).
pub fn direct_power(model: &ChengModel, cause: &str, effect: &str) -> Result<AnalyticPower> {
    let c = model.index_of(cause)?;
    let e = model.index_of(effect)?;
    let k = model
        .edge_between(cause, effect)
        .ok_or_else(|| Error::NoDirectEdge(cause.to_string(), effect.to_string()))?;
    let edge = model.edge(k);
    let mut others = Assignment::new();
    for &j in model.incoming(e) {
        let s = model.edge_source(j);
        if s == c {
            continue;
        }
        let on = edge.is_preventive() && model.covers(k, j);
        others.set(model.var_at(s).name.clone(), on);
    }
    match edge.polarity {
        Polarity::Facilitating => {
            let p1 = effect_probability(model, effect, &others.clone().with(cause, true))?;
            check_routes("direct power", edge.q, p1)?;
        }
        Polarity::Preventive => {
            let p1 = effect_probability(model, effect, &others.clone().with(cause, true))?;
            let p0 = effect_probability(model, effect, &others.with(cause, false))?;
            if p0 > 0.0 {
                check_routes("direct preventive power", edge.q, (p0 - p1) / p0)?;
            }
        }
    }
    Ok(AnalyticPower {
        value: edge.q,
        polarity: edge.polarity,
    })
}

/// Causes of `effect` that `cause` does not influence: ancestors of the effect
/// that are neither the cause nor its descendants.
pub(crate) fn uninfluenced_causes(model: &ChengModel, c: usize, e: usize) -> Vec<usize> {
    let desc = model.descendants(c);
    let mut v: Vec<usize> = model
        .ancestors(e)
        .into_iter()
        .filter(|&x| x != c && !desc.contains(&x))
        .collect();
    v.sort_unstable();
    v
}

/// Which formula a (cause, effect) pair calls for, read off the reduced equation.
pub fn power_polarity(model: &ChengModel, cause: &str, effect: &str, fixed: &Assignment) -> Result<Polarity> {
    let expr = reduce_about(model, cause, effect, fixed)?;
    Ok(estimator_polarity(&expr, cause))
}

/// Total causal power by its conditional definition.
///
/// Facilitating: `P(effect = 1)` with the cause switched on and every cause of
/// the effect that the cause does not influence switched off. Preventive: the
/// fraction of the effect removed by switching the cause on,
/// `(P(e | do(c=0)) - P(e | do(c=1))) / P(e | do(c=0))`.
///
/// When the path rule applies ([`total_power_by_paths`]) the two routes are
/// compared and a disagreement is reported as [`Error::RouteMismatch`].
pub fn total_power(model: &ChengModel, cause: &str, effect: &str) -> Result<AnalyticPower> {
    let value = total_power_by_definition(model, cause, effect)?;
    if let Some(paths) = total_power_by_paths(model, cause, effect)? {
        check_routes("total power", value.value, paths.value)?;
    }
    Ok(value)
}

pub fn total_power_by_definition(model: &ChengModel, cause: &str, effect: &str) -> Result<AnalyticPower> {
    let c = model.index_of(cause)?;
    let e = model.index_of(effect)?;
    if directed_paths(model, cause, effect)?.is_empty() {
        return Err(Error::NoPath(cause.to_string(), effect.to_string()));
    }
    let polarity = power_polarity(model, cause, effect, &Assignment::new())?;
    let value = match polarity {
        Polarity::Facilitating => {
            let mut off = Assignment::new();
            for z in uninfluenced_causes(model, c, e) {
                off.set(model.var_at(z).name.clone(), false);
            }
            let p1 = effect_probability(model, effect, &off.clone().with(cause, true))?;
            let p0 = effect_probability(model, effect, &off.with(cause, false))?;
            if p0 >= 1.0 {
                return Err(Error::Undefined(format!("{effect} certain without {cause}")));
            }
            (p1 - p0) / (1.0 - p0)
        }
        Polarity::Preventive => {
            let p1 = effect_probability(model, effect, &Assignment::new().with(cause, true))?;
            let p0 = effect_probability(model, effect, &Assignment::new().with(cause, false))?;
            if p0 <= 0.0 {
                return Err(Error::Undefined(format!("{effect} impossible without {cause}")));
            }
            (p0 - p1) / p0
        }
    };
    Ok(AnalyticPower { value, polarity })
}

/// Probability of a Boolean combination of path products over independent q bits.
fn path_probability<F>(model: &ChengModel, edges: &[usize], holds: F) -> Result<f64>
where
    F: Fn(&dyn Fn(usize) -> bool) -> bool,
{
    if edges.len() > QBIT_ENUMERATION_CAP {
        return Err(Error::TooLarge {
            size: edges.len(),
            cap: QBIT_ENUMERATION_CAP,
        });
    }
    let mut total = 0.0;
    for bits in 0usize..1 << edges.len() {
        let on = |k: usize| {
            let pos = edges.iter().position(|&x| x == k).expect("edge enumerated");
            bits >> pos & 1 == 1
        };
        if !holds(&on) {
            continue;
        }
        let mut w = 1.0;
        for (b, &k) in edges.iter().enumerate() {
            let q = model.edge(k).q;
            w *= if bits >> b & 1 == 1 { q } else { 1.0 - q };
        }
        total += w;
    }
    Ok(total)
}

/// Total causal power by the path rule: the probability of the Boolean sum
/// over directed paths of the product of their q bits.
///
/// Facilitating paths contribute their products; a path whose only preventive
/// edge is its last one gates the facilitating paths whose last edge it covers.
/// A path with a preventive edge anywhere else is dropped, which is exact only
/// when that preventer gates nothing the cause can switch on. Returns `None`
/// when the rule does not apply to the model.
pub fn total_power_by_paths(model: &ChengModel, cause: &str, effect: &str) -> Result<Option<AnalyticPower>> {
    let c = model.index_of(cause)?;
    let paths = directed_paths(model, cause, effect)?;
    if paths.is_empty() {
        return Err(Error::NoPath(cause.to_string(), effect.to_string()));
    }
    let polarity = power_polarity(model, cause, effect, &Assignment::new())?;
    let desc = model.descendants(c);
    let from_cause = |v: usize| v == c || desc.contains(&v);

    let mut fac: Vec<&Path> = Vec::new();
    let mut gated: Vec<&Path> = Vec::new();
    let mut dropped: Vec<&Path> = Vec::new();
    for p in &paths {
        let positions: Vec<usize> = (0..p.len()).filter(|&i| model.edge(p[i]).is_preventive()).collect();
        match positions.as_slice() {
            [] => fac.push(p),
            [last] if *last == p.len() - 1 => gated.push(p),
            _ => dropped.push(p),
        }
    }

    match polarity {
        Polarity::Facilitating => {
            if fac.is_empty() {
                return Ok(None);
            }
            for p in &dropped {
                for &k in &p[..p.len() - 1] {
                    if !model.edge(k).is_preventive() {
                        continue;
                    }
                    let g = model.edge_target(k);
                    let live = model
                        .incoming(g)
                        .iter()
                        .any(|&i| model.covers(k, i) && from_cause(model.edge_source(i)));
                    if live {
                        return Ok(None);
                    }
                }
            }
        }
        Polarity::Preventive => {
            if !fac.is_empty() || !dropped.is_empty() || gated.is_empty() {
                return Ok(None);
            }
            for p in &gated {
                let last = *p.last().expect("non-empty path");
                if model.edge(last).scope != Scope::All {
                    return Ok(None);
                }
                for &k in &p[..p.len() - 1] {
                    let x = model.edge_target(k);
                    if model.ancestors(x).iter().any(|&a| !from_cause(a)) {
                        return Ok(None);
                    }
                }
            }
        }
    }

    let mut edges: Vec<usize> = fac
        .iter()
        .chain(gated.iter())
        .flat_map(|p| p.iter().copied())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    edges.sort_unstable();
    let all_on = |p: &Path, on: &dyn Fn(usize) -> bool| p.iter().all(|&k| on(k));

    let value = match polarity {
        Polarity::Facilitating => path_probability(model, &edges, |on| {
            fac.iter().any(|p| {
                let last = *p.last().expect("non-empty path");
                all_on(p, on)
                    && !gated
                        .iter()
                        .any(|g| model.covers(*g.last().expect("non-empty path"), last) && all_on(g, on))
            })
        })?,
        Polarity::Preventive => path_probability(model, &edges, |on| gated.iter().any(|g| all_on(g, on)))?,
    };
    Ok(Some(AnalyticPower { value, polarity }))
}
