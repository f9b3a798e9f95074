//! Cheng models: labeled DAGs of binary variables whose edges are noisy-OR
//! (facilitating) or noisy-AND (preventive) gates with independent q parameters.
//!
//! A [`ModelSpec`] is an unchecked description; [`build_model`] validates it and
//! produces an immutable [`ChengModel`]. [`validate`] lists every problem with a
//! description instead of stopping at the first.

mod format;
mod paths;

pub use format::{parse_model, write_model};
pub use paths::{directed_paths, influence_class, Influence, InfluenceClass, Path};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observability {
    Observed,
    Unobserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Facilitating,
    Preventive,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Facilitating => write!(f, "facilitating"),
            Polarity::Preventive => write!(f, "preventive"),
        }
    }
}

/// Identifies an edge by its endpoints; rendered `SRC>DST` as in scope lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub source: String,
    pub target: String,
}

impl EdgeId {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        EdgeId {
            source: source.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.source, self.target)
    }
}

/// Which facilitating edges into its target a preventive edge interferes with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    All,
    Edges(Vec<EdgeId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub observability: Observability,
    /// Present exactly for exogenous variables.
    pub base_rate: Option<f64>,
    /// Set by an intervention: the variable is held at this value.
    pub pinned: Option<bool>,
}

impl Variable {
    pub fn is_observed(&self) -> bool {
        self.observability == Observability::Observed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub polarity: Polarity,
    pub q: f64,
    pub scope: Scope,
}

impl Edge {
    pub fn id(&self) -> EdgeId {
        EdgeId::new(&self.source, &self.target)
    }

    pub fn is_preventive(&self) -> bool {
        self.polarity == Polarity::Preventive
    }
}

/// Unvalidated model description, as read from a model file or assembled in code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSpec {
    pub variables: Vec<Variable>,
    pub edges: Vec<Edge>,
}

impl ModelSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(mut self, name: &str, observability: Observability, base_rate: Option<f64>) -> Self {
        self.variables.push(Variable {
            name: name.to_string(),
            observability,
            base_rate,
            pinned: None,
        });
        self
    }

    pub fn observed(self, name: &str, base_rate: Option<f64>) -> Self {
        self.var(name, Observability::Observed, base_rate)
    }

    pub fn unobserved(self, name: &str, base_rate: Option<f64>) -> Self {
        self.var(name, Observability::Unobserved, base_rate)
    }

    pub fn fac(mut self, source: &str, target: &str, q: f64) -> Self {
        self.edges.push(Edge {
            source: source.to_string(),
            target: target.to_string(),
            polarity: Polarity::Facilitating,
            q,
            scope: Scope::All,
        });
        self
    }

    pub fn prev(mut self, source: &str, target: &str, q: f64, scope: Scope) -> Self {
        self.edges.push(Edge {
            source: source.to_string(),
            target: target.to_string(),
            polarity: Polarity::Preventive,
            q,
            scope,
        });
        self
    }

    pub fn build(self) -> Result<ChengModel> {
        build_model(self)
    }
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_probability(out: &mut Vec<Error>, field: String, value: f64) {
    if !(0.0..=1.0).contains(&value) {
        out.push(Error::BadProbability { field, value });
    }
}

/// Every invariant violation in `spec`; empty iff the spec builds.
pub fn validate(spec: &ModelSpec) -> Vec<Error> {
    let mut out = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();

    for (i, v) in spec.variables.iter().enumerate() {
        if !valid_identifier(&v.name) {
            out.push(Error::InvalidName(v.name.clone()));
        }
        if index.insert(v.name.as_str(), i).is_some() {
            out.push(Error::DuplicateName(v.name.clone()));
        }
        if let Some(b) = v.base_rate {
            check_probability(&mut out, format!("base({})", v.name), b);
        }
    }

    let mut indegree = vec![0usize; spec.variables.len()];
    let mut has_fac = vec![false; spec.variables.len()];
    let mut edge_ids: HashMap<EdgeId, &Edge> = HashMap::new();
    for e in &spec.edges {
        let id = e.id();
        check_probability(&mut out, format!("q({id})"), e.q);
        if e.source == e.target {
            out.push(Error::CycleDetected(e.source.clone()));
        }
        let mut known = true;
        for end in [&e.source, &e.target] {
            if !index.contains_key(end.as_str()) {
                out.push(Error::UnknownVariable(end.clone()));
                known = false;
            }
        }
        if known {
            let t = index[e.target.as_str()];
            indegree[t] += 1;
            if e.polarity == Polarity::Facilitating {
                has_fac[t] = true;
            }
        }
        if edge_ids.insert(id.clone(), e).is_some() {
            out.push(Error::DuplicateName(id.to_string()));
        }
    }

    for e in &spec.edges {
        if let Scope::Edges(members) = &e.scope {
            let dangling = e.polarity == Polarity::Facilitating
                || members.is_empty()
                || members.iter().any(|m| {
                    m.target != e.target
                        || !edge_ids
                            .get(m)
                            .is_some_and(|f| f.polarity == Polarity::Facilitating)
                });
            if dangling {
                out.push(Error::DanglingScope(e.id().to_string()));
            }
        }
    }

    for (i, v) in spec.variables.iter().enumerate() {
        if index.get(v.name.as_str()) != Some(&i) {
            continue;
        }
        match (indegree[i], v.base_rate) {
            (0, None) => out.push(Error::MissingBaseRate(v.name.clone())),
            (d, Some(_)) if d > 0 => out.push(Error::UnexpectedBaseRate(v.name.clone())),
            _ => {}
        }
        if indegree[i] > 0 && !has_fac[i] {
            out.push(Error::NoFacilitatingParent(v.name.clone()));
        }
    }

    if let Some(cycle) = find_cycle(spec, &index) {
        out.push(Error::CycleDetected(cycle));
    }
    out
}

/// Kahn's algorithm; returns the variables left on a cycle, if any.
fn find_cycle(spec: &ModelSpec, index: &HashMap<&str, usize>) -> Option<String> {
    let n = spec.variables.len();
    let mut indeg = vec![0usize; n];
    let mut out_adj = vec![Vec::new(); n];
    for e in &spec.edges {
        if let (Some(&s), Some(&t)) = (index.get(e.source.as_str()), index.get(e.target.as_str())) {
            if s != t {
                indeg[t] += 1;
                out_adj[s].push(t);
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &out_adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    if seen == n {
        None
    } else {
        let names: Vec<&str> = (0..n)
            .filter(|&i| indeg[i] > 0)
            .map(|i| spec.variables[i].name.as_str())
            .collect();
        Some(names.join(","))
    }
}

/// Validate `spec` and build the model, failing on the first violation.
pub fn build_model(spec: ModelSpec) -> Result<ChengModel> {
    if let Some(err) = validate(&spec).into_iter().next() {
        return Err(err);
    }
    Ok(ChengModel::from_valid_spec(spec))
}

/// A validated Cheng model. Immutable; every transformation returns a new value.
#[derive(Debug, Clone, PartialEq)]
pub struct ChengModel {
    variables: Vec<Variable>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    edge_src: Vec<usize>,
    edge_dst: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl ChengModel {
    fn from_valid_spec(spec: ModelSpec) -> Self {
        let ModelSpec { variables, edges } = spec;
        let index: HashMap<String, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect();
        let n = variables.len();
        let edge_src: Vec<usize> = edges.iter().map(|e| index[&e.source]).collect();
        let edge_dst: Vec<usize> = edges.iter().map(|e| index[&e.target]).collect();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (k, (&s, &t)) in edge_src.iter().zip(&edge_dst).enumerate() {
            outgoing[s].push(k);
            incoming[t].push(k);
        }
        // Kahn with lowest declaration index first, so the order is stable.
        let mut indeg: Vec<usize> = incoming.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &k in &outgoing[v] {
                let w = edge_dst[k];
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        ChengModel {
            variables,
            edges,
            index,
            edge_src,
            edge_dst,
            incoming,
            outgoing,
            topo,
        }
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            variables: self.variables.clone(),
            edges: self.edges.clone(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.variables[self.index_of(name)?])
    }

    pub fn var_at(&self, i: usize) -> &Variable {
        &self.variables[i]
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn edge_source(&self, k: usize) -> usize {
        self.edge_src[k]
    }

    pub fn edge_target(&self, k: usize) -> usize {
        self.edge_dst[k]
    }

    pub fn edge_between(&self, source: &str, target: &str) -> Option<usize> {
        let s = *self.index.get(source)?;
        let t = *self.index.get(target)?;
        self.outgoing[s].iter().copied().find(|&k| self.edge_dst[k] == t)
    }

    pub fn edge_index(&self, id: &EdgeId) -> Option<usize> {
        self.edge_between(&id.source, &id.target)
    }

    /// Edge indices into variable `v`, in declaration order.
    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn is_exogenous(&self, v: usize) -> bool {
        self.incoming[v].is_empty()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn observed_names(&self) -> Vec<&str> {
        self.variables
            .iter()
            .filter(|v| v.is_observed())
            .map(|v| v.name.as_str())
            .collect()
    }

    /// Whether preventive edge `prev` interferes with facilitating edge `fac`.
    pub fn covers(&self, prev: usize, fac: usize) -> bool {
        let p = &self.edges[prev];
        if p.polarity != Polarity::Preventive
            || self.edges[fac].polarity != Polarity::Facilitating
            || self.edge_dst[prev] != self.edge_dst[fac]
        {
            return false;
        }
        match &p.scope {
            Scope::All => true,
            Scope::Edges(members) => {
                let id = self.edges[fac].id();
                members.contains(&id)
            }
        }
    }

    /// Variables reachable from `v` by a directed path of length at least one.
    pub fn descendants(&self, v: usize) -> HashSet<usize> {
        let mut seen = HashSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &k in &self.outgoing[x] {
                let w = self.edge_dst[k];
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Variables with a directed path into `v`.
    pub fn ancestors(&self, v: usize) -> HashSet<usize> {
        let mut seen = HashSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &k in &self.incoming[x] {
                let w = self.edge_src[k];
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Structural value of endogenous `v` given variable values and per-edge q bits.
    pub(crate) fn gate_value(&self, v: usize, values: &[bool], qbits: &[bool]) -> bool {
        let incoming = &self.incoming[v];
        incoming.iter().any(|&i| {
            self.edges[i].polarity == Polarity::Facilitating
                && values[self.edge_src[i]]
                && qbits[i]
                && !incoming.iter().any(|&j| {
                    self.covers(j, i) && values[self.edge_src[j]] && qbits[j]
                })
        })
    }
}

impl fmt::Display for ChengModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_model(self))
    }
}
