//! Boolean structural equations of a Cheng model.
//!
//! Each endogenous variable is a Boolean sum (`++`) of gated facilitating terms
//! `q·X`, where a group of terms sharing the same preventers is multiplied by
//! `(1 - q·F)` for each preventer `F` whose scope covers it. Expressions stay in
//! this sum-of-gated-products shape; the only rewriting is flattening and the
//! folding of constants introduced by interventions or conditioning.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::model::{ChengModel, EdgeId, Polarity};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Var(String),
    Q(EdgeId),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Var(v) => f.write_str(v),
            Literal::Q(id) => write!(
                f,
                "q[{},{}]",
                id.target.to_lowercase(),
                id.source.to_lowercase()
            ),
        }
    }
}

/// `Sum(vec![])` is constant 0 and `Product(vec![])` constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Var(String),
    Q(EdgeId),
    Sum(Vec<BoolExpr>),
    Product(Vec<BoolExpr>),
    Complement(Box<BoolExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterForm {
    Sum,
    Product,
}

impl fmt::Display for OuterForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OuterForm::Sum => f.write_str("Sum"),
            OuterForm::Product => f.write_str("Product"),
        }
    }
}

impl BoolExpr {
    pub const FALSE: BoolExpr = BoolExpr::Sum(Vec::new());
    pub const TRUE: BoolExpr = BoolExpr::Product(Vec::new());

    pub fn constant(b: bool) -> BoolExpr {
        if b {
            BoolExpr::TRUE
        } else {
            BoolExpr::FALSE
        }
    }

    pub fn is_false(&self) -> bool {
        matches!(self, BoolExpr::Sum(c) if c.is_empty())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, BoolExpr::Product(c) if c.is_empty())
    }

    /// Flatten nested sums/products, fold constants, unwrap single-child nodes.
    pub fn normalized(self) -> BoolExpr {
        match self {
            BoolExpr::Sum(children) => {
                let mut out = Vec::new();
                for c in children {
                    match c.normalized() {
                        BoolExpr::Sum(inner) => out.extend(inner),
                        c if c.is_true() => return BoolExpr::TRUE,
                        c => out.push(c),
                    }
                }
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    BoolExpr::Sum(out)
                }
            }
            BoolExpr::Product(children) => {
                let mut out = Vec::new();
                for c in children {
                    match c.normalized() {
                        BoolExpr::Product(inner) => out.extend(inner),
                        c if c.is_false() => return BoolExpr::FALSE,
                        c => out.push(c),
                    }
                }
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    BoolExpr::Product(out)
                }
            }
            BoolExpr::Complement(child) => match child.normalized() {
                c if c.is_false() => BoolExpr::TRUE,
                c if c.is_true() => BoolExpr::FALSE,
                c => BoolExpr::Complement(Box::new(c)),
            },
            leaf => leaf,
        }
    }

    /// Evaluate with a literal lookup; `None` from the lookup is a missing literal.
    pub fn evaluate_with<F>(&self, lookup: &F) -> Result<bool>
    where
        F: Fn(&Literal) -> Option<bool>,
    {
        match self {
            BoolExpr::Var(name) => {
                let lit = Literal::Var(name.clone());
                lookup(&lit).ok_or_else(|| Error::MissingLiteral(lit.to_string()))
            }
            BoolExpr::Q(id) => {
                let lit = Literal::Q(id.clone());
                lookup(&lit).ok_or_else(|| Error::MissingLiteral(lit.to_string()))
            }
            BoolExpr::Sum(children) => {
                let mut any = false;
                for c in children {
                    any |= c.evaluate_with(lookup)?;
                }
                Ok(any)
            }
            BoolExpr::Product(children) => {
                let mut all = true;
                for c in children {
                    all &= c.evaluate_with(lookup)?;
                }
                Ok(all)
            }
            BoolExpr::Complement(child) => Ok(!child.evaluate_with(lookup)?),
        }
    }

    pub fn literals(&self) -> BTreeSet<Literal> {
        let mut out = BTreeSet::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals(&self, out: &mut BTreeSet<Literal>) {
        match self {
            BoolExpr::Var(v) => {
                out.insert(Literal::Var(v.clone()));
            }
            BoolExpr::Q(id) => {
                out.insert(Literal::Q(id.clone()));
            }
            BoolExpr::Sum(c) | BoolExpr::Product(c) => c.iter().for_each(|x| x.collect_literals(out)),
            BoolExpr::Complement(c) => c.collect_literals(out),
        }
    }

    /// Whether variable `name` occurs somewhere not enclosed by a complement.
    pub fn occurs_ungated(&self, name: &str) -> bool {
        match self {
            BoolExpr::Var(v) => v == name,
            BoolExpr::Q(_) => false,
            BoolExpr::Sum(c) | BoolExpr::Product(c) => c.iter().any(|x| x.occurs_ungated(name)),
            BoolExpr::Complement(_) => false,
        }
    }

    fn substitute<F>(&self, f: &F) -> BoolExpr
    where
        F: Fn(&str) -> Option<BoolExpr>,
    {
        match self {
            BoolExpr::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            BoolExpr::Q(_) => self.clone(),
            BoolExpr::Sum(c) => BoolExpr::Sum(c.iter().map(|x| x.substitute(f)).collect()),
            BoolExpr::Product(c) => BoolExpr::Product(c.iter().map(|x| x.substitute(f)).collect()),
            BoolExpr::Complement(c) => BoolExpr::Complement(Box::new(c.substitute(f))),
        }
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Sum(c) if c.len() > 1 => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Var(v) => f.write_str(v),
            BoolExpr::Q(id) => write!(f, "{}", Literal::Q(id.clone())),
            BoolExpr::Sum(c) if c.is_empty() => f.write_str("0"),
            BoolExpr::Product(c) if c.is_empty() => f.write_str("1"),
            BoolExpr::Sum(c) => {
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ++ ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            BoolExpr::Product(c) => {
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    x.fmt_factor(f)?;
                }
                Ok(())
            }
            BoolExpr::Complement(c) => {
                f.write_str("(1 - ")?;
                c.fmt_factor(f)?;
                f.write_str(")")
            }
        }
    }
}

/// Equation of endogenous variable `v` with its parents left as literals.
///
/// Preventers covering every facilitating edge multiply the whole sum; the
/// remaining facilitating terms are grouped by the preventers covering them.
fn raw_equation(model: &ChengModel, v: usize) -> BoolExpr {
    let incoming = model.incoming(v);
    let facs: Vec<usize> = incoming
        .iter()
        .copied()
        .filter(|&i| model.edge(i).polarity == Polarity::Facilitating)
        .collect();
    let covering = |i: usize| -> Vec<usize> { incoming.iter().copied().filter(|&j| model.covers(j, i)).collect() };
    let shared: Vec<usize> = incoming
        .iter()
        .copied()
        .filter(|&j| model.edge(j).is_preventive() && facs.iter().all(|&i| model.covers(j, i)))
        .collect();
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for &i in &facs {
        let preventers: Vec<usize> = covering(i).into_iter().filter(|j| !shared.contains(j)).collect();
        match groups.iter_mut().find(|(p, _)| *p == preventers) {
            Some((_, terms)) => terms.push(i),
            None => groups.push((preventers, vec![i])),
        }
    }
    let term = |i: usize| {
        let e = model.edge(i);
        BoolExpr::Product(vec![BoolExpr::Q(e.id()), BoolExpr::Var(e.source.clone())])
    };
    let gate = |j: usize| {
        let e = model.edge(j);
        BoolExpr::Complement(Box::new(BoolExpr::Product(vec![
            BoolExpr::Q(e.id()),
            BoolExpr::Var(e.source.clone()),
        ])))
    };
    let gated = |body: Vec<BoolExpr>, preventers: &[usize]| {
        let body = if body.len() == 1 {
            body.into_iter().next().expect("one term")
        } else {
            BoolExpr::Sum(body)
        };
        let mut factors = vec![body];
        factors.extend(preventers.iter().map(|&j| gate(j)));
        BoolExpr::Product(factors)
    };
    let mut items = Vec::new();
    for (preventers, terms) in groups {
        if preventers.is_empty() {
            items.extend(terms.into_iter().map(term));
        } else {
            items.push(gated(terms.into_iter().map(term).collect(), &preventers));
        }
    }
    if shared.is_empty() {
        BoolExpr::Sum(items)
    } else {
        gated(items, &shared)
    }
}

fn endogenous(model: &ChengModel, name: &str) -> Result<usize> {
    let v = model.index_of(name)?;
    if model.is_exogenous(v) {
        return Err(Error::ExogenousVariable(name.to_string()));
    }
    Ok(v)
}

fn pinned_value(model: &ChengModel, name: &str) -> Option<BoolExpr> {
    let v = model.variable(name).ok()?;
    v.pinned.map(BoolExpr::constant)
}

/// Structural equation of `v`; variables held by an intervention appear as constants.
pub fn compile(model: &ChengModel, v: &str) -> Result<BoolExpr> {
    let idx = endogenous(model, v)?;
    Ok(raw_equation(model, idx)
        .substitute(&|name| pinned_value(model, name))
        .normalized())
}

/// Equation of `effect` in terms of `cause`, exogenous variables and q
/// literals: every other endogenous ancestor is replaced by its own equation.
pub fn reduce(model: &ChengModel, cause: &str, effect: &str) -> Result<BoolExpr> {
    reduce_about(model, cause, effect, &Assignment::new())
}

/// [`reduce`] with each variable in `fixed` replaced by its constant.
pub fn reduce_about(model: &ChengModel, cause: &str, effect: &str, fixed: &Assignment) -> Result<BoolExpr> {
    let c = model.index_of(cause)?;
    reduce_inner(model, effect, fixed, Some(c))
}

/// Equation of `effect` over exogenous variables and q literals only, with
/// each variable in `fixed` replaced by its constant instead of being
/// expanded. `fixed` overrides an intervention's pin.
pub fn reduce_given(model: &ChengModel, effect: &str, fixed: &Assignment) -> Result<BoolExpr> {
    reduce_inner(model, effect, fixed, None)
}

fn reduce_inner(model: &ChengModel, effect: &str, fixed: &Assignment, keep: Option<usize>) -> Result<BoolExpr> {
    for name in fixed.names() {
        model.index_of(name)?;
    }
    let v = endogenous(model, effect)?;
    Ok(expand(model, v, fixed, keep))
}

fn expand(model: &ChengModel, v: usize, fixed: &Assignment, keep: Option<usize>) -> BoolExpr {
    raw_equation(model, v)
        .substitute(&|name| {
            if let Some(b) = fixed.get(name) {
                return Some(BoolExpr::constant(b));
            }
            let idx = model.index_of(name).ok()?;
            if let Some(p) = model.var_at(idx).pinned {
                return Some(BoolExpr::constant(p));
            }
            if model.is_exogenous(idx) || keep == Some(idx) {
                None
            } else {
                Some(expand(model, idx, fixed, keep))
            }
        })
        .normalized()
}

/// Top-level shape of an equation: a gated product (one or more `(1 - q·F)`
/// factors at the root) or a sum. A lone ungated term counts as a one-term sum.
pub fn outer_form(expr: &BoolExpr) -> OuterForm {
    match expr {
        BoolExpr::Product(factors) if factors.iter().any(|f| matches!(f, BoolExpr::Complement(_))) => {
            OuterForm::Product
        }
        BoolExpr::Complement(_) => OuterForm::Product,
        _ => OuterForm::Sum,
    }
}

/// Which estimator an equation calls for when asking about `cause`: a gated
/// product in which the cause only appears inside preventer factors calls for
/// the preventive formula; everything else for the facilitating one.
pub fn estimator_polarity(expr: &BoolExpr, cause: &str) -> Polarity {
    match outer_form(expr) {
        OuterForm::Product if !expr.occurs_ungated(cause) => Polarity::Preventive,
        _ => Polarity::Facilitating,
    }
}

/// Evaluate against an explicit table of literal bits.
pub fn evaluate(expr: &BoolExpr, assignment: &HashMap<Literal, bool>) -> Result<bool> {
    expr.evaluate_with(&|lit| assignment.get(lit).copied())
}
