//! Line-oriented model files:
//!
//! ```text
//! # comment
//! var NAME (observed|unobserved) [base=FLOAT] [do=0|1]
//! edge SRC -> DST fac q=FLOAT
//! edge SRC -| DST prev q=FLOAT [scope=ALL | scope=SRC1>DST,SRC2>DST]
//! ```
//!
//! `do=V` marks a variable held at `V` by an intervention; its base rate is `V`.

use std::fmt::Write as _;

use super::{ChengModel, EdgeId, ModelSpec, Observability, Polarity, Scope};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_float(line: usize, token: &str, key: &str) -> Result<f64> {
    let value = token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected {key}=FLOAT, got {token:?}")))?;
    value
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number {value:?}")))
}

/// Parse a model file into an unvalidated [`ModelSpec`].
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let mut spec = ModelSpec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "var" => {
                let (name, obs) = match tokens.as_slice() {
                    [_, name, obs, ..] => (*name, *obs),
                    _ => return Err(parse_err(line, "expected: var NAME (observed|unobserved)")),
                };
                let observability = match obs {
                    "observed" => Observability::Observed,
                    "unobserved" => Observability::Unobserved,
                    other => return Err(parse_err(line, format!("bad observability {other:?}"))),
                };
                let mut base_rate = None;
                let mut pinned = None;
                for t in &tokens[3..] {
                    if t.starts_with("base=") && base_rate.is_none() {
                        base_rate = Some(parse_float(line, t, "base")?);
                    } else if let (Some(v), None) = (t.strip_prefix("do="), pinned) {
                        pinned = Some(match v {
                            "0" => false,
                            "1" => true,
                            _ => return Err(parse_err(line, format!("do= must be 0 or 1, got {v:?}"))),
                        });
                    } else {
                        return Err(parse_err(line, format!("unexpected token {t:?} after var")));
                    }
                }
                if let Some(p) = pinned {
                    let held = if p { 1.0 } else { 0.0 };
                    if base_rate.is_some_and(|b| b != held) {
                        return Err(parse_err(line, "base rate conflicts with do="));
                    }
                    base_rate = Some(held);
                }
                spec = spec.var(name, observability, base_rate);
                if let Some(v) = spec.variables.last_mut() {
                    v.pinned = pinned;
                }
            }
            "edge" => {
                let [_, src, arrow, dst, kind, q, rest @ ..] = tokens.as_slice() else {
                    return Err(parse_err(line, "expected: edge SRC -> DST fac q=FLOAT"));
                };
                let polarity = match (*arrow, *kind) {
                    ("->", "fac") => Polarity::Facilitating,
                    ("-|", "prev") => Polarity::Preventive,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!("arrow/kind must be '-> fac' or '-| prev', got '{arrow} {kind}'"),
                        ))
                    }
                };
                let q = parse_float(line, q, "q")?;
                let scope = match rest {
                    [] => Scope::All,
                    [s] if polarity == Polarity::Preventive => parse_scope(line, s)?,
                    _ => return Err(parse_err(line, "unexpected tokens after q")),
                };
                spec.edges.push(super::Edge {
                    source: src.to_string(),
                    target: dst.to_string(),
                    polarity,
                    q,
                    scope,
                });
            }
            other => return Err(parse_err(line, format!("unknown directive {other:?}"))),
        }
    }
    Ok(spec)
}

fn parse_scope(line: usize, token: &str) -> Result<Scope> {
    let value = token
        .strip_prefix("scope=")
        .ok_or_else(|| parse_err(line, format!("expected scope=..., got {token:?}")))?;
    if value == "ALL" {
        return Ok(Scope::All);
    }
    let mut members = Vec::new();
    for item in value.split(',') {
        let (s, t) = item
            .split_once('>')
            .ok_or_else(|| parse_err(line, format!("scope member must be SRC>DST, got {item:?}")))?;
        if s.is_empty() || t.is_empty() {
            return Err(parse_err(line, format!("empty scope endpoint in {item:?}")));
        }
        members.push(EdgeId::new(s, t));
    }
    Ok(Scope::Edges(members))
}

/// Render a model back to the file format.
pub fn write_model(model: &ChengModel) -> String {
    let mut out = String::new();
    for v in model.variables() {
        let obs = match v.observability {
            Observability::Observed => "observed",
            Observability::Unobserved => "unobserved",
        };
        let _ = write!(out, "var {} {}", v.name, obs);
        match (v.pinned, v.base_rate) {
            (Some(p), _) => {
                let _ = write!(out, " do={}", u8::from(p));
            }
            (None, Some(b)) => {
                let _ = write!(out, " base={b}");
            }
            (None, None) => {}
        }
        out.push('\n');
    }
    for e in model.edges() {
        match e.polarity {
            Polarity::Facilitating => {
                let _ = writeln!(out, "edge {} -> {} fac q={}", e.source, e.target, e.q);
            }
            Polarity::Preventive => {
                let scope = match &e.scope {
                    Scope::All => "ALL".to_string(),
                    Scope::Edges(m) => m.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                };
                let _ = writeln!(
                    out,
                    "edge {} -| {} prev q={} scope={}",
                    e.source, e.target, e.q, scope
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;

    #[test]
    fn intervened_model_round_trips() {
        let m = crate::intervention::intervene(&crate::fixtures::m4(), "D", true).unwrap();
        let text = write_model(&m);
        assert!(text.contains("var D observed do=1\n"));
        let back = build_model(parse_model(&text).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(parse_model("var D observed base=0.5 do=1\n").is_err());
        assert!(parse_model("var D observed do=2\n").is_err());
    }

    #[test]
    fn parses_scoped_preventer() {
        let text = "\
# scoped preventer with a hidden co-cause
var C observed base=0.5
var D observed base=0.5
var F unobserved base=0.5   # hidden
var E observed
edge C -> E fac q=0.5
edge D -> E fac q=0.6
edge F -| E prev q=0.5 scope=D>E
";
        let spec = parse_model(text).unwrap();
        assert_eq!(spec.edges[2].scope, Scope::Edges(vec![EdgeId::new("D", "E")]));
        let m = build_model(spec).unwrap();
        let again = build_model(parse_model(&write_model(&m)).unwrap()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_model("var C observed base=0.5\nedge C => E fac q=1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_model("var C maybe\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_model("edge C -> E fac q=0.5 scope=ALL\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
