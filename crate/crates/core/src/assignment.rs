use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A partial assignment of 0/1 values to named variables, e.g. `C=1,D=0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: bool) -> Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: bool) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.0.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Union of two assignments; `None` if they disagree on a shared variable.
    pub fn merged(&self, other: &Assignment) -> Option<Assignment> {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            match out.get(k) {
                Some(existing) if existing != v => return None,
                _ => out.set(k, v),
            }
        }
        Some(out)
    }
}

impl FromIterator<(String, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (String, bool)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("{}={}", k, u8::from(*v)))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Assignment::new();
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(out);
        }
        for part in s.split(',') {
            let (name, value) = part.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("expected NAME=0|1, got {part:?}"),
            })?;
            let value = match value.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("value must be 0 or 1, got {other:?}"),
                    })
                }
            };
            let name = name.trim();
            if out.get(name).is_some_and(|v| v != value) {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("conflicting values for {name}"),
                });
            }
            out.set(name, value);
        }
        Ok(out)
    }
}

/// Result of a conditional query. `Undefined` means the conditioning event has
/// zero mass; it is a legitimate answer, not a failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probability {
    Defined(f64),
    Undefined,
}

impl Probability {
    pub fn value(self) -> Option<f64> {
        match self {
            Probability::Defined(p) => Some(p),
            Probability::Undefined => None,
        }
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, Probability::Undefined)
    }

    /// `num / den`, undefined when the denominator carries no mass.
    pub fn ratio(num: f64, den: f64) -> Probability {
        if den > 0.0 {
            Probability::Defined(num / den)
        } else {
            Probability::Undefined
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Defined(p) => write!(f, "{p}"),
            Probability::Undefined => write!(f, "Undefined"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let a: Assignment = "C=1, D=0".parse().unwrap();
        assert_eq!(a.get("C"), Some(true));
        assert_eq!(a.get("D"), Some(false));
        assert_eq!(a.to_string(), "C=1,D=0");
        assert!("".parse::<Assignment>().unwrap().is_empty());
        assert!("C=2".parse::<Assignment>().is_err());
        assert!("C=1,C=0".parse::<Assignment>().is_err());
    }

    #[test]
    fn merge_conflict() {
        let a = Assignment::new().with("C", true);
        assert!(a.merged(&Assignment::new().with("C", false)).is_none());
        assert_eq!(a.merged(&Assignment::new().with("D", false)).unwrap().len(), 2);
    }
}
