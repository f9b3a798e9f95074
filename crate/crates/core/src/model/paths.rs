use std::fmt;

use super::{ChengModel, Polarity};
use crate::error::Result;

/// A directed path as a sequence of edge indices into [`ChengModel::edges`].
pub type Path = Vec<usize>;

/// Every directed path from `from` to `to`, in depth-first order over
/// outgoing edges. Empty when `to` is unreachable, including `from == to`.
pub fn directed_paths(model: &ChengModel, from: &str, to: &str) -> Result<Vec<Path>> {
    let start = model.index_of(from)?;
    let goal = model.index_of(to)?;
    let mut out = Vec::new();
    let mut current = Vec::new();
    walk(model, start, goal, &mut current, &mut out);
    Ok(out)
}

fn walk(model: &ChengModel, at: usize, goal: usize, current: &mut Path, out: &mut Vec<Path>) {
    for &k in model.outgoing(at) {
        current.push(k);
        let next = model.edge_target(k);
        if next == goal {
            out.push(current.clone());
        } else {
            walk(model, next, goal, current, out);
        }
        current.pop();
    }
}

/// Sign of a path: preventive iff it contains an odd number of preventive edges.
pub fn path_polarity(model: &ChengModel, path: &Path) -> Polarity {
    let preventive = path.iter().filter(|&&k| model.edge(k).is_preventive()).count();
    if preventive % 2 == 1 {
        Polarity::Preventive
    } else {
        Polarity::Facilitating
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceClass {
    None,
    Facilitating,
    Preventing,
    Mixed,
}

impl fmt::Display for InfluenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InfluenceClass::None => "None",
            InfluenceClass::Facilitating => "Facilitating",
            InfluenceClass::Preventing => "Preventing",
            InfluenceClass::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Influence {
    pub class: InfluenceClass,
    /// For `Mixed`: a cause with any facilitating path facilitates on net.
    pub net: Option<Polarity>,
    /// Set when some path carries two or more preventive edges, where the
    /// parity rule is an extrapolation.
    pub extrapolated: bool,
}

pub fn influence_class(model: &ChengModel, cause: &str, effect: &str) -> Result<Influence> {
    let paths = directed_paths(model, cause, effect)?;
    let mut fac = false;
    let mut prev = false;
    let mut extrapolated = false;
    for p in &paths {
        if p.iter().filter(|&&k| model.edge(k).is_preventive()).count() >= 2 {
            extrapolated = true;
        }
        match path_polarity(model, p) {
            Polarity::Facilitating => fac = true,
            Polarity::Preventive => prev = true,
        }
    }
    let (class, net) = match (fac, prev) {
        (false, false) => (InfluenceClass::None, None),
        (true, false) => (InfluenceClass::Facilitating, Some(Polarity::Facilitating)),
        (false, true) => (InfluenceClass::Preventing, Some(Polarity::Preventive)),
        (true, true) => (InfluenceClass::Mixed, Some(Polarity::Facilitating)),
    };
    Ok(Influence {
        class,
        net,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fixtures;

    fn render(model: &ChengModel, paths: &[Path]) -> Vec<String> {
        let mut v: Vec<String> = paths
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&k| model.edge(k).id().to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn m3_has_direct_and_mediated_paths() {
        let m = fixtures::m3();
        let paths = directed_paths(&m, "C", "E").unwrap();
        assert_eq!(render(&m, &paths), vec!["C>D D>E", "C>E"]);
    }

    #[test]
    fn no_back_paths() {
        let m = fixtures::m1();
        assert!(directed_paths(&m, "E", "C").unwrap().is_empty());
        assert!(directed_paths(&m, "C", "C").unwrap().is_empty());
        assert_eq!(
            directed_paths(&m, "C", "Z").unwrap_err(),
            Error::UnknownVariable("Z".into())
        );
    }

    #[test]
    fn m4_two_paths() {
        let m = fixtures::m4();
        assert_eq!(directed_paths(&m, "C", "E").unwrap().len(), 2);
    }

    #[test]
    fn classes_on_fixtures() {
        let m6 = fixtures::m6();
        assert_eq!(influence_class(&m6, "C", "E").unwrap().class, InfluenceClass::Preventing);
        let m1 = fixtures::m1();
        assert_eq!(influence_class(&m1, "C", "E").unwrap().class, InfluenceClass::Facilitating);
        assert_eq!(influence_class(&m1, "E", "C").unwrap().class, InfluenceClass::None);
        let dual = fixtures::dual_path();
        let inf = influence_class(&dual, "C", "E").unwrap();
        assert_eq!(inf.class, InfluenceClass::Mixed);
        assert_eq!(inf.net, Some(Polarity::Facilitating));
        assert!(!inf.extrapolated);
    }

    #[test]
    fn double_preventer_chain_is_flagged() {
        let m = fixtures::preventer_chain();
        let inf = influence_class(&m, "C", "E").unwrap();
        assert_eq!(inf.class, InfluenceClass::Preventing);
        assert!(!inf.extrapolated);
        let inf = influence_class(&m, "F", "E").unwrap();
        assert_eq!(inf.class, InfluenceClass::Preventing);
        let m = fixtures::double_preventer();
        let inf = influence_class(&m, "C", "E").unwrap();
        assert_eq!(inf.class, InfluenceClass::Facilitating);
        assert!(inf.extrapolated);
    }
}
