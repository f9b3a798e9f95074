//! Population attributable fraction, probability of causation, and the effect
//! rate forecast for removing a cause, all from observed (cause, effect) data.

use crate::assignment::{Assignment, Probability};
use crate::error::{Error, Result};
use crate::estimation::{delta_p, Dataset};
use crate::inference::QBIT_ENUMERATION_CAP;
use crate::model::ChengModel;

struct Margins {
    delta_p: f64,
    p_c: f64,
    p_e: f64,
    p_ec: f64,
}

fn margins(data: &Dataset, c: &str, e: &str) -> Result<Option<Margins>> {
    let all = Assignment::new();
    let Some(dp) = delta_p(data, c, e, &all)? else {
        return Ok(None);
    };
    let p = |a: Assignment| data.conditional(&a, &all).map(Probability::value);
    let (Some(p_c), Some(p_e), Some(p_ec)) = (
        p(Assignment::new().with(c, true))?,
        p(Assignment::new().with(e, true))?,
        p(Assignment::new().with(c, true).with(e, true))?,
    ) else {
        return Ok(None);
    };
    Ok(Some(Margins {
        delta_p: dp,
        p_c,
        p_e,
        p_ec,
    }))
}

/// `ΔP · P(c) / P(e)`: the share of effect occurrences produced by the cause alone.
pub fn paf(data: &Dataset, c: &str, e: &str) -> Result<Probability> {
    Ok(match margins(data, c, e)? {
        Some(m) => Probability::ratio(m.delta_p * m.p_c, m.p_e),
        None => Probability::Undefined,
    })
}

/// `ΔP · P(c) / P(e, c)`: the chance the cause alone produced the effect in
/// an exposed unit that shows the effect.
pub fn prob_causation(data: &Dataset, c: &str, e: &str) -> Result<Probability> {
    Ok(match margins(data, c, e)? {
        Some(m) => Probability::ratio(m.delta_p * m.p_c, m.p_ec),
        None => Probability::Undefined,
    })
}

/// Effect rate expected after removing the cause from every unit,
/// `P(e) - PAF · P(e)`.
pub fn forecast_removal(data: &Dataset, c: &str, e: &str) -> Result<Probability> {
    let Some(m) = margins(data, c, e)? else {
        return Ok(Probability::Undefined);
    };
    Ok(match Probability::ratio(m.delta_p * m.p_c, m.p_e) {
        Probability::Defined(f) => Probability::Defined(m.p_e - f * m.p_e),
        Probability::Undefined => Probability::Undefined,
    })
}

/// Fraction of effect occurrences that would vanish if `c` were switched off
/// in the same unit, with every exogenous draw and q bit held fixed.
///
/// Computed by enumerating exogenous values and q bits, so it does not rely on
/// any independence between the cause and the other causes of the effect.
pub fn sole_cause_fraction(model: &ChengModel, c: &str, e: &str) -> Result<Probability> {
    let ci = model.index_of(c)?;
    let ei = model.index_of(e)?;
    let exo: Vec<usize> = (0..model.len()).filter(|&v| model.is_exogenous(v)).collect();
    let m = model.edges().len();
    let size = exo.len() + m;
    if size > QBIT_ENUMERATION_CAP {
        return Err(Error::TooLarge {
            size,
            cap: QBIT_ENUMERATION_CAP,
        });
    }
    let mut values = vec![false; model.len()];
    let mut switched = vec![false; model.len()];
    let mut qbits = vec![false; m];
    let (mut p_e, mut p_alone) = (0.0, 0.0);
    for bits in 0usize..1 << size {
        let mut w = 1.0;
        for (i, &v) in exo.iter().enumerate() {
            let on = bits >> i & 1 == 1;
            let p = model.var_at(v).base_rate.unwrap_or(0.0);
            w *= if on { p } else { 1.0 - p };
            values[v] = on;
        }
        for (k, bit) in qbits.iter_mut().enumerate() {
            *bit = bits >> (exo.len() + k) & 1 == 1;
            let q = model.edge(k).q;
            w *= if *bit { q } else { 1.0 - q };
        }
        if w == 0.0 {
            continue;
        }
        for &v in model.topological_order() {
            if !model.is_exogenous(v) {
                values[v] = model.gate_value(v, &values, &qbits);
            }
        }
        switched.copy_from_slice(&values);
        switched[ci] = false;
        for &v in model.topological_order() {
            if v != ci && !model.is_exogenous(v) {
                switched[v] = model.gate_value(v, &switched, &qbits);
            }
        }
        if values[ei] {
            p_e += w;
            if !switched[ei] {
                p_alone += w;
            }
        }
    }
    Ok(Probability::ratio(p_alone, p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::exact_frequencies;
    use crate::fixtures;
    use crate::intervention::intervene;
    use crate::inference::probability;

    fn val(p: Probability) -> f64 {
        p.value().expect("defined")
    }

    #[test]
    fn utah_table() {
        let d = fixtures::utah();
        let paf = val(paf(&d, "exposure", "death").unwrap());
        assert!((paf - 0.245).abs() <= 0.001, "{paf}");
        let pc = val(prob_causation(&d, "exposure", "death").unwrap());
        assert!((pc - 0.3756).abs() <= 0.002, "{pc}");
        let f = val(forecast_removal(&d, "exposure", "death").unwrap());
        assert!((f - 16.0 / 5901.0).abs() < 1e-12, "{f}");
    }

    #[test]
    fn m1_exact() {
        let d = exact_frequencies(&fixtures::m1()).unwrap();
        assert!((val(paf(&d, "C", "E").unwrap()) - 0.44 * 0.5 / 0.34).abs() < 1e-12);
        assert!((val(prob_causation(&d, "C", "E").unwrap()) - 0.44 * 0.5 / 0.28).abs() < 1e-12);
        assert!((val(forecast_removal(&d, "C", "E").unwrap()) - 0.12).abs() < 1e-12);
    }

    #[test]
    fn no_association() {
        let d = Dataset::from_csv_str("C,E\n1,1\n1,0\n0,1\n0,0\n").unwrap();
        assert_eq!(val(paf(&d, "C", "E").unwrap()), 0.0);
        assert_eq!(val(forecast_removal(&d, "C", "E").unwrap()), 0.5);
    }

    #[test]
    fn identical_columns() {
        let d = Dataset::from_csv_str("C,E\n1,1\n0,0\n").unwrap();
        assert_eq!(val(prob_causation(&d, "C", "E").unwrap()), 1.0);
    }

    #[test]
    fn absent_effect_is_undefined() {
        let d = Dataset::from_csv_str("C,E\n1,0\n0,0\n").unwrap();
        assert!(paf(&d, "C", "E").unwrap().is_undefined());
        assert!(prob_causation(&d, "C", "E").unwrap().is_undefined());
    }

    #[test]
    fn sole_cause_matches_paf_on_m1() {
        let m = fixtures::m1();
        let d = exact_frequencies(&m).unwrap();
        let alone = val(sole_cause_fraction(&m, "C", "E").unwrap());
        assert!((alone - val(paf(&d, "C", "E").unwrap())).abs() < 1e-12);
        // q_ec · P(C) · (1 - q_eu · P(U)) / P(E)
        assert!((alone - 0.5 * 0.5 * (1.0 - 0.3 * 0.4) / 0.34).abs() < 1e-12);
    }

    #[test]
    fn forecast_is_do_zero() {
        let m = fixtures::m1();
        let d = exact_frequencies(&m).unwrap();
        let after = intervene(&m, "C", false).unwrap();
        let p = val(probability(&after, &Assignment::new().with("E", true), &Assignment::new()).unwrap());
        assert!((val(forecast_removal(&d, "C", "E").unwrap()) - p).abs() < 1e-12);
    }
}
