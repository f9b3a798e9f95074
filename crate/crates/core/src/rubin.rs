//! Unit-kinds potential-outcome model with two causes.
//!
//! Every unit is one of four kinds: `c` responds to C only, `u` to U only,
//! `cu` to either, `n` to neither. Given independent C and U the effect rate
//! is a mixture over kinds; the kind frequencies map onto the two causal
//! powers of a noisy-OR, and back again when the powers are independent.

use crate::assignment::Probability;
use crate::error::{Error, Result};
use crate::estimation::Dataset;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RubinModel {
    pub prob_c: f64,
    pub prob_u: f64,
    pub prob_cu: f64,
    pub prob_n: f64,
}

fn unit(field: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::BadProbability {
            field: field.to_string(),
            value,
        })
    }
}

impl RubinModel {
    pub fn new(prob_c: f64, prob_u: f64, prob_cu: f64, prob_n: f64) -> Result<Self> {
        unit("c", prob_c)?;
        unit("u", prob_u)?;
        unit("cu", prob_cu)?;
        unit("n", prob_n)?;
        let sum = prob_c + prob_u + prob_cu + prob_n;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidRubin(format!("kind frequencies sum to {sum}, not 1")));
        }
        Ok(RubinModel {
            prob_c,
            prob_u,
            prob_cu,
            prob_n,
        })
    }
}

/// Effect rate for cause rates `p_c`, `p_u`.
pub fn rubin_prob_e(rm: &RubinModel, p_c: f64, p_u: f64) -> f64 {
    p_c * rm.prob_c + p_u * rm.prob_u + p_u * rm.prob_cu + p_c * rm.prob_cu - p_u * p_c * rm.prob_cu
}

/// `(q_ec, q_eu)`: the share of units that respond to each cause.
pub fn rubin_to_cheng(rm: &RubinModel) -> (f64, f64) {
    (rm.prob_c + rm.prob_cu, rm.prob_u + rm.prob_cu)
}

/// `x` with `fl(x + part) == total`, searching a few ulps around `total - part`.
fn exact_difference(total: f64, part: f64) -> Option<f64> {
    let mut x = total - part;
    for _ in 0..8 {
        let s = x + part;
        if s == total {
            return (x >= 0.0).then_some(x);
        }
        x = if s < total { x.next_up() } else { x.next_down() };
    }
    None
}

/// Kinds implied by independent powers: `cu = q_ec·q_eu`, `c = q_ec - cu`,
/// `u = q_eu - cu`, `n = (1 - q_ec)(1 - q_eu)`. The shares are chosen within a few ulps of those values
/// so that [`rubin_to_cheng`] gives back the two powers bit for bit.
pub fn cheng_to_rubin(q_ec: f64, q_eu: f64) -> Result<RubinModel> {
    unit("q_ec", q_ec)?;
    unit("q_eu", q_eu)?;
    let product = q_ec * q_eu;
    let (mut up, mut down) = (product, product);
    let mut candidates = vec![product];
    for _ in 0..4 {
        up = up.next_up();
        down = down.next_down();
        candidates.extend([up, down]);
    }
    let (c, u, cu) = candidates
        .into_iter()
        .filter(|cu| *cu >= 0.0)
        .find_map(|cu| Some((exact_difference(q_ec, cu)?, exact_difference(q_eu, cu)?, cu)))
        .unwrap_or((q_ec - product, q_eu - product, product));
    Ok(RubinModel {
        prob_c: c,
        prob_u: u,
        prob_cu: cu,
        prob_n: (1.0 - q_ec) * (1.0 - q_eu),
    })
}

/// `prob_u · prob_c - prob_cu · prob_n`; zero exactly when the kinds are
/// consistent with independent powers.
pub fn independence_residual(rm: &RubinModel) -> f64 {
    rm.prob_u * rm.prob_c - rm.prob_cu * rm.prob_n
}

/// Exact (C, E) frequencies for a population with cause rates `p_c`, `p_u`,
/// U unobserved and kinds independent of both causes.
pub fn exact_frequencies(rm: &RubinModel, p_c: f64, p_u: f64) -> Result<Dataset> {
    unit("p_c", p_c)?;
    unit("p_u", p_u)?;
    let with_c = rm.prob_c + rm.prob_cu + rm.prob_u * p_u;
    let without_c = (rm.prob_u + rm.prob_cu) * p_u;
    let mut d = Dataset::new(vec!["C".into(), "E".into()])?;
    for (c, e, w) in [
        (true, true, p_c * with_c),
        (true, false, p_c * (1.0 - with_c)),
        (false, true, (1.0 - p_c) * without_c),
        (false, false, (1.0 - p_c) * (1.0 - without_c)),
    ] {
        if w > 0.0 {
            d.push(&[c, e], w)?;
        }
    }
    Ok(d)
}

/// Share of effect occurrences in which C was present and the unit would not
/// have shown the effect without it: kind `c` exposed, or kind `cu` exposed to
/// C but not U.
pub fn sole_cause_fraction(rm: &RubinModel, p_c: f64, p_u: f64) -> Probability {
    let alone = p_c * (rm.prob_c + rm.prob_cu * (1.0 - p_u));
    Probability::ratio(alone, rubin_prob_e(rm, p_c, p_u))
}

/// Same numerator over the exposed effect rate.
pub fn exposed_sole_cause_fraction(rm: &RubinModel, p_c: f64, p_u: f64) -> Probability {
    let alone = p_c * (rm.prob_c + rm.prob_cu * (1.0 - p_u));
    Probability::ratio(alone, p_c * (rm.prob_c + rm.prob_cu + rm.prob_u * p_u))
}
