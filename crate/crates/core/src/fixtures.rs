//! Canonical models and datasets used across the test suites and the CLI docs.
//!
//! | name | structure |
//! |------|-----------|
//! | M1 | `C -> E`, `U -> E`, U hidden (two independent facilitators) |
//! | M2 | `U -> E`, `F -| E`, U hidden (noisy-AND preventer) |
//! | M3 | `C -> E`, `C -> D -> E` (direct vs. total power) |
//! | M4 | `C -> D` with q=1, `C -> E`, `D -> E` (deterministic intermediate) |
//! | M5 | `C -> E`, `D -> E`, hidden `F -| E` scoped to `D>E` |
//! | M6 | `C -> F -| E`, hidden `H -> E` (facilitator of a preventer) |

use crate::estimation::Dataset;
use crate::model::{build_model, parse_model, ChengModel};

pub const M1: &str = "\
var C observed base=0.5
var U unobserved base=0.4
var E observed
edge C -> E fac q=0.5
edge U -> E fac q=0.3
";

pub const M2: &str = "\
var U unobserved base=0.5
var F observed base=0.5
var E observed
edge U -> E fac q=0.6
edge F -| E prev q=0.4 scope=ALL
";

pub const M3: &str = "\
var C observed base=0.5
var D observed
var E observed
edge C -> E fac q=0.5
edge C -> D fac q=0.4
edge D -> E fac q=0.5
";

pub const M4: &str = "\
var C observed base=0.5
var D observed
var E observed
edge C -> D fac q=1
edge C -> E fac q=0.5
edge D -> E fac q=0.3
";

pub const M5: &str = "\
var C observed base=0.5
var D observed base=0.5
var F unobserved base=0.5
var E observed
edge C -> E fac q=0.5
edge D -> E fac q=0.6
edge F -| E prev q=0.5 scope=D>E
";

pub const M6: &str = "\
var C observed base=0.5
var F observed
var H unobserved base=1
var E observed
edge C -> F fac q=0.8
edge F -| E prev q=0.5
edge H -> E fac q=0.9
";

/// A cause with a facilitating path and a path through a preventer of its effect.
pub const DUAL_PATH: &str = "\
var C observed base=0.5
var F observed
var E observed
edge C -> E fac q=0.5
edge C -> F fac q=0.6
edge F -| E prev q=0.7
";

/// Facilitates a preventer of an intermediate; the preventer's own target G
/// has a hidden facilitator H.
pub const MIXED_INTERMEDIATE: &str = "\
var C observed base=0.5
var H unobserved base=0.5
var F observed
var G observed
var E observed
edge C -> E fac q=0.5
edge C -> F fac q=0.6
edge F -| G prev q=0.7
edge H -> G fac q=0.8
edge G -> E fac q=0.4
";

/// C facilitates F, which prevents D, which facilitates E; U feeds D.
pub const PREVENTER_CHAIN: &str = "\
var C observed base=0.5
var U unobserved base=0.5
var F observed
var D observed
var E observed
edge C -> F fac q=0.7
edge U -> D fac q=0.8
edge F -| D prev q=0.6
edge D -> E fac q=0.9
";

/// Two preventive edges in series: C -| F -| E.
pub const DOUBLE_PREVENTER: &str = "\
var C observed base=0.5
var U unobserved base=0.5
var W unobserved base=0.5
var F observed
var E observed
edge U -> F fac q=0.8
edge C -| F prev q=0.6
edge W -> E fac q=0.9
edge F -| E prev q=0.5
";

fn load(text: &str) -> ChengModel {
    build_model(parse_model(text).expect("fixture parses")).expect("fixture is valid")
}

pub fn m1() -> ChengModel {
    load(M1)
}

pub fn m2() -> ChengModel {
    load(M2)
}

pub fn m3() -> ChengModel {
    load(M3)
}

pub fn m4() -> ChengModel {
    load(M4)
}

pub fn m5() -> ChengModel {
    load(M5)
}

pub fn m6() -> ChengModel {
    load(M6)
}

pub fn dual_path() -> ChengModel {
    load(DUAL_PATH)
}

pub fn mixed_intermediate() -> ChengModel {
    load(MIXED_INTERMEDIATE)
}

pub fn preventer_chain() -> ChengModel {
    load(PREVENTER_CHAIN)
}

pub fn double_preventer() -> ChengModel {
    load(DOUBLE_PREVENTER)
}

/// Childhood leukemia deaths in Southern Utah by fallout exposure, weighted
/// by hundreds of person-years: high exposure 30 deaths over 6913, low 16 over 5901.
pub const UTAH_CSV: &str = "\
exposure,death,weight
1,1,30
1,0,6883
0,1,16
0,0,5885
";

pub fn utah() -> Dataset {
    Dataset::from_csv_str(UTAH_CSV).expect("utah fixture parses")
}
