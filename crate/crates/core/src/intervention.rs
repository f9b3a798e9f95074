//! Graph surgery: `do(V = v)` removes every edge into `V` and holds it at `v`.
//!
//! Children keep their equations with `V` replaced by the constant, which is
//! what [`crate::boolean::compile`] shows for a pinned variable. The q values of
//! every surviving edge are untouched. Conditionals after surgery are always
//! given by the structural equations, so no replacement distribution is needed.

use crate::assignment::Assignment;
use crate::error::Result;
use crate::model::{build_model, ChengModel};

pub fn intervene(model: &ChengModel, v: &str, value: bool) -> Result<ChengModel> {
    intervene_all(model, &Assignment::new().with(v, value))
}

/// Apply several interventions at once.
pub fn intervene_all(model: &ChengModel, settings: &Assignment) -> Result<ChengModel> {
    for name in settings.names() {
        model.index_of(name)?;
    }
    let mut spec = model.to_spec();
    spec.edges.retain(|e| !settings.contains(&e.target));
    for var in &mut spec.variables {
        if let Some(value) = settings.get(&var.name) {
            var.base_rate = Some(if value { 1.0 } else { 0.0 });
            var.pinned = Some(value);
        }
    }
    build_model(spec)
}
