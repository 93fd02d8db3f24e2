//! Thin browser surface: each export takes plain strings and returns JSON
//! or rendered text, so the page needs no glue types.

use wasm_bindgen::prelude::*;

use schubert::pillar::{PillarSet, RotheDiagram, RotheFlavor};
use schubert::rank::RankMatrix;
use schubert::transpose::{cone_class, linking_graph};
use schubert::Permutation;

fn parse(perm: &str) -> Result<Permutation, JsValue> {
    perm.parse()
        .map_err(|e| JsValue::from_str(&format!("{e}")))
}

/// Rank matrix, markings and pillar structure of a permutation, as JSON.
#[wasm_bindgen]
pub fn analyze(perm: &str) -> Result<String, JsValue> {
    let w = parse(perm)?;
    let r = RankMatrix::from_permutation(&w);
    let g = linking_graph(&w);
    let classes: Vec<Vec<_>> = (0..g.components().len()).map(|t| g.class_pillars(t)).collect();
    let codim = PillarSet::from_permutation(&w)
        .codim()
        .map_err(|e| JsValue::from_str(&format!("{e}")))?;
    serde_json::to_string(&serde_json::json!({
        "permutation": w,
        "inverse": w.inverse(),
        "length": w.length(),
        "codimension": codim,
        "rank_matrix": r.render(),
        "pillars": r.pillar_entries(),
        "essential": r.essential_entries(),
        "linked_classes": classes,
    }))
    .map_err(|e| JsValue::from_str(&format!("{e}")))
}

/// Every permutation sharing the tangent cone, one per line.
#[wasm_bindgen]
pub fn cone_class_members(perm: &str) -> Result<String, JsValue> {
    let w = parse(perm)?;
    Ok(cone_class(&w)
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\n"))
}

/// Dot diagram rendering; `opposite` switches the shading convention.
#[wasm_bindgen]
pub fn rothe(perm: &str, opposite: bool) -> Result<String, JsValue> {
    let w = parse(perm)?;
    let flavor = if opposite { RotheFlavor::Opposite } else { RotheFlavor::Standard };
    Ok(RotheDiagram::new(&w, flavor).render())
}
