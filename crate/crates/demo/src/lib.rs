//! wasm-bindgen entry points for www/index.html. Each export wraps a plain
//! function so the same code runs in native tests.

use serde_json::json;
use smoothable::catalog::make;
use smoothable::classify::{components, identify, is_holonomic};
use smoothable::fo::{fo_sweep, fo_verify, sweep_slopes};
use smoothable::io::parse_biresidue;
use smoothable::render::{render_diagram, DiagramFormat};
use smoothable::{BiresidueMatrix, FamilyTag};
use wasm_bindgen::prelude::*;

/// A family tag (`X4`, `C:7,3`, ...) or a matrix in text or JSON form.
fn load(source: &str) -> Result<BiresidueMatrix, String> {
    let s = source.trim();
    match s.parse::<FamilyTag>() {
        Ok(tag) => make(&tag).map_err(|e| e.to_string()),
        Err(_) if !s.contains('\n') && !s.starts_with('{') => Err(format!("not a family tag or matrix: {s:?}")),
        Err(_) => parse_biresidue(s).map_err(|e| e.to_string()),
    }
}

pub fn diagram(source: &str) -> Result<String, String> {
    Ok(render_diagram(&load(source)?.smoothing_diagram(), DiagramFormat::Svg))
}

pub fn classify(source: &str) -> Result<String, String> {
    let b = load(source)?;
    let comps = components(&b.smoothing_diagram()).map_err(|e| e.to_string())?;
    let id = identify(&b).map_err(|e| e.to_string())?;
    let hol = is_holonomic(&b);
    let family = id.map(|i| json!({ "tag": i.tag.to_string(), "sigma": i.sigma, "lambda": i.lambda.to_string() }));
    Ok(json!({
        "n": b.n(),
        "rank": b.rank(),
        "min_polydisc_dim": b.min_polydisc_dim(),
        "chains": comps.chains,
        "cycles": comps.cycles,
        "family": family,
        "holonomic": hol.holonomic,
    })
    .to_string())
}

pub fn sweep(n: usize, k: usize, from: f64, to: f64) -> Result<String, String> {
    if !(from > 0.0 && to >= from && to - from <= 20.0) {
        return Err("need 0 < from <= to <= from + 20".into());
    }
    let imtaus: Vec<f64> = (0..).map(|i| from + i as f64).take_while(|&t| t <= to + 1e-9).collect();
    let rows = fo_sweep(n, k, &imtaus).map_err(|e| e.to_string())?;
    let slopes: Vec<[f64; 2]> = sweep_slopes(&rows).into_iter().map(|(a, b)| [a, b]).collect();
    let verified = fo_verify(n, k).ok().map(|v| json!({ "k_tilde": v.k_tilde, "edges": v.q1_edges }));
    Ok(json!({ "rows": rows, "slopes": slopes, "verified": verified }).to_string())
}

#[wasm_bindgen(js_name = diagramSvg)]
pub fn diagram_svg(source: &str) -> Result<String, JsError> {
    diagram(source).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyJson)]
pub fn classify_json(source: &str) -> Result<String, JsError> {
    classify(source).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sweepJson)]
pub fn sweep_json(n: usize, k: usize, from: f64, to: f64) -> Result<String, JsError> {
    sweep(n, k, from, to).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_and_matrix_sources() {
        let a = diagram("X4").unwrap();
        let b = diagram("4\n0 2 -1 -1\n-2 0 3 -1\n1 -3 0 2\n1 1 -2 0\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("class=\"smoothable\"").count(), 4);
        assert!(diagram("nonsense").is_err());
        assert!(diagram("2\n0 1\n1 0").is_err());
    }

    #[test]
    fn classify_conjugate() {
        let v: serde_json::Value = serde_json::from_str(&classify(r#"{"n":4,"b":[["0","1","0","-1"],["-1","0","1","0"],["0","-1","0","1"],["1","0","-1","0"]]}"#).unwrap()).unwrap();
        assert_eq!(v["family"]["tag"], "C:4,1");
        assert_eq!(v["rank"], 2);
        assert_eq!(v["holonomic"], true);
    }

    #[test]
    fn sweep_rows() {
        let v: serde_json::Value = serde_json::from_str(&sweep(5, 2, 4.0, 7.0).unwrap()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert_eq!(v["slopes"].as_array().unwrap().len(), 3);
        assert_eq!(v["verified"]["k_tilde"], 1);
        assert!(sweep(5, 2, 7.0, 4.0).is_err());
        assert!(sweep(4, 2, 4.0, 5.0).is_err());
    }
}
