//! Browser bindings for the sepkit demo page in `www/`.
//!
//! Each operation takes the dataset as CSV text (`x,y,color` rows) and
//! returns a JSON string `{ "report": ..., "svg": ... }`. Errors come back as
//! the same JSON error objects the CLI prints.

use sepkit::approx::solve_approx;
use sepkit::exact::solve_exact_with_regions;
use sepkit::hull::{max_margin_static, StripSeparator};
use sepkit::io::parse_csv;
use sepkit::rat::parse_rat;
use sepkit::report::{approx_json, error_json, exact_json, strip_json};
use sepkit::svg::plot_svg;
use sepkit::{Error, LabeledPoint};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn load(csv: &str) -> Result<Vec<LabeledPoint>, Error> {
    let pts = parse_csv(csv)?;
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(pts)
}

fn bundle(report: Value, svg: String) -> String {
    json!({ "report": report, "svg": svg }).to_string()
}

/// Exact k-mis MinMax separator.
pub fn kmm(csv: &str, k: usize) -> Result<String, Error> {
    let pts = load(csv)?;
    let r = solve_exact_with_regions(&pts, k)?;
    let sep = r.separator();
    Ok(bundle(exact_json(&r), plot_svg(&pts, k, sep.as_ref())?))
}

/// (1+eps)-approximate separator; `eps` is a decimal or fraction.
pub fn kmm_approx(csv: &str, k: usize, eps: &str) -> Result<String, Error> {
    let pts = load(csv)?;
    let eps = parse_rat(eps)?;
    let r = solve_approx(&pts, k, &eps)?;
    Ok(bundle(approx_json(&r, None), plot_svg(&pts, k, Some(&r.separator))?))
}

/// Widest separating strip.
pub fn max_strip(csv: &str) -> Result<String, Error> {
    let pts = load(csv)?;
    let r = max_margin_static(&pts);
    // vertical strips have no dual point to draw
    let sep = match &r.separator {
        Some(StripSeparator::Line(s)) => Some(s),
        _ => None,
    };
    Ok(bundle(strip_json(&r), plot_svg(&pts, 0, sep)?))
}

fn to_js(r: Result<String, Error>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&error_json(&e).to_string()))
}

#[wasm_bindgen(js_name = solveKmm)]
pub fn solve_kmm_js(csv: &str, k: usize) -> Result<String, JsValue> {
    to_js(kmm(csv, k))
}

#[wasm_bindgen(js_name = solveApprox)]
pub fn solve_approx_js(csv: &str, k: usize, eps: &str) -> Result<String, JsValue> {
    to_js(kmm_approx(csv, k, eps))
}

#[wasm_bindgen(js_name = maxStrip)]
pub fn max_strip_js(csv: &str) -> Result<String, JsValue> {
    to_js(max_strip(csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DS3: &str = "x,y,color\n0,0,R\n2,2,R\n0,2,B\n2,0,B\n";

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn kmm_on_ds3() {
        let v = parse(&kmm(DS3, 1).unwrap());
        assert_eq!(v["report"]["max_sq"], "2");
        let svg = v["svg"].as_str().unwrap();
        assert_eq!(svg.matches("class=\"valid-face\"").count() as u64, v["report"]["valid_regions"].as_u64().unwrap());
    }

    #[test]
    fn approx_within_factor() {
        let v = parse(&kmm_approx(DS3, 1, "1/10").unwrap());
        assert_eq!(v["report"]["mis"], 1);
        assert!(matches!(kmm_approx(DS3, 1, "0"), Err(Error::NonPositiveEps)));
        assert!(matches!(kmm_approx(DS3, 0, "1"), Err(Error::Infeasible { k: 0, k_min: 1 })));
    }

    #[test]
    fn strip_and_errors() {
        let v = parse(&max_strip("x,y,color\n0,0,R\n1,0,R\n0,3,B\n1,3,B\n").unwrap());
        assert_eq!(v["report"]["width_sq"], "9");
        let v = parse(&max_strip(DS3).unwrap());
        assert_eq!(v["report"]["status"], "not_separable");
        assert!(matches!(kmm("x,y,color\n", 0), Err(Error::EmptyInput)));
        assert!(kmm("x,y,color\n1,1,Q\n", 0).is_err());
    }
}
