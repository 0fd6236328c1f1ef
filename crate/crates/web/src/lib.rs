//! Browser bindings for `www/index.html`.
//!
//! Operators arrive as `.op` text (a second operator in the text is taken as
//! the potential) or as `builtin:NAME:N`. Every export returns a JSON string
//! or an error message.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use wavecone::dsl::{builtin, parse_operators, to_dsl, BuiltinParams, OperatorSource};
use wavecone::nulllag::solve_null_lagrangians;
use wavecone::operator::{constant_rank_check, wave_cone_span, OperatorSymbol};
use wavecone::potential::{pseudoinverse_potential, PotentialSymbol};
use wavecone::spectral::suite::noise_field;
use wavecone::spectral::{hodge_decompose, PeriodicField, TorusGrid};

type Loaded = (OperatorSymbol, Option<PotentialSymbol>);

fn load(src: &str) -> wavecone::Result<Loaded> {
    if let Some(rest) = src.trim().strip_prefix("builtin:") {
        let mut parts = rest.split(':');
        let name = parts.next().unwrap_or_default();
        let n = parts.next().and_then(|s| s.parse().ok());
        return builtin(name, &BuiltinParams { n, ..Default::default() });
    }
    let mut ops = parse_operators(&OperatorSource::new(src, "<input>"))?.into_iter();
    let a = ops
        .next()
        .ok_or_else(|| wavecone::Error::InvalidParameter("no operator in input".into()))?;
    Ok((a, ops.next().map(PotentialSymbol::user)))
}

fn with_potential(src: &str) -> wavecone::Result<(OperatorSymbol, PotentialSymbol)> {
    let (a, b) = load(src)?;
    let b = match b {
        Some(b) => b,
        None => pseudoinverse_potential(&a)?,
    };
    Ok((a, b))
}

fn render(r: wavecone::Result<Value>) -> Result<String, String> {
    r.map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// Rank certificate, wave-cone span and a potential.
#[wasm_bindgen]
pub fn analyze(src: &str, samples: usize, seed: u64) -> Result<String, String> {
    render((|| {
        let (a, b) = load(src)?;
        let rank = constant_rank_check(&a, samples, seed)?;
        let cone = wave_cone_span(&a, samples, seed)?;
        let b = match b {
            Some(b) => Ok(b),
            None => pseudoinverse_potential(&a),
        };
        let potential = match &b {
            Ok(b) => json!({ "provenance": b.provenance.as_str(), "order": b.order(), "dsl": to_dsl(&b.symbol) }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        Ok(json!({
            "operator": a.name(),
            "shape": [a.dim_to(), a.dim_from()],
            "n": a.n(),
            "order": a.order(),
            "rank": rank.to_json(),
            "wave_cone": { "span_dim": cone.span_basis.len(), "spans_v": cone.spans_v },
            "potential": potential,
        }))
    })())
}

/// Basis of the degree-`s` null Lagrangians.
#[wasm_bindgen]
pub fn null_lagrangians(src: &str, degree: usize) -> Result<String, String> {
    render((|| {
        let (a, b) = with_potential(src)?;
        let basis = solve_null_lagrangians(&b, degree)?;
        Ok(json!({ "operator": a.name(), "potential": b.symbol.name(), "basis": basis.to_json() }))
    })())
}

fn component(f: &PeriodicField, c: usize) -> Vec<f64> {
    f.values[c].clone()
}

/// Splits seeded noise on a `size × size` torus into its `Bu` and `A*w`
/// parts; returns component `c` of the noise and of both parts.
#[wasm_bindgen]
pub fn hodge(src: &str, size: usize, seed: u64, c: usize) -> Result<String, String> {
    render((|| {
        let (a, b) = with_potential(src)?;
        if a.n() != 2 {
            return Err(wavecone::Error::InvalidParameter("the picture needs n = 2".into()));
        }
        if c >= a.dim_from() {
            return Err(wavecone::Error::InvalidParameter(format!("component {c} of {}", a.dim_from())));
        }
        let grid = TorusGrid::cube(2, size)?;
        let v = noise_field(&grid, a.dim_from(), seed);
        let h = hodge_decompose(&a, &b, &v)?;
        Ok(json!({
            "size": size,
            "component": c,
            "metrics": h.to_json(&v),
            "field": component(&v, c),
            "bu": component(&h.bu_part, c),
            "astar": component(&h.astar_part, c),
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_from_text() {
        let src = "operator div2 { vars=2; from=4; order=1; symbol=[[d1, d2, 0, 0], [0, 0, d1, d2]]; }";
        let v: Value = serde_json::from_str(&null_lagrangians(src, 2).unwrap()).unwrap();
        assert_eq!(v["basis"]["f_space_dim"], 1);
    }

    #[test]
    fn builtin_analysis() {
        let v: Value = serde_json::from_str(&analyze("builtin:curl:2", 50, 0).unwrap()).unwrap();
        assert_eq!(v["rank"]["verdict"], "constant_rank_verified_probabilistic");
        assert_eq!(v["wave_cone"]["spans_v"], true);
    }

    #[test]
    fn hodge_parts_are_orthogonal() {
        let v: Value = serde_json::from_str(&hodge("builtin:divcurl:2", 16, 1, 0).unwrap()).unwrap();
        assert!(v["metrics"]["relative_residual"].as_f64().unwrap() < 1e-8);
        assert_eq!(v["bu"].as_array().unwrap().len(), 256);
    }

    #[test]
    fn errors_are_messages() {
        assert!(null_lagrangians("operator x {", 2).unwrap_err().contains("syntax"));
        assert!(hodge("builtin:curl:3", 16, 0, 0).is_err());
    }
}
