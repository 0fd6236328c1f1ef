use serde_json::{json, Value};

use super::sampling::{random_integer_point, rng, structured_directions};
use super::OperatorSymbol;
use crate::error::Result;
use crate::polyalg::{format_rational, Rational, RationalMatrix};

/// Span of the wave cone `⋃_ξ ker A(ξ)`, with one witness frequency per basis
/// vector.
#[derive(Clone, Debug)]
pub struct WaveConeReport {
    pub span_basis: Vec<Vec<Rational>>,
    pub witnesses: Vec<Vec<i64>>,
    pub spans_v: bool,
    pub samples_used: usize,
}

impl WaveConeReport {
    pub fn to_json(&self) -> Value {
        let basis: Vec<Vec<String>> =
            self.span_basis.iter().map(|v| v.iter().map(format_rational).collect()).collect();
        json!({
            "span_dim": self.span_basis.len(),
            "spans_v": self.spans_v,
            "samples_used": self.samples_used,
            "span_basis": basis,
            "witnesses": self.witnesses,
        })
    }
}

/// Accumulates exact kernels at coordinate directions and then at seeded
/// random integer frequencies until the span fills `V` or the budget of
/// `sample_count` random draws runs out.
pub fn wave_cone_span(a: &OperatorSymbol, sample_count: usize, seed: u64) -> Result<WaveConeReport> {
    let dim = a.dim_from();
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut witnesses = Vec::new();
    let mut used = 0;
    let mut r = rng(seed);
    let structured = structured_directions(a.n());
    let mut structured = structured.into_iter();
    let mut random_left = sample_count;
    while basis.len() < dim {
        let xi = match structured.next() {
            Some(x) => x,
            None if random_left > 0 => {
                random_left -= 1;
                random_integer_point(&mut r, a.n())
            }
            None => break,
        };
        used += 1;
        let (_, kernel) = a.eval_i64(&xi)?.nullspace();
        for v in kernel {
            let mut trial = basis.clone();
            trial.push(v.clone());
            if RationalMatrix::from_rows(trial)?.rank() > basis.len() {
                basis.push(v);
                witnesses.push(xi.clone());
                if basis.len() == dim {
                    break;
                }
            }
        }
    }
    Ok(WaveConeReport { spans_v: basis.len() == dim, span_basis: basis, witnesses, samples_used: used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{HomPoly, PolyMatrix};
    use num_traits::Zero;

    fn op(rows: Vec<Vec<HomPoly>>) -> OperatorSymbol {
        OperatorSymbol::new("t", PolyMatrix::from_rows(2, 1, rows).unwrap()).unwrap()
    }

    #[test]
    fn divergence_spans_plane() {
        let a = op(vec![vec![HomPoly::var(2, 0), HomPoly::var(2, 1)]]);
        let rep = wave_cone_span(&a, 10, 0).unwrap();
        assert!(rep.spans_v);
        for (v, xi) in rep.span_basis.iter().zip(&rep.witnesses) {
            assert!(a.eval_i64(xi).unwrap().mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn gradient_wave_cone_is_trivial() {
        let a = op(vec![vec![HomPoly::var(2, 0)], vec![HomPoly::var(2, 1)]]);
        let rep = wave_cone_span(&a, 20, 0).unwrap();
        assert!(rep.span_basis.is_empty());
        assert!(!rep.spans_v);
    }
}
