//! Homogeneous constant-coefficient differential operators and their
//! structural analysis: pointwise rank, constant-rank certificates, the span
//! of the wave cone, and cocancellation.

mod cocancel;
mod rank;
pub mod sampling;
mod wavecone;

pub use cocancel::{cocanceling_check, CocancelReport};
pub use rank::{constant_rank_check, generic_rank, symbol_rank_at, RankReport, RankVerdict};
pub use wavecone::{wave_cone_span, WaveConeReport};

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::polyalg::{
    format_rational, multi_indices, parse_rational, MultiIndex, PolyMatrix, Rational, RationalMatrix,
};

/// `A(ξ) = Σ_{|α|=l} A_α ξ^α`, a `dim_to × dim_from` matrix of degree-`l`
/// forms in `n` variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorSymbol {
    name: String,
    symbol: PolyMatrix,
}

impl OperatorSymbol {
    pub fn new(name: impl Into<String>, symbol: PolyMatrix) -> Result<Self> {
        if symbol.nvars() == 0 {
            return Err(Error::InvalidParameter("operator needs at least one variable".into()));
        }
        if symbol.degree() == 0 {
            return Err(Error::InvalidParameter("operator order must be positive".into()));
        }
        if symbol.rows() == 0 || symbol.cols() == 0 {
            return Err(Error::InvalidParameter("operator dimensions must be positive".into()));
        }
        Ok(OperatorSymbol { name: name.into(), symbol })
    }

    pub fn from_coefficients(
        name: impl Into<String>,
        n: usize,
        order: u32,
        dim_to: usize,
        dim_from: usize,
        coeffs: &BTreeMap<MultiIndex, RationalMatrix>,
    ) -> Result<Self> {
        OperatorSymbol::new(name, PolyMatrix::from_coefficients(n, order, dim_to, dim_from, coeffs)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.symbol.nvars()
    }

    pub fn order(&self) -> u32 {
        self.symbol.degree()
    }

    pub fn dim_from(&self) -> usize {
        self.symbol.cols()
    }

    pub fn dim_to(&self) -> usize {
        self.symbol.rows()
    }

    pub fn symbol(&self) -> &PolyMatrix {
        &self.symbol
    }

    /// Coefficient matrix `A_α`.
    pub fn coefficient(&self, alpha: &MultiIndex) -> RationalMatrix {
        self.symbol.coefficient(alpha)
    }

    /// All `A_α` with `|α| = l`, zero ones included, in monomial order.
    pub fn coefficients(&self) -> Vec<(MultiIndex, RationalMatrix)> {
        multi_indices(self.n(), self.order())
            .into_iter()
            .map(|a| {
                let c = self.coefficient(&a);
                (a, c)
            })
            .collect()
    }

    pub fn eval(&self, xi: &[Rational]) -> Result<RationalMatrix> {
        self.symbol.eval(xi)
    }

    pub fn eval_i64(&self, xi: &[i64]) -> Result<RationalMatrix> {
        self.symbol.eval_i64(xi)
    }

    /// `A(ξ)·Q` for a constant matrix `Q`, i.e. the operator `u ↦ A(Qu)`.
    pub fn compose_constant(&self, q: &RationalMatrix) -> Result<OperatorSymbol> {
        if q.rows() != self.dim_from() {
            return Err(Error::Dimension(format!(
                "cannot compose a {}-column symbol with a {}x{} matrix",
                self.dim_from(),
                q.rows(),
                q.cols()
            )));
        }
        let coeffs: BTreeMap<MultiIndex, RationalMatrix> = self
            .coefficients()
            .into_iter()
            .map(|(a, c)| (a, c.try_mul(q).expect("shape checked")))
            .collect();
        OperatorSymbol::from_coefficients(
            self.name.clone(),
            self.n(),
            self.order(),
            self.dim_to(),
            q.cols(),
            &coeffs,
        )
    }

    /// Coefficient-view JSON: `{"name", "vars", "order", "from", "to", "coeffs"}`.
    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (alpha, c) in self.symbol.coefficients() {
            let rows: Vec<Vec<String>> = (0..c.rows())
                .map(|i| c.row(i).iter().map(format_rational).collect())
                .collect();
            coeffs.insert(alpha.key(), json!(rows));
        }
        json!({
            "name": self.name,
            "vars": self.n(),
            "order": self.order(),
            "from": self.dim_from(),
            "to": self.dim_to(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<OperatorSymbol> {
        let bad = |m: &str| Error::InvalidParameter(format!("operator JSON: {m}"));
        let n = v["vars"].as_u64().ok_or_else(|| bad("missing `vars`"))? as usize;
        let order = v["order"].as_u64().ok_or_else(|| bad("missing `order`"))? as u32;
        let name = v["name"].as_str().unwrap_or("operator").to_string();
        let obj = v["coeffs"].as_object().ok_or_else(|| bad("missing `coeffs`"))?;
        let mut coeffs = BTreeMap::new();
        for (key, rows) in obj {
            let alpha = MultiIndex::parse_key(key).ok_or_else(|| bad(&format!("bad index `{key}`")))?;
            let rows = rows.as_array().ok_or_else(|| bad("coefficient is not a matrix"))?;
            let parsed = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| bad("coefficient row is not an array"))?
                        .iter()
                        .map(|x| {
                            x.as_str()
                                .and_then(parse_rational)
                                .or_else(|| x.as_i64().map(|i| Rational::from_integer(i.into())))
                                .ok_or_else(|| bad(&format!("bad rational {x}")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            coeffs.insert(alpha, RationalMatrix::from_rows(parsed)?);
        }
        let first = coeffs.values().next();
        let dim_to = match v["to"].as_u64() {
            Some(t) => t as usize,
            None => first.map(|c| c.rows()).ok_or_else(|| bad("cannot infer `to`"))?,
        };
        let dim_from = match v["from"].as_u64() {
            Some(f) => f as usize,
            None => first.map(|c| c.cols()).ok_or_else(|| bad("cannot infer `from`"))?,
        };
        OperatorSymbol::from_coefficients(name, n, order, dim_to, dim_from, &coeffs)
    }
}
