use serde_json::{json, Value};

use super::OperatorSymbol;
use crate::error::Result;
use crate::polyalg::{format_rational, Rational, RationalMatrix};

#[derive(Clone, Debug)]
pub struct CocancelReport {
    /// Basis of `I_B = ⋂_α ker B_α`.
    pub basis: Vec<Vec<Rational>>,
    pub cocanceling: bool,
}

impl CocancelReport {
    pub fn to_json(&self) -> Value {
        let basis: Vec<Vec<String>> =
            self.basis.iter().map(|v| v.iter().map(format_rational).collect()).collect();
        json!({ "cocanceling": self.cocanceling, "intersection_dim": self.basis.len(), "intersection_basis": basis })
    }

    /// Columns spanning the orthogonal complement `J` of `I_B`.
    pub fn complement(&self, dim: usize) -> RationalMatrix {
        if self.basis.is_empty() {
            return RationalMatrix::identity(dim);
        }
        let i_rows = RationalMatrix::from_rows(self.basis.clone()).expect("uniform kernel vectors");
        let (_, j) = i_rows.nullspace();
        RationalMatrix::from_columns(&j, dim)
    }
}

/// `⋂_{ξ≠0} ker B(ξ)` computed as the kernel of the stacked coefficients.
pub fn cocanceling_check(b: &OperatorSymbol) -> Result<CocancelReport> {
    let mut stacked = RationalMatrix::zeros(0, b.dim_from());
    for (_, c) in b.coefficients() {
        stacked = stacked.vstack(&c)?;
    }
    let (_, basis) = stacked.nullspace();
    Ok(CocancelReport { cocanceling: basis.is_empty(), basis })
}
