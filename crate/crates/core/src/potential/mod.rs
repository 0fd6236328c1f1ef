//! Potentials `B` with `im B(ξ) = ker A(ξ)`: the pseudoinverse construction,
//! fixed-order search, exactness verification and symbol isomorphism.

mod decell;
mod iso;
mod search;

pub use decell::{decell_pseudoinverse, pseudoinverse_potential, DecellPseudoinverse};
pub use iso::symbol_isomorphism;
pub use search::{potentials_of_order, PotentialSearch};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operator::sampling::sample_frequencies;
use crate::operator::OperatorSymbol;
use crate::par;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    PseudoinverseConstruction,
    UserSupplied,
    OrderSearch,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::PseudoinverseConstruction => "pseudoinverse_construction",
            Provenance::UserSupplied => "user_supplied",
            Provenance::OrderSearch => "order_search",
        }
    }
}

/// A potential operator `B: U → V` plus where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSymbol {
    pub symbol: OperatorSymbol,
    pub provenance: Provenance,
}

impl PotentialSymbol {
    pub fn new(symbol: OperatorSymbol, provenance: Provenance) -> Self {
        PotentialSymbol { symbol, provenance }
    }

    pub fn user(symbol: OperatorSymbol) -> Self {
        PotentialSymbol::new(symbol, Provenance::UserSupplied)
    }

    pub fn dim_u(&self) -> usize {
        self.symbol.dim_from()
    }

    pub fn dim_v(&self) -> usize {
        self.symbol.dim_to()
    }

    pub fn order(&self) -> u32 {
        self.symbol.order()
    }
}

#[derive(Clone, Debug)]
pub struct ExactnessReport {
    pub product_is_zero: bool,
    pub rank_complementarity: bool,
    pub samples: usize,
    /// First frequency where `rank B(ξ) + rank A(ξ) ≠ dim V`, if any.
    pub mismatch: Option<Vec<i64>>,
}

impl ExactnessReport {
    pub fn exact(&self) -> bool {
        self.product_is_zero && self.rank_complementarity
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exact": self.exact(),
            "product_is_zero": self.product_is_zero,
            "rank_complementarity": self.rank_complementarity,
            "samples": self.samples,
            "mismatch": self.mismatch,
        })
    }
}

/// `AB = 0` symbolically, plus `rank B(ξ) = dim V − rank A(ξ)` at sampled
/// frequencies.
pub fn verify_exactness(
    a: &OperatorSymbol,
    b: &OperatorSymbol,
    samples: usize,
    seed: u64,
) -> Result<ExactnessReport> {
    if a.dim_from() != b.dim_to() || a.n() != b.n() {
        return Err(Error::Dimension(format!(
            "annihilator acts on {} components in {} variables, potential produces {} in {}",
            a.dim_from(),
            a.n(),
            b.dim_to(),
            b.n()
        )));
    }
    let product_is_zero = a.symbol().try_mul(b.symbol())?.is_zero();
    let points = sample_frequencies(a.n(), samples, seed);
    let dim_v = a.dim_from();
    let ok = par::map(&points, |xi| -> Result<bool> {
        Ok(a.eval_i64(xi)?.rank() + b.eval_i64(xi)?.rank() == dim_v)
    });
    let mut mismatch = None;
    for (xi, r) in points.iter().zip(ok) {
        if !r? {
            mismatch = Some(xi.clone());
            break;
        }
    }
    Ok(ExactnessReport {
        product_is_zero,
        rank_complementarity: mismatch.is_none(),
        samples: points.len(),
        mismatch,
    })
}
