use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde_json::{json, Value};

use super::{PotentialSymbol, Provenance};
use crate::error::{Error, Result};
use crate::operator::sampling::{random_integer_point, random_rational, rng, structured_directions};
use crate::operator::{generic_rank, OperatorSymbol};
use crate::polyalg::{multi_indices, MultiIndex, Rational, RationalMatrix};

const RANK_TRIALS: usize = 10;

/// All potentials of a fixed order `κ`.
///
/// `A(ξ)B(ξ) = 0` constrains each column of `B` separately, so the solution
/// space is `dim U` copies of the space of `V`-valued degree-`κ` forms `b`
/// with `A(ξ)b(ξ) = 0`.
#[derive(Clone, Debug)]
pub struct PotentialSearch {
    pub kappa: u32,
    pub n: usize,
    pub dim_v: usize,
    pub dim_u: usize,
    /// Monomials of degree `κ`; column unknowns are indexed `(i, α)` row-major.
    pub monomials: Vec<MultiIndex>,
    pub column_basis: Vec<Vec<Rational>>,
    pub solution_space_dim: usize,
    pub max_generic_rank: usize,
    /// Best, over the random combinations, of the smallest rank seen on the
    /// probe set (coordinate directions, `±e_i ± e_j`, random points on each
    /// coordinate hyperplane). Rank drops on special planes show up here.
    pub min_probe_rank: usize,
    pub expected_rank: usize,
    pub potential_exists: bool,
    pub seed: u64,
}

impl PotentialSearch {
    /// The full basis: every column solution placed in every column slot.
    pub fn basis(&self, name: &str) -> Result<Vec<PotentialSymbol>> {
        let mut out = Vec::with_capacity(self.solution_space_dim);
        for j in 0..self.dim_u {
            for (t, s) in self.column_basis.iter().enumerate() {
                let mut coeffs: BTreeMap<MultiIndex, RationalMatrix> = BTreeMap::new();
                for (ai, alpha) in self.monomials.iter().enumerate() {
                    let mut c = RationalMatrix::zeros(self.dim_v, self.dim_u);
                    for i in 0..self.dim_v {
                        c.set(i, j, s[i * self.monomials.len() + ai].clone());
                    }
                    coeffs.insert(alpha.clone(), c);
                }
                let sym = OperatorSymbol::from_coefficients(
                    format!("{name}_k{}_{}_{}", self.kappa, j + 1, t + 1),
                    self.n,
                    self.kappa,
                    self.dim_v,
                    self.dim_u,
                    &coeffs,
                )?;
                out.push(PotentialSymbol::new(sym, Provenance::OrderSearch));
            }
        }
        Ok(out)
    }

    fn column_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_columns(&self.column_basis, self.dim_v * self.monomials.len())
    }

    /// Whether `b` lies in the solution space, by exact linear solves column
    /// by column.
    pub fn contains(&self, b: &OperatorSymbol) -> Result<bool> {
        if b.n() != self.n || b.dim_to() != self.dim_v || b.order() != self.kappa {
            return Err(Error::Dimension("candidate does not match the searched shape".into()));
        }
        let basis = self.column_matrix();
        let nm = self.monomials.len();
        for j in 0..b.dim_from() {
            let mut target = vec![Rational::zero(); self.dim_v * nm];
            for (ai, alpha) in self.monomials.iter().enumerate() {
                let c = b.coefficient(alpha);
                for i in 0..self.dim_v {
                    target[i * nm + ai] = c.get(i, j).clone();
                }
            }
            if self.column_basis.is_empty() {
                if target.iter().any(|x| !x.is_zero()) {
                    return Ok(false);
                }
                continue;
            }
            if basis.solve(&target)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Column solutions evaluated at `ξ`, as a `dim V × dim S` matrix.
    fn eval_columns(&self, xi: &[i64]) -> RationalMatrix {
        let xr: Vec<Rational> = xi.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let mono: Vec<Rational> = self
            .monomials
            .iter()
            .map(|a| {
                a.exponents()
                    .iter()
                    .zip(&xr)
                    .fold(Rational::from_integer(1.into()), |acc, (&e, x)| {
                        acc * num_traits::pow::pow(x.clone(), e as usize)
                    })
            })
            .collect();
        let nm = self.monomials.len();
        let mut m = RationalMatrix::zeros(self.dim_v, self.column_basis.len());
        for (t, s) in self.column_basis.iter().enumerate() {
            for i in 0..self.dim_v {
                let v = (0..nm).fold(Rational::zero(), |acc, ai| {
                    let c = &s[i * nm + ai];
                    if c.is_zero() {
                        acc
                    } else {
                        acc + c * &mono[ai]
                    }
                });
                m.set(i, t, v);
            }
        }
        m
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.kappa,
            "solution_space_dim": self.solution_space_dim,
            "max_generic_rank": self.max_generic_rank,
            "min_probe_rank": self.min_probe_rank,
            "expected_rank": self.expected_rank,
            "potential_exists": self.potential_exists,
            "seed": self.seed,
        })
    }
}

/// Linear system for a single column `b` of `B`: rows `(p, γ)` with
/// `|γ| = l + κ`, columns `(i, α)` with `|α| = κ`.
fn column_system(a: &OperatorSymbol, kappa: u32) -> (Vec<MultiIndex>, RationalMatrix) {
    let alphas = multi_indices(a.n(), kappa);
    let gammas = multi_indices(a.n(), a.order() + kappa);
    let gindex: HashMap<MultiIndex, usize> = gammas.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let (na, ng) = (alphas.len(), gammas.len());
    let mut sys = RationalMatrix::zeros(a.dim_to() * ng, a.dim_from() * na);
    for (beta, c) in a.coefficients() {
        if c.is_zero() {
            continue;
        }
        for (ai, alpha) in alphas.iter().enumerate() {
            let gi = gindex[&beta.add(alpha)];
            for p in 0..a.dim_to() {
                for i in 0..a.dim_from() {
                    let x = c.get(p, i);
                    if !x.is_zero() {
                        let (r, col) = (p * ng + gi, i * na + ai);
                        let cur = sys.get(r, col) + x;
                        sys.set(r, col, cur);
                    }
                }
            }
        }
    }
    (alphas, sys)
}

/// Solves for every `B` of order `κ` with `A(ξ)B(ξ) ≡ 0` and probes the
/// generic rank of the solution space with seeded random combinations.
pub fn potentials_of_order(
    a: &OperatorSymbol,
    kappa: u32,
    seed: u64,
    dim_u: Option<usize>,
) -> Result<PotentialSearch> {
    if kappa == 0 {
        return Err(Error::InvalidParameter("potential order must be at least 1".into()));
    }
    let dim_v = a.dim_from();
    let dim_u = dim_u.unwrap_or(dim_v);
    if dim_u == 0 {
        return Err(Error::InvalidParameter("dim U must be positive".into()));
    }
    let (monomials, sys) = column_system(a, kappa);
    let (_, column_basis) = sys.nullspace();
    let expected_rank = dim_v - generic_rank(a)?;
    let mut search = PotentialSearch {
        kappa,
        n: a.n(),
        dim_v,
        dim_u,
        monomials,
        solution_space_dim: dim_u * column_basis.len(),
        column_basis,
        max_generic_rank: 0,
        min_probe_rank: 0,
        expected_rank,
        potential_exists: false,
        seed,
    };
    if !search.column_basis.is_empty() {
        let mut g = rng(seed);
        let ds = search.column_basis.len();
        let n = a.n();
        let mut probes = structured_directions(n);
        if n >= 3 {
            for i in 0..n {
                let mut p = random_integer_point(&mut g, n);
                p[i] = 0;
                if p.iter().any(|&x| x != 0) {
                    probes.push(p);
                }
            }
        }
        let probe_columns: Vec<RationalMatrix> = probes.iter().map(|p| search.eval_columns(p)).collect();
        for _ in 0..RANK_TRIALS {
            let xi = random_integer_point(&mut g, n);
            let mut combo = RationalMatrix::zeros(ds, dim_u);
            for t in 0..ds {
                for j in 0..dim_u {
                    combo.set(t, j, random_rational(&mut g));
                }
            }
            let rank = (&search.eval_columns(&xi) * &combo).rank();
            search.max_generic_rank = search.max_generic_rank.max(rank);
            let worst = probe_columns.iter().map(|m| (m * &combo).rank()).min().unwrap_or(rank).min(rank);
            search.min_probe_rank = search.min_probe_rank.max(worst);
        }
    }
    // A potential needs rank dim V - r at every ξ ≠ 0, not only generically.
    search.potential_exists =
        search.max_generic_rank == expected_rank && search.min_probe_rank == expected_rank;
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{rat_vec, HomPoly, PolyMatrix};

    fn div2() -> OperatorSymbol {
        let s = PolyMatrix::from_rows(2, 1, vec![vec![HomPoly::var(2, 0), HomPoly::var(2, 1)]]).unwrap();
        OperatorSymbol::new("div", s).unwrap()
    }

    #[test]
    fn divergence_has_first_order_potential() {
        let a = div2();
        let s = potentials_of_order(&a, 1, 0, None).unwrap();
        assert!(s.potential_exists);
        assert_eq!(s.column_basis.len(), 1);
        assert_eq!(s.solution_space_dim, 2);
        let perp = PolyMatrix::from_rows(
            2,
            1,
            vec![vec![HomPoly::linear(&rat_vec(&[0, -1]))], vec![HomPoly::var(2, 0)]],
        )
        .unwrap();
        let perp = OperatorSymbol::new("perp", perp).unwrap();
        let narrow = potentials_of_order(&a, 1, 0, Some(1)).unwrap();
        assert!(narrow.contains(&perp).unwrap());
        for b in s.basis("div").unwrap() {
            assert!(a.symbol().try_mul(b.symbol.symbol()).unwrap().is_zero());
        }
    }

    #[test]
    fn zero_order_rejected() {
        assert!(potentials_of_order(&div2(), 0, 0, None).is_err());
    }
}
