use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::sampling::{sample_frequencies, to_rational};
use super::OperatorSymbol;
use crate::error::{Error, Result};
use crate::par;
use crate::polyalg::{faddeev_leverrier, format_rational, HomPoly, PolyMatrix, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RankVerdict {
    VerifiedProbabilistic,
    NotConstant,
    Inconclusive,
}

impl RankVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RankVerdict::VerifiedProbabilistic => "constant_rank_verified_probabilistic",
            RankVerdict::NotConstant => "rank_not_constant",
            RankVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Constant-rank certificate. The upper bound (`tail_vanishes`) is exact; the
/// lower bound is only sampled.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub generic_rank: usize,
    pub tail_vanishes: bool,
    pub min_sampled_cr: Rational,
    pub sample_count: usize,
    pub drop_points: Vec<Vec<i64>>,
    pub verdict: RankVerdict,
    pub seed: u64,
}

impl RankReport {
    pub fn to_json(&self) -> Value {
        json!({
            "generic_rank": self.generic_rank,
            "tail_vanishes": self.tail_vanishes,
            "verdict": self.verdict.as_str(),
            "drop_points": self.drop_points,
            "seed": self.seed,
        })
    }

    pub fn min_sampled_cr_string(&self) -> String {
        format_rational(&self.min_sampled_cr)
    }
}

/// Exact rank of `A(ξ)` at a nonzero rational frequency.
pub fn symbol_rank_at(a: &OperatorSymbol, xi: &[Rational]) -> Result<usize> {
    if xi.len() != a.n() {
        return Err(Error::Dimension(format!(
            "frequency has length {} but the operator has {} variables",
            xi.len(),
            a.n()
        )));
    }
    if xi.iter().all(Zero::is_zero) {
        return Err(Error::Domain("rank at the origin is not meaningful".into()));
    }
    Ok(a.eval(xi)?.rank())
}

/// Characteristic coefficients of `M = A A*`.
pub(crate) fn gram_coefficients(a: &OperatorSymbol) -> Result<(PolyMatrix, Vec<HomPoly>)> {
    let m = a.symbol().try_mul(&a.symbol().transpose())?;
    let c = faddeev_leverrier(&m)?;
    Ok((m, c))
}

/// Largest `j` with `c_j ≢ 0` for `M = AA*`, the exact generic rank.
pub fn generic_rank(a: &OperatorSymbol) -> Result<usize> {
    let (_, c) = gram_coefficients(a)?;
    Ok(c.iter().rposition(|p| !p.is_zero()).map_or(0, |j| j + 1))
}

pub fn constant_rank_check(a: &OperatorSymbol, sample_count: usize, seed: u64) -> Result<RankReport> {
    let (_, c) = gram_coefficients(a)?;
    let samples = sample_frequencies(a.n(), sample_count, seed);
    let ranks = par::map(&samples, |xi| a.eval_i64(xi).map(|m| m.rank()));
    let ranks = ranks.into_iter().collect::<Result<Vec<_>>>()?;
    let r = ranks.iter().copied().max().unwrap_or(0);
    let tail_vanishes = c[r..].iter().all(HomPoly::is_zero);

    // (-1)^r c_r is the sum of principal r-minors of the PSD matrix M.
    let witness = |xi: &Vec<i64>| -> Result<Rational> {
        if r == 0 {
            return Ok(Rational::zero());
        }
        let v = c[r - 1].eval(&to_rational(xi))?;
        Ok(if r % 2 == 1 { -v } else { v })
    };
    let values = par::map(&samples, witness).into_iter().collect::<Result<Vec<_>>>()?;
    let min_sampled_cr = values.iter().min().cloned().unwrap_or_else(Rational::zero);
    debug_assert!(!min_sampled_cr.is_negative());

    let drop_points: Vec<Vec<i64>> = samples
        .iter()
        .zip(&values)
        .zip(&ranks)
        .filter(|((_, w), &rk)| r > 0 && (w.is_zero() || rk < r))
        .map(|((xi, _), _)| xi.clone())
        .collect();

    let verdict = if !drop_points.is_empty() {
        RankVerdict::NotConstant
    } else if tail_vanishes && r > 0 {
        RankVerdict::VerifiedProbabilistic
    } else {
        RankVerdict::Inconclusive
    };
    Ok(RankReport {
        generic_rank: r,
        tail_vanishes,
        min_sampled_cr,
        sample_count: samples.len(),
        drop_points,
        verdict,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{rat_vec, HomPoly, PolyMatrix};

    fn op(rows: Vec<Vec<HomPoly>>) -> OperatorSymbol {
        let n = rows[0][0].nvars();
        let d = rows[0][0].degree();
        OperatorSymbol::new("t", PolyMatrix::from_rows(n, d, rows).unwrap()).unwrap()
    }

    fn x(n: usize, i: usize) -> HomPoly {
        HomPoly::var(n, i)
    }

    #[test]
    fn gradient_rank_one() {
        let g = op(vec![vec![x(2, 0)], vec![x(2, 1)]]);
        assert_eq!(symbol_rank_at(&g, &rat_vec(&[1, 1])).unwrap(), 1);
        assert!(matches!(symbol_rank_at(&g, &rat_vec(&[0, 0])), Err(Error::Domain(_))));
    }

    #[test]
    fn separate_convexity_drops_rank() {
        let z = HomPoly::zero(2, 1);
        let a = op(vec![vec![z.clone(), x(2, 0)], vec![x(2, 1), z]]);
        assert_eq!(symbol_rank_at(&a, &rat_vec(&[1, 0])).unwrap(), 1);
        assert_eq!(symbol_rank_at(&a, &rat_vec(&[1, 1])).unwrap(), 2);
        let rep = constant_rank_check(&a, 50, 0).unwrap();
        assert_eq!(rep.verdict, RankVerdict::NotConstant);
        assert!(rep.drop_points.contains(&vec![1, 0]));
    }

    #[test]
    fn divergence_3d_verified() {
        let a = op(vec![vec![x(3, 0), x(3, 1), x(3, 2)]]);
        let rep = constant_rank_check(&a, 50, 1).unwrap();
        assert_eq!(rep.generic_rank, 1);
        assert!(rep.tail_vanishes);
        assert_eq!(rep.verdict, RankVerdict::VerifiedProbabilistic);
        assert_eq!(rep.to_json()["verdict"], "constant_rank_verified_probabilistic");
        assert_eq!(generic_rank(&a).unwrap(), 1);
    }
}
