use num_traits::Zero;

use super::{PotentialSymbol, Provenance};
use crate::error::{Error, Result};
use crate::operator::sampling::{random_rational_point, rng};
use crate::operator::{generic_rank, OperatorSymbol};
use crate::polyalg::{HomPoly, PolyMatrix, Rational};

/// Seed of the internal Penrose self-check; fixed so constructions are
/// reproducible.
const SELF_CHECK_SEED: u64 = 0x5eed;
const SELF_CHECK_POINTS: usize = 20;

/// `A†(ξ) = -N(ξ) / c_r(ξ)` away from the origin.
#[derive(Clone, Debug)]
pub struct DecellPseudoinverse {
    pub rank: usize,
    pub c_r: HomPoly,
    pub numerator: PolyMatrix,
    /// `M^{r-1} + c_1 M^{r-2} + … + c_{r-1} I`.
    pub inner: PolyMatrix,
}

impl DecellPseudoinverse {
    /// Exact `A†(ξ)`, or `None` where `c_r(ξ) = 0`.
    pub fn eval(&self, xi: &[Rational]) -> Result<Option<crate::polyalg::RationalMatrix>> {
        let c = self.c_r.eval(xi)?;
        if c.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.numerator.eval(xi)?.scale(&-c.recip())))
    }
}

pub fn decell_pseudoinverse(a: &OperatorSymbol, r: usize) -> Result<DecellPseudoinverse> {
    let sym = a.symbol();
    let at = sym.transpose();
    let m = sym.try_mul(&at)?;
    let c = crate::polyalg::faddeev_leverrier(&m)?;
    if r == 0 || r > c.len() {
        return Err(Error::Precondition(format!(
            "rank {r} is outside 1..={} for a {}x{} symbol",
            c.len(),
            a.dim_to(),
            a.dim_from()
        )));
    }
    if c[r - 1].is_zero() {
        return Err(Error::Precondition(format!("c_{r} vanishes identically; the symbol has rank < {r}")));
    }
    // Horner: S_0 = I, S_j = M S_{j-1} + c_j I.
    let w = a.dim_to();
    let mut inner = PolyMatrix::identity(a.n(), w);
    for cj in c.iter().take(r - 1) {
        let mut next = m.try_mul(&inner)?;
        for i in 0..w {
            let e = next.get(i, i) + cj;
            next.set(i, i, e)?;
        }
        inner = next;
    }
    let numerator = at.try_mul(&inner)?;
    let d = DecellPseudoinverse { rank: r, c_r: c[r - 1].clone(), numerator, inner };
    self_check(a, &d)?;
    Ok(d)
}

/// Compares `-N/c_r` against the exact pseudoinverse at seeded rational
/// points. A mismatch is a bug in the conventions, never a property of `A`.
fn self_check(a: &OperatorSymbol, d: &DecellPseudoinverse) -> Result<()> {
    let mut g = rng(SELF_CHECK_SEED);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < SELF_CHECK_POINTS && attempts < 50 * SELF_CHECK_POINTS {
        attempts += 1;
        let xi = random_rational_point(&mut g, a.n());
        let Some(p) = d.eval(&xi)? else { continue };
        let av = a.eval(&xi)?;
        if !av.penrose_axioms_hold(&p) || p != av.pseudoinverse() {
            let pt: Vec<String> = xi.iter().map(crate::polyalg::format_rational).collect();
            return Err(Error::SelfCheck(format!(
                "Decell convention mismatch at ξ = ({})",
                pt.join(", ")
            )));
        }
        checked += 1;
    }
    if checked < SELF_CHECK_POINTS {
        return Err(Error::SelfCheck(format!(
            "only {checked} of {SELF_CHECK_POINTS} self-check points had c_r ≠ 0"
        )));
    }
    Ok(())
}

/// `B(ξ) = c_r(ξ) I + A*(ξ)(M^{r-1} + … + c_{r-1} I) A(ξ) = c_r (I − A†A)`,
/// of order `2lr`, with `U = V`.
pub fn pseudoinverse_potential(a: &OperatorSymbol) -> Result<PotentialSymbol> {
    let r = generic_rank(a)?;
    let d = decell_pseudoinverse(a, r)?;
    let na = d.numerator.try_mul(a.symbol())?;
    let mut b = na;
    for i in 0..a.dim_from() {
        let e = b.get(i, i) + &d.c_r;
        b.set(i, i, e)?;
    }
    let sym = OperatorSymbol::new(format!("{}_pinv", a.name()), b)?;
    Ok(PotentialSymbol::new(sym, Provenance::PseudoinverseConstruction))
}
