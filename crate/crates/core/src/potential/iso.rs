use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operator::sampling::{random_rational, rng};
use crate::operator::OperatorSymbol;
use crate::polyalg::{Rational, RationalMatrix};

const INVERTIBILITY_TRIALS: usize = 10;

/// Looks for an invertible `Q` with `B1_α Q = B2_α` for every `α`.
///
/// The system splits by columns of `Q`; each column solves the stacked
/// coefficients of `B1` against the matching stacked column of `B2`.
/// Invertibility over the affine solution set is probed with seeded random
/// points of that set.
pub fn symbol_isomorphism(
    b1: &OperatorSymbol,
    b2: &OperatorSymbol,
    seed: u64,
) -> Result<Option<RationalMatrix>> {
    if (b1.n(), b1.order(), b1.dim_to(), b1.dim_from()) != (b2.n(), b2.order(), b2.dim_to(), b2.dim_from()) {
        return Err(Error::Dimension(format!(
            "symbols differ in shape: {}x{} order {} vs {}x{} order {}",
            b1.dim_to(),
            b1.dim_from(),
            b1.order(),
            b2.dim_to(),
            b2.dim_from(),
            b2.order()
        )));
    }
    let u = b1.dim_from();
    let mut k1 = RationalMatrix::zeros(0, u);
    let mut k2 = RationalMatrix::zeros(0, u);
    for ((_, c1), (_, c2)) in b1.coefficients().into_iter().zip(b2.coefficients()) {
        k1 = k1.vstack(&c1)?;
        k2 = k2.vstack(&c2)?;
    }
    let mut particular = Vec::with_capacity(u);
    let mut homogeneous = Vec::new();
    for j in 0..u {
        match k1.solve(&k2.column(j))? {
            None => return Ok(None),
            Some(sol) => {
                particular.push(sol.particular);
                homogeneous = sol.homogeneous;
            }
        }
    }
    let p = RationalMatrix::from_columns(&particular, u);
    if homogeneous.is_empty() {
        return Ok(if p.rank() == u { Some(p) } else { None });
    }
    let mut g = rng(seed);
    for trial in 0..INVERTIBILITY_TRIALS {
        let mut q = p.clone();
        if trial > 0 {
            for j in 0..u {
                for h in &homogeneous {
                    let t = random_rational(&mut g);
                    if t.is_zero() {
                        continue;
                    }
                    for i in 0..u {
                        let v: Rational = q.get(i, j) + &t * &h[i];
                        q.set(i, j, v);
                    }
                }
            }
        }
        if q.rank() == u {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{HomPoly, PolyMatrix};

    fn grad() -> OperatorSymbol {
        let s = PolyMatrix::from_rows(
            2,
            1,
            vec![
                vec![HomPoly::var(2, 0), HomPoly::zero(2, 1)],
                vec![HomPoly::var(2, 1), HomPoly::zero(2, 1)],
                vec![HomPoly::zero(2, 1), HomPoly::var(2, 0)],
                vec![HomPoly::zero(2, 1), HomPoly::var(2, 1)],
            ],
        )
        .unwrap();
        OperatorSymbol::new("grad", s).unwrap()
    }

    #[test]
    fn planted_isomorphism_is_recovered() {
        let q0 = RationalMatrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        let b1 = grad();
        let b2 = b1.compose_constant(&q0).unwrap();
        let q = symbol_isomorphism(&b1, &b2, 0).unwrap().unwrap();
        assert_eq!(b1.compose_constant(&q).unwrap(), b2);
    }

    #[test]
    fn singular_image_is_not_isomorphic() {
        let b1 = grad();
        let b2 = b1.compose_constant(&RationalMatrix::from_i64(&[vec![1, 1], vec![1, 1]])).unwrap();
        assert!(symbol_isomorphism(&b1, &b2, 0).unwrap().is_none());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let b1 = grad();
        let b2 = b1.compose_constant(&RationalMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0]])).unwrap();
        assert!(matches!(symbol_isomorphism(&b1, &b2, 0), Err(Error::Dimension(_))));
    }
}
