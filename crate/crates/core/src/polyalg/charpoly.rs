use super::{HomPoly, PolyMatrix, Rational};
use crate::error::{Error, Result};

/// Characteristic coefficients of a square polynomial matrix `P`:
/// `det(λI - P) = λ^m + c_1 λ^{m-1} + … + c_m`.
///
/// Returns `[c_1, …, c_m]`, with `c_j` homogeneous of degree `j·deg P`.
pub fn faddeev_leverrier(p: &PolyMatrix) -> Result<Vec<HomPoly>> {
    let m = p.rows();
    if m != p.cols() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial of a {}x{} matrix",
            p.rows(),
            p.cols()
        )));
    }
    let mut coeffs = Vec::with_capacity(m);
    let mut nk = p.clone();
    for k in 1..=m {
        let tr = nk.trace()?;
        let ck = tr.scale(&-Rational::from_integer((k as i64).into()).recip());
        coeffs.push(ck.clone());
        if k == m {
            break;
        }
        let mut shifted = nk;
        for i in 0..m {
            let e = shifted.get(i, i) + &ck;
            shifted.set(i, i, e)?;
        }
        nk = p.try_mul(&shifted)?;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{multi_indices, rat, rat_vec};
    use proptest::prelude::*;

    /// Determinant by Laplace expansion along the first row.
    fn det(m: &[Vec<HomPoly>], n: usize) -> HomPoly {
        let k = m.len();
        if k == 0 {
            return HomPoly::constant(n, rat(1));
        }
        let mut acc: Option<HomPoly> = None;
        for j in 0..k {
            let minor: Vec<Vec<HomPoly>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let mut t = &m[0][j] * &det(&minor, n);
            if j % 2 == 1 {
                t = -&t;
            }
            acc = Some(match acc {
                None => t,
                Some(a) => &a + &t,
            });
        }
        acc.unwrap()
    }

    fn subsets(m: usize, j: usize) -> Vec<Vec<usize>> {
        if j == 0 {
            return vec![vec![]];
        }
        (0..m)
            .flat_map(|first| {
                subsets(m, j - 1)
                    .into_iter()
                    .filter(move |s| s.first().map_or(true, |&x| x > first))
                    .map(move |mut s| {
                        s.insert(0, first);
                        s
                    })
            })
            .collect()
    }

    /// `c_j = (-1)^j · Σ principal j-minors`.
    fn oracle(p: &PolyMatrix) -> Vec<HomPoly> {
        let m = p.rows();
        (1..=m)
            .map(|j| {
                let mut sum = HomPoly::zero(p.nvars(), j as u32 * p.degree());
                for s in subsets(m, j) {
                    let sub: Vec<Vec<HomPoly>> =
                        s.iter().map(|&r| s.iter().map(|&c| p.get(r, c).clone()).collect()).collect();
                    sum = &sum + &det(&sub, p.nvars());
                }
                if j % 2 == 1 {
                    -&sum
                } else {
                    sum
                }
            })
            .collect()
    }

    #[test]
    fn curl_free_symbol_coefficients() {
        // P = ξ ξ^T in 2D: c_1 = -|ξ|^2, c_2 = 0.
        let g = PolyMatrix::from_rows(2, 1, vec![vec![HomPoly::var(2, 0)], vec![HomPoly::var(2, 1)]]).unwrap();
        let p = g.try_mul(&g.transpose()).unwrap();
        let c = faddeev_leverrier(&p).unwrap();
        assert_eq!(c[0].to_string(), "-d1^2 - d2^2");
        assert!(c[1].is_zero());
        assert_eq!(c[1].degree(), 4);
    }

    #[test]
    fn non_square_rejected() {
        assert!(faddeev_leverrier(&PolyMatrix::zeros(2, 1, 2, 3)).is_err());
    }

    fn random_matrix() -> impl Strategy<Value = PolyMatrix> {
        (1usize..=4, 0u32..=2).prop_flat_map(|(m, d)| {
            let nmono = multi_indices(2, d).len();
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, nmono), m * m).prop_map(
                move |cs| {
                    let basis = multi_indices(2, d);
                    let rows = (0..m)
                        .map(|i| {
                            (0..m)
                                .map(|j| {
                                    HomPoly::from_terms(
                                        2,
                                        d,
                                        basis.iter().cloned().zip(rat_vec(&cs[i * m + j])),
                                    )
                                    .unwrap()
                                })
                                .collect()
                        })
                        .collect();
                    PolyMatrix::from_rows(2, d, rows).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn agrees_with_principal_minor_oracle(p in random_matrix()) {
            prop_assert_eq!(faddeev_leverrier(&p).unwrap(), oracle(&p));
        }
    }
}
