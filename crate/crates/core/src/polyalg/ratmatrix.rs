use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, Rational};
use crate::error::{Error, Result};

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Affine solution set `particular + span(homogeneous)` of a linear system.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub particular: Vec<Rational>,
    pub homogeneous: Vec<Vec<Rational>>,
}

/// Row echelon form produced by fraction-free elimination.
struct Echelon {
    /// Integer rows of the echelon form, only the first `pivots.len()` rows.
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RationalMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| Rational::from_integer(x.into())).collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<Rational>], nrows: usize) -> Self {
        let mut m = RationalMatrix::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "matrix product {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix {}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension("vstack: column counts differ".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(RationalMatrix { rows: self.rows + other.rows, cols, data })
    }

    pub fn select_columns(&self, idx: &[usize]) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Fraction-free (Bareiss) forward elimination of the integer-scaled rows.
    fn echelon(&self) -> Echelon {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(self.row(i))).collect();
        let (m, n) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for col in 0..n {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (head, tail) = a.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let pv = &pivot_row[col];
            for row in tail.iter_mut() {
                let f = std::mem::take(&mut row[col]);
                for j in col + 1..n {
                    let mut x = pv * &row[j];
                    if !f.is_zero() && !pivot_row[j].is_zero() {
                        x -= &f * &pivot_row[j];
                    }
                    if !prev.is_one() {
                        debug_assert!((&x % &prev).is_zero(), "Bareiss division not exact");
                        x /= &prev;
                    }
                    row[j] = x;
                }
            }
            prev = a[r][col].clone();
            pivots.push(col);
            r += 1;
        }
        a.truncate(pivots.len());
        for row in a.iter_mut() {
            primitive(row);
        }
        Echelon { rows: a, pivots, cols: n }
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Exact rank and a basis of the right kernel; `rank + basis.len() == cols`.
    pub fn nullspace(&self) -> (usize, Vec<Vec<Rational>>) {
        let e = self.echelon();
        let basis = e.kernel_basis();
        (e.pivots.len(), basis)
    }

    /// Reduced row echelon form (nonzero rows only) and pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let e = self.echelon();
        let r = e.pivots.len();
        let mut rows: Vec<Vec<Rational>> = e
            .rows
            .iter()
            .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        for i in (0..r).rev() {
            let pc = e.pivots[i];
            let pv = rows[i][pc].clone();
            for x in rows[i].iter_mut() {
                *x /= &pv;
            }
            for k in 0..i {
                let f = rows[k][pc].clone();
                if f.is_zero() {
                    continue;
                }
                for j in pc..self.cols {
                    let t = &f * &rows[i][j];
                    rows[k][j] -= t;
                }
            }
        }
        let m = if r == 0 {
            RationalMatrix::zeros(0, self.cols)
        } else {
            RationalMatrix::from_rows(rows).expect("rref rows")
        };
        (m, e.pivots)
    }

    /// Solves `self · x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<LinearSolution>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has length {} for a system with {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = RationalMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        // Particular solution: free variables zero, last column is the rhs.
        let n = self.cols;
        let mut x = vec![Rational::zero(); n];
        for (i, &pc) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[i];
            let mut s = Rational::from_integer(row[n].clone());
            for j in pc + 1..n {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s -= Rational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = s / Rational::from_integer(row[pc].clone());
        }
        let homogeneous = Echelon { rows: e.rows.iter().map(|r| r[..n].to_vec()).collect(), pivots: e.pivots, cols: n }
            .kernel_basis();
        Ok(Some(LinearSolution { particular: x, homogeneous }))
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Result<Option<RationalMatrix>> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Ok(None);
        }
        let mut inv = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(Some(inv))
    }

    /// Moore–Penrose pseudoinverse via a rank factorization `M = C·F`:
    /// `M† = F*(FF*)⁻¹(C*C)⁻¹C*`.
    pub fn pseudoinverse(&self) -> RationalMatrix {
        let (f, pivots) = self.rref();
        if pivots.is_empty() {
            return RationalMatrix::zeros(self.cols, self.rows);
        }
        let c = self.select_columns(&pivots);
        let ft = f.transpose();
        let ct = c.transpose();
        let ff = f.try_mul(&ft).expect("F F*");
        let cc = ct.try_mul(&c).expect("C* C");
        let ff_inv = ff.inverse().expect("square").expect("F has full row rank");
        let cc_inv = cc.inverse().expect("square").expect("C has full column rank");
        ft.try_mul(&ff_inv)
            .and_then(|x| x.try_mul(&cc_inv))
            .and_then(|x| x.try_mul(&ct))
            .expect("pseudoinverse shapes")
    }

    /// The four Penrose axioms for `g` as a pseudoinverse of `self`.
    pub fn penrose_axioms_hold(&self, g: &RationalMatrix) -> bool {
        if (g.rows, g.cols) != (self.cols, self.rows) {
            return false;
        }
        let mg = self * g;
        let gm = g * self;
        &mg * self == *self && &gm * g == *g && mg.transpose() == mg && gm.transpose() == gm
    }

    /// Rational entries as strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(super::rational_to_f64).collect())
            .collect()
    }
}

impl Echelon {
    fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|&j| !is_pivot[j]) {
            let mut x = vec![Rational::zero(); n];
            x[free] = Rational::one();
            for (i, &pc) in self.pivots.iter().enumerate().rev() {
                if pc > free {
                    continue;
                }
                let row = &self.rows[i];
                let mut s = Rational::zero();
                for j in pc + 1..n {
                    if !row[j].is_zero() && !x[j].is_zero() {
                        s -= Rational::from_integer(row[j].clone()) * &x[j];
                    }
                }
                x[pc] = s / Rational::from_integer(row[pc].clone());
            }
            basis.push(normalize_vector(x));
        }
        basis
    }
}

/// Scales a rational row to a primitive integer row.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g > BigInt::one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Rescales a kernel vector to a primitive integer vector with positive
/// leading entry.
pub(crate) fn normalize_vector(v: Vec<Rational>) -> Vec<Rational> {
    let mut ints = integer_row(&v);
    primitive(&mut ints);
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
    }
    ints.into_iter().map(Rational::from_integer).collect()
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_mul(rhs).expect("matrix product shapes")
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shapes");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shapes");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| super::parse_rational(s).ok_or_else(|| format!("bad rational `{s}`")))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{frac, rat};

    #[test]
    fn identity_has_full_rank_and_trivial_kernel() {
        let (r, b) = RationalMatrix::identity(3).nullspace();
        assert_eq!(r, 3);
        assert!(b.is_empty());
    }

    #[test]
    fn kernel_of_rank_one_projector() {
        let m = RationalMatrix::from_i64(&[vec![1, 0], vec![0, 0]]);
        let (r, b) = m.nullspace();
        assert_eq!(r, 1);
        assert_eq!(b, vec![vec![rat(0), rat(1)]]);
    }

    #[test]
    fn stacked_divergence_coefficients_have_trivial_kernel() {
        let m = RationalMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let (r, b) = m.nullspace();
        assert_eq!((r, b.len()), (3, 0));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = RationalMatrix::from_i64(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![1, 0, 1, 0]]);
        let (r, b) = m.nullspace();
        assert_eq!(r, 2);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn pseudoinverse_examples() {
        let d = RationalMatrix::from_i64(&[vec![2, 0], vec![0, 0]]);
        let expected = RationalMatrix::from_rows(vec![vec![frac(1, 2), rat(0)], vec![rat(0), rat(0)]]).unwrap();
        assert_eq!(d.pseudoinverse(), expected);

        let row = RationalMatrix::from_i64(&[vec![1, 2]]);
        let col = RationalMatrix::from_rows(vec![vec![frac(1, 5)], vec![frac(2, 5)]]).unwrap();
        assert_eq!(row.pseudoinverse(), col);

        let inv = RationalMatrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(inv.pseudoinverse(), inv.inverse().unwrap().unwrap());

        let z = RationalMatrix::zeros(2, 3);
        assert_eq!(z.pseudoinverse(), RationalMatrix::zeros(3, 2));
    }

    #[test]
    fn solve_reports_inconsistency() {
        let m = RationalMatrix::from_i64(&[vec![1, 1], vec![2, 2]]);
        assert!(m.solve(&[rat(1), rat(3)]).unwrap().is_none());
        let s = m.solve(&[rat(1), rat(2)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&s.particular).unwrap(), vec![rat(1), rat(2)]);
        assert_eq!(s.homogeneous.len(), 1);
    }

    #[test]
    fn rref_of_dependent_rows() {
        let m = RationalMatrix::from_i64(&[vec![2, 4, 1], vec![1, 2, 0]]);
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(r.row(0), &[rat(1), rat(2), rat(0)]);
        assert_eq!(r.row(1), &[rat(0), rat(0), rat(1)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Product of two random factors, so rank deficiency is common.
        fn low_rank() -> impl Strategy<Value = RationalMatrix> {
            (1usize..=5, 1usize..=5, 1usize..=4).prop_flat_map(|(m, n, k)| {
                let entry = (-4i64..=4, 1i64..=3).prop_map(|(a, b)| frac(a, b));
                (
                    proptest::collection::vec(proptest::collection::vec(entry.clone(), k), m),
                    proptest::collection::vec(proptest::collection::vec(entry, n), k),
                )
                    .prop_map(|(x, y)| &RationalMatrix::from_rows(x).unwrap() * &RationalMatrix::from_rows(y).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn pseudoinverse_satisfies_penrose(a in low_rank()) {
                let g = a.pseudoinverse();
                prop_assert!(a.penrose_axioms_hold(&g));
                prop_assert_eq!(g.pseudoinverse(), a);
            }

            #[test]
            fn nullspace_is_exact(a in low_rank()) {
                let (r, basis) = a.nullspace();
                prop_assert_eq!(r + basis.len(), a.cols());
                for v in &basis {
                    prop_assert!(a.mul_vec(v).unwrap().iter().all(Zero::is_zero));
                }
                if !basis.is_empty() {
                    prop_assert_eq!(RationalMatrix::from_columns(&basis, a.cols()).rank(), basis.len());
                }
            }

            #[test]
            fn rref_pivots_match_rank(a in low_rank()) {
                let (m, pivots) = a.rref();
                prop_assert_eq!(pivots.len(), a.rank());
                for (i, &c) in pivots.iter().enumerate() {
                    prop_assert_eq!(m.get(i, c), &rat(1));
                }
                prop_assert_eq!(a.transpose().rank(), a.rank());
            }

            #[test]
            fn consistent_systems_are_solved(a in low_rank(), seed in 0i64..50) {
                let x: Vec<Rational> = (0..a.cols()).map(|i| frac(seed - 2 * i as i64, 3)).collect();
                let b = a.mul_vec(&x).unwrap();
                let sol = a.solve(&b).unwrap().expect("consistent by construction");
                prop_assert_eq!(a.mul_vec(&sol.particular).unwrap(), b);
                prop_assert_eq!(sol.homogeneous.len(), a.cols() - a.rank());
            }
        }
    }
}
