use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::{multi_indices, rational_to_f64, HomPoly, MultiIndex, Rational, RationalMatrix};
use crate::error::{Error, Result};

/// Matrix whose entries are homogeneous polynomials of one common degree in
/// one common set of variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    n: usize,
    degree: u32,
    rows: usize,
    cols: usize,
    entries: Vec<HomPoly>,
}

impl PolyMatrix {
    pub fn zeros(n: usize, degree: u32, rows: usize, cols: usize) -> Self {
        PolyMatrix { n, degree, rows, cols, entries: vec![HomPoly::zero(n, degree); rows * cols] }
    }

    /// Constant identity, degree zero.
    pub fn identity(n: usize, size: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, 0, size, size);
        for i in 0..size {
            m.entries[i * size + i] = HomPoly::constant(n, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every entry must live in `(n, degree)`.
    pub fn from_rows(n: usize, degree: u32, rows: Vec<Vec<HomPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged polynomial matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.nvars() != n || p.degree() != degree {
                    return Err(Error::Dimension(format!(
                        "entry [{i}][{j}] has (n={}, deg={}), expected (n={n}, deg={degree})",
                        p.nvars(),
                        p.degree()
                    )));
                }
            }
        }
        Ok(PolyMatrix { n, degree, rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Rebuilds `Σ_α M_α ξ^α` from coefficient matrices of one shape.
    pub fn from_coefficients(
        n: usize,
        degree: u32,
        rows: usize,
        cols: usize,
        coeffs: &BTreeMap<MultiIndex, RationalMatrix>,
    ) -> Result<Self> {
        let mut m = PolyMatrix::zeros(n, degree, rows, cols);
        for (alpha, c) in coeffs {
            if alpha.nvars() != n || alpha.degree() != degree {
                return Err(Error::Dimension(format!("coefficient index {alpha} out of space")));
            }
            if c.rows() != rows || c.cols() != cols {
                return Err(Error::Dimension(format!(
                    "coefficient of {alpha} is {}x{}, expected {rows}x{cols}",
                    c.rows(),
                    c.cols()
                )));
            }
            for i in 0..rows {
                for j in 0..cols {
                    let t = HomPoly::monomial(alpha.clone(), c.get(i, j).clone());
                    let e = &mut m.entries[i * cols + j];
                    *e = &*e + &t;
                }
            }
        }
        Ok(m)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &HomPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: HomPoly) -> Result<()> {
        if p.nvars() != self.n || p.degree() != self.degree {
            return Err(Error::Dimension("entry outside the matrix's polynomial space".into()));
        }
        self.entries[i * self.cols + j] = p;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(HomPoly::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = PolyMatrix::zeros(self.n, self.degree, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows || self.n != other.n {
            return Err(Error::Dimension(format!(
                "polynomial matrix product {}x{} (n={}) * {}x{} (n={})",
                self.rows, self.cols, self.n, other.rows, other.cols, other.n
            )));
        }
        let mut out = PolyMatrix::zeros(self.n, self.degree + other.degree, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let e = &mut out.entries[i * other.cols + j];
                    *e = &*e + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("polynomial matrix sum shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        PolyMatrix { entries: self.entries.iter().map(|p| p.scale(c)).collect(), ..self.clone() }
    }

    /// Multiplies every entry by the scalar polynomial `p`.
    pub fn mul_poly(&self, p: &HomPoly) -> Result<PolyMatrix> {
        if p.nvars() != self.n {
            return Err(Error::Dimension("scalar polynomial has the wrong variable count".into()));
        }
        Ok(PolyMatrix {
            degree: self.degree + p.degree(),
            entries: self.entries.iter().map(|e| e * p).collect(),
            ..self.clone()
        })
    }

    pub fn trace(&self) -> Result<HomPoly> {
        if self.rows != self.cols {
            return Err(Error::Dimension("trace of a non-square matrix".into()));
        }
        let mut t = HomPoly::zero(self.n, self.degree);
        for i in 0..self.rows {
            t = &t + self.get(i, i);
        }
        Ok(t)
    }

    pub fn eval(&self, xi: &[Rational]) -> Result<RationalMatrix> {
        let mut m = RationalMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).eval(xi)?);
            }
        }
        Ok(m)
    }

    /// Integer-point evaluation.
    pub fn eval_i64(&self, xi: &[i64]) -> Result<RationalMatrix> {
        let x: Vec<Rational> = xi.iter().map(|&v| Rational::from_integer(v.into())).collect();
        self.eval(&x)
    }

    pub fn eval_f64(&self, xi: &[f64]) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_f64(xi))
    }

    /// Coefficient matrix of the monomial `ξ^α`.
    pub fn coefficient(&self, alpha: &MultiIndex) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).coeff(alpha));
            }
        }
        m
    }

    /// All nonzero coefficient matrices, keyed by monomial.
    pub fn coefficients(&self) -> BTreeMap<MultiIndex, RationalMatrix> {
        multi_indices(self.n, self.degree)
            .into_iter()
            .map(|a| {
                let c = self.coefficient(&a);
                (a, c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn to_f64_coefficients(&self) -> Vec<(MultiIndex, Vec<Vec<f64>>)> {
        self.coefficients()
            .into_iter()
            .map(|(a, c)| {
                let rows = (0..c.rows())
                    .map(|i| c.row(i).iter().map(rational_to_f64).collect())
                    .collect();
                (a, rows)
            })
            .collect()
    }

    pub fn entries(&self) -> &[HomPoly] {
        &self.entries
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
