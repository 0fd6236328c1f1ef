use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{format_rational, rational_to_f64, MultiIndex, Rational};
use crate::error::{Error, Result};

/// Homogeneous polynomial with exact rational coefficients.
///
/// The degree is part of the value: the zero polynomial of degree 2 is a
/// different object from the zero polynomial of degree 3, and no term of the
/// wrong degree can ever be stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomPoly {
    n: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl HomPoly {
    pub fn zero(n: usize, degree: u32) -> Self {
        HomPoly { n, degree, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = HomPoly::zero(n, 0);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(n), c);
        }
        p
    }

    /// The coordinate function `ξ_i` (zero-based `i`).
    pub fn var(n: usize, i: usize) -> Self {
        HomPoly::monomial(MultiIndex::unit(n, i), Rational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: Rational) -> Self {
        let mut p = HomPoly::zero(alpha.nvars(), alpha.degree());
        if !c.is_zero() {
            p.terms.insert(alpha, c);
        }
        p
    }

    /// Linear form `Σ c_i ξ_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = HomPoly::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(MultiIndex::unit(n, i), c.clone());
            }
        }
        p
    }

    pub fn from_terms<I>(n: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = HomPoly::zero(n, degree);
        for (alpha, c) in terms {
            if alpha.nvars() != n || alpha.degree() != degree {
                return Err(Error::Dimension(format!(
                    "monomial {alpha} does not belong to degree {degree} in {n} variables"
                )));
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_space(&self, other: &HomPoly, op: &str) -> Result<()> {
        if self.n != other.n || self.degree != other.degree {
            return Err(Error::Dimension(format!(
                "{op}: (n={}, deg={}) vs (n={}, deg={})",
                self.n, self.degree, other.n, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &HomPoly) -> Result<HomPoly> {
        self.check_same_space(other, "add")?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &HomPoly) -> Result<HomPoly> {
        self.check_same_space(other, "sub")?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &HomPoly) -> Result<HomPoly> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "mul: {} variables vs {} variables",
                self.n, other.n
            )));
        }
        let mut out = HomPoly::zero(self.n, self.degree + other.degree);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> HomPoly {
        if c.is_zero() {
            return HomPoly::zero(self.n, self.degree);
        }
        HomPoly {
            n: self.n,
            degree: self.degree,
            terms: self.terms.iter().map(|(a, x)| (a.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> HomPoly {
        let mut acc = HomPoly::constant(self.n, Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, xi: &[Rational]) -> Result<Rational> {
        if xi.len() != self.n {
            return Err(Error::Dimension(format!(
                "evaluation point has length {} but polynomial has {} variables",
                xi.len(),
                self.n
            )));
        }
        let mut total = Rational::zero();
        for (alpha, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in xi.iter().zip(alpha.exponents()) {
                if e > 0 {
                    t *= num_traits::pow::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Floating-point evaluation; panics on a length mismatch.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n, "eval_f64: point length");
        self.terms
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .exponents()
                    .iter()
                    .zip(x)
                    .fold(rational_to_f64(c), |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    /// Composition `p(L_1(y), …, L_n(y))` where every `L_i` is homogeneous of
    /// the same degree in the same variables.
    pub fn substitute(&self, subs: &[HomPoly]) -> Result<HomPoly> {
        if subs.len() != self.n {
            return Err(Error::Dimension(format!(
                "substitute: {} replacements for {} variables",
                subs.len(),
                self.n
            )));
        }
        let (m, d) = match subs.first() {
            Some(s) => (s.n, s.degree),
            None => return Ok(HomPoly::zero(0, 0)),
        };
        if subs.iter().any(|s| s.n != m || s.degree != d) {
            return Err(Error::Dimension(
                "substitute: replacements must share variable count and degree".into(),
            ));
        }
        let mut powers: Vec<Vec<HomPoly>> = subs
            .iter()
            .map(|s| vec![HomPoly::constant(m, Rational::one()), s.clone()])
            .collect();
        let mut out = HomPoly::zero(m, self.degree * d);
        for (alpha, c) in &self.terms {
            let mut term = HomPoly::constant(m, c.clone());
            for (i, &e) in alpha.exponents().iter().enumerate() {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    term = &term * &powers[i][e];
                }
            }
            for (a, x) in term.terms {
                out.add_term(a, x);
            }
        }
        Ok(out)
    }

    /// `∂p/∂ξ_i`; the derivative of a constant is the zero constant.
    pub fn partial(&self, i: usize) -> HomPoly {
        if self.degree == 0 {
            return HomPoly::zero(self.n, 0);
        }
        let mut out = HomPoly::zero(self.n, self.degree - 1);
        for (alpha, c) in &self.terms {
            let e = alpha.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut ex = alpha.exponents().to_vec();
            ex[i] -= 1;
            out.add_term(MultiIndex::new(ex), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Coefficient vector over `basis` (monomials absent from `basis` must
    /// not occur).
    pub fn coefficients_over(&self, basis: &[MultiIndex]) -> Vec<Rational> {
        basis.iter().map(|a| self.coeff(a)).collect()
    }

    /// Stable text rendering with variables written `{prefix}{i}` (1-based),
    /// e.g. `-3/2*d1^2*d3 + d2^3`.
    pub fn render(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let factors: Vec<String> = alpha
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("{prefix}{}", i + 1)
                    } else {
                        format!("{prefix}{}^{e}", i + 1)
                    }
                })
                .collect();
            if factors.is_empty() {
                out.push_str(&format_rational(&abs));
            } else if abs.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format_rational(&abs));
                out.push('*');
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("d"))
    }
}

impl Add for &HomPoly {
    type Output = HomPoly;
    fn add(self, rhs: &HomPoly) -> HomPoly {
        self.try_add(rhs).expect("HomPoly + HomPoly")
    }
}

impl Sub for &HomPoly {
    type Output = HomPoly;
    fn sub(self, rhs: &HomPoly) -> HomPoly {
        self.try_sub(rhs).expect("HomPoly - HomPoly")
    }
}

impl Mul for &HomPoly {
    type Output = HomPoly;
    fn mul(self, rhs: &HomPoly) -> HomPoly {
        self.try_mul(rhs).expect("HomPoly * HomPoly")
    }
}

impl Neg for &HomPoly {
    type Output = HomPoly;
    fn neg(self) -> HomPoly {
        self.scale(&-Rational::one())
    }
}

/// The operand of a scalar-or-polynomial arithmetic call.
#[derive(Clone, Debug)]
pub enum Operand<'a> {
    Poly(&'a HomPoly),
    Scalar(&'a Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Scale,
}

/// Dispatching entry point mirroring the textual operation table.
pub fn hompoly_arith(op: ArithOp, p: &HomPoly, q: Operand<'_>) -> Result<HomPoly> {
    match (op, q) {
        (ArithOp::Add, Operand::Poly(q)) => p.try_add(q),
        (ArithOp::Sub, Operand::Poly(q)) => p.try_sub(q),
        (ArithOp::Mul, Operand::Poly(q)) => p.try_mul(q),
        (ArithOp::Scale, Operand::Scalar(c)) | (ArithOp::Mul, Operand::Scalar(c)) => {
            Ok(p.scale(c))
        }
        (op, _) => Err(Error::Dimension(format!("{op:?} needs a polynomial operand"))),
    }
}
