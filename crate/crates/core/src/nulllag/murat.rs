use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::operator::sampling::{random_rational, random_rational_point, rng};
use crate::operator::OperatorSymbol;
use crate::polyalg::{format_rational, HomPoly, Rational};

/// Attempts per trial at finding frequencies with nontrivial kernels.
const REDRAW_BUDGET: usize = 50;

#[derive(Clone, Debug)]
pub struct MuratFailure {
    pub r: usize,
    pub frequencies: Vec<Vec<Rational>>,
    pub directions: Vec<Vec<Rational>>,
    pub point: Vec<Rational>,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct MuratReport {
    pub passed: bool,
    pub evaluations: usize,
    pub discarded: usize,
    pub failures: Vec<MuratFailure>,
}

impl MuratReport {
    pub fn to_json(&self) -> Value {
        let strs = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| {
                json!({
                    "r": f.r,
                    "frequencies": f.frequencies.iter().map(|x| strs(x)).collect::<Vec<_>>(),
                    "directions": f.directions.iter().map(|x| strs(x)).collect::<Vec<_>>(),
                    "point": strs(&f.point),
                    "value": format_rational(&f.value),
                })
            })
            .collect();
        json!({
            "passed": self.passed,
            "evaluations": self.evaluations,
            "discarded": self.discarded,
            "failures": failures,
        })
    }
}

/// `D^r F(v)[λ_1, …, λ_r]`, read off as the coefficient of
/// `t_0^{s-r} t_1 ⋯ t_r` in `F(t_0 v + Σ t_i λ_i)`.
pub fn polarization(f: &HomPoly, v: &[Rational], lambdas: &[Vec<Rational>]) -> Result<Rational> {
    let d = f.nvars();
    let r = lambdas.len();
    let s = f.degree() as usize;
    if v.len() != d || lambdas.iter().any(|l| l.len() != d) {
        return Err(Error::Dimension(format!("polarization vectors must have length {d}")));
    }
    if r > s {
        return Ok(Rational::from_integer(0.into()));
    }
    let subs: Vec<HomPoly> = (0..d)
        .map(|j| {
            let mut c = vec![v[j].clone()];
            c.extend(lambdas.iter().map(|l| l[j].clone()));
            HomPoly::linear(&c)
        })
        .collect();
    let g = f.substitute(&subs)?;
    let mut e = vec![1u32; r + 1];
    e[0] = (s - r) as u32;
    Ok(g.coeff(&crate::polyalg::MultiIndex::new(e)))
}

/// Exact Murat test: for `2 ≤ r ≤ deg F`, frequencies `ξ_1, …, ξ_r` drawn
/// from a random `(r-1)`-dimensional subspace, `λ_i ∈ ker A(ξ_i)`, require
/// `D^r F(v)[λ_1, …, λ_r] = 0` at a random `v`.
pub fn murat_check(f: &HomPoly, a: &OperatorSymbol, trials: usize, seed: u64) -> Result<MuratReport> {
    if f.degree() < 2 {
        return Err(Error::Precondition("the Murat test needs deg F >= 2".into()));
    }
    if f.nvars() != a.dim_from() {
        return Err(Error::Dimension(format!(
            "F has {} variables but the operator acts on dimension {}",
            f.nvars(),
            a.dim_from()
        )));
    }
    let n = a.n();
    let mut g = rng(seed);
    let mut report = MuratReport { passed: true, evaluations: 0, discarded: 0, failures: vec![] };
    for r in 2..=f.degree() as usize {
        for _ in 0..trials {
            let mut drawn = None;
            for _ in 0..REDRAW_BUDGET {
                let span: Vec<Vec<Rational>> = (0..r - 1).map(|_| random_rational_point(&mut g, n)).collect();
                let mut xis = Vec::with_capacity(r);
                let mut lambdas = Vec::with_capacity(r);
                for _ in 0..r {
                    let xi = combine(&span, &mut g, n);
                    let (_, ker) = a.eval(&xi)?.nullspace();
                    if ker.is_empty() {
                        break;
                    }
                    lambdas.push(combine(&ker, &mut g, a.dim_from()));
                    xis.push(xi);
                }
                if lambdas.len() == r && lambdas.iter().all(|l| l.iter().any(|x| *x != zero())) {
                    drawn = Some((xis, lambdas));
                    break;
                }
                report.discarded += 1;
            }
            let Some((frequencies, directions)) = drawn else { continue };
            let point = random_rational_point(&mut g, f.nvars());
            let value = polarization(f, &point, &directions)?;
            report.evaluations += 1;
            if value != zero() {
                report.passed = false;
                report.failures.push(MuratFailure { r, frequencies, directions, point, value });
            }
        }
    }
    Ok(report)
}

fn zero() -> Rational {
    Rational::from_integer(0.into())
}

/// Random rational combination of `vectors`, redrawn while zero.
fn combine<R: rand::Rng>(vectors: &[Vec<Rational>], g: &mut R, dim: usize) -> Vec<Rational> {
    for _ in 0..REDRAW_BUDGET {
        let mut out = vec![zero(); dim];
        for v in vectors {
            let c = random_rational(g);
            for (o, x) in out.iter_mut().zip(v) {
                *o += &c * x;
            }
        }
        if out.iter().any(|x| *x != zero()) {
            return out;
        }
    }
    vectors[0].clone()
}
