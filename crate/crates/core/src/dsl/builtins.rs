use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::operator::OperatorSymbol;
use crate::polyalg::{multi_indices, rat, HomPoly, MultiIndex, PolyMatrix};
use crate::potential::PotentialSymbol;

use super::parser::{parse_operator, OperatorSource};

const APPENDIX_A: &str = include_str!("../../data/appendix_A.op");
const APPENDIX_B1: &str = include_str!("../../data/appendix_B1.op");
const APPENDIX_B2: &str = include_str!("../../data/appendix_B2.op");

/// Optional shape parameters of a builtin; unset values take defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<u32>,
    pub rows: Option<usize>,
}

impl BuiltinParams {
    pub fn n(n: usize) -> Self {
        BuiltinParams { n: Some(n), ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct BuiltinDescriptor {
    pub name: &'static str,
    pub params: &'static str,
    pub description: &'static str,
    pub constant_rank: bool,
    pub potential: Option<&'static str>,
}

pub fn builtin_descriptors() -> Vec<BuiltinDescriptor> {
    vec![
        BuiltinDescriptor {
            name: "grad",
            params: "n, m=1, k=1",
            description: "k-th order gradient D^k of R^m-valued fields",
            constant_rank: true,
            potential: None,
        },
        BuiltinDescriptor {
            name: "curl",
            params: "n>=2, rows=1",
            description: "row-wise curl of rows x n matrix fields (antisymmetrized gradient)",
            constant_rank: true,
            potential: Some("gradient"),
        },
        BuiltinDescriptor {
            name: "div",
            params: "n, rows=1",
            description: "row-wise divergence of rows x n matrix fields",
            constant_rank: true,
            potential: Some("perp-gradient (n=2), curl (n=3)"),
        },
        BuiltinDescriptor {
            name: "symgrad",
            params: "n>=2",
            description: "Saint-Venant compatibility on symmetric matrices, paired with the symmetric gradient",
            constant_rank: true,
            potential: Some("symmetric gradient"),
        },
        BuiltinDescriptor {
            name: "curlcurl",
            params: "n>=2",
            description: "Saint-Venant compatibility operator (same symbol as symgrad)",
            constant_rank: true,
            potential: Some("symmetric gradient"),
        },
        BuiltinDescriptor {
            name: "divcurl",
            params: "n in {2,3}",
            description: "div B = 0, curl E = 0 on pairs (B, E)",
            constant_rank: true,
            potential: Some("(perp-gradient, gradient) for n=2, (curl, gradient) for n=3"),
        },
        BuiltinDescriptor {
            name: "hessian",
            params: "n>=2",
            description: "compatibility of symmetric matrix fields with being a Hessian",
            constant_rank: true,
            potential: Some("second gradient D^2"),
        },
        BuiltinDescriptor {
            name: "separate_convexity",
            params: "n>=2",
            description: "v_i differentiated along every other axis; not of constant rank",
            constant_rank: false,
            potential: None,
        },
        BuiltinDescriptor {
            name: "appendix_A",
            params: "",
            description: "first-order 3x7 operator in three variables with no potential of order <= 2",
            constant_rank: true,
            potential: Some("appendix_B1"),
        },
        BuiltinDescriptor {
            name: "appendix_B1",
            params: "",
            description: "third-order cocanceling potential of appendix_A",
            constant_rank: false,
            potential: None,
        },
        BuiltinDescriptor {
            name: "appendix_B2",
            params: "",
            description: "second third-order cocanceling potential of appendix_A, not isomorphic to appendix_B1",
            constant_rank: false,
            potential: None,
        },
    ]
}

fn x(n: usize, i: usize) -> HomPoly {
    HomPoly::var(n, i)
}

fn monomial(n: usize, a: &[(usize, u32)]) -> HomPoly {
    let mut e = vec![0; n];
    for &(i, p) in a {
        e[i] += p;
    }
    HomPoly::monomial(MultiIndex::new(e), rat(1))
}

fn op(name: &str, n: usize, degree: u32, rows: Vec<Vec<HomPoly>>) -> Result<OperatorSymbol> {
    OperatorSymbol::new(name, PolyMatrix::from_rows(n, degree, rows)?)
}

fn zeros(n: usize, d: u32, len: usize) -> Vec<HomPoly> {
    vec![HomPoly::zero(n, d); len]
}

/// Index of `(i, j)`, `i ≤ j`, in the upper-triangular ordering of Sym(n).
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Keeps nonzero rows, dropping exact repeats and negated repeats.
fn dedup_rows(rows: Vec<Vec<HomPoly>>) -> Vec<Vec<HomPoly>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in rows {
        if r.iter().all(HomPoly::is_zero) {
            continue;
        }
        let key: Vec<String> = r.iter().map(|p| p.to_string()).collect();
        let neg: Vec<String> = r.iter().map(|p| (-p).to_string()).collect();
        if seen.contains(&key) || seen.contains(&neg) {
            continue;
        }
        seen.insert(key);
        out.push(r);
    }
    out
}

fn grad(n: usize, m: usize, k: u32) -> Result<OperatorSymbol> {
    let alphas = multi_indices(n, k);
    let mut rows = Vec::new();
    for nu in 0..m {
        for a in &alphas {
            let mut row = zeros(n, k, m);
            row[nu] = HomPoly::monomial(a.clone(), rat(1));
            rows.push(row);
        }
    }
    op(&format!("grad_n{n}_m{m}_k{k}"), n, k, rows)
}

fn curl(n: usize, r: usize) -> Result<OperatorSymbol> {
    let mut rows = Vec::new();
    for nu in 0..r {
        for i in 0..n {
            for j in i + 1..n {
                let mut row = zeros(n, 1, r * n);
                row[nu * n + j] = x(n, i);
                row[nu * n + i] = -&x(n, j);
                rows.push(row);
            }
        }
    }
    op(&format!("curl_n{n}_r{r}"), n, 1, rows)
}

fn div(n: usize, r: usize) -> Result<OperatorSymbol> {
    let rows = (0..r)
        .map(|nu| {
            let mut row = zeros(n, 1, r * n);
            for i in 0..n {
                row[nu * n + i] = x(n, i);
            }
            row
        })
        .collect();
    op(&format!("div_n{n}_r{r}"), n, 1, rows)
}

/// Row-wise perp-gradient (n = 2) or curl (n = 3) potential of `div`.
fn div_potential(n: usize, r: usize) -> Result<OperatorSymbol> {
    match n {
        2 => {
            let mut rows = vec![zeros(2, 1, r); 2 * r];
            for nu in 0..r {
                rows[2 * nu][nu] = -&x(2, 1);
                rows[2 * nu + 1][nu] = x(2, 0);
            }
            op(&format!("perp_grad_r{r}"), 2, 1, rows)
        }
        3 => {
            let mut rows = vec![zeros(3, 1, 3 * r); 3 * r];
            for nu in 0..r {
                let (v, a) = (3 * nu, 3 * nu);
                rows[v][a + 2] = x(3, 1);
                rows[v][a + 1] = -&x(3, 2);
                rows[v + 1][a] = x(3, 2);
                rows[v + 1][a + 2] = -&x(3, 0);
                rows[v + 2][a + 1] = x(3, 0);
                rows[v + 2][a] = -&x(3, 1);
            }
            op(&format!("curl_potential_r{r}"), 3, 1, rows)
        }
        _ => Err(Error::InvalidParameter(format!("no builtin potential for div with n = {n}"))),
    }
}

/// Saint-Venant compatibility on Sym(n) coordinates.
fn saint_venant(n: usize, name: &str) -> Result<OperatorSymbol> {
    let d = sym_dim(n);
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut row = zeros(n, 2, d);
                    let mut add = |idx: usize, p: HomPoly| {
                        row[idx] = &row[idx] + &p;
                    };
                    add(sym_index(n, i, j), monomial(n, &[(k, 1), (l, 1)]));
                    add(sym_index(n, k, l), monomial(n, &[(i, 1), (j, 1)]));
                    add(sym_index(n, k, j), -&monomial(n, &[(i, 1), (l, 1)]));
                    add(sym_index(n, i, l), -&monomial(n, &[(k, 1), (j, 1)]));
                    rows.push(row);
                }
            }
        }
    }
    op(name, n, 2, dedup_rows(rows))
}

/// `u ↦ (∂_i u_j + ∂_j u_i)/2` on Sym(n) coordinates.
fn symmetric_gradient(n: usize) -> Result<OperatorSymbol> {
    let mut rows = vec![zeros(n, 1, n); sym_dim(n)];
    for i in 0..n {
        for j in i..n {
            let row = &mut rows[sym_index(n, i, j)];
            if i == j {
                row[i] = x(n, i);
            } else {
                let half = crate::polyalg::frac(1, 2);
                row[j] = x(n, i).scale(&half);
                row[i] = x(n, j).scale(&half);
            }
        }
    }
    op(&format!("symgrad_potential_n{n}"), n, 1, rows)
}

fn divcurl(n: usize) -> Result<OperatorSymbol> {
    let mut rows = Vec::new();
    let mut d = zeros(n, 1, 2 * n);
    for i in 0..n {
        d[i] = x(n, i);
    }
    rows.push(d);
    for i in 0..n {
        for j in i + 1..n {
            let mut row = zeros(n, 1, 2 * n);
            row[n + j] = x(n, i);
            row[n + i] = -&x(n, j);
            rows.push(row);
        }
    }
    op(&format!("divcurl_n{n}"), n, 1, rows)
}

fn divcurl_potential(n: usize) -> Result<OperatorSymbol> {
    let b = div_potential(n, 1)?;
    let u = b.dim_from();
    let mut rows = Vec::new();
    for i in 0..n {
        let mut row = zeros(n, 1, u + 1);
        for a in 0..u {
            row[a] = b.symbol().get(i, a).clone();
        }
        rows.push(row);
    }
    for i in 0..n {
        let mut row = zeros(n, 1, u + 1);
        row[u] = x(n, i);
        rows.push(row);
    }
    op(&format!("divcurl_potential_n{n}"), n, 1, rows)
}

fn hessian(n: usize) -> Result<OperatorSymbol> {
    let d = sym_dim(n);
    let mut rows = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                let mut row = zeros(n, 1, d);
                let a = sym_index(n, i, j);
                let b = sym_index(n, k, j);
                row[a] = &row[a] + &x(n, k);
                row[b] = &row[b] - &x(n, i);
                rows.push(row);
            }
        }
    }
    op(&format!("hessian_n{n}"), n, 1, dedup_rows(rows))
}

fn second_gradient(n: usize) -> Result<OperatorSymbol> {
    let mut rows = vec![zeros(n, 2, 1); sym_dim(n)];
    for i in 0..n {
        for j in i..n {
            rows[sym_index(n, i, j)][0] = monomial(n, &[(i, 1), (j, 1)]);
        }
    }
    op(&format!("second_gradient_n{n}"), n, 2, rows)
}

fn separate_convexity(n: usize) -> Result<OperatorSymbol> {
    let mut rows = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let mut row = zeros(n, 1, n);
                row[i] = x(n, j);
                rows.push(row);
            }
        }
    }
    op(&format!("separate_convexity_n{n}"), n, 1, rows)
}

fn appendix(text: &str, file: &str) -> Result<OperatorSymbol> {
    parse_operator(&OperatorSource::new(text, file))
}

fn require_n(p: &BuiltinParams, name: &str, min: usize) -> Result<usize> {
    let n = p.n.unwrap_or(2);
    if n < min || n > 8 {
        return Err(Error::InvalidParameter(format!("{name} needs {min} <= n <= 8, got n = {n}")));
    }
    Ok(n)
}

fn positive(v: Option<usize>, what: &str) -> Result<usize> {
    match v.unwrap_or(1) {
        0 => Err(Error::InvalidParameter(format!("{what} must be positive"))),
        x if x > 16 => Err(Error::InvalidParameter(format!("{what} = {x} is too large"))),
        x => Ok(x),
    }
}

/// A builtin operator and, where a classical potential is known, that
/// potential.
pub fn builtin(name: &str, p: &BuiltinParams) -> Result<(OperatorSymbol, Option<PotentialSymbol>)> {
    let user = |b: OperatorSymbol| Some(PotentialSymbol::user(b));
    Ok(match name {
        "grad" => {
            let n = require_n(p, name, 1)?;
            let k = p.k.unwrap_or(1);
            if k == 0 || k > 6 {
                return Err(Error::InvalidParameter(format!("grad needs 1 <= k <= 6, got {k}")));
            }
            (grad(n, positive(p.m, "m")?, k)?, None)
        }
        "curl" => {
            let n = require_n(p, name, 2)?;
            let r = positive(p.rows, "rows")?;
            (curl(n, r)?, user(grad(n, r, 1)?))
        }
        "div" => {
            let n = require_n(p, name, 1)?;
            let r = positive(p.rows, "rows")?;
            let pot = if n == 2 || n == 3 { user(div_potential(n, r)?) } else { None };
            (div(n, r)?, pot)
        }
        "symgrad" | "curlcurl" => {
            let n = require_n(p, name, 2)?;
            (saint_venant(n, &format!("{name}_n{n}"))?, user(symmetric_gradient(n)?))
        }
        "divcurl" => {
            let n = require_n(p, name, 2)?;
            if n > 3 {
                return Err(Error::InvalidParameter("divcurl is available for n = 2, 3".into()));
            }
            (divcurl(n)?, user(divcurl_potential(n)?))
        }
        "hessian" => {
            let n = require_n(p, name, 2)?;
            (hessian(n)?, user(second_gradient(n)?))
        }
        "separate_convexity" => (separate_convexity(require_n(p, name, 2)?)?, None),
        "appendix_A" => (
            appendix(APPENDIX_A, "appendix_A.op")?,
            user(appendix(APPENDIX_B1, "appendix_B1.op")?),
        ),
        "appendix_B1" => (appendix(APPENDIX_B1, "appendix_B1.op")?, None),
        "appendix_B2" => (appendix(APPENDIX_B2, "appendix_B2.op")?, None),
        other => return Err(Error::UnknownBuiltin(other.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{constant_rank_check, RankVerdict};
    use crate::potential::verify_exactness;

    #[test]
    fn sym_indexing() {
        assert_eq!((sym_index(2, 0, 0), sym_index(2, 0, 1), sym_index(2, 1, 1)), (0, 1, 2));
        assert_eq!(sym_index(3, 2, 1), 4);
        assert_eq!(sym_index(3, 2, 2), 5);
    }

    #[test]
    fn hessian_two_dimensional_symbol() {
        let (a, _) = builtin("hessian", &BuiltinParams::n(2)).unwrap();
        assert_eq!(a.symbol().to_string(), "[d2, -d1, 0]\n[0, d2, -d1]\n");
    }

    #[test]
    fn saint_venant_two_dimensional_symbol() {
        let (a, _) = builtin("symgrad", &BuiltinParams::n(2)).unwrap();
        assert_eq!(a.dim_to(), 1);
        assert_eq!(a.symbol().to_string(), "[d2^2, -2*d1*d2, d1^2]\n");
    }

    #[test]
    fn separate_convexity_layout() {
        let (a, _) = builtin("separate_convexity", &BuiltinParams::n(2)).unwrap();
        assert_eq!(a.symbol().to_string(), "[0, d1]\n[d2, 0]\n");
    }

    #[test]
    fn attached_potentials_are_exact() {
        let cases: Vec<(&str, BuiltinParams)> = vec![
            ("curl", BuiltinParams::n(2)),
            ("curl", BuiltinParams::n(3)),
            ("curl", BuiltinParams { n: Some(2), rows: Some(2), ..Default::default() }),
            ("div", BuiltinParams::n(2)),
            ("div", BuiltinParams::n(3)),
            ("div", BuiltinParams { n: Some(2), rows: Some(2), ..Default::default() }),
            ("symgrad", BuiltinParams::n(2)),
            ("symgrad", BuiltinParams::n(3)),
            ("curlcurl", BuiltinParams::n(3)),
            ("divcurl", BuiltinParams::n(2)),
            ("divcurl", BuiltinParams::n(3)),
            ("hessian", BuiltinParams::n(2)),
            ("hessian", BuiltinParams::n(3)),
            ("appendix_A", BuiltinParams::default()),
        ];
        for (name, p) in cases {
            let (a, b) = builtin(name, &p).unwrap();
            let b = b.unwrap();
            let rep = verify_exactness(&a, &b.symbol, 40, 1).unwrap();
            assert!(rep.exact(), "{name} {p:?}: {rep:?}");
        }
    }

    #[test]
    fn rank_verdicts_match_descriptors() {
        for d in builtin_descriptors().iter().filter(|d| !d.name.starts_with("appendix_B")) {
            let (a, _) = builtin(d.name, &BuiltinParams::n(2)).unwrap();
            let rep = constant_rank_check(&a, 60, 0).unwrap();
            if d.constant_rank {
                assert_eq!(rep.verdict, RankVerdict::VerifiedProbabilistic, "{}", d.name);
            }
            if d.name == "separate_convexity" {
                assert_eq!(rep.verdict, RankVerdict::NotConstant);
            }
        }
    }

    #[test]
    fn unknown_and_invalid() {
        assert!(matches!(builtin("nope", &BuiltinParams::default()), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(builtin("curl", &BuiltinParams::n(1)), Err(Error::InvalidParameter(_))));
    }
}
