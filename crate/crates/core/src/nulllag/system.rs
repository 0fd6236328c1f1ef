use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::{json, Value};

use super::jet::{potential_to_jet_map, JetLinearMap};
use crate::error::{Error, Result};
use crate::par;
use crate::polyalg::{format_rational, multi_indices, HomPoly, MultiIndex, Rational, RationalMatrix};
use crate::potential::PotentialSymbol;

pub const DEFAULT_MINOR_CAP: usize = 20_000;

/// Largest coefficient system (rows × columns) the dense solver accepts.
pub const MAX_SYSTEM_ENTRIES: usize = 4_000_000;

/// An `s × s` minor of an `N × n` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Minor {
    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

fn combinations(m: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < s - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, s, &mut Vec::with_capacity(s), &mut out);
    out
}

fn binomial(m: usize, s: usize) -> u128 {
    if s > m {
        return 0;
    }
    let s = s.min(m - s);
    (0..s).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

pub fn minor_count(big_n: usize, n: usize, s: usize) -> u128 {
    binomial(big_n, s) * binomial(n, s)
}

/// All `C(N,s)·C(n,s)` minors, row subsets outermost, both in lexicographic
/// order.
pub fn enumerate_minors(big_n: usize, n: usize, s: usize) -> Result<Vec<Minor>> {
    if s == 0 || s > big_n.min(n) {
        return Err(Error::Domain(format!(
            "minor order s = {s} must satisfy 1 <= s <= min(N, n) = {}",
            big_n.min(n)
        )));
    }
    let cols = combinations(n, s);
    Ok(combinations(big_n, s)
        .into_iter()
        .flat_map(|r| cols.iter().map(move |c| Minor { rows: r.clone(), cols: c.clone() }))
        .collect())
}

/// Determinant of a square matrix of polynomials by dynamic programming over
/// column subsets (`2^s · s` products).
pub fn det_poly(m: &[Vec<&HomPoly>]) -> HomPoly {
    let s = m.len();
    let (nv, d) = match m.first().and_then(|r| r.first()) {
        Some(p) => (p.nvars(), p.degree()),
        None => return HomPoly::constant(0, Rational::from_integer(1.into())),
    };
    let mut f: Vec<Option<HomPoly>> = vec![None; 1 << s];
    f[0] = Some(HomPoly::constant(nv, Rational::from_integer(1.into())));
    for mask in 0usize..(1 << s) {
        let Some(cur) = f[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == s {
            f[mask] = Some(cur);
            continue;
        }
        for j in 0..s {
            if mask & (1 << j) != 0 || m[row][j].is_zero() {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let mut t = &cur * m[row][j];
            if above % 2 == 1 {
                t = -&t;
            }
            let next = mask | (1 << j);
            f[next] = Some(match f[next].take() {
                Some(acc) => &acc + &t,
                None => t,
            });
        }
    }
    f[(1 << s) - 1].take().unwrap_or_else(|| HomPoly::zero(nv, d * s as u32))
}

fn minor_of(forms: &[Vec<HomPoly>], minor: &Minor) -> HomPoly {
    let sub: Vec<Vec<&HomPoly>> =
        minor.rows.iter().map(|&r| minor.cols.iter().map(|&c| &forms[r][c]).collect()).collect();
    det_poly(&sub)
}

/// Coefficient system for the `c_M`: rows are monomials in the jet
/// coordinates, columns are minors.
#[derive(Clone, Debug)]
pub struct MinorSystem {
    pub minors: Vec<Minor>,
    pub monomials: Vec<MultiIndex>,
    pub matrix: RationalMatrix,
}

fn check_cap(map: &JetLinearMap, s: usize, cap: usize) -> Result<()> {
    let count = minor_count(map.jet.big_n(), map.jet.n, s);
    if count > cap as u128 {
        return Err(Error::SizeCap(format!(
            "C({}, {s}) * C({}, {s}) = {count} minors exceeds the cap of {cap}; \
             prefer a lower-order potential",
            map.jet.big_n(),
            map.jet.n
        )));
    }
    Ok(())
}

/// For each minor `M`, the coefficients of `M(Ψ(X)) − M(Ψ(T̂X))`.
pub fn assemble_system(map: &JetLinearMap, s: usize, cap: usize) -> Result<MinorSystem> {
    check_cap(map, s, cap)?;
    let minors = enumerate_minors(map.jet.big_n(), map.jet.n, s)?;
    let m = map.jet.dim();
    let monomial_bound = binomial(m + s - 1, s);
    if monomial_bound.saturating_mul(minors.len() as u128) > MAX_SYSTEM_ENTRIES as u128 {
        return Err(Error::SizeCap(format!(
            "{} minors over up to {monomial_bound} monomials in {m} jet coordinates exceeds {MAX_SYSTEM_ENTRIES} entries",
            minors.len()
        )));
    }
    let plain = map.jet.psi_forms(&RationalMatrix::identity(m));
    let projected = map.jet.psi_forms(&map.t_hat);
    let polys = par::map(&minors, |mi| &minor_of(&plain, mi) - &minor_of(&projected, mi));
    let monomials: BTreeSet<MultiIndex> =
        polys.iter().flat_map(|p| p.terms().map(|(a, _)| a.clone())).collect();
    let monomials: Vec<MultiIndex> = monomials.into_iter().collect();
    let row_of: BTreeMap<&MultiIndex, usize> = monomials.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut matrix = RationalMatrix::zeros(monomials.len(), minors.len());
    for (j, p) in polys.iter().enumerate() {
        for (a, c) in p.terms() {
            matrix.set(row_of[a], j, c.clone());
        }
    }
    Ok(MinorSystem { minors, monomials, matrix })
}

#[derive(Clone, Debug)]
pub struct NullLagrangian {
    /// Coefficients over the minors; empty in degree 1.
    pub c: Vec<Rational>,
    pub f: HomPoly,
}

#[derive(Clone, Debug)]
pub struct NullLagrangianBasis {
    pub degree: usize,
    pub c_space_dim: usize,
    pub f_space_dim: usize,
    pub elements: Vec<NullLagrangian>,
    pub minors: Vec<Minor>,
    pub warnings: Vec<String>,
}

impl NullLagrangianBasis {
    pub fn to_json(&self) -> Value {
        let elements: Vec<Value> = self
            .elements
            .iter()
            .map(|e| {
                json!({
                    "c": e.c.iter().map(format_rational).collect::<Vec<_>>(),
                    "F": e.f.render("v"),
                })
            })
            .collect();
        json!({
            "degree": self.degree,
            "c_space_dim": self.c_space_dim,
            "f_space_dim": self.f_space_dim,
            "elements": elements,
        })
    }

    /// Whether `f` lies in the span of the basis (exact linear solve).
    pub fn contains(&self, f: &HomPoly) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        if self.elements.is_empty() {
            return Ok(false);
        }
        if f.degree() as usize != self.degree || f.nvars() != self.elements[0].f.nvars() {
            return Ok(false);
        }
        let basis = multi_indices(f.nvars(), f.degree());
        let cols: Vec<Vec<Rational>> = self.elements.iter().map(|e| e.f.coefficients_over(&basis)).collect();
        let m = RationalMatrix::from_columns(&cols, basis.len());
        Ok(m.solve(&f.coefficients_over(&basis))?.is_some())
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub cap: usize,
    /// Columns spanning the complement of `ker T` to use instead of the
    /// orthogonal one.
    pub complement: Option<RationalMatrix>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cap: DEFAULT_MINOR_CAP, complement: None }
    }
}

pub fn solve_null_lagrangians(b: &PotentialSymbol, s: usize) -> Result<NullLagrangianBasis> {
    solve_null_lagrangians_with(b, s, &SolveOptions::default())
}

pub fn solve_null_lagrangians_with(
    b: &PotentialSymbol,
    s: usize,
    opts: &SolveOptions,
) -> Result<NullLagrangianBasis> {
    let n = b.symbol.n();
    let dim_v = b.dim_v();
    let bound = n.min(dim_v);
    if s == 0 || s > bound {
        return Err(Error::Domain(format!(
            "degree s = {s} is out of range: quasiaffine polynomials have degree s <= min(n, dim V) = {bound}"
        )));
    }
    if s == 1 {
        let elements = (0..dim_v)
            .map(|i| NullLagrangian { c: vec![], f: HomPoly::var(dim_v, i) })
            .collect();
        return Ok(NullLagrangianBasis {
            degree: 1,
            c_space_dim: dim_v,
            f_space_dim: dim_v,
            elements,
            minors: vec![],
            warnings: vec!["degree 1: every linear functional is quasiaffine".into()],
        });
    }
    let mut map = potential_to_jet_map(b)?;
    if let Some(c) = &opts.complement {
        map = map.with_complement(c)?;
    }
    let mut warnings = Vec::new();
    if !map.surjective {
        warnings.push(format!(
            "T has rank {} < dim V = {dim_v}; directions outside the wave cone span are unconstrained",
            map.rank
        ));
    }
    if s > map.jet.big_n() {
        return Ok(NullLagrangianBasis {
            degree: s,
            c_space_dim: 0,
            f_space_dim: 0,
            elements: vec![],
            minors: vec![],
            warnings,
        });
    }
    let system = assemble_system(&map, s, opts.cap)?;
    let (_, c_basis) = system.matrix.nullspace();

    // F(v) = Σ_M c_M M(Ψ(ĵ v)).
    let forms = map.jet.psi_forms(&map.j_hat);
    let used: Vec<usize> = (0..system.minors.len())
        .filter(|&j| c_basis.iter().any(|c| !c[j].is_zero()))
        .collect();
    let pulled = par::map(&used, |&j| minor_of(&forms, &system.minors[j]));
    let pulled: BTreeMap<usize, HomPoly> = used.into_iter().zip(pulled).collect();
    let candidates: Vec<NullLagrangian> = c_basis
        .iter()
        .map(|c| {
            let mut f = HomPoly::zero(dim_v, s as u32);
            for (j, p) in &pulled {
                if !c[*j].is_zero() {
                    f = &f + &p.scale(&c[*j]);
                }
            }
            NullLagrangian { c: c.clone(), f }
        })
        .collect();

    // Keep an independent spanning subset of the F's.
    let mono = multi_indices(dim_v, s as u32);
    let cols: Vec<Vec<Rational>> = candidates.iter().map(|e| e.f.coefficients_over(&mono)).collect();
    let elements = if cols.is_empty() {
        vec![]
    } else {
        let (_, pivots) = RationalMatrix::from_columns(&cols, mono.len()).rref();
        pivots.into_iter().map(|p| candidates[p].clone()).collect::<Vec<_>>()
    };
    Ok(NullLagrangianBasis {
        degree: s,
        c_space_dim: c_basis.len(),
        f_space_dim: elements.len(),
        elements,
        minors: system.minors,
        warnings,
    })
}
