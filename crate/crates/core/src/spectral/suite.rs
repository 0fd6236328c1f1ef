//! Standard experiment batteries shared by the CLI, the acceptance tests
//! and the browser demo.

use rand::Rng;
use serde_json::{json, Value};

use super::*;
use crate::dsl::{builtin, parse_polynomial, BuiltinParams};
use crate::error::{Error, Result};
use crate::nulllag::solve_null_lagrangians;
use crate::operator::{sampling::rng, OperatorSymbol};
use crate::polyalg::HomPoly;
use crate::potential::PotentialSymbol;

pub const SYNTHESIS_TOL: f64 = 1e-10;
pub const HODGE_TOL: f64 = 1e-8;
pub const QUASIAFFINE_TOL: f64 = 1e-6;
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-2;
pub const ZERO_MEAN_TOL: f64 = 1e-6;

/// Uniform noise in `[-1, 1)` per component and grid point.
pub fn noise_field(grid: &TorusGrid, dim: usize, seed: u64) -> PeriodicField {
    let mut g = rng(seed);
    let mut f = PeriodicField::zeros(grid, dim);
    for c in f.values.iter_mut() {
        c.iter_mut().for_each(|x| *x = g.gen_range(-1.0..1.0));
    }
    f
}

fn squared_norm(dim: usize) -> HomPoly {
    let text: Vec<String> = (1..=dim).map(|i| format!("v{i}^2")).collect();
    parse_polynomial(&text.join(" + "), dim, "v").expect("well-formed")
}

/// Null Lagrangians of every degree `2..=min(n, dim V)` the solver can
/// handle, skipping degrees that exceed the size caps.
pub fn emitted_null_lagrangians(b: &PotentialSymbol) -> Result<Vec<HomPoly>> {
    let mut out = Vec::new();
    for s in 2..=b.symbol.n().min(b.dim_v()) {
        match solve_null_lagrangians(b, s) {
            Ok(basis) => out.extend(basis.elements.into_iter().map(|e| e.f)),
            Err(Error::SizeCap(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Synthesis, Hodge, quasiaffinity (with negative control) and zero-mean
/// experiments for one operator on one grid.
pub fn operator_suite(
    a: &OperatorSymbol,
    b: Option<&PotentialSymbol>,
    grid: &TorusGrid,
    seeds: u64,
) -> Result<Vec<ExperimentRecord>> {
    let name = a.name();
    let mut out = Vec::new();
    let band = default_band(grid);
    for seed in 0..seeds {
        let v = synthesize_a_free(a, grid, seed, &vec![0.0; a.dim_from()])?;
        out.push(ExperimentRecord::at_most("a_free_synthesis", name, grid, seed, a_free_residual(a, &v, band)?, SYNTHESIS_TOL));
    }
    let control = periodic_quasiaffinity_check(&squared_norm(a.dim_from()), a, &vec![0.0; a.dim_from()], grid, 0)?;
    out.push(ExperimentRecord::at_least("quasiaffinity_negative_control", name, grid, 0, control, NEGATIVE_CONTROL_MIN));
    let Some(b) = b else { return Ok(out) };
    for seed in 0..seeds.min(3) {
        let v = noise_field(grid, a.dim_from(), 1000 + seed);
        let h = hodge_decompose(a, b, &v)?;
        out.push(ExperimentRecord::at_most("hodge_residual", name, grid, seed, h.relative_residual, HODGE_TOL));
        out.push(ExperimentRecord::at_most("hodge_orthogonality", name, grid, seed, h.orthogonality(&v), HODGE_TOL));
    }
    let fs = emitted_null_lagrangians(b)?;
    for (k, f) in fs.iter().enumerate() {
        let label = format!("{name}/F{}", k + 1);
        let mut worst = (0, 0.0f64);
        for seed in 0..seeds {
            let mut g = rng(seed);
            let z: Vec<f64> = (0..a.dim_from()).map(|_| g.gen_range(-1.0..1.0)).collect();
            let d = periodic_quasiaffinity_check(f, a, &z, grid, seed)?;
            if d >= worst.1 {
                worst = (seed, d);
            }
        }
        out.push(ExperimentRecord::at_most("quasiaffinity", &label, grid, worst.0, worst.1, QUASIAFFINE_TOL));
        let zm = zero_mean_check(f, b, grid, k as u64)?;
        out.push(ExperimentRecord::at_most("zero_mean", &label, grid, k as u64, zm, ZERO_MEAN_TOL));
    }
    Ok(out)
}

/// Grid used for an `n`-dimensional operator by default.
pub fn default_grid(n: usize) -> Result<TorusGrid> {
    TorusGrid::cube(n, if n <= 2 { 64 } else { 16 })
}

#[derive(Clone, Debug)]
pub struct EstimateStatistic {
    pub ratios: Vec<f64>,
    pub equal_case: f64,
}

impl EstimateStatistic {
    pub fn max(&self) -> f64 {
        self.ratios.iter().cloned().fold(0.0, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut r = self.ratios.clone();
        r.sort_by(|a, b| a.total_cmp(b));
        let m = r.len() / 2;
        if r.len() % 2 == 0 {
            (r[m - 1] + r[m]) / 2.0
        } else {
            r[m]
        }
    }

    pub fn spread(&self) -> f64 {
        self.max() / self.median()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trials": self.ratios.len(),
            "max": self.max(),
            "median": self.median(),
            "max_over_median": self.spread(),
            "equal_case": self.equal_case,
        })
    }
}

/// `F = det`, `B = ∇` on `ℝ²`-valued potentials, `s = p = q = 2`, over
/// seeded random pairs of bump-supported potentials.
pub fn determinant_estimate_statistic(grid: &TorusGrid, trials: u64) -> Result<EstimateStatistic> {
    let (_, b) = builtin("curl", &BuiltinParams { n: Some(2), rows: Some(2), ..Default::default() })?;
    let b = b.expect("curl has a potential");
    let det = parse_polynomial("v1*v4 - v2*v3", 4, "v")?;
    let mut ratios = Vec::new();
    for t in 0..trials {
        let u1 = bump_field(grid, 2, 3 * t, 2);
        let u2 = bump_field(grid, 2, 3 * t + 1, 2);
        let phi = bump_field(grid, 1, 3 * t + 2, 1);
        ratios.push(quantitative_estimate_check(&det, &b, &u1, &u2, &phi, 2.0, 2.0)?);
    }
    let u = bump_field(grid, 2, 0, 2);
    let phi = bump_field(grid, 1, 2, 1);
    let equal_case = quantitative_estimate_check(&det, &b, &u, &u, &phi, 2.0, 2.0)?;
    Ok(EstimateStatistic { ratios, equal_case })
}

/// Ratios for `u₂ = u₁ + ε w` along a shrinking sequence of `ε`.
pub fn perturbation_ratios(grid: &TorusGrid, epsilons: &[f64]) -> Result<Vec<f64>> {
    let (_, b) = builtin("curl", &BuiltinParams { n: Some(2), rows: Some(2), ..Default::default() })?;
    let b = b.expect("curl has a potential");
    let det = parse_polynomial("v1*v4 - v2*v3", 4, "v")?;
    let u = bump_field(grid, 2, 10, 2);
    let w = bump_field(grid, 2, 11, 2);
    let phi = bump_field(grid, 1, 12, 1);
    epsilons
        .iter()
        .map(|&e| {
            let u2 = u.zip_with(&w, |x, y| x + e * y)?;
            quantitative_estimate_check(&det, &b, &u, &u2, &phi, 2.0, 2.0)
        })
        .collect()
}
