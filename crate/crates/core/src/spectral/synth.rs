use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::grid::{PeriodicField, TorusGrid};
use crate::error::{Error, Result};
use crate::operator::{generic_rank, sampling::rng, OperatorSymbol};
use crate::par;

/// Singular values below this fraction of the largest count as zero.
pub const SVD_TOLERANCE: f64 = 1e-10;

fn as_f64(xi: &[i64]) -> Vec<f64> {
    xi.iter().map(|&k| k as f64).collect()
}

/// `(2πi)^order`.
pub(crate) fn derivative_factor(order: u32) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI).powu(order)
}

/// Numeric rank and orthogonal projector onto `ker M`.
pub fn kernel_projector(m: &DMatrix<f64>) -> (usize, DMatrix<f64>) {
    let cols = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut p = DMatrix::<f64>::identity(cols, cols);
    let mut rank = 0;
    if smax == 0.0 {
        return (0, p);
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > SVD_TOLERANCE * smax {
            rank += 1;
            let v = vt.row(k).transpose();
            p -= &v * v.transpose();
        }
    }
    (rank, p)
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
        .collect()
}

/// Per-frequency transform `f̂(ξ) ↦ g(ξ, f̂(ξ))` of a whole spectrum.
pub(crate) fn map_spectrum<F>(grid: &TorusGrid, spec: &[Vec<Complex64>], out_dim: usize, f: F) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(usize, &[Complex64]) -> Result<Vec<Complex64>> + Sync + Send,
{
    let idx: Vec<usize> = (0..grid.len()).collect();
    let per = par::map(&idx, |&i| {
        let v: Vec<Complex64> = spec.iter().map(|c| c[i]).collect();
        f(i, &v)
    });
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; out_dim];
    for (i, r) in per.into_iter().enumerate() {
        for (c, z) in r?.into_iter().enumerate() {
            out[c][i] = z;
        }
    }
    Ok(out)
}

fn check_grid(a: &OperatorSymbol, grid: &TorusGrid) -> Result<()> {
    if grid.n() != a.n() {
        return Err(Error::Dimension(format!("operator `{}` has n = {} but the grid has n = {}", a.name(), a.n(), grid.n())));
    }
    Ok(())
}

/// `A(D) v` by spectral differentiation. Multipliers vanish on Nyquist
/// modes, which have no partner `−ξ` on the grid.
pub fn apply_operator(a: &OperatorSymbol, v: &PeriodicField) -> Result<PeriodicField> {
    check_grid(a, &v.grid)?;
    if v.dim != a.dim_from() {
        return Err(Error::Dimension(format!("field has {} components, operator expects {}", v.dim, a.dim_from())));
    }
    let grid = &v.grid;
    let factor = derivative_factor(a.order());
    let zero = vec![Complex64::new(0.0, 0.0); a.dim_to()];
    let out = map_spectrum(grid, &v.spectrum(), a.dim_to(), |i, vh| {
        if grid.is_nyquist(i) {
            return Ok(zero.clone());
        }
        let m = a.symbol().eval_f64(&as_f64(&grid.frequency(i)));
        Ok(mat_vec(&m, vh).into_iter().map(|z| z * factor).collect())
    })?;
    Ok(PeriodicField::from_spectrum(grid, out))
}

/// Nonzero modes kept by synthesis: `|ξ_j| ≤ band` on every axis.
pub fn default_band(grid: &TorusGrid) -> usize {
    (grid.sizes().iter().min().copied().unwrap_or(8) / 8).max(1)
}

/// Random real field, band-limited and projected mode by mode onto
/// `ker A(ξ)`, with prescribed mean and unit `L²` norm of the oscillation.
pub fn synthesize_a_free(a: &OperatorSymbol, grid: &TorusGrid, seed: u64, mean: &[f64]) -> Result<PeriodicField> {
    synthesize_a_free_band(a, grid, seed, mean, default_band(grid))
}

pub fn synthesize_a_free_band(
    a: &OperatorSymbol,
    grid: &TorusGrid,
    seed: u64,
    mean: &[f64],
    band: usize,
) -> Result<PeriodicField> {
    check_grid(a, grid)?;
    let dim = a.dim_from();
    if mean.len() != dim {
        return Err(Error::Dimension(format!("mean has length {}, expected {dim}", mean.len())));
    }
    if 2 * band >= *grid.sizes().iter().min().unwrap() {
        return Err(Error::InvalidParameter(format!("band {band} does not fit the grid")));
    }
    cross_check_rank(a, grid, band)?;
    let mut g = rng(seed);
    let mut noise = PeriodicField::zeros(grid, dim);
    for c in noise.values.iter_mut() {
        c.iter_mut().for_each(|x| *x = g.gen_range(-1.0..1.0));
    }
    let spec = noise.spectrum();
    let zero = vec![Complex64::new(0.0, 0.0); dim];
    let projected = map_spectrum(grid, &spec, dim, |i, vh| {
        let k = grid.frequency(i);
        if k.iter().all(|&x| x == 0) || k.iter().any(|&x| x.unsigned_abs() as usize > band) {
            return Ok(zero.clone());
        }
        let (_, p) = kernel_projector(&a.symbol().eval_f64(&as_f64(&k)));
        Ok(mat_vec(&p, vh))
    })?;
    let osc = PeriodicField::from_spectrum(grid, projected);
    let norm = osc.l2_norm();
    let s = if norm > 0.0 { 1.0 / norm } else { 0.0 };
    let mut v = osc.scale(s);
    for (c, m) in v.values.iter_mut().zip(mean) {
        c.iter_mut().for_each(|x| *x += m);
    }
    Ok(v)
}

/// Numeric rank at a few band frequencies must match the exact generic rank.
fn cross_check_rank(a: &OperatorSymbol, grid: &TorusGrid, band: usize) -> Result<()> {
    let r = generic_rank(a)?;
    let b = band as i64;
    let n = grid.n();
    let mut probes: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
    probes.push(vec![1; n]);
    probes.push((0..n).map(|j| if j % 2 == 0 { b } else { -1 }).collect());
    let mut g = rng(0x5eed);
    while probes.len() < 10 {
        let k: Vec<i64> = (0..n).map(|_| g.gen_range(-b..=b)).collect();
        if k.iter().any(|&x| x != 0) {
            probes.push(k);
        }
    }
    for k in probes {
        let (numeric, _) = kernel_projector(&a.symbol().eval_f64(&as_f64(&k)));
        if numeric != r {
            return Err(Error::SelfCheck(format!(
                "numeric rank {numeric} at ξ = {k:?} differs from the exact generic rank {r} of `{}`",
                a.name()
            )));
        }
    }
    Ok(())
}

/// `‖A v‖₂ / (‖v‖₂ (2π max|ξ|)^order)` for the band used in synthesis.
pub fn a_free_residual(a: &OperatorSymbol, v: &PeriodicField, band: usize) -> Result<f64> {
    let av = apply_operator(a, v)?;
    let kmax = 2.0 * PI * band as f64 * (v.grid.n() as f64).sqrt();
    Ok(av.l2_norm() / (v.l2_norm() * kmax.powi(a.order() as i32)))
}
