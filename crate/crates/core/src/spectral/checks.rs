use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::grid::{PeriodicField, TorusGrid};
use super::synth::{default_band, derivative_factor, map_spectrum, synthesize_a_free_band};
use crate::error::{Error, Result};
use crate::operator::{sampling::rng, OperatorSymbol};
use crate::polyalg::HomPoly;
use crate::potential::PotentialSymbol;

/// Bump support is `(BUMP_LO, BUMP_HI)^n`.
pub const BUMP_LO: f64 = 0.25;
pub const BUMP_HI: f64 = 0.75;

/// `η(x) = Π exp(−1/(1 − (4xᵢ − 2)²))` on `(0.25, 0.75)^n`, zero outside.
pub fn bump(x: &[f64]) -> f64 {
    bump_on(x, BUMP_LO, BUMP_HI)
}

/// The same profile rescaled to `(lo, hi)^n`.
pub fn bump_on(x: &[f64], lo: f64, hi: f64) -> f64 {
    x.iter()
        .map(|&xi| {
            let t = 2.0 * (xi - lo) / (hi - lo) - 1.0;
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        })
        .product()
}

/// `η` times a random trigonometric polynomial with modes `|k|_∞ ≤ modes`,
/// one per component.
pub fn bump_field(grid: &TorusGrid, dim: usize, seed: u64, modes: i64) -> PeriodicField {
    bump_field_on(grid, dim, seed, modes, BUMP_LO, BUMP_HI)
}

pub fn bump_field_on(grid: &TorusGrid, dim: usize, seed: u64, modes: i64, lo: f64, hi: f64) -> PeriodicField {
    let mut g = rng(seed);
    let mut spec = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; dim];
    for comp in spec.iter_mut() {
        for i in 0..grid.len() {
            let k = grid.frequency(i);
            if k.iter().all(|&x| x.abs() <= modes) && is_positive_half(&k) {
                let (a, b) = (g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0));
                // a cos(2πk·x) + b sin(2πk·x)
                comp[i] += Complex64::new(a / 2.0, -b / 2.0);
                let j = grid.flat(&negate(grid, &k));
                comp[j] += Complex64::new(a / 2.0, b / 2.0);
            }
        }
    }
    let mut f = PeriodicField::from_spectrum(grid, spec);
    let eta: Vec<f64> = (0..grid.len()).map(|i| bump_on(&grid.point(i), lo, hi)).collect();
    for c in f.values.iter_mut() {
        c.iter_mut().zip(&eta).for_each(|(x, e)| *x *= e);
    }
    f
}

/// `k` is zero or its first nonzero entry is positive.
fn is_positive_half(k: &[i64]) -> bool {
    match k.iter().find(|&&x| x != 0) {
        None => true,
        Some(&x) => x > 0,
    }
}

fn negate(grid: &TorusGrid, k: &[i64]) -> Vec<usize> {
    k.iter().zip(grid.sizes()).map(|(&x, &s)| (-x).rem_euclid(s as i64) as usize).collect()
}

/// Pointwise `F(z + v(x))`.
pub fn evaluate_polynomial(f: &HomPoly, v: &PeriodicField, z: &[f64]) -> Result<Vec<f64>> {
    if f.nvars() != v.dim || z.len() != v.dim {
        return Err(Error::Dimension(format!(
            "polynomial in {} variables, field of dimension {}, base point of length {}",
            f.nvars(),
            v.dim,
            z.len()
        )));
    }
    Ok((0..v.grid.len())
        .map(|i| {
            let p: Vec<f64> = v.at(i).iter().zip(z).map(|(a, b)| a + b).collect();
            f.eval_f64(&p)
        })
        .collect())
}

/// `|⨍ F(z + v) − F(z)| / (⨍ |F(z + v)| + |F(z)|)` for a random mean-zero
/// A-free `v` band-limited so that the quadrature of `F(z + v)` is exact.
pub fn periodic_quasiaffinity_check(
    f: &HomPoly,
    a: &OperatorSymbol,
    z: &[f64],
    grid: &TorusGrid,
    seed: u64,
) -> Result<f64> {
    let deg = f.degree().max(1) as usize;
    let min = *grid.sizes().iter().min().unwrap();
    let band = default_band(grid).min((min - 1) / deg).max(1);
    if deg * band >= min {
        return Err(Error::InvalidParameter(format!("grid of size {min} cannot resolve degree {deg} products")));
    }
    let v = synthesize_a_free_band(a, grid, seed, &vec![0.0; a.dim_from()], band)?;
    let vals = evaluate_polynomial(f, &v, z)?;
    let fz = f.eval_f64(z);
    let len = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / len;
    let scale = vals.iter().map(|x| x.abs()).sum::<f64>() / len + fz.abs() + f64::MIN_POSITIVE;
    Ok((mean - fz).abs() / scale)
}

/// `B(D) u` by spectral differentiation.
pub fn apply_potential(b: &PotentialSymbol, u: &PeriodicField) -> Result<PeriodicField> {
    super::synth::apply_operator(&b.symbol, u)
}

/// `|∫ F(Bu)| / ∫ |F(Bu)|` for a bump-supported random `u`. The quadrature
/// runs on a refined grid so that products of degree `deg F` do not alias.
pub fn zero_mean_check(f: &HomPoly, b: &PotentialSymbol, grid: &TorusGrid, seed: u64) -> Result<f64> {
    if grid.n() != b.symbol.n() {
        return Err(Error::Dimension("grid and potential disagree on n".into()));
    }
    let u = bump_field(grid, b.dim_u(), seed, 2);
    let v = apply_potential(b, &u)?;
    let factor = (f.degree() as usize + 1).div_ceil(2).next_power_of_two();
    let v = if factor > 1 { v.upsample(factor)? } else { v };
    let vals = evaluate_polynomial(f, &v, &vec![0.0; v.dim])?;
    let total: f64 = vals.iter().sum();
    let abs: f64 = vals.iter().map(|x| x.abs()).sum();
    Ok(if abs == 0.0 { 0.0 } else { total.abs() / abs })
}

/// `‖v − ⨍v‖` in `Ẇ^{−1,q}`: the multiplier `1/(2π|ξ|)` followed by `L^q`.
pub fn negative_sobolev_norm(v: &PeriodicField, q: f64) -> Result<f64> {
    let grid = &v.grid;
    let w = map_spectrum(grid, &v.spectrum(), v.dim, |i, vh| {
        let k = grid.frequency(i);
        let r = k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        Ok(if r == 0.0 {
            vec![Complex64::new(0.0, 0.0); vh.len()]
        } else {
            vh.iter().map(|z| z / (2.0 * PI * r)).collect()
        })
    })?;
    Ok(PeriodicField::from_spectrum(grid, w).lp_norm(q))
}

/// `‖Dφ‖_∞` for a scalar field.
pub fn gradient_sup(phi: &PeriodicField) -> Result<f64> {
    if phi.dim != 1 {
        return Err(Error::Dimension("test function must be scalar".into()));
    }
    let grid = &phi.grid;
    let n = grid.n();
    let factor = derivative_factor(1);
    let d = map_spectrum(grid, &phi.spectrum(), n, |i, vh| {
        if grid.is_nyquist(i) {
            return Ok(vec![Complex64::new(0.0, 0.0); n]);
        }
        Ok(grid.frequency(i).iter().map(|&k| vh[0] * factor * k as f64).collect())
    })?;
    Ok(PeriodicField::from_spectrum(grid, d).max_abs())
}

/// `|∫φ(F(v₁) − F(v₂))|` over
/// `‖v₁ − v₂‖_{Ẇ^{−1,q}} (‖v₁‖_{L^p} + ‖v₂‖_{L^p})^{s−1} ‖Dφ‖_∞`, with
/// `vᵢ = B uᵢ`.
pub fn quantitative_estimate_check(
    f: &HomPoly,
    b: &PotentialSymbol,
    u1: &PeriodicField,
    u2: &PeriodicField,
    phi: &PeriodicField,
    p: f64,
    q: f64,
) -> Result<f64> {
    let s = f.degree() as f64;
    if ((s - 1.0) / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("exponents must satisfy (s-1)/p + 1/q = 1; got s = {s}, p = {p}, q = {q}")));
    }
    let v1 = apply_potential(b, u1)?;
    let v2 = apply_potential(b, u2)?;
    let z = vec![0.0; v1.dim];
    let f1 = evaluate_polynomial(f, &v1, &z)?;
    let f2 = evaluate_polynomial(f, &v2, &z)?;
    let lhs = (phi.values[0].iter().zip(f1.iter().zip(&f2)).map(|(w, (a, b))| w * (a - b)).sum::<f64>()
        * phi.grid.cell())
    .abs();
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let diff = v1.zip_with(&v2, |x, y| x - y)?;
    let rhs = negative_sobolev_norm(&diff, q)? * (v1.lp_norm(p) + v2.lp_norm(p)).powf(s - 1.0) * gradient_sup(phi)?;
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{builtin, parse_polynomial, BuiltinParams};

    fn params(n: usize, rows: usize) -> BuiltinParams {
        BuiltinParams { n: Some(n), rows: Some(rows), ..Default::default() }
    }

    #[test]
    fn bump_support() {
        assert_eq!(bump(&[0.2, 0.5]), 0.0);
        assert!((bump(&[0.5]) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn determinant_is_quasiaffine_on_gradients() {
        let (curl, _) = builtin("curl", &params(2, 2)).unwrap();
        let det = parse_polynomial("v1*v4 - v2*v3", 4, "v").unwrap();
        let g = TorusGrid::cube(2, 32).unwrap();
        let d = periodic_quasiaffinity_check(&det, &curl, &[0.3, -1.0, 2.0, 0.5], &g, 3).unwrap();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn squared_norm_is_not() {
        let (div, _) = builtin("div", &BuiltinParams::n(2)).unwrap();
        let f = parse_polynomial("v1^2 + v2^2", 2, "v").unwrap();
        let g = TorusGrid::cube(2, 32).unwrap();
        assert!(periodic_quasiaffinity_check(&f, &div, &[0.0, 0.0], &g, 3).unwrap() >= 1e-2);
    }

    #[test]
    fn determinant_of_compact_gradient_has_zero_mean() {
        let (_, b) = builtin("curl", &params(2, 2)).unwrap();
        let b = b.unwrap();
        let det = parse_polynomial("v1*v4 - v2*v3", 4, "v").unwrap();
        let g = TorusGrid::cube(2, 64).unwrap();
        assert!(zero_mean_check(&det, &b, &g, 1).unwrap() < 1e-6);
        let sq = parse_polynomial("v1^2 + v2^2 + v3^2 + v4^2", 4, "v").unwrap();
        assert!((zero_mean_check(&sq, &b, &g, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_vanishes_for_equal_fields() {
        let (_, b) = builtin("curl", &params(2, 2)).unwrap();
        let b = b.unwrap();
        let det = parse_polynomial("v1*v4 - v2*v3", 4, "v").unwrap();
        let g = TorusGrid::cube(2, 32).unwrap();
        let u = bump_field(&g, 2, 1, 2);
        let phi = bump_field(&g, 1, 2, 1);
        assert_eq!(quantitative_estimate_check(&det, &b, &u, &u, &phi, 2.0, 2.0).unwrap(), 0.0);
        assert!(matches!(
            quantitative_estimate_check(&det, &b, &u, &u, &phi, 2.0, 3.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn negative_norm_of_a_single_mode() {
        // sin(2π·3x) has Ẇ^{-1,2} norm (1/(6π))·(1/√2)
        let g = TorusGrid::cube(1, 64).unwrap();
        let v = PeriodicField::from_fn(&g, 1, |x| vec![(6.0 * PI * x[0]).sin()]);
        let w = negative_sobolev_norm(&v, 2.0).unwrap();
        assert!((w - 1.0 / (6.0 * PI * 2f64.sqrt())).abs() < 1e-12);
        let phi = PeriodicField::from_fn(&g, 1, |x| vec![(2.0 * PI * x[0]).cos()]);
        assert!((gradient_sup(&phi).unwrap() - 2.0 * PI).abs() < 1e-9);
    }
}
