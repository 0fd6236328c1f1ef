use num_complex::Complex64;
use serde_json::{json, Value};

use super::grid::{PeriodicField, TorusGrid};
use crate::error::{Error, Result};

/// `ψ(x) = exp(−1/(1 − |x|²))` on the unit ball (unnormalized).
fn psi(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// `ψ_t` sampled on the torus with unit discrete mass, as a spectrum.
fn kernel_spectrum(grid: &TorusGrid, t: f64) -> Vec<Complex64> {
    let mut k: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let r2: f64 = grid
                .point(i)
                .iter()
                .map(|&x| {
                    let d = if x >= 0.5 { x - 1.0 } else { x };
                    (d / t) * (d / t)
                })
                .sum();
            Complex64::new(psi(r2), 0.0)
        })
        .collect();
    let mass: f64 = k.iter().map(|z| z.re).sum();
    if mass == 0.0 {
        k[0] = Complex64::new(1.0, 0.0);
    } else {
        k.iter_mut().for_each(|z| *z /= mass);
    }
    super::grid::fft_nd(grid, &mut k, false);
    // unit discrete mass means the zero mode is 1/len; rescale to 1
    let s = grid.len() as f64;
    k.iter_mut().for_each(|z| *z *= s);
    k
}

/// `∫ max_t |ψ_t * f|` over the given scales, convolutions by FFT.
pub fn hardy_norm_proxy(f: &PeriodicField, scales: &[f64]) -> Result<f64> {
    if f.dim != 1 {
        return Err(Error::Dimension("Hardy proxy takes a scalar field".into()));
    }
    if scales.is_empty() || scales.iter().any(|&t| !(t > 0.0 && t <= 0.5)) {
        return Err(Error::InvalidParameter("scales must lie in (0, 1/2]".into()));
    }
    let grid = &f.grid;
    let fh = f.spectrum();
    let mut best = vec![0.0f64; grid.len()];
    for &t in scales {
        let kh = kernel_spectrum(grid, t);
        let conv: Vec<Complex64> = fh[0].iter().zip(&kh).map(|(a, b)| a * b).collect();
        let c = PeriodicField::from_spectrum(grid, vec![conv]);
        for (b, x) in best.iter_mut().zip(&c.values[0]) {
            *b = b.max(x.abs());
        }
    }
    Ok(best.iter().sum::<f64>() * grid.cell())
}

/// `[h, 2h, 4h, …] ∩ (0, max]` with `h` the finest grid spacing.
pub fn dyadic_scales(grid: &TorusGrid, max: f64) -> Vec<f64> {
    let h = 1.0 / *grid.sizes().iter().max().unwrap() as f64;
    std::iter::successors(Some(h), |t| Some(t * 2.0)).take_while(|&t| t <= max + 1e-15).collect()
}

#[derive(Clone, Debug)]
pub struct ConcentrationReport {
    pub widths: Vec<f64>,
    pub l1: Vec<f64>,
    pub proxy: Vec<f64>,
}

impl ConcentrationReport {
    /// `(proxy/‖v‖_{L¹})` at the finest width over the coarsest.
    pub fn growth(&self) -> f64 {
        let r = |i: usize| self.proxy[i] / self.l1[i];
        r(self.proxy.len() - 1) / r(0)
    }

    /// Largest over smallest `‖v‖_{L¹}`.
    pub fn l1_spread(&self) -> f64 {
        let max = self.l1.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.l1.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn to_json(&self) -> Value {
        json!({
            "widths": self.widths,
            "l1": self.l1,
            "proxy": self.proxy,
            "growth": self.growth(),
            "l1_spread": self.l1_spread(),
        })
    }
}

/// Linear `F(v) = v` on the one-dimensional profiles `v_j = ρ_{ε_j}(· − 1/2)`,
/// unit-mass mollifiers of width `ε_j = ε₀ 2^{−j}`, `j = 0..=refinements`.
pub fn concentration_demo(size: usize, eps0: f64, refinements: usize) -> Result<ConcentrationReport> {
    let grid = TorusGrid::new(vec![size])?;
    let scales = dyadic_scales(&grid, 0.25);
    let mut rep = ConcentrationReport { widths: vec![], l1: vec![], proxy: vec![] };
    for j in 0..=refinements {
        let eps = eps0 / f64::powi(2.0, j as i32);
        let raw = PeriodicField::from_fn(&grid, 1, |x| vec![psi(((x[0] - 0.5) / eps).powi(2))]);
        let mass: f64 = raw.values[0].iter().sum::<f64>() * grid.cell();
        let v = raw.scale(1.0 / mass);
        rep.widths.push(eps);
        rep.l1.push(v.lp_norm(1.0));
        rep.proxy.push(hardy_norm_proxy(&v, &scales)?);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{builtin, parse_polynomial, BuiltinParams};
    use crate::spectral::{apply_potential, bump_field_on, evaluate_polynomial};

    #[test]
    fn constant_field_proxy_is_its_value() {
        let g = TorusGrid::cube(2, 16).unwrap();
        let f = PeriodicField::from_fn(&g, 1, |_| vec![2.5]);
        let p = hardy_norm_proxy(&f, &[0.1, 0.3]).unwrap();
        assert!((p - 2.5).abs() < 1e-12);
        assert!(hardy_norm_proxy(&f, &[0.7]).is_err());
    }

    #[test]
    fn jacobian_proxy_is_stable_under_scale_doubling() {
        let g = TorusGrid::cube(2, 128).unwrap();
        let (_, b) = builtin("curl", &BuiltinParams { n: Some(2), rows: Some(2), ..Default::default() }).unwrap();
        let v = apply_potential(&b.unwrap(), &bump_field_on(&g, 2, 7, 1, 0.4375, 0.5625)).unwrap();
        let det = parse_polynomial("v1*v4 - v2*v3", 4, "v").unwrap();
        let f = PeriodicField { grid: g.clone(), dim: 1, values: vec![evaluate_polynomial(&det, &v, &[0.0; 4]).unwrap()] };
        let a = hardy_norm_proxy(&f, &dyadic_scales(&g, 0.25)).unwrap();
        let b = hardy_norm_proxy(&f, &dyadic_scales(&g, 0.5)).unwrap();
        assert!((b - a).abs() <= 0.1 * a, "{a} -> {b}");
    }

    #[test]
    fn positive_bump_proxy_keeps_growing() {
        // no cancellation: the large-scale averages add mass far from the support
        let g = TorusGrid::cube(2, 64).unwrap();
        let f = PeriodicField::from_fn(&g, 1, |x| vec![crate::spectral::bump(x)]);
        let a = hardy_norm_proxy(&f, &dyadic_scales(&g, 0.125)).unwrap();
        let b = hardy_norm_proxy(&f, &dyadic_scales(&g, 0.25)).unwrap();
        assert!(b > 1.1 * a, "{a} -> {b}");
    }
}
