use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::grid::PeriodicField;
use super::synth::{map_spectrum, mat_vec};
use crate::error::{Error, Result};
use crate::operator::OperatorSymbol;
use crate::potential::PotentialSymbol;

/// Smallest-to-largest eigenvalue ratio of `□(ξ)` treated as singular.
pub const ELLIPTICITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HodgeResult {
    pub bu_part: PeriodicField,
    pub astar_part: PeriodicField,
    pub mean_part: Vec<f64>,
    pub relative_residual: f64,
}

impl HodgeResult {
    /// `|⟨Bu, A*w⟩| / ‖v‖²`.
    pub fn orthogonality(&self, v: &PeriodicField) -> f64 {
        let nv = v.l2_norm();
        if nv == 0.0 {
            return 0.0;
        }
        self.bu_part.inner(&self.astar_part).abs() / (nv * nv)
    }

    pub fn to_json(&self, v: &PeriodicField) -> Value {
        json!({
            "mean_part": self.mean_part,
            "bu_norm": self.bu_part.l2_norm(),
            "astar_norm": self.astar_part.l2_norm(),
            "relative_residual": self.relative_residual,
            "orthogonality": self.orthogonality(v),
        })
    }
}

/// `v = mean + Bu + A*w` on the torus. At each `ξ ≠ 0` the symbols are
/// evaluated at `ξ/|ξ|`, where `□ = BBᵀ + AᵀA` needs no degree balancing,
/// and `v̂ = BBᵀ□⁻¹v̂ + AᵀA□⁻¹v̂`.
pub fn hodge_decompose(a: &OperatorSymbol, b: &PotentialSymbol, v: &PeriodicField) -> Result<HodgeResult> {
    let bs = &b.symbol;
    if bs.dim_to() != a.dim_from() || bs.n() != a.n() || v.dim != a.dim_from() || v.grid.n() != a.n() {
        return Err(Error::Dimension(format!(
            "A: {} -> {}, B: {} -> {}, field dim {} (n = {})",
            a.dim_from(),
            a.dim_to(),
            bs.dim_from(),
            bs.dim_to(),
            v.dim,
            v.grid.n()
        )));
    }
    if !a.symbol().try_mul(bs.symbol())?.is_zero() {
        return Err(Error::Precondition(format!("A·B ≠ 0 for `{}` and `{}`", a.name(), bs.name())));
    }
    let grid = &v.grid;
    let dim = v.dim;
    let spec = v.spectrum();
    let zero = vec![Complex64::new(0.0, 0.0); dim];
    let parts = map_spectrum(grid, &spec, 2 * dim, |i, vh| {
        let k = grid.frequency(i);
        if k.iter().all(|&x| x == 0) {
            return Ok([zero.clone(), zero.clone()].concat());
        }
        let xi = unit_frequency(grid, &k);
        let am = a.symbol().eval_f64(&xi);
        let bm = bs.symbol().eval_f64(&xi);
        let pb = &bm * bm.transpose();
        let pa = am.transpose() * &am;
        let inv = invert_box(&(&pb + &pa), &k)?;
        let mut out = mat_vec(&(pb * &inv), vh);
        out.extend(mat_vec(&(pa * &inv), vh));
        Ok(out)
    })?;
    let (bu_spec, as_spec) = {
        let mut p = parts;
        let second = p.split_off(dim);
        (p, second)
    };
    let bu_part = PeriodicField::from_spectrum(grid, bu_spec);
    let astar_part = PeriodicField::from_spectrum(grid, as_spec);
    let mean_part = v.mean();
    let mut residual = v.zip_with(&bu_part, |x, y| x - y)?.zip_with(&astar_part, |x, y| x - y)?;
    for (c, m) in residual.values.iter_mut().zip(&mean_part) {
        c.iter_mut().for_each(|x| *x -= m);
    }
    let nv = v.l2_norm();
    let relative_residual = if nv > 0.0 { residual.l2_norm() / nv } else { residual.l2_norm() };
    Ok(HodgeResult { bu_part, astar_part, mean_part, relative_residual })
}

/// `ξ/|ξ|`, with Nyquist components dropped unless nothing else is left, so
/// that the per-mode splitting respects the symmetry of real spectra.
fn unit_frequency(grid: &crate::spectral::TorusGrid, k: &[i64]) -> Vec<f64> {
    let mut eff: Vec<f64> =
        k.iter().zip(grid.sizes()).map(|(&x, &s)| if x == -(s as i64) / 2 { 0.0 } else { x as f64 }).collect();
    if eff.iter().all(|&x| x == 0.0) {
        eff = k.iter().map(|&x| x as f64).collect();
    }
    let norm = eff.iter().map(|x| x * x).sum::<f64>().sqrt();
    eff.iter().map(|x| x / norm).collect()
}

fn invert_box(s: &DMatrix<f64>, k: &[i64]) -> Result<DMatrix<f64>> {
    let eig = s.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if max <= 0.0 || min <= ELLIPTICITY_TOLERANCE * max {
        return Err(Error::Ellipticity {
            xi: k.to_vec(),
            detail: format!("BBᵀ + AᵀA has eigenvalues in [{min:e}, {max:e}]; check exactness and constant rank"),
        });
    }
    let inv_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x));
    Ok(&eig.eigenvectors * inv_d * eig.eigenvectors.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{builtin, BuiltinParams};
    use crate::spectral::{synthesize_a_free, TorusGrid};

    #[test]
    fn a_free_field_has_no_dual_part() {
        let (a, b) = builtin("div", &BuiltinParams::n(2)).unwrap();
        let g = TorusGrid::cube(2, 32).unwrap();
        let v = synthesize_a_free(&a, &g, 2, &[0.0, 0.0]).unwrap();
        let h = hodge_decompose(&a, &b.unwrap(), &v).unwrap();
        assert!(h.astar_part.l2_norm() < 1e-8 * v.l2_norm());
        assert!(h.relative_residual < 1e-12);
    }

    #[test]
    fn gradient_field_has_no_potential_part() {
        // div-free part of a gradient vanishes; A = div, A* ~ gradient
        let (a, b) = builtin("div", &BuiltinParams::n(2)).unwrap();
        let (curl, _) = builtin("curl", &BuiltinParams::n(2)).unwrap();
        let g = TorusGrid::cube(2, 32).unwrap();
        let v = synthesize_a_free(&curl, &g, 5, &[0.0, 0.0]).unwrap();
        let h = hodge_decompose(&a, &b.unwrap(), &v).unwrap();
        assert!(h.bu_part.l2_norm() < 1e-8);
    }

    #[test]
    fn non_exact_pair_rejected() {
        let (a, _) = builtin("div", &BuiltinParams::n(2)).unwrap();
        let (grad, _) = builtin("grad", &BuiltinParams::n(2)).unwrap();
        let g = TorusGrid::cube(2, 8).unwrap();
        let v = PeriodicField::zeros(&g, 2);
        let r = hodge_decompose(&a, &PotentialSymbol::user(grad), &v);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
