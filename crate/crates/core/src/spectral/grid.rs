use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform grid on `[0,1)^n`; every size is a power of two, at least 8.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    sizes: Vec<usize>,
}

impl TorusGrid {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 8 || !s.is_power_of_two()) {
            return Err(Error::InvalidParameter(format!("grid size {s} must be a power of two >= 8")));
        }
        Ok(TorusGrid { sizes })
    }

    pub fn cube(n: usize, size: usize) -> Result<Self> {
        TorusGrid::new(vec![size; n])
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume.
    pub fn cell(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Multi-index of a flat position (last axis fastest).
    pub fn multi(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for d in (0..self.n()).rev() {
            out[d] = idx % self.sizes[d];
            idx /= self.sizes[d];
        }
        out
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.sizes).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi(idx).iter().zip(&self.sizes).map(|(&i, &s)| i as f64 / s as f64).collect()
    }

    /// Integer frequency of a flat index in the centered box `[-N/2, N/2)`.
    pub fn frequency(&self, idx: usize) -> Vec<i64> {
        self.multi(idx)
            .iter()
            .zip(&self.sizes)
            .map(|(&k, &s)| if k < s / 2 { k as i64 } else { k as i64 - s as i64 })
            .collect()
    }

    /// Whether some component sits on the Nyquist frequency `-N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.frequency(idx).iter().zip(&self.sizes).any(|(&k, &s)| k == -(s as i64) / 2)
    }

    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        (0..self.len()).map(|i| self.frequency(i)).collect()
    }
}

/// In-place multidimensional FFT. The forward transform is normalized by
/// `1/len`, so it returns Fourier coefficients `v̂(ξ)` of
/// `v(x) = Σ v̂(ξ) e^{2πi ξ·x}`.
pub fn fft_nd(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let sizes = grid.sizes();
    let mut stride = grid.len();
    for &len in sizes {
        stride /= len;
        let plan: Arc<dyn Fft<f64>> =
            if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        let block = len * stride;
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, x) in line.iter_mut().enumerate() {
                    *x = data[start + off + k * stride];
                }
                plan.process(&mut line);
                for (k, x) in line.iter().enumerate() {
                    data[start + off + k * stride] = *x;
                }
            }
        }
    }
    if !inverse {
        let s = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|x| *x *= s);
    }
}

/// Real vector field on the torus, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    pub grid: TorusGrid,
    pub dim: usize,
    pub values: Vec<Vec<f64>>,
}

impl PeriodicField {
    pub fn zeros(grid: &TorusGrid, dim: usize) -> Self {
        PeriodicField { grid: grid.clone(), dim, values: vec![vec![0.0; grid.len()]; dim] }
    }

    pub fn from_fn(grid: &TorusGrid, dim: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut out = PeriodicField::zeros(grid, dim);
        for i in 0..grid.len() {
            for (c, v) in f(&grid.point(i)).into_iter().enumerate().take(dim) {
                out.values[c][i] = v;
            }
        }
        out
    }

    pub fn spectrum(&self) -> Vec<Vec<Complex64>> {
        self.values
            .iter()
            .map(|comp| {
                let mut d: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fft_nd(&self.grid, &mut d, false);
                d
            })
            .collect()
    }

    /// Inverse transform, keeping the real part.
    pub fn from_spectrum(grid: &TorusGrid, spec: Vec<Vec<Complex64>>) -> Self {
        let dim = spec.len();
        let values = spec
            .into_iter()
            .map(|mut d| {
                fft_nd(grid, &mut d, true);
                d.into_iter().map(|z| z.re).collect()
            })
            .collect();
        PeriodicField { grid: grid.clone(), dim, values }
    }

    /// Trigonometric interpolation onto a grid `factor` times finer per axis
    /// (zero-padding; Nyquist modes are dropped).
    pub fn upsample(&self, factor: usize) -> Result<PeriodicField> {
        let fine = TorusGrid::new(self.grid.sizes.iter().map(|s| s * factor).collect())?;
        let spec = self.spectrum();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); fine.len()]; self.dim];
        for i in 0..self.grid.len() {
            if self.grid.is_nyquist(i) {
                continue;
            }
            let k = self.grid.frequency(i);
            let m: Vec<usize> =
                k.iter().zip(fine.sizes()).map(|(&x, &s)| x.rem_euclid(s as i64) as usize).collect();
            let j = fine.flat(&m);
            for (o, c) in out.iter_mut().zip(&spec) {
                o[j] = c[i];
            }
        }
        Ok(PeriodicField::from_spectrum(&fine, out))
    }

    /// Value vector at one grid point.
    pub fn at(&self, idx: usize) -> Vec<f64> {
        self.values.iter().map(|c| c[idx]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
    }

    /// Discrete `L²([0,1)^n)` inner product.
    pub fn inner(&self, other: &PeriodicField) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        s * self.grid.cell()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `(∫ |v|^p)^{1/p}` with the pointwise Euclidean norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = (0..self.grid.len())
            .map(|i| self.values.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt().powf(p))
            .sum();
        (s * self.grid.cell()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.values.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> PeriodicField {
        self.map_values(|x| x * s)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> PeriodicField {
        PeriodicField {
            values: self.values.iter().map(|c| c.iter().map(|&x| f(x)).collect()).collect(),
            ..self.clone()
        }
    }

    pub fn zip_with(&self, other: &PeriodicField, f: impl Fn(f64, f64) -> f64) -> Result<PeriodicField> {
        if self.dim != other.dim || self.grid != other.grid {
            return Err(Error::Dimension("fields live on different grids or fibers".into()));
        }
        Ok(PeriodicField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
            ..self.clone()
        })
    }
}
