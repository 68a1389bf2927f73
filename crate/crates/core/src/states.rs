//! Random smooth test states.
//!
//! Grid states are finite combinations of tensor Hermite functions with
//! complex Gaussian coefficients damped geometrically in the total degree.
//! Radial states are `P(r^2) e^{-α r^2/2}` with a random complex polynomial.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::grid::{GridSpec, StateField};
use crate::radial::{RadialField, RadialQuadrature};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteOptions {
    /// Largest total degree of the tensor Hermite functions.
    pub max_degree: usize,
    /// Coefficient of total degree `d` is damped by `decay^d`.
    pub decay: f64,
    /// Width of the Gaussian envelope is drawn from this range.
    pub scale_range: (f64, f64),
}

impl Default for HermiteOptions {
    fn default() -> Self {
        HermiteOptions { max_degree: 8, decay: 0.6, scale_range: (0.8, 1.25) }
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Normalized Hermite functions `ψ_0..=ψ_k` at `x`.
pub fn hermite_functions(x: f64, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if k >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for j in 1..k {
        let next = (2.0 / (j + 1) as f64).sqrt() * x * out[j] - (j as f64 / (j + 1) as f64).sqrt() * out[j - 1];
        out.push(next);
    }
    out
}

fn multi_indices(dim: usize, max_degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                let used: usize = prefix.iter().sum();
                (0..=max_degree - used).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// A random normalized smooth state on `grid`.
pub fn random_hermite_state<R: Rng + ?Sized>(grid: &GridSpec, rng: &mut R, opts: &HermiteOptions) -> Result<StateField> {
    let (lo, hi) = opts.scale_range;
    let scale = if hi > lo { rng.random_range(lo..hi) } else { lo };
    let terms: Vec<(Vec<usize>, Complex64)> = multi_indices(grid.dim, opts.max_degree)
        .into_iter()
        .map(|k| {
            let d: usize = k.iter().sum();
            let c = complex_normal(rng) * opts.decay.powi(d as i32);
            (k, c)
        })
        .collect();
    let table: Vec<Vec<f64>> = grid
        .axis_coords()
        .iter()
        .map(|&x| hermite_functions(x / scale, opts.max_degree).iter().map(|h| h / scale.sqrt()).collect())
        .collect();
    let mut idx = vec![0; grid.dim];
    let values = (0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx);
            terms
                .iter()
                .map(|(k, c)| c * k.iter().zip(&idx).map(|(&deg, &i)| table[i][deg]).product::<f64>())
                .sum()
        })
        .collect();
    StateField::new(*grid, values)?.normalized()
}

/// `f(r) = P(r^2) e^{-α r^2/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    /// Coefficients of `P`, lowest degree first.
    pub poly: Vec<Complex64>,
    pub alpha: f64,
}

fn poly_eval(p: &[Complex64], u: f64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c)
}

fn poly_deriv(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

impl RadialProfile {
    /// `Q = 2P' - αP`, so that `f'(r) = r Q(r^2) e^{-α r^2/2}`.
    fn q(&self) -> Vec<Complex64> {
        let dp = poly_deriv(&self.poly);
        (0..self.poly.len())
            .map(|k| dp.get(k).copied().unwrap_or_default() * 2.0 - self.poly[k] * self.alpha)
            .collect()
    }

    pub fn f(&self, r: f64) -> Complex64 {
        poly_eval(&self.poly, r * r) * (-self.alpha * r * r / 2.0).exp()
    }

    pub fn df(&self, r: f64) -> Complex64 {
        poly_eval(&self.q(), r * r) * r * (-self.alpha * r * r / 2.0).exp()
    }

    pub fn d2f(&self, r: f64) -> Complex64 {
        let q = self.q();
        let dq = poly_deriv(&q);
        let u = r * r;
        (poly_eval(&q, u) + (poly_eval(&dq, u) * 2.0 - poly_eval(&q, u) * self.alpha) * u)
            * (-self.alpha * u / 2.0).exp()
    }

    pub fn on_quadrature(&self, quad: RadialQuadrature) -> Result<RadialField> {
        RadialField::from_fns(quad, |r| self.f(r), |r| self.df(r), |r| self.d2f(r))
    }

    pub fn on_grid(&self, grid: &GridSpec) -> Result<StateField> {
        StateField::from_fn(*grid, |x| self.f(x.iter().map(|v| v * v).sum::<f64>().sqrt()))
    }
}

/// A random radial profile of polynomial degree at most 3 in `r^2`.
pub fn random_radial_profile<R: Rng + ?Sized>(rng: &mut R) -> RadialProfile {
    let poly = (0..4).map(|k| complex_normal(rng) * 0.5f64.powi(k)).collect();
    RadialProfile { poly, alpha: rng.random_range(0.6..1.5) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = GridSpec::spectral(1, 256, 12.0).unwrap();
        let h = g.spacing();
        let tab: Vec<Vec<f64>> = g.axis_coords().iter().map(|&x| hermite_functions(x, 6)).collect();
        for a in 0..=6 {
            for b in 0..=6 {
                let s: f64 = tab.iter().map(|t| t[a] * t[b]).sum::<f64>() * h;
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-12, "{a} {b} {s}");
            }
        }
    }

    #[test]
    fn random_state_is_normalized_and_seeded() {
        let g = GridSpec::spectral(2, 48, 9.0).unwrap();
        let a = random_hermite_state(&g, &mut ChaCha8Rng::seed_from_u64(3), &HermiteOptions::default()).unwrap();
        let b = random_hermite_state(&g, &mut ChaCha8Rng::seed_from_u64(3), &HermiteOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radial_profile_derivatives_match_differences() {
        let p = random_radial_profile(&mut ChaCha8Rng::seed_from_u64(11));
        let e = 1e-5;
        for r in [0.3, 1.0, 2.2] {
            let fd = (p.f(r + e) - p.f(r - e)) / (2.0 * e);
            let fd2 = (p.df(r + e) - p.df(r - e)) / (2.0 * e);
            assert!((fd - p.df(r)).norm() < 1e-7 * (1.0 + p.df(r).norm()));
            assert!((fd2 - p.d2f(r)).norm() < 1e-7 * (1.0 + p.d2f(r).norm()));
        }
    }
}
