//! Partial derivatives along one axis, for every scheme.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridSpec, Scheme};

/// Applies `f` to every line of samples parallel to `axis`, in place.
fn for_each_line(grid: &GridSpec, values: &mut [Complex64], axis: usize, mut f: impl FnMut(&mut [Complex64])) {
    let n = grid.points;
    let stride = n.pow(axis as u32);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let block = stride * n;
    for start_block in (0..values.len()).step_by(block) {
        for inner in 0..stride {
            let base = start_block + inner;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = values[base + k * stride];
            }
            f(&mut line);
            for (k, v) in line.iter().enumerate() {
                values[base + k * stride] = *v;
            }
        }
    }
}

struct SpectralPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SpectralPlan {
    /// `order` 1 or 2; the Nyquist mode is dropped in both.
    fn new(grid: &GridSpec, order: u32) -> Self {
        let n = grid.points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let dk = 2.0 * PI / (n as f64 * grid.spacing());
        let scale = 1.0 / n as f64;
        let symbol = (0..n)
            .map(|m| {
                if 2 * m == n {
                    return Complex64::new(0.0, 0.0);
                }
                let k = if 2 * m < n { m as f64 } else { m as f64 - n as f64 } * dk;
                match order {
                    1 => Complex64::new(0.0, k * scale),
                    _ => Complex64::new(-k * k * scale, 0.0),
                }
            })
            .collect();
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        SpectralPlan { forward, inverse, symbol, scratch: vec![Complex64::new(0.0, 0.0); len] }
    }

    fn apply(&mut self, line: &mut [Complex64]) {
        self.forward.process_with_scratch(line, &mut self.scratch);
        for (z, s) in line.iter_mut().zip(&self.symbol) {
            *z *= s;
        }
        self.inverse.process_with_scratch(line, &mut self.scratch);
    }
}

fn stencil(line: &mut [Complex64], coeffs: &[(isize, f64)], scale: f64, buf: &mut Vec<Complex64>) {
    let n = line.len() as isize;
    buf.clear();
    buf.extend_from_slice(line);
    for (k, out) in line.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(off, c) in coeffs {
            acc += buf[(k as isize + off).rem_euclid(n) as usize] * c;
        }
        *out = acc * scale;
    }
}

const CD2_FIRST: &[(isize, f64)] = &[(1, 0.5), (-1, -0.5)];
const CD2_SECOND: &[(isize, f64)] = &[(1, 1.0), (0, -2.0), (-1, 1.0)];
const CD4_FIRST: &[(isize, f64)] = &[(2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)];
const CD4_SECOND: &[(isize, f64)] =
    &[(2, -1.0 / 12.0), (1, 16.0 / 12.0), (0, -30.0 / 12.0), (-1, 16.0 / 12.0), (-2, -1.0 / 12.0)];

/// `∂^order / ∂x_axis^order` of the sampled function, order 1 or 2.
pub(crate) fn derivative(grid: &GridSpec, values: &[Complex64], axis: usize, order: u32) -> Vec<Complex64> {
    let mut out = values.to_vec();
    let h = grid.spacing();
    match grid.scheme {
        Scheme::SpectralPeriodic => {
            let mut plan = SpectralPlan::new(grid, order);
            for_each_line(grid, &mut out, axis, |line| plan.apply(line));
        }
        scheme => {
            let coeffs = match (scheme, order) {
                (Scheme::CentralDiff2, 1) => CD2_FIRST,
                (Scheme::CentralDiff2, _) => CD2_SECOND,
                (_, 1) => CD4_FIRST,
                _ => CD4_SECOND,
            };
            let scale = h.powi(-(order as i32));
            let mut buf = Vec::with_capacity(grid.points);
            for_each_line(grid, &mut out, axis, |line| stencil(line, coeffs, scale, &mut buf));
        }
    }
    out
}

/// Sum of the second derivatives along every axis.
pub(crate) fn laplacian(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); values.len()];
    for axis in 0..grid.dim {
        for (a, d) in acc.iter_mut().zip(derivative(grid, values, axis, 2)) {
            *a += d;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave(grid: &GridSpec, m: i32) -> (Vec<Complex64>, f64) {
        let k = 2.0 * PI * m as f64 / (2.0 * grid.half_width);
        let v = grid.axis_coords().iter().map(|&x| Complex64::from_polar(1.0, k * x)).collect();
        (v, k)
    }

    #[test]
    fn spectral_plane_wave_is_eigenfunction() {
        let g = GridSpec::spectral(1, 64, 5.0).unwrap();
        let (v, k) = plane_wave(&g, 7);
        let d = derivative(&g, &v, 0, 1);
        let dd = derivative(&g, &v, 0, 2);
        for i in 0..v.len() {
            assert!((d[i] - Complex64::new(0.0, k) * v[i]).norm() < 1e-12 * k.max(1.0));
            assert!((dd[i] + v[i] * k * k).norm() < 1e-11 * k * k);
        }
    }

    #[test]
    fn axis_selection_in_2d() {
        let g = GridSpec::spectral(2, 16, 3.0).unwrap();
        let k = 2.0 * PI * 2.0 / 6.0;
        let v: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::from_polar(1.0, k * g.point(i)[1]))
            .collect();
        let d0 = derivative(&g, &v, 0, 1);
        let d1 = derivative(&g, &v, 1, 1);
        assert!(d0.iter().all(|z| z.norm() < 1e-12));
        for i in 0..v.len() {
            assert!((d1[i] - Complex64::new(0.0, k) * v[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn finite_differences_converge_at_their_order() {
        let err = |scheme: Scheme, n: usize| {
            let g = GridSpec::new(1, n, 10.0, 0.5, scheme).unwrap();
            let v: Vec<Complex64> =
                g.axis_coords().iter().map(|&x| Complex64::new((-x * x / 2.0).exp(), 0.0)).collect();
            let d = derivative(&g, &v, 0, 1);
            g.axis_coords()
                .iter()
                .zip(&d)
                .map(|(&x, z)| (z.re + x * (-x * x / 2.0).exp()).abs())
                .fold(0.0, f64::max)
        };
        let r2 = err(Scheme::CentralDiff2, 200) / err(Scheme::CentralDiff2, 400);
        let r4 = err(Scheme::CentralDiff4, 200) / err(Scheme::CentralDiff4, 400);
        assert!((r2 - 4.0).abs() < 0.2, "{r2}");
        assert!((r4 - 16.0).abs() < 1.0, "{r4}");
    }
}
