//! Flows generated by the grid operators, evaluated by resampling, and the
//! pointwise gradient decomposition.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ops::spherical_from_gradient;
use super::{GridSpec, OperatorKind, StateField};
use crate::error::{Error, Result};
use crate::report::{Discretization, EqualityReport};

const LAGRANGE_WIDTH: usize = 8;

/// Trigonometric interpolation matrix mapping samples on the axis to values
/// at `targets`. Row `k` holds the weights for `targets[k]`.
fn trig_matrix(grid: &GridSpec, targets: &[f64]) -> Vec<Complex64> {
    let n = grid.points;
    let x0 = grid.coord(0);
    let dk = 2.0 * PI / (n as f64 * grid.spacing());
    let twiddle: Vec<Complex64> =
        (0..n).map(|p| Complex64::from_polar(1.0 / n as f64, -2.0 * PI * p as f64 / n as f64)).collect();
    let mut m = vec![Complex64::new(0.0, 0.0); targets.len() * n];
    for (k, &y) in targets.iter().enumerate() {
        let t = y - x0;
        let row = &mut m[k * n..(k + 1) * n];
        for mode in 0..n {
            let signed = if 2 * mode < n { mode as f64 } else { mode as f64 - n as f64 };
            let basis = if 2 * mode == n {
                Complex64::new((signed * dk * t).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, signed * dk * t)
            };
            for (j, w) in row.iter_mut().enumerate() {
                *w += basis * twiddle[mode * j % n];
            }
        }
    }
    m
}

/// Resamples along each axis through `y_j = map(x_j)`, the same map on every
/// axis. Uses trigonometric interpolation, exact for band-limited samples.
fn resample_separable(phi: &StateField, map: impl Fn(f64) -> f64) -> StateField {
    let grid = *phi.grid();
    let n = grid.points;
    let targets: Vec<f64> = grid.axis_coords().into_iter().map(map).collect();
    let mat = trig_matrix(&grid, &targets);
    let mut values = phi.values().to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim {
        let stride = n.pow(axis as u32);
        for block in (0..values.len()).step_by(stride * n) {
            for inner in 0..stride {
                let base = block + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                for k in 0..n {
                    let row = &mat[k * n..(k + 1) * n];
                    values[base + k * stride] = row.iter().zip(&line).map(|(w, v)| w * v).sum();
                }
            }
        }
    }
    StateField::from_parts_unchecked(grid, values)
}

fn lagrange_weights(u: f64, out: &mut [f64]) {
    let w = out.len();
    for (t, slot) in out.iter_mut().enumerate() {
        let mut acc = 1.0;
        for q in 0..w {
            if q != t {
                acc *= (u - q as f64) / (t as f64 - q as f64);
            }
        }
        *slot = acc;
    }
}

/// Resamples at `map(x)` with tensor Lagrange interpolation, periodic wrap.
fn resample_general(phi: &StateField, map: impl Fn(&[f64], &mut [f64]) + Sync) -> StateField {
    let grid = *phi.grid();
    let n = grid.points;
    let dim = grid.dim;
    let width = LAGRANGE_WIDTH.min(n);
    let h = grid.spacing();
    let src = phi.values();
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let x = grid.point(flat);
            let mut y = vec![0.0; dim];
            map(&x, &mut y);
            let mut starts = vec![0i64; dim];
            let mut weights = vec![0.0; dim * width];
            for j in 0..dim {
                let s = (y[j] + grid.half_width) / h - grid.offset;
                let i0 = s.floor() as i64 - (width as i64) / 2 + 1;
                starts[j] = i0;
                lagrange_weights(s - i0 as f64, &mut weights[j * width..(j + 1) * width]);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = vec![0usize; dim];
            'outer: loop {
                let mut w = 1.0;
                let mut off = 0usize;
                let mut stride = 1usize;
                for j in 0..dim {
                    w *= weights[j * width + idx[j]];
                    off += (starts[j] + idx[j] as i64).rem_euclid(n as i64) as usize * stride;
                    stride *= n;
                }
                acc += src[off] * w;
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if *slot < width {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            acc
        })
        .collect();
    StateField::from_parts_unchecked(grid, values)
}

/// `T(θ)φ` for the flow generated by `kind`.
pub fn flow(kind: OperatorKind, phi: &StateField, theta: f64) -> Result<StateField> {
    let grid = *phi.grid();
    match kind {
        OperatorKind::DilationGen => {
            let s = theta.exp();
            let amp = Complex64::new((grid.dim as f64 * theta / 2.0).exp(), 0.0);
            let moved = if grid.points % 2 == 0 {
                resample_separable(phi, |x| s * x)
            } else {
                resample_general(phi, |x, y| {
                    for (yj, xj) in y.iter_mut().zip(x) {
                        *yj = s * xj;
                    }
                })
            };
            Ok(moved.scaled(amp))
        }
        OperatorKind::RadialDerivRaw => {
            if grid.has_origin_point() {
                return Err(Error::OriginOnGrid("radial_deriv_raw"));
            }
            Ok(resample_general(phi, |x, y| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (yj, xj) in y.iter_mut().zip(x) {
                    *yj = xj + theta * xj / r;
                }
            }))
        }
        OperatorKind::SphericalDerivJ(j) => {
            if grid.has_origin_point() {
                return Err(Error::OriginOnGrid("spherical_deriv_j"));
            }
            if j >= grid.dim {
                return Err(Error::InvalidArgument(format!("axis {j} out of range")));
            }
            Ok(resample_general(phi, |x, y| {
                let r2 = x.iter().map(|v| v * v).sum::<f64>();
                for (k, (yk, xk)) in y.iter_mut().zip(x).enumerate() {
                    let e = if k == j { 1.0 } else { 0.0 };
                    *yk = xk + theta * (e - x[j] * xk / r2);
                }
            }))
        }
        other => Err(Error::Unsupported {
            op: "flow",
            reason: format!("no flow implemented for `{}`", other.name()),
        }),
    }
}

/// Central difference `(T(dθ)φ - T(-dθ)φ)/(2dθ)` against the generator:
/// `iAφ` for dilations, `∂_r φ` and `L_j φ` for the radial and spherical flows.
pub fn generator_consistency(kind: OperatorKind, phi: &StateField, dtheta: f64, tol: f64) -> Result<EqualityReport> {
    if !(dtheta.is_finite() && dtheta > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dtheta}")));
    }
    let (id, target) = match kind {
        OperatorKind::DilationGen => {
            let half_n = Complex64::new(phi.grid().dim as f64 / 2.0, 0.0);
            ("flow.dilation".to_string(), phi.x_dot_grad().combine(Complex64::new(1.0, 0.0), phi, half_n)?)
        }
        OperatorKind::RadialDerivRaw => ("flow.radial".to_string(), phi.radial_derivative()?),
        OperatorKind::SphericalDerivJ(j) => (format!("flow.spherical[{j}]"), phi.spherical_derivative(j)?),
        other => {
            return Err(Error::Unsupported {
                op: "generator_consistency",
                reason: format!("`{}` generates no implemented flow", other.name()),
            })
        }
    };
    let plus = flow(kind, phi, dtheta)?;
    let minus = flow(kind, phi, -dtheta)?;
    let fd = plus.combine(Complex64::new(0.5 / dtheta, 0.0), &minus, Complex64::new(-0.5 / dtheta, 0.0))?;
    let diff = fd.combine(Complex64::new(1.0, 0.0), &target, Complex64::new(-1.0, 0.0))?;
    Ok(EqualityReport::fields(id, fd.norm(), target.norm(), diff.norm(), tol)
        .with_subject(format!("dtheta={dtheta:e}"))
        .with_discretization(Discretization::Grid { grid: *phi.grid(), quadrature: super::Quadrature::Uniform }))
}

/// `|∇φ|^2 = |∂_r φ|^2 + Σ_j |L_j φ|^2`, integrated (first report) and as the
/// largest pointwise defect relative to `max |∇φ|^2` (second report).
pub fn pointwise_gradient_decomposition(phi: &StateField, tol: f64) -> Result<[EqualityReport; 2]> {
    let grid = *phi.grid();
    if grid.has_origin_point() {
        return Err(Error::OriginOnGrid("spherical_deriv_j"));
    }
    let grad = phi.gradient();
    let spherical = spherical_from_gradient(&grad);
    let radial = phi.radial_derivative()?;
    let mut max_defect: f64 = 0.0;
    let mut max_grad: f64 = 0.0;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..grid.len() {
        let g2: f64 = grad.components().iter().map(|c| c[i].norm_sqr()).sum();
        let d2 = radial.values()[i].norm_sqr() + spherical.iter().map(|f| f.values()[i].norm_sqr()).sum::<f64>();
        lhs += g2;
        rhs += d2;
        max_defect = max_defect.max((g2 - d2).abs());
        max_grad = max_grad.max(g2);
    }
    let dv = grid.cell_volume();
    let d = Discretization::Grid { grid, quadrature: super::Quadrature::Uniform };
    let pointwise = if max_grad > 0.0 { max_defect / max_grad } else { max_defect };
    Ok([
        EqualityReport::equality("grad.decomposition", lhs * dv, rhs * dv, tol).with_discretization(d.clone()),
        EqualityReport::equality("grad.decomposition_pointwise", pointwise, 0.0, tol).with_discretization(d),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: GridSpec) -> StateField {
        StateField::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2 / 2.0).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn dilation_flow_matches_generator() {
        let g = GridSpec::spectral(1, 256, 12.0).unwrap();
        let phi = gaussian(g).normalized().unwrap();
        let r = generator_consistency(OperatorKind::DilationGen, &phi, 1e-3, 1e-5).unwrap();
        assert!(r.passed, "{r:?}");
        let coarse = generator_consistency(OperatorKind::DilationGen, &phi, 2e-2, 1.0).unwrap();
        let fine = generator_consistency(OperatorKind::DilationGen, &phi, 1e-2, 1.0).unwrap();
        let ratio = coarse.abs_residual / fine.abs_residual;
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn dilation_flow_is_norm_preserving() {
        let g = GridSpec::spectral(2, 64, 10.0).unwrap();
        let phi = gaussian(g);
        let moved = flow(OperatorKind::DilationGen, &phi, 0.2).unwrap();
        assert!((moved.norm() - phi.norm()).abs() / phi.norm() < 1e-10);
    }

    #[test]
    fn radial_flow_on_radial_gaussian() {
        let g = GridSpec::spectral(3, 48, 6.0).unwrap();
        let phi = gaussian(g);
        let r = generator_consistency(OperatorKind::RadialDerivRaw, &phi, 1e-2, 1e-3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn spherical_flow_matches_generator() {
        let g = GridSpec::spectral(3, 48, 6.0).unwrap();
        let phi = StateField::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(x[0] * (-r2 / 2.0).exp(), 0.0)
        })
        .unwrap();
        let r = generator_consistency(OperatorKind::SphericalDerivJ(1), &phi, 1e-2, 1e-3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn nonpositive_step_rejected() {
        let g = GridSpec::spectral(1, 32, 6.0).unwrap();
        let phi = gaussian(g);
        assert!(generator_consistency(OperatorKind::DilationGen, &phi, 0.0, 1.0).is_err());
        assert!(generator_consistency(OperatorKind::DilationGen, &phi, -1e-3, 1.0).is_err());
        assert!(generator_consistency(OperatorKind::Coulomb, &phi, 1e-3, 1.0).is_err());
    }

    #[test]
    fn gradient_decomposition_holds() {
        let g = GridSpec::spectral(3, 32, 6.0).unwrap();
        let phi = StateField::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::from_polar(x[0] * (-r2 / 2.0).exp(), 0.7 * x[1])
        })
        .unwrap();
        let [integrated, pointwise] = pointwise_gradient_decomposition(&phi, 1e-12).unwrap();
        assert!(integrated.passed && pointwise.passed, "{integrated:?} {pointwise:?}");
    }
}
