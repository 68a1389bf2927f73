//! Radial states `φ(x) = f(|x|)` on `R^n`, integrated with the midpoint rule
//! in `r` against the measure `|S^{n-1}| r^{n-1} dr`.
//!
//! When `f` extends to an even function of `r` and `n` is odd, every integrand
//! used here is even in `r` and the midpoint rule converges spectrally.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_space::{ComplexVector, Metric, I};
use crate::error::{Error, Result};

/// `Γ(n/2)` for positive integer `n`.
pub fn gamma_half(n: usize) -> f64 {
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < n as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialQuadrature {
    pub n: usize,
    pub r_max: f64,
    pub points: usize,
}

impl RadialQuadrature {
    pub fn new(n: usize, r_max: f64, points: usize) -> Result<Self> {
        let q = RadialQuadrature { n, r_max, points };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {}", self.r_max)));
        }
        if self.points == 0 {
            return Err(Error::InvalidArgument("radial quadrature needs points".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|k| (k as f64 + 0.5) * h).collect()
    }

    /// `|S^{n-1}| r_k^{n-1} h`.
    pub fn weights(&self) -> Arc<[f64]> {
        let c = sphere_area(self.n) * self.spacing();
        self.nodes().iter().map(|r| c * r.powi(self.n as i32 - 1)).collect::<Vec<_>>().into()
    }

    pub fn metric(&self) -> Metric {
        Metric::Weighted(self.weights())
    }
}

/// Samples of a radial profile and its first two derivatives.
#[derive(Clone, Debug)]
pub struct RadialField {
    quad: RadialQuadrature,
    metric: Metric,
    radii: Vec<f64>,
    f: Vec<Complex64>,
    df: Vec<Complex64>,
    d2f: Vec<Complex64>,
}

impl RadialField {
    /// Samples `f`, `f'` and `f''` at the quadrature nodes.
    pub fn from_fns(
        quad: RadialQuadrature,
        f: impl Fn(f64) -> Complex64,
        df: impl Fn(f64) -> Complex64,
        d2f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        quad.validate()?;
        let radii = quad.nodes();
        let sample = |g: &dyn Fn(f64) -> Complex64| -> Result<Vec<Complex64>> {
            let v: Vec<Complex64> = radii.iter().map(|&r| g(r)).collect();
            if let Some(k) = v.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite(k));
            }
            Ok(v)
        };
        Ok(RadialField {
            quad,
            metric: quad.metric(),
            f: sample(&f)?,
            df: sample(&df)?,
            d2f: sample(&d2f)?,
            radii,
        })
    }

    pub fn quadrature(&self) -> &RadialQuadrature {
        &self.quad
    }

    fn vector(&self, entries: Vec<Complex64>) -> ComplexVector {
        ComplexVector::with_metric(entries, self.metric.clone()).expect("finite samples on a valid quadrature")
    }

    fn combine(&self, a: impl Fn(usize) -> Complex64) -> ComplexVector {
        self.vector((0..self.radii.len()).map(a).collect())
    }

    pub fn value(&self) -> ComplexVector {
        self.vector(self.f.clone())
    }

    /// `∂_r φ = f'`; also the whole gradient, since spherical parts vanish.
    pub fn radial_derivative(&self) -> ComplexVector {
        self.vector(self.df.clone())
    }

    /// `φ/|x|`.
    pub fn inverse_radius(&self) -> ComplexVector {
        self.combine(|k| self.f[k] / self.radii[k])
    }

    /// `x·∇φ = r f'`.
    pub fn x_dot_grad(&self) -> ComplexVector {
        self.combine(|k| self.df[k] * self.radii[k])
    }

    /// `-i (r f' + (n/2) f)`.
    pub fn dilation_generator(&self) -> ComplexVector {
        let c = self.quad.n as f64 / 2.0;
        self.combine(|k| -I * (self.df[k] * self.radii[k] + self.f[k] * c))
    }

    /// `-i (f' + (n-1)/(2r) f)`.
    pub fn radial_derivative_sym(&self) -> ComplexVector {
        let c = (self.quad.n as f64 - 1.0) / 2.0;
        self.combine(|k| -I * (self.df[k] + self.f[k] * (c / self.radii[k])))
    }

    /// `-Δφ = -(f'' + (n-1) f'/r)`.
    pub fn neg_laplacian(&self) -> ComplexVector {
        let c = self.quad.n as f64 - 1.0;
        self.combine(|k| -(self.d2f[k] + self.df[k] * (c / self.radii[k])))
    }

    /// Position vector field `xφ`; its norm equals `‖r f‖`.
    pub fn radius_times(&self) -> ComplexVector {
        self.combine(|k| self.f[k] * self.radii[k])
    }
}

/// Radial Gaussian `e^{-a r^2/2}` with its derivatives.
pub fn gaussian_profile(quad: RadialQuadrature, a: f64) -> Result<RadialField> {
    RadialField::from_fns(
        quad,
        |r| Complex64::new((-a * r * r / 2.0).exp(), 0.0),
        |r| Complex64::new(-a * r * (-a * r * r / 2.0).exp(), 0.0),
        |r| Complex64::new((a * a * r * r - a) * (-a * r * r / 2.0).exp(), 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_moments_in_three_dimensions() {
        let q = RadialQuadrature::new(3, 40.0, 20000).unwrap();
        let psi = gaussian_profile(q, 1.0).unwrap();
        let p = PI.powf(1.5);
        assert!((psi.value().norm_sq() - p).abs() / p < 1e-12);
        assert!((psi.radial_derivative().norm_sq() - 1.5 * p).abs() / p < 1e-12);
        assert!((psi.inverse_radius().norm_sq() - 2.0 * p).abs() / p < 1e-12);
        // ‖-Δψ‖ = ‖(3 - r^2) ψ‖, and (-Δψ | ψ) = ‖∇ψ‖^2
        let lap = psi.neg_laplacian().inner(&psi.value()).unwrap();
        assert!((lap.re - 1.5 * p).abs() / p < 1e-12);
    }

    #[test]
    fn rejects_bad_quadrature() {
        assert!(RadialQuadrature::new(0, 1.0, 10).is_err());
        assert!(RadialQuadrature::new(3, 0.0, 10).is_err());
        assert!(RadialQuadrature::new(3, 1.0, 0).is_err());
    }
}
