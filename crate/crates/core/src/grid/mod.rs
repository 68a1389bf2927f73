//! Discretized `L^2(R^n)`: uniform tensor grids on the box `[-L, L)^n`.
//!
//! Sample `k` along an axis sits at `-L + (k + offset) h` with `h = 2L/N`.
//! Flat storage is axis-0 fastest: `index = i_0 + N i_1 + N^2 i_2 + ...`.

mod diff;
pub mod flow;
pub mod io;
mod ops;
mod singular;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_space::{ComplexVector, Metric};
use crate::error::{Error, Result};

pub(crate) use ops::spherical_from_gradient;
pub use ops::{Applied, OperatorHandle, OperatorKind};
pub use singular::inverse_square_lattice_constant;

/// Largest number of grid points a single field may hold.
pub const MAX_POINTS: usize = 1 << 24;

/// Discretization of the derivative operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fourier differentiation on the periodic box.
    #[default]
    SpectralPeriodic,
    /// Second-order central differences (periodic wrap).
    CentralDiff2,
    /// Fourth-order central differences (periodic wrap).
    CentralDiff4,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SpectralPeriodic => "spectral_periodic",
            Scheme::CentralDiff2 => "central_diff_2",
            Scheme::CentralDiff4 => "central_diff_4",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" | "spectral_periodic" => Ok(Scheme::SpectralPeriodic),
            "cd2" | "central_diff_2" => Ok(Scheme::CentralDiff2),
            "cd4" | "central_diff_4" => Ok(Scheme::CentralDiff4),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Quadrature rule used for scalar products on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Every cell weighs `h^n`.
    #[default]
    Uniform,
    /// Uniform weights plus a lattice correction at the points nearest the
    /// origin, exact for integrands with an `|x|^{-2}` point singularity.
    InverseSquareCorrected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
    pub offset: f64,
    pub scheme: Scheme,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, half_width: f64, offset: f64, scheme: Scheme) -> Result<Self> {
        let g = GridSpec { dim, points, half_width, offset, scheme };
        g.validate()?;
        Ok(g)
    }

    /// Spectral grid with the half-cell offset.
    pub fn spectral(dim: usize, points: usize, half_width: f64) -> Result<Self> {
        Self::new(dim, points, half_width, 0.5, Scheme::SpectralPeriodic)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Result<Self> {
        self.scheme = scheme;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        if self.points < 2 {
            return bad(format!("{} points per axis", self.points));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return bad(format!("half width {}", self.half_width));
        }
        if !(0.0..1.0).contains(&self.offset) {
            return bad(format!("offset {} outside [0, 1)", self.offset));
        }
        match self.scheme {
            Scheme::SpectralPeriodic if self.points % 2 != 0 => {
                return bad("spectral scheme needs an even number of points".into())
            }
            Scheme::CentralDiff2 | Scheme::CentralDiff4 if self.points < 5 => {
                return bad("finite differences need at least 5 points".into())
            }
            _ => {}
        }
        let total = (self.points as u128).checked_pow(self.dim as u32).unwrap_or(u128::MAX);
        if total > MAX_POINTS as u128 {
            return bad(format!("{}^{} points exceed the cap of 2^24", self.points, self.dim));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + (k as f64 + self.offset) * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.coord(k)).collect()
    }

    /// Per-axis indices of a flat index.
    pub fn unravel(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().take(self.dim) {
            *slot = index % self.points;
            index /= self.points;
        }
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim];
        self.unravel(index, &mut idx);
        idx.iter().map(|&k| self.coord(k)).collect()
    }

    /// Whether some sample sits exactly at `x = 0`.
    pub fn has_origin_point(&self) -> bool {
        let tol = 1e-12 * self.spacing();
        (0..self.points).any(|k| self.coord(k).abs() <= tol)
    }

    /// Coordinate `x_axis` at every flat index.
    pub fn coordinate_field(&self, axis: usize) -> Vec<f64> {
        let c = self.axis_coords();
        let stride = self.points.pow(axis as u32);
        (0..self.len()).map(|i| c[(i / stride) % self.points]).collect()
    }

    /// `|x|` at every flat index.
    pub fn radii(&self) -> Vec<f64> {
        let c = self.axis_coords();
        let mut r2 = vec![0.0; self.len()];
        for axis in 0..self.dim {
            let stride = self.points.pow(axis as u32);
            for (i, v) in r2.iter_mut().enumerate() {
                let x = c[(i / stride) % self.points];
                *v += x * x;
            }
        }
        r2.into_iter().map(f64::sqrt).collect()
    }

    /// Quadrature weights of the requested rule, one per flat index.
    pub fn quadrature_weights(&self, rule: Quadrature) -> Result<Arc<[f64]>> {
        match rule {
            Quadrature::Uniform => Ok(vec![self.cell_volume(); self.len()].into()),
            Quadrature::InverseSquareCorrected => singular::corrected_weights(self),
        }
    }

    /// Scalar-product rule for scalar fields.
    pub fn metric(&self, rule: Quadrature) -> Result<Metric> {
        match rule {
            Quadrature::Uniform => Ok(Metric::Uniform(self.cell_volume())),
            _ => Ok(Metric::Weighted(self.quadrature_weights(rule)?)),
        }
    }

    /// Scalar-product rule for fields with `components` stacked components.
    pub fn vector_metric(&self, rule: Quadrature, components: usize) -> Result<Metric> {
        match rule {
            Quadrature::Uniform => Ok(Metric::Uniform(self.cell_volume())),
            _ => {
                let w = self.quadrature_weights(rule)?;
                let stacked: Vec<f64> = (0..components).flat_map(|_| w.iter().copied()).collect();
                Ok(Metric::Weighted(stacked.into()))
            }
        }
    }
}

/// Complex scalar field sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StateField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl StateField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { left: values.len(), right: grid.len() });
        }
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(k));
        }
        Ok(StateField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        StateField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        grid.validate()?;
        let c = grid.axis_coords();
        let mut idx = vec![0; grid.dim];
        let mut x = vec![0.0; grid.dim];
        let values = (0..grid.len())
            .map(|i| {
                grid.unravel(i, &mut idx);
                for (xj, &k) in x.iter_mut().zip(&idx) {
                    *xj = c[k];
                }
                f(&x)
            })
            .collect();
        Self::new(grid, values)
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Self {
        StateField { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    fn same_grid(&self, other: &StateField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `h^n Σ a conj(b)`.
    pub fn inner(&self, other: &StateField) -> Result<Complex64> {
        self.same_grid(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> StateField {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> StateField {
        StateField { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &StateField, b: Complex64) -> Result<StateField> {
        self.same_grid(other)?;
        Ok(StateField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// Multiplies pointwise by a real weight field.
    pub(crate) fn times_real(&self, w: &[f64]) -> StateField {
        StateField {
            grid: self.grid,
            values: self.values.iter().zip(w).map(|(z, w)| z * *w).collect(),
        }
    }

    /// Rescaled to unit norm.
    pub fn normalized(&self) -> Result<StateField> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector("state"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// The field as an element of a scalar-product space under `rule`.
    pub fn to_vector(&self, rule: Quadrature) -> Result<ComplexVector> {
        ComplexVector::with_metric(self.values.clone(), self.grid.metric(rule)?)
    }
}

/// `C^n`-valued field; the scalar product sums over components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    components: Vec<Vec<Complex64>>,
}

impl VectorField {
    pub fn new(grid: GridSpec, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("vector field without components".into()));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::DimensionMismatch { left: c.len(), right: grid.len() });
            }
            if let Some(k) = c.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(VectorField { grid, components })
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, components: Vec<Vec<Complex64>>) -> Self {
        VectorField { grid, components }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn component(&self, j: usize) -> Option<StateField> {
        self.components.get(j).map(|c| StateField::from_parts_unchecked(self.grid, c.clone()))
    }

    pub fn inner(&self, other: &VectorField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components.len() != other.components.len() {
            return Err(Error::DimensionMismatch {
                left: self.components.len(),
                right: other.components.len(),
            });
        }
        let s: Complex64 = self
            .components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y.conj()))
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> VectorField {
        VectorField {
            grid: self.grid,
            components: self.components.iter().map(|v| v.iter().map(|z| z * c).collect()).collect(),
        }
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &VectorField, b: Complex64) -> Result<VectorField> {
        if self.grid != other.grid || self.components.len() != other.components.len() {
            return Err(Error::GridMismatch);
        }
        Ok(VectorField {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
                .collect(),
        })
    }

    /// Components stacked into one vector under `rule`.
    pub fn to_vector(&self, rule: Quadrature) -> Result<ComplexVector> {
        let entries: Vec<Complex64> = self.components.iter().flatten().copied().collect();
        ComplexVector::with_metric(entries, self.grid.vector_metric(rule, self.components.len())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 255, 12.0, 0.5, Scheme::SpectralPeriodic).is_err());
        assert!(GridSpec::new(1, 256, -1.0, 0.5, Scheme::SpectralPeriodic).is_err());
        assert!(GridSpec::new(1, 256, 1.0, 1.0, Scheme::SpectralPeriodic).is_err());
        assert!(GridSpec::new(3, 512, 1.0, 0.5, Scheme::SpectralPeriodic).is_err());
        assert!(GridSpec::new(3, 256, 1.0, 0.5, Scheme::SpectralPeriodic).is_ok());
        assert!(GridSpec::new(1, 4, 1.0, 0.5, Scheme::CentralDiff2).is_err());
        assert!(GridSpec::new(1, 7, 1.0, 0.5, Scheme::CentralDiff2).is_ok());
    }

    #[test]
    fn origin_detection() {
        assert!(GridSpec::new(1, 8, 1.0, 0.0, Scheme::SpectralPeriodic).unwrap().has_origin_point());
        assert!(!GridSpec::new(1, 8, 1.0, 0.5, Scheme::SpectralPeriodic).unwrap().has_origin_point());
        // odd N with half offset lands on zero
        assert!(GridSpec::new(1, 9, 1.0, 0.5, Scheme::CentralDiff2).unwrap().has_origin_point());
    }

    #[test]
    fn single_cell_mass() {
        let g = GridSpec::spectral(2, 16, 2.0).unwrap();
        let mut f = StateField::zeros(g);
        f.values[37] = Complex64::new(1.0, 0.0);
        assert_eq!(f.norm_sq(), g.cell_volume());
    }

    #[test]
    fn gaussian_mass_matches_sqrt_pi() {
        let g = GridSpec::spectral(1, 256, 12.0).unwrap();
        let f = StateField::from_fn(g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let exact = std::f64::consts::PI.sqrt();
        assert!((f.norm_sq() - exact).abs() / exact <= 1e-10);
    }

    #[test]
    fn disjoint_support_is_orthogonal() {
        let g = GridSpec::spectral(1, 32, 4.0).unwrap();
        let a = StateField::from_fn(g, |x| Complex64::new(if x[0] < 0.0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let b = StateField::from_fn(g, |x| Complex64::new(if x[0] > 0.0 { 2.0 } else { 0.0 }, 1.0 * (x[0] > 0.0) as u8 as f64)).unwrap();
        assert_eq!(a.inner(&b).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = GridSpec::spectral(1, 32, 4.0).unwrap();
        let g2 = GridSpec::spectral(1, 32, 5.0).unwrap();
        assert!(matches!(StateField::zeros(g1).inner(&StateField::zeros(g2)), Err(Error::GridMismatch)));
    }

    #[test]
    fn flat_order_is_axis0_fastest() {
        let g = GridSpec::spectral(2, 4, 2.0).unwrap();
        assert_eq!(g.point(1), vec![g.coord(1), g.coord(0)]);
        assert_eq!(g.point(4), vec![g.coord(0), g.coord(1)]);
        let x1 = g.coordinate_field(1);
        assert_eq!(x1[5], g.coord(1));
    }

    #[test]
    fn vector_metric_matches_field_inner() {
        let g = GridSpec::spectral(2, 8, 2.0).unwrap();
        let f = StateField::from_fn(g, |x| Complex64::new(x[0], x[1])).unwrap();
        let v = VectorField::new(g, vec![f.values().to_vec(), f.values().to_vec()]).unwrap();
        let via_vec = v.to_vector(Quadrature::Uniform).unwrap().norm_sq();
        assert!((via_vec - v.norm_sq()).abs() < 1e-12);
        assert!((v.norm_sq() - 2.0 * f.norm_sq()).abs() < 1e-12);
    }
}
