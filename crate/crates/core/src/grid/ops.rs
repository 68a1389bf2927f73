//! The concrete operators acting on grid states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::diff::{derivative, laplacian};
use super::{GridSpec, StateField, VectorField};
use crate::complex_space::I;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `x φ`, vector valued.
    Position,
    /// `-i ∇φ`, vector valued.
    Momentum,
    /// `-i x·∇φ - i (n/2) φ`.
    DilationGen,
    /// `-Δφ`.
    NegLaplacian,
    /// `-i ∂_r φ - i (n-1)/(2|x|) φ`.
    RadialDerivSym,
    /// `φ / |x|`.
    Coulomb,
    /// `∂_r φ = (x/|x|)·∇φ`.
    RadialDerivRaw,
    /// `L_j φ = ∂_j φ - (x_j/|x|) ∂_r φ`, zero-based axis.
    SphericalDerivJ(usize),
    /// `x·∇φ`.
    XDotGrad,
}

impl OperatorKind {
    pub fn name(self) -> String {
        match self {
            OperatorKind::Position => "position".into(),
            OperatorKind::Momentum => "momentum".into(),
            OperatorKind::DilationGen => "dilation_gen".into(),
            OperatorKind::NegLaplacian => "neg_laplacian".into(),
            OperatorKind::RadialDerivSym => "radial_deriv_sym".into(),
            OperatorKind::Coulomb => "coulomb".into(),
            OperatorKind::RadialDerivRaw => "radial_deriv_raw".into(),
            OperatorKind::SphericalDerivJ(j) => format!("spherical_deriv_{j}"),
            OperatorKind::XDotGrad => "x_dot_grad".into(),
        }
    }

    /// Involves `1/|x|` or `x/|x|`.
    pub fn is_singular(self) -> bool {
        matches!(
            self,
            OperatorKind::RadialDerivSym
                | OperatorKind::Coulomb
                | OperatorKind::RadialDerivRaw
                | OperatorKind::SphericalDerivJ(_)
        )
    }

    /// Symmetric on smooth decaying states.
    pub fn is_symmetric(self) -> bool {
        !matches!(
            self,
            OperatorKind::RadialDerivRaw | OperatorKind::SphericalDerivJ(_) | OperatorKind::XDotGrad
        )
    }

    fn static_name(self) -> &'static str {
        match self {
            OperatorKind::RadialDerivSym => "radial_deriv_sym",
            OperatorKind::Coulomb => "coulomb",
            OperatorKind::RadialDerivRaw => "radial_deriv_raw",
            OperatorKind::SphericalDerivJ(_) => "spherical_deriv_j",
            _ => "operator",
        }
    }
}

/// Result of applying an operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Applied {
    Scalar(StateField),
    Vector(VectorField),
}

impl Applied {
    pub fn norm(&self) -> f64 {
        match self {
            Applied::Scalar(f) => f.norm(),
            Applied::Vector(v) => v.norm(),
        }
    }

    pub fn into_scalar(self) -> Option<StateField> {
        match self {
            Applied::Scalar(f) => Some(f),
            Applied::Vector(_) => None,
        }
    }

    pub fn into_vector(self) -> Option<VectorField> {
        match self {
            Applied::Vector(v) => Some(v),
            Applied::Scalar(_) => None,
        }
    }
}

/// A named operator bound to a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorHandle {
    pub kind: OperatorKind,
    pub grid: GridSpec,
}

impl OperatorHandle {
    pub fn new(kind: OperatorKind, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        if kind.is_singular() && grid.has_origin_point() {
            return Err(Error::OriginOnGrid(kind.static_name()));
        }
        if let OperatorKind::SphericalDerivJ(j) = kind {
            if j >= grid.dim {
                return Err(Error::InvalidArgument(format!(
                    "spherical derivative axis {j} out of range for n = {}",
                    grid.dim
                )));
            }
        }
        Ok(OperatorHandle { kind, grid })
    }

    pub fn apply(&self, phi: &StateField) -> Result<Applied> {
        if *phi.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(match self.kind {
            OperatorKind::Position => Applied::Vector(phi.position()),
            OperatorKind::Momentum => Applied::Vector(phi.momentum()),
            OperatorKind::DilationGen => Applied::Scalar(phi.dilation_generator()),
            OperatorKind::NegLaplacian => Applied::Scalar(phi.neg_laplacian()),
            OperatorKind::RadialDerivSym => Applied::Scalar(phi.radial_derivative_sym()?),
            OperatorKind::Coulomb => Applied::Scalar(phi.inverse_radius()?),
            OperatorKind::RadialDerivRaw => Applied::Scalar(phi.radial_derivative()?),
            OperatorKind::SphericalDerivJ(j) => Applied::Scalar(phi.spherical_derivative(j)?),
            OperatorKind::XDotGrad => Applied::Scalar(phi.x_dot_grad()),
        })
    }
}

impl StateField {
    fn require_origin_free(&self, op: &'static str) -> Result<()> {
        if self.grid.has_origin_point() {
            return Err(Error::OriginOnGrid(op));
        }
        Ok(())
    }

    /// First partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> StateField {
        StateField::from_parts_unchecked(self.grid, derivative(&self.grid, &self.values, axis, 1))
    }

    /// `∇φ` (without the `-i`).
    pub fn gradient(&self) -> VectorField {
        let comps = (0..self.grid.dim).map(|j| derivative(&self.grid, &self.values, j, 1)).collect();
        VectorField::from_parts_unchecked(self.grid, comps)
    }

    pub fn momentum(&self) -> VectorField {
        self.gradient().scaled(-I)
    }

    pub fn position(&self) -> VectorField {
        let comps = (0..self.grid.dim)
            .map(|j| self.times_real(&self.grid.coordinate_field(j)).values)
            .collect();
        VectorField::from_parts_unchecked(self.grid, comps)
    }

    pub fn x_dot_grad(&self) -> StateField {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for j in 0..self.grid.dim {
            let d = derivative(&self.grid, &self.values, j, 1);
            let x = self.grid.coordinate_field(j);
            for ((a, d), x) in acc.iter_mut().zip(d).zip(x) {
                *a += d * x;
            }
        }
        StateField::from_parts_unchecked(self.grid, acc)
    }

    pub fn laplacian(&self) -> StateField {
        StateField::from_parts_unchecked(self.grid, laplacian(&self.grid, &self.values))
    }

    pub fn neg_laplacian(&self) -> StateField {
        self.laplacian().scaled(Complex64::new(-1.0, 0.0))
    }

    /// `-i x·∇φ - i (n/2) φ`.
    pub fn dilation_generator(&self) -> StateField {
        let half_n = self.grid.dim as f64 / 2.0;
        let xg = self.x_dot_grad();
        StateField::from_parts_unchecked(
            self.grid,
            xg.values.iter().zip(&self.values).map(|(d, p)| -I * (d + p * half_n)).collect(),
        )
    }

    /// `φ/|x|`.
    pub fn inverse_radius(&self) -> Result<StateField> {
        self.require_origin_free("coulomb")?;
        let inv: Vec<f64> = self.grid.radii().iter().map(|r| 1.0 / r).collect();
        Ok(self.times_real(&inv))
    }

    /// `∂_r φ = (x·∇φ)/|x|`.
    pub fn radial_derivative(&self) -> Result<StateField> {
        self.require_origin_free("radial_deriv_raw")?;
        let inv: Vec<f64> = self.grid.radii().iter().map(|r| 1.0 / r).collect();
        Ok(self.x_dot_grad().times_real(&inv))
    }

    /// `-i ∂_r φ - i (n-1)/(2|x|) φ`.
    pub fn radial_derivative_sym(&self) -> Result<StateField> {
        self.require_origin_free("radial_deriv_sym")?;
        let c = (self.grid.dim as f64 - 1.0) / 2.0;
        let dr = self.radial_derivative()?;
        let radii = self.grid.radii();
        let values = dr
            .values
            .iter()
            .zip(&self.values)
            .zip(&radii)
            .map(|((d, p), r)| -I * (d + p * (c / r)))
            .collect();
        Ok(StateField::from_parts_unchecked(self.grid, values))
    }

    /// `L_j φ` for zero-based axis `j`.
    pub fn spherical_derivative(&self, j: usize) -> Result<StateField> {
        Ok(self.spherical_derivatives()?.swap_remove(j))
    }

    /// All `L_j φ`, sharing one gradient evaluation.
    pub fn spherical_derivatives(&self) -> Result<Vec<StateField>> {
        self.require_origin_free("spherical_deriv_j")?;
        Ok(spherical_from_gradient(&self.gradient()))
    }
}

/// `L_j φ` from a precomputed gradient.
pub(crate) fn spherical_from_gradient(grad: &VectorField) -> Vec<StateField> {
    let grid = *grad.grid();
    let radii = grid.radii();
    let coords: Vec<Vec<f64>> = (0..grid.dim).map(|j| grid.coordinate_field(j)).collect();
    let dr: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let s: Complex64 = (0..grid.dim).map(|j| grad.components()[j][i] * coords[j][i]).sum();
            s / radii[i]
        })
        .collect();
    (0..grid.dim)
        .map(|j| {
            let v = (0..grid.len())
                .map(|i| grad.components()[j][i] - dr[i] * (coords[j][i] / radii[i]))
                .collect();
            StateField::from_parts_unchecked(grid, v)
        })
        .collect()
}
