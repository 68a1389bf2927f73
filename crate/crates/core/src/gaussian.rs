//! Gaussian extremizers of the position–momentum relations.
//!
//! All three families share the form
//! `φ(x) = e^{iθ} ‖φ‖ (α/π)^{n/4} exp(σ λ |x|^2 / 2)` with `|σ| = 1`,
//! `Re σ < 0` and `α = -Re(σ) λ`:
//!
//! * coherent: `σ = -1`, `λ = 1`;
//! * squeezed: `σ = -1`, any `λ > 0`;
//! * generalized squeezed: any admissible `σ`, which equals
//!   `sgn conj((xφ|∇φ))` of the resulting state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, StateField};

/// Smallest `α L^2` accepted by [`realize`]: boundary mass below `e^{-20}`.
pub const MIN_DECAY_EXPONENT: f64 = 20.0;
/// Agreement required between the grid norm and the target norm.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianKind {
    Coherent,
    Squeezed,
    SqueezedGen,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub kind: GaussianKind,
    pub n: usize,
    pub norm: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "minus_one")]
    pub sgn_factor: Complex64,
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

/// Closed-form second moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub norm_sq: f64,
    pub x_norm_sq: f64,
    pub grad_norm_sq: f64,
    /// `(xφ|∇φ)`; its real part is always `-(n/2)‖φ‖^2`.
    pub inner_x_grad: Complex64,
}

impl GaussianSpec {
    pub fn coherent(n: usize, norm: f64, theta: f64) -> Result<Self> {
        Self { kind: GaussianKind::Coherent, n, norm, lambda: 1.0, theta, sgn_factor: minus_one() }.checked()
    }

    pub fn squeezed(n: usize, norm: f64, lambda: f64, theta: f64) -> Result<Self> {
        Self { kind: GaussianKind::Squeezed, n, norm, lambda, theta, sgn_factor: minus_one() }.checked()
    }

    pub fn squeezed_gen(n: usize, norm: f64, lambda: f64, theta: f64, sgn_factor: Complex64) -> Result<Self> {
        Self { kind: GaussianKind::SqueezedGen, n, norm, lambda, theta, sgn_factor }.checked()
    }

    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.norm.is_finite() && self.norm > 0.0) {
            return bad(format!("norm must be positive, got {}", self.norm));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !self.theta.is_finite() {
            return bad("phase must be finite".into());
        }
        match self.kind {
            GaussianKind::Coherent if self.lambda != 1.0 => bad("coherent state has lambda = 1".into()),
            GaussianKind::Coherent | GaussianKind::Squeezed if self.sgn_factor != minus_one() => {
                bad("sign factor is -1 outside the generalized family".into())
            }
            GaussianKind::SqueezedGen => {
                let s = self.sgn_factor;
                if (s.norm() - 1.0).abs() > 1e-12 {
                    return bad(format!("sign factor must be unimodular, |σ| = {}", s.norm()));
                }
                if s.re >= 0.0 {
                    return bad(format!("sign factor needs Re σ < 0 for a normalizable state, got {s}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Decay rate `α = -Re(σ) λ` of `|φ|^2 ∝ e^{-α|x|^2}`.
    pub fn decay(&self) -> f64 {
        -self.sgn_factor.re * self.lambda
    }

    /// `φ(x)` at a point of `R^n`.
    pub fn value_at(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let alpha = self.decay();
        let amp = self.norm * (alpha / std::f64::consts::PI).powf(self.n as f64 / 4.0);
        Complex64::from_polar(amp, self.theta) * (self.sgn_factor * (self.lambda * r2 / 2.0)).exp()
    }
}

pub fn exact_moments(spec: &GaussianSpec) -> GaussianMoments {
    let norm_sq = spec.norm * spec.norm;
    let x_norm_sq = spec.n as f64 * norm_sq / (2.0 * spec.decay());
    GaussianMoments {
        norm_sq,
        x_norm_sq,
        grad_norm_sq: spec.lambda * spec.lambda * x_norm_sq,
        inner_x_grad: spec.sgn_factor.conj() * (spec.lambda * x_norm_sq),
    }
}

/// Samples the closed form on `grid`.
pub fn realize(spec: &GaussianSpec, grid: &GridSpec) -> Result<StateField> {
    spec.validate()?;
    grid.validate()?;
    if grid.dim != spec.n {
        return Err(Error::DimensionMismatch { left: spec.n, right: grid.dim });
    }
    let exponent = spec.decay() * grid.half_width * grid.half_width;
    if exponent < MIN_DECAY_EXPONENT {
        return Err(Error::DomainTooSmall { boundary_mass: (-exponent).exp() });
    }
    let field = StateField::from_fn(*grid, |x| spec.value_at(x))?;
    let grid_norm = field.norm();
    if (grid_norm - spec.norm).abs() > NORM_TOL * spec.norm {
        return Err(Error::UnderResolved { grid_norm, target: spec.norm });
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1() -> GridSpec {
        GridSpec::spectral(1, 256, 12.0).unwrap()
    }

    #[test]
    fn coherent_closed_form() {
        let s = GaussianSpec::coherent(1, 1.0, 0.0).unwrap();
        let v = s.value_at(&[0.7]);
        assert!((v.re - PI.powf(-0.25) * (-0.49f64 / 2.0).exp()).abs() < 1e-15);
        let f = realize(&s, &grid1()).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezed_ratio_on_grid() {
        let s = GaussianSpec::squeezed(1, 1.0, 4.0, 0.0).unwrap();
        let f = realize(&s, &grid1()).unwrap();
        let ratio = f.gradient().norm() / f.position().norm();
        assert!((ratio - 4.0).abs() < 1e-8);
        let m = exact_moments(&s);
        assert_eq!(m.x_norm_sq, 1.0 / 8.0);
        assert_eq!(m.grad_norm_sq, 2.0);
        assert_eq!(m.inner_x_grad, Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn phase_only_changes_argument() {
        let a = realize(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap(), &grid1()).unwrap();
        let b = realize(&GaussianSpec::coherent(1, 1.0, PI / 3.0).unwrap(), &grid1()).unwrap();
        let rot = Complex64::from_polar(1.0, PI / 3.0);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x.norm() - y.norm()).abs() < 1e-15);
            assert!((x * rot - y).norm() < 1e-15);
        }
    }

    #[test]
    fn generalized_moments_match_grid() {
        let sigma = Complex64::from_polar(1.0, 2.5);
        let s = GaussianSpec::squeezed_gen(1, 1.3, 1.5, 0.4, sigma).unwrap();
        let f = realize(&s, &GridSpec::spectral(1, 512, 14.0).unwrap()).unwrap();
        let m = exact_moments(&s);
        let xg = f.position().inner(&f.gradient()).unwrap();
        assert!((xg - m.inner_x_grad).norm() / m.inner_x_grad.norm() < 1e-8);
        assert!((m.inner_x_grad.re + 0.5 * 1.69).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(GaussianSpec::squeezed_gen(1, 1.0, 1.0, 0.0, Complex64::new(0.0, 1.0)).is_err());
        assert!(GaussianSpec::squeezed_gen(1, 1.0, 1.0, 0.0, Complex64::new(-0.5, 0.0)).is_err());
        assert!(GaussianSpec::squeezed(1, -1.0, 1.0, 0.0).is_err());
        let mut c = GaussianSpec::coherent(1, 1.0, 0.0).unwrap();
        c.lambda = 2.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_box_rejected_with_mass() {
        let s = GaussianSpec::coherent(1, 1.0, 0.0).unwrap();
        let g = GridSpec::spectral(1, 64, 3.0).unwrap();
        match realize(&s, &g) {
            Err(Error::DomainTooSmall { boundary_mass }) => assert!((boundary_mass - (-9.0f64).exp()).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coarse_grid_is_under_resolved() {
        let s = GaussianSpec::squeezed(1, 1.0, 400.0, 0.0).unwrap();
        let g = GridSpec::spectral(1, 16, 12.0).unwrap();
        assert!(matches!(realize(&s, &g), Err(Error::UnderResolved { .. })));
    }
}
