//! Verifiers for the analytic identities on `L^2(R^n)`.
//!
//! Each verifier evaluates both sides of every identity on a supplied state
//! and returns one report per identity. The arithmetic lives in kernels over
//! [`ComplexVector`]s, shared by the tensor-grid and the radial paths.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex_space::{sgn, Branch, ComplexVector, I};
use crate::error::{Error, Result};
use crate::forms::{commutator_form, extremizer_parts, PairSample};
use crate::grid::{GridSpec, Quadrature, StateField};
use crate::radial::RadialField;
use crate::report::{label_all, Discretization, EqualityReport};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn grid_tag(grid: &GridSpec, quadrature: Quadrature) -> Discretization {
    Discretization::Grid { grid: *grid, quadrature }
}

fn attach(mut reports: Vec<EqualityReport>, d: Discretization) -> Vec<EqualityReport> {
    label_all(&mut reports, "", Some(&d));
    reports
}

/// The quadrature used for integrands with an `|x|^{-2}` singularity: the
/// corrected lattice rule where available, plain cells otherwise.
pub fn singular_quadrature(grid: &GridSpec) -> Quadrature {
    if grid.quadrature_weights(Quadrature::InverseSquareCorrected).is_ok() {
        Quadrature::InverseSquareCorrected
    } else {
        Quadrature::Uniform
    }
}

fn require_nonzero(v: &ComplexVector, what: &str) -> Result<f64> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::Degenerate(format!("{what} vanishes")));
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// position and momentum

/// Position–momentum equalities from `‖φ‖^2`, `xφ` and `∇φ`:
///
/// * `pm.trace`: `n‖φ‖^2 = -2 Re(xφ|∇φ)`
/// * `pm.normalized_sum`: `n‖φ‖^2 = ‖xφ‖‖∇φ‖(2 - ‖x̂ + ĝ‖^2)`
/// * `pm.polarization`: `n‖φ‖^2 = ‖xφ‖^2 + ‖∇φ‖^2 - ‖xφ + ∇φ‖^2`
/// * `pm.modulus`: `|(xφ|∇φ)| = ‖xφ‖‖∇φ‖(1 - ½‖x̂ - sgn(xφ|∇φ) ĝ‖^2)`
pub fn position_momentum_kernel(
    n: usize,
    phi_norm_sq: f64,
    x: &ComplexVector,
    g: &ComplexVector,
    tol: f64,
) -> Result<Vec<EqualityReport>> {
    let nx = require_nonzero(x, "xφ")?;
    let ng = require_nonzero(g, "∇φ")?;
    let z = x.inner(g)?;
    let lhs = n as f64 * phi_norm_sq;
    let p = nx * ng;
    let (xh, gh) = (x.normalized()?, g.normalized()?);
    Ok(vec![
        EqualityReport::equality("pm.trace", lhs, -2.0 * z.re, tol),
        EqualityReport::equality("pm.normalized_sum", lhs, p * (2.0 - xh.combination_norm_sq(ONE, &gh, ONE)?), tol),
        EqualityReport::equality("pm.polarization", lhs, nx * nx + ng * ng - x.combination_norm_sq(ONE, g, ONE)?, tol),
        EqualityReport::equality("pm.modulus", z.norm(), p * (1.0 - 0.5 * xh.combination_norm_sq(ONE, &gh, -sgn(z))?), tol),
    ])
}

/// Position–momentum identities on a grid state.
pub fn verify_position_momentum(phi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let x = phi.position().to_vector(Quadrature::Uniform)?;
    let g = phi.gradient().to_vector(Quadrature::Uniform)?;
    let reports = position_momentum_kernel(phi.grid().dim, phi.norm_sq(), &x, &g, tol)?;
    Ok(attach(reports, grid_tag(phi.grid(), Quadrature::Uniform)))
}

/// Which position–momentum extremizer families a state belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositionMomentumClass {
    /// `n‖φ‖^2 = ‖xφ‖^2 + ‖∇φ‖^2` (coherent).
    pub sum_saturated: bool,
    /// `n‖φ‖^2 = 2‖xφ‖‖∇φ‖` (squeezed).
    pub product_saturated: bool,
    /// `|(xφ|∇φ)| = ‖xφ‖‖∇φ‖` (generalized squeezed).
    pub modulus_saturated: bool,
    /// `‖xφ + ∇φ‖ / ‖φ‖`.
    pub sum_residual: f64,
    /// `‖ ‖∇φ‖xφ + ‖xφ‖∇φ ‖ / (‖xφ‖‖∇φ‖)`.
    pub product_residual: f64,
    /// `‖ ‖∇φ‖xφ - sgn(xφ|∇φ)‖xφ‖∇φ ‖ / (‖xφ‖‖∇φ‖)`.
    pub modulus_residual: f64,
}

/// Classifies through the pair `A = -i∇`, `B = x`: squeezed states are the
/// plus branch of the imaginary-multiple part, generalized squeezed states the
/// complex-proportional part, coherent states the squeezed ones with
/// `‖xφ‖ = ‖∇φ‖`.
pub fn position_momentum_class(phi: &StateField, tol: f64) -> Result<PositionMomentumClass> {
    let x = phi.position().to_vector(Quadrature::Uniform)?;
    let g = phi.gradient().to_vector(Quadrature::Uniform)?;
    let nx = require_nonzero(&x, "xφ")?;
    let ng = require_nonzero(&g, "∇φ")?;
    let sample = PairSample::new(phi.norm_sq(), g.scaled(-I), x.clone())?;
    let parts = extremizer_parts(&sample, tol)?;
    let product = parts.imaginary_multiple == Some(Branch::Plus);
    let z = x.inner(&g)?;
    let p = nx * ng;
    Ok(PositionMomentumClass {
        sum_saturated: product && (nx - ng).abs() <= tol * nx.max(ng),
        product_saturated: product,
        modulus_saturated: parts.parallel,
        sum_residual: x.combination_norm_sq(ONE, &g, ONE)?.sqrt() / phi.norm(),
        product_residual: x.combination_norm_sq(c(ng), &g, c(nx))?.sqrt() / p,
        modulus_residual: x.combination_norm_sq(c(ng), &g, -sgn(z) * nx)?.sqrt() / p,
    })
}

// ---------------------------------------------------------------------------
// dilation lower bound

/// Dilation equalities from `φ` and `x·∇φ`:
///
/// * `dil.orthogonality`: `Re(x·∇φ + (n/2)φ | φ) / ‖φ‖^2 = 0`
/// * `dil.pythagoras`: `‖x·∇φ‖^2 = ‖x·∇φ + (n/2)φ‖^2 + (n/2)^2‖φ‖^2`
/// * `dil.gap`: `0 ≤ ‖x·∇φ + (n/2)φ‖^2`, the defect in the lower bound
/// * `dil.lower_bound`: `(n/2)^2‖φ‖^2 ≤ ‖x·∇φ‖^2`
pub fn dilation_bound_kernel(
    n: usize,
    phi: &ComplexVector,
    x_grad: &ComplexVector,
    tol: f64,
) -> Result<Vec<EqualityReport>> {
    let norm_sq = require_nonzero(phi, "φ")?.powi(2);
    let h = n as f64 / 2.0;
    let shifted = x_grad.combine(ONE, phi, c(h))?;
    let lhs = x_grad.norm_sq();
    let gap = shifted.norm_sq();
    Ok(vec![
        EqualityReport::equality("dil.orthogonality", shifted.inner(phi)?.re / norm_sq, 0.0, tol),
        EqualityReport::equality("dil.pythagoras", lhs, gap + h * h * norm_sq, tol),
        EqualityReport::at_most("dil.gap", 0.0, gap, tol),
        EqualityReport::at_most("dil.lower_bound", h * h * norm_sq, lhs, tol),
    ])
}

/// `‖x·∇φ + (n/2)φ‖^2`, the gap whose vanishing would be an extremizer.
pub fn dilation_gap(phi: &StateField) -> f64 {
    let h = phi.grid().dim as f64 / 2.0;
    phi.x_dot_grad().combine(ONE, phi, c(h)).expect("same grid").norm_sq()
}

pub fn verify_dilation_bound(phi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let v = phi.to_vector(Quadrature::Uniform)?;
    let xg = phi.x_dot_grad().to_vector(Quadrature::Uniform)?;
    let reports = dilation_bound_kernel(phi.grid().dim, &v, &xg, tol)?;
    Ok(attach(reports, grid_tag(phi.grid(), Quadrature::Uniform)))
}

pub fn verify_dilation_bound_radial(field: &RadialField, tol: f64) -> Result<Vec<EqualityReport>> {
    let q = *field.quadrature();
    let reports = dilation_bound_kernel(q.n, &field.value(), &field.x_dot_grad(), tol)?;
    Ok(attach(reports, Discretization::Radial { quadrature: q }))
}

// ---------------------------------------------------------------------------
// Hardy

/// The radial data shared by the Hardy and radial–Coulomb identities.
pub struct RadialParts {
    pub n: usize,
    pub phi: ComplexVector,
    /// `∂_r φ`.
    pub dr: ComplexVector,
    /// `φ/|x|`.
    pub inv_r: ComplexVector,
    /// `‖∇φ‖^2` and `Σ_j ‖L_j φ‖^2`, when the full gradient is available.
    pub gradient: Option<(f64, f64)>,
}

impl RadialParts {
    fn check_dim(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::DimensionTooSmall { required: 3, got: self.n });
        }
        Ok(())
    }

    /// `∂_r φ + c φ/|x|`.
    fn shifted(&self, coef: f64) -> Result<ComplexVector> {
        self.dr.combine(ONE, &self.inv_r, c(coef))
    }

    fn from_grid(phi: &StateField) -> Result<(Self, Quadrature)> {
        let grid = phi.grid();
        if grid.dim < 3 {
            return Err(Error::DimensionTooSmall { required: 3, got: grid.dim });
        }
        if grid.has_origin_point() {
            return Err(Error::OriginOnGrid("radial_deriv_raw"));
        }
        let rule = singular_quadrature(grid);
        let grad = phi.gradient();
        let spherical: f64 = crate::grid::spherical_from_gradient(&grad).iter().map(|f| f.norm_sq()).sum();
        Ok((
            RadialParts {
                n: grid.dim,
                phi: phi.to_vector(rule)?,
                dr: phi.radial_derivative()?.to_vector(rule)?,
                inv_r: phi.inverse_radius()?.to_vector(rule)?,
                gradient: Some((grad.norm_sq(), spherical)),
            },
            rule,
        ))
    }

    fn from_radial(field: &RadialField) -> Self {
        RadialParts {
            n: field.quadrature().n,
            phi: field.value(),
            dr: field.radial_derivative(),
            inv_r: field.inverse_radius(),
            gradient: Some((field.radial_derivative().norm_sq(), 0.0)),
        }
    }
}

/// Hardy identities:
///
/// * `hardy.equality`: `‖∂_r ψ‖^2 = ‖∂_r ψ + (n-2)/(2|x|) ψ‖^2 + ((n-2)/2)^2 ‖ψ/|x|‖^2`
/// * `hardy.transfer_lhs`: with `φ = ψ/|x|`, `‖x·∇φ‖^2 = ‖∂_r ψ‖^2 + (n-1)‖ψ/|x|‖^2`
/// * `hardy.transfer_rhs`: `‖x·∇φ + (n/2)φ‖^2 = ‖∂_r ψ + (n-2)/(2|x|) ψ‖^2`
/// * `hardy.chain_radial`: `‖ψ/|x|‖ ≤ 2/(n-2) ‖∂_r ψ‖`
/// * `hardy.chain_gradient`: `‖∂_r ψ‖ ≤ ‖∇ψ‖`
pub fn hardy_kernel(parts: &RadialParts, tol: f64) -> Result<Vec<EqualityReport>> {
    parts.check_dim()?;
    let n = parts.n as f64;
    let k = (n - 2.0) / 2.0;
    let dr2 = parts.dr.norm_sq();
    let inv2 = parts.inv_r.norm_sq();
    let shifted = parts.shifted(k)?;
    // x·∇(ψ/|x|) = ∂_r ψ - ψ/|x| and x·∇φ + (n/2)φ = ∂_r ψ + (n/2 - 1) ψ/|x|
    let x_grad_phi = parts.shifted(-1.0)?;
    let x_grad_phi_shift = x_grad_phi.combine(ONE, &parts.inv_r, c(n / 2.0))?;
    let mut out = vec![
        EqualityReport::equality("hardy.equality", dr2, shifted.norm_sq() + k * k * inv2, tol),
        EqualityReport::equality("hardy.transfer_lhs", x_grad_phi.norm_sq(), dr2 + (n - 1.0) * inv2, tol),
        EqualityReport::equality("hardy.transfer_rhs", x_grad_phi_shift.norm_sq(), shifted.norm_sq(), tol),
        EqualityReport::at_most("hardy.chain_radial", inv2.sqrt(), dr2.sqrt() / k, tol),
    ];
    if let Some((grad2, _)) = parts.gradient {
        out.push(EqualityReport::at_most("hardy.chain_gradient", dr2.sqrt(), grad2.sqrt(), tol));
    }
    Ok(out)
}

pub fn verify_hardy(psi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let (parts, rule) = RadialParts::from_grid(psi)?;
    Ok(attach(hardy_kernel(&parts, tol)?, grid_tag(psi.grid(), rule)))
}

pub fn verify_hardy_radial(psi: &RadialField, tol: f64) -> Result<Vec<EqualityReport>> {
    let parts = RadialParts::from_radial(psi);
    Ok(attach(hardy_kernel(&parts, tol)?, Discretization::Radial { quadrature: *psi.quadrature() }))
}

// ---------------------------------------------------------------------------
// dilation generator and Laplacian

/// The four expressions of `2‖∇φ‖^2` for `A = -i x·∇ - i n/2`, `B = -Δ`:
/// `2‖∇φ‖^2`, `2(Bφ|φ)`, `-i([A,B]φ|φ)`, `-2 Im(Aφ|Bφ)` and the normalized-sum
/// form; plus the inequality `‖∇φ‖^2 ≤ ‖Aφ‖‖Δφ‖`.
pub fn dilation_laplacian_kernel(
    grad_norm_sq: f64,
    phi: &ComplexVector,
    a_phi: &ComplexVector,
    b_phi: &ComplexVector,
    tol: f64,
) -> Result<Vec<EqualityReport>> {
    let na = require_nonzero(a_phi, "Aφ")?;
    let nb = require_nonzero(b_phi, "Bφ")?;
    let s = PairSample::new(phi.norm_sq(), a_phi.clone(), b_phi.clone())?;
    let lhs = 2.0 * grad_norm_sq;
    let (ah, bh) = (a_phi.normalized()?, b_phi.normalized()?);
    Ok(vec![
        EqualityReport::equality("dl.quadratic_form", lhs, 2.0 * b_phi.inner(phi)?, tol),
        EqualityReport::equality("dl.commutator", lhs, -I * commutator_form(&s), tol),
        EqualityReport::equality("dl.imaginary_part", lhs, -2.0 * s.inner_ab.im, tol),
        EqualityReport::equality("dl.normalized_sum", lhs, na * nb * (2.0 - ah.combination_norm_sq(ONE, &bh, I)?), tol),
        EqualityReport::at_most("dl.inequality", grad_norm_sq, na * nb, tol),
    ])
}

/// The four values the dilation–Laplacian chain equates, in order.
pub fn dilation_laplacian_values(phi: &StateField) -> Result<[f64; 4]> {
    let a = phi.dilation_generator().to_vector(Quadrature::Uniform)?;
    let b = phi.neg_laplacian().to_vector(Quadrature::Uniform)?;
    let v = phi.to_vector(Quadrature::Uniform)?;
    let s = PairSample::new(v.norm_sq(), a, b.clone())?;
    Ok([
        2.0 * phi.gradient().norm_sq(),
        2.0 * b.inner(&v)?.re,
        (-I * commutator_form(&s)).re,
        -2.0 * s.inner_ab.im,
    ])
}

pub fn verify_dilation_laplacian(phi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let a = phi.dilation_generator().to_vector(Quadrature::Uniform)?;
    let b = phi.neg_laplacian().to_vector(Quadrature::Uniform)?;
    let v = phi.to_vector(Quadrature::Uniform)?;
    let reports = dilation_laplacian_kernel(phi.gradient().norm_sq(), &v, &a, &b, tol)?;
    Ok(attach(reports, grid_tag(phi.grid(), Quadrature::Uniform)))
}

pub fn verify_dilation_laplacian_radial(field: &RadialField, tol: f64) -> Result<Vec<EqualityReport>> {
    let reports = dilation_laplacian_kernel(
        field.radial_derivative().norm_sq(),
        &field.value(),
        &field.dilation_generator(),
        &field.neg_laplacian(),
        tol,
    )?;
    Ok(attach(reports, Discretization::Radial { quadrature: *field.quadrature() }))
}

// ---------------------------------------------------------------------------
// symmetrized radial derivative and Coulomb potential

/// Identities for `A = -i ∂_r - i (n-1)/(2|x|)`, `B = 1/|x|`:
///
/// * `rc.commutator`, `rc.imaginary_part`, `rc.normalized_sum`: three
///   expressions of `‖Bφ‖^2`
/// * `rc.norm_split`: `‖Aφ‖^2 = ‖∂_r φ‖^2 - (n-1)(n-3)/4 ‖Bφ‖^2`
/// * `rc.relative_bound`: `‖Bφ‖ ≤ 2‖Aφ‖`
/// * `rc.orthogonality`: `Re(Bφ - 2iAφ | Bφ) / ‖Bφ‖^2 = 0`
/// * `rc.pythagoras`: `4‖Aφ‖^2 = ‖2iAφ - Bφ‖^2 + ‖Bφ‖^2`
/// * `rc.hardy_form`: `4‖∂_r φ‖^2 = 4‖∂_r φ + (n-2)/(2|x|) φ‖^2 + (n-2)^2 ‖φ/|x|‖^2`
/// * `rc.gradient_form`: `‖∇φ‖^2 - Σ‖L_j φ‖^2 = ((n-2)/2)^2 ‖φ/|x|‖^2 + ‖∂_r φ + (n-2)/(2|x|) φ‖^2`
pub fn radial_coulomb_kernel(parts: &RadialParts, tol: f64) -> Result<Vec<EqualityReport>> {
    parts.check_dim()?;
    let n = parts.n as f64;
    let b = &parts.inv_r;
    let a = parts.shifted((n - 1.0) / 2.0)?.scaled(-I);
    let na = require_nonzero(&a, "Aφ")?;
    let nb = require_nonzero(b, "Bφ")?;
    let s = PairSample::new(parts.phi.norm_sq(), a.clone(), b.clone())?;
    let b2 = nb * nb;
    let (ah, bh) = (a.normalized()?, b.normalized()?);
    let dr2 = parts.dr.norm_sq();
    let k = (n - 2.0) / 2.0;
    let hardy_rhs = parts.shifted(k)?.norm_sq();
    let two_i_a_minus_b = a.combine(2.0 * I, b, c(-1.0))?;
    let mut out = vec![
        EqualityReport::equality("rc.commutator", b2, -I * commutator_form(&s), tol),
        EqualityReport::equality("rc.imaginary_part", b2, -2.0 * s.inner_ab.im, tol),
        EqualityReport::equality("rc.normalized_sum", b2, na * nb * (2.0 - ah.combination_norm_sq(ONE, &bh, I)?), tol),
        EqualityReport::equality("rc.norm_split", na * na, dr2 - (n - 1.0) * (n - 3.0) / 4.0 * b2, tol),
        EqualityReport::at_most("rc.relative_bound", nb, 2.0 * na, tol),
        EqualityReport::equality("rc.orthogonality", b.combine(ONE, &a, -2.0 * I)?.inner(b)?.re / b2, 0.0, tol),
        EqualityReport::equality("rc.pythagoras", 4.0 * na * na, two_i_a_minus_b.norm_sq() + b2, tol),
        EqualityReport::equality("rc.hardy_form", 4.0 * dr2, 4.0 * hardy_rhs + (n - 2.0).powi(2) * b2, tol),
    ];
    if let Some((grad2, spherical2)) = parts.gradient {
        out.push(EqualityReport::equality("rc.gradient_form", grad2 - spherical2, k * k * b2 + hardy_rhs, tol));
    }
    Ok(out)
}

/// `‖Bφ‖ / (2‖Aφ‖)` for the radial–Coulomb pair; at most 1.
pub fn coulomb_ratio(parts: &RadialParts) -> Result<f64> {
    let a = parts.shifted((parts.n as f64 - 1.0) / 2.0)?;
    Ok(parts.inv_r.norm() / (2.0 * require_nonzero(&a, "Aφ")?))
}

pub fn radial_parts_grid(phi: &StateField) -> Result<RadialParts> {
    Ok(RadialParts::from_grid(phi)?.0)
}

pub fn radial_parts_radial(field: &RadialField) -> RadialParts {
    RadialParts::from_radial(field)
}

pub fn verify_radial_coulomb(phi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let (parts, rule) = RadialParts::from_grid(phi)?;
    Ok(attach(radial_coulomb_kernel(&parts, tol)?, grid_tag(phi.grid(), rule)))
}

pub fn verify_radial_coulomb_radial(field: &RadialField, tol: f64) -> Result<Vec<EqualityReport>> {
    let parts = RadialParts::from_radial(field);
    Ok(attach(radial_coulomb_kernel(&parts, tol)?, Discretization::Radial { quadrature: *field.quadrature() }))
}
