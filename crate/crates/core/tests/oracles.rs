//! Frozen reference values. Each constant was computed independently of the
//! library (by hand, closed-form integrals, or an external quadrature) and is
//! compared here against what the library produces.

use std::f64::consts::PI;

use num_complex::Complex64;
use uncertainty_core::complex_space::extremizer_class;
use uncertainty_core::forms::{anticommutator_form, commutator_form, decomposition_check, PairSample};
use uncertainty_core::gaussian::{exact_moments, realize, GaussianSpec};
use uncertainty_core::identities::{
    verify_dilation_laplacian, verify_hardy_radial, verify_position_momentum, verify_radial_coulomb_radial,
};
use uncertainty_core::radial::{gaussian_profile, RadialField, RadialQuadrature};
use uncertainty_core::search::{minimize, probe_nonattainment, Functional, SearchOptions};
use uncertainty_core::{sgn, ComplexVector, EqualityReport, GridSpec, StateField};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn find<'a>(rs: &'a [EqualityReport], id: &str) -> &'a EqualityReport {
    rs.iter().find(|r| r.identity_id == id).unwrap_or_else(|| panic!("no report {id}"))
}

fn grid1() -> GridSpec {
    GridSpec::spectral(1, 256, 12.0).unwrap()
}

#[test]
fn inner_product_hand_expansion() {
    let u = ComplexVector::new(vec![c(2.0, 1.0), c(3.0, 0.0)]).unwrap();
    let v = ComplexVector::new(vec![c(1.0, 0.0), c(1.0, -1.0)]).unwrap();
    assert_eq!(u.inner(&v).unwrap(), c(5.0, 4.0));
    let e1 = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let e2 = ComplexVector::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert_eq!(e1.inner(&e2).unwrap(), c(0.0, 0.0));
    let w = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
    assert_eq!(w.inner(&w).unwrap(), c(2.0, 0.0));
}

#[test]
fn sign_function_values() {
    assert_eq!(sgn(c(0.0, 0.0)), c(1.0, 0.0));
    assert_eq!(sgn(c(-4.0, 0.0)), c(-1.0, 0.0));
    let s = sgn(c(3.0, 4.0));
    assert!((s - c(0.6, 0.8)).norm() < 1e-16);
}

#[test]
fn extremizer_classes_of_multiples() {
    let u = ComplexVector::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0)]).unwrap();
    let two = extremizer_class(&u, &u.scaled(c(2.0, 0.0)), 1e-12).unwrap();
    assert_eq!(two.parts(), [true, false, true, false, true]);
    let i = extremizer_class(&u, &u.scaled(c(0.0, 1.0)), 1e-12).unwrap();
    assert_eq!(i.parts(), [false, true, false, true, true]);
    let rot = extremizer_class(&u, &u.scaled(Complex64::from_polar(1.0, PI / 4.0)), 1e-12).unwrap();
    assert_eq!(rot.parts(), [false, false, false, false, true]);
}

fn sample_with_inner(z: Complex64) -> PairSample {
    // a = (1, 0), b = (conj z, 0) gives (a|b) = z
    let a = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let b = ComplexVector::new(vec![z.conj(), c(0.0, 0.0)]).unwrap();
    PairSample::new(1.0, a, b).unwrap()
}

#[test]
fn form_values_by_substitution() {
    assert_eq!(commutator_form(&sample_with_inner(c(3.0, 0.0))), c(0.0, 0.0));
    assert_eq!(commutator_form(&sample_with_inner(c(0.0, 1.0))), c(0.0, -2.0));
    assert_eq!(anticommutator_form(&sample_with_inner(c(0.0, 1.0))), 0.0);
    assert_eq!(anticommutator_form(&sample_with_inner(c(3.0, 4.0))), 6.0);
    for r in decomposition_check(&sample_with_inner(c(3.0, 4.0)), 1e-15) {
        assert!(r.passed && r.abs_residual == 0.0);
    }
}

#[test]
fn gaussian_integral_on_grid() {
    let f = StateField::from_fn(grid1(), |x| c((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
    assert!((f.norm_sq() - PI.sqrt()).abs() / PI.sqrt() < 1e-10);
}

#[test]
fn coherent_moments_match_closed_form() {
    // ‖xφ‖ = ‖∇φ‖ = ‖φ‖/√2 for the normalized coherent state
    let phi = realize(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap(), &grid1()).unwrap();
    assert!((phi.position().norm_sq() - 0.5).abs() < 1e-12);
    assert!((phi.gradient().norm_sq() - 0.5).abs() < 1e-12);
    let m = exact_moments(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap());
    assert_eq!((m.x_norm_sq, m.grad_norm_sq), (0.5, 0.5));
    // ([A,B]φ|φ) = -i‖φ‖² for A = -i∇, B = x
    let g = phi.gradient().to_vector(Default::default()).unwrap().scaled(c(0.0, -1.0));
    let x = phi.position().to_vector(Default::default()).unwrap();
    let s = PairSample::new(1.0, g, x).unwrap();
    assert!((commutator_form(&s) - c(0.0, -1.0)).norm() < 1e-12);
    assert!(anticommutator_form(&s).abs() < 1e-12);
}

#[test]
fn squeezed_moments_match_closed_form() {
    let spec = GaussianSpec::squeezed(1, 1.0, 4.0, 0.0).unwrap();
    let m = exact_moments(&spec);
    assert_eq!((m.x_norm_sq, m.grad_norm_sq), (0.125, 2.0));
    let phi = realize(&spec, &grid1()).unwrap();
    assert!((phi.position().norm_sq() - 0.125).abs() < 1e-12);
    assert!((phi.gradient().norm_sq() - 2.0).abs() < 1e-10);
    assert!((phi.position().norm() * phi.gradient().norm() - 0.5).abs() < 1e-10);
}

#[test]
fn dilation_generator_on_gaussian_pointwise() {
    let g = grid1();
    let f = StateField::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
    let a = f.dilation_generator();
    for (k, v) in a.values().iter().enumerate() {
        let x = g.coord(k);
        let e = (-x * x / 2.0).exp();
        let exact = c(0.0, -1.0) * (-x * x * e) - c(0.0, 0.5) * e;
        assert!((v - exact).norm() < 1e-8, "x={x}");
    }
}

#[test]
fn coherent_position_momentum_saturates() {
    let phi = realize(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap(), &grid1()).unwrap();
    let rs = verify_position_momentum(&phi, 1e-8).unwrap();
    assert!(rs.iter().all(|r| r.passed));
    let x = phi.position();
    let sum = x.combine(c(1.0, 0.0), &phi.gradient(), c(1.0, 0.0)).unwrap();
    assert!(sum.norm() < 1e-10);
}

#[test]
fn dilation_laplacian_chain_on_coherent() {
    // 2‖∇φ‖² = 1 for the normalized coherent state
    let phi = realize(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap(), &grid1()).unwrap();
    let rs = verify_dilation_laplacian(&phi, 1e-7).unwrap();
    assert!(rs.iter().all(|r| r.passed));
    assert!((find(&rs, "dl.quadratic_form").lhs.re - 1.0).abs() < 1e-12);
}

/// `∫_0^∞ r^4 e^{-r^2} dr = 3√π/8`, `∫ r^2 e^{-r^2} = √π/4`, `∫ e^{-r^2} = √π/2`.
#[test]
fn hardy_three_dimensional_gaussian() {
    let q = RadialQuadrature::new(3, 40.0, 20000).unwrap();
    let psi = gaussian_profile(q, 1.0).unwrap();
    let rs = verify_hardy_radial(&psi, 1e-8).unwrap();
    let h = find(&rs, "hardy.equality");
    let p = PI.powf(1.5);
    assert!((h.lhs.re - 1.5 * p).abs() / p < 1e-10);
    assert!((h.rhs.re - (p + 0.25 * 2.0 * p)).abs() / p < 1e-10);
    assert!(rs.iter().all(|r| r.passed));
}

#[test]
fn hardy_with_vanishing_origin_value() {
    let q = RadialQuadrature::new(3, 40.0, 20000).unwrap();
    let psi = RadialField::from_fns(
        q,
        |r| c(r * (-r * r / 2.0).exp(), 0.0),
        |r| c((1.0 - r * r) * (-r * r / 2.0).exp(), 0.0),
        |r| c((r * r * r - 3.0 * r) * (-r * r / 2.0).exp(), 0.0),
    )
    .unwrap();
    let rs = verify_hardy_radial(&psi, 1e-8).unwrap();
    assert!(find(&rs, "hardy.equality").rel_residual <= 1e-8);
}

#[test]
fn coulomb_rewrite_on_three_dimensional_gaussian() {
    let q = RadialQuadrature::new(3, 40.0, 20000).unwrap();
    let rs = verify_radial_coulomb_radial(&gaussian_profile(q, 1.0).unwrap(), 1e-8).unwrap();
    let h = find(&rs, "rc.hardy_form");
    let p = PI.powf(1.5);
    assert!((h.lhs.re - 6.0 * p).abs() / p < 1e-10);
    assert!((h.rhs.re - 6.0 * p).abs() / p < 1e-10);
    // coefficient (n-1)(n-3)/4 vanishes
    let split = find(&rs, "rc.norm_split");
    assert!(split.passed);
}

/// `n = 5`: `|S^4| = 8π²/3`, `‖Aφ‖² = (8π²/3) ∫ (r^6 - 4r^4 + 4r^2) e^{-r^2} dr = (7/6) π^{5/2}`.
#[test]
fn coulomb_norm_split_in_five_dimensions() {
    let q = RadialQuadrature::new(5, 40.0, 20000).unwrap();
    let rs = verify_radial_coulomb_radial(&gaussian_profile(q, 1.0).unwrap(), 1e-8).unwrap();
    let split = find(&rs, "rc.norm_split");
    let p = PI.powf(2.5);
    assert!((split.lhs.re - 7.0 / 6.0 * p).abs() / p < 1e-10);
    assert!(split.rel_residual <= 1e-6);
}

/// With the quintic smoothstep over one unit of `log r` at both ends,
/// `∫ s^2 = 181/462` and `∫ s'^2 = 10/7`, so for `log R ≥ 2`
/// `ρ(R) = 1 + 80 / (63 (log R - 2 + 181/231))`. Also checked against an
/// adaptive quadrature of the same integrals.
#[test]
fn annulus_ratio_closed_form() {
    let frozen = [(10.0, 2.169137735344628), (100.0, 1.3747259381879346), (1000.0, 1.2231195228316134)];
    let q = RadialQuadrature::new(3, 1000.0, 20000).unwrap();
    let t = probe_nonattainment(&q, &[10.0, 100.0, 1000.0], 1e-8).unwrap();
    for ((r, rho), row) in frozen.iter().zip(&t.rows) {
        let closed = 1.0 + 80.0 / (63.0 * (f64::ln(*r) - 2.0 + 181.0 / 231.0));
        assert!((closed - rho).abs() < 1e-12);
        assert!((row.rho - rho).abs() < 1e-8, "R={r}: {} vs {rho}", row.rho);
    }
}

#[test]
fn search_from_coherent_needs_no_iterations() {
    let phi = realize(&GaussianSpec::coherent(1, 1.0, 0.0).unwrap(), &grid1()).unwrap();
    let r = minimize(Functional::Sum, &phi, &SearchOptions::default()).unwrap();
    assert_eq!(r.iterations, 0);
    assert!((r.value - 1.0).abs() < 1e-10);
}

#[test]
fn search_from_squeezed_recovers_coherent() {
    let phi = realize(&GaussianSpec::squeezed(1, 1.0, 4.0, 0.0).unwrap(), &grid1()).unwrap();
    let r = minimize(Functional::Sum, &phi, &SearchOptions::default()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-4);
    assert!(r.fidelity >= 0.999);
}
