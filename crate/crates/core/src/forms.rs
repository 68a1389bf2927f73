//! Commutator and anticommutator forms of a symmetric operator pair.
//!
//! Everything here is computed from the two vectors `Aφ` and `Bφ` alone, so
//! the same code runs on exact vectors and on gridded states. The commutator
//! form is `([A,B]φ|φ) = (Bφ|Aφ) - (Aφ|Bφ)` and the anticommutator form is the
//! same with a plus sign; neither needs the operator products.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex_space::{
    classify, sgn, sgn_real, vector_clause, ComplexVector, ExtremizerClass, PartResiduals, I,
};
use crate::error::{Error, Result};
use crate::report::EqualityReport;

/// `‖φ‖²`, `Aφ`, `Bφ` and `(Aφ|Bφ)` for one state.
#[derive(Clone, Debug)]
pub struct PairSample {
    pub phi_norm_sq: f64,
    pub a_phi: ComplexVector,
    pub b_phi: ComplexVector,
    pub inner_ab: Complex64,
}

impl PairSample {
    pub fn new(phi_norm_sq: f64, a_phi: ComplexVector, b_phi: ComplexVector) -> Result<Self> {
        if !(phi_norm_sq.is_finite() && phi_norm_sq >= 0.0) {
            return Err(Error::InvalidArgument(format!("‖φ‖² = {phi_norm_sq}")));
        }
        let inner_ab = a_phi.inner(&b_phi)?;
        Ok(PairSample { phi_norm_sq, a_phi, b_phi, inner_ab })
    }

    /// `(Bφ|Aφ)`, recomputed from the vectors.
    pub fn inner_ba(&self) -> Complex64 {
        self.b_phi.inner(&self.a_phi).expect("validated at construction")
    }

    fn norms(&self) -> (f64, f64) {
        (self.a_phi.norm(), self.b_phi.norm())
    }
}

/// `([A,B]φ|φ) = -2i Im(Aφ|Bφ)`; purely imaginary.
pub fn commutator_form(s: &PairSample) -> Complex64 {
    Complex64::new(0.0, -2.0 * s.inner_ab.im)
}

/// `({A,B}φ|φ) = 2 Re(Aφ|Bφ)`; real.
pub fn anticommutator_form(s: &PairSample) -> f64 {
    2.0 * s.inner_ab.re
}

/// The four equivalent expressions of the commutator form, each evaluated
/// from its own scalar product.
pub fn commutator_expressions(s: &PairSample) -> [Complex64; 4] {
    let ab = s.inner_ab;
    let ba = s.inner_ba();
    [
        -2.0 * I * ab.im,
        2.0 * I * (I * ab).re,
        2.0 * I * ba.im,
        -2.0 * I * (I * ba).re,
    ]
}

/// The four equivalent expressions of the anticommutator form.
pub fn anticommutator_expressions(s: &PairSample) -> [f64; 4] {
    let ab = s.inner_ab;
    let ba = s.inner_ba();
    [2.0 * ab.re, 2.0 * (I * ab).im, 2.0 * ba.re, 2.0 * (I * ba).im]
}

/// Pairwise agreement of the equivalent expressions, both blocks.
pub fn expression_reports(s: &PairSample, tol: f64) -> Vec<EqualityReport> {
    let mut out = Vec::new();
    let c = commutator_expressions(s);
    let a = anticommutator_expressions(s);
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push(EqualityReport::equality(format!("forms.commutator_expr[{i}={j}]"), c[i], c[j], tol));
            out.push(EqualityReport::equality(format!("forms.anticommutator_expr[{i}={j}]"), a[i], a[j], tol));
        }
    }
    out
}

/// Reconstructs `(Aφ|Bφ)` and `(Bφ|Aφ)` from the two forms.
pub fn decomposition_check(s: &PairSample, tol: f64) -> [EqualityReport; 2] {
    let comm = commutator_form(s);
    let anti = Complex64::new(anticommutator_form(s), 0.0);
    [
        EqualityReport::equality("forms.decompose_ab", s.inner_ab, 0.5 * anti - 0.5 * comm, tol),
        EqualityReport::equality("forms.decompose_ba", s.inner_ba(), 0.5 * anti + 0.5 * comm, tol),
    ]
}

fn pm(s: f64) -> char {
    if s > 0.0 {
        '+'
    } else {
        '-'
    }
}

/// Equality forms of the uncertainty relations for the pair:
///
/// * `sr.commutator[±]`: `±i([A,B]φ|φ) = ‖Aφ‖‖Bφ‖(2 - ‖Â ∓ iB̂‖²)`
/// * `sr.anticommutator[±]`: `±({A,B}φ|φ) = ‖Aφ‖‖Bφ‖(2 - ‖Â ∓ B̂‖²)`
/// * `sr.modulus_forms`: `|(Aφ|Bφ)| = ½(|[A,B]|² + |{A,B}|²)^{1/2}`
/// * `sr.modulus_rotated[±]`: rotated form, one per angle (θ-independent)
/// * `sr.modulus_sign`: `|(Aφ|Bφ)| = ‖Aφ‖‖Bφ‖(1 - ½‖Â - sgn(Aφ|Bφ) B̂‖²)`
///
/// with `Â = Aφ/‖Aφ‖`, `B̂ = Bφ/‖Bφ‖`.
pub fn sr_equalities(s: &PairSample, thetas: &[f64], tol: f64) -> Result<Vec<EqualityReport>> {
    let (na, nb) = s.norms();
    if na == 0.0 {
        return Err(Error::ZeroVector("Aφ"));
    }
    if nb == 0.0 {
        return Err(Error::ZeroVector("Bφ"));
    }
    let p = na * nb;
    let a_hat = s.a_phi.normalized()?;
    let b_hat = s.b_phi.normalized()?;
    let one = Complex64::new(1.0, 0.0);
    let dist = |c: Complex64| a_hat.combination_norm_sq(one, &b_hat, c);
    let comm = commutator_form(s);
    let anti = anticommutator_form(s);
    let modulus = s.inner_ab.norm();

    let mut out = Vec::with_capacity(6 + 2 * thetas.len());
    for sign in [1.0, -1.0] {
        out.push(EqualityReport::equality(
            format!("sr.commutator[{}]", pm(sign)),
            sign * I * comm,
            p * (2.0 - dist(-sign * I)?),
            tol,
        ));
        out.push(EqualityReport::equality(
            format!("sr.anticommutator[{}]", pm(sign)),
            sign * anti,
            p * (2.0 - dist(Complex64::new(-sign, 0.0))?),
            tol,
        ));
    }
    out.push(EqualityReport::equality(
        "sr.modulus_forms",
        modulus,
        0.5 * (comm.norm_sqr() + anti * anti).sqrt(),
        tol,
    ));
    for &theta in thetas {
        let rot = Complex64::from_polar(1.0, theta);
        for sign in [1.0, -1.0] {
            let x = 1.0 - 0.5 * dist(rot)?;
            let y = 1.0 - 0.5 * dist(sign * I * rot)?;
            out.push(
                EqualityReport::equality(
                    format!("sr.modulus_rotated[{}]", pm(sign)),
                    modulus,
                    p * (x * x + y * y).sqrt(),
                    tol,
                )
                .with_subject(format!("theta={theta:.6}")),
            );
        }
    }
    out.push(EqualityReport::equality(
        "sr.modulus_sign",
        modulus,
        p * (1.0 - 0.5 * dist(-sgn(s.inner_ab))?),
        tol,
    ));
    Ok(out)
}

/// `‖Aφ‖‖Bφ‖ ≥ ½(|[A,B]|² + |{A,B}|²)^{1/2} ≥ ½|[A,B]|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyChain {
    pub product: f64,
    pub schrodinger_bound: f64,
    pub robertson_bound: f64,
}

impl UncertaintyChain {
    /// Both inequalities hold up to `slack` (relative to the product, floor 1).
    pub fn is_ordered(&self, slack: f64) -> bool {
        let s = slack * self.product.max(1.0);
        self.product + s >= self.schrodinger_bound && self.schrodinger_bound + s >= self.robertson_bound
    }
}

pub fn sr_inequality_chain(s: &PairSample) -> UncertaintyChain {
    let (na, nb) = s.norms();
    let comm = commutator_form(s);
    let anti = anticommutator_form(s);
    UncertaintyChain {
        product: na * nb,
        schrodinger_bound: 0.5 * (comm.norm_sqr() + anti * anti).sqrt(),
        robertson_bound: 0.5 * comm.norm(),
    }
}

/// Saturation classes of the pair, with clause (a) of every part stated
/// through the commutator and anticommutator forms.
pub fn extremizer_parts(s: &PairSample, tol: f64) -> Result<ExtremizerClass> {
    let (na, nb) = s.norms();
    let p = na * nb;
    let z = s.inner_ab;
    if p == 0.0 {
        return crate::complex_space::extremizer_class(&s.a_phi, &s.b_phi, tol);
    }
    let (a, b) = (&s.a_phi, &s.b_phi);
    let re = |x: f64| Complex64::new(x, 0.0);
    let comm = commutator_form(s);
    let anti = anticommutator_form(s);
    let i_comm = (I * comm).re;

    let s1 = sgn_real(anti);
    let s2 = sgn_real(i_comm);
    let parts = [
        PartResiduals {
            part: 1,
            trigger: (anti - 2.0 * s1 * p).abs() / (2.0 * p),
            others: vec![
                ("b", vector_clause(a, re(nb), b, re(s1 * na), p) / 2.0),
                ("c", (z - s1 * p).norm_sqr() / (p * p)),
            ],
        },
        PartResiduals {
            part: 2,
            trigger: (i_comm - 2.0 * s2 * p).abs() / (2.0 * p),
            others: vec![
                ("b", vector_clause(a, re(nb), b, I * s2 * na, p) / 2.0),
                ("c", (z - I * s2 * p).norm_sqr() / (p * p)),
            ],
        },
        PartResiduals {
            part: 3,
            trigger: 1.0 - anti.abs() / (2.0 * p),
            others: vec![
                ("b", (comm.norm_sqr() / (4.0 * p * p)).max(1.0 - z.norm() / p)),
                ("c", vector_clause(a, re(2.0 * nb * nb), b, re(anti), 2.0 * p * nb)),
                ("d", vector_clause(b, re(2.0 * na * na), a, re(anti), 2.0 * p * na)),
            ],
        },
        PartResiduals {
            part: 4,
            trigger: 1.0 - comm.norm() / (2.0 * p),
            others: vec![
                ("b", (anti * anti / (4.0 * p * p)).max(1.0 - z.norm() / p)),
                ("c", vector_clause(a, re(2.0 * nb * nb), b, -comm, 2.0 * p * nb)),
                ("d", vector_clause(b, re(2.0 * na * na), a, comm, 2.0 * p * na)),
            ],
        },
        PartResiduals {
            part: 5,
            trigger: 1.0 - z.norm() / p,
            others: vec![
                ("b", vector_clause(a, re(nb), b, sgn(z) * na, p) / 2.0),
                ("c", vector_clause(a, re(nb * nb), b, z, p * nb)),
                ("d", vector_clause(b, re(na * na), a, z.conj(), p * na)),
            ],
        },
    ];
    let mut class = classify(&parts, z, tol)?;
    // branches follow the forms rather than (Aφ|Bφ) directly
    class.real_multiple = class.real_multiple.map(|_| crate::complex_space::Branch::from_sign(s1));
    class.imaginary_multiple = class.imaginary_multiple.map(|_| crate::complex_space::Branch::from_sign(s2));
    Ok(class)
}
