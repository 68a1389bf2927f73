//! Finite-dimensional complex scalar-product spaces.
//!
//! A [`ComplexVector`] carries its own scalar-product rule ([`Metric`]), so the
//! same algebra serves plain `C^d`, gridded `L^2` states (uniform cell weight)
//! and radial quadratures (per-node weights). The scalar product is linear in
//! the first argument and antilinear in the second.
//!
//! This module also evaluates the equality forms of the Cauchy-Schwarz
//! inequality for the real part, imaginary part and modulus of `(u|v)`, and
//! classifies pairs that saturate them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::report::EqualityReport;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default tolerance for algebraic identities in double precision.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Multiplier applied to the tolerance when cross-checking the remaining
/// clauses of a part whose first clause fired.
pub const CLOSURE_FACTOR: f64 = 8.0;

/// Sign of a complex number: `z/|z|`, and exactly `1` at zero.
pub fn sgn(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        z / z.norm()
    }
}

/// Real sign with the same convention, `sgn(0) = 1`.
pub fn sgn_real(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Weight rule of the scalar product `(u|v) = sum_k w_k u_k conj(v_k)`.
#[derive(Clone, Debug)]
pub enum Metric {
    /// `w_k = 1`.
    Euclidean,
    /// `w_k = w` for all k (grid cell volume).
    Uniform(f64),
    /// Per-entry weights.
    Weighted(Arc<[f64]>),
}

impl Metric {
    fn compatible(&self, other: &Metric) -> bool {
        match (self, other) {
            (Metric::Euclidean, Metric::Euclidean) => true,
            (Metric::Uniform(a), Metric::Uniform(b)) => a == b,
            (Metric::Weighted(a), Metric::Weighted(b)) => Arc::ptr_eq(a, b) || a[..] == b[..],
            _ => false,
        }
    }
}

/// Element of a finite-dimensional complex scalar-product space.
#[derive(Clone, Debug)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
    metric: Metric,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        Self::with_metric(entries, Metric::Euclidean)
    }

    pub fn with_metric(entries: Vec<Complex64>, metric: Metric) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        match &metric {
            Metric::Uniform(w) if !(w.is_finite() && *w > 0.0) => {
                return Err(Error::InvalidArgument(format!("cell weight {w} must be positive")))
            }
            Metric::Weighted(w) => {
                if w.len() != entries.len() {
                    return Err(Error::DimensionMismatch { left: entries.len(), right: w.len() });
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite quadrature weight".into()));
                }
            }
            _ => {}
        }
        Ok(ComplexVector { entries, metric })
    }

    /// Real entries, Euclidean metric.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    fn check_pair(&self, other: &ComplexVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        if !self.metric.compatible(&other.metric) {
            return Err(Error::MetricMismatch);
        }
        Ok(())
    }

    /// `(self|other)`, linear in `self`, antilinear in `other`.
    pub fn inner(&self, other: &ComplexVector) -> Result<Complex64> {
        self.check_pair(other)?;
        Ok(self.inner_unchecked(other))
    }

    fn inner_unchecked(&self, other: &ComplexVector) -> Complex64 {
        let raw = |w: Option<&[f64]>| -> Complex64 {
            match w {
                None => self
                    .entries
                    .iter()
                    .zip(&other.entries)
                    .map(|(a, b)| a * b.conj())
                    .sum(),
                Some(w) => self
                    .entries
                    .iter()
                    .zip(&other.entries)
                    .zip(w)
                    .map(|((a, b), w)| a * b.conj() * *w)
                    .sum(),
            }
        };
        match &self.metric {
            Metric::Euclidean => raw(None),
            Metric::Uniform(w) => raw(None) * *w,
            Metric::Weighted(w) => raw(Some(w)),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner_unchecked(self).re
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().max(0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn scaled(&self, c: Complex64) -> ComplexVector {
        ComplexVector {
            entries: self.entries.iter().map(|z| z * c).collect(),
            metric: self.metric.clone(),
        }
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &ComplexVector, b: Complex64) -> Result<ComplexVector> {
        self.check_pair(other)?;
        Ok(ComplexVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            metric: self.metric.clone(),
        })
    }

    /// `||a*self + b*other||^2` without allocating.
    pub fn combination_norm_sq(&self, a: Complex64, other: &ComplexVector, b: Complex64) -> Result<f64> {
        self.check_pair(other)?;
        let s: f64 = match &self.metric {
            Metric::Euclidean => self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| (a * x + b * y).norm_sqr())
                .sum(),
            Metric::Uniform(w) => {
                w * self
                    .entries
                    .iter()
                    .zip(&other.entries)
                    .map(|(x, y)| (a * x + b * y).norm_sqr())
                    .sum::<f64>()
            }
            Metric::Weighted(w) => self
                .entries
                .iter()
                .zip(&other.entries)
                .zip(w.iter())
                .map(|((x, y), w)| w * (a * x + b * y).norm_sqr())
                .sum(),
        };
        Ok(s)
    }

    /// `self / ||self||`.
    pub fn normalized(&self) -> Result<ComplexVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector("cannot normalize"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Random vector with independent standard-normal real and imaginary parts.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    let entries = (0..dim.max(1))
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexVector { entries, metric: Metric::Euclidean }
}

/// `{0, pi/4, pi/2, 2, pi}` followed by `extra` uniform angles in `[0, 2pi)`.
pub fn default_angles<R: Rng + ?Sized>(rng: &mut R, extra: usize) -> Vec<f64> {
    let mut t = vec![0.0, FRAC_PI_4, FRAC_PI_2, 2.0, PI];
    t.extend((0..extra).map(|_| rng.random_range(0.0..2.0 * PI)));
    t
}

fn sign_label(s: f64) -> char {
    if s > 0.0 {
        '+'
    } else {
        '-'
    }
}

/// `1 - ||u_hat + c v_hat||^2 / 2` for unit vectors.
fn half_defect(u_hat: &ComplexVector, v_hat: &ComplexVector, c: Complex64) -> f64 {
    1.0 - 0.5 * u_hat.combination_norm_sq(Complex64::new(1.0, 0.0), v_hat, c).unwrap_or(f64::NAN)
}

/// Evaluates both sides of every Cauchy-Schwarz equality for the pair:
///
/// * `cs.modulus`: `|(u|v)| = ||u|| ||v|| (1 - ||u^ - sgn(u|v) v^||^2 / 2)`
/// * `cs.real[±]`, `cs.imag[±]`: the same for `±Re(u|v)` with `∓v^` and `±Im(u|v)` with `∓i v^`
/// * `cs.modulus_split[s,t]`: `|(u|v)|` from the squared real and imaginary
///   defects `||u^ s v^||` and `||u^ t i v^||`, all four sign pairs
/// * `cs.modulus_rotated[±]`: the rotated form with `e^{iθ} v^`, one report per angle
///
/// Here `u^ = u/||u||`. Both vectors must be nonzero.
pub fn cs_equality_residuals(
    u: &ComplexVector,
    v: &ComplexVector,
    thetas: &[f64],
    tol: f64,
) -> Result<Vec<EqualityReport>> {
    let z = u.inner(v)?;
    if u.is_zero() {
        return Err(Error::ZeroVector("u"));
    }
    if v.is_zero() {
        return Err(Error::ZeroVector("v"));
    }
    let (nu, nv) = (u.norm(), v.norm());
    let p = nu * nv;
    let u_hat = u.normalized()?;
    let v_hat = v.normalized()?;
    let mut out = Vec::with_capacity(9 + 2 * thetas.len());

    out.push(EqualityReport::equality(
        "cs.modulus",
        z.norm(),
        p * half_defect(&u_hat, &v_hat, -sgn(z)),
        tol,
    ));
    for s in [1.0, -1.0] {
        let c = Complex64::new(s, 0.0);
        out.push(EqualityReport::equality(
            format!("cs.real[{}]", sign_label(s)),
            s * z.re,
            p * half_defect(&u_hat, &v_hat, -c),
            tol,
        ));
        out.push(EqualityReport::equality(
            format!("cs.imag[{}]", sign_label(s)),
            s * z.im,
            p * half_defect(&u_hat, &v_hat, -c * I),
            tol,
        ));
    }
    for (s, t) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        let re_part = half_defect(&u_hat, &v_hat, Complex64::new(s, 0.0));
        let im_part = half_defect(&u_hat, &v_hat, I * t);
        out.push(EqualityReport::equality(
            format!("cs.modulus_split[{},{}]", sign_label(s), sign_label(t)),
            z.norm(),
            p * (re_part * re_part + im_part * im_part).sqrt(),
            tol,
        ));
    }
    for &theta in thetas {
        let rot = Complex64::from_polar(1.0, theta);
        for s in [1.0, -1.0] {
            let a = half_defect(&u_hat, &v_hat, rot);
            let b = half_defect(&u_hat, &v_hat, I * rot * s);
            out.push(
                EqualityReport::equality(
                    format!("cs.modulus_rotated[{}]", sign_label(s)),
                    z.norm(),
                    p * (a * a + b * b).sqrt(),
                    tol,
                )
                .with_subject(format!("theta={theta:.6}")),
            );
        }
    }
    Ok(out)
}

/// `+1` or `-1` branch of a signed equivalence part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn from_sign(s: f64) -> Self {
        if s < 0.0 {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Which saturation classes a pair `(u, v)` belongs to.
///
/// Part 1: `v` is a positive or negative real multiple of `u` (branch stored).
/// Part 2: `v` is a positive or negative imaginary multiple (branch stored).
/// Part 3: real proportionality of either sign. Part 4: imaginary
/// proportionality of either sign. Part 5: complex proportionality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExtremizerClass {
    pub real_multiple: Option<Branch>,
    pub imaginary_multiple: Option<Branch>,
    pub real_parallel: bool,
    pub imaginary_parallel: bool,
    pub parallel: bool,
}

impl ExtremizerClass {
    /// Fired flags of Parts (1)-(5), in order.
    pub fn parts(&self) -> [bool; 5] {
        [
            self.real_multiple.is_some(),
            self.imaginary_multiple.is_some(),
            self.real_parallel,
            self.imaginary_parallel,
            self.parallel,
        ]
    }

    fn all_hold() -> Self {
        ExtremizerClass {
            real_multiple: Some(Branch::Plus),
            imaginary_multiple: Some(Branch::Plus),
            real_parallel: true,
            imaginary_parallel: true,
            parallel: true,
        }
    }
}

/// Residuals of one equivalence part. Clause (a) is the trigger; the others
/// are cross-checked when it fires. Every residual is normalized so that it
/// is first order in the defect `1 - |.|/(||u|| ||v||)`: scalar comparisons of
/// magnitudes are linear, vector and complex comparisons are squared.
pub(crate) struct PartResiduals {
    pub part: u8,
    pub trigger: f64,
    pub others: Vec<(&'static str, f64)>,
}

impl PartResiduals {
    /// Whether clause (a) holds within `tol`; errors if it does but another
    /// clause exceeds `CLOSURE_FACTOR * tol`.
    pub fn resolve(&self, tol: f64) -> Result<bool> {
        if !(self.trigger <= tol) {
            return Ok(false);
        }
        let bound = CLOSURE_FACTOR * tol;
        for &(clause, residual) in &self.others {
            if !(residual <= bound) {
                return Err(Error::InternalConsistency { part: self.part, clause, residual, bound });
            }
        }
        Ok(true)
    }
}

/// Squared relative distance `||a x - b y||^2 / scale^2`.
pub(crate) fn vector_clause(
    x: &ComplexVector,
    a: Complex64,
    y: &ComplexVector,
    b: Complex64,
    scale: f64,
) -> f64 {
    x.combination_norm_sq(a, y, -b).unwrap_or(f64::NAN) / (scale * scale)
}

/// Clause residuals of Parts (1)-(5) for the pair, expressed through the
/// scalar product `z = (u|v)`.
pub(crate) fn part_residuals(u: &ComplexVector, v: &ComplexVector, z: Complex64) -> [PartResiduals; 5] {
    let (nu, nv) = (u.norm(), v.norm());
    let p = nu * nv;
    let re = |x: f64| Complex64::new(x, 0.0);

    let s1 = sgn_real(z.re);
    let part1 = PartResiduals {
        part: 1,
        trigger: (z.re - s1 * p).abs() / p,
        others: vec![
            ("b", vector_clause(u, re(nv), v, re(s1 * nu), p) / 2.0),
            ("c", (z - s1 * p).norm_sqr() / (p * p)),
        ],
    };

    let s2 = sgn_real(z.im);
    let part2 = PartResiduals {
        part: 2,
        trigger: (z.im - s2 * p).abs() / p,
        others: vec![
            ("b", vector_clause(u, re(nv), v, I * s2 * nu, p) / 2.0),
            ("c", (z - I * s2 * p).norm_sqr() / (p * p)),
        ],
    };

    let part3 = PartResiduals {
        part: 3,
        trigger: 1.0 - z.re.abs() / p,
        others: vec![
            ("b", (z.im * z.im / (p * p)).max(1.0 - z.norm() / p)),
            ("c", vector_clause(u, re(nv * nv), v, re(z.re), p * nv)),
            ("d", vector_clause(v, re(nu * nu), u, re(z.re), p * nu)),
        ],
    };

    let part4 = PartResiduals {
        part: 4,
        trigger: 1.0 - z.im.abs() / p,
        others: vec![
            ("b", (z.re * z.re / (p * p)).max(1.0 - z.norm() / p)),
            ("c", vector_clause(u, re(nv * nv), v, I * z.im, p * nv)),
            ("d", vector_clause(v, re(nu * nu), u, -I * z.im, p * nu)),
        ],
    };

    let part5 = PartResiduals {
        part: 5,
        trigger: 1.0 - z.norm() / p,
        others: vec![
            ("b", vector_clause(u, re(nv), v, sgn(z) * nu, p) / 2.0),
            ("c", vector_clause(u, re(nv * nv), v, z, p * nv)),
            ("d", vector_clause(v, re(nu * nu), u, z.conj(), p * nu)),
        ],
    };
    [part1, part2, part3, part4, part5]
}

pub(crate) fn classify(parts: &[PartResiduals; 5], z: Complex64, tol: f64) -> Result<ExtremizerClass> {
    let fired: Vec<bool> = parts.iter().map(|p| p.resolve(tol)).collect::<Result<_>>()?;
    Ok(ExtremizerClass {
        real_multiple: fired[0].then(|| Branch::from_sign(sgn_real(z.re))),
        imaginary_multiple: fired[1].then(|| Branch::from_sign(sgn_real(z.im))),
        real_parallel: fired[2],
        imaginary_parallel: fired[3],
        parallel: fired[4],
    })
}

/// Saturation classes of the pair. Zero vectors satisfy every part trivially.
pub fn extremizer_class(u: &ComplexVector, v: &ComplexVector, tol: f64) -> Result<ExtremizerClass> {
    let z = u.inner(v)?;
    if u.norm() * v.norm() == 0.0 {
        return Ok(ExtremizerClass::all_hold());
    }
    classify(&part_residuals(u, v, z), z, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for k in 0..u.len() {
            acc += u[k] * v[k].conj();
        }
        acc
    }

    #[test]
    fn inner_examples() {
        let e1 = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e2 = ComplexVector::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(e1.inner(&e2).unwrap(), c(0.0, 0.0));

        let w = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(w.inner(&w).unwrap(), c(2.0, 0.0));

        let u = vec![c(2.0, 1.0), c(3.0, 0.0)];
        let v = vec![c(1.0, 0.0), c(1.0, -1.0)];
        let expected = brute_inner(&u, &v);
        assert_eq!(expected, c(5.0, 4.0));
        let got = ComplexVector::new(u).unwrap().inner(&ComplexVector::new(v).unwrap()).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = ComplexVector::new(vec![c(1.0, 0.0)]).unwrap();
        let b = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
        let d = ComplexVector::with_metric(vec![c(1.0, 0.0)], Metric::Uniform(0.5)).unwrap();
        assert!(matches!(a.inner(&d), Err(Error::MetricMismatch)));
    }

    #[test]
    fn constructor_invariants() {
        assert!(matches!(ComplexVector::new(vec![]), Err(Error::EmptyVector)));
        assert!(matches!(
            ComplexVector::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn sesquilinearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_vector(&mut rng, 7);
        let v = random_vector(&mut rng, 7);
        let a = c(0.3, -1.7);
        let lhs = u.scaled(a).inner(&v).unwrap();
        assert!((lhs - a * u.inner(&v).unwrap()).norm() < 1e-12);
        let rhs = u.inner(&v.scaled(a)).unwrap();
        assert!((rhs - a.conj() * u.inner(&v).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn weighted_metric_matches_manual_sum() {
        let w: Arc<[f64]> = vec![0.5, 2.0].into();
        let u = ComplexVector::with_metric(vec![c(1.0, 1.0), c(2.0, 0.0)], Metric::Weighted(w.clone())).unwrap();
        let v = ComplexVector::with_metric(vec![c(0.0, 1.0), c(1.0, 0.0)], Metric::Weighted(w)).unwrap();
        let expected = c(1.0, 1.0) * c(0.0, -1.0) * 0.5 + c(2.0, 0.0) * 2.0;
        assert_eq!(u.inner(&v).unwrap(), expected);
    }

    #[test]
    fn sgn_examples() {
        assert_eq!(sgn(c(0.0, 0.0)), c(1.0, 0.0));
        assert_eq!(sgn(c(-4.0, 0.0)), c(-1.0, 0.0));
        let s = sgn(c(3.0, 4.0));
        assert!((s - c(0.6, 0.8)).norm() < 1e-16);
    }

    #[test]
    fn identical_unit_vectors() {
        let u = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let reports = cs_equality_residuals(&u, &u, &[0.0, 1.0], ALGEBRAIC_TOL).unwrap();
        for r in &reports {
            assert_eq!(r.abs_residual, 0.0, "{}", r.identity_id);
        }
        let m = reports.iter().find(|r| r.identity_id == "cs.modulus").unwrap();
        assert_eq!(m.rhs, c(1.0, 0.0));
    }

    #[test]
    fn phase_rotated_pair() {
        let u = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let v = ComplexVector::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let reports = cs_equality_residuals(&u, &v, &[], ALGEBRAIC_TOL).unwrap();
        let m = reports.iter().find(|r| r.identity_id == "cs.modulus").unwrap();
        assert!((m.lhs - c(1.0, 0.0)).norm() < 1e-15 && (m.rhs - c(1.0, 0.0)).norm() < 1e-15);
        let re = reports.iter().find(|r| r.identity_id == "cs.real[+]").unwrap();
        assert!(re.lhs.norm() < 1e-15 && re.rhs.norm() < 1e-15);
        assert!(reports.iter().all(|r| r.passed));
    }

    #[test]
    fn zero_vectors_rejected() {
        let z = ComplexVector::new(vec![c(0.0, 0.0); 2]).unwrap();
        let u = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(cs_equality_residuals(&z, &u, &[], 1e-12), Err(Error::ZeroVector("u"))));
        assert!(matches!(cs_equality_residuals(&u, &z, &[], 1e-12), Err(Error::ZeroVector("v"))));
    }

    #[test]
    fn classes_of_constructed_multiples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_vector(&mut rng, 5);

        let k = extremizer_class(&u, &u.scaled(c(2.0, 0.0)), ALGEBRAIC_TOL).unwrap();
        assert_eq!(k.real_multiple, Some(Branch::Plus));
        assert!(k.parallel && k.real_parallel);
        assert!(k.imaginary_multiple.is_none() && !k.imaginary_parallel);

        // (u | i u) = -i ||u||^2, so the imaginary branch is negative
        let k = extremizer_class(&u, &u.scaled(I), ALGEBRAIC_TOL).unwrap();
        assert_eq!(k.imaginary_multiple, Some(Branch::Minus));
        assert!(k.parallel && k.imaginary_parallel);
        assert!(k.real_multiple.is_none());

        let k = extremizer_class(&u, &u.scaled(Complex64::from_polar(1.0, FRAC_PI_4)), ALGEBRAIC_TOL)
            .unwrap();
        assert_eq!(k.parts(), [false, false, false, false, true]);
    }

    #[test]
    fn zero_pair_satisfies_everything() {
        let z = ComplexVector::new(vec![c(0.0, 0.0); 3]).unwrap();
        let u = ComplexVector::new(vec![c(1.0, 2.0), c(0.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(extremizer_class(&z, &u, 1e-12).unwrap().parts(), [true; 5]);
    }

    #[test]
    fn inconsistent_clauses_surface_as_error() {
        let parts = PartResiduals { part: 3, trigger: 0.0, others: vec![("c", 1.0)] };
        assert!(matches!(parts.resolve(1e-12), Err(Error::InternalConsistency { part: 3, .. })));
        let quiet = PartResiduals { part: 3, trigger: 0.5, others: vec![("c", 1.0)] };
        assert!(!quiet.resolve(1e-12).unwrap());
    }

    #[test]
    fn default_angles_include_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = default_angles(&mut rng, 8);
        assert_eq!(t.len(), 13);
        assert_eq!(&t[..5], &[0.0, FRAC_PI_4, FRAC_PI_2, 2.0, PI]);
        assert!(t[5..].iter().all(|x| (0.0..2.0 * PI).contains(x)));
    }
}
