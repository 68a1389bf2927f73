//! Variational recovery of the position–momentum extremizers, and the
//! non-attainment probe for the dilation lower bound.
//!
//! Both functionals are minimized by projected gradient descent on the unit
//! sphere of the grid space with Armijo backtracking. The gradient `g` is the
//! Riesz representative of the derivative, `dF(φ)[η] = 2 Re(η|g)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_space::{ComplexVector, Metric};
use crate::error::{Error, Result};
use crate::gaussian::GaussianSpec;
use crate::grid::{GridSpec, StateField};
use crate::identities::dilation_bound_kernel;
use crate::radial::{sphere_area, RadialQuadrature};
use crate::report::EqualityReport;
use crate::states::{random_hermite_state, HermiteOptions};

/// Number of accepted iterations the convergence test averages over. A single
/// step can nearly cancel when stiff and smooth modes trade off, so one small
/// change is not evidence of convergence.
pub const CHANGE_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    /// First trial step of every line search.
    pub step: f64,
    /// Step reduction factor of the backtracking.
    pub backtrack: f64,
    pub max_iters: usize,
    /// Stop when the mean change per iteration over the last
    /// [`CHANGE_WINDOW`] accepted iterations is at most `rel_change · |F|`.
    pub rel_change: f64,
    /// Stop before stepping when `‖g‖ ≤ gradient_tol`.
    pub gradient_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            step: 0.1,
            backtrack: 0.5,
            max_iters: 5000,
            rel_change: 1e-10,
            gradient_tol: 1e-9,
            armijo: 1e-4,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.max_iters > 0
            && self.rel_change >= 0.0
            && self.gradient_tol >= 0.0
            && (0.0..1.0).contains(&self.armijo);
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid search options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub value: f64,
    pub step: f64,
}

/// CSV with columns `iteration,value,step`.
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut s = String::from("iteration,value,step\n");
    for r in trace {
        let _ = writeln!(s, "{},{:.17e},{:.6e}", r.iteration, r.value, r.step);
    }
    s
}

/// `(‖xφ‖^2 + ‖∇φ‖^2)/‖φ‖^2` or `2‖xφ‖‖∇φ‖/‖φ‖^2`.
///
/// `‖∇φ‖^2` is evaluated as `(-Δφ|φ)`, which equals the gradient norm for
/// the spectral scheme and keeps the analytic gradient exact for the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Sum,
    Product,
}

struct Evaluation {
    value: f64,
    gradient: StateField,
}

fn r2_field(grid: &GridSpec) -> Vec<f64> {
    grid.radii().iter().map(|r| r * r).collect()
}

impl Functional {
    pub fn value(self, phi: &StateField) -> Result<f64> {
        Ok(self.evaluate(phi, &r2_field(phi.grid()))?.value)
    }

    /// Riesz gradient, normalized so that `dF[η] = 2 Re(η|g)`.
    pub fn gradient(self, phi: &StateField) -> Result<StateField> {
        Ok(self.evaluate(phi, &r2_field(phi.grid()))?.gradient)
    }

    fn evaluate(self, phi: &StateField, r2: &[f64]) -> Result<Evaluation> {
        let n = phi.norm_sq();
        if n == 0.0 {
            return Err(Error::ZeroVector("state"));
        }
        let xx = phi.times_real(r2);
        let lap = phi.neg_laplacian();
        let x = xx.inner(phi)?.re;
        let g = lap.inner(phi)?.re;
        let one = Complex64::new(1.0, 0.0);
        match self {
            Functional::Sum => {
                let value = (x + g) / n;
                let h = xx.combine(one, &lap, one)?;
                let gradient = h.combine(Complex64::new(1.0 / n, 0.0), phi, Complex64::new(-value / n, 0.0))?;
                Ok(Evaluation { value, gradient })
            }
            Functional::Product => {
                if x <= 0.0 || g <= 0.0 {
                    return Err(Error::Degenerate("product functional needs xφ ≠ 0 and ∇φ ≠ 0".into()));
                }
                let value = 2.0 * (x * g).sqrt() / n;
                let a = Complex64::new((g / x).sqrt() / n, 0.0);
                let b = Complex64::new((x / g).sqrt() / n, 0.0);
                let gradient = xx.combine(a, &lap, b)?.combine(one, phi, Complex64::new(-value / n, 0.0))?;
                Ok(Evaluation { value, gradient })
            }
        }
    }
}

/// Largest relative discrepancy between `2 Re(η|g)` and central differences
/// of the functional, over the supplied directions.
pub fn gradient_check(f: Functional, phi: &StateField, directions: &[StateField], eps: f64) -> Result<f64> {
    let g = f.gradient(phi)?;
    let mut worst: f64 = 0.0;
    let one = Complex64::new(1.0, 0.0);
    for eta in directions {
        let analytic = 2.0 * eta.inner(&g)?.re;
        let plus = f.value(&phi.combine(one, eta, Complex64::new(eps, 0.0))?)?;
        let minus = f.value(&phi.combine(one, eta, Complex64::new(-eps, 0.0))?)?;
        let numeric = (plus - minus) / (2.0 * eps);
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-300));
    }
    Ok(worst)
}

/// Outcome of one descent run.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub functional: Functional,
    /// Final unit-norm state.
    pub state: StateField,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖∇φ‖/‖xφ‖` of the final state.
    pub lambda_est: f64,
    /// `|(φ|ψ)|/(‖φ‖‖ψ‖)` against the matching Gaussian: coherent for the sum
    /// functional, squeezed with `lambda_est` for the product functional.
    pub fidelity: f64,
    pub trace: Vec<TraceRow>,
}

/// Phase-free overlap `|(a|b)|/(‖a‖‖b‖)`.
pub fn fidelity(a: &StateField, b: &StateField) -> Result<f64> {
    Ok(a.inner(b)?.norm() / (a.norm() * b.norm()))
}

fn check_dim(grid: &GridSpec) -> Result<()> {
    if grid.dim > 2 {
        return Err(Error::Unsupported {
            op: "extremizer search",
            reason: format!("runs in n ≤ 2, got n = {}", grid.dim),
        });
    }
    Ok(())
}

/// Projected gradient descent from `initial`.
pub fn minimize(f: Functional, initial: &StateField, opts: &SearchOptions) -> Result<SearchResult> {
    opts.validate()?;
    check_dim(initial.grid())?;
    let r2 = r2_field(initial.grid());
    let mut phi = initial.normalized()?;
    let mut eval = f.evaluate(&phi, &r2)?;
    let mut trace = vec![TraceRow { iteration: 0, value: eval.value, step: 0.0 }];
    let mut converged = false;
    let mut iterations = 0;
    let one = Complex64::new(1.0, 0.0);
    while iterations < opts.max_iters {
        let g_sq = eval.gradient.norm_sq();
        if g_sq.sqrt() <= opts.gradient_tol {
            converged = true;
            break;
        }
        let mut step = opts.step;
        let accepted = loop {
            let trial = phi.combine(one, &eval.gradient, Complex64::new(-step, 0.0))?.normalized()?;
            let e = f.evaluate(&trial, &r2)?;
            if e.value <= eval.value - opts.armijo * step * 2.0 * g_sq {
                break Some((trial, e));
            }
            step *= opts.backtrack;
            if step < 1e-16 {
                break None;
            }
        };
        let Some((next, e)) = accepted else {
            // no decrease available at machine precision
            converged = true;
            break;
        };
        iterations += 1;
        phi = next;
        eval = e;
        trace.push(TraceRow { iteration: iterations, value: eval.value, step });
        let window = CHANGE_WINDOW.min(iterations);
        let change = (trace[iterations - window].value - eval.value).abs() / window as f64;
        if iterations >= CHANGE_WINDOW && change <= opts.rel_change * eval.value.abs() {
            converged = true;
            break;
        }
    }
    let x = phi.position().norm();
    let g = eval_grad_norm(&phi);
    let lambda_est = g / x;
    let n = phi.grid().dim;
    let reference = match f {
        Functional::Sum => GaussianSpec::coherent(n, 1.0, 0.0)?,
        Functional::Product => GaussianSpec::squeezed(n, 1.0, lambda_est, 0.0)?,
    };
    let reference = StateField::from_fn(*phi.grid(), |x| reference.value_at(x))?;
    Ok(SearchResult {
        functional: f,
        fidelity: fidelity(&phi, &reference)?,
        value: eval.value,
        state: phi,
        iterations,
        converged,
        lambda_est,
        trace,
    })
}

fn eval_grad_norm(phi: &StateField) -> f64 {
    phi.neg_laplacian().inner(phi).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
}

fn seeded_start(grid: &GridSpec, seed: u64) -> Result<StateField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hermite_state(grid, &mut rng, &HermiteOptions::default())
}

/// Minimizes `(‖xφ‖^2 + ‖∇φ‖^2)/‖φ‖^2` from a seeded random state.
pub fn minimize_sum_functional(grid: &GridSpec, seed: u64, opts: &SearchOptions) -> Result<SearchResult> {
    check_dim(grid)?;
    minimize(Functional::Sum, &seeded_start(grid, seed)?, opts)
}

/// Minimizes `2‖xφ‖‖∇φ‖/‖φ‖^2` from a seeded random state.
pub fn minimize_product_functional(grid: &GridSpec, seed: u64, opts: &SearchOptions) -> Result<SearchResult> {
    check_dim(grid)?;
    minimize(Functional::Product, &seeded_start(grid, seed)?, opts)
}

// ---------------------------------------------------------------------------
// non-attainment

/// Profile of the annulus test state `φ(x) = |x|^{-n/2} η(log|x|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusProfile {
    /// `η` rises from 0 to 1 on `[0, w]` and falls back on `[log R - w, log R]`
    /// with the quintic smoothstep, `w = min(1, log(R)/2)`.
    Smoothed,
    /// `η ≡ 1` on all of `(0, ∞)`: the would-be extremizer.
    Bare,
}

fn smoothstep(s: f64) -> (f64, f64) {
    let s = s.clamp(0.0, 1.0);
    let v = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    let dv = 30.0 * s * s * (1.0 - s) * (1.0 - s);
    (v, dv)
}

/// `η(t)` and `η'(t)` for `t = log r ∈ [0, T]`.
fn cutoff(t: f64, total: f64) -> (f64, f64) {
    let w = (total / 2.0).min(1.0);
    if t < w {
        let (v, dv) = smoothstep(t / w);
        (v, dv / w)
    } else if t > total - w {
        let (v, dv) = smoothstep((total - t) / w);
        (v, -dv / w)
    } else {
        (1.0, 0.0)
    }
}

/// The annulus state on `1 ≤ |x| ≤ R`, as `(φ, x·∇φ)` rescaled by `|x|^{n/2}`
/// and integrated in `t = log r` with the midpoint rule; the weights carry the
/// factor `|S^{n-1}|`, so norms are those of the `L^2(R^n)` functions.
pub fn annulus_state(quad: &RadialQuadrature, r_max: f64, profile: AnnulusProfile) -> Result<(ComplexVector, ComplexVector)> {
    quad.validate()?;
    if profile == AnnulusProfile::Bare {
        return Err(Error::NotSquareIntegrable(format!(
            "|x|^(-{}/2) has ‖φ‖² = |S^(n-1)| ∫ dr/r, which diverges logarithmically at 0 and ∞",
            quad.n
        )));
    }
    if !(r_max.is_finite() && r_max > 1.0) {
        return Err(Error::InvalidArgument(format!("annulus needs R > 1, got {r_max}")));
    }
    let total = r_max.ln();
    let h = total / quad.points as f64;
    let half_n = quad.n as f64 / 2.0;
    let (mut eta, mut xg) = (Vec::with_capacity(quad.points), Vec::with_capacity(quad.points));
    for k in 0..quad.points {
        let (v, dv) = cutoff((k as f64 + 0.5) * h, total);
        eta.push(Complex64::new(v, 0.0));
        xg.push(Complex64::new(dv - half_n * v, 0.0));
    }
    let metric = Metric::Uniform(sphere_area(quad.n) * h);
    Ok((ComplexVector::with_metric(eta, metric.clone())?, ComplexVector::with_metric(xg, metric)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonattainmentRow {
    pub r_max: f64,
    /// `‖x·∇φ_R‖^2 / ((n/2)^2 ‖φ_R‖^2)`.
    pub rho: f64,
    /// `‖x·∇φ_R + (n/2)φ_R‖^2 / ‖φ_R‖^2`.
    pub gap: f64,
    pub reports: Vec<EqualityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonattainmentTable {
    pub n: usize,
    pub rows: Vec<NonattainmentRow>,
    /// Least-squares `c` in `ρ(R) - 1 ≈ c / log R`.
    pub fitted_c: f64,
    pub strictly_decreasing: bool,
    pub all_above_one: bool,
}

/// `ρ(R)` for each annulus radius, with the dilation identities on each state.
pub fn probe_nonattainment(quad: &RadialQuadrature, r_values: &[f64], tol: f64) -> Result<NonattainmentTable> {
    if quad.n < 3 {
        return Err(Error::DimensionTooSmall { required: 3, got: quad.n });
    }
    if r_values.is_empty() {
        return Err(Error::InvalidArgument("no annulus radii".into()));
    }
    let half_n = quad.n as f64 / 2.0;
    let mut rows = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let (phi, xg) = annulus_state(quad, r, AnnulusProfile::Smoothed)?;
        let norm_sq = phi.norm_sq();
        let rho = xg.norm_sq() / (half_n * half_n * norm_sq);
        let gap = xg.combine(Complex64::new(1.0, 0.0), &phi, Complex64::new(half_n, 0.0))?.norm_sq() / norm_sq;
        let mut reports = dilation_bound_kernel(quad.n, &phi, &xg, tol)?;
        for rep in reports.iter_mut() {
            rep.subject = format!("annulus R={r}");
        }
        rows.push(NonattainmentRow { r_max: r, rho, gap, reports });
    }
    let (num, den) = rows.iter().fold((0.0, 0.0), |(a, b), row| {
        let u = 1.0 / row.r_max.ln();
        (a + u * (row.rho - 1.0), b + u * u)
    });
    Ok(NonattainmentTable {
        n: quad.n,
        fitted_c: num / den,
        strictly_decreasing: rows.windows(2).all(|w| w[1].rho < w[0].rho),
        all_above_one: rows.iter().all(|r| r.rho > 1.0),
        rows,
    })
}
