//! Suite runner, refinement studies and report serialization.
//!
//! A suite expands into independent work items that run on the rayon pool.
//! Each item draws from its own seeded generator, so the report list depends
//! only on the configuration. Reports are sorted by `(identity_id, subject)`.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex_space::{cs_equality_residuals, default_angles, extremizer_class, random_vector, Branch, ExtremizerClass};
use crate::error::{Error, Result};
use crate::forms::{decomposition_check, expression_reports, extremizer_parts, sr_equalities, sr_inequality_chain, PairSample};
use crate::gaussian::{realize, GaussianSpec};
use crate::grid::flow::{generator_consistency, pointwise_gradient_decomposition};
use crate::grid::{GridSpec, OperatorKind, Quadrature, Scheme, StateField};
use crate::identities::{
    position_momentum_class, verify_dilation_bound, verify_dilation_bound_radial, verify_dilation_laplacian,
    verify_dilation_laplacian_radial, verify_hardy, verify_hardy_radial, verify_position_momentum,
    verify_radial_coulomb, verify_radial_coulomb_radial,
};
use crate::radial::{gaussian_profile, RadialField, RadialQuadrature};
use crate::report::{Discretization, EqualityReport};
use crate::search::{minimize_product_functional, minimize_sum_functional, probe_nonattainment, SearchOptions};
use crate::states::{random_hermite_state, random_radial_profile, HermiteOptions};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// Smallest clause tolerance used when classifying grid states into
/// extremizer families; coarser schemes use the suite tolerance.
pub const CLASS_TOL: f64 = 1e-6;
/// Fidelity a converged search must reach against its reference Gaussian.
pub const MIN_FIDELITY: f64 = 0.999;
/// Annulus radii of the non-attainment probe.
pub const ANNULUS_RADII: [f64; 3] = [10.0, 100.0, 1000.0];
/// Step of the dilation-flow consistency check.
pub const FLOW_STEP: f64 = 1e-3;
/// Smallest tolerance of the dilation-flow consistency check.
pub const FLOW_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Appendix,
    Section2,
    MomentumPosition,
    Dilation,
    Hardy,
    Coulomb,
    Search,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Appendix,
        Suite::Section2,
        Suite::MomentumPosition,
        Suite::Dilation,
        Suite::Hardy,
        Suite::Coulomb,
        Suite::Search,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::Section2 => "section2",
            Suite::MomentumPosition => "momentum-position",
            Suite::Dilation => "dilation",
            Suite::Hardy => "hardy",
            Suite::Coulomb => "coulomb",
            Suite::Search => "search",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::ALL.to_vec(),
            s => vec![s],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Scenario configuration. Fields left unset take suite-dependent defaults,
/// see [`SuiteConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Spatial dimension of grid and radial states.
    pub n: Option<usize>,
    /// Points per grid axis.
    #[serde(rename = "N")]
    pub points_per_axis: Option<usize>,
    /// Half width of the box `[-L, L)^n`.
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    /// Grid offset as a fraction of the spacing.
    pub offset: f64,
    pub scheme: Scheme,
    pub tol: Option<f64>,
    /// Random states (or vector pairs, or search seeds) per suite.
    pub trials: Option<usize>,
    pub seed: u64,
    /// Evaluate radial states on the one-dimensional radial quadrature.
    pub radial: bool,
    /// Outer radius of the radial quadrature.
    #[serde(rename = "R")]
    pub r_max: f64,
    /// Nodes of the radial quadrature.
    pub points: usize,
    /// Fixed vector dimension for the algebraic suites; random in 2..=64 when unset.
    pub dim: Option<usize>,
    pub search: SearchOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            n: None,
            points_per_axis: None,
            half_width: None,
            offset: 0.5,
            scheme: Scheme::SpectralPeriodic,
            tol: None,
            trials: None,
            seed: 0,
            radial: false,
            r_max: 40.0,
            points: 20000,
            dim: None,
            search: SearchOptions::default(),
        }
    }
}

/// Largest vector dimension drawn by the algebraic suites.
pub const MAX_RANDOM_DIM: usize = 64;

/// Concrete parameters of one suite after defaults are applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub suite: Suite,
    pub n: usize,
    pub grid: Option<GridSpec>,
    pub radial: Option<RadialQuadrature>,
    pub tol: f64,
    pub trials: usize,
}

/// Default points per axis for dimension `n`.
pub fn default_points(n: usize) -> usize {
    match n {
        1 => 256,
        _ => 64,
    }
}

/// Default half width for dimension `n`. The singular suites use a smaller
/// box so the spacing near the origin stays fine at 64 points per axis.
pub fn default_half_width(suite: Suite, n: usize) -> f64 {
    match (suite, n) {
        (_, 1) => 12.0,
        (_, 2) => 10.0,
        (Suite::Hardy | Suite::Coulomb, _) => 6.0,
        _ => 8.0,
    }
}

/// Default tolerance of a suite.
pub fn default_tol(suite: Suite, scheme: Scheme, radial: bool) -> f64 {
    match suite {
        Suite::Appendix | Suite::Section2 => 1e-12,
        Suite::Search => 1e-4,
        _ if radial => 1e-8,
        Suite::Hardy | Suite::Coulomb => 1e-3,
        _ => match scheme {
            Scheme::SpectralPeriodic => 1e-8,
            Scheme::CentralDiff4 => 1e-3,
            Scheme::CentralDiff2 => 5e-2,
        },
    }
}

impl SuiteConfig {
    pub fn for_suite(suite: Suite) -> Self {
        SuiteConfig { suite, ..Default::default() }
    }

    /// Parameters of each suite selected by the configuration.
    pub fn resolve(&self) -> Result<Vec<Resolved>> {
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {t}")));
            }
        }
        if let Some(d) = self.dim {
            if d == 0 {
                return Err(Error::InvalidArgument("vector dimension must be at least 1".into()));
            }
        }
        self.search.validate()?;
        self.suite.expand().into_iter().map(|s| self.resolve_one(s)).collect()
    }

    fn resolve_one(&self, suite: Suite) -> Result<Resolved> {
        let n = self.n.unwrap_or(match suite {
            Suite::Hardy | Suite::Coulomb => 3,
            Suite::Dilation if self.radial => 3,
            _ => 1,
        });
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let radial_allowed = matches!(suite, Suite::Dilation | Suite::Hardy | Suite::Coulomb);
        let radial = self.radial && radial_allowed;
        let needs_grid = matches!(
            suite,
            Suite::MomentumPosition | Suite::Dilation | Suite::Hardy | Suite::Coulomb | Suite::Search
        ) && !radial;
        let grid = if needs_grid {
            let g = GridSpec::new(
                n,
                self.points_per_axis.unwrap_or(default_points(n)),
                self.half_width.unwrap_or(default_half_width(suite, n)),
                self.offset,
                self.scheme,
            )?;
            Some(g)
        } else {
            None
        };
        let radial_n = if suite == Suite::Search { n.max(3) } else { n };
        let radial = if radial || suite == Suite::Search {
            Some(RadialQuadrature::new(radial_n, self.r_max, self.points)?)
        } else {
            None
        };
        let trials = self.trials.unwrap_or(match suite {
            Suite::Appendix | Suite::Section2 => 1000,
            Suite::Search => 5,
            _ if grid.is_some_and(|g| g.dim >= 3) => 4,
            _ => 20,
        });
        Ok(Resolved {
            suite,
            n,
            tol: self.tol.unwrap_or(default_tol(suite, self.scheme, radial.is_some() && suite != Suite::Search)),
            grid,
            radial,
            trials,
        })
    }
}

type Item = Box<dyn FnOnce() -> Result<Vec<EqualityReport>> + Send>;

fn item_rng(seed: u64, suite: Suite, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 32) | index as u64);
    rng
}

fn labelled(mut reports: Vec<EqualityReport>, subject: &str) -> Vec<EqualityReport> {
    for r in reports.iter_mut() {
        r.prefix_subject(subject);
    }
    reports
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// algebraic suites

/// Expected parts for `v = λu`. The branches follow the sign of
/// `(u|v) = conj(λ)‖u‖^2`, so `v = iu` is the minus imaginary branch.
fn expected_class(lambda: Complex64) -> ExtremizerClass {
    let real = lambda.im.abs() <= 1e-9 * lambda.norm();
    let imaginary = lambda.re.abs() <= 1e-9 * lambda.norm();
    ExtremizerClass {
        real_multiple: real.then(|| Branch::from_sign(lambda.re)),
        imaginary_multiple: imaginary.then(|| Branch::from_sign(-lambda.im)),
        real_parallel: real,
        imaginary_parallel: imaginary,
        parallel: true,
    }
}

/// The proportionality factors of the closure check: `2, -3, i, -i` and
/// `e^{iθ}` for `extra` random angles.
pub fn closure_factors<R: Rng + ?Sized>(rng: &mut R, extra: usize) -> Vec<Complex64> {
    let mut out = vec![
        Complex64::new(2.0, 0.0),
        Complex64::new(-3.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    out.extend((0..extra).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))));
    out
}

/// One report counting classification mismatches and consistency errors over
/// `v = λu` for every factor; `classify` maps `(u, v)` to the fired parts.
fn closure_report(
    id: &str,
    factors: &[Complex64],
    u: &crate::ComplexVector,
    classify: impl Fn(&crate::ComplexVector, &crate::ComplexVector) -> Result<ExtremizerClass>,
) -> EqualityReport {
    let mut mismatches = 0usize;
    let mut notes = Vec::new();
    for &lambda in factors {
        let v = u.scaled(lambda);
        match classify(u, &v) {
            Ok(c) if c == expected_class(lambda) => {}
            Ok(c) => {
                mismatches += 1;
                notes.push(format!("λ={lambda:.4}: parts {:?}", c.parts()));
            }
            Err(e) => {
                mismatches += 1;
                notes.push(format!("λ={lambda:.4}: {e}"));
            }
        }
    }
    EqualityReport::equality(id, mismatches as f64, 0.0, 0.0).with_subject(notes.join("; "))
}

fn trial_dim<R: Rng + ?Sized>(rng: &mut R, dim: Option<usize>) -> usize {
    dim.unwrap_or_else(|| rng.random_range(2..=MAX_RANDOM_DIM))
}

fn appendix_trial(seed: u64, index: usize, dim: Option<usize>, tol: f64) -> Result<Vec<EqualityReport>> {
    let mut rng = item_rng(seed, Suite::Appendix, index);
    let d = trial_dim(&mut rng, dim);
    let u = random_vector(&mut rng, d);
    let v = random_vector(&mut rng, d);
    let thetas = default_angles(&mut rng, 8);
    let mut out = cs_equality_residuals(&u, &v, &thetas, tol)?;
    out.push(EqualityReport::at_most("cs.inequality", u.inner(&v)?.norm(), u.norm() * v.norm(), tol));
    let factors = closure_factors(&mut rng, 8);
    out.push(closure_report("cs.closure", &factors, &u, |a, b| extremizer_class(a, b, tol)));
    let tag = Discretization::Exact { dim: d };
    let subject = format!("trial={index} dim={d}");
    Ok(out
        .into_iter()
        .map(|mut r| {
            r.prefix_subject(&subject);
            r.with_discretization(tag.clone())
        })
        .collect())
}

fn section2_trial(seed: u64, index: usize, dim: Option<usize>, tol: f64) -> Result<Vec<EqualityReport>> {
    let mut rng = item_rng(seed, Suite::Section2, index);
    let d = trial_dim(&mut rng, dim);
    let a = random_vector(&mut rng, d);
    let b = random_vector(&mut rng, d);
    let s = PairSample::new(1.0, a.clone(), b)?;
    let thetas = default_angles(&mut rng, 8);
    let mut out = expression_reports(&s, tol);
    out.extend(decomposition_check(&s, tol));
    out.extend(sr_equalities(&s, &thetas, tol)?);
    let chain = sr_inequality_chain(&s);
    out.push(EqualityReport::at_most("sr.chain_schrodinger", chain.schrodinger_bound, chain.product, tol));
    out.push(EqualityReport::at_most("sr.chain_robertson", chain.robertson_bound, chain.schrodinger_bound, tol));
    let factors = closure_factors(&mut rng, 8);
    out.push(closure_report("forms.closure", &factors, &a, |x, y| {
        extremizer_parts(&PairSample::new(1.0, x.clone(), y.clone())?, tol)
    }));
    let tag = Discretization::Exact { dim: d };
    let subject = format!("trial={index} dim={d}");
    Ok(out
        .into_iter()
        .map(|mut r| {
            r.prefix_subject(&subject);
            r.with_discretization(tag.clone())
        })
        .collect())
}

// ---------------------------------------------------------------------------
// grid and radial suites

/// The three Gaussian families used as named test states on `n` dimensions.
pub fn gaussian_family(n: usize) -> Result<Vec<(&'static str, GaussianSpec)>> {
    Ok(vec![
        ("coherent", GaussianSpec::coherent(n, 1.0, 0.0)?),
        ("squeezed lambda=4", GaussianSpec::squeezed(n, 1.0, 4.0, 0.3)?),
        (
            "squeezed_gen lambda=1.5",
            GaussianSpec::squeezed_gen(n, 1.0, 1.5, -0.7, Complex64::from_polar(1.0, 2.5))?,
        ),
    ])
}

/// Coherent states saturate all three classes, squeezed ones the product and
/// modulus classes, generalized squeezed ones only the modulus class.
fn family_class_report(name: &str, phi: &StateField, tol: f64) -> Result<Vec<EqualityReport>> {
    let class_tol = tol.max(CLASS_TOL);
    let class = position_momentum_class(phi, class_tol)?;
    let expected = match name.split(' ').next() {
        Some("coherent") => [true, true, true],
        Some("squeezed") => [false, true, true],
        _ => [false, false, true],
    };
    let got = [class.sum_saturated, class.product_saturated, class.modulus_saturated];
    let mismatches = expected.iter().zip(got).filter(|(e, g)| **e != *g).count();
    let x = phi.position();
    let g = phi.gradient();
    let n = phi.grid().dim as f64;
    let mut out = vec![EqualityReport::equality("pm.class", mismatches as f64, 0.0, 0.0)
        .with_subject(format!("{name} sum={} product={} modulus={}", got[0], got[1], got[2]))];
    if expected[1] {
        out.push(
            EqualityReport::equality("pm.kennard", x.norm() * g.norm(), n / 2.0 * phi.norm_sq(), class_tol)
                .with_subject(name),
        );
    }
    if expected[0] {
        out.push(EqualityReport::equality("pm.coherent_residual", class.sum_residual, 0.0, class_tol).with_subject(name));
    }
    Ok(out)
}

fn random_grid_state(grid: &GridSpec, seed: u64, suite: Suite, index: usize) -> Result<StateField> {
    let mut rng = item_rng(seed, suite, index);
    random_hermite_state(grid, &mut rng, &HermiteOptions::default())
}

fn random_radial_field(quad: RadialQuadrature, seed: u64, suite: Suite, index: usize) -> Result<RadialField> {
    random_radial_profile(&mut item_rng(seed, suite, index)).on_quadrature(quad)
}

fn radial_gaussian(quad: RadialQuadrature) -> Result<RadialField> {
    gaussian_profile(quad, 1.0)
}

fn grid_items(r: &Resolved, seed: u64) -> Result<Vec<Item>> {
    let grid = r.grid.expect("grid suites resolve a grid");
    let tol = r.tol;
    let suite = r.suite;
    let mut items: Vec<Item> = Vec::new();
    match suite {
        Suite::MomentumPosition | Suite::Dilation => {
            for (name, spec) in gaussian_family(grid.dim)? {
                items.push(Box::new(move || {
                    let phi = realize(&spec, &grid)?;
                    let mut out = match suite {
                        Suite::MomentumPosition => {
                            let mut v = verify_position_momentum(&phi, tol)?;
                            v.extend(family_class_report(name, &phi, tol)?);
                            v
                        }
                        _ => {
                            let mut v = verify_dilation_bound(&phi, tol)?;
                            v.extend(verify_dilation_laplacian(&phi, tol)?);
                            if name == "coherent" && grid.dim == 1 {
                                v.push(generator_consistency(OperatorKind::DilationGen, &phi, FLOW_STEP, tol.max(FLOW_TOL))?);
                            }
                            v
                        }
                    };
                    out = labelled(out, name);
                    Ok(out)
                }));
            }
            for k in 0..r.trials {
                items.push(Box::new(move || {
                    let phi = random_grid_state(&grid, seed, suite, k)?;
                    let out = match suite {
                        Suite::MomentumPosition => verify_position_momentum(&phi, tol)?,
                        _ => {
                            let mut v = verify_dilation_bound(&phi, tol)?;
                            v.extend(verify_dilation_laplacian(&phi, tol)?);
                            v
                        }
                    };
                    Ok(labelled(out, &format!("random={k}")))
                }));
            }
        }
        Suite::Hardy | Suite::Coulomb => {
            for k in 0..=r.trials {
                items.push(Box::new(move || {
                    let (name, phi) = if k == 0 {
                        let spec = GaussianSpec::coherent(grid.dim, 1.0, 0.0)?;
                        ("gaussian".to_string(), realize(&spec, &grid)?)
                    } else {
                        let p = random_radial_profile(&mut item_rng(seed, suite, k));
                        (format!("random_radial={k}"), p.on_grid(&grid)?)
                    };
                    let out = if suite == Suite::Hardy {
                        let mut v = verify_hardy(&phi, tol)?;
                        v.extend(pointwise_gradient_decomposition(&phi, tol)?);
                        v
                    } else {
                        let mut v = verify_radial_coulomb(&phi, tol)?;
                        v.push(hardy_consistency(&verify_hardy(&phi, tol)?, &v, tol));
                        v
                    };
                    Ok(labelled(out, &name))
                }));
            }
        }
        _ => unreachable!("not a grid suite"),
    }
    Ok(items)
}

/// The Coulomb-pair rewrite of the Hardy equality must reproduce four times
/// the Hardy right-hand side evaluated on the same state.
fn hardy_consistency(hardy: &[EqualityReport], coulomb: &[EqualityReport], tol: f64) -> EqualityReport {
    let find = |rs: &[EqualityReport], id: &str| rs.iter().find(|r| r.identity_id == id).map(|r| r.rhs);
    match (find(hardy, "hardy.equality"), find(coulomb, "rc.hardy_form")) {
        (Some(h), Some(c)) => EqualityReport::equality("rc.hardy_consistency", c, 4.0 * h, tol),
        _ => EqualityReport::equality("rc.hardy_consistency", f64::NAN, 0.0, tol),
    }
}

fn radial_items(r: &Resolved, seed: u64) -> Vec<Item> {
    let quad = r.radial.expect("radial suites resolve a quadrature");
    let tol = r.tol;
    let suite = r.suite;
    (0..=r.trials)
        .map(|k| -> Item {
            Box::new(move || {
                let (name, field) = if k == 0 {
                    ("gaussian".to_string(), radial_gaussian(quad)?)
                } else {
                    (format!("random_radial={k}"), random_radial_field(quad, seed, suite, k)?)
                };
                let out = match suite {
                    Suite::Dilation => {
                        let mut v = verify_dilation_bound_radial(&field, tol)?;
                        v.extend(verify_dilation_laplacian_radial(&field, tol)?);
                        v
                    }
                    Suite::Hardy => verify_hardy_radial(&field, tol)?,
                    _ => {
                        let mut v = verify_radial_coulomb_radial(&field, tol)?;
                        if quad.n >= 3 {
                            v.push(hardy_consistency(&verify_hardy_radial(&field, tol)?, &v, tol));
                        }
                        v
                    }
                };
                Ok(labelled(out, &name))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// search suite

fn search_items(r: &Resolved, seed: u64, opts: SearchOptions) -> Vec<Item> {
    let grid = r.grid.expect("search resolves a grid");
    let quad = r.radial.expect("search resolves a radial quadrature");
    let tol = r.tol;
    let n = grid.dim as f64;
    let mut items: Vec<Item> = Vec::new();
    for k in 0..r.trials as u64 {
        let s = seed.wrapping_add(k);
        items.push(Box::new(move || {
            let res = minimize_sum_functional(&grid, s, &opts)?;
            let class = position_momentum_class(&res.state, CLASS_TOL)?;
            let d = Discretization::Grid { grid, quadrature: Quadrature::Uniform };
            let out = vec![
                EqualityReport::equality("search.sum_value", res.value, n, tol),
                EqualityReport::at_most("search.sum_fidelity", MIN_FIDELITY, res.fidelity, 0.0),
                EqualityReport::equality("search.sum_converged", flag(res.converged), 1.0, 0.0),
                EqualityReport::at_most("search.sum_certificate", class.sum_residual, 1e-3, 0.0),
            ];
            Ok(out
                .into_iter()
                .map(|r| r.with_subject(format!("seed={s} iterations={}", res.iterations)).with_discretization(d.clone()))
                .collect())
        }));
        items.push(Box::new(move || {
            let res = minimize_product_functional(&grid, s, &opts)?;
            let d = Discretization::Grid { grid, quadrature: Quadrature::Uniform };
            let out = vec![
                EqualityReport::equality("search.product_value", res.value, n, tol),
                EqualityReport::at_most("search.product_fidelity", MIN_FIDELITY, res.fidelity, 0.0),
                EqualityReport::equality("search.product_converged", flag(res.converged), 1.0, 0.0),
            ];
            Ok(out
                .into_iter()
                .map(|r| {
                    r.with_subject(format!("seed={s} iterations={} lambda_est={:.6}", res.iterations, res.lambda_est))
                        .with_discretization(d.clone())
                })
                .collect())
        }));
    }
    items.push(Box::new(move || {
        let table = probe_nonattainment(&quad, &ANNULUS_RADII, 1e-8)?;
        let d = Discretization::Radial { quadrature: quad };
        let mut out: Vec<EqualityReport> = table.rows.iter().flat_map(|row| row.reports.clone()).collect();
        let rhos: Vec<String> = table.rows.iter().map(|r| format!("{:.6}", r.rho)).collect();
        let subject = format!("rho=[{}] c={:.4}", rhos.join(", "), table.fitted_c);
        out.push(EqualityReport::equality("nonattainment.decreasing", flag(table.strictly_decreasing), 1.0, 0.0));
        out.push(EqualityReport::equality("nonattainment.above_one", flag(table.all_above_one), 1.0, 0.0));
        out.push(EqualityReport::at_most("nonattainment.fitted_c", 0.0, table.fitted_c, 0.0));
        let k = out.len() - 3;
        for r in out.iter_mut().skip(k) {
            r.subject = subject.clone();
        }
        Ok(out.into_iter().map(|r| r.with_discretization(d.clone())).collect())
    }));
    items
}

// ---------------------------------------------------------------------------
// runner

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema: u32,
    pub version: String,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
    pub config: SuiteConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutput {
    pub header: RunHeader,
    pub reports: Vec<EqualityReport>,
}

impl SuiteOutput {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.reports)
    }

    /// Distinct identity ids with at least one failing report, sorted.
    pub fn failing_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.reports.iter().filter(|r| !r.passed).map(|r| r.identity_id.clone()).collect();
        ids.dedup();
        ids
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per report with the discretization spacing, for residual-vs-h plots.
    pub fn residual_csv(&self) -> String {
        let mut s = String::from("identity_id,subject,discretization,h,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual,tol,passed\n");
        for r in &self.reports {
            let (kind, h) = match &r.discretization {
                Some(Discretization::Exact { .. }) | None => ("exact", String::new()),
                Some(Discretization::Grid { grid, .. }) => ("grid", format!("{:e}", grid.spacing())),
                Some(Discretization::Radial { quadrature }) => ("radial", format!("{:e}", quadrature.spacing())),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                r.identity_id,
                csv_field(&r.subject),
                kind,
                h,
                r.lhs.re,
                r.lhs.im,
                r.rhs.re,
                r.rhs.im,
                r.abs_residual,
                r.rel_residual,
                r.tol,
                r.passed
            );
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs every selected suite and returns the sorted report list.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let mut items: Vec<Item> = Vec::new();
    for r in config.resolve()? {
        let seed = config.seed;
        let (tol, dim) = (r.tol, config.dim);
        match r.suite {
            Suite::Appendix => {
                items.extend((0..r.trials).map(|k| -> Item { Box::new(move || appendix_trial(seed, k, dim, tol)) }))
            }
            Suite::Section2 => {
                items.extend((0..r.trials).map(|k| -> Item { Box::new(move || section2_trial(seed, k, dim, tol)) }))
            }
            Suite::Search => items.extend(search_items(&r, seed, config.search)),
            _ if r.radial.is_some() => items.extend(radial_items(&r, seed)),
            _ => items.extend(grid_items(&r, seed)?),
        }
    }
    let batches: Vec<Vec<EqualityReport>> = items.into_par_iter().map(|f| f()).collect::<Result<_>>()?;
    let mut reports: Vec<EqualityReport> = batches.into_iter().flatten().collect();
    reports.sort_by(|a, b| a.identity_id.cmp(&b.identity_id).then_with(|| a.subject.cmp(&b.subject)));
    Ok(SuiteOutput {
        header: RunHeader {
            schema: REPORT_SCHEMA,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            config: config.clone(),
        },
        reports,
    })
}

// ---------------------------------------------------------------------------
// refinement

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementRow {
    pub points: usize,
    pub spacing: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub identity_id: String,
    pub scheme: Scheme,
    pub state: GaussianSpec,
    pub rows: Vec<RefinementRow>,
    /// Least-squares slope of `log rel_residual` against `log h`.
    pub fitted_order: f64,
}

impl RefinementStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("identity_id,scheme,N,h,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.identity_id,
                self.scheme.name(),
                r.points,
                r.spacing,
                r.lhs.re,
                r.lhs.im,
                r.rhs.re,
                r.rhs.im,
                r.abs_residual,
                r.rel_residual
            );
        }
        let _ = writeln!(s, "# fitted_order,{:.6}", self.fitted_order);
        s
    }
}

/// Reports of the verifier that owns `identity_id`, by its prefix.
fn reports_for(identity_id: &str, phi: &StateField) -> Result<Vec<EqualityReport>> {
    let prefix = identity_id.split('.').next().unwrap_or("");
    match prefix {
        "pm" => verify_position_momentum(phi, 0.0),
        "dil" => verify_dilation_bound(phi, 0.0),
        "dl" => verify_dilation_laplacian(phi, 0.0),
        "hardy" => verify_hardy(phi, 0.0),
        "rc" => verify_radial_coulomb(phi, 0.0),
        _ => Err(Error::InvalidArgument(format!("no grid verifier produces `{identity_id}`"))),
    }
}

/// Slope of the least-squares line through `(x, y)`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    num / den
}

/// Residual of one identity on a Gaussian state across successively finer grids.
pub fn refinement_study(identity_id: &str, grids: &[GridSpec], state: &GaussianSpec) -> Result<RefinementStudy> {
    if grids.len() < 3 {
        return Err(Error::InvalidArgument(format!("a refinement study needs at least 3 grids, got {}", grids.len())));
    }
    let scheme = grids[0].scheme;
    if grids.iter().any(|g| g.scheme != scheme) {
        return Err(Error::InvalidArgument("all grids of a refinement study must share one scheme".into()));
    }
    if grids.iter().any(|g| g.dim != grids[0].dim) {
        return Err(Error::InvalidArgument("all grids of a refinement study must share one dimension".into()));
    }
    if grids.windows(2).any(|w| w[1].spacing() >= w[0].spacing()) {
        return Err(Error::InvalidArgument("grids must be ordered by strictly decreasing spacing".into()));
    }
    let rows = grids
        .par_iter()
        .map(|g| {
            let phi = realize(state, g)?;
            let reports = reports_for(identity_id, &phi)?;
            let r = reports
                .into_iter()
                .find(|r| r.identity_id == identity_id)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{identity_id}`")))?;
            Ok(RefinementRow {
                points: g.points,
                spacing: g.spacing(),
                lhs: r.lhs,
                rhs: r.rhs,
                abs_residual: r.abs_residual,
                rel_residual: r.rel_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.spacing.ln(), r.rel_residual.max(f64::MIN_POSITIVE).ln())).collect();
    Ok(RefinementStudy {
        identity_id: identity_id.to_string(),
        scheme,
        state: *state,
        fitted_order: fit_slope(&pts),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn config_json_uses_flag_names() {
        let c: SuiteConfig = serde_json::from_str(r#"{"suite":"hardy","n":3,"N":48,"L":6.0,"R":30.0,"radial":true}"#).unwrap();
        assert_eq!(c.suite, Suite::Hardy);
        assert_eq!(c.points_per_axis, Some(48));
        assert_eq!(c.r_max, 30.0);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn defaults_depend_on_suite() {
        let r = SuiteConfig::for_suite(Suite::Hardy).resolve().unwrap();
        assert_eq!(r[0].n, 3);
        assert_eq!(r[0].tol, 1e-3);
        let r = SuiteConfig::for_suite(Suite::All).resolve().unwrap();
        assert_eq!(r.len(), 7);
    }

    #[test]
    fn small_appendix_suite_passes_and_is_deterministic() {
        let c = SuiteConfig { trials: Some(20), ..SuiteConfig::for_suite(Suite::Appendix) };
        let a = run_suite(&c).unwrap();
        let b = run_suite(&c).unwrap();
        assert!(a.passed(), "{:?}", a.failing_ids());
        assert_eq!(a.reports, b.reports);
        assert!(a.reports.windows(2).all(|w| w[0].identity_id <= w[1].identity_id));
    }

    #[test]
    fn closure_detects_expected_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_vector(&mut rng, 5);
        let f = closure_factors(&mut rng, 8);
        let r = closure_report("x", &f, &u, |a, b| extremizer_class(a, b, 1e-12));
        assert!(r.passed, "{}", r.subject);
    }

    #[test]
    fn fit_slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..4).map(|k| (k as f64, 2.0 * k as f64 + 1.0)).collect();
        assert!((fit_slope(&pts) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_rejects_bad_inputs() {
        let s = GaussianSpec::coherent(1, 1.0, 0.0).unwrap();
        assert!(refinement_study("pm.trace", &[], &s).is_err());
        let g = |n| GridSpec::spectral(1, n, 12.0).unwrap();
        let mixed = [g(64), g(128), g(256).with_scheme(Scheme::CentralDiff2).unwrap()];
        assert!(refinement_study("pm.trace", &mixed, &s).is_err());
        assert!(refinement_study("pm.trace", &[g(256), g(128), g(64)], &s).is_err());
        assert!(refinement_study("zz.unknown", &[g(64), g(128), g(256)], &s).is_err());
    }

    #[test]
    fn central_difference_order_is_two() {
        let s = GaussianSpec::coherent(1, 1.0, 0.0).unwrap();
        let grids: Vec<GridSpec> = [128, 256, 512]
            .iter()
            .map(|&n| GridSpec::new(1, n, 12.0, 0.5, Scheme::CentralDiff2).unwrap())
            .collect();
        let st = refinement_study("pm.trace", &grids, &s).unwrap();
        assert!((st.fitted_order - 2.0).abs() < 0.3, "{}", st.fitted_order);
    }
}
