//! Lattice quadrature for integrands with an `|x|^{-2}` point singularity.
//!
//! On the half-integer lattice `h (Z + 1/2)^n` the plain Riemann sum of
//! `g = a/|x|^2 + (regular)` misses the integral by `h^{n-2} Z_n a` plus higher
//! order terms, with a lattice constant `Z_n` that does not depend on `h`.
//! The corrected rule subtracts that term, estimating `a = lim r^2 g` by
//! quadratic extrapolation in `r^2` through the means of `r^2 g` over the three
//! innermost lattice shells. The correction is linear in `g`, so it is folded
//! into the weights.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::GridSpec;
use crate::error::{Error, Result};

const CALIBRATION_SPACING: f64 = 0.5;
const CALIBRATION_RADIUS: f64 = 7.0;
const SHELLS: usize = 3;

/// The constant `Z_n` such that `Σ h^n g - ∫ g ≈ h^{n-2} Z_n lim r^2 g`
/// on the half-integer lattice. Defined for `n ∈ {3, 4}`.
pub fn inverse_square_lattice_constant(n: usize) -> Result<f64> {
    if !(3..=4).contains(&n) {
        return Err(Error::Unsupported {
            op: "inverse_square_corrected",
            reason: format!("lattice constant only tabulated for n = 3, 4 (got {n})"),
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(z) = cache.lock().expect("cache poisoned").get(&n) {
        return Ok(*z);
    }
    let z = calibrate(n);
    cache.lock().expect("cache poisoned").insert(n, z);
    Ok(z)
}

/// Lattice sum of `e^{-r^2}/r^2` against its exact integral `2 π^{n/2}/(n-2)`.
fn calibrate(n: usize) -> f64 {
    let h = CALIBRATION_SPACING;
    let m = (CALIBRATION_RADIUS / h).round() as i64;
    let coords: Vec<f64> = (-m..m).map(|k| (k as f64 + 0.5) * h).collect();
    let mut sum = 0.0;
    let mut idx = vec![0usize; n];
    'outer: loop {
        let r2: f64 = idx.iter().map(|&i| coords[i] * coords[i]).sum();
        sum += (-r2).exp() / r2;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < coords.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let lattice = sum * h.powi(n as i32);
    let exact = 2.0 * PI.powf(n as f64 / 2.0) / (n as f64 - 2.0);
    (lattice - exact) / h.powi(n as i32 - 2)
}

/// `h^n` plus the inner-shell correction.
pub(super) fn corrected_weights(grid: &GridSpec) -> Result<Arc<[f64]>> {
    if grid.offset != 0.5 || grid.points % 2 != 0 {
        return Err(Error::Unsupported {
            op: "inverse_square_corrected",
            reason: "needs an even point count with offset 0.5 (origin-centred half-integer lattice)".into(),
        });
    }
    let n = grid.dim;
    let z = inverse_square_lattice_constant(n)?;
    let h = grid.spacing();
    let npts = grid.points as i64;

    // 4|x|^2/h^2 is the integer Σ (2 i_j + 1 - N)^2; shell m has value n + 8m
    let mut idx = vec![0; n];
    let mut shell_of = vec![usize::MAX; grid.len()];
    let mut counts = [0usize; SHELLS];
    for (flat, slot) in shell_of.iter_mut().enumerate() {
        grid.unravel(flat, &mut idx);
        let q: i64 = idx.iter().map(|&i| (2 * i as i64 + 1 - npts).pow(2)).sum();
        let m = (q - n as i64) / 8;
        if (q - n as i64) % 8 == 0 && (0..SHELLS as i64).contains(&m) {
            *slot = m as usize;
            counts[m as usize] += 1;
        }
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::InvalidGrid("grid too coarse for the inner-shell correction".into()));
    }

    let nodes: Vec<f64> = (0..SHELLS).map(|m| n as f64 / 4.0 + 2.0 * m as f64).collect();
    let lagrange_at_zero: Vec<f64> = (0..SHELLS)
        .map(|m| {
            (0..SHELLS)
                .filter(|&j| j != m)
                .map(|j| nodes[j] / (nodes[j] - nodes[m]))
                .product()
        })
        .collect();

    let base = grid.cell_volume();
    let radii = grid.radii();
    let hn2 = h.powi(n as i32 - 2);
    let weights: Vec<f64> = shell_of
        .iter()
        .zip(&radii)
        .map(|(&m, &r)| {
            if m == usize::MAX {
                base
            } else {
                base - hn2 * z * lagrange_at_zero[m] * r * r / counts[m] as f64
            }
        })
        .collect();
    Ok(weights.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scheme;

    #[test]
    fn constant_is_spacing_independent() {
        let z = inverse_square_lattice_constant(3).unwrap();
        assert!((z + 5.490136).abs() < 1e-5, "{z}");
        // recompute at a different spacing by a plain lattice sum
        let h = 0.3;
        let m = (7.0 / h) as i64;
        let c: Vec<f64> = (-m..m).map(|k| (k as f64 + 0.5) * h).collect();
        let mut s = 0.0;
        for a in &c {
            for b in &c {
                for d in &c {
                    let r2 = a * a + b * b + d * d;
                    s += (-r2).exp() / r2;
                }
            }
        }
        let z_h = (s * h.powi(3) - 2.0 * PI.powf(1.5)) / h;
        assert!((z_h - z).abs() < 1e-9, "{z_h} vs {z}");
    }

    #[test]
    fn corrected_rule_integrates_inverse_square_gaussian() {
        let g = GridSpec::new(3, 48, 6.0, 0.5, Scheme::SpectralPeriodic).unwrap();
        let w = corrected_weights(&g).unwrap();
        let r = g.radii();
        let f = |r: f64| (-r * r).exp() / (r * r);
        let plain: f64 = r.iter().map(|&r| f(r)).sum::<f64>() * g.cell_volume();
        let corr: f64 = r.iter().zip(w.iter()).map(|(&r, w)| w * f(r)).sum();
        let exact = 2.0 * PI.powf(1.5);
        assert!((plain - exact).abs() / exact > 1e-2);
        assert!((corr - exact).abs() / exact < 1e-4, "{}", (corr - exact) / exact);
    }

    #[test]
    fn rejects_unsupported_layouts() {
        let g = GridSpec::new(3, 48, 6.0, 0.25, Scheme::SpectralPeriodic).unwrap();
        assert!(corrected_weights(&g).is_err());
        let g = GridSpec::new(2, 48, 6.0, 0.5, Scheme::SpectralPeriodic).unwrap();
        assert!(corrected_weights(&g).is_err());
    }
}
