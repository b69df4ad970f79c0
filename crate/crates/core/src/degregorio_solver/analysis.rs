//! Diagnostics computed from decomposed runs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::decomposed::{cross_series, moments, phi_on, series_at, solve_decomposed, DecomposedRun, ProfileFrame};
use super::{RunDiagnostics, SolverConfig};
use crate::profiles::{assemble_multibump, BumpProfile};
use crate::singular_integrals::{InteractionConstants, SpectralWorkspace};
use crate::{Error, Result};

/// Interaction quantities for bump `k` at one time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteractionReport {
    pub t: f64,
    pub k: usize,
    /// `Hw₋(0, t)`.
    pub hw_minus_0: f64,
    /// `HW_j(0, t)` for `j < k`.
    pub hw_outer_0: Vec<f64>,
    /// `max_{j<k} |HW_j(0, t) - 1|` against `c(r)ε`.
    pub outer_deviation: f64,
    pub deviation_bound: f64,
    /// `max|Hw₊|` on the support of `w_k` against `C₂ x_k`.
    pub hw_plus_max: f64,
    pub hw_plus_bound: f64,
    pub pass: bool,
}

/// Transforms of every frame at `t = frames[0].time`.
pub fn measure_interaction(
    frames: &[ProfileFrame],
    k: usize,
    consts: &InteractionConstants,
) -> Result<InteractionReport> {
    if k >= frames.len() {
        return Err(Error::param(format!("bump {k} not among {} frames", frames.len())));
    }
    let grid = &frames[0].w;
    if !grid.is_symmetric() {
        return Err(Error::param("frames must live on a symmetric local grid"));
    }
    let ws = SpectralWorkspace::for_field(grid, 2, false)?;
    let center = grid.n_points() / 2;
    let moms: Vec<_> = frames
        .iter()
        .map(|f| {
            let hw = ws.hilbert(f.w.values());
            moments(&f.w, f.w.values(), hw[center], 64)
        })
        .collect();
    let heights: Vec<f64> = frames.iter().map(|f| f.height).collect();
    let scales: Vec<f64> = frames.iter().map(|f| f.scale).collect();
    let (_, inner) = cross_series(&heights, &scales, &moms);
    let hw_outer_0: Vec<f64> = moms[..k].iter().map(|m| m.hw0).collect();
    let hw_minus_0 = hw_outer_0.iter().zip(&heights).map(|(h, x)| h * x).sum();
    let outer_deviation = hw_outer_0.iter().map(|h| (h - 1.0).abs()).fold(0.0, f64::max);
    let w = frames[k].w.values();
    let floor = 1e-10 * frames[k].w.sup_norm();
    let mut hw_plus_max = 0.0f64;
    for (i, wi) in w.iter().enumerate() {
        let xi = grid.x(i);
        if wi.abs() > floor && xi != 0.0 {
            let (v, _) = series_at(&[], &inner[k], xi);
            hw_plus_max = hw_plus_max.max(v.abs());
        }
    }
    let deviation_bound = consts.c_r * consts.eps;
    let hw_plus_bound = consts.c2 * heights[k];
    Ok(InteractionReport {
        t: frames[k].time,
        k,
        hw_minus_0,
        hw_outer_0,
        outer_deviation,
        deviation_bound,
        hw_plus_max,
        hw_plus_bound,
        pass: outer_deviation <= deviation_bound && hw_plus_max <= hw_plus_bound,
    })
}

/// `E = ‖∂W - φ'‖₂²` with the L¹ and sup consequences of the bootstrap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    /// `‖W - φ‖₁` against `√E·√(32r³/3)`.
    pub l1_distance: f64,
    pub l1_bound: f64,
    /// `sup|HW - Hφ|` against `2√E·√(r/π)`.
    pub sup_distance: f64,
    pub sup_bound: f64,
    pub pass: bool,
}

/// Energy of one frame against the reference profile.
pub fn profile_energy(frame: &ProfileFrame, phi: &BumpProfile, r: f64) -> Result<EnergyReport> {
    let grid = &frame.w;
    let h = grid.h();
    let ws = SpectralWorkspace::for_field(grid, 2, false)?;
    let p0 = phi_on(grid, phi, 0);
    let p1 = phi_on(grid, phi, 1);
    let wt = ws.transform(grid.values(), true, false);
    let pt = ws.hilbert(&p0);
    let d = wt.derivative.expect("derivative requested");
    let energy = d.iter().zip(&p1).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * h;
    let l1_distance = grid.values().iter().zip(&p0).map(|(a, b)| (a - b).abs()).sum::<f64>() * h;
    let sup_distance = wt.hilbert.iter().zip(&pt).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let root = energy.sqrt();
    let l1_bound = root * (32.0 * r.powi(3) / 3.0).sqrt();
    let sup_bound = 2.0 * root * (r / PI).sqrt();
    // discretisation slack relative to the field size
    let slack = 1e-9 * grid.sup_norm().max(1.0);
    Ok(EnergyReport {
        energy,
        l1_distance,
        l1_bound,
        sup_distance,
        sup_bound,
        pass: l1_distance <= l1_bound + slack && sup_distance <= sup_bound + slack,
    })
}

/// Two-sided band for `sup|w(·, t)|·|t|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub samples: usize,
    pub t_range: (f64, f64),
    pub min_product: f64,
    pub max_product: f64,
    /// `max(max product, 1/min product)`.
    pub c: f64,
    /// Least-squares slope of `ln sup|w|` against `ln|t|`.
    pub slope: f64,
    /// A slope near -1 rather than near 0.
    pub blowup: bool,
}

/// Band of `sup|w|·|t|` over the records with `|t|` in `[lo, hi]`.
pub fn blowup_rate_fit(diag: &RunDiagnostics, lo: f64, hi: f64) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = diag
        .records
        .iter()
        .filter(|r| r.t != 0.0 && r.t.abs() >= lo * (1.0 - 1e-12) && r.t.abs() <= hi * (1.0 + 1e-12))
        .map(|r| (r.t.abs(), r.sup_w))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("{} samples with |t| in [{lo}, {hi}]; need 5", pts.len())));
    }
    let products: Vec<f64> = pts.iter().map(|(t, s)| t * s).collect();
    let min_product = products.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_product = products.iter().cloned().fold(0.0, f64::max);
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (t, s)| (a + t.ln() / n, b + s.ln() / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (t, s)| {
        let dx = t.ln() - mx;
        (a + dx * (s.ln() - my), b + dx * dx)
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let t_range = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), (t, _)| (a.min(*t), b.max(*t)));
    Ok(RateFit {
        samples: pts.len(),
        t_range,
        min_product,
        max_product,
        c: max_product.max(1.0 / min_product),
        slope,
        blowup: slope < -0.5,
    })
}

/// Sensitivity of a decomposed run to the number of bumps and the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementReport {
    pub n_values: Vec<usize>,
    /// `max_{t,k≤n} |x_k^{(n+1)} - x_k^{(n)}|/x_k^{(n)}` for consecutive `n`.
    pub height_perturbation: Vec<f64>,
    /// `max_{k≤n} max|W_k^{(n+1)} - W_k^{(n)}|` at the final time.
    pub profile_perturbation: Vec<f64>,
    /// `‖w_{j+1}‖₂/‖w_j‖₂` at the final time of the largest run.
    pub tail_ratios: Vec<f64>,
    /// `(A²r)^{1/2}`.
    pub tail_bound: f64,
    pub grid_h: Vec<f64>,
    /// Final-time profile differences between consecutive grids.
    pub grid_differences: Vec<f64>,
    pub observed_orders: Vec<f64>,
    pub perturbation_decreasing: bool,
}

fn final_records(run: &DecomposedRun) -> Result<&super::DiagRecord> {
    if !run.termination.is_completed() {
        return Err(Error::Precondition(format!("refinement run stopped early: {:?}", run.termination)));
    }
    run.diagnostics.records.last().ok_or_else(|| Error::InsufficientData("empty run".into()))
}

/// Runs every `n` in `n_values` on the grid of `cfg`, then the largest `n`
/// on every spacing in `grid_h`, and compares consecutive runs.
pub fn refinement_study(
    phi: &BumpProfile,
    ratio: f64,
    r: f64,
    n_values: &[usize],
    grid_h: &[f64],
    cfg: &SolverConfig,
) -> Result<RefinementReport> {
    if n_values.len() < 2 || n_values.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::param("n values must be consecutive, at least two"));
    }
    let runs: Vec<DecomposedRun> = n_values
        .iter()
        .map(|&n| solve_decomposed(&assemble_multibump(n, ratio, r, phi)?, cfg))
        .collect::<Result<_>>()?;
    let mut height_perturbation = Vec::new();
    let mut profile_perturbation = Vec::new();
    for pair in runs.windows(2) {
        final_records(&pair[0])?;
        final_records(&pair[1])?;
        let (a, b) = (&pair[0].diagnostics.records, &pair[1].diagnostics.records);
        let mut worst = 0.0f64;
        for (ra, rb) in a.iter().zip(b) {
            for (xa, xb) in ra.heights.iter().zip(&rb.heights) {
                worst = worst.max((xb - xa).abs() / xa);
            }
        }
        height_perturbation.push(worst);
        let mut prof = 0.0f64;
        for (fa, fb) in pair[0].last.iter().zip(&pair[1].last) {
            for (va, vb) in fa.w.values().iter().zip(fb.w.values()) {
                prof = prof.max((va - vb).abs());
            }
        }
        profile_perturbation.push(prof);
    }
    let big = runs.last().expect("at least two runs");
    let norms: Vec<f64> = big
        .last
        .iter()
        .map(|f| {
            let l2 = f.w.values().iter().map(|v| v * v).sum::<f64>() * f.w.h();
            f.height * (f.scale * l2).sqrt()
        })
        .collect();
    let tail_ratios = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let n_big = *n_values.last().expect("nonempty");
    let mut finals = Vec::new();
    for &hh in grid_h {
        let c = SolverConfig { local_h: hh, ..cfg.clone() };
        let run = solve_decomposed(&assemble_multibump(n_big, ratio, r, phi)?, &c)?;
        final_records(&run)?;
        finals.push(run.last);
    }
    let mut grid_differences = Vec::new();
    for pair in finals.windows(2) {
        let mut worst = 0.0f64;
        for (fa, fb) in pair[0].iter().zip(&pair[1]) {
            for i in 0..fb.w.n_points() {
                let x = fb.w.x(i);
                worst = worst.max((fa.w.interpolate_cubic(x) - fb.w.values()[i]).abs());
            }
        }
        grid_differences.push(worst);
    }
    let observed_orders = grid_differences
        .windows(2)
        .zip(grid_h.windows(3))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let perturbation_decreasing = height_perturbation.windows(2).all(|w| w[1] <= w[0])
        && profile_perturbation.windows(2).all(|w| w[1] <= w[0]);
    Ok(RefinementReport {
        n_values: n_values.to_vec(),
        height_perturbation,
        profile_perturbation,
        tail_ratios,
        tail_bound: (ratio * ratio * r).sqrt(),
        grid_h: grid_h.to_vec(),
        grid_differences,
        observed_orders,
        perturbation_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degregorio_solver::DiagRecord;
    use crate::profiles::{phi_norms, reference_profile};
    use crate::singular_integrals::interaction_constants;

    fn diag(sup: impl Fn(f64) -> f64, n: usize) -> RunDiagnostics {
        let records = (0..n)
            .map(|i| {
                let t = -0.1 * (i + 1) as f64 / n as f64;
                DiagRecord { t, sup_w: sup(t), ..Default::default() }
            })
            .collect();
        RunDiagnostics { records, ..Default::default() }
    }

    #[test]
    fn rate_fit_separates_blowup_from_constant() {
        let fit = blowup_rate_fit(&diag(|t| 2.0 / t.abs(), 20), 0.01, 0.1).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12 && fit.blowup);
        assert!((fit.min_product - 2.0).abs() < 1e-12 && (fit.c - 2.0).abs() < 1e-12);
        let flat = blowup_rate_fit(&diag(|_| 3.0, 20), 0.01, 0.1).unwrap();
        assert!(flat.slope.abs() < 1e-12 && !flat.blowup);
        assert!(matches!(blowup_rate_fit(&diag(|_| 1.0, 4), 0.0, 1.0), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn interaction_and_energy_at_the_initial_time() {
        let r = 0.2;
        let phi = reference_profile(r).unwrap();
        let consts = interaction_constants(r, 0.05, 1.05, phi_norms(&phi).unwrap()).unwrap();
        let data = assemble_multibump(2, 1.05, r, &phi).unwrap();
        let cfg = SolverConfig { t_end: -1e-4, log_dt: 1e-4, local_h: 5e-4, keep_frames: true, ..Default::default() };
        let run = solve_decomposed(&data, &cfg).unwrap();
        let first = &run.frames[0];
        let rep = measure_interaction(first, 2, &consts).unwrap();
        for h in &rep.hw_outer_0 {
            assert!((h - 1.0).abs() < 1e-8, "{h}");
        }
        assert!((rep.hw_minus_0 - (1.0 + 1.05)).abs() < 1e-7);
        assert!(rep.hw_plus_max == 0.0 && rep.pass);
        let single = measure_interaction(first, 0, &consts).unwrap();
        assert_eq!(single.hw_minus_0, 0.0);
        assert!(single.hw_plus_max > 0.0 && single.hw_plus_max <= single.hw_plus_bound);
        let e = profile_energy(&first[1], &phi, r).unwrap();
        assert!(e.energy < 1e-20 && e.pass, "{e:?}");
    }
}
