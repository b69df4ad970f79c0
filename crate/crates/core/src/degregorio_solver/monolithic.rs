//! Single-grid pseudo-spectral backend.

use serde::{Deserialize, Serialize};

use super::{log_times, DiagRecord, Reversal, RunDiagnostics, SolverConfig, Termination};
use crate::singular_integrals::{hilbert_spectral, Field1D, SpectralWorkspace};
use crate::{Error, Result};

/// Output of [`solve_monolithic`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonolithicRun {
    /// Fields at the log times when `keep_frames` is set.
    pub frames: Vec<Field1D>,
    /// Field at the last time reached.
    pub last: Field1D,
    pub diagnostics: RunDiagnostics,
    pub termination: Termination,
}

/// Evolves `w0` from `t_start` to `t_end` with RK4 in time and the padded
/// spectral transform in space.
///
/// The step is `cfl·min(Δx/max|a u|, 1/max|Hw|)`, capped by `max_dt` and cut
/// to land on the log times. Runs stop early on step underflow, on
/// `sup|w| > blowup_sup`, or when the field reaches the outer 5% of the grid.
pub fn solve_monolithic(w0: &Field1D, cfg: &SolverConfig) -> Result<MonolithicRun> {
    cfg.validate()?;
    if !(w0.x_min() <= 0.0 && w0.x_max() >= 0.0) {
        return Err(Error::param("the grid must contain the origin"));
    }
    if let Some(reason) = boundary_contact(w0, cfg.height_floor) {
        return Err(Error::Precondition(format!("initial data is not compactly supported: {reason}")));
    }
    if cfg.direction() < 0.0 && cfg.reversal == Reversal::Symmetry {
        let flipped = w0.with_values(w0.values().iter().map(|v| -v).collect())?;
        let mirrored = SolverConfig { t_start: -cfg.t_start, t_end: -cfg.t_end, ..cfg.clone() };
        let mut run = evolve(&flipped, &mirrored)?;
        let unflip = |f: &Field1D| -> Result<Field1D> {
            let mut g = f.with_values(f.values().iter().map(|v| -v).collect())?;
            g.time = f.time.map(|t| -t);
            Ok(g)
        };
        run.frames = run.frames.iter().map(unflip).collect::<Result<_>>()?;
        run.last = unflip(&run.last)?;
        for r in &mut run.diagnostics.records {
            r.t = -r.t;
        }
        run.termination = match run.termination {
            Termination::StepUnderflow { t } => Termination::StepUnderflow { t: -t },
            Termination::BlowUp { t, sup } => Termination::BlowUp { t: -t, sup },
            Termination::Bootstrap { t, reason } => Termination::Bootstrap { t: -t, reason },
            Termination::Resolution { t, reason } => Termination::Resolution { t: -t, reason },
            Termination::Completed => Termination::Completed,
        };
        return Ok(run);
    }
    evolve(w0, cfg)
}

fn boundary_contact(w: &Field1D, floor: f64) -> Option<String> {
    let n = w.n_points();
    let margin = (n / 20).max(1);
    let tiny = floor * w.sup_norm();
    let v = w.values();
    let hit = (0..margin).chain(n - margin..n).find(|&i| v[i].abs() > tiny)?;
    Some(format!("|w({})| = {:e} within 5% of the grid edge", w.x(hit), v[hit].abs()))
}

fn record(w: &Field1D, t: f64) -> DiagRecord {
    DiagRecord {
        t,
        sup_w: w.sup_norm(),
        heights: Vec::new(),
        hw_self_0: Vec::new(),
        hw_minus_0: Vec::new(),
        energy: Vec::new(),
        integral: Vec::new(),
        support: Vec::new(),
        gap_level: Vec::new(),
        height_proxy: Vec::new(),
        odd_deviation: w.odd_deviation().unwrap_or(f64::NAN),
    }
}

struct Rhs {
    dw: Vec<f64>,
    max_hw: f64,
    max_u: f64,
}

fn rhs(ws: &SpectralWorkspace, a: f64, w: &[f64]) -> Rhs {
    let advect = a != 0.0;
    let out = ws.transform(w, advect, advect);
    let mut dw: Vec<f64> = w.iter().zip(&out.hilbert).map(|(wi, hi)| wi * hi).collect();
    let mut max_u = 0.0f64;
    if let (Some(d), Some(u)) = (&out.derivative, &out.velocity) {
        for i in 0..w.len() {
            dw[i] -= a * u[i] * d[i];
            max_u = max_u.max(u[i].abs());
        }
    }
    let max_hw = out.hilbert.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Rhs { dw, max_hw, max_u }
}

fn evolve(w0: &Field1D, cfg: &SolverConfig) -> Result<MonolithicRun> {
    let ws = SpectralWorkspace::for_field(w0, 2, cfg.dealias)?;
    let h = w0.h();
    let dir = cfg.direction();
    let marks = log_times(cfg);
    let mut diag = RunDiagnostics::default();
    let mut frames = Vec::new();
    let mut w = w0.values().to_vec();
    let mut t = cfg.t_start;
    let snapshot = |w: &[f64], t: f64| -> Result<Field1D> { Ok(w0.with_values(w.to_vec())?.with_time(t)) };
    diag.records.push(record(w0, t));
    if cfg.keep_frames {
        frames.push(snapshot(&w, t)?);
    }
    let mut termination = Termination::Completed;
    'outer: for &mark in &marks[1..] {
        while (mark - t) * dir > 0.0 {
            let k1 = rhs(&ws, cfg.a, &w);
            let mut dt = cfg.cfl / k1.max_hw.max(f64::MIN_POSITIVE);
            if cfg.a != 0.0 {
                dt = dt.min(cfg.cfl * h / (cfg.a.abs() * k1.max_u).max(f64::MIN_POSITIVE));
            }
            dt = dt.min(cfg.max_dt);
            let remaining = (mark - t).abs();
            if dt < cfg.min_dt && remaining > cfg.min_dt {
                termination = Termination::StepUnderflow { t };
                break 'outer;
            }
            let dt = dir * if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt };
            let stage = |k: &[f64], c: f64| -> Vec<f64> { w.iter().zip(k).map(|(wi, ki)| wi + c * ki).collect() };
            let k2 = rhs(&ws, cfg.a, &stage(&k1.dw, 0.5 * dt)).dw;
            let k3 = rhs(&ws, cfg.a, &stage(&k2, 0.5 * dt)).dw;
            let k4 = rhs(&ws, cfg.a, &stage(&k3, dt)).dw;
            for i in 0..w.len() {
                w[i] += dt / 6.0 * (k1.dw[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t = if (mark - (t + dt)) * dir <= 0.0 { mark } else { t + dt };
            diag.steps += 1;
            let sup = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !sup.is_finite() || sup > cfg.blowup_sup {
                termination = Termination::BlowUp { t, sup };
                break 'outer;
            }
        }
        let field = snapshot(&w, t)?;
        diag.records.push(record(&field, t));
        if cfg.keep_frames {
            frames.push(field.clone());
        }
        if let Some(reason) = boundary_contact(&field, cfg.height_floor) {
            termination = Termination::Resolution { t, reason };
            break;
        }
    }
    let last = snapshot(&w, t)?;
    Ok(MonolithicRun { frames, last, diagnostics: diag, termination })
}

/// Closed-form CLM solution `ω = 4ω₀/((2 - tHω₀)² + t²ω₀²)` on the grid of
/// `w0`, with `Hω₀` from the line spectral transform.
pub fn clm_exact(w0: &Field1D, t: f64) -> Result<Field1D> {
    let (hw, _) = hilbert_spectral(w0, 2)?;
    let values = w0
        .values()
        .iter()
        .zip(hw.values())
        .map(|(&w, &h)| 4.0 * w / ((2.0 - t * h).powi(2) + t * t * w * w))
        .collect();
    Ok(w0.with_values(values)?.with_time(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::dawson;
    use std::f64::consts::PI;

    fn gaussian_dipole(n: usize) -> Field1D {
        Field1D::from_fn(-8.0, 8.0, n, |x| -x * (-x * x).exp()).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let w0 = Field1D::zeros(-1.0, 1.0, 65).unwrap();
        let cfg = SolverConfig { t_end: -0.05, log_dt: 0.01, ..Default::default() };
        let run = solve_monolithic(&w0, &cfg).unwrap();
        assert_eq!(run.last.sup_norm(), 0.0);
        assert!(run.termination.is_completed());
    }

    #[test]
    fn clm_oracle_uses_the_dawson_transform() {
        // Hω₀ = 1/√π - (2x/√π) D(x) for ω₀ = -x e^{-x²}
        let w0 = gaussian_dipole(2049);
        let t = 1.0;
        let exact = clm_exact(&w0, t).unwrap();
        for i in (0..2049).step_by(97) {
            let x = w0.x(i);
            let h = 1.0 / PI.sqrt() - 2.0 * x * dawson(x) / PI.sqrt();
            let w = w0.values()[i];
            let v = 4.0 * w / ((2.0 - t * h).powi(2) + t * t * w * w);
            assert!((exact.values()[i] - v).abs() < 1e-10);
        }
    }

    #[test]
    fn clm_short_run_matches_closed_form() {
        let w0 = gaussian_dipole(2049);
        let cfg = SolverConfig {
            a: 0.0,
            t_start: -1.0,
            t_end: -0.5,
            log_dt: 0.25,
            max_dt: 5e-3,
            ..Default::default()
        };
        // start from the closed form at t = -1 and compare at t = -0.5
        let start = clm_exact(&w0, -1.0).unwrap();
        let run = solve_monolithic(&start, &cfg).unwrap();
        let exact = clm_exact(&w0, -0.5).unwrap();
        let err = run.last.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn signed_steps_and_symmetry_agree() {
        let w0 = Field1D::from_fn(-6.0, 6.0, 1025, |x| -x * (-2.0 * x * x).exp()).unwrap();
        let base = SolverConfig { a: 1.0, t_end: -0.2, log_dt: 0.1, max_dt: 2e-3, ..Default::default() };
        let a = solve_monolithic(&w0, &SolverConfig { reversal: Reversal::SignedDt, ..base.clone() }).unwrap();
        let b = solve_monolithic(&w0, &SolverConfig { reversal: Reversal::Symmetry, ..base }).unwrap();
        let d = a.last.values().iter().zip(b.last.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-12, "{d}");
        assert_eq!(b.diagnostics.records.last().unwrap().t, -0.2);
    }

    #[test]
    fn forward_then_backward_returns() {
        let w0 = Field1D::from_fn(-6.0, 6.0, 1025, |x| -x * (-2.0 * x * x).exp()).unwrap();
        let fwd = SolverConfig { t_start: -0.2, t_end: 0.0, log_dt: 0.1, max_dt: 1e-3, ..Default::default() };
        let there = solve_monolithic(&w0, &fwd).unwrap().last;
        let back = SolverConfig { t_start: 0.0, t_end: -0.2, ..fwd };
        let again = solve_monolithic(&there, &back).unwrap().last;
        let d = again.values().iter().zip(w0.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn odd_data_stays_odd() {
        let w0 = Field1D::from_fn(-6.0, 6.0, 1025, |x| -x * (-2.0 * x * x).exp()).unwrap();
        let cfg = SolverConfig { t_end: -0.3, log_dt: 0.1, ..Default::default() };
        let run = solve_monolithic(&w0, &cfg).unwrap();
        for r in &run.diagnostics.records {
            assert!(r.odd_deviation <= 1e-10, "{}", r.odd_deviation);
        }
    }
}
