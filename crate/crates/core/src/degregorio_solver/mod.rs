//! Time integration of `∂_t w + a u ∂_x w = w Hw`, `∂_x u = Hw`.
//!
//! [`solve_monolithic`] evolves one field on one grid. [`solve_decomposed`]
//! follows each bump `w_k(x) = x_k W_k(x/L_k)`, `L_k = x_k^a r^k/A^{ak}`, on a
//! shared local grid, with bumps at other scales entering through moment
//! series and the heights through `d ln x_k/dt = Σ_{j<k} x_j HW_j(0)`.

mod analysis;
mod decomposed;
mod monolithic;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use analysis::{
    blowup_rate_fit, measure_interaction, profile_energy, refinement_study, EnergyReport, InteractionReport,
    RateFit, RefinementReport,
};
pub use decomposed::{assemble_frames, solve_decomposed, DecomposedRun, ProfileFrame};
pub use monolithic::{clm_exact, solve_monolithic, MonolithicRun};

/// How a run with `t_end < t_start` is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reversal {
    /// Negative time steps.
    SignedDt,
    /// Forward steps on `w̃(x, s) = -w(x, -s)`.
    Symmetry,
}

/// Parameters shared by both backends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Advection coefficient; 0 is the CLM model, 1 the De Gregorio model.
    pub a: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Fraction of `min(Δx/max|a u|, 1/max|Hw|)` taken per step.
    pub cfl: f64,
    pub max_dt: f64,
    pub min_dt: f64,
    /// Stop once `sup|w|` passes this.
    pub blowup_sup: f64,
    pub dealias: bool,
    pub reversal: Reversal,
    /// Spacing between diagnostic records.
    pub log_dt: f64,
    /// Keep a copy of every field at the log times.
    pub keep_frames: bool,
    /// Bootstrap radius `ε` for `‖∂(W_k - φ)‖₂`.
    pub eps: f64,
    /// Relative level below which `|w|` counts as zero in gaps and supports.
    pub height_floor: f64,
    /// Local grid spacing of the decomposed backend.
    pub local_h: f64,
    /// Terms in the cross-scale moment series.
    pub series_terms: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            a: 1.0,
            t_start: 0.0,
            t_end: -0.1,
            cfl: 0.5,
            max_dt: 1e-3,
            min_dt: 1e-12,
            blowup_sup: 1e12,
            dealias: true,
            reversal: Reversal::SignedDt,
            log_dt: 1e-3,
            keep_frames: false,
            eps: 0.05,
            height_floor: 1e-10,
            local_h: 1e-3,
            series_terms: 64,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !self.a.is_finite() {
            return bad(format!("a = {} is not finite", self.a));
        }
        if !(self.t_start <= 0.0 && self.t_end <= 0.0) || self.t_start == self.t_end {
            return bad(format!("times [{}, {}] must be distinct and ≤ 0", self.t_start, self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("CFL fraction {} outside (0, 1]", self.cfl));
        }
        if !(self.max_dt > self.min_dt && self.min_dt > 0.0) {
            return bad("need 0 < min_dt < max_dt".into());
        }
        if !(self.log_dt > 0.0) || !(self.eps > 0.0) || !(self.local_h > 0.0) || !(self.height_floor > 0.0) {
            return bad("log_dt, eps, local_h and height_floor must be positive".into());
        }
        if self.series_terms < 4 || self.series_terms > 400 {
            return bad(format!("series_terms = {} outside [4, 400]", self.series_terms));
        }
        Ok(())
    }

    /// `+1` forward in time, `-1` backward.
    pub fn direction(&self) -> f64 {
        (self.t_end - self.t_start).signum()
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    StepUnderflow { t: f64 },
    BlowUp { t: f64, sup: f64 },
    Bootstrap { t: f64, reason: String },
    /// The field reached the edge of its grid.
    Resolution { t: f64, reason: String },
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

/// One diagnostic sample; the per-bump vectors are empty for the monolithic
/// backend.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagRecord {
    pub t: f64,
    pub sup_w: f64,
    pub heights: Vec<f64>,
    /// `HW_k(0, t)`.
    pub hw_self_0: Vec<f64>,
    /// `Hw₋(0, t) = Σ_{j<k} x_j HW_j(0, t)`.
    pub hw_minus_0: Vec<f64>,
    /// `E_k = ‖∂W_k - φ'‖₂²`.
    pub energy: Vec<f64>,
    /// `∫_t^0 x_k`.
    pub integral: Vec<f64>,
    /// Positive-side support of `W_k` in local units.
    pub support: Vec<(f64, f64)>,
    /// `max|w|/sup|w|` on the gap between bumps `k + 1` and `k`.
    pub gap_level: Vec<f64>,
    /// `x_k max|W_k|/max|φ|`.
    pub height_proxy: Vec<f64>,
    /// `max|w(x) + w(-x)|`.
    pub odd_deviation: f64,
}

/// Diagnostics of a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub records: Vec<DiagRecord>,
    pub warnings: Vec<String>,
    pub steps: usize,
}

impl RunDiagnostics {
    /// CSV with `t, sup_w` and per-bump `x_k, Hw_minus_0_k, E_k` columns.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.records.first().map_or(0, |r| r.heights.len());
        let mut head = vec!["t".to_string(), "sup_w".to_string()];
        for prefix in ["x_", "Hw_minus_0_", "E_", "I_"] {
            head.extend((0..n).map(|k| format!("{prefix}{k}")));
        }
        writeln!(w, "{}", head.join(","))?;
        for r in &self.records {
            let mut row = vec![r.t.to_string(), r.sup_w.to_string()];
            for col in [&r.heights, &r.hw_minus_0, &r.energy, &r.integral] {
                row.extend(col.iter().map(|v| v.to_string()));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

/// Log times from `t_start` towards `t_end` spaced by `log_dt`, both ends
/// included.
pub(crate) fn log_times(cfg: &SolverConfig) -> Vec<f64> {
    let span = (cfg.t_end - cfg.t_start).abs();
    let steps = (span / cfg.log_dt - 1e-9).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|i| if i == steps { cfg.t_end } else { cfg.t_start + cfg.direction() * cfg.log_dt * i as f64 })
        .collect()
}
