//! Experiment runner: TOML configuration, presets keyed to the acceptance
//! criteria, parameter sweeps and JSON/CSV reports.
//!
//! A configuration names one experiment and carries parameter blocks for the
//! modules it touches:
//!
//! ```toml
//! experiment = "degregorio-n4"
//! seed = 7
//!
//! [solver]
//! bumps = 4
//! ratio = 1.05
//! r = 0.2
//!
//! [solver.config]
//! eps = 0.05
//! local_h = 1e-3
//! ```
//!
//! Unknown keys are rejected. Every run writes `report.json` and its CSV
//! artifacts into the output directory.

pub mod criteria;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degregorio_solver::{SolverConfig, Termination};
use crate::euler_axisym::AxisymConfig;
use crate::ode_cascade::CoeffSpec;
use crate::{Error, Result};

/// Environment variable holding the default output root.
pub const OUT_ENV: &str = "CASCADE_LAB_OUT";

/// Experiments the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// One cascade integration from the `[cascade]` block.
    Cascade,
    /// Criteria 1 to 4.
    CascadeLemmas,
    /// Criterion 5.
    Profiles,
    /// Criterion 6.
    Clm,
    /// One PDE run from the `[solver]` block.
    Solve1d,
    /// Criteria 7 and 9.
    #[serde(rename = "degregorio-n4")]
    DegregorioN4,
    /// Criterion 8.
    Rate,
    /// Criteria 10 and 11.
    Axisym,
    /// Criterion 12.
    Lemmas,
    /// Criteria 1 to 12.
    Acceptance,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::Cascade,
        ExperimentKind::CascadeLemmas,
        ExperimentKind::Profiles,
        ExperimentKind::Clm,
        ExperimentKind::Solve1d,
        ExperimentKind::DegregorioN4,
        ExperimentKind::Rate,
        ExperimentKind::Axisym,
        ExperimentKind::Lemmas,
        ExperimentKind::Acceptance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Cascade => "cascade",
            ExperimentKind::CascadeLemmas => "cascade-lemmas",
            ExperimentKind::Profiles => "profiles",
            ExperimentKind::Clm => "clm",
            ExperimentKind::Solve1d => "solve1d",
            ExperimentKind::DegregorioN4 => "degregorio-n4",
            ExperimentKind::Rate => "rate",
            ExperimentKind::Axisym => "axisym",
            ExperimentKind::Lemmas => "lemmas",
            ExperimentKind::Acceptance => "acceptance",
        }
    }

    /// Acceptance criteria the experiment reports on.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            ExperimentKind::Cascade | ExperimentKind::Solve1d => &[],
            ExperimentKind::CascadeLemmas => &[1, 2, 3, 4],
            ExperimentKind::Profiles => &[5],
            ExperimentKind::Clm => &[6],
            ExperimentKind::DegregorioN4 => &[7, 9],
            ExperimentKind::Rate => &[8],
            ExperimentKind::Axisym => &[10, 11],
            ExperimentKind::Lemmas => &[12],
            ExperimentKind::Acceptance => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        }
    }
}

/// `[cascade]`: the height system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CascadeBlock {
    pub ratio: f64,
    pub levels: usize,
    pub t_min: f64,
    pub coeffs: CoeffSpec,
    pub tol: f64,
    pub power: f64,
    /// Output samples on `[t_min, 0]`.
    pub samples: usize,
}

impl Default for CascadeBlock {
    fn default() -> Self {
        CascadeBlock {
            ratio: 1.1,
            levels: 15,
            t_min: -1.0,
            coeffs: CoeffSpec::ones(),
            tol: 1e-12,
            power: 1.0,
            samples: 201,
        }
    }
}

/// Which PDE backend a `solve1d` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Monolithic,
    Decomposed,
}

/// `[solver]`: multi-bump data and the integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    pub backend: Backend,
    /// Index `n` of the innermost bump; the data has `n + 1` bumps.
    pub bumps: usize,
    pub ratio: f64,
    pub r: f64,
    /// Monolithic grid size and half-width.
    pub points: usize,
    pub half_width: f64,
    /// Backward window; the bootstrap window `T` when absent.
    pub window: Option<f64>,
    pub config: SolverConfig,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            backend: Backend::Decomposed,
            bumps: 4,
            ratio: 1.05,
            r: 0.2,
            points: 1 << 14,
            half_width: 4.0,
            window: None,
            config: SolverConfig { local_h: 1e-3, eps: 0.05, ..Default::default() },
        }
    }
}

/// `[sweep]`: parameter sets run as independent experiments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    /// `"cartesian"` takes every combination, `"listed"` zips the lists.
    pub mode: SweepMode,
    /// Dotted parameter paths (`solver.ratio`, `seed`, …) and their values.
    pub parameters: BTreeMap<String, Vec<toml::Value>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Cartesian,
    Listed,
}

/// Tolerances judged against; defaults are the acceptance thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cascade_rel: f64,
    pub cascade_runtime_s: f64,
    pub lemma_slack: f64,
    pub envelope_limit: f64,
    pub monotone_slack: f64,
    pub certificate_pv: f64,
    pub spectral_vs_pv: f64,
    pub normalization: f64,
    pub beta_identity: f64,
    pub clm_sup: f64,
    pub clm_runtime_s: f64,
    pub log_rate_rel: f64,
    pub height_rel: f64,
    pub gap_level: f64,
    pub mechanism_runtime_s: f64,
    pub envelope_factor: f64,
    pub hw1_runtime_s: f64,
    pub kernel_fd: f64,
    pub unit_rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cascade_rel: 1e-8,
            cascade_runtime_s: 1.0,
            lemma_slack: 1e-9,
            envelope_limit: 1e-10,
            monotone_slack: 1e-10,
            certificate_pv: 1e-8,
            spectral_vs_pv: 1e-6,
            normalization: 1e-10,
            beta_identity: 1e-8,
            clm_sup: 1e-4,
            clm_runtime_s: 30.0,
            log_rate_rel: 0.02,
            height_rel: 0.05,
            gap_level: 1e-10,
            mechanism_runtime_s: 600.0,
            envelope_factor: 3.0,
            hw1_runtime_s: 60.0,
            kernel_fd: 1e-6,
            unit_rate: 1e-8,
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub cascade: CascadeBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub axisym: AxisymConfig,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            seed: 0,
            out: None,
            cascade: CascadeBlock::default(),
            solver: SolverBlock::default(),
            axisym: AxisymConfig::default(),
            sweep: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every block before anything runs.
    pub fn validate(&self) -> Result<()> {
        let c = &self.cascade;
        if !(c.ratio > 1.0) || c.levels == 0 || !(c.t_min < 0.0) || !(c.tol > 0.0) || !(c.power > 0.0) || c.samples < 2 {
            return Err(Error::Config("cascade block needs A > 1, levels ≥ 1, t_min < 0, tol > 0, power > 0, samples ≥ 2".into()));
        }
        let s = &self.solver;
        s.config.validate()?;
        if !(s.ratio > 1.0 && s.ratio < 2.0) || !(s.r > 0.0 && s.r <= 0.25) {
            return Err(Error::Config(format!("solver block needs A ∈ (1, 2) and r ∈ (0, 1/4], got {} and {}", s.ratio, s.r)));
        }
        if s.points < 64 || !(s.half_width > 0.0) || s.window.is_some_and(|w| !(w > 0.0)) {
            return Err(Error::Config("solver grid needs ≥ 64 points, a positive half-width and a positive window".into()));
        }
        self.axisym.validate()?;
        if let Some(sw) = &self.sweep {
            if sw.mode == SweepMode::Listed {
                let lens: Vec<usize> = sw.parameters.values().map(Vec::len).collect();
                if lens.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Config("listed sweep parameters must have equal lengths".into()));
                }
            }
            for key in sw.parameters.keys() {
                if key == "sweep" || key.starts_with("sweep.") || key == "out" {
                    return Err(Error::Config(format!("sweep parameter `{key}` cannot be swept")));
                }
            }
        }
        Ok(())
    }
}

/// Named configurations, one per experiment.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let kind = ExperimentKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`; known: {}", preset_names().join(", "))))?;
    let mut cfg = ExperimentConfig::new(kind);
    cfg.seed = 20240917;
    match kind {
        ExperimentKind::Rate => cfg.solver.bumps = 20,
        ExperimentKind::Solve1d => {
            cfg.solver.bumps = 2;
            cfg.solver.window = Some(0.02);
        }
        ExperimentKind::Lemmas | ExperimentKind::Axisym => cfg.axisym = AxisymConfig { d: 0.05, z: 50.0, ..Default::default() },
        _ => {}
    }
    Ok(cfg)
}

pub fn preset_names() -> Vec<&'static str> {
    ExperimentKind::ALL.iter().map(|k| k.name()).collect()
}

/// One judged quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Acceptance criterion, 0 for checks outside the list.
    pub criterion: u8,
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Verdict {
    /// `measured ≤ tolerance`.
    pub fn at_most(criterion: u8, name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Verdict { criterion, name: name.into(), pass: measured <= tolerance, measured, tolerance, detail: detail.into() }
    }

    /// `measured ≥ tolerance`.
    pub fn at_least(criterion: u8, name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Verdict { criterion, name: name.into(), pass: measured >= tolerance, measured, tolerance, detail: detail.into() }
    }

    pub fn flag(criterion: u8, name: &str, pass: bool, detail: impl Into<String>) -> Self {
        let v = if pass { 1.0 } else { 0.0 };
        Verdict { criterion, name: name.into(), pass, measured: v, tolerance: 1.0, detail: detail.into() }
    }
}

/// Aggregate status, ordered by severity; the discriminant is the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass = 0,
    Failed = 1,
    Bootstrap = 2,
    Resolution = 3,
    Config = 64,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        self as i32
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Config(_) => Status::Config,
            Error::Bootstrap { .. } => Status::Bootstrap,
            Error::Resolution(_) | Error::StepUnderflow { .. } | Error::Sizing(_) => Status::Resolution,
            _ => Status::Failed,
        }
    }

    pub fn of_termination(t: &Termination) -> Self {
        match t {
            Termination::Completed | Termination::BlowUp { .. } => Status::Pass,
            Termination::Bootstrap { .. } => Status::Bootstrap,
            Termination::Resolution { .. } | Termination::StepUnderflow { .. } => Status::Resolution,
        }
    }
}

/// What a criterion runner hands back.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub verdicts: Vec<Verdict>,
    /// `(file name, contents)`.
    pub csv: Vec<(String, String)>,
    /// Set when a solver run aborted.
    pub abort: Option<(Status, String)>,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.verdicts.extend(other.verdicts);
        self.csv.extend(other.csv);
        if self.abort.is_none() {
            self.abort = other.abort;
        }
    }

    pub fn status(&self) -> Status {
        let verdicts = if self.verdicts.iter().all(|v| v.pass) { Status::Pass } else { Status::Failed };
        self.abort.as_ref().map_or(verdicts, |(s, _)| verdicts.max(*s))
    }
}

/// Written as `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub verdicts: Vec<Verdict>,
    /// Criteria whose verdicts all passed, and those with a failure.
    pub criteria_passed: Vec<u8>,
    pub criteria_failed: Vec<u8>,
    pub wall_clock_s: f64,
    pub artifacts: Vec<String>,
    pub status: Status,
    pub abort: Option<String>,
    /// Sub-runs of a sweep.
    pub runs: Vec<SweepRow>,
}

impl ExperimentReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// One line per verdict.
    pub fn summary(&self) -> String {
        let mut out = format!("{} [{:?}] in {:.2} s\n", self.experiment, self.status, self.wall_clock_s);
        for v in &self.verdicts {
            out.push_str(&format!(
                "  {:>2} {:<4} {:<40} measured {:<12.4e} tol {:.3e}  {}\n",
                v.criterion,
                if v.pass { "pass" } else { "FAIL" },
                v.name,
                v.measured,
                v.tolerance,
                v.detail
            ));
        }
        for r in &self.runs {
            out.push_str(&format!("  run {:>3} [{:?}] {}\n", r.index, r.status, r.label));
        }
        out
    }
}

/// Executes the experiment's criteria without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    use criteria as c;
    let t = &cfg.tolerances;
    let seed = cfg.seed;
    let mut out = Outcome::default();
    let kinds: Vec<ExperimentKind> = match cfg.experiment {
        ExperimentKind::Acceptance => vec![
            ExperimentKind::CascadeLemmas,
            ExperimentKind::Profiles,
            ExperimentKind::Clm,
            ExperimentKind::DegregorioN4,
            ExperimentKind::Rate,
            ExperimentKind::Axisym,
            ExperimentKind::Lemmas,
        ],
        k => vec![k],
    };
    for kind in kinds {
        match kind {
            ExperimentKind::Cascade => out.merge(c::cascade_run(&cfg.cascade, t)?),
            ExperimentKind::CascadeLemmas => {
                out.merge(c::criterion_1(&cfg.cascade, t)?);
                out.merge(c::criterion_2(seed, t)?);
                out.merge(c::criterion_3(seed, t)?);
                out.merge(c::criterion_4(seed, t)?);
            }
            ExperimentKind::Profiles => out.merge(c::criterion_5(t)?),
            ExperimentKind::Clm => out.merge(c::criterion_6(t)?),
            ExperimentKind::Solve1d => out.merge(c::solve1d(&cfg.solver)?),
            ExperimentKind::DegregorioN4 => out.merge(c::criteria_7_9(&cfg.solver, t)?),
            ExperimentKind::Rate => out.merge(c::criterion_8(&cfg.solver, t)?),
            ExperimentKind::Axisym => {
                out.merge(c::criterion_10(seed, t)?);
                out.merge(c::criterion_11(seed, t)?);
            }
            ExperimentKind::Lemmas => out.merge(c::criterion_12(&cfg.axisym, seed)?),
            ExperimentKind::Acceptance => unreachable!("expanded above"),
        }
    }
    Ok(out)
}

/// Output directory: explicit argument, then the config, then
/// `$CASCADE_LAB_OUT/<experiment>`, then `runs/<experiment>`.
pub fn resolve_out_dir(cfg: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.out {
        return p.clone();
    }
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(cfg.experiment.name())
}

fn write_artifacts(dir: &Path, csv: &[(String, String)]) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(csv.len());
    for (name, body) in csv {
        std::fs::write(dir.join(name), body)?;
        names.push(name.clone());
    }
    Ok(names)
}

fn finish(cfg: &ExperimentConfig, out: Outcome, runs: Vec<SweepRow>, started: Instant, dir: &Path) -> Result<ExperimentReport> {
    let mut artifacts = write_artifacts(dir, &out.csv)?;
    let status = out.status().max(runs.iter().map(|r| r.status).max().unwrap_or(Status::Pass));
    let mut passed = Vec::new();
    let mut failed = Vec::new();
    for &c in cfg.experiment.criteria() {
        let vs: Vec<&Verdict> = out.verdicts.iter().filter(|v| v.criterion == c).collect();
        if vs.is_empty() {
            continue;
        }
        if vs.iter().all(|v| v.pass) {
            passed.push(c);
        } else {
            failed.push(c);
        }
    }
    artifacts.push("report.json".into());
    let report = ExperimentReport {
        experiment: cfg.experiment.name().into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        verdicts: out.verdicts,
        criteria_passed: passed,
        criteria_failed: failed,
        wall_clock_s: started.elapsed().as_secs_f64(),
        artifacts,
        status,
        abort: out.abort.map(|(_, m)| m),
        runs,
    };
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

/// Runs one experiment (or a sweep, when the config has one) and writes its
/// report and CSVs into `dir`.
pub fn run(cfg: &ExperimentConfig, dir: &Path, jobs: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.sweep.is_some() {
        return sweep(cfg, dir, jobs);
    }
    let started = Instant::now();
    let out = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            let status = Status::of_error(&e);
            if status == Status::Config {
                return Err(e);
            }
            Outcome { abort: Some((status, e.to_string())), ..Default::default() }
        }
    };
    finish(cfg, out, Vec::new(), started, dir)
}

/// One sweep point in the aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub label: String,
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub directory: String,
}

/// Expands the sweep block into concrete configurations.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<(String, ExperimentConfig)>> {
    let Some(sw) = &cfg.sweep else {
        return Ok(vec![(String::new(), cfg.clone())]);
    };
    let keys: Vec<&String> = sw.parameters.keys().collect();
    let lists: Vec<&Vec<toml::Value>> = sw.parameters.values().collect();
    if lists.is_empty() || lists.iter().any(|l| l.is_empty()) {
        return Ok(Vec::new());
    }
    let combos: Vec<Vec<usize>> = match sw.mode {
        SweepMode::Listed => (0..lists[0].len()).map(|i| vec![i; lists.len()]).collect(),
        SweepMode::Cartesian => {
            let mut acc = vec![Vec::new()];
            for l in &lists {
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        (0..l.len()).map(move |i| {
                            let mut p = prefix.clone();
                            p.push(i);
                            p
                        })
                    })
                    .collect();
            }
            acc
        }
    };
    let mut base = cfg.clone();
    base.sweep = None;
    let base_value = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
    combos
        .into_iter()
        .map(|idx| {
            let mut v = base_value.clone();
            let mut label = Vec::new();
            for (k, (key, list)) in keys.iter().zip(&lists).enumerate() {
                let value = list[idx[k]].clone();
                label.push(format!("{key}={value}"));
                set_path(&mut v, key, value)?;
            }
            let point: ExperimentConfig = v.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
            point.validate()?;
            Ok((label.join(" "), point))
        })
        .collect()
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = cur.as_table_mut().ok_or_else(|| Error::Config(format!("`{path}` does not name a table entry")))?;
        if i + 1 == parts.len() {
            table.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = table.entry(*part).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Ok(())
}

/// Runs every sweep point in its own subdirectory on a pool of `jobs`
/// workers and writes the aggregate `sweep.csv`.
pub fn sweep(cfg: &ExperimentConfig, dir: &Path, jobs: usize) -> Result<ExperimentReport> {
    let started = Instant::now();
    let points = sweep_points(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, (label, point))| {
                let sub = format!("run_{index:03}");
                let (status, passed, failed) = match run(point, &dir.join(&sub), 1) {
                    Ok(r) => {
                        let p = r.verdicts.iter().filter(|v| v.pass).count();
                        (r.status, p, r.verdicts.len() - p)
                    }
                    Err(e) => (Status::of_error(&e), 0, 0),
                };
                SweepRow { index, label: label.clone(), status, passed, failed, directory: sub }
            })
            .collect()
    });
    let mut csv = String::from("index,label,status,passed,failed,directory\n");
    for r in &rows {
        csv.push_str(&format!("{},\"{}\",{},{},{},{}\n", r.index, r.label, r.status.exit_code(), r.passed, r.failed, r.directory));
    }
    let mut out = Outcome { csv: vec![("sweep.csv".into(), csv)], ..Default::default() };
    if rows.iter().any(|r| r.status != Status::Pass) {
        out.verdicts.push(Verdict::flag(0, "sweep runs", false, "at least one run did not pass"));
    }
    finish(cfg, out, rows, started, dir)
}

/// Shortest round-trip CSV from a header and numeric rows.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("experiment = \"cascade\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = ExperimentConfig::from_toml("experiment = \"cascade\"\n[solver]\nratio = 3.0\n").unwrap_err();
        assert_eq!(Status::of_error(&err), Status::Config);
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in preset_names() {
            let cfg = preset(name).unwrap();
            let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            assert_eq!(back, cfg);
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn cartesian_and_listed_sweeps_expand() {
        let mut cfg = preset("rate").unwrap();
        let mut params = BTreeMap::new();
        params.insert("solver.ratio".to_string(), vec![1.02.into(), 1.05.into(), 1.1.into()]);
        params.insert("solver.r".to_string(), vec![0.15.into(), 0.2.into(), 0.25.into()]);
        cfg.sweep = Some(SweepBlock { mode: SweepMode::Cartesian, parameters: params.clone() });
        let pts = sweep_points(&cfg).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[4].1.solver.ratio, 1.05);
        assert_eq!(pts[4].1.solver.r, 0.2);
        cfg.sweep = Some(SweepBlock { mode: SweepMode::Listed, parameters: params });
        assert_eq!(sweep_points(&cfg).unwrap().len(), 3);
    }

    #[test]
    fn empty_sweep_is_an_empty_passing_report() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("cascade").unwrap();
        let mut params = BTreeMap::new();
        params.insert("seed".to_string(), Vec::new());
        cfg.sweep = Some(SweepBlock { mode: SweepMode::Cartesian, parameters: params });
        let rep = run(&cfg, dir.path(), 1).unwrap();
        assert!(rep.runs.is_empty());
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn status_severity() {
        assert!(Status::Config > Status::Resolution && Status::Resolution > Status::Bootstrap);
        assert_eq!(Status::of_error(&Error::Resolution("x".into())).exit_code(), 3);
        assert_eq!(Status::of_error(&Error::Bootstrap { t: 0.0, reason: String::new() }).exit_code(), 2);
    }

    #[test]
    fn csv_uses_round_trip_formatting() {
        let s = csv_table(&["a", "b"], [vec![0.1 + 0.2, 1e-300]]);
        let row: Vec<f64> = s.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1 + 0.2, 1e-300]);
    }
}
