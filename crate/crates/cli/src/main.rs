//! Command-line front end: each run subcommand executes one experiment and
//! exits with the report's status code.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade_lab::experiment::{self, ExperimentConfig, ExperimentKind, ExperimentReport, Status};
use cascade_lab::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cascade-lab", version, about = "Multi-scale blow-up cascade experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Height cascade and its lemma suites (presets: cascade, cascade-lemmas).
    Cascade(RunArgs),
    /// One-dimensional solver runs (presets: solve1d, clm, degregorio-n4, rate, profiles).
    Solve1d(RunArgs),
    /// Axisymmetric kernel integrals (presets: axisym).
    Axisym(RunArgs),
    /// Recursion lemmas and the closing inequality (presets: lemmas, acceptance).
    Lemmas(RunArgs),
    /// Runs every point of the config's sweep block.
    Sweep(RunArgs),
    /// Prints a saved report and exits with its status.
    Report {
        /// A report.json file or the directory holding it.
        path: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory; defaults to $CASCADE_LAB_OUT/<experiment>, else runs/<experiment>.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
}

fn family(cmd: &Command) -> (&'static [&'static str], ExperimentKind) {
    match cmd {
        Command::Cascade(_) => (&["cascade", "cascade-lemmas"], ExperimentKind::Cascade),
        Command::Solve1d(_) => (&["solve1d", "clm", "degregorio-n4", "rate", "profiles"], ExperimentKind::Solve1d),
        Command::Axisym(_) => (&["axisym"], ExperimentKind::Axisym),
        Command::Lemmas(_) => (&["lemmas", "acceptance"], ExperimentKind::Lemmas),
        Command::Sweep(_) | Command::Report { .. } => (&[], ExperimentKind::Cascade),
    }
}

fn configure(cmd: &Command, args: &RunArgs) -> cascade_lab::Result<ExperimentConfig> {
    let (allowed, default) = family(cmd);
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => {
            if !matches!(cmd, Command::Sweep(_)) && !allowed.contains(&name.as_str()) {
                return Err(Error::Config(format!("preset `{name}` does not belong here; expected one of {}", allowed.join(", "))));
            }
            experiment::preset(name)?
        }
        (None, None) if matches!(cmd, Command::Sweep(_)) => {
            return Err(Error::Config("sweep needs --config with a [sweep] block".into()));
        }
        (None, None) => experiment::preset(default.name())?,
    };
    if matches!(cmd, Command::Sweep(_)) && cfg.sweep.is_none() {
        return Err(Error::Config("the config has no [sweep] block".into()));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cmd: &Command) -> cascade_lab::Result<ExperimentReport> {
    let args = match cmd {
        Command::Report { path } => return ExperimentReport::load(path).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        Command::Cascade(a) | Command::Solve1d(a) | Command::Axisym(a) | Command::Lemmas(a) | Command::Sweep(a) => a,
    };
    let cfg = configure(cmd, args)?;
    let dir = experiment::resolve_out_dir(&cfg, args.out.as_deref());
    let report = experiment::run(&cfg, &dir, args.jobs)?;
    eprintln!("wrote {}", Path::new(&dir).join("report.json").display());
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Status::Config.exit_code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            print!("{}", report.summary());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::of_error(&e).exit_code() as u8)
        }
    }
}
