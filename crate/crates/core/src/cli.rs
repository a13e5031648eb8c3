//! Command-line front end.
//!
//! ```text
//! twinlasso simulate   --design dgp1 --n 200 --seed 7 [--out FILE]
//! twinlasso montecarlo CONFIG [--out-dir DIR] [--seed S] [--jobs N]
//! twinlasso forecast   --csv PANEL [--horizons 1/12,1/4,...] [--windows 120,180]
//!                      [--estimators rwwd,ols,talasso:bic,...] [--tuning auto|cv|bic]
//!                      [--loss-scale sum|mean]
//!                      [--out-dir DIR] [--seed S] [--jobs N]
//! ```
//!
//! Exit status is 0 on success, 1 on runtime failure and 2 on usage or
//! configuration errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::load_montecarlo_config;
use crate::dgp::{write_csv, Design, DgpSpec, DEFAULT_BURN_IN};
use crate::empirical::{load_panel, parse_horizon, rolling_forecast, Forecaster, HorizonSpec, RollingSettings};
use crate::error::Error;
use crate::evaluation::run_montecarlo;
use crate::report::{write_forecast_outputs, write_json_file, write_montecarlo_outputs, Provenance};
use crate::tuning::{LossScale, Selector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_HORIZONS: &str = "1/12,1/4,1/2,1,2,3";
const DEFAULT_WINDOWS: &str = "120,180";
const DEFAULT_ESTIMATORS: &str = "rwwd,ols,plasso,slasso,alasso,talasso";

#[derive(Debug, Parser)]
#[command(name = "twinlasso", version, about = "Penalized predictive regression with mixed-persistence regressors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one dataset and write it as CSV plus a truth JSON sidecar.
    Simulate {
        #[arg(long)]
        design: Design,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Output CSV; defaults to `<design>_n<n>_seed<seed>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study described by a config file.
    Montecarlo {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rolling-window out-of-sample forecasts on a monthly return panel.
    Forecast {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = DEFAULT_HORIZONS)]
        horizons: String,
        /// Window lengths in months.
        #[arg(long, default_value = DEFAULT_WINDOWS)]
        windows: String,
        #[arg(long, default_value = DEFAULT_ESTIMATORS)]
        estimators: String,
        /// Default selector for estimators given without `:cv`/`:bic`.
        #[arg(long, value_enum, default_value_t = TuningMode::Auto)]
        tuning: TuningMode,
        /// Loss normalization the rate constants refer to.
        #[arg(long, default_value = "sum")]
        loss_scale: LossScale,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Recorded in provenance; forecasting itself draws no random numbers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TuningMode {
    /// BIC for the adaptive estimators, CV otherwise.
    Auto,
    Cv,
    Bic,
}

/// Failure classified by exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(j).build().map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn cmd_simulate(design: Design, n: usize, seed: u64, burn_in: usize, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let spec = DgpSpec { design, n, seed, burn_in };
    spec.validate().map_err(usage)?;
    let data = spec.simulate().map_err(runtime)?;
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{design}_n{n}_seed{seed}.csv")));
    let prov = Provenance::new(format!("twinlasso simulate --design {design} --n {n} --seed {seed} --burn-in {burn_in}"))
        .with_seed("seed", seed);

    let mut f = BufWriter::new(File::create(&out).map_err(|e| runtime(e.into()))?);
    for line in prov.header_lines() {
        writeln!(f, "{line}").map_err(|e| runtime(e.into()))?;
    }
    write_csv(&data, &mut f).map_err(runtime)?;
    f.flush().map_err(|e| runtime(e.into()))?;

    #[derive(serde::Serialize)]
    struct Sidecar<'a> {
        design: Design,
        n: usize,
        seed: u64,
        burn_in: usize,
        columns: &'a [String],
        truth: Option<&'a crate::dgp::TruthInfo>,
    }
    let sidecar = Sidecar { design, n, seed, burn_in, columns: data.names(), truth: data.truth() };
    write_json_file(out.with_extension("truth.json"), &prov, &sidecar).map_err(runtime)?;
    Ok(out)
}

pub fn cmd_montecarlo(config: &Path, out_dir: &Path, seed: Option<u64>, jobs: Option<usize>) -> Result<(), CliError> {
    let mut cfg = load_montecarlo_config(config).map_err(|e| match e {
        Error::Io(_) => runtime(e),
        other => usage(format!("{}: {other}", config.display())),
    })?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let report = with_jobs(jobs, || run_montecarlo(&cfg))?.map_err(runtime)?;
    let mut command = format!("twinlasso montecarlo {}", file_name(config));
    if let Some(s) = seed {
        command.push_str(&format!(" --seed {s}"));
    }
    let prov = Provenance::new(command)
        .with_seed("master_seed", cfg.master_seed)
        .with_setting("loss_scale", cfg.fit.loss_scale.as_str())
        .with_tuning("gamma", cfg.fit.gamma)
        .with_calibrations(&report.calibrations);
    write_montecarlo_outputs(out_dir, &prov, &report).map_err(runtime)?;

    let dead: Vec<String> = report
        .cells
        .iter()
        .filter(|c| c.reps == 0)
        .map(|c| format!("{} n={} {}", c.design, c.n, c.family))
        .collect();
    let partial = report.cells.iter().filter(|c| c.failures > 0 && c.reps > 0).count();
    if partial > 0 {
        log::warn!("{partial} cells had some failed replications");
    }
    if !dead.is_empty() {
        return Err(CliError::Runtime(format!("every replication failed in: {}", dead.join("; "))));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_forecast(
    csv: &Path,
    horizons: &str,
    windows: &str,
    estimators: &str,
    tuning: TuningMode,
    loss_scale: LossScale,
    out_dir: &Path,
    seed: u64,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let hs: Vec<f64> = horizons.split(',').map(parse_horizon).collect::<crate::Result<_>>().map_err(usage)?;
    let ws: Vec<usize> = windows
        .split(',')
        .map(|w| w.trim().parse::<usize>().map_err(|_| usage(format!("bad window `{w}`"))))
        .collect::<Result<_, _>>()?;
    let mut specs = Vec::new();
    for &w in &ws {
        for &h in &hs {
            specs.push(HorizonSpec::new(h, w).map_err(usage)?);
        }
    }
    let forecasters: Vec<Forecaster> = estimators
        .split(',')
        .map(|e| {
            let default = match tuning {
                TuningMode::Cv => Selector::Cv,
                TuningMode::Bic => Selector::Bic,
                TuningMode::Auto => match e.trim().to_ascii_lowercase().as_str() {
                    "alasso" | "talasso" => Selector::Bic,
                    _ => Selector::Cv,
                },
            };
            Forecaster::parse(e, default)
        })
        .collect::<crate::Result<_>>()
        .map_err(usage)?;

    let panel = load_panel(csv).map_err(runtime)?;
    let mut settings = RollingSettings::default();
    settings.fit.loss_scale = loss_scale;
    let results = with_jobs(jobs, || {
        let mut out = Vec::new();
        for spec in &specs {
            for &f in &forecasters {
                log::info!("forecasting {} h={} window={}", f.label(), spec.label(), spec.window_months);
                out.push(rolling_forecast(&panel, spec, f, &settings));
            }
        }
        out
    })?;
    let results = results.into_iter().collect::<crate::Result<Vec<_>>>().map_err(runtime)?;
    for r in results.iter().filter(|r| !r.failed_windows.is_empty()) {
        log::warn!("{} h={} window={}: {} windows failed", r.forecaster, r.horizon.label(), r.horizon.window_months, r.failed_windows.len());
    }

    let est_norm: Vec<String> = forecasters.iter().map(|f| f.label()).collect();
    let tuning_name = match tuning {
        TuningMode::Auto => "auto",
        TuningMode::Cv => "cv",
        TuningMode::Bic => "bic",
    };
    let command = format!(
        "twinlasso forecast --csv {} --horizons {} --windows {} --estimators {} --tuning {tuning_name} --loss-scale {} --seed {seed}",
        file_name(csv),
        horizons.replace(' ', ""),
        windows.replace(' ', ""),
        est_norm.join(","),
        loss_scale.as_str()
    );
    let prov = Provenance::new(command)
        .with_seed("seed", seed)
        .with_setting("loss_scale", loss_scale.as_str())
        .with_tuning("grid_min", settings.grid[0])
        .with_tuning("grid_max", *settings.grid.last().unwrap_or(&f64::NAN))
        .with_tuning("grid_points", settings.grid.len() as f64)
        .with_tuning("folds", settings.folds as f64);
    write_forecast_outputs(out_dir, &prov, &results).map_err(runtime)?;
    Ok(())
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { design, n, seed, burn_in, out } => cmd_simulate(design, n, seed, burn_in, out).map(|_| ()),
        Command::Montecarlo { config, out_dir, seed, jobs } => cmd_montecarlo(&config, &out_dir, seed, jobs),
        Command::Forecast { csv, horizons, windows, estimators, tuning, loss_scale, out_dir, seed, jobs } => {
            cmd_forecast(&csv, &horizons, &windows, &estimators, tuning, loss_scale, &out_dir, seed, jobs)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
