//! Command-line surface and exit-code mapping.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use super::*;

#[derive(Debug, Parser)]
#[command(name = "wavelab", version, about = "Radial wave-equation laboratory in five dimensions")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output prefix; overrides the configuration's `out`.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Seed; overrides the configuration's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for ensembles and scans.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliModel {
    Cubic,
    PendulumSin,
    PendulumSinh,
}

impl From<CliModel> for AutonomousModel {
    fn from(m: CliModel) -> Self {
        match m {
            CliModel::Cubic => AutonomousModel::Cubic,
            CliModel::PendulumSin => AutonomousModel::PendulumSin,
            CliModel::PendulumSinh => AutonomousModel::PendulumSinh,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the configured data and write series and snapshot CSVs.
    Evolve,
    /// Exterior-energy channels of a random ensemble, the plane datum or configured data.
    Channels {
        #[arg(long = "radius", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 100)]
        ensemble: usize,
        /// Use plane data instead of the random ensemble.
        #[arg(long)]
        plane: bool,
        /// Probe the configured data along the free flow at T, 2T and 4T instead.
        #[arg(long)]
        t_probe: Option<f64>,
    },
    /// Stable-manifold profile and phase portrait.
    Stationary {
        #[arg(long, value_enum, default_value_t = CliModel::Cubic)]
        model: CliModel,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        /// Lower end of log r; must be at most 0.
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        s_min: f64,
    },
    /// Self-similar energy table and shooting scan.
    Selfsimilar {
        #[arg(long, default_value_t = 0.01)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 128)]
        degree: usize,
        #[arg(long, default_value_t = 0.25)]
        s_end: f64,
        #[arg(long, default_value_t = 2.5e-5)]
        ds: f64,
        #[arg(long, default_value_t = 400)]
        stride: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 3.0)]
        a_max: f64,
        #[arg(long, default_value_t = 31)]
        a_count: usize,
    },
    /// Oscillatory kernel samples against the decay bound.
    Kernel {
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        k: i32,
        #[arg(long = "decay", default_value_t = 2.0)]
        l: f64,
    },
    /// Norms of the configured initial data.
    Norms,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_deref().ok_or_else(|| WaveLabError::Config("this subcommand needs --config".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prefix(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    let p = cli.out.clone().or_else(|| cfg.map(|c| c.out.clone())).unwrap_or_else(|| "wavelab".into());
    resolve_prefix(&p)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Evolve => {
            let cfg = load(cli)?;
            let out = run_evolve(&cfg, &prefix(cli, Some(&cfg)))?;
            let last = out.series.last().map_or(0.0, |r| r.t);
            println!("termination={:?} t_final={last} snapshots={}", out.termination, out.series.len());
            Ok(out.exit_code())
        }
        Command::Channels { r, ensemble, plane, t_probe } => {
            if let Some(t) = t_probe {
                let cfg = load(cli)?;
                let rep = run_channel_probe(&cfg, *r, *t, &prefix(cli, Some(&cfg)))?;
                print_json(&rep)?;
            } else {
                let seed = cli.seed.unwrap_or(0);
                let opts = ChannelOptions { r: *r, ensemble: *ensemble, seed, plane: *plane };
                let (_, summary) = run_channels(&opts, &prefix(cli, None))?;
                print_json(&summary)?;
            }
            Ok(0)
        }
        Command::Stationary { model, ell, s_min } => {
            let s = run_stationary((*model).into(), *ell, *s_min, &prefix(cli, None))?;
            print_json(&s)?;
            Ok(0)
        }
        Command::Selfsimilar { amplitude, radius, degree, s_end, ds, stride, eps, a_min, a_max, a_count } => {
            let model = match &cli.config {
                Some(_) => load(cli)?.model,
                None => ModelSpec::cubic_focusing(),
            };
            let opts = SelfSimilarOptions {
                amplitude: *amplitude,
                radius: *radius,
                degree: *degree,
                s_end: *s_end,
                ds: *ds,
                stride: *stride,
                eps: *eps,
                a_range: (*a_min, *a_max),
                a_count: *a_count,
            };
            print_json(&run_selfsimilar(&model, &opts, &prefix(cli, None))?)?;
            Ok(0)
        }
        Command::Kernel { k, l } => {
            print_json(&run_kernel(*k, *l, &prefix(cli, None))?)?;
            Ok(0)
        }
        Command::Norms => {
            let cfg = load(cli)?;
            print_json(&run_norms(&cfg, &prefix(cli, Some(&cfg)))?)?;
            Ok(0)
        }
    }
}

/// Parses arguments, runs the subcommand and maps the outcome to an exit code:
/// 0 success, 2 detected blow-up, 1 any error including bad arguments.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
