//! Experiment runner: JSON run configurations, the scenario library and the
//! CSV/JSON writers behind the `wavelab` binary.
//!
//! Every runner is deterministic for a fixed configuration, seed and build, and
//! every CSV it writes starts with the schema line.

mod args;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use args::{main_with_args, Cli, Command};

use crate::channels::{
    channel_experiment, channel_report, run_ensemble, ChannelReport, EnsembleConfig, ExteriorPair, PanelSpec,
};
use crate::diagnostics::{compactness_tails, critical_norm, fit_kernel_constant, kernel_samples, modulation_scale};
use crate::error::{Result, WaveLabError};
use crate::evolve::{evolve, EvolveConfig, Scheme, Termination};
use crate::models::data::{constant_ball, gaussian, ode_blowup_data, turok_spergel_data};
use crate::models::{self, ModelSpec, State};
use crate::radial_spectral::{lebesgue_norm, sobolev_norm, GridSpec, RadialField, RadialGrid, CSV_SCHEMA_LINE};
use crate::selfsimilar::{monotonicity_check, perturbed_equilibrium, shoot_scan, EvenCheb, WFlow};
use crate::stationary_ode::{
    far_field_slope, phase_portrait, physical_profile, stable_manifold, AutonomousModel, ManifoldOptions,
    ManifoldProfile,
};

/// Environment variable naming the default output directory.
pub const DATA_DIR_ENV: &str = "WAVELAB_DATA_DIR";

/// Diagnostics the evolve runner knows how to record.
pub const DIAGNOSTICS: [&str; 5] = ["linf", "energy", "critical_norm", "strichartz_accum", "tails"];

/// Tail tolerance η used for the compactness columns.
pub const TAIL_ETA: f64 = 0.05;

/// Radius window on which the far-field slope of a stationary profile is fitted.
pub const SLOPE_WINDOW: (f64, f64) = (10.0, 100.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub snapshot_stride: usize,
}

fn one() -> usize {
    1
}

/// Initial data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    ConstantBall {
        value: f64,
        radius: f64,
        smoothing: f64,
    },
    /// A CSV with columns r,u[,ut] on the configured grid, e.g. a snapshot file.
    File {
        path: PathBuf,
    },
    /// The stationary profile φ_ℓ(log r)/r at rest.
    Stationary {
        model: AutonomousModel,
        ell: f64,
    },
    TurokSpergel {
        t0: f64,
        truncation: f64,
        #[serde(default = "default_smoothing")]
        smoothing: f64,
    },
    /// Truncated data of the ODE blow-up solution √2/(T − t).
    OdeBlowup {
        #[serde(rename = "T")]
        big_t: f64,
        radius: f64,
        smoothing: f64,
    },
}

fn default_smoothing() -> f64 {
    0.5
}

/// One experiment, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub data: DataSpec,
    #[serde(default = "all_diagnostics")]
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub scheme: Scheme,
}

fn all_diagnostics() -> Vec<String> {
    DIAGNOSTICS.iter().map(|s| s.to_string()).collect()
}

fn default_out() -> String {
    "wavelab".into()
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| WaveLabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WaveLabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(bad) = self.diagnostics.iter().find(|d| !DIAGNOSTICS.contains(&d.as_str())) {
            return Err(WaveLabError::Config(format!(
                "unknown diagnostic '{bad}' (known: {})",
                DIAGNOSTICS.join(", ")
            )));
        }
        if self.out.is_empty() {
            return Err(WaveLabError::Config("out prefix must not be empty".into()));
        }
        if self.time.snapshot_stride == 0 {
            return Err(WaveLabError::Config("snapshot_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn wants(&self, diagnostic: &str) -> bool {
        self.diagnostics.iter().any(|d| d == diagnostic)
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        let mut c = EvolveConfig::new(self.time.dt, self.time.t_end);
        c.snapshot_stride = self.time.snapshot_stride;
        c.scheme = self.scheme;
        c
    }

    /// The initial state on the configured grid.
    pub fn initial_state(&self) -> Result<State> {
        let grid = self.grid.build()?;
        build_data(&self.data, grid)
    }
}

/// Builds initial data on a grid.
pub fn build_data(data: &DataSpec, grid: Arc<RadialGrid>) -> Result<State> {
    match data {
        DataSpec::Gaussian { amplitude, width } => Ok(gaussian(grid, *amplitude, *width)),
        DataSpec::ConstantBall { value, radius, smoothing } => Ok(constant_ball(grid, *value, *radius, *smoothing)),
        DataSpec::OdeBlowup { big_t, radius, smoothing } => Ok(ode_blowup_data(grid, *big_t, *radius, *smoothing)),
        DataSpec::TurokSpergel { t0, truncation, smoothing } => turok_spergel_data(grid, *t0, *truncation, *smoothing),
        DataSpec::File { path } => read_state_csv(path, grid),
        DataSpec::Stationary { model, ell } => {
            let s_min = (grid.nodes()[0].ln() - 0.05).min(0.0);
            let profile = stable_manifold(*model, *ell, s_min, ManifoldOptions::default()).map_err(|e| match e {
                WaveLabError::Escape { s, .. } => WaveLabError::Config(format!(
                    "stationary profile is singular towards the origin: it leaves the phase-plane box at r = {:.3e}, above the first grid node",
                    s.exp()
                )),
                other => other,
            })?;
            let u = if *ell == 0.0 { RadialField::zeros(grid.clone()) } else { physical_profile(&profile, &grid)? };
            State::new(0.0, u, RadialField::zeros(grid))
        }
    }
}

/// Reads r,u[,ut] rows written by [`write_state_csv`] onto `grid`.
pub fn read_state_csv(path: &Path, grid: Arc<RadialGrid>) -> Result<State> {
    let file = File::open(path).map_err(|e| WaveLabError::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut u = Vec::with_capacity(grid.n());
    let mut ut = Vec::with_capacity(grid.n());
    for line in BufReader::new(file).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('r') {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| WaveLabError::Config(format!("bad CSV row: {line}"))))
            .collect::<Result<_>>()?;
        if cols.len() < 2 {
            return Err(WaveLabError::Config(format!("CSV row needs r,u[,ut]: {line}")));
        }
        let k = u.len();
        let node =
            *grid.nodes().get(k).ok_or_else(|| WaveLabError::Config("CSV has more rows than grid nodes".into()))?;
        if (cols[0] - node).abs() > 1e-12 * node.max(1.0) {
            return Err(WaveLabError::Config(format!("CSV radius {} does not match grid node {node}", cols[0])));
        }
        u.push(cols[1]);
        ut.push(cols.get(2).copied().unwrap_or(0.0));
    }
    State::new(0.0, RadialField::new(grid.clone(), u)?, RadialField::new(grid, ut)?)
}

/// Writes a state as `r,u,ut` rows after the schema and time lines.
pub fn write_state_csv(path: &Path, state: &State) -> Result<()> {
    let mut w = csv_writer(path, "r,u,ut")?;
    writeln!(w, "# t: {}", state.t)?;
    for ((r, a), b) in state.grid().nodes().iter().zip(state.u.values()).zip(state.ut.values()) {
        writeln!(w, "{r},{a},{b}")?;
    }
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path, header: &str) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_SCHEMA_LINE}")?;
    writeln!(w, "{header}")?;
    Ok(w)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Resolves an output prefix: relative prefixes go under `$WAVELAB_DATA_DIR` when it is set.
pub fn resolve_prefix(prefix: &str) -> PathBuf {
    let p = PathBuf::from(prefix);
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if p.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

/// `<prefix>_<suffix>` as a path.
pub fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push("_");
    s.push(suffix);
    PathBuf::from(s)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |x| x.to_string())
}

/// One row of `<out>_series.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub linf: Option<f64>,
    pub energy: Option<f64>,
    pub critical_norm: Option<f64>,
    pub strichartz_accum: Option<f64>,
    pub tail_c: Option<f64>,
    #[serde(rename = "tail_C")]
    pub tail_big_c: Option<f64>,
    #[serde(rename = "N_est")]
    pub n_est: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub termination: Termination,
    pub series: Vec<SeriesRow>,
    pub files: Vec<PathBuf>,
}

impl EvolveOutcome {
    /// 0 on completion, 2 on detected blow-up or overflow.
    pub fn exit_code(&self) -> u8 {
        match self.termination {
            Termination::Completed => 0,
            Termination::Blowup | Termination::Overflow => 2,
        }
    }
}

/// Evolves the configured data and writes the diagnostic series and snapshots.
pub fn run_evolve(config: &RunConfig, prefix: &Path) -> Result<EvolveOutcome> {
    config.validate()?;
    let state = config.initial_state()?;
    let traj = evolve(&config.model, &state, &config.evolve_config())?;

    let mut series = Vec::with_capacity(traj.snapshots.len());
    let mut accum = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for snap in &traj.snapshots {
        let strich = if config.wants("strichartz_accum") {
            let l10 = lebesgue_norm(&snap.u, 10.0)?;
            let q = l10 * l10;
            if let Some((t0, q0)) = prev {
                accum += 0.5 * (snap.t - t0) * (q + q0);
            }
            prev = Some((snap.t, q));
            Some(accum.sqrt())
        } else {
            None
        };
        let zero = snap.linf() == 0.0;
        let tails = if config.wants("tails") {
            if zero {
                Some((0.0, 0.0, 0.0))
            } else {
                let t = compactness_tails(snap, TAIL_ETA)?;
                Some((t.c, t.big_c, t.n_est))
            }
        } else {
            None
        };
        series.push(SeriesRow {
            t: snap.t,
            linf: config.wants("linf").then(|| snap.linf()),
            energy: if config.wants("energy") { Some(models::energy(&config.model, snap)?) } else { None },
            critical_norm: if config.wants("critical_norm") { Some(critical_norm(snap)?) } else { None },
            strichartz_accum: strich,
            tail_c: tails.map(|t| t.0),
            tail_big_c: tails.map(|t| t.1),
            n_est: tails.map(|t| t.2),
        });
    }

    let mut files = Vec::new();
    let series_path = output_path(prefix, "series.csv");
    let mut w = csv_writer(&series_path, "t,linf,energy,critical_norm,strichartz_accum,tail_c,tail_C,N_est")?;
    for r in &series {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.t,
            fmt_opt(r.linf),
            fmt_opt(r.energy),
            fmt_opt(r.critical_norm),
            fmt_opt(r.strichartz_accum),
            fmt_opt(r.tail_c),
            fmt_opt(r.tail_big_c),
            fmt_opt(r.n_est)
        )?;
    }
    w.flush()?;
    files.push(series_path);
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let p = output_path(prefix, &format!("snap_{i:05}.csv"));
        write_state_csv(&p, snap)?;
        files.push(p);
    }
    let cfg_path = output_path(prefix, "config.json");
    write_json(&cfg_path, config)?;
    files.push(cfg_path);
    Ok(EvolveOutcome { termination: traj.termination, series, files })
}

/// Options of the channels runner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOptions {
    pub r: f64,
    pub ensemble: usize,
    pub seed: u64,
    /// Replace the random ensemble by plane elements (A r⁻³, B r⁻³).
    pub plane: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelsSummary {
    pub seed: u64,
    #[serde(rename = "R")]
    pub r: f64,
    pub members: usize,
    pub c0_min: Option<f64>,
    pub max_ext: f64,
    pub max_orthogonality_defect: f64,
}

/// Random π^⊥ ensemble (or the plane datum) with exact radiation energies.
///
/// An empty ensemble writes the header-only table and returns a configuration error.
pub fn run_channels(opts: &ChannelOptions, prefix: &Path) -> Result<(Vec<ChannelReport>, ChannelsSummary)> {
    let path = output_path(prefix, "channels.csv");
    let header = "seed,R,proj_norm2,perp_norm2,ext_plus,ext_minus,c0_lower";
    if opts.ensemble == 0 {
        csv_writer(&path, header)?.flush()?;
        return Err(WaveLabError::Config("ensemble size must be at least 1".into()));
    }
    if !(opts.r > 0.0 && opts.r.is_finite()) {
        return Err(WaveLabError::Config(format!("R = {} must be positive", opts.r)));
    }
    let reports = if opts.plane {
        let spec = PanelSpec::default();
        (0..opts.ensemble)
            .map(|i| {
                let pair = ExteriorPair::plane(opts.r, 1e3 * opts.r, spec, 1.0 + i as f64, 0.5 * i as f64)?;
                Ok(channel_report(&pair))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        run_ensemble(&EnsembleConfig::new(opts.r, opts.ensemble, opts.seed))?.reports
    };
    write_channels(&path, header, opts.seed, &reports)?;
    let summary = summarize(opts.seed, opts.r, &reports);
    write_json(&output_path(prefix, "channels_summary.json"), &summary)?;
    Ok((reports, summary))
}

/// The probe-route channel report of configured data.
pub fn run_channel_probe(config: &RunConfig, r: f64, t_probe: f64, prefix: &Path) -> Result<ChannelReport> {
    let state = config.initial_state()?;
    let support = data_support(&state);
    let rep = channel_experiment(&state, r, t_probe, support)?;
    let path = output_path(prefix, "channels.csv");
    write_channels(&path, "seed,R,proj_norm2,perp_norm2,ext_plus,ext_minus,c0_lower", config.seed, &[rep])?;
    write_json(&output_path(prefix, "channels_summary.json"), &summarize(config.seed, r, &[rep]))?;
    Ok(rep)
}

/// Largest node where the data exceed 1e-12 of their maximum.
fn data_support(state: &State) -> f64 {
    let peak = state.linf().max(state.ut.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let nodes = state.grid().nodes();
    nodes
        .iter()
        .zip(state.u.values().iter().zip(state.ut.values()))
        .filter(|(_, (a, b))| a.abs().max(b.abs()) > 1e-12 * peak)
        .map(|(r, _)| *r)
        .fold(0.0, f64::max)
}

fn write_channels(path: &Path, header: &str, seed: u64, reports: &[ChannelReport]) -> Result<()> {
    let mut w = csv_writer(path, header)?;
    for r in reports {
        writeln!(
            w,
            "{seed},{},{},{},{},{},{}",
            r.r,
            r.proj_norm2,
            r.perp_norm2,
            r.ext_plus,
            r.ext_minus,
            fmt_opt(r.c0_lower)
        )?;
    }
    let s = summarize(seed, reports[0].r, reports);
    writeln!(
        w,
        "# summary: members={} c0_min={} max_ext={} max_orthogonality_defect={}",
        s.members,
        fmt_opt(s.c0_min),
        s.max_ext,
        s.max_orthogonality_defect
    )?;
    w.flush()?;
    Ok(())
}

fn summarize(seed: u64, r: f64, reports: &[ChannelReport]) -> ChannelsSummary {
    let c0 = reports.iter().filter_map(|x| x.c0_lower).fold(f64::INFINITY, f64::min);
    ChannelsSummary {
        seed,
        r,
        members: reports.len(),
        c0_min: c0.is_finite().then_some(c0),
        max_ext: reports.iter().map(|x| x.ext_plus.max(x.ext_minus)).fold(0.0, f64::max),
        max_orthogonality_defect: reports.iter().map(|x| x.orthogonality_defect).fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySummary {
    pub model: AutonomousModel,
    pub ell: f64,
    pub s_min: f64,
    pub s_max: f64,
    /// Far-field log-log slope of |r³φ_ℓ − ℓ|; None for ℓ = 0.
    pub slope: Option<f64>,
    pub slope_ok: bool,
}

/// Stationary profile on 400 log-spaced radii plus a phase-portrait table.
pub fn run_stationary(model: AutonomousModel, ell: f64, s_min: f64, prefix: &Path) -> Result<StationarySummary> {
    let profile = stable_manifold(model, ell, s_min, ManifoldOptions::default())?;
    let (lo, hi) = (profile.s_min.exp(), profile.s_max.exp().clamp(1.0, 1e3));
    let n = 400;
    let radii: Vec<f64> = (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect();
    let samples = sample_profile(&profile, &radii)?;
    let mut w = csv_writer(&output_path(prefix, "profile.csv"), "r,phi,w,r3phi")?;
    for (r, phi) in radii.iter().zip(&samples) {
        let u = phi / r;
        writeln!(w, "{r},{phi},{u},{}", r.powi(3) * u - ell)?;
    }
    let slope = if ell == 0.0 || profile.s_max < SLOPE_WINDOW.1.ln() {
        None
    } else {
        Some(far_field_slope(&profile, SLOPE_WINDOW)?)
    };
    let slope_ok = slope.is_some_and(|s| (s + 4.0).abs() < 0.1);
    writeln!(
        w,
        "# slope_check: window=[{},{}] slope={} target=-4 ok={slope_ok}",
        SLOPE_WINDOW.0,
        SLOPE_WINDOW.1,
        fmt_opt(slope)
    )?;
    w.flush()?;

    let mut p = csv_writer(&output_path(prefix, "phase.csv"), "x,y,dx,dy")?;
    for [x, y, dx, dy] in phase_portrait(model, (-3.0, 3.0), (-3.0, 3.0), 25, 25) {
        writeln!(p, "{x},{y},{dx},{dy}")?;
    }
    p.flush()?;
    let summary = StationarySummary { model, ell, s_min: profile.s_min, s_max: profile.s_max, slope, slope_ok };
    write_json(&output_path(prefix, "profile_summary.json"), &summary)?;
    Ok(summary)
}

fn sample_profile(profile: &ManifoldProfile, radii: &[f64]) -> Result<Vec<f64>> {
    if profile.ell == 0.0 {
        return Ok(vec![0.0; radii.len()]);
    }
    let s: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    Ok(profile.sample(&s)?.iter().map(|v| v[0]).collect())
}

/// Options of the self-similar runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfSimilarOptions {
    pub amplitude: f64,
    pub radius: f64,
    pub degree: usize,
    pub s_end: f64,
    pub ds: f64,
    pub stride: usize,
    pub eps: f64,
    pub a_range: (f64, f64),
    pub a_count: usize,
}

impl Default for SelfSimilarOptions {
    fn default() -> Self {
        Self {
            amplitude: 0.01,
            radius: 0.5,
            degree: 128,
            s_end: 0.25,
            ds: 2.5e-5,
            stride: 400,
            eps: crate::selfsimilar::DEFAULT_EPS,
            a_range: (0.0, 3.0),
            a_count: 31,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfSimilarSummary {
    pub max_mismatch: f64,
    pub nondecreasing: bool,
    pub min_increment: f64,
    pub min_defect: f64,
}

/// Perturbed-equilibrium w-evolution with its energy table, plus a shooting scan.
pub fn run_selfsimilar(model: &ModelSpec, opts: &SelfSimilarOptions, prefix: &Path) -> Result<SelfSimilarSummary> {
    if opts.degree < 4 || opts.degree % 2 != 0 {
        return Err(WaveLabError::Config(format!("Chebyshev degree {} must be even and at least 4", opts.degree)));
    }
    if opts.a_count < 2 || opts.stride == 0 {
        return Err(WaveLabError::Config("a_count must be at least 2 and stride at least 1".into()));
    }
    let cheb = Arc::new(EvenCheb::new(opts.degree));
    let start = perturbed_equilibrium(cheb.clone(), opts.amplitude, opts.radius);
    let frames = WFlow::new(*model, cheb).evolve(&start, opts.s_end, opts.ds, opts.stride)?;
    let table = monotonicity_check(model, &frames, opts.eps)?;
    let mut w = csv_writer(&output_path(prefix, "selfsimilar.csv"), "s,E,dEds_lhs,dEds_rhs")?;
    for r in &table.rows {
        writeln!(w, "{},{},{},{}", r.s, r.energy, r.lhs, r.rhs)?;
    }
    writeln!(w, "# max_mismatch={} nondecreasing={}", table.max_mismatch, table.nondecreasing)?;
    w.flush()?;

    let (a0, a1) = opts.a_range;
    let a: Vec<f64> = (0..opts.a_count).map(|i| a0 + (a1 - a0) * i as f64 / (opts.a_count - 1) as f64).collect();
    let rows = shoot_scan(model, &a, opts.eps)?;
    let mut s = csv_writer(&output_path(prefix, "shoot.csv"), "a,eps,w_end,wprime_end,defect")?;
    for r in &rows {
        writeln!(s, "{},{},{},{},{}", r.a, r.eps, r.w_end, r.wprime_end, r.defect)?;
    }
    s.flush()?;
    // The trivial shot a = 0 is excluded from the minimum.
    let min_defect = rows.iter().filter(|r| r.a != 0.0).map(|r| r.defect).fold(f64::INFINITY, f64::min);
    let summary = SelfSimilarSummary {
        max_mismatch: table.max_mismatch,
        nondecreasing: table.nondecreasing,
        min_increment: table.min_increment,
        min_defect,
    };
    write_json(&output_path(prefix, "selfsimilar_summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSummary {
    #[serde(rename = "L")]
    pub l: f64,
    pub bands: Vec<i32>,
    /// Constant fitted on the k = 0 sweep.
    pub c_l: f64,
    /// max(|K_k|/bound − 1, 0) over every band.
    pub max_violation: f64,
}

/// Relative slack below which |K_k| − bound is attributed to rounding.
const KERNEL_SLACK: f64 = 1e-9;

/// Kernel samples for the bands between 0 and `k` against the bound with C_L fitted at k = 0.
pub fn run_kernel(k: i32, l: f64, prefix: &Path) -> Result<KernelSummary> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(WaveLabError::Config(format!("decay order L = {l} must be nonnegative")));
    }
    let c_l = fit_kernel_constant(l)?;
    let bands: Vec<i32> = if k >= 0 { (0..=k).collect() } else { (k..=0).collect() };
    let mut w = csv_writer(&output_path(prefix, "kernel.csv"), "k,lag,dist,value,bound")?;
    let mut worst = 0.0f64;
    for &b in &bands {
        for s in kernel_samples(b, c_l, l)? {
            writeln!(w, "{},{},{},{},{}", s.k, s.lag, s.dist, s.value, s.bound)?;
            if s.bound > 0.0 {
                worst = worst.max(s.value / s.bound - 1.0);
            }
        }
    }
    w.flush()?;
    let max_violation = if worst > KERNEL_SLACK { worst } else { 0.0 };
    let summary = KernelSummary { l, bands, c_l, max_violation };
    write_json(&output_path(prefix, "kernel.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormsReport {
    pub critical_norm: f64,
    pub energy: f64,
    pub hdot_3_2_u: f64,
    pub hdot_1_2_ut: f64,
    pub l10_u: f64,
    pub linf: f64,
    /// None for the zero state.
    pub modulation_scale: Option<f64>,
}

/// Norms of the configured initial data.
pub fn run_norms(config: &RunConfig, prefix: &Path) -> Result<NormsReport> {
    let s = config.initial_state()?;
    let rep = NormsReport {
        critical_norm: critical_norm(&s)?,
        energy: models::energy(&config.model, &s)?,
        hdot_3_2_u: sobolev_norm(&s.u, 1.5)?,
        hdot_1_2_ut: sobolev_norm(&s.ut, 0.5)?,
        l10_u: lebesgue_norm(&s.u, 10.0)?,
        linf: s.linf(),
        modulation_scale: if s.linf() == 0.0 && s.ut.values().iter().all(|&v| v == 0.0) {
            None
        } else {
            Some(modulation_scale(&s)?)
        },
    };
    write_json(&output_path(prefix, "norms.json"), &rep)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig::from_json(
            r#"{"model": {"kind": "cubic_focusing"}, "grid": {"n": 64, "r_max": 20.0},
                "time": {"dt": 0.01, "t_end": 0.05, "snapshot_stride": 1},
                "data": {"kind": "gaussian", "amplitude": 0.0, "width": 1.0}}"#,
        )
        .unwrap()
    }

    #[test]
    fn config_round_trips() {
        let c = sample();
        let back = RunConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.diagnostics.len(), DIAGNOSTICS.len());
    }

    #[test]
    fn unknown_diagnostic_is_rejected() {
        let mut c = sample();
        c.diagnostics.push("vorticity".into());
        assert!(matches!(c.validate(), Err(WaveLabError::Config(_))));
        assert!(RunConfig::from_json(r#"{"model": {"kind": "free"}}"#).is_err());
    }

    #[test]
    fn output_paths_append_suffix() {
        assert_eq!(output_path(Path::new("a/b"), "series.csv"), PathBuf::from("a/b_series.csv"));
    }

    #[test]
    fn state_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let g = RadialGrid::new(32, 10.0).unwrap();
        let s = gaussian(g.clone(), 0.3, 1.2);
        let p = dir.path().join("s.csv");
        write_state_csv(&p, &s).unwrap();
        let back = read_state_csv(&p, g).unwrap();
        assert_eq!(back.u.values(), s.u.values());
        assert_eq!(back.ut.values(), s.ut.values());
    }
}
