//! Command-line frontend: JSON config ingestion with unit-suffixed keys,
//! subcommand dispatch, CSV/SVG emission, and a `run_meta.json` sidecar
//! that captures everything needed to reproduce a run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dispersion::{self, DopplerArg, RootOutcome, SolverSettings};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::greens::{self, Environment, FieldGrid, SommerfeldSettings};
use crate::material::{doppler_conductivity, GrapheneParams, SIGMA_MIN};
use crate::pipeline::{self, SweepSettings};
use crate::report::{self, DispersionRow};
use crate::units::Frequency;

pub const TOOL_NAME: &str = "plasmon-entangle";
pub const GIT_DESCRIBE: &str = env!("GIT_DESCRIBE");

#[derive(Parser, Debug)]
#[command(name = TOOL_NAME, version, about = "Graphene-plasmon-mediated two-qubit entanglement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DopplerArgFlag {
    Re,
    Complex,
}

impl From<DopplerArgFlag> for DopplerArg {
    fn from(v: DopplerArgFlag) -> Self {
        match v {
            DopplerArgFlag::Re => DopplerArg::RealPart,
            DopplerArgFlag::Complex => DopplerArg::Complex,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// JSON config file with unit-suffixed keys.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 = all hardware threads.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Override the drift velocity (units of v_F) of the graphene sheet.
    #[arg(long, allow_negative_numbers = true)]
    pub vd_over_vf: Option<f64>,
    /// Override the operating frequency (THz).
    #[arg(long)]
    pub frequency_thz: Option<f64>,
    /// Wavenumber entering the Doppler shift during complex root finding.
    #[arg(long, value_enum, default_value = "re")]
    pub doppler_arg: DopplerArgFlag,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Local and drift-shifted graphene conductivity over an (f, q_x) grid.
    Conductivity(CommonArgs),
    /// SPP dispersion curves and equi-frequency contours.
    Dispersion(CommonArgs),
    /// Classical E_z map of a vertical dipole over the sheet.
    Fieldmap(CommonArgs),
    /// Concurrence sweeps: angle, distance, transient, drive scan.
    Entangle(CommonArgs),
}

// --- config schemas ------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapheneConfig {
    pub mu_c_ev: f64,
    pub tau_ps: f64,
    pub vd_over_vf: f64,
}

impl GrapheneConfig {
    fn build(&self) -> Result<GrapheneParams> {
        GrapheneParams::new(self.mu_c_ev, self.tau_ps, self.vd_over_vf)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub eps_r1: f64,
    pub eps_r2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphene: Option<GrapheneConfig>,
}

impl EnvironmentConfig {
    fn build(&self) -> Result<Environment> {
        match &self.graphene {
            Some(g) => Environment::with_sheet(self.eps_r1, self.eps_r2, g.build()?),
            None => Environment::dielectric(self.eps_r1, self.eps_r2),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default = "default_rel_tol")]
    pub quadrature_rel_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub angular_rel_tol: f64,
    #[serde(default = "default_step_tol")]
    pub root_step_tol: f64,
}

fn default_rel_tol() -> f64 {
    1e-8
}

fn default_step_tol() -> f64 {
    1e-12
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            quadrature_rel_tol: default_rel_tol(),
            angular_rel_tol: default_rel_tol(),
            root_step_tol: default_step_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductivityConfig {
    pub graphene: GrapheneConfig,
    pub frequency_thz_min: f64,
    pub frequency_thz_max: f64,
    pub n_frequency: usize,
    pub qx_per_m_min: f64,
    pub qx_per_m_max: f64,
    pub n_qx: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfcConfig {
    pub frequency_thz: f64,
    pub n_phi: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub environment: EnvironmentConfig,
    pub frequency_thz_min: f64,
    pub frequency_thz_max: f64,
    pub n_frequency: usize,
    /// Propagation directions to sweep (degrees from +x).
    pub phi_deg: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efc: Option<EfcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGridConfig {
    pub x_min_lambda: f64,
    pub x_max_lambda: f64,
    pub nx: usize,
    pub y_min_lambda: f64,
    pub y_max_lambda: f64,
    pub ny: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldmapConfig {
    pub environment: EnvironmentConfig,
    pub frequency_thz: f64,
    /// Source and observation height in units of the case wavelength.
    pub z_over_lambda: f64,
    pub grid: FieldGridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Angle,
    Distance,
    Transient,
    DriveScan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleConfig {
    pub sweep: SweepKind,
    pub environment: EnvironmentConfig,
    pub frequency_thz: f64,
    pub z_over_lambda: f64,
    /// Qubit separation in units of the case wavelength (angle, transient
    /// and drive sweeps).
    #[serde(default = "default_rho_over_lambda")]
    pub rho_over_lambda: f64,
    /// Fixed observation angle; omitted = use the angle-sweep argmax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    // angle sweep grid
    #[serde(default = "default_theta_min")]
    pub theta_deg_min: f64,
    #[serde(default = "default_theta_max")]
    pub theta_deg_max: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    // distance sweep grid
    #[serde(default = "default_rho_min")]
    pub rho_over_lambda_min: f64,
    #[serde(default = "default_rho_max")]
    pub rho_over_lambda_max: f64,
    #[serde(default = "default_n_rho")]
    pub n_rho: usize,
    // transient grid
    #[serde(default = "default_t_max")]
    pub t_max_gamma11: f64,
    #[serde(default = "default_n_time")]
    pub n_time: usize,
    // drive scan grid
    #[serde(default = "default_omega1_min")]
    pub omega1_gamma11_min: f64,
    #[serde(default = "default_omega1_max")]
    pub omega1_gamma11_max: f64,
    #[serde(default = "default_n_omega1")]
    pub n_omega1: usize,
    /// Peak-search horizon for max_t C, units of 1/Γ11.
    #[serde(default = "default_t_max")]
    pub time_horizon_gamma11: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

fn default_rho_over_lambda() -> f64 {
    2.0
}
fn default_theta_min() -> f64 {
    0.0
}
fn default_theta_max() -> f64 {
    180.0
}
fn default_n_theta() -> usize {
    19
}
fn default_rho_min() -> f64 {
    0.25
}
fn default_rho_max() -> f64 {
    4.0
}
fn default_n_rho() -> usize {
    16
}
fn default_t_max() -> f64 {
    20.0
}
fn default_n_time() -> usize {
    200
}
fn default_omega1_min() -> f64 {
    0.05
}
fn default_omega1_max() -> f64 {
    2.0
}
fn default_n_omega1() -> usize {
    15
}

// --- run metadata ---------------------------------------------------------

#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    tool: &'static str,
    version: &'static str,
    git_describe: &'static str,
    command: &'a str,
    threads: usize,
    doppler_arg: &'a str,
    /// Fully resolved config after CLI overrides; feeding this back through
    /// `--config` reproduces the CSV outputs byte for byte.
    resolved_config: serde_json::Value,
    resolved_case: Option<serde_json::Value>,
    tolerances: ToleranceConfig,
    outputs: Vec<String>,
    wall_time_s: f64,
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("empty grid requested".to_string()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!(
            "grid bounds must be increasing, got [{lo}, {hi}]"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn apply_overrides_env(env: &mut EnvironmentConfig, args: &CommonArgs) -> Result<()> {
    if let Some(vd) = args.vd_over_vf {
        match env.graphene.as_mut() {
            Some(g) => g.vd_over_vf = vd,
            None => {
                return Err(Error::Config {
                    path: "environment.graphene".to_string(),
                    msg: "--vd-over-vf given but the config has no graphene sheet".to_string(),
                })
            }
        }
    }
    Ok(())
}

fn settings_from(tol: &ToleranceConfig, doppler: DopplerArg) -> SweepSettings {
    SweepSettings {
        sommerfeld: SommerfeldSettings {
            rel_tol: tol.quadrature_rel_tol,
            phi_rel_tol: tol.angular_rel_tol,
            ..SommerfeldSettings::default()
        },
        solver: SolverSettings {
            doppler_arg: doppler,
            step_tol: tol.root_step_tol,
            ..SolverSettings::default()
        },
        ..SweepSettings::default()
    }
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // ignore the error when a pool already exists (tests call run() twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn write_meta(
    out_dir: &Path,
    command: &str,
    args: &CommonArgs,
    resolved_config: serde_json::Value,
    resolved_case: Option<serde_json::Value>,
    tolerances: ToleranceConfig,
    outputs: &[PathBuf],
    started: Instant,
) -> Result<()> {
    let meta = RunMeta {
        tool: TOOL_NAME,
        version: env!("CARGO_PKG_VERSION"),
        git_describe: GIT_DESCRIBE,
        command,
        threads: args.threads,
        doppler_arg: match args.doppler_arg {
            DopplerArgFlag::Re => "re",
            DopplerArgFlag::Complex => "complex",
        },
        resolved_config,
        resolved_case,
        tolerances,
        outputs: outputs
            .iter()
            .map(|p| {
                p.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned()
            })
            .collect(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    fs::write(
        out_dir.join("run_meta.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(())
}

// --- subcommands -----------------------------------------------------------

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Conductivity(args) => cmd_conductivity(&args),
        Command::Dispersion(args) => cmd_dispersion(&args),
        Command::Fieldmap(args) => cmd_fieldmap(&args),
        Command::Entangle(args) => cmd_entangle(&args),
    }
}

/// σ_d/σ_min over an (f, q_x) grid.
pub fn cmd_conductivity(args: &CommonArgs) -> Result<()> {
    let started = Instant::now();
    init_threads(args.threads);
    let mut cfg: ConductivityConfig = load_config(&args.config)?;
    if let Some(vd) = args.vd_over_vf {
        cfg.graphene.vd_over_vf = vd;
    }
    if let Some(f) = args.frequency_thz {
        cfg.frequency_thz_min = f;
        cfg.frequency_thz_max = f;
        cfg.n_frequency = 1;
    }
    let sheet = cfg.graphene.build()?;
    let freqs = linspace(
        cfg.frequency_thz_min,
        cfg.frequency_thz_max,
        cfg.n_frequency,
    )?;
    let qxs = linspace(cfg.qx_per_m_min, cfg.qx_per_m_max, cfg.n_qx)?;

    let mut rows = Vec::with_capacity(freqs.len() * qxs.len());
    for &f in &freqs {
        let omega = Frequency::from_thz(f)?;
        for &qx in &qxs {
            let sigma = doppler_conductivity(omega, qx, &sheet)?.sigma / SIGMA_MIN;
            rows.push((f, qx, sigma));
        }
    }
    fs::create_dir_all(&args.out)?;
    let csv = args.out.join("conductivity.csv");
    report::write_conductivity_csv(&csv, &rows)?;

    // quick-look: Im σ_d/σ_min against q_x at the highest frequency
    let svg = args.out.join("conductivity.svg");
    let last_f = *freqs.last().expect("nonempty");
    let series: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(f, _, _)| *f == last_f)
        .map(|(_, qx, s)| (*qx, s.im))
        .collect();
    report::write_line_plot_svg(
        &svg,
        &format!("Im sigma_d / sigma_min at {last_f} THz"),
        "q_x (1/m)",
        "Im sigma_d / sigma_min",
        &series,
    )?;

    write_meta(
        &args.out,
        "conductivity",
        args,
        serde_json::to_value(&cfg)?,
        None,
        ToleranceConfig::default(),
        &[csv, svg],
        started,
    )
}

/// Dispersion curves per direction plus an optional equi-frequency contour.
pub fn cmd_dispersion(args: &CommonArgs) -> Result<()> {
    let started = Instant::now();
    init_threads(args.threads);
    let mut cfg: DispersionConfig = load_config(&args.config)?;
    apply_overrides_env(&mut cfg.environment, args)?;
    if cfg.environment.graphene.is_none() {
        return Err(Error::Config {
            path: "environment.graphene".to_string(),
            msg: "dispersion requires a graphene sheet".to_string(),
        });
    }
    if let Some(f) = args.frequency_thz {
        if let Some(efc) = cfg.efc.as_mut() {
            efc.frequency_thz = f;
        }
    }
    let tol = cfg.tolerances.clone().unwrap_or_default();
    let solver = SolverSettings {
        doppler_arg: args.doppler_arg.into(),
        step_tol: tol.root_step_tol,
        ..SolverSettings::default()
    };
    let env = cfg.environment.build()?;
    let lo = Frequency::from_thz(cfg.frequency_thz_min)?;
    let hi = Frequency::from_thz(cfg.frequency_thz_max)?;

    fs::create_dir_all(&args.out)?;
    let mut outputs = Vec::new();
    let mut rows: Vec<DispersionRow> = Vec::new();
    for &phi_deg in &cfg.phi_deg {
        let curve = dispersion::dispersion_curve(
            phi_deg.to_radians(),
            &env,
            lo,
            hi,
            cfg.n_frequency,
            &solver,
        )?;
        let mut series = Vec::new();
        for (f, outcome) in &curve {
            match outcome {
                RootOutcome::Converged(root) => {
                    rows.push(DispersionRow {
                        f_thz: f.thz(),
                        phi_deg,
                        q: Some(root.q),
                        residual: Some(root.residual),
                        status: outcome.status_str(),
                    });
                    series.push((f.thz(), root.q.re));
                }
                _ => rows.push(DispersionRow {
                    f_thz: f.thz(),
                    phi_deg,
                    q: None,
                    residual: None,
                    status: outcome.status_str(),
                }),
            }
        }
        let svg = args.out.join(format!("dispersion_phi{phi_deg:.0}.svg"));
        report::write_line_plot_svg(
            &svg,
            &format!("TM SPP dispersion, phi = {phi_deg:.0} deg"),
            "f (THz)",
            "Re q (1/m)",
            &series,
        )?;
        outputs.push(svg);
    }
    let csv = args.out.join("dispersion.csv");
    report::write_dispersion_csv(&csv, &rows)?;
    outputs.insert(0, csv);

    if let Some(efc_cfg) = &cfg.efc {
        let omega = Frequency::from_thz(efc_cfg.frequency_thz)?;
        let contour = dispersion::efc(omega, &env, efc_cfg.n_phi, &solver)?;
        let mut efc_rows = Vec::new();
        for (phi, outcome) in &contour.points {
            match outcome {
                RootOutcome::Converged(root) => efc_rows.push(DispersionRow {
                    f_thz: efc_cfg.frequency_thz,
                    phi_deg: phi.to_degrees(),
                    q: Some(root.q),
                    residual: Some(root.residual),
                    status: outcome.status_str(),
                }),
                _ => efc_rows.push(DispersionRow {
                    f_thz: efc_cfg.frequency_thz,
                    phi_deg: phi.to_degrees(),
                    q: None,
                    residual: None,
                    status: outcome.status_str(),
                }),
            }
        }
        let efc_csv = args.out.join("efc.csv");
        report::write_dispersion_csv(&efc_csv, &efc_rows)?;
        outputs.push(efc_csv);
    }

    write_meta(
        &args.out,
        "dispersion",
        args,
        serde_json::to_value(&cfg)?,
        None,
        tol,
        &outputs,
        started,
    )
}

/// E_z map of a vertical dipole at the origin.
pub fn cmd_fieldmap(args: &CommonArgs) -> Result<()> {
    let started = Instant::now();
    init_threads(args.threads);
    let mut cfg: FieldmapConfig = load_config(&args.config)?;
    apply_overrides_env(&mut cfg.environment, args)?;
    if let Some(f) = args.frequency_thz {
        cfg.frequency_thz = f;
    }
    let tol = cfg.tolerances.clone().unwrap_or_default();
    let settings = settings_from(&tol, args.doppler_arg.into());
    let env = cfg.environment.build()?;
    let omega = Frequency::from_thz(cfg.frequency_thz)?;
    let (lambda, kind) = pipeline::normalization_wavelength(omega, &env, &settings.solver)?;
    let z = cfg.z_over_lambda * lambda;
    let grid = FieldGrid {
        x_min: cfg.grid.x_min_lambda * lambda,
        x_max: cfg.grid.x_max_lambda * lambda,
        nx: cfg.grid.nx,
        y_min: cfg.grid.y_min_lambda * lambda,
        y_max: cfg.grid.y_max_lambda * lambda,
        ny: cfg.grid.ny,
        z,
    };
    let map = greens::field_map(omega, &env, [0.0, 0.0, z], &grid, &settings.sommerfeld)?;

    fs::create_dir_all(&args.out)?;
    let csv = args.out.join("fieldmap.csv");
    report::write_field_map_csv(&csv, &map)?;
    let svg = args.out.join("fieldmap.svg");
    report::write_heatmap_svg(
        &svg,
        &format!(
            "|E_z| at {} THz, z = z' = {:.3} lambda",
            cfg.frequency_thz, cfg.z_over_lambda
        ),
        &map,
    )?;

    let resolved = serde_json::json!({
        "lambda_m": lambda,
        "lambda_kind": kind,
        "z_m": z,
    });
    write_meta(
        &args.out,
        "fieldmap",
        args,
        serde_json::to_value(&cfg)?,
        Some(resolved),
        tol,
        &[csv, svg],
        started,
    )
}

/// Concurrence sweeps.
pub fn cmd_entangle(args: &CommonArgs) -> Result<()> {
    let started = Instant::now();
    init_threads(args.threads);
    let mut cfg: EntangleConfig = load_config(&args.config)?;
    apply_overrides_env(&mut cfg.environment, args)?;
    if let Some(f) = args.frequency_thz {
        cfg.frequency_thz = f;
    }
    let tol = cfg.tolerances.clone().unwrap_or_default();
    let mut settings = settings_from(&tol, args.doppler_arg.into());
    settings.time_horizon = cfg.time_horizon_gamma11;
    let env = cfg.environment.build()?;
    let omega = Frequency::from_thz(cfg.frequency_thz)?;

    let (sweep_column, output) = match cfg.sweep {
        SweepKind::Angle => {
            let thetas = linspace(cfg.theta_deg_min, cfg.theta_deg_max, cfg.n_theta)?;
            (
                "theta_deg",
                pipeline::sweep_angle(
                    &env,
                    omega,
                    cfg.z_over_lambda,
                    cfg.rho_over_lambda,
                    &thetas,
                    &settings,
                )?,
            )
        }
        SweepKind::Distance => {
            let rhos = linspace(cfg.rho_over_lambda_min, cfg.rho_over_lambda_max, cfg.n_rho)?;
            (
                "rho_over_lambda",
                pipeline::sweep_distance(
                    &env,
                    omega,
                    cfg.z_over_lambda,
                    &rhos,
                    cfg.theta_deg,
                    &settings,
                )?,
            )
        }
        SweepKind::Transient => {
            let t_grid = linspace(0.0, cfg.t_max_gamma11, cfg.n_time)?;
            (
                "t_gamma11",
                pipeline::run_transient(
                    &env,
                    omega,
                    cfg.z_over_lambda,
                    cfg.rho_over_lambda,
                    cfg.theta_deg,
                    &t_grid,
                    &settings,
                )?,
            )
        }
        SweepKind::DriveScan => {
            let drives = linspace(cfg.omega1_gamma11_min, cfg.omega1_gamma11_max, cfg.n_omega1)?;
            (
                "omega1_gamma11",
                pipeline::drive_scan(
                    &env,
                    omega,
                    cfg.z_over_lambda,
                    cfg.rho_over_lambda,
                    cfg.theta_deg,
                    &drives,
                    &settings,
                )?,
            )
        }
    };

    fs::create_dir_all(&args.out)?;
    let mut outputs = Vec::new();
    let csv = args.out.join("sweep.csv");
    report::write_sweep_csv(&csv, sweep_column, &output.rows)?;
    outputs.push(csv);

    if let Some(trajectory) = &output.trajectory {
        let concurrences: Vec<f64> = trajectory
            .iter()
            .map(|(_, state)| concurrence(state).map(|c| c.value()))
            .collect::<Result<_>>()?;
        let traj_csv = args.out.join("trajectory.csv");
        report::write_trajectory_csv(&traj_csv, trajectory, &concurrences)?;
        outputs.push(traj_csv);
    }

    let svg = args.out.join("sweep.svg");
    let series: Vec<(f64, f64)> = output
        .rows
        .iter()
        .map(|r| (r.sweep_value, r.concurrence))
        .collect();
    report::write_line_plot_svg(
        &svg,
        &format!("concurrence vs {sweep_column}"),
        sweep_column,
        "concurrence",
        &series,
    )?;
    outputs.push(svg);

    write_meta(
        &args.out,
        "entangle",
        args,
        serde_json::to_value(&cfg)?,
        Some(serde_json::to_value(&output.resolved)?),
        tol,
        &outputs,
        started,
    )
}
