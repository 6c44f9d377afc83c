//! Experiment drivers: resolve the per-case normalization wavelength, place
//! the emitters, extract coupling rates, evolve the master equation, and
//! report concurrence across angle, distance, transient-time, and drive
//! sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::{self, SolverSettings};
use crate::dynamics::{
    build_liouvillian, evolve, evolve_to, initial_state, steady_state, DensityMatrix,
    DynamicsParams,
};
use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::greens::{
    DipoleScale, EmitterGeometry, Environment, SommerfeldContext, SommerfeldSettings,
};
use crate::units::Frequency;

/// Numerical controls for a sweep run. The defaults pin every tolerance
/// used by the shipped experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub sommerfeld: SommerfeldSettings,
    pub solver: SolverSettings,
    /// Transient search horizon in units of 1/Γ11.
    pub time_horizon: f64,
    /// Uniform grid size for locating the concurrence peak.
    pub time_grid_points: usize,
    /// Relative golden-section refinement tolerance on the peak time.
    pub peak_refine_tol: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            sommerfeld: SommerfeldSettings::default(),
            solver: SolverSettings::default(),
            time_horizon: 20.0,
            time_grid_points: 400,
            peak_refine_tol: 1e-4,
        }
    }
}

/// How the case's normalization wavelength was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WavelengthKind {
    /// In-medium wavelength c/(f √ε_r2); plain c/f for ε_r2 = 1.
    Medium,
    /// 2π/Re q of the reciprocal SPP root.
    SppReciprocal,
    /// 2π/Re q of the SPP root along the drift direction.
    SppAlongDrift,
}

/// Normalization wavelength for an environment: the in-medium wavelength
/// without a sheet, otherwise the SPP wavelength (along the drift for a
/// biased sheet, where the mode survives).
pub fn normalization_wavelength(
    omega: Frequency,
    env: &Environment,
    solver: &SolverSettings,
) -> Result<(f64, WavelengthKind)> {
    match env.sheet() {
        None => Ok((
            omega.vacuum_wavelength() / env.eps_r2().sqrt(),
            WavelengthKind::Medium,
        )),
        Some(sheet) => {
            let (phi, kind) = if sheet.v_d() == 0.0 {
                (0.0, WavelengthKind::SppReciprocal)
            } else if sheet.v_d() < 0.0 {
                (std::f64::consts::PI, WavelengthKind::SppAlongDrift)
            } else {
                (0.0, WavelengthKind::SppAlongDrift)
            };
            let root = dispersion::solve_spp(phi, omega, env, None, solver)?;
            Ok((root.wavelength(), kind))
        }
    }
}

/// One sweep point: normalized couplings and the concurrence observable.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    /// Swept variable: theta (deg), rho/λ, t·Γ11, or Ω1/Γ11.
    pub sweep_value: f64,
    pub gamma12: f64,
    pub gamma21: f64,
    pub g12: f64,
    pub g21: f64,
    pub concurrence: f64,
}

/// Resolved geometry and search results that the caller needs to reproduce
/// the run.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCase {
    pub lambda_m: f64,
    pub lambda_kind: WavelengthKind,
    pub z_m: f64,
    pub z_over_lambda: f64,
    pub rho_m: Option<f64>,
    pub rho_over_lambda: Option<f64>,
    pub theta_deg: Option<f64>,
    /// Location of the sweep maximum, when the sweep defines one.
    pub argmax: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub resolved: ResolvedCase,
    /// Full trajectory states for transient runs.
    pub trajectory: Option<Vec<(f64, DensityMatrix)>>,
}

/// Couplings and peak transient concurrence at a single geometry point.
#[derive(Debug, Clone, Copy)]
pub struct PointConcurrence {
    pub params: DynamicsParams,
    pub max_concurrence: f64,
    pub t_peak: f64,
}

/// Normalized coupling rates for qubit 2 placed at (rho, theta) relative
/// to qubit 1, both at height z.
fn couplings_at(
    ctx: &SommerfeldContext,
    rho: f64,
    theta_deg: f64,
    z: f64,
) -> Result<DynamicsParams> {
    let geom = EmitterGeometry::pair_at_angle(rho, theta_deg.to_radians(), z)?;
    let m = ctx.coupling_coefficients(&geom, DipoleScale::Normalized)?;
    Ok(DynamicsParams::from_coupling(&m))
}

/// Maximum of C(t) over [0, horizon]: coarse uniform grid, then
/// golden-section refinement inside the bracketing interval.
pub fn max_concurrence_over_time(
    params: &DynamicsParams,
    settings: &SweepSettings,
) -> Result<(f64, f64)> {
    let l = build_liouvillian(params);
    let rho0 = initial_state();
    let n = settings.time_grid_points.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| settings.time_horizon * i as f64 / (n - 1) as f64)
        .collect();
    let traj = evolve(&rho0, &l, &grid)?;
    let mut best = (0usize, f64::MIN);
    for (i, state) in traj.iter().enumerate() {
        let c = concurrence(state)?.value();
        if c > best.1 {
            best = (i, c);
        }
    }

    let eval = |t: f64| -> Result<f64> {
        let state = evolve_to(&rho0, &l, t)?;
        Ok(concurrence(&state)?.value())
    };

    let mut a = grid[best.0.saturating_sub(1)];
    let mut b = grid[(best.0 + 1).min(n - 1)];
    if b <= a {
        return Ok((best.1, grid[best.0]));
    }
    // golden-section maximization
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let tol = settings.peak_refine_tol;
    while (b - a) > tol * (0.5 * (a + b)).max(1e-3 * settings.time_horizon) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        }
    }
    let (c_ref, t_ref) = if f1 > f2 { (f1, x1) } else { (f2, x2) };
    if c_ref > best.1 {
        Ok((c_ref, t_ref))
    } else {
        Ok((best.1, grid[best.0]))
    }
}

/// Couplings plus peak transient concurrence with no drive, for qubit 2 at
/// (rho/λ, theta) and equal heights z/λ.
pub fn point_concurrence(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda: f64,
    theta_deg: f64,
    settings: &SweepSettings,
) -> Result<PointConcurrence> {
    let (lambda, _) = normalization_wavelength(omega, env, &settings.solver)?;
    let ctx = SommerfeldContext::new(omega, env, settings.sommerfeld)?;
    let params = couplings_at(
        &ctx,
        rho_over_lambda * lambda,
        theta_deg,
        z_over_lambda * lambda,
    )?;
    let (c_max, t_peak) = max_concurrence_over_time(&params, settings)?;
    Ok(PointConcurrence {
        params,
        max_concurrence: c_max,
        t_peak,
    })
}

fn validate_angles(theta_grid_deg: &[f64]) -> Result<()> {
    if theta_grid_deg.is_empty() {
        return Err(Error::InvalidInput("empty angle grid".to_string()));
    }
    for &t in theta_grid_deg {
        if !(0.0..=180.0).contains(&t) {
            return Err(Error::InvalidInput(format!(
                "angles must lie in [0, 180] degrees (symmetry about the y-axis), got {t}"
            )));
        }
    }
    Ok(())
}

/// C(θ) = max_t C(ρ, θ, t) at fixed ρ = rho_over_lambda·λ, undriven.
pub fn sweep_angle(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda: f64,
    theta_grid_deg: &[f64],
    settings: &SweepSettings,
) -> Result<SweepOutput> {
    validate_angles(theta_grid_deg)?;
    let (lambda, kind) = normalization_wavelength(omega, env, &settings.solver)?;
    let z = z_over_lambda * lambda;
    let rho = rho_over_lambda * lambda;
    let ctx = SommerfeldContext::new(omega, env, settings.sommerfeld)?;

    let rows: Vec<SweepRow> = theta_grid_deg
        .par_iter()
        .map(|&theta| -> Result<SweepRow> {
            let params = couplings_at(&ctx, rho, theta, z)?;
            let (c_max, _) = max_concurrence_over_time(&params, settings)?;
            Ok(SweepRow {
                sweep_value: theta,
                gamma12: params.gamma12,
                gamma21: params.gamma21,
                g12: params.g12,
                g21: params.g21,
                concurrence: c_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let argmax = rows
        .iter()
        .max_by(|a, b| a.concurrence.total_cmp(&b.concurrence))
        .map(|r| r.sweep_value);
    Ok(SweepOutput {
        rows,
        resolved: ResolvedCase {
            lambda_m: lambda,
            lambda_kind: kind,
            z_m: z,
            z_over_lambda,
            rho_m: Some(rho),
            rho_over_lambda: Some(rho_over_lambda),
            theta_deg: None,
            argmax,
        },
        trajectory: None,
    })
}

/// Default angle grid used when a sweep needs the argmax angle and the
/// caller did not supply one: 19 points over [0, 180] degrees.
fn default_angle_grid() -> Vec<f64> {
    (0..19).map(|i| 10.0 * i as f64).collect()
}

fn resolve_theta(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda: f64,
    theta_deg: Option<f64>,
    settings: &SweepSettings,
) -> Result<f64> {
    match theta_deg {
        Some(t) => {
            validate_angles(&[t])?;
            Ok(t)
        }
        None => {
            let angle_sweep = sweep_angle(
                env,
                omega,
                z_over_lambda,
                rho_over_lambda,
                &default_angle_grid(),
                settings,
            )?;
            angle_sweep
                .resolved
                .argmax
                .ok_or_else(|| Error::InvalidInput("angle sweep produced no maximum".to_string()))
        }
    }
}

/// C(ρ) = max_t C(ρ, θ*, t) swept over separation, at the argmax angle from
/// an angle sweep (or a caller-fixed angle).
pub fn sweep_distance(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda_grid: &[f64],
    theta_deg: Option<f64>,
    settings: &SweepSettings,
) -> Result<SweepOutput> {
    if rho_over_lambda_grid.is_empty() {
        return Err(Error::InvalidInput("empty distance grid".to_string()));
    }
    if rho_over_lambda_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput(
            "separations must be positive".to_string(),
        ));
    }
    // the argmax angle is conventionally taken at ρ = 2λ
    let theta = resolve_theta(env, omega, z_over_lambda, 2.0, theta_deg, settings)?;
    let (lambda, kind) = normalization_wavelength(omega, env, &settings.solver)?;
    let z = z_over_lambda * lambda;
    let ctx = SommerfeldContext::new(omega, env, settings.sommerfeld)?;

    let rows: Vec<SweepRow> = rho_over_lambda_grid
        .par_iter()
        .map(|&rho_rel| -> Result<SweepRow> {
            let params = couplings_at(&ctx, rho_rel * lambda, theta, z)?;
            let (c_max, _) = max_concurrence_over_time(&params, settings)?;
            Ok(SweepRow {
                sweep_value: rho_rel,
                gamma12: params.gamma12,
                gamma21: params.gamma21,
                g12: params.g12,
                g21: params.g21,
                concurrence: c_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let argmax = rows
        .iter()
        .max_by(|a, b| a.concurrence.total_cmp(&b.concurrence))
        .map(|r| r.sweep_value);
    Ok(SweepOutput {
        rows,
        resolved: ResolvedCase {
            lambda_m: lambda,
            lambda_kind: kind,
            z_m: z,
            z_over_lambda,
            rho_m: None,
            rho_over_lambda: None,
            theta_deg: Some(theta),
            argmax,
        },
        trajectory: None,
    })
}

/// Undriven C(t) on a fixed time grid at the argmax angle and ρ = 2λ
/// (or caller-fixed values).
pub fn run_transient(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda: f64,
    theta_deg: Option<f64>,
    t_grid: &[f64],
    settings: &SweepSettings,
) -> Result<SweepOutput> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".to_string()));
    }
    let theta = resolve_theta(
        env,
        omega,
        z_over_lambda,
        rho_over_lambda,
        theta_deg,
        settings,
    )?;
    let (lambda, kind) = normalization_wavelength(omega, env, &settings.solver)?;
    let z = z_over_lambda * lambda;
    let rho = rho_over_lambda * lambda;
    let ctx = SommerfeldContext::new(omega, env, settings.sommerfeld)?;
    let params = couplings_at(&ctx, rho, theta, z)?;
    let l = build_liouvillian(&params);
    let traj = evolve(&initial_state(), &l, t_grid)?;

    let mut rows = Vec::with_capacity(t_grid.len());
    let mut trajectory = Vec::with_capacity(t_grid.len());
    for (&t, state) in t_grid.iter().zip(traj) {
        let c = concurrence(&state)?.value();
        rows.push(SweepRow {
            sweep_value: t,
            gamma12: params.gamma12,
            gamma21: params.gamma21,
            g12: params.g12,
            g21: params.g21,
            concurrence: c,
        });
        trajectory.push((t, state));
    }
    let argmax = rows
        .iter()
        .max_by(|a, b| a.concurrence.total_cmp(&b.concurrence))
        .map(|r| r.sweep_value);
    Ok(SweepOutput {
        rows,
        resolved: ResolvedCase {
            lambda_m: lambda,
            lambda_kind: kind,
            z_m: z,
            z_over_lambda,
            rho_m: Some(rho),
            rho_over_lambda: Some(rho_over_lambda),
            theta_deg: Some(theta),
            argmax,
        },
        trajectory: Some(trajectory),
    })
}

/// Steady-state concurrence versus the qubit-1 drive amplitude, with the
/// qubit-2 drive off.
pub fn drive_scan(
    env: &Environment,
    omega: Frequency,
    z_over_lambda: f64,
    rho_over_lambda: f64,
    theta_deg: Option<f64>,
    omega1_grid: &[f64],
    settings: &SweepSettings,
) -> Result<SweepOutput> {
    if omega1_grid.is_empty() {
        return Err(Error::InvalidInput("empty drive grid".to_string()));
    }
    if omega1_grid.iter().any(|&o| !(o > 0.0)) {
        return Err(Error::InvalidInput(
            "drive amplitudes must be positive".to_string(),
        ));
    }
    let theta = resolve_theta(
        env,
        omega,
        z_over_lambda,
        rho_over_lambda,
        theta_deg,
        settings,
    )?;
    let (lambda, kind) = normalization_wavelength(omega, env, &settings.solver)?;
    let z = z_over_lambda * lambda;
    let rho = rho_over_lambda * lambda;
    let ctx = SommerfeldContext::new(omega, env, settings.sommerfeld)?;
    let base = couplings_at(&ctx, rho, theta, z)?;

    let rows: Vec<SweepRow> = omega1_grid
        .par_iter()
        .map(|&omega1| -> Result<SweepRow> {
            let params = base.with_drive(omega1, 0.0);
            let rho_ss = steady_state(&build_liouvillian(&params))?;
            let c = concurrence(&rho_ss)?.value();
            Ok(SweepRow {
                sweep_value: omega1,
                gamma12: params.gamma12,
                gamma21: params.gamma21,
                g12: params.g12,
                g21: params.g21,
                concurrence: c,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let argmax = rows
        .iter()
        .max_by(|a, b| a.concurrence.total_cmp(&b.concurrence))
        .map(|r| r.sweep_value);
    Ok(SweepOutput {
        rows,
        resolved: ResolvedCase {
            lambda_m: lambda,
            lambda_kind: kind,
            z_m: z,
            z_over_lambda,
            rho_m: Some(rho),
            rho_over_lambda: Some(rho_over_lambda),
            theta_deg: Some(theta),
            argmax,
        },
        trajectory: None,
    })
}
