//! TM surface-plasmon dispersion: complex root finding on the dispersion
//! denominator Z^E along arbitrary in-plane directions, equi-frequency
//! contours, and frequency sweeps with continuation seeding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{p_branch_complex, Environment};
use crate::material::{self, doppler_conductivity};
use crate::units::{Frequency, C, EPS0};

/// Which wavenumber enters the Doppler shift of the conductivity while the
/// root iterates through the complex plane. The conductivity model is
/// derived for real wavenumbers, so the real part is the default; the
/// complex variant is kept as a sensitivity knob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DopplerArg {
    #[default]
    RealPart,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub doppler_arg: DopplerArg,
    /// Relative step tolerance |Δq|/|q| for secant convergence.
    pub step_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            doppler_arg: DopplerArg::RealPart,
            step_tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// A converged SPP root at one (phi, omega).
#[derive(Debug, Clone, Copy)]
pub struct DispersionRoot {
    /// Complex in-plane wavenumber magnitude (rad/m), Re q > 0.
    pub q: Complex64,
    /// Propagation angle from +x (rad).
    pub phi: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// |Z^E| at the root.
    pub residual: f64,
}

impl DispersionRoot {
    /// SPP wavelength 2π/Re q (m).
    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.q.re
    }
}

/// Per-angle outcome inside a sweep; solver failures are recorded rather
/// than aborting the sweep.
#[derive(Debug, Clone, Copy)]
pub enum RootOutcome {
    Converged(DispersionRoot),
    /// Iteration failed although TM waves are supported somewhere on the
    /// scanned interval.
    NoRoot,
    /// The (Doppler-shifted) conductivity is capacitive over the whole
    /// scanned interval: no TM mode exists in this direction.
    NoTm,
}

impl RootOutcome {
    pub fn status_str(&self) -> &'static str {
        match self {
            RootOutcome::Converged(_) => "ok",
            RootOutcome::NoRoot => "no_root",
            RootOutcome::NoTm => "no_tm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquiFrequencyContour {
    pub omega: f64,
    pub v_d: f64,
    /// (phi, outcome), phi strictly increasing over (-π, π].
    pub points: Vec<(f64, RootOutcome)>,
}

/// TM dispersion denominator
/// `Z^E = (ε1/ε2) p2 + p1 + σ_d p2 p1 / (-i ω ε2)`
/// with σ_d evaluated at `q_x = Re(q) cos(phi)` (or complex q, per settings).
pub fn dispersion_denominator(
    q: Complex64,
    phi: f64,
    omega: Frequency,
    env: &Environment,
    doppler_arg: DopplerArg,
) -> Result<Complex64> {
    let sheet = env
        .sheet()
        .ok_or_else(|| Error::InvalidInput("dispersion requires a graphene sheet".to_string()))?;
    let w = omega.omega();
    let k1 = w / C * env.eps_r1().sqrt();
    let k2 = w / C * env.eps_r2().sqrt();
    let p1 = p_branch_complex(q, k1);
    let p2 = p_branch_complex(q, k2);
    let sigma = match doppler_arg {
        DopplerArg::RealPart => doppler_conductivity(omega, q.re * phi.cos(), sheet)?.sigma,
        DopplerArg::Complex => material::doppler_conductivity_complex(omega, q * phi.cos(), sheet)?,
    };
    let eps2_abs = EPS0 * env.eps_r2();
    let ratio = env.eps_r1() / env.eps_r2();
    Ok(ratio * p2 + p1 + sigma * p2 * p1 / (Complex64::new(0.0, -w) * eps2_abs))
}

/// Quasi-static root estimate `q ≈ i ω (ε1+ε2) / σ_d`, self-consistently
/// iterated in the Doppler argument.
fn quasi_static_seed(phi: f64, omega: Frequency, env: &Environment) -> Result<Complex64> {
    let sheet = env.sheet().expect("caller checked sheet");
    let w = omega.omega();
    let eps_sum = EPS0 * (env.eps_r1() + env.eps_r2());
    let sigma0 = material::local_conductivity(omega, sheet)?.sigma;
    let mut q = Complex64::i() * w * eps_sum / sigma0;
    for _ in 0..30 {
        let sd = doppler_conductivity(omega, q.re * phi.cos(), sheet)?.sigma;
        let next = Complex64::i() * w * eps_sum / sd;
        let step = (next - q).norm();
        // damped update; the fixed point may not exist against strong drift
        q = 0.5 * (q + next);
        if step < 1e-10 * q.norm() {
            break;
        }
    }
    Ok(q)
}

fn secant_iterate(
    phi: f64,
    omega: Frequency,
    env: &Environment,
    seed: Complex64,
    settings: &SolverSettings,
) -> Result<Complex64> {
    let mut q0 = seed;
    let mut q1 = seed * 1.02;
    let mut f0 = dispersion_denominator(q0, phi, omega, env, settings.doppler_arg)?;
    let mut f1 = dispersion_denominator(q1, phi, omega, env, settings.doppler_arg)?;
    for _ in 0..settings.max_iterations {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            return Err(Error::root_not_found(q1));
        }
        let dq = -f1 * (q1 - q0) / denom;
        q0 = q1;
        f0 = f1;
        q1 += dq;
        if !q1.is_finite() {
            return Err(Error::root_not_found(q0));
        }
        f1 = dispersion_denominator(q1, phi, omega, env, settings.doppler_arg)?;
        if dq.norm() < settings.step_tol * q1.norm() {
            return Ok(q1);
        }
    }
    Err(Error::root_not_found(q1))
}

/// Classify a failed search: scan a real-q interval for TM support to
/// distinguish "solver missed the root" from "no mode exists here".
fn classify_failure(phi: f64, omega: Frequency, env: &Environment, q_scale: f64, k2: f64) -> Error {
    let sheet = env.sheet().expect("caller checked sheet");
    let lo = 1.001 * k2;
    let hi = (5.0 * q_scale).max(50.0 * k2);
    let n = 96;
    let any_tm = (0..=n).any(|i| {
        let q = lo * (hi / lo).powf(i as f64 / n as f64);
        material::supports_tm(omega, q * phi.cos(), sheet).unwrap_or(false)
    });
    if any_tm {
        Error::root_not_found(Complex64::new(f64::NAN, f64::NAN))
    } else {
        Error::NoTmSupport
    }
}

/// Solve Z^E = 0 for the complex SPP wavenumber along direction `phi`.
pub fn solve_spp(
    phi: f64,
    omega: Frequency,
    env: &Environment,
    seed: Option<Complex64>,
    settings: &SolverSettings,
) -> Result<DispersionRoot> {
    let sheet = env
        .sheet()
        .ok_or_else(|| Error::InvalidInput("dispersion requires a graphene sheet".to_string()))?;
    let w = omega.omega();
    let k2 = w / C * env.eps_r2().sqrt();

    let base_seed = match seed {
        Some(s) => s,
        None => quasi_static_seed(phi, omega, env)?,
    };
    if !material::supports_tm(omega, base_seed.re * phi.cos(), sheet)? {
        return Err(Error::NoTmSupport);
    }

    let perturbations = [
        Complex64::new(1.0, 0.0),
        Complex64::new(1.05, 0.0),
        Complex64::new(0.95, 0.0),
        Complex64::new(1.0, 0.05),
    ];
    let mut last_err = None;
    for factor in perturbations {
        match secant_iterate(phi, omega, env, base_seed * factor, settings) {
            Ok(q) => {
                if q.norm() <= 1.001 * k2 {
                    return Err(Error::NoSppRoot);
                }
                if q.re <= 0.0 {
                    last_err = Some(Error::root_not_found(q));
                    continue;
                }
                let res = dispersion_denominator(q, phi, omega, env, settings.doppler_arg)?.norm();
                let scale =
                    dispersion_denominator(q * 1.01, phi, omega, env, settings.doppler_arg)?.norm();
                if res > 1e-9 * scale {
                    last_err = Some(Error::root_not_found(q));
                    continue;
                }
                return Ok(DispersionRoot {
                    q,
                    phi,
                    omega: w,
                    residual: res,
                });
            }
            Err(e @ Error::DopplerSingularity) => last_err = Some(e),
            Err(e) => last_err = Some(e),
        }
    }
    match last_err {
        Some(Error::RootNotFound { .. }) | None => {
            Err(classify_failure(phi, omega, env, base_seed.norm(), k2))
        }
        Some(e) => Err(e),
    }
}

/// Map a solve error to the per-point sweep outcome; hard errors propagate.
fn outcome_from(result: Result<DispersionRoot>) -> Result<RootOutcome> {
    match result {
        Ok(root) => Ok(RootOutcome::Converged(root)),
        Err(Error::RootNotFound { .. }) | Err(Error::NoSppRoot) => Ok(RootOutcome::NoRoot),
        Err(Error::NoTmSupport) | Err(Error::DopplerSingularity) => Ok(RootOutcome::NoTm),
        Err(e) => Err(e),
    }
}

/// Equi-frequency contour: SPP roots swept over propagation angle with
/// continuation seeding; angles without a root are marked, not fatal.
pub fn efc(
    omega: Frequency,
    env: &Environment,
    n_phi: usize,
    settings: &SolverSettings,
) -> Result<EquiFrequencyContour> {
    if n_phi < 8 {
        return Err(Error::InvalidInput(format!(
            "equi-frequency contour needs at least 8 angles, got {n_phi}"
        )));
    }
    let sheet = env
        .sheet()
        .ok_or_else(|| Error::InvalidInput("dispersion requires a graphene sheet".to_string()))?;
    let mut points = Vec::with_capacity(n_phi);
    let mut carry: Option<Complex64> = None;
    for k in 0..n_phi {
        // strictly increasing over (-π, π]
        let phi =
            -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k + 1) as f64 / n_phi as f64;
        let outcome = outcome_from(solve_spp(phi, omega, env, carry, settings))?;
        carry = match outcome {
            RootOutcome::Converged(root) => Some(root.q),
            _ => None,
        };
        points.push((phi, outcome));
    }
    Ok(EquiFrequencyContour {
        omega: omega.omega(),
        v_d: sheet.v_d(),
        points,
    })
}

/// Frequency sweep of the SPP root along one direction with continuation
/// seeding. Returns (frequency, outcome) pairs in ascending frequency.
pub fn dispersion_curve(
    phi: f64,
    env: &Environment,
    omega_min: Frequency,
    omega_max: Frequency,
    n_points: usize,
    settings: &SolverSettings,
) -> Result<Vec<(Frequency, RootOutcome)>> {
    if n_points < 2 {
        return Err(Error::InvalidInput(
            "dispersion curve needs at least 2 frequency points".to_string(),
        ));
    }
    if omega_max.omega() <= omega_min.omega() {
        return Err(Error::InvalidInput(
            "omega_max must exceed omega_min".to_string(),
        ));
    }
    let mut out = Vec::with_capacity(n_points);
    let mut carry: Option<Complex64> = None;
    for i in 0..n_points {
        let w = omega_min.omega()
            + (omega_max.omega() - omega_min.omega()) * i as f64 / (n_points - 1) as f64;
        let omega = Frequency::from_omega(w)?;
        let outcome = outcome_from(solve_spp(phi, omega, env, carry, settings))?;
        carry = match outcome {
            RootOutcome::Converged(root) => Some(root.q),
            _ => None,
        };
        out.push((omega, outcome));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::Environment;
    use crate::material::GrapheneParams;
    use approx::assert_relative_eq;

    fn sheet_env(vd_over_vf: f64) -> Environment {
        Environment::with_sheet(
            4.0,
            4.0,
            GrapheneParams::new(0.1, 0.35, vd_over_vf).unwrap(),
        )
        .unwrap()
    }

    fn f15() -> Frequency {
        Frequency::from_thz(15.0).unwrap()
    }

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn quasi_static_estimate_is_near_the_root() {
        // |Z(q_qs)| << |Z(2 q_qs)| for the symmetric quasi-static regime
        let env = sheet_env(0.0);
        let q_qs = quasi_static_seed(0.0, f15(), &env).unwrap();
        let z1 = dispersion_denominator(q_qs, 0.0, f15(), &env, DopplerArg::RealPart)
            .unwrap()
            .norm();
        let z2 = dispersion_denominator(q_qs * 2.0, 0.0, f15(), &env, DopplerArg::RealPart)
            .unwrap()
            .norm();
        assert!(z1 < 0.1 * z2, "z1 = {z1:.3e}, z2 = {z2:.3e}");
    }

    #[test]
    fn reciprocal_denominator_is_direction_independent() {
        let env = sheet_env(0.0);
        let q = Complex64::new(5e7, 2e6);
        let a = dispersion_denominator(q, 0.0, f15(), &env, DopplerArg::RealPart).unwrap();
        let b = dispersion_denominator(q, std::f64::consts::PI, f15(), &env, DopplerArg::RealPart)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reciprocal_spp_wavelength() {
        let root = solve_spp(0.0, f15(), &sheet_env(0.0), None, &settings()).unwrap();
        assert_relative_eq!(root.wavelength(), 0.106e-6, max_relative = 0.05);
        // independently computed reference for this exact parameter set
        assert_relative_eq!(root.q.re, 5.935216e7, max_relative = 1e-5);
        assert_relative_eq!(root.q.im, 1.998030e6, max_relative = 1e-4);
    }

    #[test]
    fn nonreciprocal_wavelengths_along_drift() {
        let pi = std::f64::consts::PI;
        let r1 = solve_spp(pi, f15(), &sheet_env(-0.5), None, &settings()).unwrap();
        assert_relative_eq!(r1.wavelength(), 0.171e-6, max_relative = 0.10);
        let r2 = solve_spp(pi, f15(), &sheet_env(-0.25), None, &settings()).unwrap();
        assert_relative_eq!(r2.wavelength(), 0.137e-6, max_relative = 0.10);
    }

    #[test]
    fn against_drift_root_absent_for_strong_drift() {
        // v_d = -v_F/2 at 15 THz: propagation against the drift has no root
        let result = solve_spp(0.0, f15(), &sheet_env(-0.5), None, &settings());
        assert!(result.is_err(), "unexpected root: {result:?}");
    }

    #[test]
    fn residual_scale_invariant() {
        for vd in [0.0, -0.25, -0.5] {
            let env = sheet_env(vd);
            let root = match solve_spp(std::f64::consts::PI, f15(), &env, None, &settings()) {
                Ok(r) => r,
                Err(e) => panic!("solver failed for vd={vd}: {e}"),
            };
            let scale =
                dispersion_denominator(root.q * 1.01, root.phi, f15(), &env, DopplerArg::RealPart)
                    .unwrap()
                    .norm();
            assert!(root.residual < 1e-6 * scale);
        }
    }

    #[test]
    fn efc_is_circular_without_drift() {
        let contour = efc(f15(), &sheet_env(0.0), 16, &settings()).unwrap();
        let mut re_qs = Vec::new();
        for (_, outcome) in &contour.points {
            match outcome {
                RootOutcome::Converged(root) => re_qs.push(root.q.re),
                other => panic!("expected root, got {other:?}"),
            }
        }
        let max = re_qs.iter().cloned().fold(f64::MIN, f64::max);
        let min = re_qs.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / max < 1e-6, "spread {:.3e}", (max - min) / max);
    }

    #[test]
    fn efc_drift_shrinks_q_along_drift() {
        let contour = efc(f15(), &sheet_env(-0.5), 16, &settings()).unwrap();
        // phi = π (along drift) must exist; phi near 0 must not
        let along = contour
            .points
            .iter()
            .find(|(phi, _)| (*phi - std::f64::consts::PI).abs() < 1e-9)
            .unwrap();
        assert!(matches!(along.1, RootOutcome::Converged(_)));
        let against = contour
            .points
            .iter()
            .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
            .unwrap();
        assert!(
            !matches!(against.1, RootOutcome::Converged(_)),
            "against-drift root should be absent at this drive"
        );
    }

    #[test]
    fn efc_mirror_under_drift_flip() {
        let plus = efc(f15(), &sheet_env(0.25), 16, &settings()).unwrap();
        let minus = efc(f15(), &sheet_env(-0.25), 16, &settings()).unwrap();
        // (v_d, phi) matches (-v_d, π - phi): compare q at mirrored angles
        for (phi_p, out_p) in &plus.points {
            let mirrored = std::f64::consts::PI - phi_p;
            // normalize to (-π, π]
            let mirrored = if mirrored > std::f64::consts::PI {
                mirrored - 2.0 * std::f64::consts::PI
            } else {
                mirrored
            };
            let partner = minus
                .points
                .iter()
                .find(|(phi_m, _)| (phi_m - mirrored).abs() < 1e-9);
            let Some((_, out_m)) = partner else { continue };
            if let (RootOutcome::Converged(a), RootOutcome::Converged(b)) = (out_p, out_m) {
                assert!(
                    (a.q - b.q).norm() < 1e-6 * a.q.norm(),
                    "mirror mismatch at phi={phi_p}"
                );
            }
        }
    }

    #[test]
    fn curve_monotonic_re_q_reciprocal() {
        let env = sheet_env(0.0);
        let lo = Frequency::from_thz(5.0).unwrap();
        let hi = Frequency::from_thz(25.0).unwrap();
        let curve = dispersion_curve(0.0, &env, lo, hi, 12, &settings()).unwrap();
        let mut prev = 0.0;
        for (_, outcome) in &curve {
            if let RootOutcome::Converged(root) = outcome {
                assert!(root.q.re > prev);
                prev = root.q.re;
            } else {
                panic!("reciprocal curve should converge everywhere in band");
            }
        }
    }

    #[test]
    fn curve_branches_split_with_drift() {
        let env = sheet_env(-0.25);
        let lo = Frequency::from_thz(10.0).unwrap();
        let hi = Frequency::from_thz(20.0).unwrap();
        let fwd = dispersion_curve(std::f64::consts::PI, &env, lo, hi, 6, &settings()).unwrap();
        let bwd = dispersion_curve(0.0, &env, lo, hi, 6, &settings()).unwrap();
        let mut split_seen = false;
        for ((_, a), (_, b)) in fwd.iter().zip(bwd.iter()) {
            if let (RootOutcome::Converged(f), RootOutcome::Converged(g)) = (a, b) {
                assert!(f.q.re < g.q.re, "along-drift q should be smaller");
                split_seen = true;
            }
        }
        assert!(split_seen);
    }

    #[test]
    fn quasi_static_fixed_point_consistency() {
        // deep sub-light-line roots (Re q > 20 k2) must sit within 5% of
        // the quasi-static estimate evaluated at the root's own q_x
        for (vd, phi) in [(0.0, 0.0), (-0.5, std::f64::consts::PI), (-0.25, 0.0)] {
            let env = sheet_env(vd);
            let root = solve_spp(phi, f15(), &env, None, &settings()).unwrap();
            let k2 = env.k2(f15());
            assert!(root.q.re > 20.0 * k2, "root not quasi-static at vd={vd}");
            let sheet = env.sheet().unwrap();
            let sd = crate::material::doppler_conductivity(f15(), root.q.re * phi.cos(), sheet)
                .unwrap()
                .sigma;
            let q_qs = Complex64::i() * f15().omega() * (2.0 * crate::units::EPS0 * 4.0) / sd;
            let rel = (root.q - q_qs).norm() / root.q.norm();
            assert!(rel < 0.05, "vd = {vd}: fixed-point deviation {rel:.3}");
        }
    }

    #[test]
    fn stronger_drift_widens_branch_split() {
        // both directions still propagate at these drifts; the forward and
        // backward wavenumbers separate more as |v_d| grows
        let mut splits = Vec::new();
        for vd in [-0.125, -0.25] {
            let env = sheet_env(vd);
            let fwd = solve_spp(std::f64::consts::PI, f15(), &env, None, &settings()).unwrap();
            let bwd = solve_spp(0.0, f15(), &env, None, &settings()).unwrap();
            splits.push((bwd.q.re - fwd.q.re).abs());
        }
        assert!(
            splits[1] > 2.0 * splits[0],
            "splits did not widen: {splits:?}"
        );
    }

    #[test]
    fn no_sheet_is_an_error() {
        let env = Environment::homogeneous(4.0).unwrap();
        assert!(solve_spp(0.0, f15(), &env, None, &settings()).is_err());
    }

    #[test]
    fn efc_requires_enough_angles() {
        assert!(matches!(
            efc(f15(), &sheet_env(0.0), 4, &settings()),
            Err(Error::InvalidInput(_))
        ));
    }
}
