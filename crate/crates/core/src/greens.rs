//! Layered-medium Green's function G_zz for z-oriented dipoles above a
//! graphene sheet: closed-form principal part, Sommerfeld-integral scattered
//! part (full angular double integral for drift-biased sheets, Bessel
//! reduction for the reciprocal case), coupling-rate extraction, and E_z
//! field maps.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{self, SolverSettings};
use crate::error::{Error, Result};
use crate::material::{doppler_conductivity, GrapheneParams};
use crate::quad::{integrate_segments, periodic_trapezoid_best_effort};
use crate::units::{Frequency, C, EPS0, HBAR};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Half-space transverse decay constant p = sqrt(q^2 - k^2) for real q:
/// real and decaying above the light line, `-i sqrt(k^2-q^2)` below it
/// (outgoing under the e^{-iωt} convention).
pub fn p_branch_real(q: f64, k: f64) -> Complex64 {
    if q >= k {
        Complex64::new((q * q - k * k).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -((k * k - q * q).sqrt()))
    }
}

/// Branch rule for complex q: principal square root folded onto Re p >= 0,
/// with Im p <= 0 on the imaginary axis.
pub fn p_branch_complex(q: Complex64, k: f64) -> Complex64 {
    let mut p = (q * q - Complex64::new(k * k, 0.0)).sqrt();
    if p.re < 0.0 {
        p = -p;
    }
    if p.re.abs() <= 1e-12 * p.im.abs() && p.im > 0.0 {
        p = -p;
    }
    p
}

/// Cladding permittivities with an optional graphene sheet at z = 0.
/// Region 1 fills z < 0, region 2 fills z > 0; sources and observers live
/// in region 2. `sheet = None` is the homogeneous baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    eps_r1: f64,
    eps_r2: f64,
    sheet: Option<GrapheneParams>,
}

impl Environment {
    /// Free space, no sheet.
    pub fn vacuum() -> Self {
        Environment {
            eps_r1: 1.0,
            eps_r2: 1.0,
            sheet: None,
        }
    }

    /// Homogeneous dielectric without a sheet.
    pub fn homogeneous(eps_r: f64) -> Result<Self> {
        Environment::dielectric(eps_r, eps_r)
    }

    pub fn dielectric(eps_r1: f64, eps_r2: f64) -> Result<Self> {
        check_eps(eps_r1)?;
        check_eps(eps_r2)?;
        Ok(Environment {
            eps_r1,
            eps_r2,
            sheet: None,
        })
    }

    pub fn with_sheet(eps_r1: f64, eps_r2: f64, sheet: GrapheneParams) -> Result<Self> {
        check_eps(eps_r1)?;
        check_eps(eps_r2)?;
        Ok(Environment {
            eps_r1,
            eps_r2,
            sheet: Some(sheet),
        })
    }

    pub fn eps_r1(&self) -> f64 {
        self.eps_r1
    }

    pub fn eps_r2(&self) -> f64 {
        self.eps_r2
    }

    pub fn sheet(&self) -> Option<&GrapheneParams> {
        self.sheet.as_ref()
    }

    /// Wavenumber in region 2 (where the emitters sit).
    pub fn k2(&self, omega: Frequency) -> f64 {
        omega.omega() / C * self.eps_r2.sqrt()
    }

    pub fn k1(&self, omega: Frequency) -> f64 {
        omega.omega() / C * self.eps_r1.sqrt()
    }

    fn drift(&self) -> f64 {
        self.sheet.as_ref().map_or(0.0, |s| s.v_d())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 1.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!(
            "relative permittivity must be real and >= 1, got {eps}"
        )));
    }
    Ok(())
}

/// Two z-oriented dipole emitters in region 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterGeometry {
    r1: [f64; 3],
    r2: [f64; 3],
}

impl EmitterGeometry {
    pub fn new(r1: [f64; 3], r2: [f64; 3]) -> Result<Self> {
        if !(r1[2] > 0.0) || !(r2[2] > 0.0) {
            return Err(Error::InvalidInput(format!(
                "both emitters must sit above the interface (z > 0), got z1 = {}, z2 = {}",
                r1[2], r2[2]
            )));
        }
        Ok(EmitterGeometry { r1, r2 })
    }

    /// Qubit 1 above the origin, qubit 2 at lateral distance `rho` and
    /// angle `theta` from +x, both at height `z`.
    pub fn pair_at_angle(rho: f64, theta: f64, z: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidInput(format!(
                "separation must be positive, got {rho}"
            )));
        }
        EmitterGeometry::new([0.0, 0.0, z], [rho * theta.cos(), rho * theta.sin(), z])
    }

    pub fn r1(&self) -> [f64; 3] {
        self.r1
    }

    pub fn r2(&self) -> [f64; 3] {
        self.r2
    }

    /// Lateral separation.
    pub fn rho(&self) -> f64 {
        let dx = self.r2[0] - self.r1[0];
        let dy = self.r2[1] - self.r1[1];
        dx.hypot(dy)
    }

    pub fn swapped(&self) -> Self {
        EmitterGeometry {
            r1: self.r2,
            r2: self.r1,
        }
    }
}

/// Dissipative (gamma) and coherent (g) coupling rates; index [alpha][beta].
/// Self-terms of `g` are not computed (Lamb shift absorbed into the
/// transition frequency) and are stored as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    pub gamma: [[f64; 2]; 2],
    pub g: [[f64; 2]; 2],
}

/// How to scale Eqs.-of-motion coupling rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipoleScale {
    /// Everything divided by gamma_11; the dipole moment cancels.
    Normalized,
    /// Physical rates for a given dipole moment (C·m).
    Dipole(f64),
}

/// Quadrature controls for the Sommerfeld integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SommerfeldSettings {
    /// Relative tolerance per outer-q segment.
    pub rel_tol: f64,
    /// Relative tolerance for the inner angular integral.
    pub phi_rel_tol: f64,
    /// Starting node count for the angular trapezoid rule.
    pub phi_n_start: usize,
    /// Angular node cap.
    pub phi_n_max: usize,
    /// Bisection budget per outer segment.
    pub max_segments: usize,
}

impl Default for SommerfeldSettings {
    fn default() -> Self {
        SommerfeldSettings {
            rel_tol: 1e-8,
            phi_rel_tol: 1e-9,
            phi_n_start: 64,
            phi_n_max: 1 << 16,
            max_segments: 3000,
        }
    }
}

fn record_poison(slot: &Mutex<Option<Error>>, e: Error) -> Complex64 {
    let mut guard = slot.lock().unwrap();
    if guard.is_none() {
        *guard = Some(e);
    }
    Complex64::new(0.0, 0.0)
}

/// Reflection coefficient for TM incidence, `R_n = N^E / Z^E`.
fn reflection_from_sigma(
    p1: Complex64,
    p2: Complex64,
    sigma: Complex64,
    eps_ratio: f64,
    neg_inv_i_w_eps2: Complex64,
) -> Complex64 {
    let t = sigma * p1 * p2 * neg_inv_i_w_eps2;
    (eps_ratio * p2 - p1 + t) / (eps_ratio * p2 + p1 + t)
}

/// Reusable evaluation context for one (omega, environment): carries the
/// SPP-pole split candidates for the outer quadrature and a guarded cache
/// of self-term scattered integrals keyed by emitter height.
pub struct SommerfeldContext<'a> {
    omega: Frequency,
    env: &'a Environment,
    settings: SommerfeldSettings,
    k1: f64,
    k2: f64,
    eps_ratio: f64,
    neg_inv_i_w_eps2: Complex64,
    /// Re q of SPP roots along the drift axis, used as quadrature splits.
    pole_candidates: Vec<f64>,
    self_cache: Mutex<HashMap<u64, Complex64>>,
}

impl<'a> SommerfeldContext<'a> {
    pub fn new(
        omega: Frequency,
        env: &'a Environment,
        settings: SommerfeldSettings,
    ) -> Result<Self> {
        let k1 = env.k1(omega);
        let k2 = env.k2(omega);
        let mut pole_candidates = Vec::new();
        if env.sheet().is_some() {
            let solver = SolverSettings::default();
            let angles: &[f64] = if env.drift() == 0.0 {
                &[0.0]
            } else {
                &[0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI]
            };
            for &phi in angles {
                if let Ok(root) = dispersion::solve_spp(phi, omega, env, None, &solver) {
                    pole_candidates.push(root.q.re);
                }
            }
            pole_candidates.sort_by(f64::total_cmp);
            pole_candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-6 * *b);
        }
        Ok(SommerfeldContext {
            omega,
            env,
            settings,
            k1,
            k2,
            eps_ratio: env.eps_r1() / env.eps_r2(),
            neg_inv_i_w_eps2: (Complex64::new(0.0, -omega.omega()) * EPS0 * env.eps_r2()).inv(),
            pole_candidates,
            self_cache: Mutex::new(HashMap::new()),
        })
    }

    fn reflection(&self, q: f64, q_x: f64) -> Result<Complex64> {
        let sheet = self.env.sheet().expect("reflection requires a sheet");
        let sigma = doppler_conductivity(self.omega, q_x, sheet)?.sigma;
        let p1 = p_branch_real(q, self.k1);
        let p2 = p_branch_real(q, self.k2);
        Ok(reflection_from_sigma(
            p1,
            p2,
            sigma,
            self.eps_ratio,
            self.neg_inv_i_w_eps2,
        ))
    }

    /// Angular factor of the scattered integrand at fixed q. Returns the
    /// integral over one period of R_n(q, q cos φ) e^{i q ρ cos(φ-θ)}.
    ///
    /// Best-effort: where the equi-frequency contour crossing leaves a
    /// near-pole in φ (large q, strongly damped by e^{-p2(z+z')}), the
    /// capped trapezoid returns its last iterate and the residual noise is
    /// absorbed by the outer error estimate.
    fn angular_integral(&self, q: f64, rho: f64, theta: f64) -> Result<Complex64> {
        let poisoned: Mutex<Option<Error>> = Mutex::new(None);
        let f = |phi: f64| match self.reflection(q, q * phi.cos()) {
            Ok(rn) => rn * (Complex64::i() * q * rho * (phi - theta).cos()).exp(),
            Err(e) => record_poison(&poisoned, e),
        };
        let result = periodic_trapezoid_best_effort(
            &f,
            self.settings.phi_n_start,
            self.settings.phi_rel_tol,
            self.settings.phi_n_max,
        );
        if let Some(e) = poisoned.into_inner().unwrap() {
            return Err(e);
        }
        Ok(result.value)
    }

    /// Scattered part of [k2^2 + d^2/dz^2] g^s at lateral separation `rho`,
    /// observation angle `theta`, and height sum `zs = z + z'`. The
    /// z-derivatives reduce to a factor q^2 = k2^2 + p2^2 on the
    /// e^{-p2(z+z')} kernel.
    pub fn scattered(&self, rho: f64, theta: f64, zs: f64) -> Result<Complex64> {
        let sheet = self
            .env
            .sheet()
            .ok_or_else(|| Error::InvalidInput("scattered part requires a sheet".to_string()))?;
        if !(zs > 0.0) {
            return Err(Error::InvalidInput(format!(
                "height sum z + z' must be positive, got {zs}"
            )));
        }
        let reciprocal = sheet.v_d() == 0.0;
        if reciprocal {
            self.scattered_with_inner(rho, zs, &|q: f64| {
                // Bessel reduction of the angular integral
                Ok(Complex64::new(TAU * libm::j0(q * rho), 0.0) * self.reflection(q, 0.0)?)
            })
        } else {
            self.scattered_with_inner(rho, zs, &|q: f64| self.angular_integral(q, rho, theta))
        }
    }

    /// Bessel-path scattered part; only valid without drift.
    pub fn scattered_reciprocal(&self, rho: f64, zs: f64) -> Result<Complex64> {
        let sheet = self
            .env
            .sheet()
            .ok_or_else(|| Error::InvalidInput("scattered part requires a sheet".to_string()))?;
        if sheet.v_d() != 0.0 {
            return Err(Error::InvalidInput(
                "Bessel reduction requires v_d = 0".to_string(),
            ));
        }
        self.scattered_with_inner(rho, zs, &|q: f64| {
            Ok(Complex64::new(TAU * libm::j0(q * rho), 0.0) * self.reflection(q, 0.0)?)
        })
    }

    /// Full angular-integral scattered part regardless of drift; used for
    /// cross-path validation against the Bessel reduction.
    pub fn scattered_double_integral(&self, rho: f64, theta: f64, zs: f64) -> Result<Complex64> {
        self.env
            .sheet()
            .ok_or_else(|| Error::InvalidInput("scattered part requires a sheet".to_string()))?;
        if !(zs > 0.0) {
            return Err(Error::InvalidInput(format!(
                "height sum z + z' must be positive, got {zs}"
            )));
        }
        self.scattered_with_inner(rho, zs, &|q: f64| self.angular_integral(q, rho, theta))
    }

    fn scattered_with_inner(
        &self,
        rho: f64,
        zs: f64,
        inner: &dyn Fn(f64) -> Result<Complex64>,
    ) -> Result<Complex64> {
        if !(rho >= 0.0) {
            return Err(Error::InvalidInput(format!("negative separation {rho}")));
        }
        let k1 = self.k1;
        let k2 = self.k2;
        let rel = self.settings.rel_tol;
        let max_seg = self.settings.max_segments;
        let poisoned: Mutex<Option<Error>> = Mutex::new(None);

        // radiative block, q = k2 sin t: dq/(2 p2) = (i/2) dt exactly
        let rad = |t: f64| {
            let q = k2 * t.sin();
            let p2 = Complex64::new(0.0, -k2 * t.cos());
            match inner(q) {
                Ok(ang) => ang * q.powi(3) * (-p2 * zs).exp() * Complex64::new(0.0, 0.5),
                Err(e) => record_poison(&poisoned, e),
            }
        };
        let mut rad_points = vec![0.0, std::f64::consts::FRAC_PI_2];
        if k1 < k2 {
            rad_points.insert(1, (k1 / k2).asin());
        }
        let mut total = integrate_segments(&rad, &rad_points, rel, max_seg)?.value;

        // near-evanescent block, q = k2 cosh u: dq/(2 p2) = du/2 exactly
        let evan = |u: f64| {
            let q = k2 * u.cosh();
            let p2 = k2 * u.sinh();
            match inner(q) {
                Ok(ang) => ang * q.powi(3) * Complex64::new((-p2 * zs).exp() * 0.5, 0.0),
                Err(e) => record_poison(&poisoned, e),
            }
        };
        let u_top = 2.0f64.acosh();
        let mut evan_points = vec![0.0, u_top];
        if k1 > k2 && k1 < 2.0 * k2 {
            evan_points.insert(1, (k1 / k2).acosh());
        }
        total += integrate_segments(&evan, &evan_points, rel, max_seg)?.value;

        // far block in plain q with SPP-pole-aware splits
        let far = |q: f64| {
            let p2 = (q * q - k2 * k2).sqrt();
            match inner(q) {
                Ok(ang) => ang * q.powi(3) * ((-p2 * zs).exp() / (2.0 * p2)),
                Err(e) => record_poison(&poisoned, e),
            }
        };
        total += integrate_segments(&far, &self.far_split_points(zs), rel, max_seg)?.value;

        if let Some(e) = poisoned.into_inner().unwrap() {
            return Err(e);
        }
        Ok(total / (TAU * TAU))
    }

    /// Split points for the q > 2 k2 block: branch point of region 1 when it
    /// falls there, brackets around each SPP pole candidate, and the
    /// exponential-decay truncation point.
    fn far_split_points(&self, zs: f64) -> Vec<f64> {
        let q_start = 2.0 * self.k2;
        let q_pole_max = self.pole_candidates.iter().cloned().fold(0.0f64, f64::max);
        let q_max = (30.0 / zs).max(if q_pole_max > 0.0 {
            10.0 * q_pole_max
        } else {
            50.0 * self.k2
        });
        let mut points = vec![q_start];
        if self.k1 >= q_start {
            points.push(self.k1);
        }
        for &qp in &self.pole_candidates {
            for factor in [0.7, 1.0, 1.5, 2.0] {
                let s = qp * factor;
                if s > q_start && s < q_max {
                    points.push(s);
                }
            }
        }
        // geometric midpoint toward the first pole helps the refiner
        if let Some(&q_first) = self.pole_candidates.first() {
            let mid = (q_start * q_first).sqrt();
            if mid > q_start && mid < q_max {
                points.push(mid);
            }
        }
        points.push(q_max);
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * b.abs());
        points
    }

    /// Scattered self term at zero lateral separation, cached per height sum.
    fn scattered_self(&self, zs: f64) -> Result<Complex64> {
        if let Some(v) = self.self_cache.lock().unwrap().get(&zs.to_bits()) {
            return Ok(*v);
        }
        let v = self.scattered(0.0, 0.0, zs)?;
        self.self_cache.lock().unwrap().insert(zs.to_bits(), v);
        Ok(v)
    }

    /// Total G_zz with observation at `r_obs` and source at `r_src`.
    pub fn gzz(&self, r_obs: [f64; 3], r_src: [f64; 3]) -> Result<Complex64> {
        let mut g = principal_gzz_points(self.k2, r_obs, r_src)?;
        if self.env.sheet().is_some() {
            let dx = r_obs[0] - r_src[0];
            let dy = r_obs[1] - r_src[1];
            let rho = dx.hypot(dy);
            let theta = dy.atan2(dx);
            g += self.scattered(rho, theta, r_obs[2] + r_src[2])?;
        }
        Ok(g)
    }

    /// Coupling rates Γ_αβ, g_αβ for the two-emitter geometry.
    pub fn coupling_coefficients(
        &self,
        geom: &EmitterGeometry,
        scale: DipoleScale,
    ) -> Result<CouplingMatrix> {
        let d = match scale {
            DipoleScale::Normalized => 1.0,
            DipoleScale::Dipole(d) => {
                if !(d > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "dipole moment must be positive, got {d}"
                    )));
                }
                d
            }
        };
        let pref_gamma = 2.0 * d * d / (EPS0 * HBAR);
        let pref_g = d * d / (EPS0 * HBAR);

        // Self terms: Im G_zz(r, r) = k2^3/6π plus the finite scattered
        // part at ρ = 0. The real self part (Lamb shift) is not computed.
        let im_principal_self = self.k2.powi(3) / (6.0 * std::f64::consts::PI);
        let mut im_self = [im_principal_self, im_principal_self];
        if self.env.sheet().is_some() {
            for (slot, z) in im_self.iter_mut().zip([geom.r1[2], geom.r2[2]]) {
                *slot += self.scattered_self(2.0 * z)?.im;
            }
        }
        let gamma11 = pref_gamma * im_self[0];
        let gamma22 = pref_gamma * im_self[1];

        let g12_field = self.gzz(geom.r1, geom.r2)?;
        let g21_field = if self.env.drift() == 0.0 {
            g12_field // reciprocity
        } else {
            self.gzz(geom.r2, geom.r1)?
        };

        let mut m = CouplingMatrix {
            gamma: [
                [gamma11, pref_gamma * g12_field.im],
                [pref_gamma * g21_field.im, gamma22],
            ],
            g: [[0.0, pref_g * g12_field.re], [pref_g * g21_field.re, 0.0]],
        };
        if matches!(scale, DipoleScale::Normalized) {
            let norm = m.gamma[0][0];
            if !(norm > 0.0) {
                return Err(Error::NumericalInstability(format!(
                    "non-positive self decay rate {norm}"
                )));
            }
            for row in m.gamma.iter_mut().chain(m.g.iter_mut()) {
                for v in row.iter_mut() {
                    *v /= norm;
                }
            }
        }
        Ok(m)
    }
}

/// Closed-form principal part: [k2^2 + d^2/dz^2] e^{ik2 R}/(4πR).
pub fn principal_gzz(
    omega: Frequency,
    env: &Environment,
    r_obs: [f64; 3],
    r_src: [f64; 3],
) -> Result<Complex64> {
    principal_gzz_points(env.k2(omega), r_obs, r_src)
}

fn principal_gzz_points(k2: f64, r_obs: [f64; 3], r_src: [f64; 3]) -> Result<Complex64> {
    let dx = r_obs[0] - r_src[0];
    let dy = r_obs[1] - r_src[1];
    let dz = r_obs[2] - r_src[2];
    let rho_sq = dx * dx + dy * dy;
    let r = (rho_sq + dz * dz).sqrt();
    if r < 1e-18 {
        return Err(Error::CoincidentPoints);
    }
    let ik = Complex64::new(0.0, k2);
    let f = (ik * r).exp() / (4.0 * std::f64::consts::PI * r);
    let fp = f * (ik - 1.0 / r);
    let fpp = f * Complex64::new(-k2 * k2 + 2.0 / (r * r), -2.0 * k2 / r);
    Ok(f * (k2 * k2) + fpp * (dz * dz / (r * r)) + fp * (rho_sq / (r * r * r)))
}

/// Scattered G_zz contribution via the angular double integral.
pub fn scattered_gzz(
    omega: Frequency,
    env: &Environment,
    rho: f64,
    theta: f64,
    z_plus_zp: f64,
    settings: &SommerfeldSettings,
) -> Result<Complex64> {
    SommerfeldContext::new(omega, env, *settings)?.scattered_double_integral(rho, theta, z_plus_zp)
}

/// Scattered G_zz via the Bessel reduction (reciprocal case only).
pub fn scattered_gzz_reciprocal(
    omega: Frequency,
    env: &Environment,
    rho: f64,
    z_plus_zp: f64,
    settings: &SommerfeldSettings,
) -> Result<Complex64> {
    SommerfeldContext::new(omega, env, *settings)?.scattered_reciprocal(rho, z_plus_zp)
}

/// Total G_zz(r1 <- r2): principal part plus scattered part when a sheet
/// is present.
pub fn gzz_total(
    omega: Frequency,
    env: &Environment,
    geom: &EmitterGeometry,
    settings: &SommerfeldSettings,
) -> Result<Complex64> {
    SommerfeldContext::new(omega, env, *settings)?.gzz(geom.r1, geom.r2)
}

/// Coupling rates for a two-emitter geometry (one-shot convenience around
/// [`SommerfeldContext::coupling_coefficients`]).
pub fn coupling_coefficients(
    omega: Frequency,
    env: &Environment,
    geom: &EmitterGeometry,
    scale: DipoleScale,
    settings: &SommerfeldSettings,
) -> Result<CouplingMatrix> {
    SommerfeldContext::new(omega, env, *settings)?.coupling_coefficients(geom, scale)
}

/// Rectangular observation grid for field maps, all points at height `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub z: f64,
}

impl FieldGrid {
    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidInput(
                "field grid needs at least 2x2 points".to_string(),
            ));
        }
        if !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(Error::InvalidInput(
                "field grid extents must be increasing".to_string(),
            ));
        }
        if !(self.z > 0.0) {
            return Err(Error::InvalidInput(
                "field grid must sit above the interface".to_string(),
            ));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64)
            .collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|j| self.y_min + (self.y_max - self.y_min) * j as f64 / (self.ny - 1) as f64)
            .collect()
    }
}

/// Complex E_z sampled over a rectangular lateral grid. Points within one
/// grid cell of the source's lateral position (at equal heights) are
/// excluded and carry NaN.
#[derive(Debug, Clone)]
pub struct FieldMap {
    pub grid: FieldGrid,
    pub source: [f64; 3],
    pub omega: f64,
    /// Row-major over (y, x): index j * nx + i.
    pub ez: Vec<Complex64>,
}

/// Classical E_z = G_zz / (-i ω ε0) over the grid (μ_r2 = 1).
pub fn field_map(
    omega: Frequency,
    env: &Environment,
    source: [f64; 3],
    grid: &FieldGrid,
    settings: &SommerfeldSettings,
) -> Result<FieldMap> {
    grid.validate()?;
    if !(source[2] > 0.0) {
        return Err(Error::InvalidInput(
            "source must sit above the interface".to_string(),
        ));
    }
    let ctx = SommerfeldContext::new(omega, env, *settings)?;
    let xs = grid.xs();
    let ys = grid.ys();
    let dx = (grid.x_max - grid.x_min) / (grid.nx - 1) as f64;
    let dy = (grid.y_max - grid.y_min) / (grid.ny - 1) as f64;
    let exclusion = dx.max(dy);
    let same_plane = grid.z == source[2];
    let denom = Complex64::new(0.0, -omega.omega()) * EPS0;

    let values: Vec<Result<Complex64>> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|idx| {
            let x = xs[idx % grid.nx];
            let y = ys[idx / grid.nx];
            let lat = (x - source[0]).hypot(y - source[1]);
            if same_plane && lat < exclusion {
                return Ok(Complex64::new(f64::NAN, f64::NAN));
            }
            Ok(ctx.gzz([x, y, grid.z], source)? / denom)
        })
        .collect();

    let mut ez = Vec::with_capacity(values.len());
    let mut excluded = 0usize;
    for v in values {
        let v = v?;
        if v.re.is_nan() {
            excluded += 1;
        }
        ez.push(v);
    }
    if excluded == ez.len() {
        let i = ((source[0] - grid.x_min) / dx).round() as isize;
        let j = ((source[1] - grid.y_min) / dy).round() as isize;
        return Err(Error::InvalidInput(format!(
            "every grid point lies within one cell ({exclusion:.3e} m) of the source; \
             nearest excluded cell index ({i}, {j})"
        )));
    }
    Ok(FieldMap {
        grid: *grid,
        source,
        omega: omega.omega(),
        ez,
    })
}
