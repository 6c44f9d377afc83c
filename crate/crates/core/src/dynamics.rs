//! Two-qubit master equation with asymmetric cross-coupling and a coherent
//! drive, at zero detuning. State basis ordering throughout:
//! |1> = |g1 g2>, |2> = |e1 e2>, |3> = |g1 e2>, |4> = |e1 g2>.
//!
//! Time is dimensionless in units of 1/Γ11; all rates are carried in the
//! same units so the dipole moment never appears.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::CouplingMatrix;
use crate::linalg::{
    expm, kron4, min_hermitian_eigenvalue, unvectorize, vectorize, Matrix16c, Matrix4c, Vector16c,
};

const TRACE_TOL: f64 = 1e-9;
const HERM_TOL: f64 = 1e-10;
const NEGATIVITY_LOG_FLOOR: f64 = 1e-8;

/// 4x4 two-qubit density matrix in the fixed basis above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix4c);

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Trace and Hermiticity checks; the minimum eigenvalue is monitored
    /// separately because the master equation is not manifestly of Lindblad
    /// form for nonreciprocal coefficients.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NumericalInstability(format!(
                "density-matrix trace drifted to {tr}"
            )));
        }
        let herm = (self.0 - self.0.adjoint()).norm() / self.0.norm().max(f64::MIN_POSITIVE);
        if herm > HERM_TOL {
            return Err(Error::NumericalInstability(format!(
                "density matrix lost Hermiticity: relative defect {herm:.3e}"
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue; logged when it dips below the monitoring floor.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let lambda = min_hermitian_eigenvalue(&herm);
        if lambda < -NEGATIVITY_LOG_FLOOR {
            log::warn!("density matrix developed negativity: min eigenvalue {lambda:.3e}");
        }
        lambda
    }
}

/// Coupling rates and drive amplitudes in units of Γ11.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsParams {
    pub gamma11: f64,
    pub gamma22: f64,
    pub gamma12: f64,
    pub gamma21: f64,
    pub g12: f64,
    pub g21: f64,
    /// Rabi drive amplitudes (real, constant).
    pub omega1: f64,
    pub omega2: f64,
}

impl DynamicsParams {
    /// Undriven parameters from a normalized coupling matrix.
    pub fn from_coupling(m: &CouplingMatrix) -> Self {
        DynamicsParams {
            gamma11: m.gamma[0][0],
            gamma22: m.gamma[1][1],
            gamma12: m.gamma[0][1],
            gamma21: m.gamma[1][0],
            g12: m.g[0][1],
            g21: m.g[1][0],
            omega1: 0.0,
            omega2: 0.0,
        }
    }

    pub fn with_drive(mut self, omega1: f64, omega2: f64) -> Self {
        self.omega1 = omega1;
        self.omega2 = omega2;
        self
    }
}

/// 16x16 generator acting on the column-stacked density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian(pub Matrix16c);

/// Lowering operator of qubit 1 in the working basis ordering:
/// |e1 g2><e1 g2| decays into |g1 g2>, |e1 e2> into |g1 e2>.
fn sigma1() -> Matrix4c {
    let mut s = Matrix4c::zeros();
    s[(0, 3)] = Complex64::new(1.0, 0.0); // |1><4|
    s[(2, 1)] = Complex64::new(1.0, 0.0); // |3><2|
    s
}

fn sigma2() -> Matrix4c {
    let mut s = Matrix4c::zeros();
    s[(0, 2)] = Complex64::new(1.0, 0.0); // |1><3|
    s[(3, 1)] = Complex64::new(1.0, 0.0); // |4><2|
    s
}

// vec(A ρ B) = (B^T ⊗ A) vec(ρ) with column stacking
fn left_mul(a: &Matrix4c) -> Matrix16c {
    kron4(&Matrix4c::identity(), a)
}

fn right_mul(b: &Matrix4c) -> Matrix16c {
    kron4(&b.transpose(), &Matrix4c::identity())
}

fn sandwich(a: &Matrix4c, b: &Matrix4c) -> Matrix16c {
    kron4(&b.transpose(), a)
}

/// Assemble the master-equation generator: local dissipators with Γ11, Γ22,
/// the four cross terms with (Γ21/2 ± i g21) and (Γ12/2 ± i g12) carried
/// independently, and the resonant drive commutator with real Ω1, Ω2.
pub fn build_liouvillian(p: &DynamicsParams) -> Liouvillian {
    let s1 = sigma1();
    let s2 = sigma2();
    let s1d = s1.adjoint();
    let s2d = s2.adjoint();
    let i = Complex64::i();

    let mut l = Matrix16c::zeros();

    for (omega, s, sd) in [(p.omega1, &s1, &s1d), (p.omega2, &s2, &s2d)] {
        let x = sd + s;
        l += (left_mul(&x) - right_mul(&x)) * (i * omega);
    }

    for (gamma, s, sd) in [(p.gamma11, &s1, &s1d), (p.gamma22, &s2, &s2d)] {
        let n = sd * s;
        l += (sandwich(s, sd) * Complex64::new(2.0, 0.0) - left_mul(&n) - right_mul(&n))
            * Complex64::new(gamma / 2.0, 0.0);
    }

    let c21p = Complex64::new(p.gamma21 / 2.0, p.g21);
    let c21m = Complex64::new(p.gamma21 / 2.0, -p.g21);
    let c12p = Complex64::new(p.gamma12 / 2.0, p.g12);
    let c12m = Complex64::new(p.gamma12 / 2.0, -p.g12);

    l += (sandwich(&s2, &s1d) - right_mul(&(s1d * s2))) * c21p;
    l += (sandwich(&s1, &s2d) - left_mul(&(s2d * s1))) * c21m;
    l += (sandwich(&s1, &s2d) - right_mul(&(s2d * s1))) * c12p;
    l += (sandwich(&s2, &s1d) - left_mul(&(s1d * s2))) * c12m;

    Liouvillian(l)
}

/// |e1 g2><e1 g2|: only qubit one excited.
pub fn initial_state() -> DensityMatrix {
    let mut m = Matrix4c::zeros();
    m[(3, 3)] = Complex64::new(1.0, 0.0);
    DensityMatrix(m)
}

/// Propagate `rho0` across an ascending time grid (units of 1/Γ11) with the
/// scaling-and-squaring matrix exponential; the propagator is reused across
/// equal steps, so uniform grids cost one exponential.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    validate_grid(t_grid)?;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut v = vectorize(&rho0.0);
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, Matrix16c)> = None;
    for &t in t_grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let stale = !matches!(&cached, Some((step, _)) if *step == dt);
            if stale {
                cached = Some((dt, expm(&(l.0 * Complex64::new(dt, 0.0)))));
            }
            v = cached.as_ref().unwrap().1 * v;
        }
        t_prev = t;
        let state = DensityMatrix(unvectorize(&v));
        state.validate()?;
        state.min_eigenvalue();
        out.push(state);
    }
    Ok(out)
}

/// State at a single time (units of 1/Γ11).
pub fn evolve_to(rho0: &DensityMatrix, l: &Liouvillian, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(*rho0);
    }
    let v = expm(&(l.0 * Complex64::new(t, 0.0))) * vectorize(&rho0.0);
    let state = DensityMatrix(unvectorize(&v));
    state.validate()?;
    Ok(state)
}

/// Adaptive Dormand–Prince 5(4) integration of the same trajectory. Kept as
/// an independent route for cross-validation of the exponential propagator;
/// errors out if the tolerance forces the step below machine resolution.
pub fn evolve_rk(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    t_grid: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Vec<DensityMatrix>> {
    validate_grid(t_grid)?;
    let rhs = |v: &Vector16c| l.0 * v;

    let mut out = Vec::with_capacity(t_grid.len());
    let mut v = vectorize(&rho0.0);
    let mut t = 0.0;
    let mut h: f64 = 1e-3;
    for &t_target in t_grid {
        while t < t_target {
            let h_step = h.min(t_target - t);
            let (v_new, err_ratio) = dopri_step(&rhs, &v, h_step, rel_tol, abs_tol);
            if err_ratio <= 1.0 {
                t += h_step;
                v = v_new;
            }
            let shrink = 0.9 * err_ratio.powf(-0.2);
            h = (h_step * shrink.clamp(0.2, 5.0)).max(1e-14);
            if h <= 1e-13 && err_ratio > 1.0 {
                return Err(Error::IntegrationTolerance {
                    achieved: err_ratio * rel_tol,
                });
            }
        }
        let state = DensityMatrix(unvectorize(&v));
        state.validate()?;
        out.push(state);
    }
    Ok(out)
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty time grid".to_string()));
    }
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidInput(
            "time grid must be nonnegative".to_string(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(
            "time grid must be ascending".to_string(),
        ));
    }
    Ok(())
}

/// One Dormand–Prince step; returns (5th-order solution, scaled error ratio).
fn dopri_step(
    rhs: &dyn Fn(&Vector16c) -> Vector16c,
    v: &Vector16c,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> (Vector16c, f64) {
    let hc = |x: f64| Complex64::new(h * x, 0.0);
    let k1 = rhs(v);
    let k2 = rhs(&(v + k1 * hc(1.0 / 5.0)));
    let k3 = rhs(&(v + k1 * hc(3.0 / 40.0) + k2 * hc(9.0 / 40.0)));
    let k4 = rhs(&(v + k1 * hc(44.0 / 45.0) - k2 * hc(56.0 / 15.0) + k3 * hc(32.0 / 9.0)));
    let k5 = rhs(&(v + k1 * hc(19372.0 / 6561.0) - k2 * hc(25360.0 / 2187.0)
        + k3 * hc(64448.0 / 6561.0)
        - k4 * hc(212.0 / 729.0)));
    let k6 = rhs(&(v + k1 * hc(9017.0 / 3168.0) - k2 * hc(355.0 / 33.0)
        + k3 * hc(46732.0 / 5247.0)
        + k4 * hc(49.0 / 176.0)
        - k5 * hc(5103.0 / 18656.0)));
    let v5 = v + k1 * hc(35.0 / 384.0) + k3 * hc(500.0 / 1113.0) + k4 * hc(125.0 / 192.0)
        - k5 * hc(2187.0 / 6784.0)
        + k6 * hc(11.0 / 84.0);
    let k7 = rhs(&v5);
    let v4 = v + k1 * hc(5179.0 / 57600.0) + k3 * hc(7571.0 / 16695.0) + k4 * hc(393.0 / 640.0)
        - k5 * hc(92097.0 / 339200.0)
        + k6 * hc(187.0 / 2100.0)
        + k7 * hc(1.0 / 40.0);

    let mut err_ratio: f64 = 0.0;
    for i in 0..16 {
        let scale = abs_tol + rel_tol * v5[i].norm().max(v[i].norm());
        err_ratio = err_ratio.max((v5[i] - v4[i]).norm() / scale);
    }
    (v5, err_ratio.max(1e-12))
}

/// Steady state from the null space of the generator: the singular vector
/// of the smallest singular value, trace-normalized, cross-checked as a
/// fixed point of the propagator at t = 100/Γ11.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let svd = l.0.svd(true, true);
    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = svd.singular_values[order[0]];
    let second = svd.singular_values[order[1]];
    if smallest > 1e-6 * second {
        return Err(Error::DegenerateSteadyState {
            ratio: second / smallest.max(f64::MIN_POSITIVE),
        });
    }
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let null: Vector16c = Vector16c::from_fn(|j, _| v_t[(order[0], j)].conj());
    let mut rho = unvectorize(&null);
    let tr = rho.trace();
    if tr.norm() < 1e-8 * rho.norm() {
        return Err(Error::DegenerateSteadyState {
            ratio: second / smallest.max(f64::MIN_POSITIVE),
        });
    }
    rho /= tr;
    // remove the residual anti-Hermitian noise of the null vector
    rho = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);

    let state = DensityMatrix(rho);
    state.validate()?;
    let advanced = evolve_to(&state, l, 100.0)?;
    let drift = (advanced.0 - state.0).norm();
    if drift > 1e-6 {
        return Err(Error::NumericalInstability(format!(
            "steady-state candidate drifts by {drift:.3e} over 100/Γ11"
        )));
    }
    Ok(state)
}
