//! Graphene surface conductivity: the local low-temperature Kubo form
//! (Drude intraband + step/log interband) and the drift-biased nonlocal
//! form obtained by Doppler-shifting the frequency argument.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::{ev_to_joule, ps_to_seconds, Frequency, E_CHARGE, H, HBAR, V_FERMI};

/// Relative guard band around the interband edge `hbar*omega = 2*mu_c`.
const INTERBAND_GUARD_REL: f64 = 1e-9;

/// Relative floor below which the Doppler-shifted frequency is treated as
/// singular.
const DOPPLER_FLOOR_REL: f64 = 1e-12;

/// Universal conductivity scale `sigma_min = pi e^2 / 2h` (S).
pub const SIGMA_MIN: f64 = std::f64::consts::PI * E_CHARGE * E_CHARGE / (2.0 * H);

/// Drift-biased graphene sheet parameters. Internally SI: `mu_c` in J,
/// `tau` in s, `v_d` in m/s (signed, along +x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrapheneParams {
    mu_c: f64,
    tau: f64,
    v_d: f64,
}

impl GrapheneParams {
    /// Build from the units used at the CLI boundary: chemical potential in
    /// eV, intraband scattering time in ps, drift velocity as a fraction of
    /// the Fermi velocity.
    pub fn new(mu_c_ev: f64, tau_ps: f64, vd_over_vf: f64) -> Result<Self> {
        if !(mu_c_ev > 0.0) || !mu_c_ev.is_finite() {
            return Err(Error::InvalidInput(format!(
                "chemical potential must be positive, got {mu_c_ev} eV"
            )));
        }
        if !(tau_ps > 0.0) || !tau_ps.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scattering time must be positive, got {tau_ps} ps"
            )));
        }
        if !(vd_over_vf.abs() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "|v_d| must be below the Fermi velocity, got {vd_over_vf} v_F"
            )));
        }
        Ok(GrapheneParams {
            mu_c: ev_to_joule(mu_c_ev),
            tau: ps_to_seconds(tau_ps),
            v_d: vd_over_vf * V_FERMI,
        })
    }

    /// Same sheet with a different drift velocity.
    pub fn with_drift(mut self, vd_over_vf: f64) -> Result<Self> {
        if !(vd_over_vf.abs() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "|v_d| must be below the Fermi velocity, got {vd_over_vf} v_F"
            )));
        }
        self.v_d = vd_over_vf * V_FERMI;
        Ok(self)
    }

    pub fn mu_c(&self) -> f64 {
        self.mu_c
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Drift velocity in m/s (signed).
    pub fn v_d(&self) -> f64 {
        self.v_d
    }

    pub fn is_drifting(&self) -> bool {
        self.v_d != 0.0
    }
}

/// Complex surface conductivity (S).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductivity {
    pub sigma: Complex64,
}

/// Kubo conductivity at a signed frequency. Negative arguments use the
/// reality condition sigma(-w) = conj(sigma(w)), which the Drude term obeys
/// verbatim and the interband term needs for an even real part.
pub(crate) fn kubo_sigma_signed(omega: f64, p: &GrapheneParams) -> Result<Complex64> {
    if omega < 0.0 {
        return Ok(kubo_sigma_signed(-omega, p)?.conj());
    }
    let gamma_sc = 1.0 / p.tau;
    let drude = Complex64::i() * E_CHARGE * E_CHARGE * p.mu_c
        / (std::f64::consts::PI * HBAR * HBAR * Complex64::new(omega, gamma_sc));

    let photon = HBAR * omega;
    let edge = 2.0 * p.mu_c;
    if (photon - edge).abs() < INTERBAND_GUARD_REL * edge {
        return Err(Error::InterbandEdge {
            rel: INTERBAND_GUARD_REL,
        });
    }
    let step = if photon > edge { 1.0 } else { 0.0 };
    let log_term = ((photon - edge) / (photon + edge)).abs().ln();
    let inter =
        E_CHARGE * E_CHARGE / (4.0 * HBAR) * Complex64::new(step, log_term / std::f64::consts::PI);

    Ok(drude + inter)
}

/// Local Kubo surface conductivity sigma(omega) in the low-temperature limit.
pub fn local_conductivity(omega: Frequency, p: &GrapheneParams) -> Result<Conductivity> {
    Ok(Conductivity {
        sigma: kubo_sigma_signed(omega.omega(), p)?,
    })
}

/// Drift-biased nonlocal conductivity
/// `sigma_d = omega/(omega - q_x v_d) * sigma(omega - q_x v_d)`.
///
/// For `v_d = 0` this reduces to [`local_conductivity`] bit-identically.
pub fn doppler_conductivity(
    omega: Frequency,
    q_x: f64,
    p: &GrapheneParams,
) -> Result<Conductivity> {
    let w = omega.omega();
    let shifted = w - q_x * p.v_d;
    if shifted.abs() < DOPPLER_FLOOR_REL * w {
        return Err(Error::DopplerSingularity);
    }
    Ok(Conductivity {
        sigma: (w / shifted) * kubo_sigma_signed(shifted, p)?,
    })
}

/// Doppler conductivity continued to a complex shifted frequency. Used only
/// by the dispersion solver's `complex` Doppler-argument mode; the interband
/// log keeps the |·| form of the real-axis formula, evaluated on the complex
/// ratio's modulus.
pub(crate) fn doppler_conductivity_complex(
    omega: Frequency,
    q_x: Complex64,
    p: &GrapheneParams,
) -> Result<Complex64> {
    let w = omega.omega();
    let shifted = Complex64::new(w, 0.0) - q_x * p.v_d;
    if shifted.norm() < DOPPLER_FLOOR_REL * w {
        return Err(Error::DopplerSingularity);
    }
    let gamma_sc = 1.0 / p.tau;
    let drude = Complex64::i() * E_CHARGE * E_CHARGE * p.mu_c
        / (std::f64::consts::PI * HBAR * HBAR * (shifted + Complex64::new(0.0, gamma_sc)));
    let photon = HBAR * shifted;
    let edge = 2.0 * p.mu_c;
    let ratio = (photon - edge) / (photon + edge);
    if ratio.norm() < INTERBAND_GUARD_REL {
        return Err(Error::InterbandEdge {
            rel: INTERBAND_GUARD_REL,
        });
    }
    let step = if photon.re > edge { 1.0 } else { 0.0 };
    let inter = E_CHARGE * E_CHARGE / (4.0 * HBAR)
        * (Complex64::new(step, 0.0) + Complex64::i() / std::f64::consts::PI * ratio.norm().ln());
    Ok(w / shifted * (drude + inter))
}

/// TM surface waves require a positive imaginary part of the (shifted)
/// conductivity under the e^{-i omega t} convention.
pub fn supports_tm(omega: Frequency, q_x: f64, p: &GrapheneParams) -> Result<bool> {
    Ok(doppler_conductivity(omega, q_x, p)?.sigma.im > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn std_sheet(vd_over_vf: f64) -> GrapheneParams {
        GrapheneParams::new(0.1, 0.35, vd_over_vf).unwrap()
    }

    fn f15() -> Frequency {
        Frequency::from_thz(15.0).unwrap()
    }

    #[test]
    fn rejects_unphysical_params() {
        assert!(GrapheneParams::new(0.0, 0.35, 0.0).is_err());
        assert!(GrapheneParams::new(0.1, -1.0, 0.0).is_err());
        assert!(GrapheneParams::new(0.1, 0.35, 1.0).is_err());
        assert!(GrapheneParams::new(0.1, 0.35, -1.5).is_err());
    }

    /// Frozen from an independent high-precision evaluation of the Kubo
    /// formula (mpmath, 30 digits): sigma(2π·15e12)/sigma_min for
    /// mu_c = 0.1 eV, tau = 0.35 ps.
    #[test]
    fn local_conductivity_at_15_thz_matches_reference() {
        let sigma = local_conductivity(f15(), &std_sheet(0.0)).unwrap().sigma;
        let normalized = sigma / SIGMA_MIN;
        assert_relative_eq!(normalized.re, 0.06216345062312368, max_relative = 1e-12);
        assert_relative_eq!(normalized.im, 1.8463796574909719, max_relative = 1e-12);
    }

    #[test]
    fn below_interband_edge_heaviside_is_zero() {
        // 15 THz photon is 0.062 eV < 2*mu_c = 0.2 eV: Re sigma is pure Drude
        let p = std_sheet(0.0);
        let sigma = local_conductivity(f15(), &p).unwrap().sigma;
        let gamma_sc = 1.0 / p.tau();
        let w = f15().omega();
        let drude_re = E_CHARGE * E_CHARGE * p.mu_c() * gamma_sc
            / (std::f64::consts::PI * HBAR * HBAR * (w * w + gamma_sc * gamma_sc));
        assert_relative_eq!(sigma.re, drude_re, max_relative = 1e-12);
    }

    #[test]
    fn high_frequency_interband_plateau() {
        // far above the edge the Drude term dies and |sigma| -> e^2/4ħ
        let p = std_sheet(0.0);
        let omega = Frequency::from_omega(1e20).unwrap();
        let sigma = local_conductivity(omega, &p).unwrap().sigma;
        let plateau = E_CHARGE * E_CHARGE / (4.0 * HBAR);
        assert_relative_eq!(sigma.norm(), plateau, max_relative = 1e-3);
        assert_relative_eq!(sigma.re, plateau, max_relative = 1e-3);
    }

    #[test]
    fn interband_edge_is_a_domain_error() {
        let p = std_sheet(0.0);
        let omega_edge = 2.0 * p.mu_c() / HBAR;
        assert!(matches!(
            local_conductivity(Frequency::from_omega(omega_edge).unwrap(), &p),
            Err(Error::InterbandEdge { .. })
        ));
    }

    #[test]
    fn doppler_reduces_to_local_for_zero_drift() {
        let p = std_sheet(0.0);
        let local = local_conductivity(f15(), &p).unwrap().sigma;
        for q_x in [-1e8, -3e5, 0.0, 1e6, 5e8] {
            let d = doppler_conductivity(f15(), q_x, &p).unwrap().sigma;
            assert_eq!(d, local); // bit-identical
        }
    }

    #[test]
    fn doppler_tilts_toward_drift_direction() {
        // for v_d = -v_F/2 the conductivity is larger at q_x < 0
        let p = std_sheet(-0.5);
        let q = 5e7;
        let minus = doppler_conductivity(f15(), -q, &p).unwrap().sigma;
        let plus = doppler_conductivity(f15(), q, &p).unwrap().sigma;
        assert!(minus.im > plus.im);
    }

    #[test]
    fn doppler_singularity_detected() {
        let p = std_sheet(-0.5);
        let q_x = f15().omega() / p.v_d();
        assert!(matches!(
            doppler_conductivity(f15(), q_x, &p),
            Err(Error::DopplerSingularity)
        ));
    }

    #[test]
    fn negative_shifted_frequency_obeys_reality() {
        let p = std_sheet(-0.5);
        // large |q_x| pushes the shifted frequency negative
        let q_x = -4.0 * f15().omega() / V_FERMI;
        let sigma = doppler_conductivity(f15(), q_x, &p).unwrap().sigma;
        assert!(sigma.is_finite());
        // prefactor w/shifted < 0, conj(sigma) has Im < 0 -> product well defined
        let shifted = f15().omega() - q_x * p.v_d();
        assert!(shifted < 0.0);
        let expected = (f15().omega() / shifted) * kubo_sigma_signed(-shifted, &p).unwrap().conj();
        assert_eq!(sigma, expected);
    }

    #[test]
    fn supports_tm_at_15_thz() {
        // sign check frozen from the same independent evaluation
        assert!(supports_tm(f15(), 0.0, &std_sheet(0.0)).unwrap());
    }

    #[test]
    fn no_tm_support_far_above_edge() {
        // hbar*omega >> 2 mu_c: interband log dominates, Im sigma < 0
        let omega = Frequency::from_omega(1e16).unwrap();
        assert!(!supports_tm(omega, 0.0, &std_sheet(0.0)).unwrap());
    }

    #[test]
    fn zero_drift_tm_is_qx_independent() {
        let p = std_sheet(0.0);
        let a = supports_tm(f15(), 0.0, &p).unwrap();
        for q_x in [-1e9, -1e4, 1e4, 1e9] {
            assert_eq!(supports_tm(f15(), q_x, &p).unwrap(), a);
        }
    }

    /// Recombination oracle: an independent term-by-term evaluation of the
    /// Kubo formula in explicit real/imaginary arithmetic, kept free of the
    /// complex-number path used by the implementation.
    fn kubo_oracle(omega: f64, p: &GrapheneParams) -> Complex64 {
        let gamma_sc = 1.0 / p.tau();
        let a = E_CHARGE * E_CHARGE * p.mu_c() / (std::f64::consts::PI * HBAR * HBAR);
        let denom = omega * omega + gamma_sc * gamma_sc;
        let drude_re = a * gamma_sc / denom;
        let drude_im = a * omega / denom;
        let photon = HBAR * omega;
        let edge = 2.0 * p.mu_c();
        let step = if photon > edge { 1.0 } else { 0.0 };
        let log_term = ((photon - edge) / (photon + edge)).abs().ln() / std::f64::consts::PI;
        let scale = E_CHARGE * E_CHARGE / (4.0 * HBAR);
        Complex64::new(drude_re + scale * step, drude_im + scale * log_term)
    }

    #[test]
    fn terms_recombine_against_real_arithmetic_oracle() {
        let p = std_sheet(0.0);
        // deterministic pseudo-random sweep over 1e4 frequencies
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut tested = 0;
        while tested < 10_000 {
            // 0.1..500 THz, log-uniform
            let f_thz = 0.1 * (5000f64).powf(rnd());
            let omega = Frequency::from_thz(f_thz).unwrap();
            let sigma = match local_conductivity(omega, &p) {
                Ok(c) => c.sigma,
                Err(_) => continue, // interband guard band
            };
            let oracle = kubo_oracle(omega.omega(), &p);
            let rel = (sigma - oracle).norm() / oracle.norm();
            assert!(rel < 1e-12, "f = {f_thz} THz: rel {rel:.2e}");
            tested += 1;
        }
    }

    proptest! {
        /// sigma_d(v_d, q_x) = sigma_d(-v_d, -q_x): the formula depends only
        /// on the product q_x * v_d.
        #[test]
        fn drift_mirror_symmetry(
            qx in -5e8f64..5e8,
            vd in -0.99f64..0.99,
            f_thz in 1.0f64..60.0,
        ) {
            let omega = Frequency::from_thz(f_thz).unwrap();
            let a = doppler_conductivity(omega, qx, &std_sheet(vd));
            let b = doppler_conductivity(omega, -qx, &std_sheet(-vd));
            match (a, b) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x.sigma, y.sigma),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "one side errored, the other did not"),
            }
        }

        /// The two Kubo terms recombine continuously away from the edge:
        /// evaluated value stays finite and Re sigma >= 0 at positive
        /// frequencies (passivity at the operating points used).
        #[test]
        fn passive_real_part(f_thz in 0.2f64..500.0) {
            let omega = Frequency::from_thz(f_thz).unwrap();
            if let Ok(c) = local_conductivity(omega, &std_sheet(0.0)) {
                prop_assert!(c.sigma.re >= 0.0);
                prop_assert!(c.sigma.is_finite());
            }
        }
    }
}
