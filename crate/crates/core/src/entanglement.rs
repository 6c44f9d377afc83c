//! Wootters concurrence of a two-qubit density matrix in the basis
//! |1> = |g1 g2>, |2> = |e1 e2>, |3> = |g1 e2>, |4> = |e1 g2>.

use num_complex::Complex64;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues4, Matrix4c};

/// σ_y ⊗ σ_y expressed in the basis ordering above. In natural tensor
/// order it maps gg→-ee, ge→eg, eg→ge, ee→-gg; permuting into
/// (gg, ee, ge, eg) gives an off-diagonal ±1 matrix. Verified against Bell
/// and product states in the tests.
fn spin_flip_operator() -> Matrix4c {
    let mut y = Matrix4c::zeros();
    y[(0, 1)] = Complex64::new(-1.0, 0.0);
    y[(1, 0)] = Complex64::new(-1.0, 0.0);
    y[(2, 3)] = Complex64::new(1.0, 0.0);
    y[(3, 2)] = Complex64::new(1.0, 0.0);
    y
}

/// Spin-flipped state (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y).
pub fn spin_flip(rho: &Matrix4c) -> Matrix4c {
    let y = spin_flip_operator();
    y * rho.conjugate() * y
}

/// Concurrence value in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence {
    value: f64,
}

impl Concurrence {
    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Wootters concurrence `max(0, √u1 - √u2 - √u3 - √u4)` from the descending
/// eigenvalues `u_i` of ρ·ρ̃. The product is not Hermitian, so a general
/// eigensolver is used; its eigenvalues must come out real and nonnegative
/// up to roundoff for a physical state.
pub fn concurrence(rho: &DensityMatrix) -> Result<Concurrence> {
    let product = rho.0 * spin_flip(&rho.0);
    let eig = eigenvalues4(&product)?;

    let mut us = [0.0f64; 4];
    for (slot, lambda) in us.iter_mut().zip(eig) {
        if lambda.im.abs() > 1e-6 || lambda.re < -1e-6 {
            return Err(Error::NumericalInstability(format!(
                "eigenvalue {lambda} of rho*rho_tilde is not physical"
            )));
        }
        if lambda.im.abs() > 1e-8 || lambda.re < -1e-8 {
            log::debug!("concurrence eigenvalue cleanup: {lambda}");
        }
        *slot = lambda.re.max(0.0);
    }
    us.sort_by(|a, b| b.total_cmp(a));
    // eigenvalue noise below the dominant one by 1e-12 is a numerical zero;
    // the square root would otherwise amplify it far above roundoff
    let floor = 1e-12 * us[0];
    for u in us.iter_mut().skip(1) {
        if *u < floor {
            *u = 0.0;
        }
    }

    let raw = us[0].sqrt() - us[1].sqrt() - us[2].sqrt() - us[3].sqrt();
    let value = raw.max(0.0);
    if value > 1.0 + 1e-8 {
        return Err(Error::NumericalInstability(format!(
            "concurrence exceeded 1 by {:.3e}",
            value - 1.0
        )));
    }
    if value > 1.0 {
        log::debug!("concurrence clipped from {value} to 1");
    }
    Ok(Concurrence {
        value: value.min(1.0),
    })
}
