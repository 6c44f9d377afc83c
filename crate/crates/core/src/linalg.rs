//! Dense complex linear algebra helpers for the 4x4 state space and the
//! 16x16 superoperator space: Kronecker products, matrix exponential,
//! general eigenvalues, and a Jacobi Hermitian eigensolver.

use nalgebra::{Complex, SMatrix, SVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Matrix4c = SMatrix<C64, 4, 4>;
pub type Matrix16c = SMatrix<C64, 16, 16>;
pub type Vector16c = SVector<C64, 16>;

/// Column-stacking of a 4x4 matrix (nalgebra stores column-major, so this
/// is a straight copy).
pub fn vectorize(m: &Matrix4c) -> Vector16c {
    Vector16c::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &Vector16c) -> Matrix4c {
    Matrix4c::from_column_slice(v.as_slice())
}

/// Kronecker product of two 4x4 matrices.
pub fn kron4(a: &Matrix4c, b: &Matrix4c) -> Matrix16c {
    let mut out = Matrix16c::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let aij = a[(i, j)];
            for k in 0..4 {
                for l in 0..4 {
                    out[(4 * i + k, 4 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// 1-norm (maximum absolute column sum).
fn one_norm(m: &Matrix16c) -> f64 {
    (0..16)
        .map(|j| (0..16).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling-and-squaring with a [13/13] Padé
/// approximant (Higham 2005). Accurate to machine precision for the
/// moderately sized generators used here.
pub fn expm(a: &Matrix16c) -> Matrix16c {
    const THETA13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / C64::new(2f64.powi(s), 0.0);
    let b = |i: usize| C64::new(B[i], 0.0);

    let ident = Matrix16c::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;

    let u_inner = a6 * (a6 * b(13) + a4 * b(11) + a2 * b(9))
        + a6 * b(7)
        + a4 * b(5)
        + a2 * b(3)
        + ident * b(1);
    let u = a * u_inner;
    let v = a6 * (a6 * b(12) + a4 * b(10) + a2 * b(8))
        + a6 * b(6)
        + a4 * b(4)
        + a2 * b(2)
        + ident * b(0);

    let lhs = v - u;
    let rhs = v + u;
    let mut r = lhs
        .lu()
        .solve(&rhs)
        .expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..s {
        r = r * r;
    }
    r
}

/// Eigenvalues of a general 4x4 complex matrix via Schur triangularization.
pub fn eigenvalues4(m: &Matrix4c) -> Result<[C64; 4]> {
    // a failed Schur iteration is retried on a slightly rotated copy; the
    // rotation angle is removed from the eigenvalues afterwards
    for attempt in 0..4 {
        let phase = C64::new(0.0, 0.3 * attempt as f64).exp();
        let rotated = m * phase;
        if let Some(schur) = rotated.try_schur(1e-14, 2000) {
            let t = schur.unpack().1;
            let mut out = [C64::new(0.0, 0.0); 4];
            for i in 0..4 {
                out[i] = t[(i, i)] / phase;
            }
            return Ok(out);
        }
    }
    Err(Error::NumericalInstability(
        "Schur iteration did not converge for 4x4 eigenproblem".to_string(),
    ))
}

/// Eigendecomposition of a 4x4 Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues (ascending) and the unitary of column
/// eigenvectors. Deliberately independent of the Schur path above.
pub fn hermitian_eigen4(m: &Matrix4c) -> ([f64; 4], Matrix4c) {
    let mut a = *m;
    let mut v = Matrix4c::identity();

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off < 1e-30 * (a.norm_squared().max(1e-300)) {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase that makes the pivot real, then a real Jacobi rotation
                let phase = apq / apq.norm();
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(aqq - app);
                let c = theta.cos();
                let s = theta.sin();
                let cs = C64::new(c, 0.0);
                let sn = phase * s;

                // A <- J^H A J with J affecting columns p, q
                for k in 0..4 {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs - akq * sn.conj();
                    a[(k, q)] = akp * sn + akq * cs;
                }
                for k in 0..4 {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs - aqk * sn;
                    a[(q, k)] = apk * sn.conj() + aqk * cs;
                }
                for k in 0..4 {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs - vkq * sn.conj();
                    v[(k, q)] = vkp * sn + vkq * cs;
                }
            }
        }
    }

    let mut idx = [0usize, 1, 2, 3];
    let vals = [a[(0, 0)].re, a[(1, 1)].re, a[(2, 2)].re, a[(3, 3)].re];
    idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut eigvals = [0.0f64; 4];
    let mut vecs = Matrix4c::zeros();
    for (new, &old) in idx.iter().enumerate() {
        eigvals[new] = vals[old];
        for k in 0..4 {
            vecs[(k, new)] = v[(k, old)];
        }
    }
    (eigvals, vecs)
}

/// Smallest eigenvalue of a Hermitian 4x4 matrix.
pub fn min_hermitian_eigenvalue(m: &Matrix4c) -> f64 {
    hermitian_eigen4(m).0[0]
}
