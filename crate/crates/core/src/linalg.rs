//! Small dense-matrix helpers shared by the group and subspace code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(m: usize) -> CMat {
    CMat::identity(m, m)
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_real(a: &RMat) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖a − b‖ in the Frobenius norm.
pub fn distance(a: &CMat, b: &CMat) -> f64 {
    frobenius(&(a - b))
}

/// ‖a − I‖ in the Frobenius norm.
pub fn distance_to_identity(a: &CMat) -> f64 {
    let mut acc = 0.0;
    for ((i, j), z) in a.iter().enumerate().map(|(k, z)| ((k % a.nrows(), k / a.nrows()), z)) {
        let d = if i == j { z - ONE } else { *z };
        acc += d.norm_sqr();
    }
    acc.sqrt()
}

/// Re tr(X* Y), the inner product used on every Lie algebra.
pub fn trace_inner(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(a: &CMat) -> RMat {
    a.map(|z| z.re)
}

pub fn max_imag(a: &CMat) -> f64 {
    a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// a^k by repeated squaring; a^0 = I.
pub fn matrix_power(a: &CMat, mut k: u64) -> CMat {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn determinant(a: &CMat) -> Complex64 {
    a.clone().determinant()
}

/// Orthonormalizes the columns of `vectors` (modified Gram-Schmidt twice),
/// dropping columns whose residual norm falls below `drop_tol`.
pub fn orthonormalize_real(vectors: &[DVector<f64>], drop_tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let nrm = w.norm();
        if nrm > drop_tol {
            out.push(w / nrm);
        }
    }
    out
}

/// Full singular value decomposition a = u·diag(values)·vᵀ, values in
/// non-increasing order.
///
/// Computed with faer: nalgebra's bidiagonal SVD can return factors that do
/// not reconstruct the input when singular values cluster, which happens
/// routinely for adjoint operators of finite-order elements.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: RMat,
    pub values: Vec<f64>,
    pub v: RMat,
}

fn to_faer(a: &RMat) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, f64>) -> RMat {
    RMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn svd_failed(a: &RMat) -> Error {
    Error::InvalidInput(format!("singular value decomposition of a {}x{} matrix did not converge", a.nrows(), a.ncols()))
}

pub fn svd(a: &RMat) -> Result<Svd> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: RMat::identity(m, m),
            values: Vec::new(),
            v: RMat::identity(n, n),
        });
    }
    let f = to_faer(a).svd().map_err(|_| svd_failed(a))?;
    let s = f.S().column_vector();
    Ok(Svd {
        u: from_faer(f.U()),
        values: (0..m.min(n)).map(|i| s[i]).collect(),
        v: from_faer(f.V()),
    })
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &RMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    to_faer(a).singular_values().map_err(|_| svd_failed(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_repeated_product() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.3, 0.1),
                Complex64::new(-0.2, 0.0),
                Complex64::new(0.5, -0.4),
                Complex64::new(0.9, 0.2),
            ],
        );
        let mut naive = identity(2);
        for k in 0..9u64 {
            assert!(distance(&matrix_power(&a, k), &naive) < 1e-13);
            naive = &naive * &a;
        }
    }

    #[test]
    fn distance_to_identity_agrees_with_distance() {
        let a = CMat::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, i as f64));
        assert!((distance_to_identity(&a) - distance(&a, &identity(3))).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs_clustered_spectrum() {
        // 1 − Ad(g) for g = diag(1, −1, i) in U(3), conjugated by a fixed
        // rotation; its singular values are 2, 2, √2 (four times) and 0.
        let phases = [0.0, 0.5, 0.25];
        let mut d = Vec::new();
        for a in phases {
            for b in phases {
                let t = std::f64::consts::TAU * (a - b);
                d.push(((1.0 - t.cos()).powi(2) + t.sin().powi(2)).sqrt());
            }
        }
        let q = {
            let raw = RMat::from_fn(9, 9, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 9.0 } else { 0.0 });
            raw.qr().q()
        };
        let a = &q * RMat::from_diagonal(&DVector::from_vec(d.clone())) * q.transpose();
        let f = svd(&a).unwrap();
        let rebuilt = &f.u * RMat::from_diagonal(&DVector::from_vec(f.values.clone())) * f.v.transpose();
        assert!(frobenius_real(&(rebuilt - &a)) < 1e-13);
        d.sort_by(|x, y| y.total_cmp(x));
        for (s, e) in f.values.iter().zip(&d) {
            assert!((s - e).abs() < 1e-13);
        }
        assert_eq!(singular_values(&a).unwrap().len(), 9);
        assert!(svd(&RMat::zeros(0, 0)).unwrap().values.is_empty());
    }
}
