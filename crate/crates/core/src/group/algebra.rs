use nalgebra::DVector;
use num_complex::Complex64;

use super::spec::{Family, GroupSpec};
use crate::error::{Error, Result};
use crate::linalg::{trace_inner, CMat, RMat, I, ONE};

/// Coordinates of a Lie algebra element in the fixed basis of its group.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub coords: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(coords: DVector<f64>) -> Self {
        AlgebraElement { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        AlgebraElement {
            coords: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebraElement {
            coords: &self.coords * s,
        }
    }
}

/// A basis of the Lie algebra, orthonormal for ⟨X, Y⟩ = Re tr(X* Y).
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub spec: GroupSpec,
    pub matrices: Vec<CMat>,
    pub gram: RMat,
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    /// Σ c_k B_k.
    pub fn to_matrix(&self, x: &AlgebraElement) -> Result<CMat> {
        if x.dim() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("algebra element of length {}", self.dim()),
                found: format!("length {}", x.dim()),
            });
        }
        let m = self.spec.size();
        let mut out = CMat::zeros(m, m);
        for (c, b) in x.coords.iter().zip(&self.matrices) {
            out += b * Complex64::new(*c, 0.0);
        }
        Ok(out)
    }

    /// Coordinates of a matrix by orthogonal projection onto the basis.
    /// Exact for matrices that lie in the algebra.
    pub fn coordinates(&self, mat: &CMat) -> AlgebraElement {
        AlgebraElement::new(DVector::from_iterator(
            self.dim(),
            self.matrices.iter().map(|b| trace_inner(b, mat)),
        ))
    }

    /// Distance of `mat` from the algebra's defining constraint.
    pub fn constraint_residual(&self, mat: &CMat) -> f64 {
        constraint_residual(self.spec.family(), mat)
    }
}

pub(crate) fn constraint_residual(family: Family, mat: &CMat) -> f64 {
    let herm = mat + mat.adjoint();
    let trace = mat.trace().norm();
    let imag: f64 = mat.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    let skew = crate::linalg::frobenius(&herm);
    match family {
        Family::U => skew,
        Family::SU => skew + trace,
        Family::SO => skew + imag,
        Family::SL2R => trace + imag,
    }
}

fn elementary(m: usize, i: usize, j: usize, value: Complex64) -> CMat {
    let mut e = CMat::zeros(m, m);
    e[(i, j)] = value;
    e
}

fn off_diagonal_skew(m: usize, complex: bool) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for j in 0..m {
        for k in (j + 1)..m {
            let real = (elementary(m, j, k, ONE) - elementary(m, k, j, ONE)) * Complex64::new(s, 0.0);
            out.push(real);
            if complex {
                let imag = (elementary(m, j, k, I) + elementary(m, k, j, I)) * Complex64::new(s, 0.0);
                out.push(imag);
            }
        }
    }
    out
}

/// Deterministic orthonormal basis of the Lie algebra of `spec`.
///
/// U(m): i·E_jj, (E_jk − E_kj)/√2, i(E_jk + E_kj)/√2.
/// SU(m): the off-diagonal part of U(m) plus i·H_l with H_l the normalized
/// traceless diagonals diag(1, …, 1, −l, 0, …)/√(l(l+1)).
/// SO(m): (E_jk − E_kj)/√2.
/// SL(2,R): diag(1,−1)/√2, (E_12 + E_21)/√2, (E_12 − E_21)/√2.
pub fn algebra_basis(spec: GroupSpec) -> AlgebraBasis {
    let m = spec.size();
    let matrices = match spec.family() {
        Family::U => {
            let mut out: Vec<CMat> = (0..m).map(|j| elementary(m, j, j, I)).collect();
            out.extend(off_diagonal_skew(m, true));
            out
        }
        Family::SU => {
            let mut out = Vec::new();
            for l in 1..m {
                let norm = ((l * (l + 1)) as f64).sqrt();
                let mut h = CMat::zeros(m, m);
                for j in 0..l {
                    h[(j, j)] = I / norm;
                }
                h[(l, l)] = I * (-(l as f64) / norm);
                out.push(h);
            }
            out.extend(off_diagonal_skew(m, true));
            out
        }
        Family::SO => off_diagonal_skew(m, false),
        Family::SL2R => {
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            vec![
                (elementary(2, 0, 0, ONE) - elementary(2, 1, 1, ONE)) * s,
                (elementary(2, 0, 1, ONE) + elementary(2, 1, 0, ONE)) * s,
                (elementary(2, 0, 1, ONE) - elementary(2, 1, 0, ONE)) * s,
            ]
        }
    };
    let d = matrices.len();
    let gram = RMat::from_fn(d, d, |i, j| trace_inner(&matrices[i], &matrices[j]));
    AlgebraBasis {
        spec,
        matrices,
        gram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    fn all_specs() -> Vec<GroupSpec> {
        let mut v = Vec::new();
        for m in 1..=5 {
            v.push(GroupSpec::u(m).unwrap());
        }
        for m in 2..=5 {
            v.push(GroupSpec::su(m).unwrap());
            v.push(GroupSpec::so(m).unwrap());
        }
        v.push(GroupSpec::sl2r());
        v
    }

    #[test]
    fn u1_basis_is_i() {
        let b = algebra_basis(GroupSpec::u(1).unwrap());
        assert_eq!(b.dim(), 1);
        assert_eq!(b.matrices[0][(0, 0)], I);
    }

    #[test]
    fn bases_are_orthonormal_and_satisfy_constraints() {
        for spec in all_specs() {
            let b = algebra_basis(spec);
            assert_eq!(b.dim(), spec.algebra_dim(), "{spec}");
            let err = frobenius(&crate::linalg::to_complex(&(&b.gram - RMat::identity(b.dim(), b.dim()))));
            assert!(err < 1e-14, "{spec}: gram error {err}");
            for mat in &b.matrices {
                assert!(b.constraint_residual(mat) < 1e-14, "{spec}");
            }
        }
    }

    #[test]
    fn su2_bracket_closes() {
        let b = algebra_basis(GroupSpec::su(2).unwrap());
        let rank = crate::subspace::rank(&b.gram, 1e-12).unwrap();
        assert_eq!(rank, 3);
        for x in &b.matrices {
            for y in &b.matrices {
                let bracket = x * y - y * x;
                let coords = b.coordinates(&bracket);
                let back = b.to_matrix(&coords).unwrap();
                assert!(frobenius(&(back - &bracket)) < 1e-12);
            }
        }
    }

    #[test]
    fn so3_basis_is_elementary_antisymmetric() {
        let b = algebra_basis(GroupSpec::so(3).unwrap());
        assert_eq!(b.dim(), 3);
        for mat in &b.matrices {
            let nonzero = mat.iter().filter(|z| z.norm() > 0.0).count();
            assert_eq!(nonzero, 2);
            assert!(frobenius(&(mat + mat.transpose())) == 0.0);
        }
    }

    #[test]
    fn coordinates_invert_to_matrix() {
        let spec = GroupSpec::su(3).unwrap();
        let b = algebra_basis(spec);
        let x = AlgebraElement::new(DVector::from_fn(8, |i, _| (i as f64 * 0.37).sin()));
        let mat = b.to_matrix(&x).unwrap();
        let back = b.coordinates(&mat);
        assert!((back.coords - x.coords).norm() < 1e-14);
        assert!(b.to_matrix(&AlgebraElement::zeros(3)).is_err());
    }
}
