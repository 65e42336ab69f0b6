use super::algebra::{AlgebraBasis, AlgebraElement};
use super::spec::{Family, GroupSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::tol::TOL_MEMBERSHIP;

/// A matrix together with the group it is meant to belong to.
///
/// Real families are stored with zero imaginary parts so that every family
/// shares one matrix type.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub spec: GroupSpec,
    pub matrix: CMat,
}

impl GroupElement {
    /// Wraps a matrix after checking its shape and membership residual.
    pub fn new(spec: GroupSpec, matrix: CMat) -> Result<Self> {
        Self::with_tolerance(spec, matrix, TOL_MEMBERSHIP)
    }

    pub fn with_tolerance(spec: GroupSpec, matrix: CMat, tol: f64) -> Result<Self> {
        let m = spec.size();
        if matrix.nrows() != m || matrix.ncols() != m {
            return Err(Error::ShapeMismatch {
                expected: format!("{m}x{m}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let el = GroupElement { spec, matrix };
        let r = el.membership_residual();
        if !(r <= tol) {
            return Err(Error::InvalidInput(format!(
                "matrix is not in {spec}: membership residual {r:e}"
            )));
        }
        Ok(el)
    }

    /// Skips the membership check. For matrices built from exact group
    /// formulas (products, torus points, conjugates).
    pub(crate) fn unchecked(spec: GroupSpec, matrix: CMat) -> Self {
        GroupElement { spec, matrix }
    }

    pub fn from_real(spec: GroupSpec, matrix: &RMat) -> Result<Self> {
        Self::new(spec, linalg::to_complex(matrix))
    }

    pub fn identity(spec: GroupSpec) -> Self {
        GroupElement {
            spec,
            matrix: linalg::identity(spec.size()),
        }
    }

    /// Frobenius residual of the family's defining equations.
    pub fn membership_residual(&self) -> f64 {
        let g = &self.matrix;
        let m = g.nrows();
        let det = linalg::determinant(g);
        let unit = || linalg::distance_to_identity(&(g.adjoint() * g));
        match self.spec.family() {
            Family::U => unit(),
            Family::SU => unit() + (det - linalg::ONE).norm(),
            Family::SO => unit() + (det - linalg::ONE).norm() + imag_norm(g),
            Family::SL2R => {
                debug_assert_eq!(m, 2);
                (det - linalg::ONE).norm() + imag_norm(g)
            }
        }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::unchecked(self.spec, &self.matrix * &other.matrix)
    }

    /// g⁻¹; the conjugate transpose for compact families.
    pub fn inverse(&self) -> Result<GroupElement> {
        if self.spec.family().is_compact() {
            return Ok(GroupElement::unchecked(self.spec, self.matrix.adjoint()));
        }
        invert(&self.matrix).map(|inv| GroupElement::unchecked(self.spec, inv))
    }

    /// h g h⁻¹.
    pub fn conjugate_by(&self, h: &GroupElement) -> Result<GroupElement> {
        let hinv = h.inverse()?;
        Ok(GroupElement::unchecked(
            self.spec,
            &h.matrix * &self.matrix * &hinv.matrix,
        ))
    }

    pub fn pow(&self, k: u64) -> GroupElement {
        GroupElement::unchecked(self.spec, linalg::matrix_power(&self.matrix, k))
    }

    /// ‖gⁿ − e‖.
    pub fn power_residual(&self, n: u64) -> f64 {
        linalg::distance_to_identity(&linalg::matrix_power(&self.matrix, n))
    }

    pub fn real_matrix(&self) -> RMat {
        linalg::real_part(&self.matrix)
    }
}

fn imag_norm(g: &CMat) -> f64 {
    g.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
}

/// Inverse with a determinant guard.
pub(crate) fn invert(m: &CMat) -> Result<CMat> {
    let det = linalg::determinant(m).norm();
    let scale = linalg::frobenius(m).powi(m.nrows() as i32).max(1.0);
    if !(det > 1e-14 * scale) {
        return Err(Error::Singular(det));
    }
    m.clone().try_inverse().ok_or(Error::Singular(det))
}

/// exp of a Lie algebra element.
pub fn exp_element(basis: &AlgebraBasis, x: &AlgebraElement) -> Result<GroupElement> {
    let mat = basis.to_matrix(x)?;
    Ok(GroupElement::unchecked(basis.spec, mat.exp()))
}

/// Matrix of Ad(g): X ↦ g X g⁻¹ in the basis; column j holds the
/// coordinates of g B_j g⁻¹.
pub fn adjoint_matrix(basis: &AlgebraBasis, g: &GroupElement) -> Result<RMat> {
    if g.spec != basis.spec {
        return Err(Error::ShapeMismatch {
            expected: basis.spec.to_string(),
            found: g.spec.to_string(),
        });
    }
    let ginv = g.inverse()?;
    let d = basis.dim();
    let mut ad = RMat::zeros(d, d);
    for (j, b) in basis.matrices.iter().enumerate() {
        let image = &g.matrix * b * &ginv.matrix;
        for (k, bk) in basis.matrices.iter().enumerate() {
            ad[(k, j)] = linalg::trace_inner(bk, &image);
        }
    }
    Ok(ad)
}

/// Smallest d in [1, n_max] with ‖g^d − e‖ ≤ tol.
pub fn element_order(g: &GroupElement, n_max: u64, tol: f64) -> Option<u64> {
    let mut power = g.matrix.clone();
    for d in 1..=n_max {
        if linalg::distance_to_identity(&power) <= tol {
            return Some(d);
        }
        power = &power * &g.matrix;
    }
    None
}

/// Rotation by `angle` radians in the plane, R(θ) = [[cos, −sin], [sin, cos]].
pub fn rotation2(angle: f64) -> RMat {
    let (s, c) = angle.sin_cos();
    RMat::from_row_slice(2, 2, &[c, -s, s, c])
}
