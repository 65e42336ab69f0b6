use super::element::{rotation2, GroupElement};
use super::spec::{Family, GroupSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

/// g = k·exp(p) with k ∈ SO(2) and p symmetric traceless.
#[derive(Debug, Clone)]
pub struct CartanDecomposition {
    pub k: GroupElement,
    pub p: RMat,
}

impl CartanDecomposition {
    /// k·exp(p) as an element of SL(2,R).
    pub fn recompose(&self) -> GroupElement {
        let m = self.k.real_matrix() * exp_symmetric(&self.p);
        GroupElement::unchecked(GroupSpec::sl2r(), linalg::to_complex(&m))
    }
}

/// exp of a real symmetric matrix through its eigendecomposition.
pub fn exp_symmetric(p: &RMat) -> RMat {
    let eig = p.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = RMat::from_diagonal(&eig.eigenvalues.map(f64::exp));
    v * d * v.transpose()
}

/// Polar decomposition of an SL(2,R) element.
///
/// exp(p) is the positive-definite polar factor, which makes the
/// factorization unique.
pub fn cartan_decompose(g: &GroupElement) -> Result<CartanDecomposition> {
    if g.spec.family() != Family::SL2R {
        return Err(Error::Unsupported(format!(
            "Cartan decomposition is implemented for SL(2,R), not {}",
            g.spec
        )));
    }
    let a = g.real_matrix();
    let det = a.determinant();
    if !(det.abs() > 1e-12) {
        return Err(Error::Singular(det.abs()));
    }
    if (det - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("det g = {det}, expected 1")));
    }
    // For a 2×2 matrix with positive determinant, A + det(A)·A⁻ᵀ is a
    // positive multiple of the orthogonal polar factor.
    let angle = (a[(1, 0)] - a[(0, 1)]).atan2(a[(0, 0)] + a[(1, 1)]);
    let k = rotation2(angle);
    let pos = k.transpose() * &a;
    let pos = (&pos + pos.transpose()) * 0.5;
    let eig = pos.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Singular(det.abs()));
    }
    let v = &eig.eigenvectors;
    let mut p = v * RMat::from_diagonal(&eig.eigenvalues.map(f64::ln)) * v.transpose();
    p = (&p + p.transpose()) * 0.5;
    let tr = p.trace() / 2.0;
    p[(0, 0)] -= tr;
    p[(1, 1)] -= tr;
    let so2 = GroupSpec::so(2).expect("SO(2) is supported");
    Ok(CartanDecomposition {
        k: GroupElement::unchecked(so2, linalg::to_complex(&k)),
        p,
    })
}
