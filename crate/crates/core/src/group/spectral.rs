//! Spectral data of compact group elements: eigenphases of unitary matrices,
//! rotation planes of orthogonal matrices, and the logarithms built on them.

use std::f64::consts::{PI, TAU};

use nalgebra::linalg::Schur;
use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};

/// Residual allowed when reassembling a matrix from its spectral data.
const RECONSTRUCTION_TOL: f64 = 1e-8;

/// g = V·diag(e^{2πiφ_j})·V* with V unitary and φ_j ∈ (−1/2, 1/2].
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub vectors: CMat,
    /// Eigenphases as fractions of a full turn.
    pub phases: Vec<f64>,
}

impl UnitaryEigen {
    pub fn reconstruct(&self, phases: &[f64]) -> CMat {
        let d = DVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| Complex64::from_polar(1.0, TAU * p)),
        );
        &self.vectors * CMat::from_diagonal(&d) * self.vectors.adjoint()
    }
}

fn principal_turns(z: Complex64) -> f64 {
    let mut p = z.arg() / TAU;
    if p <= -0.5 {
        p += 1.0;
    }
    p
}

/// Eigendecomposition of a unitary matrix through its complex Schur form.
///
/// For a normal matrix the triangular factor is diagonal, so the Schur
/// vectors are eigenvectors.
pub fn unitary_eigen(g: &CMat) -> Result<UnitaryEigen> {
    let m = g.nrows();
    let schur = Schur::try_new(g.clone(), 1e-15, 10_000)
        .ok_or(Error::DefectiveEigen(f64::INFINITY))?;
    let (q, t) = schur.unpack();
    let phases: Vec<f64> = (0..m).map(|j| principal_turns(t[(j, j)])).collect();
    let eig = UnitaryEigen { vectors: q, phases };
    let resid = linalg::distance(&eig.reconstruct(&eig.phases), g);
    let unit = linalg::distance_to_identity(&(eig.vectors.adjoint() * &eig.vectors));
    if !(resid <= RECONSTRUCTION_TOL && unit <= RECONSTRUCTION_TOL) {
        return Err(Error::DefectiveEigen(resid.max(unit)));
    }
    Ok(eig)
}

/// Skew-Hermitian logarithm of a unitary matrix, eigenvalue angles in (−π, π].
pub fn unitary_log(g: &CMat) -> Result<CMat> {
    let eig = unitary_eigen(g)?;
    let d = DVector::from_iterator(
        eig.phases.len(),
        eig.phases.iter().map(|&p| Complex64::new(0.0, TAU * p)),
    );
    let l = &eig.vectors * CMat::from_diagonal(&d) * eig.vectors.adjoint();
    Ok((&l - l.adjoint()) * Complex64::new(0.5, 0.0))
}

/// An invariant plane of a rotation with an oriented orthonormal basis.
///
/// For 0 < angle < π the rotation maps u ↦ cos·u + sin·v, so (u, v) is
/// positively oriented for the rotation sense. For angle 0 or π the pair is
/// an arbitrary orthonormal pair of the ±1 eigenspace.
#[derive(Debug, Clone)]
pub struct RotationPlane {
    pub angle: f64,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
}

/// Decomposition of a real orthogonal matrix into rotation planes, sorted by
/// angle in [0, π], plus at most one fixed axis.
#[derive(Debug, Clone)]
pub struct RotationSpectrum {
    pub planes: Vec<RotationPlane>,
    pub axis: Option<DVector<f64>>,
}

impl RotationSpectrum {
    /// Orthonormal frame [u₁ v₁ u₂ v₂ … (axis)].
    pub fn frame(&self) -> RMat {
        let m = 2 * self.planes.len() + usize::from(self.axis.is_some());
        let mut f = RMat::zeros(m, m);
        for (i, p) in self.planes.iter().enumerate() {
            f.set_column(2 * i, &p.u);
            f.set_column(2 * i + 1, &p.v);
        }
        if let Some(w) = &self.axis {
            f.set_column(m - 1, w);
        }
        f
    }

    /// Whether some orientation-reversing symmetry of the block form exists:
    /// a plane with angle 0 or π, or a fixed axis.
    pub fn has_reflection_freedom(&self) -> bool {
        self.axis.is_some() || self.planes.iter().any(|p| p.is_real())
    }

    /// Flips the frame's orientation without changing the block form.
    /// Returns false when no such flip exists.
    pub fn flip_orientation(&mut self) -> bool {
        if let Some(w) = &mut self.axis {
            w.neg_mut();
            return true;
        }
        if let Some(p) = self.planes.iter_mut().find(|p| p.is_real()) {
            p.v.neg_mut();
            return true;
        }
        false
    }

    /// Sign of det of the frame.
    pub fn orientation(&self) -> f64 {
        self.frame().determinant().signum()
    }

    /// Rebuilds Σ_planes (cos θ'·(uuᵀ + vvᵀ) + sin θ'·(vuᵀ − uvᵀ)) + wwᵀ.
    pub fn reconstruct(&self, angles: &[f64]) -> RMat {
        let m = 2 * self.planes.len() + usize::from(self.axis.is_some());
        let mut out = RMat::zeros(m, m);
        for (p, &theta) in self.planes.iter().zip(angles) {
            let (s, c) = theta.sin_cos();
            out += (&p.u * p.u.transpose() + &p.v * p.v.transpose()) * c;
            out += (&p.v * p.u.transpose() - &p.u * p.v.transpose()) * s;
        }
        if let Some(w) = &self.axis {
            out += w * w.transpose();
        }
        out
    }

    pub fn angles(&self) -> Vec<f64> {
        self.planes.iter().map(|p| p.angle).collect()
    }
}

impl RotationPlane {
    fn is_real(&self) -> bool {
        self.angle == 0.0 || self.angle == PI
    }
}

/// Rotation planes of a real orthogonal matrix with det +1.
///
/// Clusters the eigenvalues cos θ of the symmetric part; on each cluster the
/// skew part equals sin θ times a complex structure J, which pairs u with Ju.
pub fn rotation_spectrum(g: &RMat) -> Result<RotationSpectrum> {
    let m = g.nrows();
    let sym = (g + g.transpose()) * 0.5;
    let skew = (g - g.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    // Descending cos θ puts angles in ascending order.
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[*c.last().unwrap()] - eig.eigenvalues[idx]).abs() < 1e-7 => {
                c.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut planes = Vec::new();
    let mut axis = None;
    for cluster in clusters {
        let basis: Vec<DVector<f64>> = cluster
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let dim = basis.len();
        let cos = cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / dim as f64;
        let sin = (basis.iter().map(|b| (&skew * b).norm_squared()).sum::<f64>() / dim as f64).sqrt();
        if sin < 1e-9 && (cos.abs() - 1.0).abs() < 1e-6 {
            let angle = if cos > 0.0 { 0.0 } else { PI };
            let mut it = basis.into_iter();
            while let Some(u) = it.next() {
                match it.next() {
                    Some(v) => planes.push(RotationPlane { angle, u, v }),
                    None if angle == 0.0 && axis.is_none() => axis = Some(u),
                    None => {
                        return Err(Error::InvalidInput(
                            "orthogonal matrix has det −1 or an unpaired −1 eigenvector".into(),
                        ))
                    }
                }
            }
            continue;
        }
        if dim % 2 == 1 {
            return Err(Error::DefectiveEigen(sin));
        }
        let angle = sin.atan2(cos);
        let j = &skew / sin;
        let mut chosen: Vec<DVector<f64>> = Vec::new();
        for b in &basis {
            let mut u = b.clone();
            for q in &chosen {
                let c = q.dot(&u);
                u.axpy(-c, q, 1.0);
            }
            let nrm = u.norm();
            if nrm < 1e-6 {
                continue;
            }
            u /= nrm;
            let mut v = &j * &u;
            for q in &chosen {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
            v -= &u * u.dot(&v);
            v /= v.norm();
            chosen.push(u.clone());
            chosen.push(v.clone());
            planes.push(RotationPlane { angle, u, v });
            if chosen.len() == dim {
                break;
            }
        }
        if chosen.len() != dim {
            return Err(Error::DefectiveEigen(sin));
        }
    }
    planes.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let spectrum = RotationSpectrum { planes, axis };
    let resid = linalg::frobenius_real(&(spectrum.reconstruct(&spectrum.angles()) - g));
    if !(resid <= RECONSTRUCTION_TOL) {
        return Err(Error::DefectiveEigen(resid));
    }
    Ok(spectrum)
}

/// Real skew-symmetric logarithm of a rotation matrix.
pub fn orthogonal_log(g: &RMat) -> Result<RMat> {
    let spec = rotation_spectrum(g)?;
    let m = g.nrows();
    let mut l = RMat::zeros(m, m);
    for p in &spec.planes {
        l += (&p.v * p.u.transpose() - &p.u * p.v.transpose()) * p.angle;
    }
    Ok(l)
}
