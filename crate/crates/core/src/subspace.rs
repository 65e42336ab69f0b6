//! Tolerance-aware subspaces of the Lie algebra and the kernel/image
//! verifiers for the adjoint action of a finite-order element.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::group::{adjoint_matrix, algebra_basis, GroupElement};
use crate::linalg::{singular_values, svd, RMat};
use crate::report::{digest_inputs, TrialRecord, VerificationReport};
use crate::tol::Tolerances;

/// Orthonormal basis of a subspace of ℝ^d. May be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<DVector<f64>>,
    pub tol: f64,
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize, tol: f64) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: Vec::new(),
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: f64) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: (0..ambient_dim)
                .map(|i| DVector::from_fn(ambient_dim, |k, _| if k == i { 1.0 } else { 0.0 }))
                .collect(),
            tol,
        }
    }

    /// Orthonormalizes the given spanning vectors.
    pub fn span(ambient_dim: usize, vectors: &[DVector<f64>], tol: f64) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: crate::linalg::orthonormalize_real(vectors, 1e-12),
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vectors as the columns of a d × k matrix.
    pub fn matrix(&self) -> RMat {
        let mut m = RMat::zeros(self.ambient_dim, self.dim());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let m = self.matrix();
        let g = m.transpose() * &m;
        (g - RMat::identity(self.dim(), self.dim()))
            .iter()
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Singular values above tol·max(σ_max, 1). The unit floor keeps roundoff
/// in an operator that should vanish (1 − Ad(e), say) from counting as rank.
fn numerical_rank(values: &[f64], tol: f64) -> usize {
    let smax = values.first().copied().unwrap_or(0.0);
    let threshold = tol * smax.max(1.0);
    values.iter().filter(|&&s| s > threshold).count()
}

fn require_square(a: &RMat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    Ok(())
}

/// Column space of `a`: left singular vectors above the rank threshold.
pub fn image_basis(a: &RMat, tol: f64) -> Result<SubspaceBasis> {
    require_square(a)?;
    let d = a.nrows();
    let svd = svd(a)?;
    let rank = numerical_rank(&svd.values, tol);
    Ok(SubspaceBasis {
        ambient_dim: d,
        vectors: (0..rank).map(|j| svd.u.column(j).into_owned()).collect(),
        tol,
    })
}

/// Null space of `a`: right singular vectors at or below the rank threshold.
/// The zero matrix has the whole space as kernel.
pub fn kernel_basis(a: &RMat, tol: f64) -> Result<SubspaceBasis> {
    require_square(a)?;
    let d = a.nrows();
    let svd = svd(a)?;
    let rank = numerical_rank(&svd.values, tol);
    Ok(SubspaceBasis {
        ambient_dim: d,
        vectors: (rank..d).map(|j| svd.v.column(j).into_owned()).collect(),
        tol,
    })
}

/// Rank of `a` at relative threshold `tol`.
pub fn rank(a: &RMat, tol: f64) -> Result<usize> {
    Ok(numerical_rank(&singular_values(a)?, tol))
}

/// Principal angles between two subspaces in radians, ascending.
/// There are min(dim P, dim Q) of them.
///
/// Each angle is atan2(sin, cos) with the sines taken from the part of the
/// smaller basis orthogonal to the larger span and the cosines from the
/// cross-Gram matrix, so both tiny and near-right angles stay accurate.
pub fn principal_angles(p: &SubspaceBasis, q: &SubspaceBasis) -> Result<Vec<f64>> {
    if p.ambient_dim != q.ambient_dim {
        return Err(Error::ShapeMismatch {
            expected: format!("ambient dimension {}", p.ambient_dim),
            found: format!("ambient dimension {}", q.ambient_dim),
        });
    }
    let (big, small) = if p.dim() >= q.dim() { (p, q) } else { (q, p) };
    if small.dim() == 0 {
        return Ok(Vec::new());
    }
    let b = big.matrix();
    let s = small.matrix();
    let cross = b.transpose() * &s;
    let resid = &s - &b * &cross;
    let mut sines = singular_values(&resid)?;
    let mut cosines = singular_values(&cross)?;
    sines.sort_by(f64::total_cmp);
    cosines.sort_by(|a, b| b.total_cmp(a));
    Ok(sines
        .iter()
        .zip(&cosines)
        .map(|(&sn, &cs)| sn.atan2(cs))
        .collect())
}

/// Outcome of [`subspace_equal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceComparison {
    pub equal: bool,
    /// Largest principal angle in radians; π/2 when the dimensions differ.
    pub residual: f64,
    pub dim_mismatch: bool,
}

/// Equality of spans up to `tol` radians of principal angle.
pub fn subspace_equal(p: &SubspaceBasis, q: &SubspaceBasis, tol: f64) -> Result<SubspaceComparison> {
    let angles = principal_angles(p, q)?;
    let dim_mismatch = p.dim() != q.dim();
    let residual = if dim_mismatch {
        std::f64::consts::FRAC_PI_2
    } else {
        angles.last().copied().unwrap_or(0.0)
    };
    Ok(SubspaceComparison {
        equal: !dim_mismatch && residual <= tol,
        residual,
        dim_mismatch,
    })
}

/// Σ_{i<n} Aⁱ.
pub fn power_sum(a: &RMat, n: u64) -> RMat {
    let d = a.nrows();
    let mut sum = RMat::zeros(d, d);
    let mut power = RMat::identity(d, d);
    for _ in 0..n {
        sum += &power;
        power = &power * a;
    }
    sum
}

/// Ad(g) together with 1 − Ad(g) and Σ_{i<n} Ad(g)ⁱ.
pub struct AdjointOperators {
    pub ad: RMat,
    pub one_minus: RMat,
    pub sum: RMat,
}

pub fn adjoint_operators(g: &GroupElement, n: u64) -> Result<AdjointOperators> {
    let basis = algebra_basis(g.spec);
    let ad = adjoint_matrix(&basis, g)?;
    let d = ad.nrows();
    Ok(AdjointOperators {
        one_minus: RMat::identity(d, d) - &ad,
        sum: power_sum(&ad, n),
        ad,
    })
}

/// Precondition shared by the finite-order verifiers: ‖gⁿ − e‖ ≤ n·tol.
pub(crate) fn check_torsion(g: &GroupElement, n: u64, tol: f64) -> std::result::Result<(), String> {
    if n == 0 {
        return Err("n must be positive".into());
    }
    let r = g.power_residual(n);
    if r <= n as f64 * tol {
        Ok(())
    } else {
        Err(format!("g^{n} differs from e by {r:e}"))
    }
}

/// Checks ker(1 + Ad(g) + ⋯ + Ad(g)ⁿ⁻¹) = Im(1 − Ad(g)) for gⁿ = e.
pub fn verify_kernel_image_identity(g: &GroupElement, n: u64, tol: &Tolerances) -> VerificationReport {
    const CHECK: &str = "kernel-image-identity";
    if let Err(why) = check_torsion(g, n, tol.membership) {
        return VerificationReport::rejected(CHECK, why);
    }
    let ops = match adjoint_operators(g, n) {
        Ok(ops) => ops,
        Err(e) => return VerificationReport::rejected(CHECK, e.to_string()),
    };
    let run = || -> Result<TrialRecord> {
        let image = image_basis(&ops.one_minus, tol.rank)?;
        let kernel = kernel_basis(&ops.sum, tol.rank)?;
        let cmp = subspace_equal(&image, &kernel, tol.subspace)?;
        let containment = image
            .vectors
            .iter()
            .map(|v| (&ops.sum * v).norm())
            .fold(0.0, f64::max);
        Ok(TrialRecord::new(0, None, digest_inputs(&[&g.matrix], &[n as f64]))
            .metric("dim_image", image.dim() as f64)
            .metric("dim_kernel", kernel.dim() as f64)
            .metric("angle_residual", cmp.residual)
            .metric("containment_residual", containment)
            .outcome(cmp.equal, cmp.residual))
    };
    match run() {
        Ok(trial) => VerificationReport::single(CHECK, trial),
        Err(e) => VerificationReport::rejected(CHECK, e.to_string()),
    }
}

/// Checks ker(1 − Ad(g)) ∩ ker(Σ_{i<n} Ad(g)ⁱ) = {0} for gⁿ = e.
pub fn verify_zero_intersection(g: &GroupElement, n: u64, tol: &Tolerances) -> VerificationReport {
    const CHECK: &str = "zero-intersection";
    if let Err(why) = check_torsion(g, n, tol.membership) {
        return VerificationReport::rejected(CHECK, why);
    }
    let ops = match adjoint_operators(g, n) {
        Ok(ops) => ops,
        Err(e) => return VerificationReport::rejected(CHECK, e.to_string()),
    };
    let run = || -> Result<TrialRecord> {
        let fixed = kernel_basis(&ops.one_minus, tol.rank)?;
        let kernel = kernel_basis(&ops.sum, tol.rank)?;
        let angles = principal_angles(&fixed, &kernel)?;
        let min_angle = angles.first().copied().unwrap_or(std::f64::consts::FRAC_PI_2);
        let intersection = angles.iter().filter(|&&a| a < tol.subspace).count();
        Ok(TrialRecord::new(0, None, digest_inputs(&[&g.matrix], &[n as f64]))
            .metric("dim_fixed", fixed.dim() as f64)
            .metric("dim_kernel", kernel.dim() as f64)
            .metric("intersection_dim", intersection as f64)
            .metric("min_angle", min_angle)
            // Residual is the closeness to a common direction.
            .outcome(intersection == 0, (std::f64::consts::FRAC_PI_2 - min_angle).max(0.0)))
    };
    match run() {
        Ok(trial) => VerificationReport::single(CHECK, trial),
        Err(e) => VerificationReport::rejected(CHECK, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_element, GroupSpec};
    use crate::linalg::{CMat, I, ONE};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn e(d: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&RMat::zeros(3, 3), 1e-9).unwrap().dim(), 0);
        assert_eq!(image_basis(&RMat::identity(3, 3), 1e-9).unwrap().dim(), 3);
        let a = RMat::from_diagonal(&DVector::from_vec(vec![1.0, 1e-14, 0.0]));
        assert_eq!(image_basis(&a, 1e-9).unwrap().dim(), 1);
        assert!(image_basis(&RMat::zeros(2, 3), 1e-9).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&RMat::identity(3, 3), 1e-9).unwrap().dim(), 0);
        assert_eq!(kernel_basis(&RMat::zeros(3, 3), 1e-9).unwrap().dim(), 3);
        let v = DVector::from_vec(vec![1.0, 2.0, 2.0]) / 3.0;
        let proj = &v * v.transpose();
        let k = kernel_basis(&proj, 1e-9).unwrap();
        assert_eq!(k.dim(), 2);
        for w in &k.vectors {
            assert!(w.dot(&v).abs() < 1e-12);
        }
    }

    #[test]
    fn equality_examples() {
        let p = SubspaceBasis::span(2, &[e(2, 0)], 1e-9);
        let self_cmp = subspace_equal(&p, &p, 1e-7).unwrap();
        assert!(self_cmp.equal && self_cmp.residual <= 1e-12);

        let q = SubspaceBasis::span(2, &[e(2, 1)], 1e-9);
        let cmp = subspace_equal(&p, &q, 1e-7).unwrap();
        assert!(!cmp.equal);
        assert!((cmp.residual - FRAC_PI_2).abs() < 1e-12);

        let theta = 1e-9f64;
        let r = SubspaceBasis::span(2, &[e(2, 0) * theta.cos() + e(2, 1) * theta.sin()], 1e-9);
        let cmp = subspace_equal(&p, &r, 1e-7).unwrap();
        assert!(cmp.equal);
        assert!((cmp.residual - theta).abs() < 1e-15, "{}", cmp.residual);

        let three = SubspaceBasis::empty(3, 1e-9);
        assert!(subspace_equal(&p, &three, 1e-7).is_err());
        let empty2 = SubspaceBasis::empty(2, 1e-9);
        let cmp = subspace_equal(&empty2, &SubspaceBasis::empty(2, 1e-9), 1e-7).unwrap();
        assert!(cmp.equal && cmp.residual == 0.0);
        assert!(subspace_equal(&empty2, &p, 1e-7).unwrap().dim_mismatch);
    }

    fn diag(entries: &[num_complex::Complex64]) -> CMat {
        CMat::from_diagonal(&DVector::from_vec(entries.to_vec()))
    }

    /// Rank by Gaussian elimination with partial pivoting, as an oracle.
    fn row_reduce_rank(a: &RMat) -> usize {
        let mut m = a.clone();
        let (rows, cols) = m.shape();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs())) else {
                break;
            };
            if m[(p, c)].abs() < 1e-10 {
                continue;
            }
            m.swap_rows(r, p);
            for i in 0..rows {
                if i != r {
                    let f = m[(i, c)] / m[(r, c)];
                    for k in 0..cols {
                        m[(i, k)] -= f * m[(r, k)];
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn kernel_image_identity_examples() {
        let tol = Tolerances::default();
        let u2 = GroupSpec::u(2).unwrap();
        let r = verify_kernel_image_identity(&GroupElement::identity(u2), 1, &tol);
        assert!(r.passed);
        assert_eq!(r.metric("dim_image"), Some(0.0));

        let su2 = GroupSpec::su(2).unwrap();
        let minus = GroupElement::new(su2, -CMat::identity(2, 2)).unwrap();
        let r = verify_kernel_image_identity(&minus, 2, &tol);
        assert!(r.passed);
        assert_eq!(r.metric("dim_kernel"), Some(0.0));

        let g = GroupElement::new(u2, diag(&[ONE, -ONE])).unwrap();
        let r = verify_kernel_image_identity(&g, 2, &tol);
        assert!(r.passed);
        assert_eq!(r.metric("dim_image"), Some(2.0));
        assert_eq!(r.metric("dim_kernel"), Some(2.0));
        let ops = adjoint_operators(&g, 2).unwrap();
        assert_eq!(row_reduce_rank(&ops.one_minus), 2);
        assert_eq!(4 - row_reduce_rank(&ops.sum), 2);
    }

    #[test]
    fn zero_intersection_examples() {
        let tol = Tolerances::default();
        let u2 = GroupSpec::u(2).unwrap();
        let r = verify_zero_intersection(&GroupElement::identity(u2), 2, &tol);
        assert!(r.passed);
        assert_eq!(r.metric("dim_fixed"), Some(4.0));
        assert_eq!(r.metric("dim_kernel"), Some(0.0));

        let g = GroupElement::new(u2, diag(&[ONE, -ONE])).unwrap();
        let r = verify_zero_intersection(&g, 2, &tol);
        assert!(r.passed);
        assert_eq!(r.metric("intersection_dim"), Some(0.0));
        // Oracle: stacking both operators gives full column rank exactly
        // when the kernels meet only in 0.
        let ops = adjoint_operators(&g, 2).unwrap();
        let mut stacked = RMat::zeros(8, 4);
        stacked.view_mut((0, 0), (4, 4)).copy_from(&ops.one_minus);
        stacked.view_mut((4, 0), (4, 4)).copy_from(&ops.sum);
        assert_eq!(row_reduce_rank(&stacked), 4);
    }

    #[test]
    fn non_torsion_input_is_rejected() {
        let su2 = GroupSpec::su(2).unwrap();
        let g = GroupElement::new(su2, diag(&[I, -I])).unwrap();
        let r = verify_kernel_image_identity(&g, 3, &Tolerances::default());
        assert!(r.is_rejected() && !r.passed);
        let r = verify_zero_intersection(&g, 3, &Tolerances::default());
        assert!(r.is_rejected());
        let g = random_element(su2, 1).unwrap();
        assert!(verify_kernel_image_identity(&g, 5, &Tolerances::default()).is_rejected());
    }

    fn matrix_strategy() -> impl Strategy<Value = RMat> {
        (1usize..6, prop::collection::vec(-2.0f64..2.0, 36), 0usize..6).prop_map(|(d, data, drop)| {
            let mut a = RMat::from_fn(d, d, |i, j| data[i * 6 + j]);
            // Zero some columns to get rank deficiency.
            for j in 0..drop.min(d) {
                if j % 2 == 0 {
                    a.column_mut(j).fill(0.0);
                }
            }
            a
        })
    }

    fn random_rotation(d: usize, seed: u64) -> RMat {
        if d < 2 {
            return RMat::identity(d, d);
        }
        random_element(GroupSpec::so(d.min(5)).unwrap(), seed).unwrap().real_matrix()
    }

    proptest! {
        #[test]
        fn rank_nullity(a in matrix_strategy()) {
            let d = a.nrows();
            let im = image_basis(&a, 1e-9).unwrap();
            let ker = kernel_basis(&a, 1e-9).unwrap();
            prop_assert_eq!(im.dim() + ker.dim(), d);
            prop_assert!(im.orthonormality_error() < 1e-12);
            prop_assert!(ker.orthonormality_error() < 1e-12);
        }

        #[test]
        fn equality_is_symmetric_and_basis_invariant(a in matrix_strategy(), b in matrix_strategy(), seed in 0u64..1000) {
            let d = a.nrows();
            let b = b.resize(d, d, 0.0);
            let p = image_basis(&a, 1e-9).unwrap();
            let q = image_basis(&b, 1e-9).unwrap();
            let pq = subspace_equal(&p, &q, 1e-7).unwrap();
            let qp = subspace_equal(&q, &p, 1e-7).unwrap();
            prop_assert_eq!(pq.equal, qp.equal);
            prop_assert!((pq.residual - qp.residual).abs() < 1e-10);
            prop_assert!(subspace_equal(&p, &p, 1e-7).unwrap().equal);
            // Re-base p by a random rotation within its span.
            let k = p.dim();
            if k >= 2 && d <= 5 {
                let rot = random_rotation(k, seed);
                let rebased = p.matrix() * rot;
                let p2 = SubspaceBasis {
                    ambient_dim: d,
                    vectors: (0..k).map(|j| rebased.column(j).into_owned()).collect(),
                    tol: 1e-9,
                };
                let again = subspace_equal(&p2, &q, 1e-7).unwrap();
                prop_assert!((again.residual - pq.residual).abs() <= 1e-10);
            }
        }
    }
}
