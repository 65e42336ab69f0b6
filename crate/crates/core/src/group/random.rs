//! Seeded test-input generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::element::{rotation2, GroupElement};
use super::spec::{Family, GroupSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};

const MAX_REJECTIONS: usize = 100;

/// The generator behind every seeded routine.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Random element of `spec`, deterministic in `seed`.
pub fn random_element(spec: GroupSpec, seed: u64) -> Result<GroupElement> {
    random_element_with(spec, &mut rng_from_seed(seed))
}

/// Random element drawn from an existing generator.
///
/// Compact families orthogonalize a Gaussian matrix by QR with the phases
/// of R's diagonal divided out, then correct the determinant. SL(2,R)
/// rescales a Gaussian matrix to determinant one.
pub fn random_element_with<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R) -> Result<GroupElement> {
    let m = spec.size();
    for _ in 0..MAX_REJECTIONS {
        let candidate = match spec.family() {
            Family::U | Family::SU => {
                let z = CMat::from_fn(m, m, |_, _| {
                    Complex64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
                });
                let Some(mut q) = haar_fixed_qr(z) else {
                    continue;
                };
                if spec.family() == Family::SU {
                    let det = linalg::determinant(&q);
                    let root = Complex64::from_polar(1.0, -det.arg() / m as f64);
                    q *= root;
                }
                q
            }
            Family::SO => {
                let z = CMat::from_fn(m, m, |_, _| Complex64::new(gaussian(rng), 0.0));
                let Some(mut q) = haar_fixed_qr(z) else {
                    continue;
                };
                if linalg::determinant(&q).re < 0.0 {
                    q.column_mut(0).neg_mut();
                }
                q
            }
            Family::SL2R => {
                let mut a = RMat::from_fn(2, 2, |_, _| gaussian(rng));
                let det = a.determinant();
                if det.abs() < 1e-6 {
                    continue;
                }
                if det < 0.0 {
                    a.column_mut(0).neg_mut();
                }
                a /= det.abs().sqrt();
                linalg::to_complex(&a)
            }
        };
        return Ok(GroupElement::unchecked(spec, candidate));
    }
    Err(Error::RejectionLimit(MAX_REJECTIONS))
}

fn haar_fixed_qr(z: CMat) -> Option<CMat> {
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() < 1e-10 {
            return None;
        }
        let phase = d / d.norm();
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Some(q)
}

/// Random SL(2,R) conjugator k·exp(p) with ‖p‖ bounded by `spread`.
///
/// Used where a torsion element must stay well conditioned; `random_element`
/// can produce matrices with condition number in the thousands.
pub fn random_sl2_conjugator<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> GroupElement {
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let a = gaussian(rng) * spread;
    let b = gaussian(rng) * spread;
    let p = RMat::from_row_slice(2, 2, &[a, b, b, -a]);
    let k = rotation2(angle);
    let m = &k * linalg::real_part(&linalg::to_complex(&p).exp());
    GroupElement::unchecked(GroupSpec::sl2r(), linalg::to_complex(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<GroupSpec> {
        let mut v = vec![GroupSpec::sl2r()];
        for m in 1..=5 {
            v.push(GroupSpec::u(m).unwrap());
        }
        for m in 2..=5 {
            v.push(GroupSpec::su(m).unwrap());
            v.push(GroupSpec::so(m).unwrap());
        }
        v
    }

    #[test]
    fn deterministic_in_seed() {
        for spec in specs() {
            let a = random_element(spec, 42).unwrap();
            let b = random_element(spec, 42).unwrap();
            assert_eq!(a.matrix, b.matrix);
        }
    }

    #[test]
    fn members_within_tolerance() {
        for spec in specs() {
            for seed in 0..20 {
                let g = random_element(spec, seed).unwrap();
                let tol = if spec.family().is_compact() { 1e-12 } else { 1e-9 };
                assert!(g.membership_residual() <= tol, "{spec} seed {seed}");
            }
        }
    }

    #[test]
    fn u3_residual_below_1e12() {
        let spec = GroupSpec::u(3).unwrap();
        for seed in 0..100 {
            assert!(random_element(spec, seed).unwrap().membership_residual() <= 1e-12);
        }
    }

    #[test]
    fn different_seeds_differ() {
        for spec in specs() {
            for seed in 0..100u64 {
                let a = random_element(spec, 2 * seed).unwrap();
                let b = random_element(spec, 2 * seed + 1).unwrap();
                assert!(linalg::distance(&a.matrix, &b.matrix) >= 1e-3, "{spec} {seed}");
            }
        }
    }

    #[test]
    fn sl2_conjugator_is_member() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let h = random_sl2_conjugator(&mut rng, 0.5);
            assert!(h.membership_residual() < 1e-12);
        }
    }
}
