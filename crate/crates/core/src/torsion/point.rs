use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::phase::{denominator_lcm, Phase};
use crate::error::{Error, Result};
use crate::group::{rotation2, Family, GroupElement, GroupSpec};
use crate::linalg::{self, CMat, RMat};

/// A torsion point on the standard maximal torus, stored as exact phases.
///
/// U/SU: one phase per diagonal eigenvalue (SU phases sum to an integer).
/// SO(m): one rotation angle per 2×2 block, with a trailing 1 for odd m.
/// SO(2) and SL(2,R): a single rotation angle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusTorsionPoint {
    pub spec: GroupSpec,
    pub phases: Vec<Phase>,
}

impl TorusTorsionPoint {
    pub fn new(spec: GroupSpec, phases: Vec<Phase>) -> Result<Self> {
        if phases.len() != spec.phase_count() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} phases for {spec}", spec.phase_count()),
                found: format!("{} phases", phases.len()),
            });
        }
        if spec.family() == Family::SU {
            let total = phases
                .iter()
                .try_fold(Phase::ZERO, |acc, p| acc.checked_add(*p))
                .ok_or_else(|| Error::InvalidInput("phase denominators are too large".into()))?;
            if total != Phase::ZERO {
                return Err(Error::InvalidInput(format!(
                    "SU phases must sum to an integer, got {total}"
                )));
            }
        }
        Ok(TorusTorsionPoint { spec, phases })
    }

    /// Least common multiple of the phase denominators; the order of the
    /// realized matrix.
    pub fn exact_order(&self) -> u64 {
        denominator_lcm(&self.phases)
    }

    /// The diagonal or block-diagonal torus matrix.
    pub fn realize(&self) -> GroupElement {
        let m = self.spec.size();
        let matrix = match self.spec.family() {
            Family::U | Family::SU => {
                let diag = nalgebra::DVector::from_iterator(
                    m,
                    self.phases.iter().map(|p| Complex64::from_polar(1.0, p.radians())),
                );
                CMat::from_diagonal(&diag)
            }
            Family::SO | Family::SL2R => {
                let mut t = RMat::identity(m, m);
                for (j, p) in self.phases.iter().enumerate() {
                    t.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&rotation2(p.radians()));
                }
                linalg::to_complex(&t)
            }
        };
        GroupElement {
            spec: self.spec,
            matrix,
        }
    }
}

/// All torus points t with tⁿ = e, without duplicates, in lexicographic
/// order of the numerator tuples k/n.
pub fn enumerate_torsion(spec: GroupSpec, n: u32) -> Result<Vec<TorusTorsionPoint>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let len = spec.phase_count();
    let mut out = Vec::new();
    let mut ks = vec![0u32; len];
    loop {
        let keep = spec.family() != Family::SU || ks.iter().map(|&k| k as u64).sum::<u64>() % n as u64 == 0;
        if keep {
            out.push(TorusTorsionPoint {
                spec,
                phases: ks.iter().map(|&k| Phase::new(k as i64, n)).collect(),
            });
        }
        // Odometer increment, last index fastest.
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            ks[pos] += 1;
            if ks[pos] < n {
                break;
            }
            ks[pos] = 0;
        }
    }
}

/// Uniformly random torus point of order dividing n.
pub fn random_torsion_point<R: Rng + ?Sized>(spec: GroupSpec, n: u32, rng: &mut R) -> TorusTorsionPoint {
    let len = spec.phase_count();
    let mut ks: Vec<i64> = (0..len).map(|_| rng.random_range(0..n) as i64).collect();
    if spec.family() == Family::SU {
        let partial: i64 = ks[..len - 1].iter().sum();
        ks[len - 1] = -partial;
    }
    TorusTorsionPoint {
        spec,
        phases: ks.into_iter().map(|k| Phase::new(k, n)).collect(),
    }
}
