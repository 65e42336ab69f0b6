use std::f64::consts::{PI, TAU};

use super::phase::{denominator_lcm, Phase};
use crate::error::{Error, Result};
use crate::group::spectral::{rotation_spectrum, unitary_eigen};
use crate::group::{Family, GroupElement, GroupSpec};
use crate::linalg;

/// A torsion element close to a given group element.
#[derive(Debug, Clone)]
pub struct TorsionApproximant {
    pub element: GroupElement,
    /// Frobenius distance to the input.
    pub distance: f64,
    /// Guaranteed upper bound c/N on the distance.
    pub bound: f64,
    /// Rounded phases; eigenphases for U/SU, block angles for SO.
    pub phases: Vec<Phase>,
    /// Order of the approximant, a divisor of N.
    pub order: u64,
}

/// Constant c in distance ≤ c/N.
///
/// Each U eigenvalue moves by at most π/N. Keeping the SU determinant forces
/// moves up to 2π/N, except in SU(2) where the two phases are negatives of
/// each other and plain rounding already preserves the sum. Each SO rotation
/// plane contributes √2·π/N.
pub fn approximation_constant(spec: GroupSpec) -> f64 {
    let m = spec.size() as f64;
    match spec.family() {
        Family::U => PI * m.sqrt(),
        Family::SU if spec.size() == 2 => PI * 2f64.sqrt(),
        Family::SU => TAU * m.sqrt(),
        Family::SO => PI * (2.0 * spec.torus_rank() as f64).sqrt(),
        Family::SL2R => f64::INFINITY,
    }
}

/// Integers k_j with |k_j − x_j| < 1 and Σ k_j = round(Σ x_j), rounding up the
/// entries with the largest fractional parts.
fn largest_remainder(x: &[f64]) -> Vec<i64> {
    let target = x.iter().sum::<f64>().round() as i64;
    let mut k: Vec<i64> = x.iter().map(|v| v.floor() as i64).collect();
    let deficit = target - k.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| (x[b] - x[b].floor()).total_cmp(&(x[a] - x[a].floor())).then(a.cmp(&b)));
    for &j in order.iter().take(deficit.clamp(0, x.len() as i64) as usize) {
        k[j] += 1;
    }
    k
}

/// Rounds the eigenphases of g to multiples of 1/N inside its own torus.
pub fn nearest_torsion_approximant(g: &GroupElement, n: u32) -> Result<TorsionApproximant> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let spec = g.spec;
    let (matrix, phases) = match spec.family() {
        Family::U | Family::SU => {
            let eig = unitary_eigen(&g.matrix)?;
            let scaled: Vec<f64> = eig.phases.iter().map(|p| p * n as f64).collect();
            let k: Vec<i64> = if spec.family() == Family::SU {
                largest_remainder(&scaled)
            } else {
                scaled.iter().map(|v| v.round() as i64).collect()
            };
            let rounded: Vec<f64> = k.iter().map(|&k| k as f64 / n as f64).collect();
            let phases = k.iter().map(|&k| Phase::new(k, n)).collect();
            (eig.reconstruct(&rounded), phases)
        }
        Family::SO => {
            let rs = rotation_spectrum(&g.real_matrix())?;
            let mut angles = Vec::new();
            let mut phases = Vec::new();
            for theta in rs.angles() {
                let (p, _) = Phase::nearest(theta / TAU, n);
                // Angles lie in [0, π], so the rounded turn count is p itself
                // or 1/2 exactly.
                angles.push(p.radians());
                phases.push(p);
            }
            (linalg::to_complex(&rs.reconstruct(&angles)), phases)
        }
        Family::SL2R => {
            return Err(Error::Unsupported(
                "torsion approximation is implemented for compact groups".into(),
            ))
        }
    };
    let order = denominator_lcm(&phases);
    let element = GroupElement::unchecked(spec, matrix);
    Ok(TorsionApproximant {
        distance: linalg::distance(&element.matrix, &g.matrix),
        bound: approximation_constant(spec) / n as f64,
        element,
        phases,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{element_order, random_element};
    use crate::torsion::point::enumerate_torsion;
    use num_complex::Complex64;

    #[test]
    fn torsion_input_is_fixed() {
        for spec in [GroupSpec::u(2).unwrap(), GroupSpec::su(3).unwrap(), GroupSpec::so(5).unwrap()] {
            for p in enumerate_torsion(spec, 4).unwrap() {
                let a = nearest_torsion_approximant(&p.realize(), 4).unwrap();
                assert!(a.distance <= 1e-9, "{spec} {p:?}");
            }
        }
    }

    #[test]
    fn u1_scalar_bound() {
        let spec = GroupSpec::u(1).unwrap();
        for i in 0..200 {
            let phi = i as f64 * 0.0317;
            let g = GroupElement::new(spec, crate::linalg::CMat::from_element(1, 1, Complex64::from_polar(1.0, phi)))
                .unwrap();
            let a = nearest_torsion_approximant(&g, 50).unwrap();
            // Oracle: the nearest 50th root of unity, by scanning all of them.
            let best = (0..50)
                .map(|k| (Complex64::from_polar(1.0, TAU * k as f64 / 50.0) - g.matrix[(0, 0)]).norm())
                .fold(f64::INFINITY, f64::min);
            assert!((a.distance - best).abs() < 1e-12);
            assert!(a.distance <= (Complex64::from_polar(1.0, PI / 50.0) - 1.0).norm() + 1e-15);
        }
    }

    #[test]
    fn random_elements_meet_bound_and_order() {
        for spec in [
            GroupSpec::u(3).unwrap(),
            GroupSpec::su(2).unwrap(),
            GroupSpec::su(4).unwrap(),
            GroupSpec::so(4).unwrap(),
            GroupSpec::so(5).unwrap(),
        ] {
            for seed in 0..100 {
                let g = random_element(spec, seed).unwrap();
                let a = nearest_torsion_approximant(&g, 100).unwrap();
                assert!(a.distance <= a.bound, "{spec} seed {seed}: {} > {}", a.distance, a.bound);
                assert!(a.element.membership_residual() < 1e-9);
                assert_eq!(100 % a.order, 0);
                assert_eq!(element_order(&a.element, 100, 1e-8), Some(a.order));
                if spec == GroupSpec::su(2).unwrap() {
                    assert!(a.distance <= 0.1);
                }
            }
        }
    }

    #[test]
    fn largest_remainder_keeps_sum() {
        assert_eq!(largest_remainder(&[0.6, 0.7, -1.3]), vec![0, 1, -1]);
        assert_eq!(largest_remainder(&[0.2, -0.2]), vec![0, 0]);
        let x = [1.4, 1.4, 1.2];
        assert_eq!(largest_remainder(&x).iter().sum::<i64>(), 4);
    }

    #[test]
    fn rejects_sl2() {
        let g = GroupElement::identity(GroupSpec::sl2r());
        assert!(matches!(nearest_torsion_approximant(&g, 3), Err(Error::Unsupported(_))));
    }
}
