use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::phase::{denominator_lcm, Phase};
use super::point::TorusTorsionPoint;
use crate::error::{Error, Result};
use crate::group::spectral::{rotation_spectrum, unitary_eigen};
use crate::group::{Family, GroupElement, GroupSpec};
use crate::linalg;

/// Largest rounding error, in turns, accepted when snapping a numerically
/// computed eigenphase to a multiple of 1/n.
pub const PHASE_SNAP_TOL: f64 = 1e-6;

/// Orientation class kept for SO(2r) when no block angle is 0 or 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Weyl-orbit normal form of a torus torsion point.
///
/// Text form is the comma-separated phase list, followed by `even` or `odd`
/// when a parity bit is present: `1/3,1/3,odd`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CanonicalInvariant {
    pub phases: Vec<Phase>,
    pub parity: Option<Parity>,
}

impl CanonicalInvariant {
    /// Order of any element with this invariant.
    pub fn exact_order(&self) -> u64 {
        denominator_lcm(&self.phases)
    }

    /// A torus point with this invariant.
    pub fn torus_point(&self, spec: GroupSpec) -> Result<TorusTorsionPoint> {
        let mut phases = self.phases.clone();
        if spec.family() == Family::SO && !spec.is_circle() {
            let expected = if spec.size() % 2 == 0 && phases.iter().all(|p| !p.is_self_conjugate()) {
                Some(Parity::Even)
            } else {
                None
            };
            match (expected, self.parity) {
                (None, None) | (Some(_), Some(Parity::Even)) => {}
                (Some(_), Some(Parity::Odd)) => {
                    let last = phases.len() - 1;
                    phases[last] = phases[last].neg();
                }
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "invariant `{self}` has the wrong parity data for {spec}"
                    )))
                }
            }
        } else if self.parity.is_some() {
            return Err(Error::InvalidInput(format!("{spec} invariants carry no parity")));
        }
        let point = TorusTorsionPoint::new(spec, phases)?;
        if &canonicalize(&point) != self {
            return Err(Error::InvalidInput(format!("`{self}` is not a normal form for {spec}")));
        }
        Ok(point)
    }
}

impl fmt::Display for CanonicalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.phases {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        if let Some(par) = self.parity {
            write!(f, ",{par}")?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalInvariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens: Vec<&str> = s.split(',').map(str::trim).collect();
        let parity = match tokens.last().copied() {
            Some("even") => Some(Parity::Even),
            Some("odd") => Some(Parity::Odd),
            _ => None,
        };
        if parity.is_some() {
            tokens.pop();
        }
        if tokens.is_empty() || tokens == [""] {
            return Err(Error::Parse(format!("invariant `{s}` has no phases")));
        }
        let phases = tokens
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<Phase>>>()?;
        Ok(CanonicalInvariant { phases, parity })
    }
}

impl TryFrom<String> for CanonicalInvariant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CanonicalInvariant> for String {
    fn from(c: CanonicalInvariant) -> String {
        c.to_string()
    }
}

fn has_parity_bit(spec: GroupSpec, folded: &[Phase]) -> bool {
    spec.family() == Family::SO
        && spec.size() % 2 == 0
        && !spec.is_circle()
        && folded.iter().all(|p| !p.is_self_conjugate())
}

/// Normal form of a torus point under its Weyl group.
pub fn canonicalize(point: &TorusTorsionPoint) -> CanonicalInvariant {
    let spec = point.spec;
    if spec.is_circle() {
        return CanonicalInvariant {
            phases: point.phases.clone(),
            parity: None,
        };
    }
    match spec.family() {
        Family::U | Family::SU => {
            let mut phases = point.phases.clone();
            phases.sort();
            CanonicalInvariant { phases, parity: None }
        }
        _ => {
            let mut phases: Vec<Phase> = point.phases.iter().map(|p| p.folded()).collect();
            phases.sort();
            let parity = has_parity_bit(spec, &phases).then(|| {
                let flips = point.phases.iter().filter(|p| p.is_upper_half()).count();
                if flips % 2 == 0 {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            });
            CanonicalInvariant { phases, parity }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// The Weyl orbit of a torus point, by brute force over permutations and
/// sign changes. Used as an independent check of [`canonicalize`].
pub fn weyl_orbit(point: &TorusTorsionPoint) -> BTreeSet<TorusTorsionPoint> {
    let spec = point.spec;
    let r = point.phases.len();
    let mut out = BTreeSet::new();
    if spec.is_circle() {
        out.insert(point.clone());
        return out;
    }
    let signed = spec.family() == Family::SO;
    let masks: Vec<u32> = if signed {
        (0..1u32 << r)
            .filter(|mask| spec.size() % 2 == 1 || mask.count_ones() % 2 == 0)
            .collect()
    } else {
        vec![0]
    };
    for perm in permutations(r) {
        for &mask in &masks {
            let phases = perm
                .iter()
                .enumerate()
                .map(|(slot, &src)| {
                    let p = point.phases[src];
                    if mask >> slot & 1 == 1 {
                        p.neg()
                    } else {
                        p
                    }
                })
                .collect();
            out.insert(TorusTorsionPoint { spec, phases });
        }
    }
    out
}

fn snap(turns: f64, n: u32) -> Result<Phase> {
    let (p, err) = Phase::nearest(turns, n);
    if err > PHASE_SNAP_TOL {
        return Err(Error::InvalidInput(format!(
            "eigenphase {turns} is {err:e} turns away from a multiple of 1/{n}"
        )));
    }
    Ok(p)
}

/// Rotation sense σ of an SL(2,R) element: the sign of det[Re v, Im v] for
/// an eigenvector v of the eigenvalue with positive imaginary part; 0 for ±I.
/// Errors when g is not elliptic or central.
pub fn sl2_orientation(g: &GroupElement) -> Result<i8> {
    let a = g.real_matrix();
    if linalg::frobenius_real(&(&a - nalgebra::DMatrix::identity(2, 2))) < 1e-9
        || linalg::frobenius_real(&(&a + nalgebra::DMatrix::identity(2, 2))) < 1e-9
    {
        return Ok(0);
    }
    let half_trace = a.trace() / 2.0;
    if !(half_trace.abs() < 1.0) {
        return Err(Error::InvalidInput(format!(
            "SL(2,R) element with trace {} is not elliptic",
            a.trace()
        )));
    }
    let im = (1.0 - half_trace * half_trace).sqrt();
    // λ = tr/2 + i·im. (g − λ)v = 0 is solved by v = (b, λ − a₀₀), or by
    // v = (λ − a₁₁, c) when b is the smaller off-diagonal entry.
    let (b, c) = (a[(0, 1)], a[(1, 0)]);
    let det = if b.abs() >= c.abs() {
        // Re v = (b, re λ − a₀₀), Im v = (0, im).
        b * im
    } else {
        // Re v = (re λ − a₁₁, c), Im v = (im, 0).
        -c * im
    };
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// Canonical invariant of an element with gⁿ = e, read off its spectrum.
pub fn invariant_of_element(g: &GroupElement, n: u32) -> Result<CanonicalInvariant> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let spec = g.spec;
    let phases = match spec.family() {
        Family::U | Family::SU => {
            let eig = unitary_eigen(&g.matrix)?;
            eig.phases.iter().map(|&t| snap(t, n)).collect::<Result<Vec<_>>>()?
        }
        Family::SO if spec.is_circle() => {
            let a = g.real_matrix();
            vec![snap(a[(1, 0)].atan2(a[(0, 0)]) / TAU, n)?]
        }
        Family::SO => {
            let rs = rotation_spectrum(&g.real_matrix())?;
            let mut phases = rs
                .angles()
                .iter()
                .map(|&t| snap(t / TAU, n))
                .collect::<Result<Vec<_>>>()?;
            phases.sort();
            let parity = has_parity_bit(spec, &phases).then(|| {
                if rs.orientation() > 0.0 {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            });
            return Ok(CanonicalInvariant { phases, parity });
        }
        Family::SL2R => {
            let sigma = sl2_orientation(g)?;
            let half_trace = (g.real_matrix().trace() / 2.0).clamp(-1.0, 1.0);
            let turns = half_trace.acos() / TAU;
            // σ = −1 is the rotation sense of R(θ) for θ in (0, π).
            let turns = if sigma > 0 { 1.0 - turns } else { turns };
            vec![snap(turns, n)?]
        }
    };
    let mut phases = phases;
    if !spec.is_circle() {
        phases.sort();
    }
    Ok(CanonicalInvariant { phases, parity: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_element, rng_from_seed};
    use crate::torsion::point::{enumerate_torsion, random_torsion_point};

    fn pt(spec: GroupSpec, ph: &[(i64, u32)]) -> TorusTorsionPoint {
        TorusTorsionPoint::new(spec, ph.iter().map(|&(k, n)| Phase::new(k, n)).collect()).unwrap()
    }

    #[test]
    fn permutation_and_sign_examples() {
        let u2 = GroupSpec::u(2).unwrap();
        assert_eq!(canonicalize(&pt(u2, &[(1, 2), (0, 1)])), canonicalize(&pt(u2, &[(0, 1), (1, 2)])));
        let so3 = GroupSpec::so(3).unwrap();
        assert_eq!(canonicalize(&pt(so3, &[(1, 3)])), canonicalize(&pt(so3, &[(2, 3)])));
        let so2 = GroupSpec::so(2).unwrap();
        assert_ne!(canonicalize(&pt(so2, &[(1, 3)])), canonicalize(&pt(so2, &[(2, 3)])));
    }

    #[test]
    fn su3_all_permutations_agree() {
        let su3 = GroupSpec::su(3).unwrap();
        let base = [(0, 1), (1, 3), (2, 3)];
        let invs: BTreeSet<_> = permutations(3)
            .into_iter()
            .map(|p| canonicalize(&pt(su3, &[base[p[0]], base[p[1]], base[p[2]]])))
            .collect();
        assert_eq!(invs.len(), 1);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn so4_parity_splits_generic_classes_only() {
        let so4 = GroupSpec::so(4).unwrap();
        let even = canonicalize(&pt(so4, &[(1, 3), (1, 3)]));
        let odd = canonicalize(&pt(so4, &[(1, 3), (2, 3)]));
        assert_eq!(even.parity, Some(Parity::Even));
        assert_eq!(odd.parity, Some(Parity::Odd));
        assert_ne!(even, odd);
        // A block at angle 1/2 absorbs the odd sign change.
        let a = canonicalize(&pt(so4, &[(1, 3), (1, 2)]));
        let b = canonicalize(&pt(so4, &[(2, 3), (1, 2)]));
        assert_eq!(a, b);
        assert_eq!(a.parity, None);
    }

    #[test]
    fn canonical_is_constant_on_and_separates_weyl_orbits() {
        for spec in [
            GroupSpec::u(3).unwrap(),
            GroupSpec::su(3).unwrap(),
            GroupSpec::so(4).unwrap(),
            GroupSpec::so(5).unwrap(),
            GroupSpec::so(2).unwrap(),
        ] {
            for n in 1..=5 {
                let points = enumerate_torsion(spec, n).unwrap();
                let all: BTreeSet<_> = points.iter().cloned().collect();
                for p in &points {
                    let orbit = weyl_orbit(p);
                    assert!(orbit.is_subset(&all));
                    let c = canonicalize(p);
                    for q in &all {
                        assert_eq!(orbit.contains(q), canonicalize(q) == c, "{spec} {p:?} {q:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn text_round_trip_and_torus_point() {
        let so4 = GroupSpec::so(4).unwrap();
        for p in enumerate_torsion(so4, 6).unwrap() {
            let c = canonicalize(&p);
            let parsed: CanonicalInvariant = c.to_string().parse().unwrap();
            assert_eq!(parsed, c);
            assert_eq!(canonicalize(&c.torus_point(so4).unwrap()), c);
        }
        assert_eq!("1/3,1/3,odd".parse::<CanonicalInvariant>().unwrap().parity, Some(Parity::Odd));
        assert!("".parse::<CanonicalInvariant>().is_err());
        assert!("even".parse::<CanonicalInvariant>().is_err());
        assert!("1/2,2/4".parse::<CanonicalInvariant>().is_err());
        let bad: CanonicalInvariant = "1/2,0/1".parse().unwrap();
        assert!(bad.torus_point(GroupSpec::u(2).unwrap()).is_err());
    }

    #[test]
    fn invariant_of_conjugated_torsion_points() {
        let mut rng = rng_from_seed(5);
        for spec in [
            GroupSpec::u(3).unwrap(),
            GroupSpec::su(4).unwrap(),
            GroupSpec::so(4).unwrap(),
            GroupSpec::so(5).unwrap(),
            GroupSpec::so(2).unwrap(),
        ] {
            for trial in 0..40u64 {
                let n = 1 + (trial % 6) as u32;
                let p = random_torsion_point(spec, n, &mut rng);
                let h = random_element(spec, 1000 + trial).unwrap();
                let g = p.realize().conjugate_by(&h).unwrap();
                assert_eq!(invariant_of_element(&g, n).unwrap(), canonicalize(&p), "{spec} {p:?}");
            }
        }
    }

    #[test]
    fn sl2_orientation_matches_rotation_sense() {
        let sl2 = GroupSpec::sl2r();
        for k in 0..8 {
            let p = pt(sl2, &[(k, 8)]);
            let g = p.realize();
            let sigma = sl2_orientation(&g).unwrap();
            let expected = match k {
                0 | 4 => 0,
                1..=3 => -1,
                _ => 1,
            };
            assert_eq!(sigma, expected, "k = {k}");
            for seed in 0..20 {
                let h = random_element(sl2, seed).unwrap();
                let gc = g.conjugate_by(&h).unwrap();
                assert_eq!(sl2_orientation(&gc).unwrap(), sigma);
                assert_eq!(invariant_of_element(&gc, 8).unwrap(), canonicalize(&p));
            }
        }
        let hyperbolic = GroupElement::from_real(
            sl2,
            &nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]),
        )
        .unwrap();
        assert!(sl2_orientation(&hyperbolic).is_err());
    }

    #[test]
    fn rejects_non_torsion_input() {
        let spec = GroupSpec::u(2).unwrap();
        let g = random_element(spec, 3).unwrap();
        assert!(invariant_of_element(&g, 4).is_err());
    }
}
