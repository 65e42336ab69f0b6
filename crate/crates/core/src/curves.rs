//! Conjugation curves through finite-order elements: finite-difference
//! tangent checks, the kernel condition on their velocity, and explicit
//! paths inside a conjugacy class.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::spectral::{orthogonal_log, rotation_spectrum, unitary_eigen, unitary_log};
use crate::group::{algebra_basis, cartan_decompose, rotation2, AlgebraElement, Family, GroupElement, GroupSpec};
use crate::linalg::{self, CMat, RMat};
use crate::report::{digest_inputs, TrialRecord, VerificationReport};
use crate::subspace::{adjoint_operators, check_torsion};
use crate::tol::Tolerances;
use crate::torsion::{invariant_of_element, CanonicalInvariant};

/// Default number of waypoints on a path inside a class.
pub const DEFAULT_WAYPOINTS: usize = 20;

/// Points c(h) = exp(hX)·g·exp(−hX) for a decreasing list of steps h.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub times: Vec<f64>,
    pub points: Vec<GroupElement>,
    pub base: GroupElement,
}

fn validate_steps(steps: &[f64]) -> Result<()> {
    if steps.len() < 2 {
        return Err(Error::InvalidInput("at least two step sizes are needed".into()));
    }
    if steps.iter().any(|&h| !(h > 0.0)) || steps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("steps must be positive and strictly decreasing".into()));
    }
    Ok(())
}

pub fn conjugation_curve(g: &GroupElement, x: &AlgebraElement, steps: &[f64]) -> Result<CurveSample> {
    validate_steps(steps)?;
    let xm = algebra_basis(g.spec).to_matrix(x)?;
    let points = steps
        .iter()
        .map(|&h| {
            let a = (&xm * Complex64::new(h, 0.0)).exp();
            let ainv = (&xm * Complex64::new(-h, 0.0)).exp();
            GroupElement::unchecked(g.spec, a * &g.matrix * ainv)
        })
        .collect();
    Ok(CurveSample {
        times: steps.to_vec(),
        points,
        base: g.clone(),
    })
}

/// Compares (c(h) − g)/h with D = (X − gXg⁻¹)·g along c(t) = e^{tX} g e^{−tX}.
///
/// Passes when every error is below 1e−9 (D = 0 and the curve is constant up
/// to roundoff), or when each ratio error(hᵢ)/error(hᵢ₊₁) is within a factor
/// of 3 of hᵢ/hᵢ₊₁, i.e. the error is first order in h.
pub fn tangent_space_check(g: &GroupElement, x: &AlgebraElement, steps: &[f64]) -> Result<VerificationReport> {
    const CHECK: &str = "tangent-space";
    const EXACT: f64 = 1e-9;
    let curve = conjugation_curve(g, x, steps)?;
    let xm = algebra_basis(g.spec).to_matrix(x)?;
    let ginv = g.inverse()?;
    let d = (&xm - &g.matrix * &xm * &ginv.matrix) * &g.matrix;
    let errors: Vec<f64> = curve
        .times
        .iter()
        .zip(&curve.points)
        .map(|(&h, c)| linalg::frobenius(&((&c.matrix - &g.matrix) / Complex64::new(h, 0.0) - &d)))
        .collect();
    let exact = errors.iter().all(|&e| e <= EXACT);
    let mut worst_ratio: f64 = 1.0;
    for i in 0..errors.len() - 1 {
        let err_ratio = errors[i] / errors[i + 1];
        let step_ratio = steps[i] / steps[i + 1];
        let r = err_ratio / step_ratio;
        let off = if r.is_finite() && r > 0.0 { r.max(1.0 / r) } else { f64::INFINITY };
        worst_ratio = worst_ratio.max(off);
    }
    let passed = exact || worst_ratio <= 3.0;
    let mut trial = TrialRecord::new(0, None, digest_inputs(&[&g.matrix, &xm], steps))
        .metric("derivative_norm", linalg::frobenius(&d))
        .metric("worst_ratio_factor", if exact { 1.0 } else { worst_ratio })
        .note("mode", if exact { "exact" } else { "first-order" })
        .outcome(passed, if exact { errors[0] } else { worst_ratio });
    for (h, e) in steps.iter().zip(&errors) {
        trial = trial.metric(&format!("error_at_{h:e}"), *e);
        trial = trial.metric(&format!("error_over_h_at_{h:e}"), e / h);
    }
    Ok(VerificationReport::single(CHECK, trial))
}

/// r = ‖(Σ_{i<n} Ad(g)ⁱ)(1 − Ad(g))X‖ for gⁿ = e; passes when r ≤ 1e−9.
pub fn curve_kernel_check(g: &GroupElement, n: u64, x: &AlgebraElement, tol: &Tolerances) -> VerificationReport {
    const CHECK: &str = "curve-kernel";
    const LIMIT: f64 = 1e-9;
    if let Err(why) = check_torsion(g, n, tol.membership) {
        return VerificationReport::rejected(CHECK, why);
    }
    if x.dim() != g.spec.algebra_dim() {
        return VerificationReport::rejected(CHECK, format!("X has {} coordinates, expected {}", x.dim(), g.spec.algebra_dim()));
    }
    let ops = match adjoint_operators(g, n) {
        Ok(ops) => ops,
        Err(e) => return VerificationReport::rejected(CHECK, e.to_string()),
    };
    let velocity = &ops.one_minus * &x.coords;
    let r = (&ops.sum * &velocity).norm();
    let trial = TrialRecord::new(0, None, digest_inputs(&[&g.matrix], &[n as f64]))
        .metric("velocity_norm", velocity.norm())
        .metric("kernel_residual", r)
        .outcome(r <= LIMIT, r);
    VerificationReport::single(CHECK, trial)
}

/// ‖α(t)·(gα(t)g⁻¹)⋯(gⁿ⁻¹α(t)g⁻⁽ⁿ⁻¹⁾) − e‖ with α(t) = γ(t)g⁻¹ and
/// γ(t) = e^{tX} g e^{−tX}; passes when at most n·tol.
pub fn product_identity_check(
    g: &GroupElement,
    n: u64,
    x: &AlgebraElement,
    t: f64,
    tol: &Tolerances,
) -> VerificationReport {
    const CHECK: &str = "product-identity";
    if let Err(why) = check_torsion(g, n, tol.membership) {
        return VerificationReport::rejected(CHECK, why);
    }
    let run = || -> Result<TrialRecord> {
        let xm = algebra_basis(g.spec).to_matrix(x)?;
        let ginv = g.inverse()?;
        let gamma = (&xm * Complex64::new(t, 0.0)).exp() * &g.matrix * (&xm * Complex64::new(-t, 0.0)).exp();
        let alpha = &gamma * &ginv.matrix;
        let m = g.spec.size();
        let mut product = CMat::identity(m, m);
        let mut gi = CMat::identity(m, m);
        let mut gi_inv = CMat::identity(m, m);
        for _ in 0..n {
            product = product * (&gi * &alpha * &gi_inv);
            gi = gi * &g.matrix;
            gi_inv = &ginv.matrix * gi_inv;
        }
        let r = linalg::distance_to_identity(&product);
        Ok(TrialRecord::new(0, None, digest_inputs(&[&g.matrix, &xm], &[n as f64, t]))
            .metric("product_residual", r)
            .outcome(r <= n as f64 * tol.membership, r))
    };
    match run() {
        Ok(trial) => VerificationReport::single(CHECK, trial),
        Err(e) => VerificationReport::rejected(CHECK, e.to_string()),
    }
}

/// A path s ↦ h(s)·g₁·h(s)⁻¹, s ∈ [0, 1], from g₁ to g₂ inside one class.
#[derive(Debug, Clone)]
pub struct ComponentPath {
    pub invariant: CanonicalInvariant,
    /// The conjugator h(1), with h(1)·g₁·h(1)⁻¹ ≈ g₂.
    pub conjugator: GroupElement,
    pub params: Vec<f64>,
    pub waypoints: Vec<GroupElement>,
    /// max ‖g(s)ⁿ − e‖ over waypoints.
    pub max_power_residual: f64,
    pub max_membership_residual: f64,
    /// Whether the invariant recomputed at every waypoint equals `invariant`.
    pub invariant_constant: bool,
    /// ‖g(1) − g₂‖.
    pub endpoint_error: f64,
}

impl ComponentPath {
    /// Passes when every waypoint has order dividing n within n·tol, the
    /// invariant never changes, and the path ends at g₂.
    pub fn is_valid(&self, n: u32, tol: f64) -> bool {
        let limit = n as f64 * tol;
        self.invariant_constant
            && self.max_power_residual <= limit
            && self.max_membership_residual <= limit
            && self.endpoint_error <= 1e-6
    }

    /// Long-format CSV: s, row, col, re, im.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,row,col,re,im\n");
        for (s, g) in self.params.iter().zip(&self.waypoints) {
            for i in 0..g.matrix.nrows() {
                for j in 0..g.matrix.ncols() {
                    let z = g.matrix[(i, j)];
                    let _ = writeln!(out, "{s},{i},{j},{},{}", z.re, z.im);
                }
            }
        }
        out
    }
}

/// Eigenvectors ordered by their eigenphase snapped to 1/n, so that equal
/// invariants give matching diagonal forms.
fn sorted_eigenbasis(g: &CMat, n: u32) -> Result<CMat> {
    let eig = unitary_eigen(g)?;
    let mut order: Vec<usize> = (0..eig.phases.len()).collect();
    let key = |j: usize| crate::torsion::Phase::nearest(eig.phases[j], n).0;
    order.sort_by_key(|&j| key(j));
    Ok(CMat::from_fn(g.nrows(), g.ncols(), |i, c| eig.vectors[(i, order[c])]))
}

/// Frame [Re v, Im v] of an eigenvector for the eigenvalue with positive
/// imaginary part of an elliptic 2×2 matrix.
fn elliptic_frame(a: &RMat) -> RMat {
    let re = a.trace() / 2.0;
    let im = (1.0 - re * re).max(0.0).sqrt();
    let (b, c) = (a[(0, 1)], a[(1, 0)]);
    if b.abs() >= c.abs() {
        // v = (b, λ − a₀₀)
        RMat::from_row_slice(2, 2, &[b, 0.0, re - a[(0, 0)], im])
    } else {
        // v = (λ − a₁₁, c)
        RMat::from_row_slice(2, 2, &[re - a[(1, 1)], im, c, 0.0])
    }
}

/// A path s ↦ h(s) in G from e to a conjugator h(1) with h(1)·g₁·h(1)⁻¹ = g₂.
enum PathGenerator {
    /// h(s) = exp(s·L).
    Log(CMat),
    /// h(s) = R(s·angle)·exp(s·p).
    Cartan { angle: f64, p: RMat },
}

impl PathGenerator {
    fn at(&self, s: f64) -> CMat {
        match self {
            PathGenerator::Log(l) => (l * Complex64::new(s, 0.0)).exp(),
            PathGenerator::Cartan { angle, p } => {
                let k = rotation2(s * angle);
                let e = crate::group::polar::exp_symmetric(&(p * s));
                linalg::to_complex(&(k * e))
            }
        }
    }
}

fn path_generator(g1: &GroupElement, g2: &GroupElement, n: u32) -> Result<PathGenerator> {
    let spec = g1.spec;
    let m = spec.size();
    match spec.family() {
        Family::U | Family::SU => {
            let v1 = sorted_eigenbasis(&g1.matrix, n)?;
            let v2 = sorted_eigenbasis(&g2.matrix, n)?;
            let h = v2 * v1.adjoint();
            let mut l = unitary_log(&h)?;
            if spec.family() == Family::SU {
                // Dropping the trace changes h by a central factor, which
                // leaves the conjugation unchanged and keeps h(s) in SU.
                let shift = l.trace() / Complex64::new(m as f64, 0.0);
                for i in 0..m {
                    l[(i, i)] -= shift;
                }
            }
            Ok(PathGenerator::Log(l))
        }
        Family::SO => {
            let r1 = rotation_spectrum(&g1.real_matrix())?;
            let mut r2 = rotation_spectrum(&g2.real_matrix())?;
            if r1.planes.len() != r2.planes.len() || r1.axis.is_some() != r2.axis.is_some() {
                return Err(Error::DefectiveEigen(f64::INFINITY));
            }
            if r1.orientation() != r2.orientation() && !r2.flip_orientation() {
                return Err(Error::DifferentComponents(
                    invariant_of_element(g1, n)?.to_string(),
                    invariant_of_element(g2, n)?.to_string(),
                ));
            }
            let h = r2.frame() * r1.frame().transpose();
            Ok(PathGenerator::Log(linalg::to_complex(&orthogonal_log(&h)?)))
        }
        Family::SL2R => {
            let a1 = g1.real_matrix();
            let a2 = g2.real_matrix();
            if (a1.trace().abs() - 2.0).abs() < 1e-9 {
                // ±I: central, h = e.
                return Ok(PathGenerator::Log(CMat::zeros(2, 2)));
            }
            let p1 = elliptic_frame(&a1);
            let p2 = elliptic_frame(&a2);
            let p1_inv = p1.clone().try_inverse().ok_or(Error::Singular(p1.determinant()))?;
            let mut h = p2 * p1_inv;
            let det = h.determinant();
            if !(det > 0.0) {
                return Err(Error::DifferentComponents(
                    invariant_of_element(g1, n)?.to_string(),
                    invariant_of_element(g2, n)?.to_string(),
                ));
            }
            h /= det.sqrt();
            let c = cartan_decompose(&GroupElement::unchecked(GroupSpec::sl2r(), linalg::to_complex(&h)))?;
            let k = c.k.real_matrix();
            Ok(PathGenerator::Cartan {
                angle: k[(1, 0)].atan2(k[(0, 0)]),
                p: c.p,
            })
        }
    }
}

/// Connects two elements of order dividing n with equal invariants by a
/// path of conjugates of g₁.
///
/// Errors with [`Error::DifferentComponents`] when the invariants differ.
pub fn connect_within_component(
    g1: &GroupElement,
    g2: &GroupElement,
    n: u32,
    waypoints: usize,
) -> Result<ComponentPath> {
    if g1.spec != g2.spec {
        return Err(Error::ShapeMismatch {
            expected: g1.spec.to_string(),
            found: g2.spec.to_string(),
        });
    }
    if waypoints < 2 {
        return Err(Error::InvalidInput("a path needs at least two waypoints".into()));
    }
    let inv1 = invariant_of_element(g1, n)?;
    let inv2 = invariant_of_element(g2, n)?;
    if inv1 != inv2 {
        return Err(Error::DifferentComponents(inv1.to_string(), inv2.to_string()));
    }
    let gen = path_generator(g1, g2, n)?;
    let mut params = Vec::with_capacity(waypoints);
    let mut points = Vec::with_capacity(waypoints);
    let mut max_power: f64 = 0.0;
    let mut max_member: f64 = 0.0;
    let mut constant = true;
    let mut conjugator = GroupElement::identity(g1.spec);
    for j in 0..waypoints {
        let s = j as f64 / (waypoints - 1) as f64;
        let h = GroupElement::unchecked(g1.spec, gen.at(s));
        let g = g1.conjugate_by(&h)?;
        max_power = max_power.max(g.power_residual(n as u64));
        max_member = max_member.max(g.membership_residual());
        constant &= invariant_of_element(&g, n).map(|i| i == inv1).unwrap_or(false);
        params.push(s);
        points.push(g);
        conjugator = h;
    }
    let endpoint_error = linalg::distance(&points[waypoints - 1].matrix, &g2.matrix);
    Ok(ComponentPath {
        invariant: inv1,
        conjugator,
        params,
        waypoints: points,
        max_power_residual: max_power,
        max_membership_residual: max_member,
        invariant_constant: constant,
        endpoint_error,
    })
}
