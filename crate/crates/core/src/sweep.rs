//! Randomized sweeps over the verifiers.
//!
//! Trial i runs with seed `seed + i` (wrapping) and trials are collected in
//! index order, so a report depends only on its configuration and not on the
//! number of worker threads.

use rand::Rng;
use rayon::prelude::*;

use crate::curves::{connect_within_component, curve_kernel_check, product_identity_check, tangent_space_check};
use crate::error::{Error, Result};
use crate::group::random::{gaussian, random_sl2_conjugator};
use crate::group::{random_element_with, rng_from_seed, AlgebraElement, Family, GroupElement, GroupSpec};
use crate::report::{TrialRecord, VerificationReport};
use crate::subspace::{verify_kernel_image_identity, verify_zero_intersection};
use crate::tol::Tolerances;
use crate::torsion::{
    canonicalize, nearest_torsion_approximant, points_by_component, random_torsion_point, TorusTorsionPoint,
};

/// Spread of the Cartan factor of random SL(2,R) conjugators used in sweeps.
pub const SL2_CONJUGATOR_SPREAD: f64 = 0.5;

/// Default finite-difference steps.
pub const DEFAULT_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

pub fn trial_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Runs `count` independent trials in parallel and returns them in index
/// order.
pub fn run_trials<F>(count: usize, seed: u64, f: F) -> Vec<TrialRecord>
where
    F: Fn(usize, u64) -> TrialRecord + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(i, trial_seed(seed, i)))
        .collect()
}

/// Lie algebra element with independent standard normal coordinates.
pub fn random_algebra_element<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R) -> AlgebraElement {
    let d = spec.algebra_dim();
    AlgebraElement::new(nalgebra::DVector::from_fn(d, |_, _| gaussian(rng)))
}

/// Random conjugator: Haar-like for compact groups, k·exp(p) with bounded p
/// for SL(2,R) so that conjugates stay well conditioned.
pub fn torsion_conjugator<R: Rng + ?Sized>(spec: GroupSpec, rng: &mut R) -> Result<GroupElement> {
    match spec.family() {
        Family::SL2R => Ok(random_sl2_conjugator(rng, SL2_CONJUGATOR_SPREAD)),
        _ => random_element_with(spec, rng),
    }
}

/// h·t·h⁻¹ for a random torus point t with tⁿ = e and a random conjugator h.
pub fn random_torsion_element<R: Rng + ?Sized>(
    spec: GroupSpec,
    n: u32,
    rng: &mut R,
) -> Result<(TorusTorsionPoint, GroupElement)> {
    let p = random_torsion_point(spec, n, rng);
    let h = torsion_conjugator(spec, rng)?;
    let g = p.realize().conjugate_by(&h)?;
    Ok((p, g))
}

/// Which groups and orders a sweep draws from, and how many trials it runs.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub specs: Vec<GroupSpec>,
    pub orders: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl SweepPlan {
    pub fn new(specs: Vec<GroupSpec>, orders: Vec<u32>, trials: usize, seed: u64) -> Result<Self> {
        if specs.is_empty() || orders.is_empty() {
            return Err(Error::InvalidInput("a sweep needs at least one group and one order".into()));
        }
        if orders.contains(&0) {
            return Err(Error::InvalidInput("orders must be positive".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        Ok(SweepPlan {
            specs,
            orders,
            trials,
            seed,
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (GroupSpec, u32) {
        let spec = self.specs[rng.random_range(0..self.specs.len())];
        let n = self.orders[rng.random_range(0..self.orders.len())];
        (spec, n)
    }

    fn finish(&self, check: &str, trials: Vec<TrialRecord>) -> VerificationReport {
        let groups: Vec<String> = self.specs.iter().map(|s| s.to_string()).collect();
        let orders: Vec<String> = self.orders.iter().map(|n| n.to_string()).collect();
        VerificationReport::from_trials(check, trials)
            .with_config("groups", groups.join(" "))
            .with_config("orders", orders.join(" "))
            .with_config("trials", self.trials)
            .with_config("seed", self.seed)
            .with_config("tol_membership", self.tol.membership)
            .with_config("tol_rank", self.tol.rank)
            .with_config("tol_subspace", self.tol.subspace)
    }

    /// Runs `f` on (spec, n, rng) per trial and labels the resulting record.
    fn run<F>(&self, check: &str, f: F) -> VerificationReport
    where
        F: Fn(GroupSpec, u32, &mut rand_chacha::ChaCha8Rng) -> Result<TrialRecord> + Sync,
    {
        let trials = run_trials(self.trials, self.seed, |index, seed| {
            let mut rng = rng_from_seed(seed);
            let (spec, n) = self.draw(&mut rng);
            let record = match f(spec, n, &mut rng) {
                Ok(t) => t,
                Err(e) => TrialRecord::new(index, None, String::new())
                    .note("error", e.to_string())
                    .outcome(false, f64::INFINITY),
            };
            TrialRecord {
                index,
                seed: Some(seed),
                ..record
            }
            .note("group", spec.to_string())
            .note("n", n.to_string())
        });
        self.finish(check, trials)
    }
}

/// The single trial of a one-shot verifier report, or a failed trial
/// carrying the rejection reason.
fn absorb(report: VerificationReport) -> TrialRecord {
    match (report.rejected, report.trials.into_iter().next()) {
        (None, Some(t)) => t,
        (Some(why), _) => TrialRecord::new(0, None, String::new())
            .note("rejected", why)
            .outcome(false, f64::INFINITY),
        (None, None) => TrialRecord::new(0, None, String::new()).outcome(false, f64::INFINITY),
    }
}

pub fn kernel_image_sweep(plan: &SweepPlan) -> VerificationReport {
    plan.run("kernel-image-identity", |spec, n, rng| {
        let (_, g) = random_torsion_element(spec, n, rng)?;
        Ok(absorb(verify_kernel_image_identity(&g, n as u64, &plan.tol)))
    })
}

pub fn zero_intersection_sweep(plan: &SweepPlan) -> VerificationReport {
    plan.run("zero-intersection", |spec, n, rng| {
        let (_, g) = random_torsion_element(spec, n, rng)?;
        Ok(absorb(verify_zero_intersection(&g, n as u64, &plan.tol)))
    })
}

/// Finite-difference tangent check at random (g, X). The element g is a
/// random group element, not necessarily of finite order; the orders of the
/// plan are ignored.
pub fn tangent_sweep(plan: &SweepPlan, steps: &[f64]) -> VerificationReport {
    plan.run("tangent-space", |spec, _, rng| {
        let g = torsion_conjugator(spec, rng)?;
        let x = random_algebra_element(spec, rng);
        Ok(absorb(tangent_space_check(&g, &x, steps)?))
    })
}

/// Kernel condition and product identity on the same random (g, n, X);
/// a trial passes when both do.
pub fn curve_kernel_sweep(plan: &SweepPlan, t: f64) -> VerificationReport {
    plan.run("curve-kernel", |spec, n, rng| {
        let (_, g) = random_torsion_element(spec, n, rng)?;
        let x = random_algebra_element(spec, rng);
        let kernel = absorb(curve_kernel_check(&g, n as u64, &x, &plan.tol));
        let product = absorb(product_identity_check(&g, n as u64, &x, t, &plan.tol));
        let passed = kernel.passed && product.passed;
        let mut out = kernel.clone();
        for (k, v) in product.metrics {
            out.metrics.insert(k, v);
        }
        for (k, v) in product.notes {
            out.notes.insert(format!("product_{k}"), v);
        }
        let residual = kernel.residual.max(product.residual / n as f64);
        Ok(out.outcome(passed, residual))
    })
}

/// Nearest torsion approximant of order dividing the plan's order at random
/// elements; a trial passes when the distance is within the family bound.
pub fn density_sweep(plan: &SweepPlan) -> VerificationReport {
    plan.run("density", |spec, n, rng| {
        let g = random_element_with(spec, rng)?;
        let a = nearest_torsion_approximant(&g, n)?;
        let rank_bound = std::f64::consts::PI * (spec.torus_rank() as f64).sqrt() / n as f64;
        Ok(TrialRecord::new(0, None, crate::report::digest_inputs(&[&g.matrix], &[n as f64]))
            .metric("distance", a.distance)
            .metric("bound", a.bound)
            .metric("distance_over_rank_bound", a.distance / rank_bound)
            .metric("order", a.order as f64)
            .outcome(a.distance <= a.bound && n as u64 % a.order == 0, a.distance))
    })
}

/// Paths between two random conjugates of one torsion point, and the
/// separation error for a pair from different classes.
pub fn connectivity_sweep(plan: &SweepPlan, waypoints: usize) -> VerificationReport {
    plan.run("connectivity", |spec, n, rng| {
        let (p, g1) = random_torsion_element(spec, n, rng)?;
        let g2 = p.realize().conjugate_by(&torsion_conjugator(spec, rng)?)?;
        let path = connect_within_component(&g1, &g2, n, waypoints)?;
        let connected = path.is_valid(n, plan.tol.membership);
        let mut record = TrialRecord::new(0, None, crate::report::digest_inputs(&[&g1.matrix, &g2.matrix], &[n as f64]))
            .metric("waypoints", path.waypoints.len() as f64)
            .metric("max_power_residual", path.max_power_residual)
            .metric("endpoint_error", path.endpoint_error)
            .note("invariant", path.invariant.to_string());
        // Separation: a point from another class, if one exists.
        let classes = points_by_component(spec, n)?;
        let source = canonicalize(&p);
        let others: Vec<&TorusTorsionPoint> = classes
            .iter()
            .filter(|(c, _)| *c != source)
            .flat_map(|(_, pts)| pts.iter())
            .collect();
        let separated = if others.is_empty() {
            record = record.note("separation", "single class");
            true
        } else {
            let q = others[rng.random_range(0..others.len())];
            let g3 = q.realize().conjugate_by(&torsion_conjugator(spec, rng)?)?;
            let ok = matches!(
                connect_within_component(&g1, &g3, n, waypoints),
                Err(Error::DifferentComponents(_, _))
            );
            record = record.note("separation", if ok { "different components" } else { "not separated" });
            ok
        };
        Ok(record.outcome(connected && separated, path.max_power_residual))
    })
}
