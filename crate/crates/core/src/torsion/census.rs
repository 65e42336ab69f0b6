use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::canonical::{canonicalize, invariant_of_element, sl2_orientation};
use super::catalog::points_by_component;
use super::phase::Phase;
use super::point::TorusTorsionPoint;
use crate::group::{random_element, GroupSpec};
use crate::report::{digest_inputs, TrialRecord, VerificationReport};
use crate::sweep::{run_trials, torsion_conjugator};

/// Traces closer than this are treated as one SL(2,R) class.
const TRACE_CLUSTER_TOL: f64 = 1e-3;

fn summary_trial(index: usize, classes: usize, expected: usize, extra: &[(&str, f64)]) -> TrialRecord {
    let mut t = TrialRecord::new(index, None, digest_inputs(&[], &[classes as f64, expected as f64]))
        .metric("classes", classes as f64)
        .metric("expected", expected as f64)
        .note("role", "summary")
        .outcome(classes == expected, (classes as f64 - expected as f64).abs());
    for (k, v) in extra {
        t = t.metric(k, *v);
    }
    t
}

/// Samples h·R(2πk/n)·h⁻¹ in SL(2,R) and clusters them by (trace, σ).
///
/// Passes when exactly n classes appear and σ never changes between two
/// samples built from the same k.
pub fn sl2_component_census(n: u32, samples: usize, seed: u64) -> VerificationReport {
    const CHECK: &str = "sl2-census";
    if n == 0 || samples == 0 {
        return VerificationReport::rejected(CHECK, "n and samples must be positive");
    }
    let spec = GroupSpec::sl2r();
    let mut trials = run_trials(samples, seed, |index, trial_seed| {
        let mut rng = crate::group::rng_from_seed(trial_seed);
        let k = rng.random_range(0..n);
        let t = TorusTorsionPoint::new(spec, vec![Phase::new(k as i64, n)])
            .expect("one phase")
            .realize();
        let base = TrialRecord::new(index, Some(trial_seed), String::new());
        let h = match random_element(spec, trial_seed) {
            Ok(h) => h,
            Err(e) => return base.note("error", e.to_string()).outcome(false, f64::INFINITY),
        };
        let g = match t.conjugate_by(&h) {
            Ok(g) => g,
            Err(e) => return base.note("error", e.to_string()).outcome(false, f64::INFINITY),
        };
        let base = TrialRecord {
            inputs_digest: digest_inputs(&[&g.matrix], &[n as f64]),
            ..base
        };
        match sl2_orientation(&g) {
            Ok(sigma) => base
                .metric("k", k as f64)
                .metric("trace", g.real_matrix().trace())
                .metric("sigma", sigma as f64),
            Err(e) => base.note("error", e.to_string()).outcome(false, f64::INFINITY),
        }
    });

    // σ must agree with the first sample of the same k.
    let mut first_sigma: BTreeMap<u32, f64> = BTreeMap::new();
    let mut flips = 0usize;
    let mut classes: Vec<(f64, f64)> = Vec::new();
    for t in trials.iter_mut() {
        let (Some(&k), Some(&sigma), Some(&trace)) =
            (t.metrics.get("k"), t.metrics.get("sigma"), t.metrics.get("trace"))
        else {
            continue;
        };
        let reference = *first_sigma.entry(k as u32).or_insert(sigma);
        if sigma != reference {
            flips += 1;
            t.passed = false;
            t.residual = 1.0;
            t.notes.insert("sigma_flip".into(), format!("expected {reference}"));
        }
        if !classes
            .iter()
            .any(|&(tr, s)| s == sigma && (tr - trace).abs() <= TRACE_CLUSTER_TOL)
        {
            classes.push((trace, sigma));
        }
    }
    let count = classes.len();
    trials.push(summary_trial(samples, count, n as usize, &[("sigma_flips", flips as f64)]));
    VerificationReport::from_trials(CHECK, trials)
        .with_aggregate("classes", count as f64)
        .with_aggregate("expected", n as f64)
        .with_aggregate("sigma_flips", flips as f64)
        .with_config("n", n)
        .with_config("samples", samples)
        .with_config("seed", seed)
}

/// Samples random conjugates of torsion points, reads the invariant off each
/// matrix, and counts the distinct invariants.
///
/// Trial i draws its torus point from class i mod C (C the number of
/// classes), uniformly within that class, so every class is visited once
/// samples ≥ C. Each trial passes when the invariant read from the
/// conjugated matrix equals the one of its source point.
pub fn cluster_census(spec: GroupSpec, n: u32, samples: usize, seed: u64) -> VerificationReport {
    const CHECK: &str = "cluster-census";
    if n == 0 || samples == 0 {
        return VerificationReport::rejected(CHECK, "n and samples must be positive");
    }
    let classes = match points_by_component(spec, n) {
        Ok(c) => c,
        Err(e) => return VerificationReport::rejected(CHECK, e.to_string()),
    };
    let expected = classes.len();
    let mut trials = run_trials(samples, seed, |index, trial_seed| {
        let mut rng = crate::group::rng_from_seed(trial_seed);
        let points = &classes[index % expected].1;
        let point = &points[rng.random_range(0..points.len())];
        let source = canonicalize(point);
        let base = TrialRecord::new(index, Some(trial_seed), String::new()).note("source", source.to_string());
        let g = match torsion_conjugator(spec, &mut rng).and_then(|h| point.realize().conjugate_by(&h)) {
            Ok(g) => g,
            Err(e) => return base.note("error", e.to_string()).outcome(false, f64::INFINITY),
        };
        let base = TrialRecord {
            inputs_digest: digest_inputs(&[&g.matrix], &[n as f64]),
            ..base
        };
        match invariant_of_element(&g, n) {
            Ok(found) => base
                .note("invariant", found.to_string())
                .outcome(found == source, if found == source { 0.0 } else { 1.0 }),
            Err(e) => base.note("error", e.to_string()).outcome(false, f64::INFINITY),
        }
    });
    let found: BTreeSet<&String> = trials.iter().filter_map(|t| t.notes.get("invariant")).collect();
    let count = found.len();
    trials.push(summary_trial(samples, count, expected, &[]));
    VerificationReport::from_trials(CHECK, trials)
        .with_aggregate("classes", count as f64)
        .with_aggregate("expected", expected as f64)
        .with_config("group", spec)
        .with_config("n", n)
        .with_config("samples", samples)
        .with_config("seed", seed)
}
