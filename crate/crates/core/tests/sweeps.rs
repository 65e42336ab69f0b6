//! Wider randomized sweeps through the public API, covering every group the
//! library supports.

use torsion_orbits::group::GroupSpec;
use torsion_orbits::sweep::{kernel_image_sweep, zero_intersection_sweep, SweepPlan};
use torsion_orbits::torsion::{catalog_components, catalog_to_csv, catalog_to_json, read_catalog_csv, read_catalog_json};
use torsion_orbits::VerificationReport;

fn all_groups() -> Vec<GroupSpec> {
    let mut v: Vec<GroupSpec> = (1..=5).map(|m| GroupSpec::u(m).unwrap()).collect();
    v.extend((2..=5).map(|m| GroupSpec::su(m).unwrap()));
    v.extend((2..=5).map(|m| GroupSpec::so(m).unwrap()));
    v.push(GroupSpec::sl2r());
    v
}

#[test]
fn kernel_identity_holds_on_every_group() {
    for seed in [1u64, 2, 3] {
        let plan = SweepPlan::new(all_groups(), (1..=8).collect(), 200, seed * 1_000_003).unwrap();
        let r = kernel_image_sweep(&plan);
        assert!(r.passed, "{}", r.summary());
        assert!(r.max_metric("angle_residual").unwrap() <= 1e-7);
        let r = zero_intersection_sweep(&plan);
        assert!(r.passed, "{}", r.summary());
    }
}

#[test]
fn reports_round_trip_through_json() {
    let plan = SweepPlan::new(vec![GroupSpec::so(5).unwrap()], vec![3], 10, 5).unwrap();
    let r = kernel_image_sweep(&plan);
    let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn catalogs_round_trip_for_every_group() {
    for spec in all_groups() {
        for n in [1, 2, 3, 5] {
            let cat = catalog_components(spec, n).unwrap();
            assert_eq!(read_catalog_csv(&catalog_to_csv(&cat).unwrap()).unwrap().len(), cat.len());
            assert_eq!(read_catalog_json(&catalog_to_json(&cat).unwrap()).unwrap().len(), cat.len());
        }
    }
}
