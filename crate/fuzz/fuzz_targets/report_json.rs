#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::VerificationReport;

fuzz_target!(|data: &str| {
    if let Ok(report) = VerificationReport::from_json(data) {
        let _ = report.summary();
        let _ = report.to_json();
    }
});
