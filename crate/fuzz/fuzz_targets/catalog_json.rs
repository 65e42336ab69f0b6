#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::torsion::read_catalog_json;

fuzz_target!(|data: &str| {
    if let Ok(entries) = read_catalog_json(data) {
        for e in entries {
            let _ = e.representative.to_matrix();
        }
    }
});
