#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::torsion::read_catalog_csv;

fuzz_target!(|data: &str| {
    let _ = read_catalog_csv(data);
});
