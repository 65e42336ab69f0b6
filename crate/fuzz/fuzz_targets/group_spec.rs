#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::GroupSpec;

fuzz_target!(|data: &str| {
    if let Ok(spec) = data.parse::<GroupSpec>() {
        assert_eq!(spec.to_string().parse::<GroupSpec>().unwrap(), spec);
    }
});
