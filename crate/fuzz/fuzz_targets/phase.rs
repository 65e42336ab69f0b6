#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::torsion::Phase;

fuzz_target!(|data: &str| {
    if let Ok(p) = data.parse::<Phase>() {
        assert!(p.turns() >= 0.0 && p.turns() < 1.0);
        assert_eq!(p.to_string().parse::<Phase>().unwrap(), p);
        let _ = p.checked_add(p.neg());
    }
});
