#![no_main]

use libfuzzer_sys::fuzz_target;
use torsion_orbits::torsion::CanonicalInvariant;

fuzz_target!(|data: &str| {
    // Anything that parses must print back to text that parses to the same value.
    if let Ok(inv) = data.parse::<CanonicalInvariant>() {
        let again: CanonicalInvariant = inv.to_string().parse().expect("display output parses");
        assert_eq!(inv, again);
        let _ = inv.exact_order();
    }
});
