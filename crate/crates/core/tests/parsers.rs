//! Every text entry point must reject bad input with an error, never a panic.
//! Replays the fuzz corpus and then random strings shaped like each format.

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use torsion_orbits::torsion::{read_catalog_csv, read_catalog_json, CanonicalInvariant, Phase};
use torsion_orbits::{GroupSpec, VerificationReport};

fn parse_all(text: &str) {
    if let Ok(inv) = text.parse::<CanonicalInvariant>() {
        assert_eq!(inv.to_string().parse::<CanonicalInvariant>().unwrap(), inv);
    }
    if let Ok(p) = text.parse::<Phase>() {
        assert_eq!(p.to_string().parse::<Phase>().unwrap(), p);
    }
    if let Ok(spec) = text.parse::<GroupSpec>() {
        assert_eq!(spec.to_string().parse::<GroupSpec>().unwrap(), spec);
    }
    let _ = read_catalog_csv(text);
    let _ = read_catalog_json(text);
    if let Ok(r) = VerificationReport::from_json(text) {
        let _ = r.summary();
    }
}

#[test]
fn fuzz_corpus_replays_cleanly() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut seen = 0;
    for target in fs::read_dir(&root).unwrap() {
        for file in fs::read_dir(target.unwrap().path()).unwrap() {
            let bytes = fs::read(file.unwrap().path()).unwrap();
            parse_all(&String::from_utf8_lossy(&bytes));
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn corpus_catalogs_and_reports_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let csv = fs::read_to_string(root.join("catalog_csv/su2_n4.csv")).unwrap();
    assert_eq!(read_catalog_csv(&csv).unwrap().len(), 3);
    assert!(read_catalog_csv(&fs::read_to_string(root.join("catalog_csv/zero_order.csv")).unwrap()).is_err());
    let json = fs::read_to_string(root.join("catalog_json/u2_n2.json")).unwrap();
    assert_eq!(read_catalog_json(&json).unwrap().len(), 3);
    let failed = VerificationReport::from_json(&fs::read_to_string(root.join("report_json/failed.json")).unwrap()).unwrap();
    assert!(!failed.passed);
    assert_eq!(failed.worst_residual, f64::INFINITY);
}

proptest! {
    #[test]
    fn invariant_like_strings(s in "[0-9/,\\- ]{0,24}(,even|,odd)?") {
        parse_all(&s);
    }

    #[test]
    fn spec_like_strings(s in "(U|SU|SO|SL|Sp|sl2r)?\\(?[0-9]{0,3}(,R)?\\)?") {
        parse_all(&s);
    }

    #[test]
    fn csv_like_rows(
        fam in "U|SU|SO|SL2R|X",
        size in 0usize..7,
        n in 0u32..9,
        canon in "[0-9/,]{0,12}",
        dim in 0usize..30,
        order in 0u64..9,
    ) {
        let text = format!("group,size,n,component_index,canonical,dimension,exact_order\n{fam},{size},{n},0,\"{canon}\",{dim},{order}\n");
        parse_all(&text);
    }

    #[test]
    fn arbitrary_text(s in "\\PC{0,64}") {
        parse_all(&s);
    }
}
