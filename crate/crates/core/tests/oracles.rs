use vmp_core::oracles::{default_cases, run_suite, SUITES};
use vmp_core::Error;

#[test]
fn every_suite_passes_on_two_seeds() {
    for suite in SUITES {
        for seed in [3, 17] {
            let cases = default_cases(suite).unwrap() / 5;
            let report = run_suite(suite, seed, cases).unwrap();
            assert!(report.passed(), "{report}");
            assert_eq!(report.cases, cases);
        }
    }
}

#[test]
fn unknown_suite() {
    assert!(matches!(run_suite("bogus", 0, 1), Err(Error::UnknownSuite(_))));
    assert!(default_cases("bogus").is_err());
}
