use mmes_core::selftest::{run_selftest, SelftestOptions};
use mmes_core::RngSeed;

fn reports(corrupt_ghat: bool) -> Vec<mmes_core::selftest::SelftestReport> {
    [1u64, 2, 99]
        .iter()
        .map(|&s| {
            let opts = SelftestOptions {
                seed: RngSeed(s),
                corrupt_ghat,
                ..Default::default()
            };
            run_selftest(&opts).unwrap()
        })
        .collect()
}

#[test]
fn verdicts_do_not_depend_on_seed() {
    let clean: Vec<Vec<bool>> = reports(false)
        .iter()
        .map(|r| r.checks.iter().map(|c| c.passed).collect())
        .collect();
    assert!(clean.windows(2).all(|w| w[0] == w[1]));
    assert!(reports(true).iter().all(|r| !r.passed));
}

#[test]
fn corrupted_table_fails_for_every_size() {
    let opts = SelftestOptions {
        corrupt_ghat: true,
        ..Default::default()
    };
    let r = run_selftest(&opts).unwrap();
    assert!(!r.passed);
    for n in 2..=6 {
        assert!(r.checks.iter().any(|c| c.n == n && !c.passed), "n={n}");
    }
}

#[test]
fn clean_sweep_passes() {
    let r = run_selftest(&SelftestOptions::default()).unwrap();
    assert!(r.passed);
    assert!(r.checks.iter().any(|c| c.name == "delta_bitwise_vs_definition"));
    assert_eq!(r.checks.iter().map(|c| c.n).min(), Some(2));
    assert_eq!(r.checks.iter().map(|c| c.n).max(), Some(6));
}
