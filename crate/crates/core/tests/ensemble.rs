use mmes_core::cumulants::exact_cumulants;
use mmes_core::ensemble::{
    estimate_p0, histogram_from_samples, ks_distance_to_gaussian, reweight, reweighted_moments,
    sample_energies, series_mean_energy, shift_validity_bound,
};
use mmes_core::{RngSeed, SystemSize};

fn size(n: u32) -> SystemSize {
    SystemSize::new(n).unwrap()
}

#[test]
fn n6_sample_mean_matches_exact() {
    let s = size(6);
    let samples = sample_energies(s, 20_000, RngSeed(60)).unwrap();
    let c = samples.cumulants();
    let se = (c.variance / c.count as f64).sqrt();
    assert!((c.mean - 16.0 / 65.0).abs() < 3.0 * se, "{} vs {}", c.mean, 16.0 / 65.0);
}

#[test]
fn n2_support_is_within_half_and_one() {
    let samples = sample_energies(size(2), 10_000, RngSeed(2)).unwrap();
    assert!(samples.energies.iter().all(|&e| (0.5 - 1e-12..=1.0 + 1e-12).contains(&e)));
    let h = estimate_p0(size(2), 10_000, 0.01, RngSeed(2)).unwrap();
    assert!((h.integral() - 1.0).abs() < 1e-9);
}

#[test]
fn zero_beta_is_identity() {
    let samples = sample_energies(size(4), 5000, RngSeed(4)).unwrap();
    let h0 = histogram_from_samples(&samples, 0.0, 0.01).unwrap();
    let h = estimate_p0(size(4), 5000, 0.01, RngSeed(4)).unwrap();
    assert_eq!(h0.bins, h.bins);
    let m = reweighted_moments(&samples, 0.0).unwrap();
    let c = samples.cumulants();
    assert!((m.mean - c.mean).abs() < 1e-12);
    assert!((m.ess - 5000.0).abs() < 1e-6);
}

#[test]
fn series_matches_reweighting_at_beta_10() {
    let s = size(6);
    let samples = sample_energies(s, 50_000, RngSeed(61)).unwrap();
    let rw = reweighted_moments(&samples, 10.0).unwrap();
    let series = series_mean_energy(s, 10.0).unwrap();
    let z = (rw.mean - series.mean_energy) / rw.mean_std_error;
    assert!(z.abs() < 3.0, "z = {z}");
    assert!(10.0 < shift_validity_bound(s).unwrap());
}

#[test]
fn variance_narrows_at_beta_50() {
    let s = size(6);
    let samples = sample_energies(s, 50_000, RngSeed(61)).unwrap();
    let rw = reweighted_moments(&samples, 50.0).unwrap();
    let ratio = rw.variance / exact_cumulants(s).unwrap().sigma_bar_sq_f64();
    assert!((0.6..=0.85).contains(&ratio), "{ratio}");
    assert!(!rw.low_ess_warning);
}

#[test]
fn reweighted_mean_is_monotone_in_beta() {
    let samples = sample_energies(size(5), 20_000, RngSeed(5)).unwrap();
    let means: Vec<f64> = [-20.0, -5.0, 0.0, 5.0, 20.0, 50.0, 100.0]
        .iter()
        .map(|&b| reweighted_moments(&samples, b).unwrap().mean)
        .collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}

#[test]
fn gaussian_distance_shrinks_with_n() {
    let ds: Vec<f64> = (4..=8)
        .map(|n| {
            let s = size(n);
            let r = exact_cumulants(s).unwrap();
            let e = sample_energies(s, 50_000, RngSeed(80 + n as u64)).unwrap();
            ks_distance_to_gaussian(&e.energies, r.mu_f64(), r.sigma_bar_sq_f64()).unwrap()
        })
        .collect();
    assert!(ds.windows(2).all(|w| w[1] < w[0]), "{ds:?}");
    assert!(ds[4] < 0.03, "{ds:?}");
}

#[test]
fn mass_moves_to_lowest_bin_as_beta_grows() {
    let h0 = estimate_p0(size(3), 20_000, 0.02, RngSeed(3)).unwrap();
    let first = |beta: f64| {
        let h = reweight(&h0, beta).unwrap();
        let i = h.counts.iter().position(|&c| c > 0).unwrap();
        h.bins[i].density * h.bin_width
    };
    let masses: Vec<f64> = [0.0, 10.0, 50.0, 200.0, 1000.0].iter().map(|&b| first(b)).collect();
    assert!(masses.windows(2).all(|w| w[1] > w[0]), "{masses:?}");
    assert!(masses[4] > 0.99);
}

#[test]
fn histogram_csv_is_deterministic() {
    let a = estimate_p0(size(4), 3000, 0.01, RngSeed(9)).unwrap();
    let b = estimate_p0(size(4), 3000, 0.01, RngSeed(9)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("lower_edge,density\r\n"));
    let c = estimate_p0(size(4), 3000, 0.01, RngSeed(10)).unwrap();
    assert_ne!(a.to_csv(), c.to_csv());
}
