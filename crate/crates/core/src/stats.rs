//! Summation, sample moments, resampling errors and distribution distances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Kahan-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Mean and the first three central-moment-based cumulant estimates of a
/// sample. Variance and third moment use the plain `1/M` normalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleCumulants {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub third: f64,
}

impl SampleCumulants {
    pub fn skewness(&self) -> f64 {
        self.third / self.variance.powf(1.5)
    }
}

pub fn sample_cumulants(xs: &[f64]) -> SampleCumulants {
    let m = xs.len();
    assert!(m > 0, "empty sample");
    let mean = kahan_sum(xs.iter().copied()) / m as f64;
    let mut s2 = KahanSum::new();
    let mut s3 = KahanSum::new();
    for &x in xs {
        let d = x - mean;
        s2.add(d * d);
        s3.add(d * d * d);
    }
    SampleCumulants {
        count: m,
        mean,
        variance: s2.value() / m as f64,
        third: s3.value() / m as f64,
    }
}

/// Bootstrap standard errors of mean, variance and third central moment.
pub fn bootstrap_cumulant_errors(xs: &[f64], resamples: usize, seed: u64) -> SampleCumulants {
    let m = xs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::with_capacity(resamples);
    let mut buf = vec![0.0; m];
    for _ in 0..resamples {
        for slot in buf.iter_mut() {
            *slot = xs[rng.gen_range(0..m)];
        }
        stats.push(sample_cumulants(&buf));
    }
    let sd = |f: &dyn Fn(&SampleCumulants) -> f64| {
        let vals: Vec<f64> = stats.iter().map(f).collect();
        let mu = vals.iter().sum::<f64>() / vals.len() as f64;
        (vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt()
    };
    SampleCumulants {
        count: m,
        mean: sd(&|s| s.mean),
        variance: sd(&|s| s.variance),
        third: sd(&|s| s.third),
    }
}

/// Standard error of the mean of a correlated series by non-overlapping
/// batch means.
pub fn batch_means_error(xs: &[f64], batches: usize) -> f64 {
    let len = xs.len() / batches;
    assert!(len > 0, "more batches than samples");
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * len..(b + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    let mu = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / m;
            let hi = (i + 1) as f64 / m - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for sample size `m`
/// (Kolmogorov distribution with the Stephens small-sample correction).
pub fn ks_p_value(d: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    let lambda = (sm + 0.12 + 0.11 / sm) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat(1e-16).take(10_000));
        let k = kahan_sum(xs);
        assert!((k - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn cumulants_of_small_sample() {
        let c = sample_cumulants(&[1.0, 2.0, 3.0, 10.0]);
        assert_eq!(c.mean, 4.0);
        assert_eq!(c.variance, (9.0 + 4.0 + 1.0 + 36.0) / 4.0);
        assert_eq!(c.third, (-27.0 - 8.0 - 1.0 + 216.0) / 4.0);
        assert!(c.skewness() > 0.0);
    }

    #[test]
    fn ks_uniform_sample_is_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(ks_p_value(d, xs.len()) > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        let d = ks_statistic(&shifted, |x| x.clamp(0.0, 1.0));
        assert!(ks_p_value(d, xs.len()) < 1e-6);
    }

    #[test]
    fn batch_means_of_iid_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.gen::<f64>()).collect();
        let se = batch_means_error(&xs, 100);
        let naive = (1.0f64 / 12.0 / xs.len() as f64).sqrt();
        assert!((se / naive - 1.0).abs() < 0.3);
    }
}
