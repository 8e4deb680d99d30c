//! Monte Carlo estimation of the energy distribution `P₀(E)` of the potential
//! over Haar-random states, reweighting to `P_β(E)`, and the high-temperature
//! series for `⟨H⟩_β`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bipartition::PotentialEvaluator;
use crate::cumulants::exact_cumulants;
use crate::error::{invalid, Error, Result};
use crate::qstate::{sample_haar_with, RngSeed};
use crate::size::SystemSize;
use crate::stats::{self, KahanSum, SampleCumulants};

/// Samples per independent random stream.
pub const CHUNK_SAMPLES: usize = 1024;
/// Smallest sample count accepted by [`estimate_p0`].
pub const MIN_SAMPLES: usize = 1000;
/// Effective sample size below which reweighted output is flagged.
pub const LOW_ESS_THRESHOLD: f64 = 100.0;
/// Bin width used when none is given for `n = 4`.
pub const DEFAULT_BIN_WIDTH: f64 = 3e-3;

/// Potential values of independent Haar-random states.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergySamples {
    pub size: SystemSize,
    pub seed: RngSeed,
    pub energies: Vec<f64>,
}

/// Draws `n_samples` Haar states and evaluates the potential of each.
///
/// Sample `i` comes from stream `i / CHUNK_SAMPLES` of `seed`, so the output
/// does not depend on the number of worker threads.
pub fn sample_energies(size: SystemSize, n_samples: usize, seed: RngSeed) -> Result<EnergySamples> {
    let evaluator = PotentialEvaluator::new(size)?;
    let chunks = n_samples.div_ceil(CHUNK_SAMPLES);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut eval = evaluator.clone();
            let mut rng = seed.stream(chunk as u64);
            let count = CHUNK_SAMPLES.min(n_samples - chunk * CHUNK_SAMPLES);
            (0..count)
                .map(|_| {
                    let state = sample_haar_with(size, &mut rng).expect("size checked above");
                    eval.energy_mut(state.amplitudes())
                })
                .collect()
        })
        .collect();
    Ok(EnergySamples {
        size,
        seed,
        energies: parts.concat(),
    })
}

impl EnergySamples {
    pub fn cumulants(&self) -> SampleCumulants {
        stats::sample_cumulants(&self.energies)
    }
}

/// One histogram bin: left edge, probability density and the standard error
/// of that density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower_edge: f64,
    pub density: f64,
    pub std_error: f64,
}

/// Density-normalized histogram of the energy at inverse temperature `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyHistogram {
    pub size: SystemSize,
    pub beta: f64,
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
    /// Raw sample counts per bin from the underlying `β = 0` run.
    pub counts: Vec<u64>,
    pub n_samples: usize,
    pub seed: RngSeed,
    /// Effective sample size after reweighting (`n_samples` at `β = 0`).
    pub ess: f64,
    pub low_ess_warning: bool,
}

/// Bin layout aligned to the lower energy bound `1/N_A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinLayout {
    pub origin: f64,
    pub width: f64,
    pub count: usize,
}

impl BinLayout {
    pub fn new(size: SystemSize, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid(format!("bin width must be positive, got {width}")));
        }
        let origin = 1.0 / size.dim_a() as f64;
        let count = (((1.0 - origin) / width).ceil() as usize).max(1);
        Ok(Self {
            origin,
            width,
            count,
        })
    }

    #[inline]
    pub fn index(&self, e: f64) -> usize {
        let i = ((e - self.origin) / self.width).floor();
        (i.max(0.0) as usize).min(self.count - 1)
    }

    #[inline]
    pub fn lower_edge(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.width
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.lower_edge(i) + 0.5 * self.width
    }
}

/// Weighted histogram of `energies`; weights need not be normalized.
/// Standard errors use `√(Σ w_i² (1_b(E_i) − p_b)²) / Σ w_i`.
fn weighted_bins(layout: &BinLayout, energies: &[f64], weights: &[f64]) -> (Vec<HistogramBin>, Vec<u64>) {
    let mut counts = vec![0u64; layout.count];
    let mut mass = vec![KahanSum::new(); layout.count];
    let mut mass_sq = vec![KahanSum::new(); layout.count];
    let mut total = KahanSum::new();
    let mut total_sq = KahanSum::new();
    for (&e, &w) in energies.iter().zip(weights) {
        let i = layout.index(e);
        counts[i] += 1;
        mass[i].add(w);
        mass_sq[i].add(w * w);
        total.add(w);
        total_sq.add(w * w);
    }
    let (total, total_sq) = (total.value(), total_sq.value());
    let bins = (0..layout.count)
        .map(|i| {
            let p = mass[i].value() / total;
            let in_sq = mass_sq[i].value();
            // Σ w² (1_b − p)² split into in-bin and out-of-bin samples.
            let var = in_sq * (1.0 - p).powi(2) + (total_sq - in_sq) * p * p;
            HistogramBin {
                lower_edge: layout.lower_edge(i),
                density: p / layout.width,
                std_error: var.max(0.0).sqrt() / total / layout.width,
            }
        })
        .collect();
    (bins, counts)
}

/// Kish effective sample size `(Σw)²/Σw²`.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = stats::kahan_sum(weights.iter().copied());
    let s2: f64 = stats::kahan_sum(weights.iter().map(|w| w * w));
    s * s / s2
}

/// Boltzmann weights `e^{−β(E−E_min)}`.
pub fn boltzmann_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let shift = if beta >= 0.0 {
        energies.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    energies.iter().map(|&e| (-beta * (e - shift)).exp()).collect()
}

/// Histogram of sampled energies reweighted to inverse temperature `beta`
/// sample by sample.
pub fn histogram_from_samples(samples: &EnergySamples, beta: f64, bin_width: f64) -> Result<EnergyHistogram> {
    if samples.energies.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let layout = BinLayout::new(samples.size, bin_width)?;
    let weights = boltzmann_weights(&samples.energies, beta);
    let (bins, counts) = weighted_bins(&layout, &samples.energies, &weights);
    let ess = effective_sample_size(&weights);
    Ok(EnergyHistogram {
        size: samples.size,
        beta,
        bin_width,
        bins,
        counts,
        n_samples: samples.energies.len(),
        seed: samples.seed,
        ess,
        low_ess_warning: ess < LOW_ESS_THRESHOLD,
    })
}

/// Histogram of a correlated series of energies (a Markov chain at fixed
/// `beta`), with per-bin standard errors from `batches` batch means.
pub fn chain_histogram(
    size: SystemSize,
    beta: f64,
    energies: &[f64],
    bin_width: f64,
    batches: usize,
    seed: RngSeed,
) -> Result<EnergyHistogram> {
    if energies.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    if batches < 2 || energies.len() < batches {
        return Err(invalid("need at least two batches of one sample each"));
    }
    let layout = BinLayout::new(size, bin_width)?;
    let index: Vec<usize> = energies.iter().map(|&e| layout.index(e)).collect();
    let mut counts = vec![0u64; layout.count];
    index.iter().for_each(|&i| counts[i] += 1);
    let len = energies.len() / batches;
    let m = energies.len() as f64;
    let bins = (0..layout.count)
        .map(|b| {
            let p = counts[b] as f64 / m;
            let se = if counts[b] == 0 {
                0.0
            } else {
                let ind: Vec<f64> = index[..len * batches].iter().map(|&i| (i == b) as u8 as f64).collect();
                stats::batch_means_error(&ind, batches)
            };
            HistogramBin {
                lower_edge: layout.lower_edge(b),
                density: p / layout.width,
                std_error: se / layout.width,
            }
        })
        .collect();
    Ok(EnergyHistogram {
        size,
        beta,
        bin_width,
        bins,
        counts,
        n_samples: energies.len(),
        seed,
        ess: f64::NAN,
        low_ess_warning: false,
    })
}

/// Samples Haar states, evaluates the potential and bins it into a
/// density-normalized histogram of `P₀(E)`.
pub fn estimate_p0(size: SystemSize, n_samples: usize, bin_width: f64, seed: RngSeed) -> Result<EnergyHistogram> {
    if n_samples < MIN_SAMPLES {
        return Err(invalid(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    BinLayout::new(size, bin_width)?;
    let samples = sample_energies(size, n_samples, seed)?;
    histogram_from_samples(&samples, 0.0, bin_width)
}

/// Bin-level reweighting `P_β(E) ∝ e^{−βE} P₀(E)` of a `β = 0` histogram,
/// evaluated at bin centers.
pub fn reweight(hist: &EnergyHistogram, beta: f64) -> Result<EnergyHistogram> {
    if hist.bins.is_empty() || hist.n_samples == 0 {
        return Err(Error::EmptyHistogram);
    }
    if hist.beta != 0.0 {
        return Err(invalid("reweighting starts from a β = 0 histogram"));
    }
    let layout = BinLayout::new(hist.size, hist.bin_width)?;
    let occupied = || (0..layout.count).filter(|&i| hist.counts[i] > 0);
    let e_ref = occupied()
        .map(|i| layout.center(i))
        .fold(if beta >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| {
            if beta >= 0.0 {
                a.min(b)
            } else {
                a.max(b)
            }
        });
    let factor: Vec<f64> = (0..layout.count)
        .map(|i| (-beta * (layout.center(i) - e_ref)).exp())
        .collect();
    let mut total = KahanSum::new();
    let mut total_sq = KahanSum::new();
    for i in occupied() {
        total.add(hist.counts[i] as f64 * factor[i]);
        total_sq.add(hist.counts[i] as f64 * factor[i] * factor[i]);
    }
    let (total, total_sq) = (total.value(), total_sq.value());
    let bins = (0..layout.count)
        .map(|i| {
            let c = hist.counts[i] as f64;
            let p = c * factor[i] / total;
            let in_sq = c * factor[i] * factor[i];
            let var = in_sq * (1.0 - p).powi(2) + (total_sq - in_sq) * p * p;
            HistogramBin {
                lower_edge: layout.lower_edge(i),
                density: p / layout.width,
                std_error: var.max(0.0).sqrt() / total / layout.width,
            }
        })
        .collect();
    let ess = total * total / total_sq;
    Ok(EnergyHistogram {
        beta,
        bins,
        ess,
        low_ess_warning: ess < LOW_ESS_THRESHOLD,
        ..hist.clone()
    })
}

impl EnergyHistogram {
    /// `Σ density · bin_width`.
    pub fn integral(&self) -> f64 {
        stats::kahan_sum(self.bins.iter().map(|b| b.density * self.bin_width))
    }

    /// Mean, variance and third central moment from bin centers.
    pub fn moments(&self) -> SampleCumulants {
        let half = 0.5 * self.bin_width;
        let mass = |b: &HistogramBin| b.density * self.bin_width;
        let mean = stats::kahan_sum(self.bins.iter().map(|b| mass(b) * (b.lower_edge + half)));
        let central = |k: i32| {
            stats::kahan_sum(
                self.bins
                    .iter()
                    .map(|b| mass(b) * (b.lower_edge + half - mean).powi(k)),
            )
        };
        SampleCumulants {
            count: self.n_samples,
            mean,
            variance: central(2),
            third: central(3),
        }
    }

    /// Index of the bin holding the most probability.
    pub fn mode_bin(&self) -> usize {
        self.bins
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.density.total_cmp(&b.1.density))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// RFC-4180 CSV with header `lower_edge,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lower_edge,density\r\n");
        for b in &self.bins {
            out.push_str(&format!("{},{}\r\n", b.lower_edge, b.density));
        }
        out
    }

    pub fn metadata(&self) -> HistogramMetadata {
        HistogramMetadata {
            n: self.size.n(),
            beta: self.beta,
            samples: self.n_samples,
            seed: self.seed.0,
            bin_width: self.bin_width,
            bins: self.bins.len(),
            effective_sample_size: self.ess,
            low_ess_warning: self.low_ess_warning,
        }
    }
}

/// Sidecar description of an emitted histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramMetadata {
    pub n: u32,
    pub beta: f64,
    pub samples: usize,
    pub seed: u64,
    pub bin_width: f64,
    pub bins: usize,
    pub effective_sample_size: f64,
    pub low_ess_warning: bool,
}

/// Moments of the potential under `e^{−βH}` estimated by reweighting Haar
/// samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReweightedMoments {
    pub beta: f64,
    pub mean: f64,
    pub mean_std_error: f64,
    pub variance: f64,
    pub third: f64,
    pub ess: f64,
    pub low_ess_warning: bool,
}

/// Sample-level reweighting of `β = 0` draws to inverse temperature `beta`.
pub fn reweighted_moments(samples: &EnergySamples, beta: f64) -> Result<ReweightedMoments> {
    if samples.energies.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let w = boltzmann_weights(&samples.energies, beta);
    let total = stats::kahan_sum(w.iter().copied());
    let avg = |f: &dyn Fn(f64) -> f64| {
        stats::kahan_sum(samples.energies.iter().zip(&w).map(|(&e, &wi)| wi * f(e))) / total
    };
    let mean = avg(&|e| e);
    let variance = avg(&|e| (e - mean).powi(2));
    let third = avg(&|e| (e - mean).powi(3));
    let se = stats::kahan_sum(
        samples
            .energies
            .iter()
            .zip(&w)
            .map(|(&e, &wi)| (wi / total).powi(2) * (e - mean).powi(2)),
    )
    .sqrt();
    let ess = effective_sample_size(&w);
    Ok(ReweightedMoments {
        beta,
        mean,
        mean_std_error: se,
        variance,
        third,
        ess,
        low_ess_warning: ess < LOW_ESS_THRESHOLD,
    })
}

/// Truncated high-temperature series at inverse temperature `beta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesEvaluation {
    pub beta: f64,
    /// `μ − βσ̄² + β²κ₃/2`.
    pub mean_energy: f64,
    /// `μ − βσ̄²`: the rigid Gaussian shift.
    pub linear_mean_energy: f64,
    /// Computable terms of `F(β) = ln Z(β)/β`: `−μ`, `βσ̄²/2`, `−β²κ₃/6`.
    pub free_energy_terms: Vec<f64>,
    /// The remaining `ln Z(0)/β` term, which is not evaluated.
    pub free_energy_constant: String,
}

pub fn series_mean_energy(size: SystemSize, beta: f64) -> Result<SeriesEvaluation> {
    let r = exact_cumulants(size)?;
    let (mu, s2, k3) = (r.mu_f64(), r.sigma_bar_sq_f64(), r.kappa3_f64());
    Ok(SeriesEvaluation {
        beta,
        mean_energy: mu - beta * s2 + 0.5 * beta * beta * k3,
        linear_mean_energy: mu - beta * s2,
        free_energy_terms: vec![-mu, 0.5 * beta * s2, -beta * beta * k3 / 6.0],
        free_energy_constant: "ln Z(0)/beta".to_string(),
    })
}

/// Largest `β` for which the Gaussian rigid-shift law is expected to hold:
/// `μ − βσ̄² − σ̄ ≥ 0`.
pub fn shift_validity_bound(size: SystemSize) -> Result<f64> {
    let r = exact_cumulants(size)?;
    let (mu, s2) = (r.mu_f64(), r.sigma_bar_sq_f64());
    Ok((mu - s2.sqrt()) / s2)
}

/// Kolmogorov–Smirnov distance between the sample and the Gaussian with
/// mean `mu` and variance `variance`.
pub fn ks_distance_to_gaussian(energies: &[f64], mu: f64, variance: f64) -> Result<f64> {
    let normal = Normal::new(mu, variance.sqrt()).map_err(|e| invalid(e.to_string()))?;
    Ok(stats::ks_statistic(energies, |x| normal.cdf(x)))
}
