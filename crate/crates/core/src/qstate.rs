//! Dense pure states of `n` qubits, Haar sampling, and reference states.
//!
//! Basis index `k` carries qubit `i` in bit `i`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bipartition::Bipartition;
use crate::bits;
use crate::error::{invalid, Result};
use crate::exact::Rational;
use crate::size::SystemSize;

/// Tolerance on `Σ|z_k|² = 1` for every constructed state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Seed of a reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Deterministic generator for this seed.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Generator for the `stream`-th independent substream of this seed.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

/// Normalized amplitude vector of an `n`-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    size: SystemSize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps and normalizes an amplitude vector of length `2^n`.
    pub fn from_amplitudes(size: SystemSize, amps: Vec<Complex64>) -> Result<Self> {
        size.check_dense()?;
        if amps.len() != size.dim() {
            return Err(invalid(format!(
                "expected {} amplitudes for {size}, got {}",
                size.dim(),
                amps.len()
            )));
        }
        let mut state = PureState { size, amps };
        state.renormalize()?;
        Ok(state)
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(size: SystemSize, k: usize) -> Result<Self> {
        size.check_dense()?;
        if k >= size.dim() {
            return Err(invalid(format!("basis index {k} out of range for {size}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); size.dim()];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(PureState { size, amps })
    }

    #[inline]
    pub fn size(&self) -> SystemSize {
        self.size
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Mutable access; callers must renormalize before relying on the norm.
    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn renormalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|z| *z *= inv);
        Ok(())
    }
}

/// Draws a state from the unitarily invariant measure: `N` independent
/// standard complex Gaussians, normalized.
pub fn sample_haar(size: SystemSize, seed: RngSeed) -> Result<PureState> {
    sample_haar_with(size, &mut seed.rng())
}

/// [`sample_haar`] drawing from a caller-owned generator.
pub fn sample_haar_with<R: Rng + ?Sized>(size: SystemSize, rng: &mut R) -> Result<PureState> {
    size.check_dense()?;
    let amps = (0..size.dim())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::from_amplitudes(size, amps)
}

/// Exact Haar moment `⟨Π_j |z_{q_j}|^{2 m_j}⟩ = (N-1)! Π m_j! / (N-1+Σm_j)!`
/// for distinct basis indices `q_j` with multiplicities `m_j`.
pub fn haar_moment(size: SystemSize, exponents: &[(u64, u32)]) -> Result<Rational> {
    let mut seen = std::collections::HashSet::new();
    for &(k, m) in exponents {
        if m == 0 {
            return Err(invalid("multiplicities must be at least 1"));
        }
        if size.n() < 64 && k >= 1u64 << size.n() {
            return Err(invalid(format!("basis index {k} out of range for {size}")));
        }
        if !seen.insert(k) {
            return Err(invalid(format!("duplicate basis index {k}")));
        }
    }
    let dim = BigInt::from(size.dim_big());
    let total: u64 = exponents.iter().map(|&(_, m)| m as u64).sum();
    let mut num = BigInt::one();
    for &(_, m) in exponents {
        for i in 2..=m as u64 {
            num *= i;
        }
    }
    // (N-1)!/(N-1+M)! = 1 / (N (N+1) ... (N+M-1))
    let mut den = BigInt::one();
    for i in 0..total {
        den *= &dim + i;
    }
    Ok(Rational::new(num, den))
}

/// Canonical maximally entangled state across `part`: uniform amplitude
/// `N_A^{-1/2}` on the strings whose `A`-bits equal the first `n_A` bits of
/// the `Ā`-bits (any remaining `Ā` bit is zero).
pub fn max_bipartite_state(size: SystemSize, part: &Bipartition) -> Result<PureState> {
    size.check_dense()?;
    if part.size() != size {
        return Err(invalid("bipartition belongs to a different register"));
    }
    if !part.is_balanced() {
        return Err(invalid(format!(
            "mask popcount {} differs from n_A = {}",
            part.popcount(),
            size.n_a()
        )));
    }
    let a_mask = part.mask();
    let abar_mask = part.complement().mask();
    let amp = Complex64::new((size.dim_a() as f64).sqrt().recip(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); size.dim()];
    for l in 0..size.dim_a() as u64 {
        let k = bits::deposit(l, a_mask) | bits::deposit(l, abar_mask);
        amps[k as usize] = amp;
    }
    PureState::from_amplitudes(size, amps)
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(size: SystemSize) -> Result<PureState> {
    if size.n() < 2 {
        return Err(invalid("GHZ state needs at least 2 qubits"));
    }
    size.check_dense()?;
    let mut amps = vec![Complex64::new(0.0, 0.0); size.dim()];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = Complex64::new(h, 0.0);
    amps[size.dim() - 1] = Complex64::new(h, 0.0);
    PureState::from_amplitudes(size, amps)
}
