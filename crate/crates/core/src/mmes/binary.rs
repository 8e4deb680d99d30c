//! Search over states with amplitudes `±N^{-1/2}` by annealed single sign
//! flips, scored in exact integer arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::Rng;

use super::{verify_perfect, SearchResult, PERFECT_TOLERANCE};
use crate::bipartition::enumerate_balanced;
use crate::bits;
use crate::error::{invalid, Result};
use crate::exact::{to_f64, Rational};
use crate::qstate::{PureState, RngSeed};
use crate::size::SystemSize;

/// Largest register handled by [`binary_search_mmes`].
pub const BINARY_MAX_QUBITS: u32 = 6;

/// Row/column index tables of every balanced reshaping.
struct SignScorer {
    rows: usize,
    cols: usize,
    layouts: Vec<Vec<usize>>,
    scratch: Vec<i64>,
}

impl SignScorer {
    fn new(size: SystemSize) -> Result<Self> {
        let parts = enumerate_balanced(size)?;
        let rows = size.dim_a();
        let cols = size.dim_abar();
        let layouts = parts
            .iter()
            .map(|p| {
                let (a, abar) = (p.mask(), p.complement().mask());
                let mut idx = Vec::with_capacity(rows * cols);
                for r in 0..rows as u64 {
                    for c in 0..cols as u64 {
                        idx.push((bits::deposit(r, a) | bits::deposit(c, abar)) as usize);
                    }
                }
                idx
            })
            .collect();
        Ok(Self {
            rows,
            cols,
            layouts,
            scratch: vec![0; rows * rows],
        })
    }

    /// `Σ_A ‖M_A M_Aᵀ‖²` for the sign matrix reshaped along each `A`.
    fn score(&mut self, signs: &[i8]) -> i64 {
        let (rows, cols) = (self.rows, self.cols);
        let mut total = 0i64;
        for idx in &self.layouts {
            for i in 0..rows {
                for j in i..rows {
                    let mut dot = 0i64;
                    for c in 0..cols {
                        dot += (signs[idx[i * cols + c]] * signs[idx[j * cols + c]]) as i64;
                    }
                    self.scratch[i * rows + j] = dot;
                }
            }
            for i in 0..rows {
                total += self.scratch[i * rows + i].pow(2);
                for j in i + 1..rows {
                    total += 2 * self.scratch[i * rows + j].pow(2);
                }
            }
        }
        total
    }

    /// Score → `π_ME = score / (C(n,n_A) N²)`.
    fn energy(&self, score: i64, dim: usize) -> Rational {
        let den = self.layouts.len() as i64 * (dim as i64).pow(2);
        Rational::new(BigInt::from(score), BigInt::from(den))
    }
}

/// Exact potential of the state with amplitudes `signs[k]/√N`.
pub fn sign_state_energy(size: SystemSize, signs: &[i8]) -> Result<Rational> {
    size.check_limit(BINARY_MAX_QUBITS)?;
    if signs.len() != size.dim() || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(invalid("expected one ±1 entry per basis state"));
    }
    let mut scorer = SignScorer::new(size)?;
    let score = scorer.score(signs);
    Ok(scorer.energy(score, size.dim()))
}

/// Annealed sign-flip search for a ±1 MMES within `budget` flip proposals.
/// Each chain ramps the inverse temperature of `N·ΔH` linearly from 0.5 to
/// 200 over `100·N` flips, and chains restart until the target `1/N_A` is hit
/// or the budget is spent.
pub fn binary_search_mmes(size: SystemSize, seed: RngSeed, budget: usize) -> Result<SearchResult> {
    size.check_limit(BINARY_MAX_QUBITS)?;
    if size.n() < 2 {
        return Err(invalid("sign search needs at least 2 qubits"));
    }
    let dim = size.dim();
    let mut scorer = SignScorer::new(size)?;
    let parts = scorer.layouts.len() as i64;
    let norm = parts * (dim as i64) * (dim as i64);
    let target = norm / size.dim_a() as i64;
    let chain_len = 100 * dim;
    let mut rng = seed.rng();

    let mut best: Option<(i64, Vec<i8>)> = None;
    let mut used = 0usize;
    let mut hit = false;
    while used < budget && !hit {
        let mut signs: Vec<i8> = (0..dim).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut score = scorer.score(&signs);
        used += 1;
        for t in 0..chain_len {
            if score == target || used >= budget {
                break;
            }
            let beta = 0.5 + 199.5 * t as f64 / chain_len as f64;
            let k = rng.gen_range(0..dim);
            signs[k] = -signs[k];
            let trial = scorer.score(&signs);
            used += 1;
            let d = (trial - score) as f64 / norm as f64 * dim as f64;
            if trial <= score || rng.gen::<f64>() < (-beta * d).exp() {
                score = trial;
            } else {
                signs[k] = -signs[k];
            }
            if best.as_ref().map_or(true, |b| score < b.0) {
                best = Some((score, signs.clone()));
            }
        }
        if best.as_ref().map_or(true, |b| score < b.0) {
            best = Some((score, signs.clone()));
        }
        hit = best.as_ref().is_some_and(|b| b.0 == target);
    }

    let (score, signs) = best.expect("at least one evaluation");
    let exact = scorer.energy(score, dim);
    let amp = (dim as f64).sqrt().recip();
    let amps = signs.iter().map(|&s| Complex64::new(s as f64 * amp, 0.0)).collect();
    let state = PureState::from_amplitudes(size, amps)?;
    let report = verify_perfect(&state, PERFECT_TOLERANCE)?;
    Ok(SearchResult {
        best_energy: to_f64(&exact),
        best_state: state,
        is_perfect: score == target,
        exact_energy: Some(exact),
        energy_trace: Vec::new(),
        per_bipartition_purities: report.purities,
        restart: 0,
        budget_exhausted: !hit,
    })
}
