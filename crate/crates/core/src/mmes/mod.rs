//! Ground-state search for the potential: Metropolis sampling of `e^{−βH}`
//! on the unit sphere, simulated annealing with a deterministic descent
//! polish, perfect-MMES verification and a ±1 sign-pattern search.

mod binary;
mod record;

pub use binary::{binary_search_mmes, sign_state_energy};
pub use record::{PurityEntry, StateRecord, STATE_SCHEMA_VERSION};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipartition::{Bipartition, PotentialEvaluator};
use crate::error::{invalid, Result};
use crate::exact::Rational;
use crate::qstate::{sample_haar_with, PureState, RngSeed};
use crate::size::SystemSize;

/// Default tolerance on `max_A |π_A − 1/N_A|` for calling a state perfect.
pub const PERFECT_TOLERANCE: f64 = 1e-6;
/// Target acceptance window of the adaptive proposal scale.
pub const ACCEPTANCE_WINDOW: (f64, f64) = (0.3, 0.5);
const ADAPT_INTERVAL: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    Geometric,
    Linear,
}

/// Inverse-temperature schedule of an annealing run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub beta_start: f64,
    pub beta_end: f64,
    pub steps: usize,
    pub ramp: Ramp,
    pub moves_per_beta: usize,
    pub restarts: usize,
    /// Iteration cap of the descent polish applied to each chain's end state.
    pub polish_iterations: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            beta_start: 1.0,
            beta_end: 1e5,
            steps: 60,
            ramp: Ramp::Geometric,
            moves_per_beta: 200,
            restarts: 8,
            polish_iterations: 20_000,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_start >= 0.0 && self.beta_end >= self.beta_start && self.beta_end.is_finite()) {
            return Err(invalid("schedule needs 0 <= beta_start <= beta_end < inf"));
        }
        if self.steps == 0 || self.restarts == 0 {
            return Err(invalid("schedule needs at least one step and one restart"));
        }
        if self.ramp == Ramp::Geometric && self.beta_start == 0.0 && self.steps > 1 {
            return Err(invalid("a geometric ramp cannot start at beta = 0"));
        }
        Ok(())
    }

    /// The `steps` inverse temperatures visited, from `beta_start` to `beta_end`.
    pub fn betas(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.beta_end];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                match self.ramp {
                    Ramp::Linear => self.beta_start + t * (self.beta_end - self.beta_start),
                    Ramp::Geometric => self.beta_start * (self.beta_end / self.beta_start).powf(t),
                }
            })
            .collect()
    }

    /// Total Metropolis proposals per restart.
    pub fn moves(&self) -> usize {
        self.steps * self.moves_per_beta
    }
}

/// Outcome of a ground-state search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best_state: PureState,
    pub best_energy: f64,
    /// Exact energy when the state has rational structure (sign search).
    pub exact_energy: Option<Rational>,
    /// `(β, mean H over the moves at that β)` of the winning chain.
    pub energy_trace: Vec<(f64, f64)>,
    pub is_perfect: bool,
    pub per_bipartition_purities: Vec<(Bipartition, f64)>,
    /// Index of the restart that produced the best state.
    pub restart: usize,
    /// Set when a search ended on its budget rather than its target.
    pub budget_exhausted: bool,
}

/// A Metropolis chain sampling `e^{−βH}` on the unit sphere.
#[derive(Clone, Debug)]
pub struct MetropolisChain {
    eval: PotentialEvaluator,
    state: Vec<Complex64>,
    energy: f64,
    proposal: Vec<Complex64>,
}

impl MetropolisChain {
    pub fn new(state: PureState) -> Result<Self> {
        let mut eval = PotentialEvaluator::new(state.size())?;
        let amps = state.into_amplitudes();
        let energy = eval.energy_mut(&amps);
        let proposal = amps.clone();
        Ok(Self {
            eval,
            state: amps,
            energy,
            proposal,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.state
    }

    pub fn to_state(&self) -> Result<PureState> {
        PureState::from_amplitudes(self.eval.size(), self.state.clone())
    }

    /// Proposes `z′ = normalize(z + scale·η)` with `η` an isotropic complex
    /// Gaussian of unit expected norm, accepting with `min(1, e^{−βΔH})`.
    pub fn step<R: Rng + ?Sized>(&mut self, beta: f64, scale: f64, rng: &mut R) -> bool {
        let amp = scale / (2.0 * self.state.len() as f64).sqrt();
        let mut norm = 0.0;
        for (p, z) in self.proposal.iter_mut().zip(&self.state) {
            let eta = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            *p = z + eta * amp;
            norm += p.norm_sqr();
        }
        let inv = norm.sqrt().recip();
        self.proposal.iter_mut().for_each(|p| *p *= inv);
        let e_new = self.eval.energy_mut(&self.proposal);
        let d = e_new - self.energy;
        let accept = d <= 0.0 || beta == 0.0 || rng.gen::<f64>() < (-beta * d).exp();
        if accept {
            std::mem::swap(&mut self.state, &mut self.proposal);
            self.energy = e_new;
        }
        accept
    }
}

/// One Metropolis update of `state` at inverse temperature `beta`.
pub fn metropolis_step<R: Rng + ?Sized>(
    state: &PureState,
    beta: f64,
    proposal_scale: f64,
    rng: &mut R,
) -> Result<(PureState, bool)> {
    let mut chain = MetropolisChain::new(state.clone())?;
    let accepted = chain.step(beta, proposal_scale, rng);
    Ok((chain.to_state()?, accepted))
}

/// Multiplicative proposal-scale controller keeping acceptance inside
/// [`ACCEPTANCE_WINDOW`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveScale {
    pub scale: f64,
    accepted: usize,
    proposed: usize,
}

impl AdaptiveScale {
    pub fn new(scale: f64) -> Self {
        Self {
            scale,
            accepted: 0,
            proposed: 0,
        }
    }

    pub fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as usize;
        if self.proposed == ADAPT_INTERVAL {
            let rate = self.accepted as f64 / self.proposed as f64;
            if rate < ACCEPTANCE_WINDOW.0 {
                self.scale *= 0.8;
            } else if rate > ACCEPTANCE_WINDOW.1 {
                self.scale = (self.scale * 1.25).min(2.0);
            }
            self.scale = self.scale.max(1e-9);
            self.accepted = 0;
            self.proposed = 0;
        }
    }
}

/// Energies visited by a fixed-`β` chain, one per proposal.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRun {
    pub energies: Vec<f64>,
    pub acceptance: f64,
    pub final_scale: f64,
}

/// Runs a fixed-`β` Metropolis chain from a Haar-random start, discarding
/// `burn_in` proposals (during which the scale adapts) and recording `steps`
/// energies at the frozen scale.
pub fn sample_chain(size: SystemSize, beta: f64, burn_in: usize, steps: usize, seed: RngSeed) -> Result<ChainRun> {
    let mut rng = seed.rng();
    let start = sample_haar_with(size, &mut rng)?;
    let mut chain = MetropolisChain::new(start)?;
    let mut adapt = AdaptiveScale::new(0.5);
    for _ in 0..burn_in {
        let ok = chain.step(beta, adapt.scale, &mut rng);
        adapt.record(ok);
    }
    let mut energies = Vec::with_capacity(steps);
    let mut accepted = 0usize;
    for _ in 0..steps {
        accepted += chain.step(beta, adapt.scale, &mut rng) as usize;
        energies.push(chain.energy());
    }
    Ok(ChainRun {
        energies,
        acceptance: accepted as f64 / steps.max(1) as f64,
        final_scale: adapt.scale,
    })
}

/// Accept-only projected-gradient descent on the sphere. The step grows on
/// success and shrinks on failure; stops when it falls below `1e-13` or after
/// `max_iterations`.
pub fn polish(eval: &mut PotentialEvaluator, amps: &mut Vec<Complex64>, max_iterations: usize) -> f64 {
    let dim = amps.len();
    let mut grad = vec![Complex64::new(0.0, 0.0); dim];
    let mut trial = vec![Complex64::new(0.0, 0.0); dim];
    let mut trial_grad = vec![Complex64::new(0.0, 0.0); dim];
    let mut energy = eval.energy_and_gradient(amps, &mut grad);
    let mut step = 0.5;
    for _ in 0..max_iterations {
        let overlap: Complex64 = amps.iter().zip(&grad).map(|(z, g)| z.conj() * g).sum();
        let mut norm = 0.0;
        for ((t, z), g) in trial.iter_mut().zip(amps.iter()).zip(&grad) {
            *t = z - (g - overlap * z) * step;
            norm += t.norm_sqr();
        }
        let inv = norm.sqrt().recip();
        trial.iter_mut().for_each(|t| *t *= inv);
        let e = eval.energy_and_gradient(&trial, &mut trial_grad);
        if e < energy {
            std::mem::swap(amps, &mut trial);
            std::mem::swap(&mut grad, &mut trial_grad);
            energy = e;
            step *= 1.2;
        } else {
            step *= 0.5;
            if step < 1e-13 {
                break;
            }
        }
    }
    energy
}

struct ChainOutcome {
    amps: Vec<Complex64>,
    energy: f64,
    trace: Vec<(f64, f64)>,
}

fn run_restart(size: SystemSize, schedule: &AnnealSchedule, seed: RngSeed, restart: usize) -> Result<ChainOutcome> {
    let mut rng = seed.stream(restart as u64);
    let start = sample_haar_with(size, &mut rng)?;
    let mut chain = MetropolisChain::new(start)?;
    let mut adapt = AdaptiveScale::new(0.5);
    let mut best = (chain.energy(), chain.amplitudes().to_vec());
    let mut trace = Vec::with_capacity(schedule.steps);
    for beta in schedule.betas() {
        let mut sum = 0.0;
        for _ in 0..schedule.moves_per_beta {
            let ok = chain.step(beta, adapt.scale, &mut rng);
            adapt.record(ok);
            sum += chain.energy();
            if chain.energy() < best.0 {
                best = (chain.energy(), chain.amplitudes().to_vec());
            }
        }
        trace.push((beta, sum / schedule.moves_per_beta.max(1) as f64));
    }
    let mut eval = PotentialEvaluator::new(size)?;
    let mut amps = best.1;
    let energy = polish(&mut eval, &mut amps, schedule.polish_iterations);
    Ok(ChainOutcome { amps, energy, trace })
}

/// Simulated annealing over independent parallel restarts, each followed by
/// the descent polish. The lowest energy wins; ties go to the lowest restart
/// index.
pub fn anneal(size: SystemSize, schedule: &AnnealSchedule, seed: RngSeed) -> Result<SearchResult> {
    if size.n() < 2 {
        return Err(invalid("annealing needs at least 2 qubits"));
    }
    size.check_dense()?;
    schedule.validate()?;
    let outcomes: Vec<ChainOutcome> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| run_restart(size, schedule, seed, r))
        .collect::<Result<_>>()?;
    let (restart, best) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.energy < a.1.energy { b } else { a })
        .expect("at least one restart");
    let state = PureState::from_amplitudes(size, best.amps)?;
    let report = verify_perfect(&state, PERFECT_TOLERANCE)?;
    Ok(SearchResult {
        best_energy: report.energy,
        best_state: state,
        exact_energy: None,
        energy_trace: best.trace,
        is_perfect: report.is_perfect,
        per_bipartition_purities: report.purities,
        restart,
        budget_exhausted: false,
    })
}

/// Per-bipartition purities of a state and whether all sit at `1/N_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerfectionReport {
    pub size: SystemSize,
    pub energy: f64,
    pub target: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub is_perfect: bool,
    pub purities: Vec<(Bipartition, f64)>,
}

pub fn verify_perfect(state: &PureState, tolerance: f64) -> Result<PerfectionReport> {
    let size = state.size();
    let mut eval = PotentialEvaluator::new(size)?;
    let values = eval.purities(state.amplitudes());
    let target = 1.0 / size.dim_a() as f64;
    let max_deviation = values.iter().map(|p| (p - target).abs()).fold(0.0, f64::max);
    let energy = crate::stats::kahan_sum(values.iter().copied()) / values.len() as f64;
    Ok(PerfectionReport {
        size,
        energy,
        target,
        max_deviation,
        tolerance,
        is_perfect: max_deviation < tolerance,
        purities: eval.bipartitions().iter().copied().zip(values).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{ghz_state, sample_haar};

    fn size(n: u32) -> SystemSize {
        SystemSize::new(n).unwrap()
    }

    #[test]
    fn schedule_ramps() {
        let s = AnnealSchedule {
            beta_start: 1.0,
            beta_end: 100.0,
            steps: 3,
            ..Default::default()
        };
        let b = s.betas();
        assert!((b[1] - 10.0).abs() < 1e-12 && (b[2] - 100.0).abs() < 1e-9);
        let lin = AnnealSchedule {
            ramp: Ramp::Linear,
            beta_start: 0.0,
            ..s
        };
        assert_eq!(lin.betas(), vec![0.0, 50.0, 100.0]);
        assert!(AnnealSchedule { beta_end: 0.5, ..s }.validate().is_err());
        assert!(AnnealSchedule { beta_start: 0.0, ..s }.validate().is_err());
    }

    #[test]
    fn zero_beta_always_accepts() {
        let mut rng = RngSeed(4).rng();
        let mut chain = MetropolisChain::new(sample_haar(size(3), RngSeed(1)).unwrap()).unwrap();
        assert!((0..200).all(|_| chain.step(0.0, 0.7, &mut rng)));
        assert!((chain.to_state().unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn downhill_moves_always_accepted() {
        let mut rng = RngSeed(5).rng();
        let start = PureState::basis(size(4), 0).unwrap();
        let (next, ok) = metropolis_step(&start, 1e9, 0.3, &mut rng).unwrap();
        assert!(ok);
        assert!(crate::bipartition::potential(&next).unwrap() < 1.0);
    }

    #[test]
    fn polish_reaches_bell_energy() {
        let s = size(2);
        let mut eval = PotentialEvaluator::new(s).unwrap();
        let mut amps = sample_haar(s, RngSeed(9)).unwrap().into_amplitudes();
        let e = polish(&mut eval, &mut amps, 5000);
        assert!((e - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ghz_perfection() {
        assert!(verify_perfect(&ghz_state(size(3)).unwrap(), 1e-12).unwrap().is_perfect);
        let r = verify_perfect(&ghz_state(size(4)).unwrap(), 1e-6).unwrap();
        assert!(!r.is_perfect);
        assert_eq!(r.purities.len(), 6);
    }
}
