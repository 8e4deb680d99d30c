//! Fast invariant suite: coupling symmetries, bitwise against definitional
//! coupling, dual structure-function forms and the mean-purity formula.

use num_bigint::BigInt;
use serde::Serialize;

use crate::coupling::{check_symmetries_with, delta_by_definition, CouplingTable};
use crate::cumulants::{
    f2_bitsum_with, f2_distance, f3_0_bitsum_with, f3_0_reduced, f3_1_bitsum_with, f3_1_reduced,
    mean_purity,
};
use crate::error::Result;
use crate::exact::Rational;
use crate::qstate::RngSeed;
use crate::size::SystemSize;
use rand::Rng;

/// Largest `n` swept by default.
pub const DEFAULT_SELFTEST_MAX_N: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelftestOptions {
    pub seed: RngSeed,
    pub min_n: u32,
    pub max_n: u32,
    pub symmetry_trials: usize,
    pub definition_trials: usize,
    /// Perturbs `ĝ(1,0)` in every table before checking. Test hook.
    pub corrupt_ghat: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: RngSeed(0),
            min_n: 2,
            max_n: DEFAULT_SELFTEST_MAX_N,
            symmetry_trials: 1000,
            definition_trials: 100,
            corrupt_ghat: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub n: u32,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

fn outcome(name: &str, n: u32, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        n,
        passed,
        detail: detail.into(),
    }
}

fn equal(name: &str, n: u32, left: &Rational, right: &Rational) -> CheckOutcome {
    let detail = if left == right {
        format!("{left}")
    } else {
        format!("{left} != {right}")
    };
    outcome(name, n, left == right, detail)
}

fn check_size(size: SystemSize, opts: &SelftestOptions) -> Result<Vec<CheckOutcome>> {
    let n = size.n();
    let mut table = CouplingTable::new(size)?;
    if opts.corrupt_ghat {
        let v = table.ghat_numer(1, 0);
        table.corrupt_entry(1, 0, v + 1);
    }
    let mut out = Vec::new();

    let sym = check_symmetries_with(&table, opts.symmetry_trials, opts.seed)?;
    let detail = match sym.violations.first() {
        None => format!("{} trials", sym.trials),
        Some(v) => format!("{} violation(s), first {:?} on {:?}", sym.violations.len(), v.relation, v.quadruple),
    };
    out.push(outcome("coupling_symmetries", n, sym.passed, detail));

    if n <= 4 {
        let full = size.full_mask();
        let mut rng = opts.seed.stream(u64::from(n));
        let mut bad = 0usize;
        for _ in 0..opts.definition_trials {
            let q: [u64; 4] = std::array::from_fn(|_| rng.gen::<u64>() & full);
            if table.delta(q[0], q[1], q[2], q[3]) != delta_by_definition(size, q[0], q[1], q[2], q[3])? {
                bad += 1;
            }
        }
        out.push(outcome(
            "delta_bitwise_vs_definition",
            n,
            bad == 0,
            format!("{bad} mismatches in {} quadruples", opts.definition_trials),
        ));
    }

    out.push(equal("f2_bitsum_vs_distance", n, &f2_bitsum_with(&table), &f2_distance(size)));
    out.push(equal("f3_0_bitsum_vs_reduced", n, &f3_0_bitsum_with(&table), &f3_0_reduced(size)));
    out.push(equal("f3_1_bitsum_vs_reduced", n, &f3_1_bitsum_with(&table), &f3_1_reduced(size)));

    // ⟨H⟩ = 2 Σ_k g(k,0) / (N+1) from the Haar pair moments.
    let sum_g: Rational = (0..=size.full_mask()).map(|k| table.g(k, 0)).sum();
    let from_table = sum_g * Rational::new(BigInt::from(2), BigInt::from(size.dim_big()) + 1);
    out.push(equal("mean_purity_formula", n, &from_table, &mean_purity(size)));
    Ok(out)
}

/// Runs every check for `n` in `min_n..=max_n`.
pub fn run_selftest(opts: &SelftestOptions) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    for n in opts.min_n..=opts.max_n {
        checks.extend(check_size(SystemSize::new(n)?, opts)?);
    }
    Ok(SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
