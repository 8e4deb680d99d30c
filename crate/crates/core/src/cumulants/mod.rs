//! Exact and asymptotic cumulants of the potential `H = π_ME` over
//! Haar-random states.

mod saddle;
mod structure;

pub use saddle::{
    saddle_constants, saddle_residuals, solve_saddle_constants, AsymptoticConstants,
    SADDLE_MAX_ITERATIONS,
};
pub use structure::{
    f2_bitsum, f2_bitsum_with, f2_distance, f3_0_bitsum, f3_0_bitsum_with, f3_0_reduced,
    f3_1_bitsum, f3_1_bitsum_with, f3_1_reduced,
    structure_functions, StructureForm, StructureFunctions, F2_BITSUM_MAX_QUBITS,
    F3_BITSUM_MAX_QUBITS,
};

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{binomial, to_f64, Rational};
use crate::size::SystemSize;

/// Exact cumulants of `H` for one register size together with the
/// leading-order asymptotics.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantReport {
    pub size: SystemSize,
    pub mu: Rational,
    pub sigma_bar_sq: Rational,
    pub kappa3: Rational,
    /// Variance of the purity of a single balanced bipartition.
    pub sigma_single_sq: Rational,
    /// Variance `H` would have if the bipartitions were independent.
    pub sigma_ind_sq: Rational,
    pub structure: StructureFunctions,
    pub asymptotic_mu: f64,
    pub asymptotic_sigma_bar_sq: f64,
    pub asymptotic_kappa3: f64,
}

/// Leading-order large-`N` values of the first three cumulants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticCumulants {
    pub mu: f64,
    pub sigma_bar_sq: f64,
    pub kappa3: f64,
}

struct Dims {
    n1: BigInt,
    sum: BigInt,
    big_n: BigInt,
}

fn dims(size: SystemSize) -> Dims {
    let big_n = BigInt::from(size.dim_big());
    Dims {
        n1: &big_n + 1,
        sum: BigInt::from(size.dim_a_big() + size.dim_abar_big()),
        big_n,
    }
}

fn rat(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

/// `μ = (N_A + N_Ā)/(N + 1)`.
pub fn mean_purity(size: SystemSize) -> Rational {
    let d = dims(size);
    Rational::new(d.sum, d.n1)
}

/// `σ̄² = ((N+1) f₂ − 2 (N_A+N_Ā)²) / ((N+1)² (N+2) (N+3))`.
pub fn sigma_bar_sq_from_f2(size: SystemSize, f2: &Rational) -> Rational {
    let d = dims(size);
    let num = rat(d.n1.clone()) * f2 - rat(2 * &d.sum * &d.sum);
    num / rat(&d.n1 * &d.n1 * (&d.big_n + 2) * (&d.big_n + 3))
}

/// Floating-point version of [`sigma_bar_sq_from_f2`], for substituting
/// approximate structure functions.
pub fn sigma_bar_sq_from_f2_f64(size: SystemSize, f2: f64) -> f64 {
    let n = size.dim_f64();
    let s = 2f64.powi(size.n_a() as i32) + 2f64.powi(size.n_abar() as i32);
    ((n + 1.0) * f2 - 2.0 * s * s) / ((n + 1.0).powi(2) * (n + 2.0) * (n + 3.0))
}

/// Third cumulant from the structure functions.
pub fn kappa3_from_structure(size: SystemSize, s: &StructureFunctions) -> Rational {
    let d = dims(size);
    let n1 = rat(d.n1.clone());
    let sum = rat(d.sum.clone());
    let n1sq = &n1 * &n1;
    let num = rat(BigInt::from(16)) * &n1sq * &s.f3_1 + rat(BigInt::from(64)) * &n1sq * &s.f3_0
        - rat(BigInt::from(36)) * &n1 * &sum * &s.f2
        - rat(8 * &d.sum * &d.sum * &d.sum * (&d.big_n - 5));
    let mut den = &d.n1 * &d.n1 * &d.n1;
    for k in 2..=5 {
        den *= &d.big_n + k;
    }
    num / rat(den)
}

/// `σ² = 2 (N_A² − 1)(N_Ā² − 1) / ((N+1)² (N+2)(N+3))`: variance of the purity
/// of one balanced bipartition.
pub fn single_bipartition_variance(size: SystemSize) -> Rational {
    let d = dims(size);
    let na = BigInt::from(size.dim_a_big());
    let nb = BigInt::from(size.dim_abar_big());
    let num = 2 * (&na * &na - 1) * (&nb * &nb - 1);
    Rational::new(num, &d.n1 * &d.n1 * (&d.big_n + 2) * (&d.big_n + 3))
}

/// Exact μ, σ̄², κ₃ for `n ≥ 2`, using the closed and reduced structure-function
/// forms (valid for every `n`).
pub fn exact_cumulants(size: SystemSize) -> Result<CumulantReport> {
    exact_cumulants_with(size, StructureForm::Reduced)
}

/// [`exact_cumulants`] with an explicit structure-function route.
pub fn exact_cumulants_with(size: SystemSize, form: StructureForm) -> Result<CumulantReport> {
    if size.n() < 2 {
        return Err(invalid("cumulants need at least 2 qubits"));
    }
    let structure = structure_functions(size, form)?;
    let sigma_single_sq = single_bipartition_variance(size);
    let parts = binomial(size.n() as i64, size.n_a() as i64);
    let sigma_ind_sq = &sigma_single_sq / rat(BigInt::from(parts));
    let asym = asymptotic_cumulants(size)?;
    Ok(CumulantReport {
        size,
        mu: mean_purity(size),
        sigma_bar_sq: sigma_bar_sq_from_f2(size, &structure.f2),
        kappa3: kappa3_from_structure(size, &structure),
        sigma_single_sq,
        sigma_ind_sq,
        structure,
        asymptotic_mu: asym.mu,
        asymptotic_sigma_bar_sq: asym.sigma_bar_sq,
        asymptotic_kappa3: asym.kappa3,
    })
}

/// `f₂ ∼ 3√2 N^α`.
pub fn asymptotic_f2(size: SystemSize) -> f64 {
    3.0 * 2f64.sqrt() * size.dim_f64().powf(3f64.log2() - 1.0)
}

/// `μ ∼ 2/√N`, `σ̄² ∼ 3√2/N^{4−log₂3}`, `κ₃ ∼ 64c/N^γ`.
pub fn asymptotic_cumulants(size: SystemSize) -> Result<AsymptoticCumulants> {
    let k = saddle_constants()?;
    let n = size.dim_f64();
    Ok(AsymptoticCumulants {
        mu: 2.0 / n.sqrt(),
        sigma_bar_sq: 3.0 * 2f64.sqrt() / n.powf(4.0 - 3f64.log2()),
        kappa3: k.kappa3_prefactor / n.powf(k.gamma),
    })
}

impl CumulantReport {
    pub fn mu_f64(&self) -> f64 {
        to_f64(&self.mu)
    }

    pub fn sigma_bar_sq_f64(&self) -> f64 {
        to_f64(&self.sigma_bar_sq)
    }

    pub fn kappa3_f64(&self) -> f64 {
        to_f64(&self.kappa3)
    }
}
