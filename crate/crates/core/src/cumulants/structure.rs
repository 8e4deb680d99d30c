//! Structure functions `f₂`, `f₃⁽⁰⁾`, `f₃⁽¹⁾` as brute-force mask sums and as
//! closed or reduced combinatorial sums.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::CouplingTable;
use crate::error::Result;
use crate::exact::{binomial, factorials, Rational};
use crate::size::SystemSize;

/// Largest `n` accepted by [`f2_bitsum`].
pub const F2_BITSUM_MAX_QUBITS: u32 = 12;
/// Largest `n` accepted by the cubic mask sums.
pub const F3_BITSUM_MAX_QUBITS: u32 = 8;

/// Which evaluation route produced a [`StructureFunctions`] value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureForm {
    BitSum,
    Reduced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureFunctions {
    pub size: SystemSize,
    pub form: StructureForm,
    pub f2: Rational,
    pub f3_0: Rational,
    pub f3_1: Rational,
}

/// All three structure functions through one route.
pub fn structure_functions(size: SystemSize, form: StructureForm) -> Result<StructureFunctions> {
    let (f2, f3_0, f3_1) = match form {
        StructureForm::BitSum => (f2_bitsum(size)?, f3_0_bitsum(size)?, f3_1_bitsum(size)?),
        StructureForm::Reduced => (f2_distance(size), f3_0_reduced(size), f3_1_reduced(size)),
    };
    Ok(StructureFunctions {
        size,
        form,
        f2,
        f3_0,
        f3_1,
    })
}

fn over_power(sum: u128, denom: u128, power: u32) -> Rational {
    Rational::new(BigInt::from(sum), BigInt::from(denom).pow(power))
}

/// Iterates every submask of `mask`, including `0` and `mask` itself.
fn for_each_submask(mask: u64, mut f: impl FnMut(u64)) {
    let mut sub = mask;
    loop {
        f(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
}

/// `f₂ = 4 Σ_{k,l} g(k,l)²`. Terms with overlapping masks vanish and are
/// skipped.
pub fn f2_bitsum(size: SystemSize) -> Result<Rational> {
    size.check_limit(F2_BITSUM_MAX_QUBITS)?;
    Ok(f2_bitsum_with(&CouplingTable::new(size)?))
}

/// [`f2_bitsum`] against an explicit table. The caller is responsible for the
/// size limit.
pub fn f2_bitsum_with(table: &CouplingTable) -> Rational {
    let full = table.size().full_mask();
    let sum: u128 = (0..=full)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0u128;
            for_each_submask(!k & full, |l| {
                let v = table.g_numer(k, l);
                acc += v * v;
            });
            acc
        })
        .sum();
    over_power(4 * sum, table.common_denominator(), 2)
}

/// `f₃⁽⁰⁾ = Σ g(k₁,k₂) g(k₃,k₂) g(k₁⊕k₃,k₂)` over all mask triples.
pub fn f3_0_bitsum(size: SystemSize) -> Result<Rational> {
    size.check_limit(F3_BITSUM_MAX_QUBITS)?;
    Ok(f3_0_bitsum_with(&CouplingTable::new(size)?))
}

/// [`f3_0_bitsum`] against an explicit table. The caller is responsible for the
/// size limit.
pub fn f3_0_bitsum_with(table: &CouplingTable) -> Rational {
    let full = table.size().full_mask();
    let sum: u128 = (0..=full)
        .into_par_iter()
        .map(|k2| {
            let free = !k2 & full;
            let mut acc = 0u128;
            for_each_submask(free, |k1| {
                let a = table.g_numer(k1, k2);
                for_each_submask(free, |k3| {
                    acc += a * table.g_numer(k3, k2) * table.g_numer(k1 ^ k3, k2);
                });
            });
            acc
        })
        .sum();
    over_power(sum, table.common_denominator(), 3)
}

/// `f₃⁽¹⁾ = Σ g(k₁,k₂⊕k₃) g(k₂,k₁⊕k₃) g(k₃,k₁⊕k₂)` over all mask triples.
pub fn f3_1_bitsum(size: SystemSize) -> Result<Rational> {
    size.check_limit(F3_BITSUM_MAX_QUBITS)?;
    Ok(f3_1_bitsum_with(&CouplingTable::new(size)?))
}

/// [`f3_1_bitsum`] against an explicit table. The caller is responsible for the
/// size limit.
pub fn f3_1_bitsum_with(table: &CouplingTable) -> Rational {
    let full = table.size().full_mask();
    let sum: u128 = (0..=full)
        .into_par_iter()
        .map(|k1| {
            let mut acc = 0u128;
            for k2 in 0..=full {
                // g(k₁, k₂⊕k₃) ≠ 0 forces k₃ to agree with k₂ on the bits of k₁.
                let fixed = k2 & k1;
                for_each_submask(!k1 & full, |rest| {
                    let k3 = fixed | rest;
                    let a = table.g_numer(k1, k2 ^ k3);
                    if a != 0 {
                        acc += a * table.g_numer(k2, k1 ^ k3) * table.g_numer(k3, k1 ^ k2);
                    }
                });
            }
            acc
        })
        .sum();
    over_power(sum, table.common_denominator(), 3)
}

/// Distance-sum form
/// `f₂ = 2 C(n,n_A)⁻¹ Σ_d C(n_A,d) C(n_Ā,d) (2^{n-2d} + 4^d)`, exact for any `n`.
pub fn f2_distance(size: SystemSize) -> Rational {
    let (n, na, nb) = (size.n() as i64, size.n_a() as i64, size.n_abar() as i64);
    let one = BigUint::from(1u8);
    let mut sum = BigUint::zero();
    for d in 0..=na {
        let weight = binomial(na, d) * binomial(nb, d);
        let powers = (&one << (n - 2 * d) as usize) + (&one << (2 * d) as usize);
        sum += weight * powers;
    }
    Rational::new(BigInt::from(sum * 2u8), BigInt::from(binomial(n, na)))
}

/// Integer numerators of `ĝ(s,t)` over the common denominator `2 n!`, via
/// `ĝ(s,t) = ½ (n; s,t)⁻¹ [C(n_A,s)C(n_Ā,t) + C(n_A,t)C(n_Ā,s)]`.
struct MultinomialGhat {
    n: usize,
    fact: Vec<BigUint>,
    numer: Vec<BigUint>,
}

impl MultinomialGhat {
    fn new(size: SystemSize) -> Self {
        let n = size.n() as usize;
        let (na, nb) = (size.n_a() as i64, size.n_abar() as i64);
        let fact = factorials(n);
        let mut numer = vec![BigUint::zero(); (n + 1) * (n + 1)];
        for s in 0..=n {
            for t in 0..=n - s {
                let (si, ti) = (s as i64, t as i64);
                let pairs = binomial(na, si) * binomial(nb, ti) + binomial(na, ti) * binomial(nb, si);
                numer[s * (n + 1) + t] = pairs * &fact[s] * &fact[t] * &fact[n - s - t];
            }
        }
        Self { n, fact, numer }
    }

    fn at(&self, s: usize, t: usize) -> &BigUint {
        &self.numer[s * (self.n + 1) + t]
    }

    fn multinomial(&self, parts: [usize; 4]) -> BigUint {
        let rest = self.n - parts.iter().sum::<usize>();
        let mut den = self.fact[rest].clone();
        for p in parts {
            den *= &self.fact[p];
        }
        &self.fact[self.n] / den
    }

    fn denominator_cubed(&self) -> BigUint {
        let d = &self.fact[self.n] * 2u8;
        &d * &d * &d
    }

    /// `Σ_{s₀+s₁+s₂+s₃ ≤ n} (n; s₀,s₁,s₂,s₃) Π ĝ(args)` for three `ĝ`
    /// argument pairs derived from the occupation numbers.
    fn sum(&self, args: impl Fn([usize; 4]) -> [(usize, usize); 3] + Sync) -> Rational {
        let n = self.n;
        let total: BigUint = (0..=n)
            .into_par_iter()
            .map(|s0| {
                let mut acc = BigUint::zero();
                for s1 in 0..=n - s0 {
                    for s2 in 0..=n - s0 - s1 {
                        for s3 in 0..=n - s0 - s1 - s2 {
                            let parts = [s0, s1, s2, s3];
                            let [x, y, z] = args(parts);
                            if [x, y, z].iter().any(|&(s, t)| s + t > n) {
                                continue;
                            }
                            let (gx, gy, gz) = (self.at(x.0, x.1), self.at(y.0, y.1), self.at(z.0, z.1));
                            if gx.is_zero() || gy.is_zero() || gz.is_zero() {
                                continue;
                            }
                            acc += self.multinomial(parts) * gx * gy * gz;
                        }
                    }
                }
                acc
            })
            .sum();
        Rational::new(BigInt::from(total), BigInt::from(self.denominator_cubed()))
    }
}

/// Reduced multinomial form of `f₃⁽⁰⁾`:
/// `Σ (n; s₀..s₃) ĝ(s₀+s₁, s₂) ĝ(s₀+s₃, s₂) ĝ(s₁+s₃, s₂)`.
pub fn f3_0_reduced(size: SystemSize) -> Rational {
    MultinomialGhat::new(size)
        .sum(|[s0, s1, s2, s3]| [(s0 + s1, s2), (s0 + s3, s2), (s1 + s3, s2)])
}

/// Reduced multinomial form of `f₃⁽¹⁾`:
/// `Σ (n; s₀..s₃) ĝ(s₀+s₁, s₂+s₃) ĝ(s₀+s₂, s₁+s₃) ĝ(s₀+s₃, s₁+s₂)`.
pub fn f3_1_reduced(size: SystemSize) -> Rational {
    MultinomialGhat::new(size).sum(|[s0, s1, s2, s3]| {
        [(s0 + s1, s2 + s3), (s0 + s2, s1 + s3), (s0 + s3, s1 + s2)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exact::ratio;

    fn size(n: u32) -> SystemSize {
        SystemSize::new(n).unwrap()
    }

    #[test]
    fn pinned_small_values() {
        let f2 = [(1, 6, 1), (2, 10, 1), (3, 14, 1), (4, 22, 1), (5, 159, 5), (6, 49, 1)];
        for (n, p, q) in f2 {
            assert_eq!(f2_bitsum(size(n)).unwrap(), ratio(p, q), "f2 n={n}");
        }
        let f30 = [(1, 15, 8), (2, 7, 2), (3, 37, 6), (4, 11, 1)];
        let f31 = [(1, 3, 2), (2, 2, 1), (3, 10, 3), (4, 5, 1)];
        for ((n, p, q), (_, p1, q1)) in f30.into_iter().zip(f31) {
            assert_eq!(f3_0_bitsum(size(n)).unwrap(), ratio(p, q), "f30 n={n}");
            assert_eq!(f3_1_bitsum(size(n)).unwrap(), ratio(p1, q1), "f31 n={n}");
        }
    }

    #[test]
    fn reduced_forms_agree_with_bit_sums_small_n() {
        for n in 1..=5 {
            let s = size(n);
            assert_eq!(f2_distance(s), f2_bitsum(s).unwrap());
            assert_eq!(f3_0_reduced(s), f3_0_bitsum(s).unwrap());
            assert_eq!(f3_1_reduced(s), f3_1_bitsum(s).unwrap());
        }
    }

    #[test]
    fn limits_enforced() {
        assert!(matches!(
            f2_bitsum(size(13)),
            Err(Error::DimensionLimit { n: 13, max: 12 })
        ));
        assert!(f3_0_bitsum(size(9)).is_err());
        assert!(f3_1_bitsum(size(9)).is_err());
    }

    #[test]
    fn structure_forms_are_positive() {
        let s = structure_functions(size(4), StructureForm::Reduced).unwrap();
        let zero = Rational::zero();
        assert!(s.f2 > zero && s.f3_0 > zero && s.f3_1 > zero);
    }
}
