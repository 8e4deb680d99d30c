//! The quartic coupling kernel `Δ(k,k';l,l')` of the potential and its
//! building blocks `g` and `ĝ`.
//!
//! `ĝ(s,t) = ½ C(n,n_A)⁻¹ [C(n-s-t, n_A-s) + C(n-s-t, n_A-t)]` with
//! binomials of negative arguments taken as zero, `g(a,b) = [a∧b = 0] ĝ(|a|,|b|)`
//! and `Δ(k,k';l,l') = g((k⊕l)∨(k'⊕l'), (k⊕l')∨(k'⊕l))`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{binomial, binomial_u128, Rational};
use crate::qstate::RngSeed;
use crate::size::SystemSize;

/// Largest register for which mask-level coupling evaluation is supported.
pub const MAX_TABLE_QUBITS: u32 = 64;

/// `ĝ(s,t)` for arbitrary `n`, as an exact rational.
pub fn ghat(size: SystemSize, s: u32, t: u32) -> Result<Rational> {
    let n = size.n();
    if s > n || t > n {
        return Err(invalid(format!("ĝ arguments ({s},{t}) out of range 0..={n}")));
    }
    let (n, na, s, t) = (n as i64, size.n_a() as i64, s as i64, t as i64);
    let num = binomial(n - s - t, na - s) + binomial(n - s - t, na - t);
    let den = binomial(n, na) * 2u8;
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// `g(a,b)` for masks of `size`.
pub fn g(size: SystemSize, a: u64, b: u64) -> Result<Rational> {
    Ok(CouplingTable::new(size)?.g(a, b))
}

/// Closed bitwise form of `Δ(k,k';l,l')`.
pub fn delta(size: SystemSize, k: u64, k2: u64, l: u64, l2: u64) -> Result<Rational> {
    Ok(CouplingTable::new(size)?.delta(k, k2, l, l2))
}

/// Dense `(n+1)×(n+1)` table of `ĝ`, stored both as exact rationals and as
/// integer numerators over the common denominator `2 C(n, n_A)`.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    size: SystemSize,
    ghat: Vec<Rational>,
    numer: Vec<u128>,
    denom: u128,
}

impl CouplingTable {
    pub fn new(size: SystemSize) -> Result<Self> {
        if size.n() > MAX_TABLE_QUBITS {
            return Err(invalid(format!(
                "coupling tables support at most {MAX_TABLE_QUBITS} qubits"
            )));
        }
        let n = size.n() as i64;
        let na = size.n_a() as i64;
        let width = size.n() as usize + 1;
        let mut numer = Vec::with_capacity(width * width);
        for s in 0..=n {
            for t in 0..=n {
                numer.push(binomial_u128(n - s - t, na - s) + binomial_u128(n - s - t, na - t));
            }
        }
        let denom = 2 * binomial_u128(n, na);
        let ghat = numer
            .iter()
            .map(|&v| Rational::new(BigInt::from(v), BigInt::from(denom)))
            .collect();
        Ok(Self {
            size,
            ghat,
            numer,
            denom,
        })
    }

    #[inline]
    pub fn size(&self) -> SystemSize {
        self.size
    }

    #[inline]
    fn index(&self, s: u32, t: u32) -> usize {
        s as usize * (self.size.n() as usize + 1) + t as usize
    }

    pub fn ghat(&self, s: u32, t: u32) -> &Rational {
        &self.ghat[self.index(s, t)]
    }

    /// Numerator of `ĝ(s,t)` over [`CouplingTable::common_denominator`].
    #[inline]
    pub fn ghat_numer(&self, s: u32, t: u32) -> u128 {
        self.numer[self.index(s, t)]
    }

    /// `2 C(n, n_A)`.
    #[inline]
    pub fn common_denominator(&self) -> u128 {
        self.denom
    }

    #[inline]
    pub fn g_numer(&self, a: u64, b: u64) -> u128 {
        if a & b != 0 {
            0
        } else {
            self.ghat_numer(a.count_ones(), b.count_ones())
        }
    }

    pub fn g(&self, a: u64, b: u64) -> Rational {
        if a & b != 0 {
            Rational::zero()
        } else {
            self.ghat(a.count_ones(), b.count_ones()).clone()
        }
    }

    #[inline]
    pub fn delta_numer(&self, k: u64, k2: u64, l: u64, l2: u64) -> u128 {
        let (a, b) = delta_args(k, k2, l, l2);
        self.g_numer(a, b)
    }

    pub fn delta(&self, k: u64, k2: u64, l: u64, l2: u64) -> Rational {
        let (a, b) = delta_args(k, k2, l, l2);
        self.g(a, b)
    }

    /// Overwrites one table entry (both representations). Exists so fault
    /// injection can confirm that the self-test notices a broken table.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, s: u32, t: u32, numer: u128) {
        let i = self.index(s, t);
        self.numer[i] = numer;
        self.ghat[i] = Rational::new(BigInt::from(numer), BigInt::from(self.denom));
    }
}

#[inline]
fn delta_args(k: u64, k2: u64, l: u64, l2: u64) -> (u64, u64) {
    ((k ^ l) | (k2 ^ l2), (k ^ l2) | (k2 ^ l))
}

/// `Δ` evaluated from its definition: the symmetrized sum of Kronecker-delta
/// products over every `A` with `|A| = n_A`, divided by `C(n, n_A)`.
pub fn delta_by_definition(size: SystemSize, k: u64, k2: u64, l: u64, l2: u64) -> Result<Rational> {
    if size.n() > 30 {
        return Err(invalid("definitional sum is limited to 30 qubits"));
    }
    let full = size.full_mask();
    let na = size.n_a();
    let eq = |x: u64, y: u64, side: u64| (x ^ y) & side == 0;
    let mut count = 0u64;
    let mut parts = 0u64;
    for a in 0..=full {
        if a.count_ones() != na {
            continue;
        }
        parts += 1;
        let abar = !a & full;
        if eq(k, l2, a) && eq(k2, l, a) && eq(k, l, abar) && eq(k2, l2, abar) {
            count += 1;
        }
        if eq(k2, l2, a) && eq(k, l, a) && eq(k2, l, abar) && eq(k, l2, abar) {
            count += 1;
        }
    }
    Ok(Rational::new(BigInt::from(count), BigInt::from(2 * parts)))
}

/// One failed symmetry instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryViolation {
    pub relation: &'static str,
    pub quadruple: [u64; 4],
}

/// Outcome of [`check_symmetries`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub n: u32,
    pub trials: usize,
    pub passed: bool,
    pub violations: Vec<SymmetryViolation>,
}

/// Checks `Δ(k,k';l,l') = Δ(k',k;l,l') = Δ(l,l';k,k') = Δ(k',k;l',l)` on
/// random quadruples.
pub fn check_symmetries(size: SystemSize, trials: usize, seed: RngSeed) -> Result<SymmetryReport> {
    let table = CouplingTable::new(size)?;
    check_symmetries_with(&table, trials, seed)
}

/// [`check_symmetries`] against an explicit table.
pub fn check_symmetries_with(
    table: &CouplingTable,
    trials: usize,
    seed: RngSeed,
) -> Result<SymmetryReport> {
    let full = table.size().full_mask();
    let mut rng = seed.rng();
    let mut violations = Vec::new();
    for _ in 0..trials {
        let q: [u64; 4] = std::array::from_fn(|_| rng.gen::<u64>() & full);
        let [k, k2, l, l2] = q;
        let base = table.delta_numer(k, k2, l, l2);
        let relations = [
            ("swap k,k'", table.delta_numer(k2, k, l, l2)),
            ("swap (k,k')<->(l,l')", table.delta_numer(l, l2, k, k2)),
            ("swap k,k' and l,l'", table.delta_numer(k2, k, l2, l)),
        ];
        for (relation, value) in relations {
            if value != base {
                violations.push(SymmetryViolation {
                    relation,
                    quadruple: q,
                });
            }
        }
    }
    Ok(SymmetryReport {
        n: table.size().n(),
        trials,
        passed: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn size(n: u32) -> SystemSize {
        SystemSize::new(n).unwrap()
    }

    #[test]
    fn ghat_examples() {
        for n in 1..=12 {
            assert_eq!(ghat(size(n), 0, 0).unwrap(), ratio(1, 1));
        }
        assert_eq!(ghat(size(2), 1, 1).unwrap(), ratio(1, 2));
        assert!(ghat(size(3), 4, 0).is_err());
    }

    #[test]
    fn table_agrees_with_free_function() {
        for n in [1, 2, 5, 8, 13] {
            let s = size(n);
            let table = CouplingTable::new(s).unwrap();
            for a in 0..=n {
                for b in 0..=n {
                    assert_eq!(table.ghat(a, b), &ghat(s, a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn ghat_symmetric_for_even_n() {
        let t = CouplingTable::new(size(8)).unwrap();
        for s in 0..=8 {
            for u in 0..=8 {
                assert_eq!(t.ghat(s, u), t.ghat(u, s));
            }
        }
    }

    #[test]
    fn g_examples() {
        let s = size(4);
        assert_eq!(g(s, 0, 0).unwrap(), ratio(1, 1));
        assert_eq!(g(s, 1, 1).unwrap(), ratio(0, 1));
    }

    #[test]
    fn delta_diagonal_is_one() {
        let t = CouplingTable::new(size(5)).unwrap();
        for k in 0..32 {
            assert_eq!(t.delta(k, k, k, k), ratio(1, 1));
        }
    }

    #[test]
    fn symmetry_checks_pass() {
        for n in [1, 3, 5] {
            let r = check_symmetries(size(n), 1000, RngSeed(n as u64)).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn corrupted_table_breaks_identity() {
        let mut t = CouplingTable::new(size(4)).unwrap();
        let d = t.common_denominator();
        assert_eq!(t.ghat_numer(0, 0), d);
        t.corrupt_entry(1, 2, 7);
        assert_eq!(t.ghat(1, 2), &ratio(7, d as i64));
        assert_ne!(t.ghat(1, 2), t.ghat(2, 1));
    }
}
