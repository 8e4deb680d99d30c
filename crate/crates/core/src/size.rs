//! Register dimensions and the dense-state size cap.

use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default cap on the number of qubits for dense amplitude storage.
pub const DEFAULT_MAX_QUBITS: u32 = 14;

/// Hard ceiling for the dense-state cap, whatever the environment says.
pub const HARD_MAX_QUBITS: u32 = 26;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "MMES_MAX_QUBITS";

/// Qubit count of an `n`-qubit register together with its balanced split.
///
/// `n_a = ⌊n/2⌋` qubits sit on the smaller side, `n_abar = n - n_a` on the
/// other. Dimensions are derived on demand; `n` itself is not capped here so
/// that closed-form quantities can be evaluated far beyond dense-storage
/// range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SystemSize {
    n: u32,
}

impl SystemSize {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("qubit count must be at least 1"));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n
    }

    #[inline]
    pub fn n_a(self) -> u32 {
        self.n / 2
    }

    #[inline]
    pub fn n_abar(self) -> u32 {
        self.n - self.n / 2
    }

    /// Hilbert-space dimension `2^n`. Panics if it does not fit in `usize`;
    /// dense-state code checks [`SystemSize::check_dense`] first.
    #[inline]
    pub fn dim(self) -> usize {
        assert!(self.n < usize::BITS, "2^{} does not fit in usize", self.n);
        1usize << self.n
    }

    #[inline]
    pub fn dim_a(self) -> usize {
        1usize << self.n_a()
    }

    #[inline]
    pub fn dim_abar(self) -> usize {
        1usize << self.n_abar()
    }

    pub fn dim_big(self) -> BigUint {
        BigUint::from(1u8) << self.n as usize
    }

    pub fn dim_a_big(self) -> BigUint {
        BigUint::from(1u8) << self.n_a() as usize
    }

    pub fn dim_abar_big(self) -> BigUint {
        BigUint::from(1u8) << self.n_abar() as usize
    }

    /// `2^n` as a double, valid for any `n` below the f64 exponent range.
    pub fn dim_f64(self) -> f64 {
        2f64.powi(self.n as i32)
    }

    /// Bit mask with the lowest `n` bits set. Requires `n <= 64`.
    #[inline]
    pub fn full_mask(self) -> u64 {
        assert!(self.n <= 64, "masks are limited to 64 qubits");
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Rejects sizes beyond the dense-storage cap.
    pub fn check_dense(self) -> Result<()> {
        let max = max_qubits();
        if self.n > max {
            return Err(Error::DimensionLimit { n: self.n, max });
        }
        Ok(())
    }

    /// Rejects sizes beyond an explicit limit.
    pub fn check_limit(self, max: u32) -> Result<()> {
        if self.n > max {
            return Err(Error::DimensionLimit { n: self.n, max });
        }
        Ok(())
    }
}

impl TryFrom<u32> for SystemSize {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        SystemSize::new(n)
    }
}

impl From<SystemSize> for u32 {
    fn from(s: SystemSize) -> u32 {
        s.n
    }
}

impl std::fmt::Display for SystemSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={}", self.n)
    }
}

/// Dense-storage cap: `MMES_MAX_QUBITS` if set and valid, else
/// [`DEFAULT_MAX_QUBITS`]. Read once per process.
pub fn max_qubits() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .filter(|&v| v >= 1)
            .map(|v| v.min(HARD_MAX_QUBITS))
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}
