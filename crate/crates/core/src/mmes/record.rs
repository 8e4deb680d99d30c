//! Serializable snapshot of a searched state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SearchResult;
use crate::error::{invalid, Result};
use crate::exact::format_rational;
use crate::qstate::PureState;
use crate::size::SystemSize;

pub const STATE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityEntry {
    pub mask: u64,
    pub purity: f64,
}

/// Best state of a search: register size, energy, purity of every balanced
/// bipartition and the amplitudes as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub schema_version: u32,
    pub n: u32,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_exact: Option<String>,
    pub is_perfect: bool,
    pub purities: Vec<PurityEntry>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateRecord {
    pub fn from_result(result: &SearchResult) -> Self {
        Self {
            schema_version: STATE_SCHEMA_VERSION,
            n: result.best_state.size().n(),
            energy: result.best_energy,
            energy_exact: result.exact_energy.as_ref().map(format_rational),
            is_perfect: result.is_perfect,
            purities: result
                .per_bipartition_purities
                .iter()
                .map(|(p, v)| PurityEntry {
                    mask: p.mask(),
                    purity: *v,
                })
                .collect(),
            amplitudes: result
                .best_state
                .amplitudes()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
    }

    /// Rebuilds the (renormalized) state.
    pub fn to_state(&self) -> Result<PureState> {
        if self.schema_version != STATE_SCHEMA_VERSION {
            return Err(invalid(format!(
                "unsupported state schema version {}",
                self.schema_version
            )));
        }
        let size = SystemSize::new(self.n)?;
        let amps = self.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        PureState::from_amplitudes(size, amps)
    }
}
