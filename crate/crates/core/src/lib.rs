//! Potential of multipartite entanglement for `n`-qubit pure states: exact
//! cumulants over Haar-random states, Monte Carlo distribution estimates and
//! ground-state (MMES) search.

pub mod bipartition;
pub mod bits;
pub mod coupling;
pub mod cumulants;
pub mod ensemble;
mod error;
pub mod exact;
pub mod mmes;
pub mod qstate;
pub mod selftest;
pub mod size;
pub mod stats;

pub use bipartition::{
    balanced_purities, distance, enumerate_balanced, potential, purity, Bipartition,
    BipartitionDistance, PotentialEvaluator,
};
pub use coupling::{CouplingTable, SymmetryReport};
pub use cumulants::{AsymptoticConstants, CumulantReport, StructureForm, StructureFunctions};
pub use error::{Error, Result};
pub use ensemble::{EnergyHistogram, SeriesEvaluation};
pub use exact::{ExactValue, Rational};
pub use mmes::{AnnealSchedule, Ramp, SearchResult, StateRecord};
pub use qstate::{ghz_state, max_bipartite_state, sample_haar, PureState, RngSeed};
pub use size::SystemSize;
