//! Balanced bipartitions, their distance, and subsystem purity by partial
//! trace.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{invalid, Error, Result};
use crate::qstate::PureState;
use crate::size::SystemSize;
use crate::stats::KahanSum;

/// A split `(A, Ā)` of the register; bit `i` of `mask` is set iff qubit `i`
/// belongs to `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    size: SystemSize,
    mask: u64,
}

/// Number of qubits of `A` outside `B` (equivalently of `B` outside `A`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BipartitionDistance(pub u32);

impl Bipartition {
    /// A proper bipartition: `mask` must be nonzero, not all-ones, and fit
    /// in `n` bits. Unbalanced masks are allowed.
    pub fn new(size: SystemSize, mask: u64) -> Result<Self> {
        if size.n() > 64 {
            return Err(invalid("bipartition masks support at most 64 qubits"));
        }
        let full = size.full_mask();
        if mask & !full != 0 {
            return Err(invalid(format!("mask {mask:#b} has bits beyond {size}")));
        }
        if mask == 0 || mask == full {
            return Err(invalid("mask must leave both sides nonempty"));
        }
        Ok(Self { size, mask })
    }

    /// A bipartition with exactly `⌊n/2⌋` qubits in `A`.
    pub fn balanced(size: SystemSize, mask: u64) -> Result<Self> {
        let part = Self::new(size, mask)?;
        if !part.is_balanced() {
            return Err(invalid(format!(
                "mask {mask:#b} has popcount {} but a balanced split needs {}",
                mask.count_ones(),
                size.n_a()
            )));
        }
        Ok(part)
    }

    /// The bipartition whose `A` is the listed qubits.
    pub fn from_qubits(size: SystemSize, qubits: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        for &q in qubits {
            if q >= size.n() {
                return Err(invalid(format!("qubit {q} out of range for {size}")));
            }
            mask |= 1 << q;
        }
        Self::new(size, mask)
    }

    #[inline]
    pub fn size(&self) -> SystemSize {
        self.size
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn popcount(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_balanced(&self) -> bool {
        self.popcount() == self.size.n_a()
    }

    pub fn complement(&self) -> Bipartition {
        Bipartition {
            size: self.size,
            mask: !self.mask & self.size.full_mask(),
        }
    }

    /// Qubit indices in `A`, ascending.
    pub fn qubits(&self) -> Vec<u32> {
        (0..self.size.n()).filter(|q| self.mask >> q & 1 == 1).collect()
    }
}

/// All balanced bipartitions of `size`, by strictly increasing mask.
pub fn enumerate_balanced(size: SystemSize) -> Result<Vec<Bipartition>> {
    if size.n() < 2 {
        return Err(invalid("balanced bipartitions need at least 2 qubits"));
    }
    if size.n() > 63 {
        return Err(invalid("bipartition enumeration supports at most 63 qubits"));
    }
    let k = size.n_a();
    let limit = 1u64 << size.n();
    let mut out = Vec::new();
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        out.push(Bipartition { size, mask });
        mask = bits::next_same_popcount(mask);
    }
    Ok(out)
}

/// `|A ∩ B̄|` for two balanced bipartitions of the same register.
pub fn distance(a: &Bipartition, b: &Bipartition) -> Result<BipartitionDistance> {
    if a.size != b.size {
        return Err(Error::SizeMismatch {
            left: a.size.n(),
            right: b.size.n(),
        });
    }
    if !a.is_balanced() || !b.is_balanced() {
        return Err(invalid("distance is defined between balanced bipartitions"));
    }
    Ok(BipartitionDistance((a.mask & !b.mask).count_ones()))
}

/// Index layout of the `rows × cols` reshaping of an amplitude vector for
/// one bipartition: amplitude `row_off[r] | col_off[c]` lands at `(r, c)`.
#[derive(Clone, Debug)]
pub(crate) struct Reshape {
    row_off: Vec<u32>,
    col_off: Vec<u32>,
}

impl Reshape {
    /// Rows run over the side named by `row_mask`.
    pub(crate) fn new(size: SystemSize, row_mask: u64) -> Self {
        let col_mask = !row_mask & size.full_mask();
        let rows = 1usize << row_mask.count_ones();
        let cols = 1usize << col_mask.count_ones();
        Reshape {
            row_off: (0..rows as u64)
                .map(|r| bits::deposit(r, row_mask) as u32)
                .collect(),
            col_off: (0..cols as u64)
                .map(|c| bits::deposit(c, col_mask) as u32)
                .collect(),
        }
    }

    /// Fills `m` (row-major) from the amplitudes.
    #[inline]
    fn gather(&self, amps: &[Complex64], m: &mut [Complex64]) {
        let cols = self.col_off.len();
        for (r, &ro) in self.row_off.iter().enumerate() {
            let row = &mut m[r * cols..(r + 1) * cols];
            for (slot, &co) in row.iter_mut().zip(&self.col_off) {
                *slot = amps[(ro | co) as usize];
            }
        }
    }

    /// Gram matrix `ρ = M M†` (row-major, full) of the gathered matrix.
    #[inline]
    fn gram(&self, m: &[Complex64], rho: &mut [Complex64]) {
        let rows = self.row_off.len();
        let cols = self.col_off.len();
        for i in 0..rows {
            let ri = &m[i * cols..(i + 1) * cols];
            for j in i..rows {
                let rj = &m[j * cols..(j + 1) * cols];
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, b) in ri.iter().zip(rj) {
                    acc += a * b.conj();
                }
                rho[i * rows + j] = acc;
                rho[j * rows + i] = acc.conj();
            }
        }
    }

    /// `tr ρ²` from the Gram matrix, compensated.
    #[inline]
    fn purity_of_gram(&self, rho: &[Complex64]) -> f64 {
        let rows = self.row_off.len();
        let mut acc = KahanSum::new();
        for i in 0..rows {
            acc.add(rho[i * rows + i].norm_sqr());
            for j in i + 1..rows {
                acc.add(2.0 * rho[i * rows + j].norm_sqr());
            }
        }
        acc.value()
    }

    fn rows(&self) -> usize {
        self.row_off.len()
    }

    fn cols(&self) -> usize {
        self.col_off.len()
    }
}

/// `tr ρ_A²` of `state` for the split `part`. Balanced or not; the smaller
/// side is used as the row space since `π_A = π_Ā`.
pub fn purity(state: &PureState, part: &Bipartition) -> Result<f64> {
    if state.size() != part.size() {
        return Err(Error::SizeMismatch {
            left: state.size().n(),
            right: part.size().n(),
        });
    }
    let row_mask = if part.popcount() * 2 <= part.size().n() {
        part.mask()
    } else {
        part.complement().mask()
    };
    let shape = Reshape::new(part.size(), row_mask);
    let mut m = vec![Complex64::new(0.0, 0.0); shape.rows() * shape.cols()];
    let mut rho = vec![Complex64::new(0.0, 0.0); shape.rows() * shape.rows()];
    shape.gather(state.amplitudes(), &mut m);
    shape.gram(&m, &mut rho);
    let p = shape.purity_of_gram(&rho);
    debug_assert!(
        p <= 1.0 + 1e-9 && p * shape.rows() as f64 >= 1.0 - 1e-9,
        "purity {p} outside [1/{}, 1]",
        shape.rows()
    );
    Ok(p)
}

/// Potential of multipartite entanglement: the mean purity over all balanced
/// bipartitions.
pub fn potential(state: &PureState) -> Result<f64> {
    let eval = PotentialEvaluator::new(state.size())?;
    Ok(eval.energy(state.amplitudes()))
}

/// Purities of every balanced bipartition, in enumeration order.
pub fn balanced_purities(state: &PureState) -> Result<Vec<(Bipartition, f64)>> {
    enumerate_balanced(state.size())?
        .into_iter()
        .map(|p| purity(state, &p).map(|v| (p, v)))
        .collect()
}

/// Reusable evaluator of the potential and its gradient on raw amplitude
/// vectors. Holds the reshaping tables of every balanced bipartition and
/// scratch buffers, so evaluation allocates nothing.
#[derive(Clone, Debug)]
pub struct PotentialEvaluator {
    size: SystemSize,
    parts: Vec<Bipartition>,
    shapes: Vec<Reshape>,
    scratch_m: Vec<Complex64>,
    scratch_rho: Vec<Complex64>,
    scratch_rm: Vec<Complex64>,
}

impl PotentialEvaluator {
    pub fn new(size: SystemSize) -> Result<Self> {
        size.check_dense()?;
        let parts = enumerate_balanced(size)?;
        let shapes: Vec<Reshape> = parts.iter().map(|p| Reshape::new(size, p.mask())).collect();
        let (ra, cb) = (size.dim_a(), size.dim_abar());
        Ok(Self {
            size,
            parts,
            shapes,
            scratch_m: vec![Complex64::new(0.0, 0.0); ra * cb],
            scratch_rho: vec![Complex64::new(0.0, 0.0); ra * ra],
            scratch_rm: vec![Complex64::new(0.0, 0.0); ra * cb],
        })
    }

    pub fn size(&self) -> SystemSize {
        self.size
    }

    pub fn bipartitions(&self) -> &[Bipartition] {
        &self.parts
    }

    /// Potential of a (normalized) amplitude vector. Takes `&self` so one
    /// evaluator can be shared; allocates its own scratch.
    pub fn energy(&self, amps: &[Complex64]) -> f64 {
        let mut m = vec![Complex64::new(0.0, 0.0); self.scratch_m.len()];
        let mut rho = vec![Complex64::new(0.0, 0.0); self.scratch_rho.len()];
        let mut acc = KahanSum::new();
        for shape in &self.shapes {
            shape.gather(amps, &mut m);
            shape.gram(&m, &mut rho);
            acc.add(shape.purity_of_gram(&rho));
        }
        acc.value() / self.shapes.len() as f64
    }

    /// Allocation-free variant of [`PotentialEvaluator::energy`].
    pub fn energy_mut(&mut self, amps: &[Complex64]) -> f64 {
        let mut acc = KahanSum::new();
        for shape in &self.shapes {
            shape.gather(amps, &mut self.scratch_m);
            shape.gram(&self.scratch_m, &mut self.scratch_rho);
            acc.add(shape.purity_of_gram(&self.scratch_rho));
        }
        acc.value() / self.shapes.len() as f64
    }

    /// Per-bipartition purities of an amplitude vector.
    pub fn purities(&mut self, amps: &[Complex64]) -> Vec<f64> {
        self.shapes
            .iter()
            .map(|shape| {
                shape.gather(amps, &mut self.scratch_m);
                shape.gram(&self.scratch_m, &mut self.scratch_rho);
                shape.purity_of_gram(&self.scratch_rho)
            })
            .collect()
    }

    /// Potential and its Wirtinger gradient `∂H/∂z̄` written into `grad`.
    pub fn energy_and_gradient(&mut self, amps: &[Complex64], grad: &mut [Complex64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let count = self.shapes.len() as f64;
        let mut acc = KahanSum::new();
        for shape in &self.shapes {
            shape.gather(amps, &mut self.scratch_m);
            shape.gram(&self.scratch_m, &mut self.scratch_rho);
            acc.add(shape.purity_of_gram(&self.scratch_rho));
            let rows = shape.rows();
            let cols = shape.cols();
            // ∂ tr(MM†MM†)/∂M̄ = 2 (MM†) M
            for i in 0..rows {
                let out = &mut self.scratch_rm[i * cols..(i + 1) * cols];
                out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for j in 0..rows {
                    let r = self.scratch_rho[i * rows + j];
                    let mj = &self.scratch_m[j * cols..(j + 1) * cols];
                    for (o, &v) in out.iter_mut().zip(mj) {
                        *o += r * v;
                    }
                }
            }
            for (r, &ro) in shape.row_off.iter().enumerate() {
                for (c, &co) in shape.col_off.iter().enumerate() {
                    grad[(ro | co) as usize] += self.scratch_rm[r * cols + c] * (2.0 / count);
                }
            }
        }
        acc.value() / count
    }
}
