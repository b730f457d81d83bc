//! Pure states of an `n`-qubit register and reduced-state purities.
//!
//! Basis index convention: qubit 1 is the most significant bit of the basis
//! index, so the tensor product of states in label order is a plain Kronecker
//! product. Qubit subsets use the opposite, label-friendly convention: bit
//! `i` of a [`QubitSubset`] mask is set when qubit `i + 1` belongs to the
//! subset.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude of a basis state.
pub type Amplitude = C64;

/// Largest register this crate will allocate a state vector for.
pub const MAX_QUBITS: usize = 24;

/// Tolerance on `|norm^2 - 1|` below which an input counts as normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Norms below this are treated as the zero vector.
pub const ZERO_NORM: f64 = 1e-14;

/// A normalized state vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Amplitude>,
    norm_deviation: f64,
}

impl PureState {
    /// Normalizes `amplitudes` into a state. The deviation of the input's
    /// squared norm from 1 is kept in [`PureState::norm_deviation`].
    pub fn new(n_qubits: usize, amplitudes: Vec<Amplitude>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::BadArity { n: 0, reason: "a state needs at least one qubit" });
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::ArityTooLarge { n: n_qubits, max: MAX_QUBITS });
        }
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch { n_qubits, expected, got: amplitudes.len() });
        }
        if let Some(index) = amplitudes.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let norm = norm_sqr.sqrt();
        if norm < ZERO_NORM {
            return Err(Error::ZeroVector { norm });
        }
        let mut amplitudes = amplitudes;
        let norm_deviation = (norm_sqr - 1.0).abs();
        if norm_deviation > 0.0 {
            let scale = 1.0 / norm;
            amplitudes.iter_mut().for_each(|a| *a *= scale);
        }
        Ok(Self { n_qubits, amplitudes, norm_deviation })
    }

    /// Computational basis state `|bits>`, where bit `n - q` of `bits` is the
    /// value of qubit `q`.
    pub fn basis(n_qubits: usize, bits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::BadArity { n: n_qubits, reason: "register size out of range" });
        }
        let dim = 1usize << n_qubits;
        if bits >= dim {
            return Err(Error::MaskOutOfRange { mask: bits as u64, n_qubits });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[bits] = C64::new(1.0, 0.0);
        Self::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    /// `|norm^2 - 1|` of the vector this state was built from.
    pub fn norm_deviation(&self) -> f64 {
        self.norm_deviation
    }

    /// Whether the input was already normalized to within [`NORM_TOL`].
    pub fn was_normalized(&self) -> bool {
        self.norm_deviation <= NORM_TOL
    }

    /// Largest componentwise amplitude difference, infinite for different
    /// register sizes.
    pub fn distance(&self, other: &PureState) -> f64 {
        if self.n_qubits != other.n_qubits {
            return f64::INFINITY;
        }
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn inner(&self, other: &PureState) -> Amplitude {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn into_file(self) -> StateFile {
        StateFile {
            n: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_file(&self) -> StateFile {
        self.clone().into_file()
    }

    /// Applies a 2x2 operator to one qubit and renormalizes. Returns the new
    /// state and the norm `Q` of the unnormalized image.
    pub fn apply_local(&self, op: &LocalOperator) -> Result<(PureState, f64)> {
        if op.target == 0 || op.target > self.n_qubits {
            return Err(Error::TargetOutOfRange { target: op.target, n_qubits: self.n_qubits });
        }
        let bit = 1usize << (self.n_qubits - op.target);
        let m = &op.matrix;
        let mut out = self.amplitudes.clone();
        for i0 in (0..self.dim()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
            out[i1] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
        }
        let q = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if q < ZERO_NORM {
            return Err(Error::ZeroVector { norm: q });
        }
        out.iter_mut().for_each(|a| *a /= q);
        Ok((PureState { n_qubits: self.n_qubits, amplitudes: out, norm_deviation: 0.0 }, q))
    }

    /// Purity `Tr rho_S^2` of the reduced state on `subset`.
    pub fn reduced_purity(&self, subset: &QubitSubset) -> Result<f64> {
        self.check_proper(subset)?;
        Ok(self.purity_of_mask(subset.mask))
    }

    /// Reduced purity for a proper, non-empty mask. No validation.
    pub(crate) fn purity_of_mask(&self, mask: u64) -> f64 {
        let n = self.n_qubits;
        let mut sub = Vec::new();
        let mut rest = Vec::new();
        for q in 1..=n {
            let pos = n - q;
            if mask & (1 << (q - 1)) != 0 {
                sub.push(pos);
            } else {
                rest.push(pos);
            }
        }
        // The Gram matrix of the smaller side has the same purity.
        if sub.len() > rest.len() {
            std::mem::swap(&mut sub, &mut rest);
        }
        sub.sort_unstable();
        rest.sort_unstable();
        let rows = deposit_table(&sub);
        let cols = deposit_table(&rest);
        let nc = cols.len();
        let coeffs: Vec<C64> = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| r | c))
            .map(|idx| self.amplitudes[idx])
            .collect();
        let mut purity = 0.0;
        for i in 0..rows.len() {
            let ri = &coeffs[i * nc..(i + 1) * nc];
            for j in i..rows.len() {
                let rj = &coeffs[j * nc..(j + 1) * nc];
                let g: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                purity += if i == j { g.norm_sqr() } else { 2.0 * g.norm_sqr() };
            }
        }
        purity
    }

    /// Amplitudes reshaped into a matrix with the qubits of `subset` on the
    /// rows and the rest on the columns, so that `rho_S = C C^dagger`. Row
    /// indices order the subset's qubits by label, lowest label most
    /// significant; columns do the same for the complement.
    pub fn coefficient_matrix(&self, subset: &QubitSubset) -> Result<DMatrix<C64>> {
        self.check_subset(subset)?;
        let n = self.n_qubits;
        let mut sub = Vec::new();
        let mut rest = Vec::new();
        for q in (1..=n).rev() {
            if subset.contains(q) {
                sub.push(n - q);
            } else {
                rest.push(n - q);
            }
        }
        let rows = deposit_table(&sub);
        let cols = deposit_table(&rest);
        Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.amplitudes[rows[i] | cols[j]]))
    }

    /// Reduced density matrix on `subset`, indexed as in
    /// [`PureState::coefficient_matrix`].
    pub fn reduced_density_matrix(&self, subset: &QubitSubset) -> Result<DMatrix<C64>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let c = self.coefficient_matrix(subset)?;
        Ok(&c * c.adjoint())
    }

    fn check_subset(&self, subset: &QubitSubset) -> Result<()> {
        if subset.n_qubits != self.n_qubits {
            return Err(Error::MaskOutOfRange { mask: subset.mask, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    fn check_proper(&self, subset: &QubitSubset) -> Result<()> {
        self.check_subset(subset)?;
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if subset.is_full() {
            return Err(Error::FullSubset);
        }
        Ok(())
    }
}

/// Basis-index offsets for every assignment of the bits at `positions`
/// (ascending), with bit `t` of the enumeration index placed at `positions[t]`.
fn deposit_table(positions: &[usize]) -> Vec<usize> {
    let mut table = vec![0usize; 1 << positions.len()];
    for (t, &pos) in positions.iter().enumerate() {
        let half = 1 << t;
        for v in 0..half {
            table[v + half] = table[v] | (1 << pos);
        }
    }
    table
}

/// Builds a normalized state from raw amplitudes.
pub fn make_state(n: usize, amplitudes: Vec<Amplitude>) -> Result<PureState> {
    PureState::new(n, amplitudes)
}

/// `(|0...0> + |1...1>) / sqrt(2)`
pub fn ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::BadArity { n, reason: "GHZ state needs at least 2 qubits" });
    }
    if n > MAX_QUBITS {
        return Err(Error::ArityTooLarge { n, max: MAX_QUBITS });
    }
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = a;
    amps[dim - 1] = a;
    PureState::new(n, amps)
}

/// Equal superposition of all single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::BadArity { n, reason: "W state needs at least 2 qubits" });
    }
    if n > MAX_QUBITS {
        return Err(Error::ArityTooLarge { n, max: MAX_QUBITS });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    PureState::new(n, amps)
}

/// Kronecker product of `states` in list order.
pub fn tensor_product(states: &[PureState]) -> Result<PureState> {
    let (first, rest) = states.split_first().ok_or(Error::EmptyList)?;
    let total: usize = states.iter().map(PureState::n_qubits).sum();
    if total > MAX_QUBITS {
        return Err(Error::ArityTooLarge { n: total, max: MAX_QUBITS });
    }
    let mut amps = first.amplitudes.clone();
    for s in rest {
        amps = amps
            .iter()
            .flat_map(|a| s.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    PureState::new(total, amps)
}

/// A subset of qubits of an `n_qubits` register. Bit `i` of `mask` marks
/// qubit `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSubset {
    mask: u64,
    n_qubits: usize,
}

impl QubitSubset {
    pub fn new(mask: u64, n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 63 || mask >> n_qubits != 0 {
            return Err(Error::MaskOutOfRange { mask, n_qubits });
        }
        Ok(Self { mask, n_qubits })
    }

    /// Subset from 1-based qubit labels.
    pub fn from_qubits(qubits: &[usize], n_qubits: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &q in qubits {
            if q == 0 || q > n_qubits {
                return Err(Error::TargetOutOfRange { target: q, n_qubits });
            }
            mask |= 1 << (q - 1);
        }
        Self::new(mask, n_qubits)
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self { mask: 0, n_qubits }
    }

    pub fn full(n_qubits: usize) -> Self {
        Self { mask: (1u64 << n_qubits) - 1, n_qubits }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == (1u64 << self.n_qubits) - 1
    }

    pub fn contains(&self, qubit: usize) -> bool {
        qubit >= 1 && qubit <= self.n_qubits && self.mask & (1 << (qubit - 1)) != 0
    }

    /// 1-based labels in ascending order.
    pub fn qubits(&self) -> Vec<usize> {
        (1..=self.n_qubits).filter(|&q| self.contains(q)).collect()
    }

    /// Lowest qubit label, if any.
    pub fn first(&self) -> Option<usize> {
        (self.mask != 0).then(|| self.mask.trailing_zeros() as usize + 1)
    }

    pub fn complement(&self) -> Self {
        Self { mask: !self.mask & ((1u64 << self.n_qubits) - 1), n_qubits: self.n_qubits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self { mask: self.mask & other.mask, n_qubits: self.n_qubits }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { mask: self.mask | other.mask, n_qubits: self.n_qubits }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self { mask: self.mask & !other.mask, n_qubits: self.n_qubits }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask & !other.mask == 0
    }

    /// Every subset of `self` (including the empty set and `self`) in
    /// increasing mask order.
    pub fn subsets(&self) -> impl Iterator<Item = QubitSubset> + '_ {
        let full = self.mask;
        let n_qubits = self.n_qubits;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(QubitSubset { mask: cur, n_qubits })
        })
    }
}

impl fmt::Display for QubitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// A 2x2 operator acting on qubit `target` (1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    pub target: usize,
    pub matrix: Matrix2<C64>,
}

impl LocalOperator {
    pub fn new(target: usize, matrix: Matrix2<C64>) -> Self {
        Self { target, matrix }
    }

    pub fn identity(target: usize) -> Self {
        Self::new(target, Matrix2::identity())
    }

    pub fn diagonal(target: usize, d0: C64, d1: C64) -> Self {
        Self::new(target, Matrix2::new(d0, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d1))
    }
}

/// On-disk state representation: `{"n": .., "amplitudes": [[re, im], ...]}`
/// in ascending basis-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serializes")
    }

    pub fn into_state(self) -> Result<PureState> {
        let amps = self.amplitudes.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        PureState::new(self.n, amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn make_state_basis_and_normalization() {
        let s = make_state(1, vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0), c(0.0)]);
        assert!(s.was_normalized());

        let bell = make_state(2, vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(bell.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.amplitudes()[3].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(bell.norm_deviation(), 1.0, epsilon = 1e-15);
        assert!(!bell.was_normalized());
    }

    #[test]
    fn make_state_errors() {
        assert!(matches!(
            make_state(2, vec![c(1.0), c(0.0), c(0.0)]),
            Err(Error::LengthMismatch { expected: 4, got: 3, .. })
        ));
        assert!(matches!(make_state(1, vec![c(0.0), c(1e-16)]), Err(Error::ZeroVector { .. })));
        assert!(matches!(make_state(1, vec![c(f64::NAN), c(1.0)]), Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn ghz_and_w_layout() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let g2 = ghz(2).unwrap();
        assert_eq!(g2.amplitudes(), &[c(r), c(0.0), c(0.0), c(r)]);
        let g4 = ghz(4).unwrap();
        let nz: Vec<usize> = (0..16).filter(|&i| g4.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nz, vec![0, 15]);
        assert!(matches!(ghz(1), Err(Error::BadArity { .. })));

        let w2 = w_state(2).unwrap();
        assert_eq!(w2.amplitudes(), &[c(0.0), c(r), c(r), c(0.0)]);
        let w4 = w_state(4).unwrap();
        for i in 0..16 {
            let expect = if [1, 2, 4, 8].contains(&i) { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(w4.amplitudes()[i].re, expect, epsilon = 1e-15);
        }
        let w3 = w_state(3).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for i in 0..8 {
            let expect = if [1, 2, 4].contains(&i) { t } else { 0.0 };
            assert_abs_diff_eq!(w3.amplitudes()[i].re, expect, epsilon = 1e-15);
        }
        assert!(matches!(w_state(0), Err(Error::BadArity { .. })));
    }

    #[test]
    fn tensor_product_examples() {
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let s = tensor_product(&[zero, one]).unwrap();
        assert_eq!(s, PureState::basis(2, 0b01).unwrap());

        let bell = ghz(2).unwrap();
        let bb = tensor_product(&[bell.clone(), bell]).unwrap();
        assert_eq!(bb.n_qubits(), 4);
        for i in 0..16 {
            let expect = if [0, 3, 12, 15].contains(&i) { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(bb.amplitudes()[i].re, expect, epsilon = 1e-15);
        }
        assert_eq!(tensor_product(&[]), Err(Error::EmptyList));
    }

    #[test]
    fn apply_local_examples() {
        let g4 = ghz(4).unwrap();
        let (same, q) = g4.apply_local(&LocalOperator::identity(3)).unwrap();
        assert_abs_diff_eq!(q, 1.0, epsilon = 1e-15);
        assert!(same.distance(&g4) < 1e-15);

        let d = 2f64.sqrt();
        let op = LocalOperator::diagonal(1, c(d), c(1.0 / d));
        let (out, q) = g4.apply_local(&op).unwrap();
        assert_abs_diff_eq!(q * q, 1.25, epsilon = 1e-14);
        // qubit 1 is the most significant bit: index 0 gets d, index 15 gets 1/d
        assert!(out.amplitudes()[0].re > out.amplitudes()[15].re);

        let one = PureState::basis(1, 1).unwrap();
        let kill = LocalOperator::diagonal(1, c(1.0), c(0.0));
        assert!(matches!(one.apply_local(&kill), Err(Error::ZeroVector { .. })));
        assert!(matches!(
            g4.apply_local(&LocalOperator::identity(5)),
            Err(Error::TargetOutOfRange { target: 5, n_qubits: 4 })
        ));
    }

    #[test]
    fn apply_local_targets_the_labelled_qubit() {
        // X on qubit 2 of |000> gives |010>, basis index 2.
        let x = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        let s = PureState::basis(3, 0).unwrap();
        let (out, _) = s.apply_local(&LocalOperator::new(2, x)).unwrap();
        assert_eq!(out, PureState::basis(3, 0b010).unwrap());
    }

    #[test]
    fn reduced_purity_examples() {
        let g4 = ghz(4).unwrap();
        let s1 = QubitSubset::from_qubits(&[1], 4).unwrap();
        assert_abs_diff_eq!(g4.reduced_purity(&s1).unwrap(), 0.5, epsilon = 1e-15);

        let zero = PureState::basis(4, 0).unwrap();
        for mask in 1..15 {
            let s = QubitSubset::new(mask, 4).unwrap();
            assert_abs_diff_eq!(zero.reduced_purity(&s).unwrap(), 1.0, epsilon = 1e-15);
        }

        let w4 = w_state(4).unwrap();
        let s12 = QubitSubset::from_qubits(&[1, 2], 4).unwrap();
        assert_abs_diff_eq!(w4.reduced_purity(&s12).unwrap(), 0.5, epsilon = 1e-15);

        assert_eq!(g4.reduced_purity(&QubitSubset::empty(4)), Err(Error::EmptySubset));
        assert_eq!(g4.reduced_purity(&QubitSubset::full(4)), Err(Error::FullSubset));
    }

    #[test]
    fn rdm_ordering_matches_labels() {
        // |01> on qubits (1,2) of a 3-qubit register |010>
        let s = PureState::basis(3, 0b010).unwrap();
        let rho = s.reduced_density_matrix(&QubitSubset::from_qubits(&[1, 2], 3).unwrap()).unwrap();
        assert_abs_diff_eq!(rho[(1, 1)].re, 1.0, epsilon = 1e-15);
        let rho3 = s.reduced_density_matrix(&QubitSubset::from_qubits(&[3], 3).unwrap()).unwrap();
        assert_abs_diff_eq!(rho3[(0, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn subset_helpers() {
        let s = QubitSubset::from_qubits(&[1, 3], 4).unwrap();
        assert_eq!(s.mask(), 0b0101);
        assert_eq!(s.qubits(), vec![1, 3]);
        assert_eq!(s.complement().qubits(), vec![2, 4]);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(s.first(), Some(1));
        let subs: Vec<u64> = s.subsets().map(|x| x.mask()).collect();
        assert_eq!(subs, vec![0, 1, 4, 5]);
        assert!(QubitSubset::new(16, 4).is_err());
    }

    #[test]
    fn state_file_round_trip() {
        let w = w_state(3).unwrap();
        let text = w.to_file().to_json();
        let back = StateFile::from_json(&text).unwrap().into_state().unwrap();
        assert_eq!(back, w);
        assert!(StateFile::from_json("{\"n\": 1}").is_err());
    }
}
