//! Bipartitions of a qubit register, product-factor detection, and the
//! split-counting combinatorics behind the class-difference measure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{PureState, QubitSubset};

/// Largest register for which bipartitions are enumerated.
pub const MAX_PARTITION_QUBITS: usize = 16;

/// Default threshold on `1 - purity` for calling a subset a product factor.
pub const DEFAULT_FACTOR_TOL: f64 = 1e-10;

/// Parity class of a bipartition of an even register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionClass {
    /// Both sides hold an odd number of qubits.
    #[serde(rename = "I")]
    ClassI,
    /// Both sides hold an even number of qubits.
    #[serde(rename = "II")]
    ClassII,
}

impl PartitionClass {
    /// Sign with which a partition of this class enters the measure.
    pub fn sign(self) -> f64 {
        match self {
            PartitionClass::ClassI => 1.0,
            PartitionClass::ClassII => -1.0,
        }
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionClass::ClassI => "I",
            PartitionClass::ClassII => "II",
        })
    }
}

/// An unordered split `A|B` stored canonically with qubit 1 in `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    part_a: QubitSubset,
}

impl Bipartition {
    /// Builds the bipartition with `part_a` on one side. Either side may be
    /// given; the result is canonicalized so that qubit 1 is in `A`.
    pub fn new(part_a: QubitSubset) -> Result<Self> {
        if part_a.is_empty() {
            return Err(Error::EmptySubset);
        }
        if part_a.is_full() {
            return Err(Error::FullSubset);
        }
        let part_a = if part_a.contains(1) { part_a } else { part_a.complement() };
        Ok(Self { part_a })
    }

    pub fn from_mask(mask: u64, n_qubits: usize) -> Result<Self> {
        Self::new(QubitSubset::new(mask, n_qubits)?)
    }

    pub fn part_a(&self) -> QubitSubset {
        self.part_a
    }

    pub fn part_b(&self) -> QubitSubset {
        self.part_a.complement()
    }

    pub fn n_qubits(&self) -> usize {
        self.part_a.n_qubits()
    }

    /// `None` for odd registers.
    pub fn class(&self) -> Option<PartitionClass> {
        let n = self.n_qubits();
        if n % 2 == 1 {
            return None;
        }
        Some(if self.part_a.len() % 2 == 1 { PartitionClass::ClassI } else { PartitionClass::ClassII })
    }

    /// Whether `subset` has qubits on both sides.
    pub fn splits(&self, subset: &QubitSubset) -> bool {
        let (a, b) = restrict(self, subset);
        !a.is_empty() && !b.is_empty()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n_qubits() < 10 { "" } else { "," };
        let side = |s: QubitSubset| s.qubits().iter().map(|q| q.to_string()).collect::<Vec<_>>().join(sep);
        write!(f, "{}|{}", side(self.part_a), side(self.part_b()))
    }
}

/// All `2^(n-1) - 1` canonical bipartitions in increasing mask order, with
/// their class when `n` is even.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<(Bipartition, Option<PartitionClass>)>> {
    if n < 2 {
        return Err(Error::BadArity { n, reason: "bipartitions need at least 2 qubits" });
    }
    if n > MAX_PARTITION_QUBITS {
        return Err(Error::ArityTooLarge { n, max: MAX_PARTITION_QUBITS });
    }
    let full = (1u64 << n) - 1;
    Ok((0..1u64 << (n - 1))
        .map(|half| (half << 1) | 1)
        .filter(|&mask| mask != full)
        .map(|mask| {
            let p = Bipartition { part_a: QubitSubset::new(mask, n).expect("mask in range") };
            (p, p.class())
        })
        .collect())
}

/// `(|Class I|, |Class II|)` from binomial counting, for even `n`.
pub fn class_census(n: usize) -> Result<(u64, u64)> {
    if n % 2 == 1 {
        return Err(Error::OddArity { n });
    }
    if n < 2 {
        return Err(Error::BadArity { n, reason: "bipartitions need at least 2 qubits" });
    }
    let binom = |k: usize| -> u64 { (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1)) };
    let odd: u64 = (1..n).step_by(2).map(binom).sum();
    let even: u64 = (2..n).step_by(2).map(binom).sum();
    Ok((odd / 2, even / 2))
}

/// `(A ∩ factor, B ∩ factor)`.
pub fn restrict(partition: &Bipartition, factor: &QubitSubset) -> (QubitSubset, QubitSubset) {
    (partition.part_a().intersection(factor), partition.part_b().intersection(factor))
}

/// Memo of reduced purities of one state, keyed by subset mask.
///
/// A subset and its complement have equal purity, so entries are stored under
/// the member of the pair that contains qubit 1.
#[derive(Debug)]
pub struct PurityCache<'a> {
    state: &'a PureState,
    values: Vec<f64>,
    computed: usize,
}

impl<'a> PurityCache<'a> {
    pub fn new(state: &'a PureState) -> Self {
        let slots = 1usize << (state.n_qubits() - 1);
        Self { state, values: vec![f64::NAN; slots], computed: 0 }
    }

    pub fn state(&self) -> &'a PureState {
        self.state
    }

    /// Purity of the reduced state on `subset`. Empty and full subsets give 1.
    pub fn purity(&mut self, subset: &QubitSubset) -> f64 {
        if subset.is_empty() || subset.is_full() {
            return 1.0;
        }
        let canonical = if subset.contains(1) { *subset } else { subset.complement() };
        let slot = (canonical.mask() >> 1) as usize;
        let cached = self.values[slot];
        if !cached.is_nan() {
            return cached;
        }
        let value = self.state.purity_of_mask(canonical.mask());
        self.values[slot] = value;
        self.computed += 1;
        value
    }

    /// Number of distinct purities evaluated so far.
    pub fn computed(&self) -> usize {
        self.computed
    }
}

/// Finest decomposition of a state's register into product factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub factors: Vec<QubitSubset>,
    pub tolerance_used: f64,
    /// Largest `1 - purity` among subsets accepted as factors.
    pub max_accepted_impurity: f64,
    /// Smallest `1 - purity` among subsets rejected during the scan.
    pub min_rejected_impurity: Option<f64>,
}

impl Factorization {
    /// Single factor covering all qubits.
    pub fn trivial(n_qubits: usize, tol: f64) -> Self {
        Self {
            factors: vec![QubitSubset::full(n_qubits)],
            tolerance_used: tol,
            max_accepted_impurity: 0.0,
            min_rejected_impurity: None,
        }
    }

    pub fn is_product(&self) -> bool {
        self.factors.len() > 1
    }

    /// Whether the factors are disjoint and cover `n_qubits` qubits.
    pub fn covers(&self, n_qubits: usize) -> bool {
        let mut seen = 0u64;
        for f in &self.factors {
            if f.n_qubits() != n_qubits || f.mask() & seen != 0 {
                return false;
            }
            seen |= f.mask();
        }
        seen == QubitSubset::full(n_qubits).mask()
    }

    /// Factors as sorted 1-based label lists.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.factors.iter().map(QubitSubset::qubits).collect()
    }
}

/// Finest product decomposition of `state`, using `tol` on `1 - purity`.
pub fn factorize(state: &PureState, tol: f64) -> Result<Factorization> {
    factorize_cached(&mut PurityCache::new(state), tol)
}

/// [`factorize`] sharing a purity memo with later computations on the same
/// state.
///
/// Scans subsets that contain the lowest unassigned qubit, smallest first,
/// and takes the first one whose reduced state is pure within `tol`; the rest
/// of the register is then factorized the same way.
pub fn factorize_cached(cache: &mut PurityCache<'_>, tol: f64) -> Result<Factorization> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::BadTolerance { tol });
    }
    let n = cache.state().n_qubits();
    let mut unassigned = QubitSubset::full(n);
    let mut factors = Vec::new();
    let mut max_accepted: f64 = 0.0;
    let mut min_rejected: Option<f64> = None;
    while let Some(q) = unassigned.first() {
        let pivot = QubitSubset::from_qubits(&[q], n)?;
        let others = unassigned.difference(&pivot);
        let mut candidates: Vec<QubitSubset> = others.subsets().map(|s| s.union(&pivot)).collect();
        candidates.sort_by_key(|s| (s.len(), s.mask()));
        let mut chosen = unassigned;
        for cand in candidates {
            if cand == unassigned {
                break;
            }
            let impurity = 1.0 - cache.purity(&cand);
            if impurity <= tol {
                max_accepted = max_accepted.max(impurity);
                chosen = cand;
                break;
            }
            min_rejected = Some(min_rejected.map_or(impurity, |m: f64| m.min(impurity)));
        }
        factors.push(chosen);
        unassigned = unassigned.difference(&chosen);
    }
    Ok(Factorization {
        factors,
        tolerance_used: tol,
        max_accepted_impurity: max_accepted,
        min_rejected_impurity: min_rejected,
    })
}

/// Number of canonical bipartitions of each class that split a given subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionTally {
    pub k: usize,
    pub count_i: u64,
    pub count_ii: u64,
}

impl ContributionTally {
    pub fn difference(&self) -> i64 {
        self.count_i as i64 - self.count_ii as i64
    }
}

/// Counts the class-I and class-II bipartitions under which nonlocal
/// information shared by exactly `level_subset` is split across the cut.
pub fn contribution_tally(n: usize, level_subset: &QubitSubset) -> Result<ContributionTally> {
    if n % 2 == 1 {
        return Err(Error::OddArity { n });
    }
    if level_subset.n_qubits() != n {
        return Err(Error::MaskOutOfRange { mask: level_subset.mask(), n_qubits: n });
    }
    if level_subset.len() < 2 {
        return Err(Error::SubsetTooSmall { size: level_subset.len() });
    }
    let mut tally = ContributionTally { k: level_subset.len(), count_i: 0, count_ii: 0 };
    for (p, class) in enumerate_bipartitions(n)? {
        if p.splits(level_subset) {
            match class.expect("even register") {
                PartitionClass::ClassI => tally.count_i += 1,
                PartitionClass::ClassII => tally.count_ii += 1,
            }
        }
    }
    Ok(tally)
}

/// Range of `count_I - count_II` over all subsets of one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub k: usize,
    pub subsets: usize,
    pub min_difference: i64,
    pub max_difference: i64,
    pub expected: i64,
}

impl LevelSummary {
    pub fn holds(&self) -> bool {
        self.min_difference == self.expected && self.max_difference == self.expected
    }
}

/// Exhaustive check of the cancellation identity: every proper level
/// `2 <= k < n` cancels between the classes, and the full register survives
/// exactly once.
pub fn counting_identity(n: usize) -> Result<Vec<LevelSummary>> {
    if n % 2 == 1 {
        return Err(Error::OddArity { n });
    }
    let partitions = enumerate_bipartitions(n)?;
    let mut levels: Vec<LevelSummary> = (2..=n)
        .map(|k| LevelSummary {
            k,
            subsets: 0,
            min_difference: i64::MAX,
            max_difference: i64::MIN,
            expected: i64::from(k == n),
        })
        .collect();
    for mask in 0..1u64 << n {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let subset = QubitSubset::new(mask, n)?;
        let diff: i64 = partitions
            .iter()
            .filter(|(p, _)| p.splits(&subset))
            .map(|(_, c)| match c.expect("even register") {
                PartitionClass::ClassI => 1,
                PartitionClass::ClassII => -1,
            })
            .sum();
        let level = &mut levels[k - 2];
        level.subsets += 1;
        level.min_difference = level.min_difference.min(diff);
        level.max_difference = level.max_difference.max(diff);
    }
    Ok(levels)
}
