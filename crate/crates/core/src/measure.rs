//! Bipartite nonlocal information and the genuine `n`-qubit entanglement
//! built from it, plus closed-form two- and three-qubit quantities used as
//! cross-checks.
//!
//! The nonlocal information across a cut `A|B` is summed factor by factor
//! over the finest product decomposition of the state: each factor that the
//! cut splits contributes the linear-entropy mutual information
//! `2 (1 - Tr rho_{A_m}^2)`, and unsplit factors contribute nothing. The
//! genuine entanglement of an even register is the class-I total minus the
//! class-II total.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{
    enumerate_bipartitions, factorize_cached, restrict, Bipartition, Factorization, PartitionClass,
    PurityCache, DEFAULT_FACTOR_TOL, MAX_PARTITION_QUBITS,
};
use crate::state::{PureState, QubitSubset};

/// Mutual information of one product factor across the cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorContribution {
    pub factor: Vec<usize>,
    #[serde(rename = "I")]
    pub mutual_info: f64,
}

/// Nonlocal information `S_{A|B}` for one bipartition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlocalInfo {
    /// Mask of the side containing qubit 1.
    #[serde(rename = "A")]
    pub part_a: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<PartitionClass>,
    #[serde(rename = "S")]
    pub value: f64,
    #[serde(default)]
    pub per_factor: Vec<FactorContribution>,
}

impl NonlocalInfo {
    pub fn partition(&self, n_qubits: usize) -> Result<Bipartition> {
        Bipartition::from_mask(self.part_a, n_qubits)
    }
}

/// Full breakdown of the genuine entanglement of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    #[serde(rename = "E")]
    pub value: f64,
    #[serde(rename = "S_I")]
    pub sum_class_i: f64,
    #[serde(rename = "S_II")]
    pub sum_class_ii: f64,
    pub partitions: Vec<NonlocalInfo>,
    /// Product factors used, as 1-based label lists.
    pub factorization: Vec<Vec<usize>>,
    pub factor_tolerance: f64,
    pub max_accepted_impurity: f64,
    pub min_rejected_impurity: Option<f64>,
    /// Set when `E > 1`, which no known state reaches.
    pub exceeds_unit_bound: bool,
}

/// `2 (1 - Tr rho_{a_m}^2)` for a cut of the pure factor `factor`; zero when
/// either side of the cut is empty.
pub fn mutual_info_within_factor(state: &PureState, factor: &QubitSubset, a_m: &QubitSubset) -> Result<f64> {
    mutual_info_cached(&mut PurityCache::new(state), factor, a_m)
}

fn mutual_info_cached(cache: &mut PurityCache<'_>, factor: &QubitSubset, a_m: &QubitSubset) -> Result<f64> {
    if !a_m.is_subset_of(factor) {
        return Err(Error::NotASubset { subset: a_m.mask(), superset: factor.mask() });
    }
    if a_m.is_empty() || factor.difference(a_m).is_empty() {
        return Ok(0.0);
    }
    // Purities multiply across product factors, so the purity of a_m inside
    // the full state equals its purity inside the factor.
    Ok(2.0 * (1.0 - cache.purity(a_m)))
}

/// `S_{A|B}` summed over the factors of `factorization`.
pub fn nonlocal_info(state: &PureState, partition: &Bipartition, factorization: &Factorization) -> Result<NonlocalInfo> {
    nonlocal_info_cached(&mut PurityCache::new(state), partition, factorization)
}

fn nonlocal_info_cached(
    cache: &mut PurityCache<'_>,
    partition: &Bipartition,
    factorization: &Factorization,
) -> Result<NonlocalInfo> {
    let n = cache.state().n_qubits();
    if partition.n_qubits() != n || !factorization.covers(n) {
        return Err(Error::FactorizationMismatch { n_qubits: n });
    }
    let mut per_factor = Vec::with_capacity(factorization.factors.len());
    let mut value = 0.0;
    for factor in &factorization.factors {
        let (a_m, _) = restrict(partition, factor);
        let info = mutual_info_cached(cache, factor, &a_m)?;
        value += info;
        per_factor.push(FactorContribution { factor: factor.qubits(), mutual_info: info });
    }
    Ok(NonlocalInfo { part_a: partition.part_a().mask(), class: partition.class(), value, per_factor })
}

/// Genuine entanglement of an even register with the default factor
/// tolerance.
pub fn genuine_entanglement(state: &PureState) -> Result<MeasureReport> {
    genuine_entanglement_with_tol(state, DEFAULT_FACTOR_TOL)
}

/// Genuine entanglement `S_I - S_II` of an even register.
///
/// For two qubits there is a single class-I cut and no class-II cut, so the
/// value is the mutual information `I_12`.
pub fn genuine_entanglement_with_tol(state: &PureState, tol: f64) -> Result<MeasureReport> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::BadArity { n, reason: "the measure needs at least 2 qubits" });
    }
    if n % 2 == 1 {
        return Err(Error::OddArity { n });
    }
    if n > MAX_PARTITION_QUBITS {
        return Err(Error::ArityTooLarge { n, max: MAX_PARTITION_QUBITS });
    }
    let mut cache = PurityCache::new(state);
    let factorization = factorize_cached(&mut cache, tol)?;
    let mut partitions = Vec::with_capacity((1 << (n - 1)) - 1);
    let (mut sum_i, mut sum_ii) = (0.0, 0.0);
    for (partition, class) in enumerate_bipartitions(n)? {
        let info = nonlocal_info_cached(&mut cache, &partition, &factorization)?;
        match class.expect("even register") {
            PartitionClass::ClassI => sum_i += info.value,
            PartitionClass::ClassII => sum_ii += info.value,
        }
        partitions.push(info);
    }
    let value = sum_i - sum_ii;
    Ok(MeasureReport {
        n,
        value,
        sum_class_i: sum_i,
        sum_class_ii: sum_ii,
        partitions,
        factorization: factorization.labels(),
        factor_tolerance: factorization.tolerance_used,
        max_accepted_impurity: factorization.max_accepted_impurity,
        min_rejected_impurity: factorization.min_rejected_impurity,
        exceeds_unit_bound: value > 1.0 + 1e-9,
    })
}

/// Just the value of [`genuine_entanglement`].
pub fn entanglement_value(state: &PureState) -> Result<f64> {
    genuine_entanglement(state).map(|r| r.value)
}

/// Squared concurrence of a pure two-qubit state, `2 (1 - Tr rho_1^2)`.
pub fn concurrence_squared(state: &PureState) -> Result<f64> {
    if state.n_qubits() != 2 {
        return Err(Error::BadArity { n: state.n_qubits(), reason: "concurrence needs exactly 2 qubits" });
    }
    let p = state.reduced_purity(&QubitSubset::from_qubits(&[1], 2)?)?;
    Ok((2.0 * (1.0 - p)).clamp(0.0, 1.0))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn wootters_concurrence(rho: &Matrix4<C64>) -> f64 {
    let eig = SymmetricEigen::new((rho + rho.adjoint()) * C64::new(0.5, 0.0));
    let scale = eig.eigenvalues.max().max(0.0);
    let keep: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > 1e-14 * scale.max(1e-300)).collect();
    let ensemble = DMatrix::from_fn(4, keep.len(), |r, c| {
        let i = keep[c];
        eig.eigenvectors[(r, i)] * eig.eigenvalues[i].sqrt()
    });
    concurrence_of_ensemble(&ensemble)
}

/// Concurrence of `rho = C C^dagger` for a 4 x r matrix `C`.
///
/// The Wootters lambdas (square roots of the eigenvalues of
/// `rho (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)`) are the singular values
/// of the r x r matrix `C^T (sigma_y x sigma_y) C`, which avoids square roots
/// of near-zero eigenvalues.
pub fn concurrence_of_ensemble(c: &DMatrix<C64>) -> f64 {
    assert_eq!(c.nrows(), 4, "two-qubit ensemble expected");
    if c.ncols() == 0 {
        return 0.0;
    }
    // sigma_y (x) sigma_y = antidiag(-1, 1, 1, -1)
    let mut yy = DMatrix::<C64>::zeros(4, 4);
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    let m = c.transpose() * yy * c;
    let mut lambdas: Vec<f64> = m.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.resize(4.max(lambdas.len()), 0.0);
    (lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0)
}

/// Squared Wootters concurrence between qubits `i` and `j` of a state.
pub fn pair_tangle(state: &PureState, i: usize, j: usize) -> Result<f64> {
    let n = state.n_qubits();
    let c = state.coefficient_matrix(&QubitSubset::from_qubits(&[i, j], n)?)?;
    if c.nrows() != 4 {
        return Err(Error::BadArity { n, reason: "pair tangle needs two distinct qubits" });
    }
    Ok(concurrence_of_ensemble(&c).powi(2))
}

/// Three-tangle as the residual `S_{1|23} - tau_12 - tau_13`.
pub fn three_tangle(state: &PureState) -> Result<f64> {
    if state.n_qubits() != 3 {
        return Err(Error::BadArity { n: state.n_qubits(), reason: "the three-tangle needs exactly 3 qubits" });
    }
    let s1 = 2.0 * (1.0 - state.reduced_purity(&QubitSubset::from_qubits(&[1], 3)?)?);
    Ok(s1 - pair_tangle(state, 1, 2)? - pair_tangle(state, 1, 3)?)
}

/// Three-tangle from the Cayley hyperdeterminant of the amplitudes,
/// `4 |d1 - 2 d2 + 4 d3|`.
pub fn hyperdeterminant_tangle(state: &PureState) -> Result<f64> {
    if state.n_qubits() != 3 {
        return Err(Error::BadArity { n: state.n_qubits(), reason: "the three-tangle needs exactly 3 qubits" });
    }
    let a = |i: usize| state.amplitudes()[i];
    let (a000, a001, a010, a011) = (a(0), a(1), a(2), a(3));
    let (a100, a101, a110, a111) = (a(4), a(5), a(6), a(7));
    let d1 = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    Ok(4.0 * (d1 - 2.0 * d2 + 4.0 * d3).norm())
}
