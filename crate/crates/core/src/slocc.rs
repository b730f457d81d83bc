//! Determinant-1 local filtering, two-outcome local measurements, and the
//! four-qubit normal-form family.
//!
//! Under a determinant-1 operation `A` on one qubit the genuine entanglement
//! of an even register rescales as `E -> E / Q^4`, where `Q` is the norm of
//! `A |psi>`. A two-outcome measurement can only lower it on average. Both
//! are exposed here as checks that return their residuals.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{entanglement_value, genuine_entanglement, nonlocal_info};
use crate::partition::{factorize, Bipartition, DEFAULT_FACTOR_TOL};
use crate::random::{complex_normal, random_su2, random_unitary};
use crate::state::{LocalOperator, PureState, QubitSubset};

/// Tolerance on `|det - 1|` for determinant-1 operators.
pub const DET_TOL: f64 = 1e-12;
/// Tolerance on `|M1'M1 + M2'M2 - I|` for a POVM.
pub const POVM_TOL: f64 = 1e-10;
/// Branch probabilities below this are reported as empty branches.
pub const NULL_BRANCH: f64 = 1e-28;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A determinant-1 operator `u_post . diag(d, 1/d) . u_pre` on one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct SL2Op {
    target: usize,
    d: f64,
    u_pre: Matrix2<C64>,
    u_post: Matrix2<C64>,
}

impl SL2Op {
    pub fn new(target: usize, d: f64, u_pre: Matrix2<C64>, u_post: Matrix2<C64>) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::BadParameter(format!("filter strength d must be positive, got {d}")));
        }
        let op = Self { target, d, u_pre, u_post };
        let det = op.matrix().determinant();
        let deviation = (det - c(1.0)).norm();
        if deviation > DET_TOL {
            return Err(Error::NotDet1 { det, deviation });
        }
        Ok(op)
    }

    /// `diag(d, 1/d)` on `target`.
    pub fn diagonal(target: usize, d: f64) -> Result<Self> {
        Self::new(target, d, Matrix2::identity(), Matrix2::identity())
    }

    /// Validates `matrix` and recovers its singular-value form.
    pub fn from_matrix(target: usize, matrix: Matrix2<C64>) -> Result<Self> {
        let det = matrix.determinant();
        let deviation = (det - c(1.0)).norm();
        if deviation > DET_TOL {
            return Err(Error::NotDet1 { det, deviation });
        }
        let svd = matrix.svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let s = svd.singular_values;
        let (d, u, v_t) = if s[0] >= s[1] {
            (s[0], u, v_t)
        } else {
            // swap the singular directions so that d >= 1
            let p = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
            (s[1], u * p, p * v_t)
        };
        // |det| = 1 makes the singular values (d, 1/d); any leftover phase sits
        // in det(u) det(v_t), which is 1 because det(matrix) is.
        Self::new(target, d, v_t, u)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn matrix(&self) -> Matrix2<C64> {
        self.u_post * Matrix2::new(c(self.d), c(0.0), c(0.0), c(1.0 / self.d)) * self.u_pre
    }

    pub fn local_operator(&self) -> LocalOperator {
        LocalOperator::new(self.target, self.matrix())
    }
}

/// Applies a determinant-1 operator and renormalizes; returns the new state
/// and the norm `Q` of the unnormalized image.
pub fn apply_sl2(state: &PureState, op: &SL2Op) -> Result<(PureState, f64)> {
    state.apply_local(&op.local_operator())
}

/// Both sides of `E(psi') = E(psi) / Q^4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub q: f64,
}

pub fn check_slocc_covariance(state: &PureState, op: &SL2Op) -> Result<CovarianceCheck> {
    check_slocc_covariance_sequence(state, std::slice::from_ref(op))
}

/// Covariance check for several operators applied in order. The overall
/// normalization is the product of the individual `Q` factors.
pub fn check_slocc_covariance_sequence(state: &PureState, ops: &[SL2Op]) -> Result<CovarianceCheck> {
    let before = entanglement_value(state)?;
    let mut current = state.clone();
    let mut q = 1.0;
    for op in ops {
        let (next, qi) = apply_sl2(&current, op)?;
        current = next;
        q *= qi;
    }
    let lhs = entanglement_value(&current)?;
    let rhs = before / q.powi(4);
    Ok(CovarianceCheck { lhs, rhs, residual: (lhs - rhs).abs(), q })
}

/// Two-outcome measurement `{M1, M2}` on one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmPair {
    target: usize,
    m1: Matrix2<C64>,
    m2: Matrix2<C64>,
}

impl PovmPair {
    pub fn new(target: usize, m1: Matrix2<C64>, m2: Matrix2<C64>) -> Result<Self> {
        let deviation = (m1.adjoint() * m1 + m2.adjoint() * m2 - Matrix2::identity()).norm();
        if deviation > POVM_TOL {
            return Err(Error::NotAPovm { deviation });
        }
        Ok(Self { target, m1, m2 })
    }

    /// `M1 = U1 diag(a, b) V`, `M2 = U2 diag(sqrt(1-a^2), sqrt(1-b^2)) V`.
    pub fn from_singular_values(
        target: usize,
        a: f64,
        b: f64,
        u1: Matrix2<C64>,
        u2: Matrix2<C64>,
        v: Matrix2<C64>,
    ) -> Result<Self> {
        if !((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)) {
            return Err(Error::BadParameter(format!("POVM singular values must lie in [0, 1], got ({a}, {b})")));
        }
        let m1 = u1 * Matrix2::new(c(a), c(0.0), c(0.0), c(b)) * v;
        let m2 = u2 * Matrix2::new(c((1.0 - a * a).sqrt()), c(0.0), c(0.0), c((1.0 - b * b).sqrt())) * v;
        Self::new(target, m1, m2)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn m1(&self) -> &Matrix2<C64> {
        &self.m1
    }

    pub fn m2(&self) -> &Matrix2<C64> {
        &self.m2
    }
}

/// One outcome of a measurement. `state` is `None` when the outcome has
/// zero probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub state: Option<PureState>,
    pub prob: f64,
}

/// Post-measurement states `M_i |psi> / Q_i` with probabilities `Q_i^2`.
pub fn povm_branches(state: &PureState, povm: &PovmPair) -> Result<Vec<Branch>> {
    [povm.m1, povm.m2]
        .into_iter()
        .map(|m| match state.apply_local(&LocalOperator::new(povm.target, m)) {
            Ok((s, q)) if q * q > NULL_BRANCH => Ok(Branch { state: Some(s), prob: q * q }),
            Ok((_, q)) => Ok(Branch { state: None, prob: q * q }),
            Err(Error::ZeroVector { norm }) => Ok(Branch { state: None, prob: norm * norm }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Average entanglement after a measurement against the original value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub average: f64,
    pub original: f64,
    /// `original - average`; non-negative for a monotone.
    pub slack: f64,
}

pub fn check_monotonicity(state: &PureState, povm: &PovmPair) -> Result<MonotonicityCheck> {
    let original = entanglement_value(state)?;
    let mut average = 0.0;
    for branch in povm_branches(state, povm)? {
        if let Some(s) = &branch.state {
            average += branch.prob * entanglement_value(s)?;
        }
    }
    Ok(MonotonicityCheck { average, original, slack: original - average })
}

/// Parameters of the four-qubit normal form `G_abcd`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GAbcdParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl GAbcdParams {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !(v.re.is_finite() && v.im.is_finite()) || v.re < 0.0 {
                return Err(Error::BadParameter(format!(
                    "normal-form parameter {name} = {v} must be finite with non-negative real part"
                )));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// `[A, B, C, D] = [(a+d)/2, (b+c)/2, (a-d)/2, (b-c)/2]`.
    pub fn coefficients(&self) -> [C64; 4] {
        [(self.a + self.d) / 2.0, (self.b + self.c) / 2.0, (self.a - self.d) / 2.0, (self.b - self.c) / 2.0]
    }

    /// Squared norm of the unnormalized state, `2 (|A|^2 + |B|^2 + |C|^2 + |D|^2)`.
    pub fn norm_sqr(&self) -> f64 {
        2.0 * self.coefficients().iter().map(|x| x.norm_sqr()).sum::<f64>()
    }
}

/// `A(|0000>+|1111>) + C(|0011>+|1100>) + B(|0101>+|1010>) + D(|0110>+|1001>)`,
/// normalized.
pub fn g_abcd(params: &GAbcdParams) -> Result<PureState> {
    let [a, b, c_, d] = params.coefficients();
    let mut amps = vec![c(0.0); 16];
    for (value, indices) in [(a, [0b0000, 0b1111]), (c_, [0b0011, 0b1100]), (b, [0b0101, 0b1010]), (d, [0b0110, 0b1001])] {
        for i in indices {
            amps[i] = value;
        }
    }
    PureState::new(4, amps)
}

/// Closed-form two-qubit reduced purity of the normal form:
/// `T = 2 {(|x1|^2+|x3|^2)^2 + (|x2|^2+|x4|^2)^2 + |x1 x3^* + x1^* x3|^2
/// + |x2 x4^* + x2^* x4|^2} / M^2` with `M = 2 sum |xi|^2`.
///
/// `Tr rho_12^2 = T(A,B,C,D)`, `Tr rho_13^2 = T(A,C,B,D)`,
/// `Tr rho_14^2 = T(A,B,D,C)`. Checked against direct partial traces in
/// all three orders; for example `T(1,1,0,0) = 1/4`.
pub fn purity_t(x1: C64, x2: C64, x3: C64, x4: C64) -> Result<f64> {
    let m = 2.0 * (x1.norm_sqr() + x2.norm_sqr() + x3.norm_sqr() + x4.norm_sqr());
    if m == 0.0 {
        return Err(Error::AllZero);
    }
    let cross = |p: C64, q: C64| (p * q.conj() + p.conj() * q).norm_sqr();
    let braces = (x1.norm_sqr() + x3.norm_sqr()).powi(2)
        + (x2.norm_sqr() + x4.norm_sqr()).powi(2)
        + cross(x1, x3)
        + cross(x2, x4);
    Ok(2.0 * braces / (m * m))
}

/// `sum |xi|^4 + sum_{i<j} |xi xj^* + xi^* xj|^2 - 2 sum_{i<j} |xi|^2 |xj|^2`,
/// which is non-negative for every complex quadruple.
pub fn quartic_margin(x: [C64; 4]) -> f64 {
    let mut lhs: f64 = x.iter().map(|v| v.norm_sqr().powi(2)).sum();
    let mut rhs = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            lhs += (x[i] * x[j].conj() + x[i].conj() * x[j]).norm_sqr();
            rhs += 2.0 * x[i].norm_sqr() * x[j].norm_sqr();
        }
    }
    lhs - rhs
}

/// Result of [`check_normal_form_properties`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub is_product: bool,
    /// `S_{1|234}, S_{2|134}, S_{3|124}, S_{4|123}`.
    pub single_cuts: [f64; 4],
    /// `None` for product instances, where the unit value is not expected.
    pub single_cuts_ok: Option<bool>,
    /// Direct `Tr rho_12^2, Tr rho_13^2, Tr rho_14^2`.
    pub pair_purities: [f64; 3],
    /// The same purities from [`purity_t`].
    pub pair_purities_closed_form: [f64; 3],
    pub max_closed_form_residual: f64,
    pub entanglement: f64,
    pub quartic_margin: f64,
    pub passed: bool,
}

/// Checks the normal-form instance: every single-qubit cut carries one unit
/// of nonlocal information, the closed-form pair purities agree with direct
/// partial traces, and the genuine entanglement is non-negative.
pub fn check_normal_form_properties(params: &GAbcdParams) -> Result<NormalFormReport> {
    const TOL: f64 = 1e-10;
    let state = g_abcd(params)?;
    let factorization = factorize(&state, DEFAULT_FACTOR_TOL)?;
    let is_product = factorization.is_product();

    let mut single_cuts = [0.0; 4];
    for (q, slot) in single_cuts.iter_mut().enumerate() {
        let p = Bipartition::new(QubitSubset::from_qubits(&[q + 1], 4)?)?;
        *slot = nonlocal_info(&state, &p, &factorization)?.value;
    }
    let single_cuts_ok = (!is_product).then(|| single_cuts.iter().all(|s| (s - 1.0).abs() < TOL));

    let mut pair_purities = [0.0; 3];
    for (k, slot) in pair_purities.iter_mut().enumerate() {
        *slot = state.reduced_purity(&QubitSubset::from_qubits(&[1, k + 2], 4)?)?;
    }
    let [a, b, c_, d] = params.coefficients();
    let pair_purities_closed_form = [purity_t(a, b, c_, d)?, purity_t(a, c_, b, d)?, purity_t(a, b, d, c_)?];
    let max_closed_form_residual = pair_purities
        .iter()
        .zip(&pair_purities_closed_form)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let entanglement = genuine_entanglement(&state)?.value;
    let quartic_margin = quartic_margin([a, b, c_, d]);
    let passed = single_cuts_ok.unwrap_or(true)
        && max_closed_form_residual < TOL
        && entanglement >= -TOL
        && quartic_margin >= -TOL;
    Ok(NormalFormReport {
        is_product,
        single_cuts,
        single_cuts_ok,
        pair_purities,
        pair_purities_closed_form,
        max_closed_form_residual,
        entanglement,
        quartic_margin,
        passed,
    })
}

/// Random determinant-1 operator: Haar SU(2) factors around `diag(d, 1/d)`
/// with `d` log-uniform in `[1/4, 4]`.
pub fn random_sl2_op<R: Rng + ?Sized>(target: usize, rng: &mut R) -> SL2Op {
    let d = (rng.random_range(-1.0..=1.0) * 4f64.ln()).exp();
    SL2Op::new(target, d, random_su2(rng), random_su2(rng)).expect("SU(2) factors keep det = 1")
}

/// Random two-outcome measurement with singular values uniform in `[0, 1]`
/// and Haar unitary factors.
pub fn random_povm<R: Rng + ?Sized>(target: usize, rng: &mut R) -> PovmPair {
    let a = rng.random_range(0.0..=1.0);
    let b = rng.random_range(0.0..=1.0);
    let (u1, u2, v) = (random_unitary(rng), random_unitary(rng), random_unitary(rng));
    PovmPair::from_singular_values(target, a, b, u1, u2, v).expect("singular-value form is complete")
}

/// Random normal-form parameters: real parts uniform in `[0, 1)`, imaginary
/// parts standard normal.
pub fn random_gabcd_params<R: Rng + ?Sized>(rng: &mut R) -> GAbcdParams {
    let mut draw = || C64::new(rng.random_range(0.0..1.0), complex_normal(rng).im);
    GAbcdParams::new(draw(), draw(), draw(), draw()).expect("non-negative real parts")
}
