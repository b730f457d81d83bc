//! Seeded sampling of random states and local unitaries.
//!
//! Every randomized routine takes its generator from the caller. Batch runs
//! derive one independent ChaCha stream per sample index so that results do
//! not depend on how samples are scheduled across threads.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{PureState, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Generator for sample `index` of a batch seeded with `self`.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        Self(seed)
    }
}

/// Complex number with independent standard-normal parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state on `n` qubits.
pub fn haar_random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    if n == 0 {
        return Err(Error::BadArity { n, reason: "a state needs at least one qubit" });
    }
    if n > MAX_QUBITS {
        return Err(Error::ArityTooLarge { n, max: MAX_QUBITS });
    }
    let amps = (0..1usize << n).map(|_| complex_normal(rng)).collect();
    PureState::new(n, amps)
}

/// Haar-distributed pure state from a seed.
pub fn haar_random_state_seeded(n: usize, seed: RngSeed) -> Result<PureState> {
    haar_random_state(n, &mut seed.rng())
}

/// Haar-distributed element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let (a, b) = loop {
        let a = complex_normal(rng);
        let b = complex_normal(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-12 {
            break (a / norm, b / norm);
        }
    };
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Haar-distributed element of U(2).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    random_su2(rng) * C64::from_polar(1.0, phase)
}
