//! Thick-restart Lanczos for a few of the lowest eigenpairs of a real
//! symmetric operator given only as a matrix-vector product.
//!
//! The Krylov basis is kept fully reorthogonalized. At a restart the lowest
//! Ritz vectors are retained and the last Lanczos vector continues the
//! expansion, so no Krylov information about the wanted pairs is lost.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Real symmetric operator `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Largest basis kept between restarts.
    pub max_basis: usize,
    /// Residual norm `|A y - theta y|` required of every wanted pair.
    pub tol: f64,
    pub max_restarts: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_basis: 64, tol: 1e-10, max_restarts: 500, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Operator applications performed.
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components along `basis` (two passes).
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = dot(b, v);
            axpy(-p, b, v);
        }
    }
}

/// The `k` algebraically smallest eigenpairs of `op`.
pub fn lowest_eigenpairs<Op: LinearOperator + ?Sized>(op: &Op, k: usize, opts: &LanczosOptions) -> Result<Eigenpairs> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::BadEigenCount { k, max: dim });
    }
    let m = opts.max_basis.max(k + 2).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);
    let mut next = Some(start);
    let mut matvecs = 0;
    let mut worst = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        // expand
        while basis.len() < m {
            let Some(v) = next.take() else { break };
            let mut w = vec![0.0; dim];
            op.apply(&v, &mut w);
            matvecs += 1;
            let mut cand = w.clone();
            basis.push(v);
            images.push(w);
            orthogonalize(&mut cand, &basis);
            let nrm = norm(&cand);
            let scale = norm(&images[images.len() - 1]).max(1.0);
            if nrm > 1e-12 * scale {
                cand.iter_mut().for_each(|x| *x /= nrm);
                next = Some(cand);
            }
        }

        // Rayleigh-Ritz on the current basis
        let b = basis.len();
        let t = DMatrix::from_fn(b, b, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])));
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        let keep = (k + 2).max(m / 2).min(b.saturating_sub(1)).max(k.min(b));
        let mut ritz = Vec::with_capacity(keep);
        let mut ritz_images = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for &col in order.iter().take(keep) {
            let theta = eig.eigenvalues[col];
            let mut y = vec![0.0; dim];
            let mut hy = vec![0.0; dim];
            for j in 0..b {
                let sj = eig.eigenvectors[(j, col)];
                axpy(sj, &basis[j], &mut y);
                axpy(sj, &images[j], &mut hy);
            }
            let mut r = hy.clone();
            axpy(-theta, &y, &mut r);
            residuals.push(norm(&r));
            ritz.push(y);
            ritz_images.push(hy);
        }
        worst = residuals[..k].iter().copied().fold(0.0, f64::max);
        if worst < opts.tol {
            let values = order.iter().take(k).map(|&c| eig.eigenvalues[c]).collect();
            ritz.truncate(k);
            residuals.truncate(k);
            return Ok(Eigenpairs { values, vectors: ritz, residuals, matvecs });
        }

        // thick restart
        basis = ritz;
        images = ritz_images;
        if next.is_none() {
            // Invariant subspace reached without convergence: continue from a
            // fresh direction orthogonal to the retained vectors.
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            orthogonalize(&mut v, &basis);
            let nrm = norm(&v);
            if nrm > 1e-12 {
                v.iter_mut().for_each(|x| *x /= nrm);
                next = Some(v);
            }
        } else if let Some(v) = next.as_mut() {
            orthogonalize(v, &basis);
            let nrm = norm(v);
            v.iter_mut().for_each(|x| *x /= nrm);
        }
    }
    Err(Error::ConvergenceFailure { iterations: matvecs, residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DMatrix<f64>);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = (0..x.len()).map(|j| self.0[(i, j)] * x[j]).sum();
            }
        }
    }

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a + a.transpose()
    }

    #[test]
    fn matches_dense_solver() {
        for (n, seed) in [(5, 1), (40, 2), (300, 3)] {
            let a = random_symmetric(n, seed);
            let mut exact: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
            exact.sort_by(f64::total_cmp);
            let k = 3.min(n);
            let opts = LanczosOptions { max_basis: 30, ..Default::default() };
            let got = lowest_eigenpairs(&Dense(a.clone()), k, &opts).unwrap();
            for i in 0..k {
                assert!((got.values[i] - exact[i]).abs() < 1e-9, "n={n} i={i}: {} vs {}", got.values[i], exact[i]);
                assert!(got.residuals[i] < 1e-10);
                let mut y = vec![0.0; n];
                Dense(a.clone()).apply(&got.vectors[i], &mut y);
                axpy(-got.values[i], &got.vectors[i], &mut y);
                assert!(norm(&y) < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_counts() {
        let a = random_symmetric(4, 9);
        assert!(lowest_eigenpairs(&Dense(a.clone()), 0, &LanczosOptions::default()).is_err());
        assert!(lowest_eigenpairs(&Dense(a), 5, &LanczosOptions::default()).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let a = random_symmetric(400, 4);
        let opts = LanczosOptions { max_basis: 6, max_restarts: 1, tol: 1e-14, ..Default::default() };
        assert!(matches!(
            lowest_eigenpairs(&Dense(a), 2, &opts),
            Err(Error::ConvergenceFailure { .. })
        ));
    }
}
