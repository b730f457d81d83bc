//! Periodic transverse-field Ising chain
//! `H = -sum_i X_i X_{i+1} - h sum_i Z_i` with `X_{n+1} = X_1`.
//!
//! `H` commutes with the spin-flip parity `prod_i Z_i`, so both the dense and
//! the iterative solver work inside one parity sector at a time. Eigenvectors
//! are therefore exact parity eigenstates even when the two sectors are
//! nearly degenerate at small `h`.

use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpairs, LanczosOptions, LinearOperator};
use crate::measure::entanglement_value;
use crate::state::PureState;

pub const MAX_CHAIN: usize = 12;
/// Largest chain solved with dense diagonalization by default.
pub const DENSE_LIMIT: usize = 10;
/// Gap below which the ground level is flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    n: usize,
    h: f64,
}

impl IsingParams {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadArity { n, reason: "the chain needs at least 2 sites" });
        }
        if n % 2 == 1 {
            return Err(Error::OddArity { n });
        }
        if n > MAX_CHAIN {
            return Err(Error::ArityTooLarge { n, max: MAX_CHAIN });
        }
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::BadField { h });
        }
        Ok(Self { n, h })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Basis-index masks flipped by each bond term, one per site.
    fn bond_masks(&self) -> Vec<usize> {
        (0..self.n).map(|i| (1usize << i) | (1usize << ((i + 1) % self.n))).collect()
    }

    fn diagonal(&self, index: usize) -> f64 {
        // Z = +1 on |0>
        -self.h * (self.n as f64 - 2.0 * index.count_ones() as f64)
    }
}

/// Dense `2^n x 2^n` Hamiltonian in the computational basis.
pub fn build_hamiltonian(params: &IsingParams) -> DMatrix<f64> {
    let dim = 1usize << params.n;
    let mut h = DMatrix::zeros(dim, dim);
    let bonds = params.bond_masks();
    for idx in 0..dim {
        h[(idx, idx)] += params.diagonal(idx);
        for &b in &bonds {
            h[(idx ^ b, idx)] -= 1.0;
        }
    }
    h
}

/// `H x` on the full space without storing `H`.
pub fn apply_hamiltonian(params: &IsingParams, x: &[f64], y: &mut [f64]) {
    let bonds = params.bond_masks();
    for (idx, yi) in y.iter_mut().enumerate() {
        *yi = params.diagonal(idx) * x[idx] - bonds.iter().map(|&b| x[idx ^ b]).sum::<f64>();
    }
}

/// `H` restricted to the states with `(-1)^popcount = parity`.
#[derive(Clone, Debug)]
pub struct ParitySector {
    params: IsingParams,
    parity: i8,
    states: Vec<usize>,
    position: Vec<u32>,
    bonds: Vec<usize>,
}

impl ParitySector {
    pub fn new(params: IsingParams, parity: i8) -> Self {
        let want = if parity >= 0 { 0 } else { 1 };
        let dim = 1usize << params.n;
        let states: Vec<usize> = (0..dim).filter(|i| i.count_ones() % 2 == want).collect();
        let mut position = vec![u32::MAX; dim];
        for (p, &s) in states.iter().enumerate() {
            position[s] = p as u32;
        }
        Self { params, parity: if want == 0 { 1 } else { -1 }, states, position, bonds: params.bond_masks() }
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let d = self.states.len();
        let mut m = DMatrix::zeros(d, d);
        for (p, &s) in self.states.iter().enumerate() {
            m[(p, p)] += self.params.diagonal(s);
            for &b in &self.bonds {
                m[(self.position[s ^ b] as usize, p)] -= 1.0;
            }
        }
        m
    }

    /// Embeds a sector vector into the full space.
    pub fn embed(&self, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; 1 << self.params.n];
        for (&s, &x) in self.states.iter().zip(v) {
            full[s] = x;
        }
        full
    }
}

impl LinearOperator for ParitySector {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (p, (&s, yp)) in self.states.iter().zip(y.iter_mut()).enumerate() {
            let off: f64 = self.bonds.iter().map(|&b| x[self.position[s ^ b] as usize]).sum();
            *yp = self.params.diagonal(s) * x[p] - off;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Dense up to [`DENSE_LIMIT`] sites, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

/// Lowest eigenpairs of the chain.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<PureState>,
    /// `prod Z` eigenvalue of each eigenvector.
    pub parities: Vec<i8>,
    pub residuals: Vec<f64>,
    /// Difference between the two lowest levels.
    pub gap: f64,
    pub degenerate: bool,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> &PureState {
        &self.eigenvectors[0]
    }
}

/// Lowest `k` (1 to 4) eigenpairs.
pub fn ground_state(params: &IsingParams, k: usize) -> Result<SpectrumResult> {
    ground_state_with(params, k, Solver::Auto)
}

pub fn ground_state_with(params: &IsingParams, k: usize, solver: Solver) -> Result<SpectrumResult> {
    if !(1..=4).contains(&k) {
        return Err(Error::BadEigenCount { k, max: 4 });
    }
    let use_dense = match solver {
        Solver::Auto => params.n <= DENSE_LIMIT,
        Solver::Dense => true,
        Solver::Lanczos => false,
    };
    // At least two levels are needed for the gap.
    let wanted = k.max(2);
    let mut levels: Vec<(f64, i8, Vec<f64>)> = Vec::new();
    for parity in [1i8, -1] {
        let sector = ParitySector::new(*params, parity);
        let per_sector = wanted.min(sector.dim());
        let pairs: Vec<(f64, Vec<f64>)> = if use_dense {
            let eig = SymmetricEigen::new(sector.dense());
            let mut order: Vec<usize> = (0..sector.dim()).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            order
                .into_iter()
                .take(per_sector)
                .map(|c| (eig.eigenvalues[c], eig.eigenvectors.column(c).iter().copied().collect()))
                .collect()
        } else {
            let found = lowest_eigenpairs(&sector, per_sector, &LanczosOptions::default())?;
            found.values.into_iter().zip(found.vectors).collect()
        };
        for (value, v) in pairs {
            levels.push((value, parity, sector.embed(&v)));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let gap = levels[1].0 - levels[0].0;
    levels.truncate(k);

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut parities = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut hv = vec![0.0; 1 << params.n];
    for (value, parity, mut v) in levels {
        // fix the overall sign: largest component positive
        let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        apply_hamiltonian(params, &v, &mut hv);
        let res = hv.iter().zip(&v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        let amps = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        eigenvalues.push(value);
        eigenvectors.push(PureState::new(params.n, amps)?);
        parities.push(parity);
        residuals.push(res);
    }
    Ok(SpectrumResult { eigenvalues, eigenvectors, parities, residuals, gap, degenerate: gap < DEGENERACY_GAP })
}

/// One field value of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSweepRow {
    pub h: f64,
    pub ground_energy: f64,
    pub gap: f64,
    #[serde(rename = "E")]
    pub entanglement: f64,
    #[serde(rename = "degenerate_flag")]
    pub degenerate: bool,
}

/// Inclusive grid `start, start + step, ..., <= stop`.
pub fn field_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::BadGrid("grid bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::BadGrid(format!("step must be positive, got {step}")));
    }
    if stop < start {
        return Err(Error::BadGrid(format!("stop {stop} is below start {start}")));
    }
    let steps = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| start + i as f64 * step).collect())
}

/// Ground-state energy, gap and genuine entanglement for each field value.
/// Rows come back in the order of `h_values`, which must be strictly
/// increasing and positive.
pub fn sweep(n: usize, h_values: &[f64]) -> Result<Vec<IsingSweepRow>> {
    IsingParams::new(n, 1.0)?;
    if h_values.is_empty() {
        return Err(Error::BadGrid("no field values".into()));
    }
    if let Some(&h) = h_values.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
        return Err(Error::BadField { h });
    }
    if h_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadGrid("field values must be strictly increasing".into()));
    }
    h_values
        .par_iter()
        .map(|&h| {
            let params = IsingParams::new(n, h)?;
            let spectrum = ground_state(&params, 2)?;
            Ok(IsingSweepRow {
                h,
                ground_energy: spectrum.ground_energy(),
                gap: spectrum.gap,
                entanglement: entanglement_value(spectrum.ground_state())?,
                degenerate: spectrum.degenerate,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[IsingSweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// Two whitespace-separated columns `h E`, for gnuplot overlays.
pub fn write_sweep_dat<W: Write>(n: usize, rows: &[IsingSweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# N = {n}")?;
    writeln!(out, "# h E")?;
    for row in rows {
        writeln!(out, "{} {}", row.h, row.entanglement)?;
    }
    Ok(())
}

/// Writes `ising_N{n}.csv` and `ising_N{n}.dat` into `dir`.
pub fn write_sweep_files(dir: &Path, n: usize, rows: &[IsingSweepRow]) -> std::io::Result<[PathBuf; 2]> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("ising_N{n}.csv"));
    let dat_path = dir.join(format!("ising_N{n}.dat"));
    write_sweep_csv(rows, std::io::BufWriter::new(std::fs::File::create(&csv_path)?))?;
    write_sweep_dat(n, rows, std::io::BufWriter::new(std::fs::File::create(&dat_path)?))?;
    Ok([csv_path, dat_path])
}
