//! Monte-Carlo check of the steady-state covariance.
//!
//! The augmented linear SDE dX = A X dt + B dW is stepped with its exact
//! discrete propagator: X ← Φ X + L z, Φ = e^{A dt}, L Lᵀ = ∫₀^dt e^{As} D e^{Aᵀs} ds,
//! both from one Van Loan exponential.

use nalgebra::{Matrix4, SMatrix, Vector5};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::{LinearizedSystem, Mat5};

/// Largest permitted dt·(fastest rate).
pub const MAX_STEP_FRACTION: f64 = 0.05;
/// Time blocks per trajectory used for the jackknife.
pub const BLOCKS_PER_TRAJECTORY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Step, s.
    pub dt: f64,
    /// Averaging window after burn-in, s.
    pub duration: f64,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Discarded transient, s.
    pub burn_in: f64,
}

/// Slowest and fastest decay rates of the augmented drift, rad/s.
pub fn decay_rates(lin: &LinearizedSystem) -> (f64, f64) {
    let ev = lin.drift().complex_eigenvalues();
    let slow = ev.iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
    (slow, lin.fastest_rate())
}

impl SimConfig {
    /// dt = 0.01/(fastest rate), burn-in of 10 and averaging over
    /// `windows` slowest decay times.
    pub fn for_system(lin: &LinearizedSystem, windows: f64, n_trajectories: usize, seed: u64) -> Result<Self> {
        let (slow, fast) = decay_rates(lin);
        if !(slow > 0.0) {
            return Err(Error::Unstable("drift has a non-decaying mode".into()));
        }
        Ok(Self {
            dt: 0.01 / fast,
            duration: windows / slow,
            n_trajectories,
            seed,
            burn_in: 10.0 / slow,
        })
    }

    pub fn validate(&self, lin: &LinearizedSystem) -> Result<()> {
        let (slow, fast) = decay_rates(lin);
        if !(self.dt > 0.0) || self.dt * fast >= MAX_STEP_FRACTION {
            return Err(Error::Config(format!(
                "dt·(fastest rate) = {} must lie in (0, {MAX_STEP_FRACTION})",
                self.dt * fast
            )));
        }
        if self.n_trajectories == 0 {
            return Err(Error::Config("n_trajectories must be at least 1".into()));
        }
        if slow > 0.0 && !(self.duration > 10.0 / slow) {
            return Err(Error::Config(format!(
                "duration {} s shorter than 10 slowest decay times ({} s)",
                self.duration,
                10.0 / slow
            )));
        }
        if !(self.burn_in >= 0.0) {
            return Err(Error::Config("burn_in must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub v: CovarianceMatrix,
    /// Jackknife standard errors of each entry.
    pub stderr: Matrix4<f64>,
    pub samples: usize,
}

impl OracleEstimate {
    /// (V_sim − V_ref)/σ for each entry.
    pub fn z_scores(&self, reference: &CovarianceMatrix) -> Matrix4<f64> {
        (self.v.v - reference.v).component_div(&self.stderr)
    }

    /// Largest |z| over the ten independent entries.
    pub fn max_abs_z(&self, reference: &CovarianceMatrix) -> f64 {
        let z = self.z_scores(reference);
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in i..4 {
                m = m.max(z[(i, j)].abs());
            }
        }
        m
    }
}

/// Exact one-step propagator and noise factor in ω_m-scaled units.
fn discretize(lin: &LinearizedSystem, dt: f64) -> (Mat5, Mat5) {
    let a = lin.drift();
    let d = lin.state_diffusion();
    let mut m = SMatrix::<f64, 10, 10>::zeros();
    m.fixed_view_mut::<5, 5>(0, 0).copy_from(&(-a * dt));
    m.fixed_view_mut::<5, 5>(0, 5).copy_from(&(d * dt));
    m.fixed_view_mut::<5, 5>(5, 5).copy_from(&(a.transpose() * dt));
    let e = m.exp();
    let phi = e.fixed_view::<5, 5>(5, 5).transpose();
    let q = phi * e.fixed_view::<5, 5>(0, 5);
    let q = 0.5 * (q + q.transpose());
    let eig = q.symmetric_eigen();
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    (phi, eig.eigenvectors * Mat5::from_diagonal(&root))
}

/// Per-block sums of X Xᵀ over the 4×4 projection.
fn run_trajectory(
    phi: &Mat5,
    chol: &Mat5,
    burn: usize,
    steps: usize,
    seed: u64,
    stream: u64,
    bound: f64,
) -> Result<Vec<Matrix4<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut x = Vector5::zeros();
    let mut z = Vector5::zeros();
    let block_len = steps / BLOCKS_PER_TRAJECTORY;
    let mut blocks = Vec::with_capacity(BLOCKS_PER_TRAJECTORY);
    let mut acc = Matrix4::zeros();
    for k in 0..burn + block_len * BLOCKS_PER_TRAJECTORY {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        x = phi * x + chol * z;
        if k >= burn {
            let u = x.fixed_rows::<4>(0);
            acc += u * u.transpose();
            if (k - burn + 1).is_multiple_of(block_len) {
                blocks.push(acc / block_len as f64);
                acc = Matrix4::zeros();
            }
        }
        if k % 1024 == 0 && !(x.norm_squared() < bound) {
            return Err(Error::numeric("instability detected: trajectory diverged", x.norm()));
        }
    }
    Ok(blocks)
}

/// Time- and ensemble-averaged second moments with jackknife errors.
pub fn simulate_covariance(lin: &LinearizedSystem, cfg: &SimConfig) -> Result<OracleEstimate> {
    cfg.validate(lin)?;
    let s = lin.scaled();
    let w = lin.omega_m;
    let dt = cfg.dt * w;
    let burn = (cfg.burn_in * w / dt).ceil() as usize;
    let steps = ((cfg.duration * w / dt).ceil() as usize).max(BLOCKS_PER_TRAJECTORY);
    let (phi, chol) = discretize(&s, dt);
    let bound = 1e12 * (1.0 + s.nbar);
    let per_traj: Vec<Result<Vec<Matrix4<f64>>>> = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|i| run_trajectory(&phi, &chol, burn, steps, cfg.seed, i, bound))
        .collect();
    let mut blocks = Vec::new();
    for r in per_traj {
        blocks.extend(r?);
    }
    let n = blocks.len() as f64;
    let total: Matrix4<f64> = blocks.iter().sum();
    let mean = total / n;
    let mut var = Matrix4::zeros();
    for b in &blocks {
        let loo = (total - b) / (n - 1.0);
        var += (loo - mean).component_mul(&(loo - mean));
    }
    let stderr = (var * ((n - 1.0) / n)).map(f64::sqrt);
    let mean = 0.5 * (mean + mean.transpose());
    Ok(OracleEstimate {
        v: CovarianceMatrix { v: mean },
        stderr,
        samples: blocks.len() * (steps / BLOCKS_PER_TRAJECTORY),
    })
}
