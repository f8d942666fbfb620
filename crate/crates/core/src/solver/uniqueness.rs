//! Homogeneous runs from round-off-sized data.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{crank_nicolson_run, CnConfig};
use super::problem::{SampledData, StokesProblem};
use crate::error::{Error, Result};
use crate::grid::{HalfLineGrid, ModeField};
use crate::spectral::FourierMode;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub mode: FourierMode,
    pub nu: f64,
    pub scale: f64,
    pub times: Vec<f64>,
    /// `L^2` norm of the full state.
    pub norms: Vec<f64>,
    /// `L^2` norm of `xi . omega_tau`.
    pub xi_dot_norms: Vec<f64>,
    /// Largest ratio of consecutive tangential energies over all steps.
    pub max_step_growth: f64,
}

impl UniquenessReport {
    /// No output norm exceeds the initial one.
    pub fn no_growth(&self) -> bool {
        self.norms.iter().all(|&n| n <= self.norms[0])
    }
}

/// Seeded noise with `L^2` norm `scale`, vanishing where the boundary conditions require.
pub fn noise_field(grid: &Arc<HalfLineGrid>, scale: f64, seed: u64) -> ModeField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.len();
    let components = (0..3)
        .map(|_| (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    let mut field = ModeField { grid: grid.clone(), components };
    for c in &mut field.components {
        c[n - 1] = C::new(0.0, 0.0);
    }
    field.components[2][0] = C::new(0.0, 0.0);
    let norm = field.l2_norm();
    if scale == 0.0 || norm == 0.0 {
        return ModeField::zeros(grid.clone(), 3);
    }
    for v in field.components.iter_mut().flatten() {
        *v *= scale / norm;
    }
    field
}

/// Runs the unforced system to `t = 1` from noise of size `scale`.
pub fn uniqueness_demo(mode: FourierMode, nu: f64, scale: f64, seed: u64, cfg: &CnConfig) -> Result<UniquenessReport> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidParameter(format!("noise scale must be non-negative, got {scale}")));
    }
    let grid = Arc::new(HalfLineGrid::uniform(cfg.z_max, cfg.n_nodes)?);
    let omega0 = noise_field(&grid, scale, seed);
    let data = Arc::new(SampledData::new(omega0, None, None)?);
    let problem = StokesProblem::new(mode, nu, data, 1.0)?;
    let times: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let run = crank_nicolson_run(&problem, &times, cfg)?;
    let tr = &run.trajectory;
    let w = grid.weights();
    let xi_dot_norms = (0..tr.times.len())
        .map(|i| tr.xi_dot_tangential(i).iter().zip(w).map(|(v, wi)| v.norm_sqr() * wi).sum::<f64>().sqrt())
        .collect();
    let max_step_growth = run
        .step_energy
        .windows(2)
        .filter(|p| p[0] > 0.0)
        .map(|p| p[1] / p[0])
        .fold(0.0, f64::max);
    Ok(UniquenessReport {
        mode,
        nu,
        scale,
        times: tr.times.clone(),
        norms: tr.states.iter().map(|s| s.l2_norm()).collect(),
        xi_dot_norms,
        max_step_growth,
    })
}
