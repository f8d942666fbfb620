//! Crank–Nicolson finite differences with a ghost node at the wall.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::problem::{check_times, StokesProblem, Trajectory};
use crate::error::{Error, Result, Warning};
use crate::grid::{HalfLineGrid, ModeField};
use crate::mat2::{Mat2C, Vec2C};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnConfig {
    pub z_max: f64,
    pub n_nodes: usize,
    pub dt: f64,
    /// `nu dt / h^2` above this raises a stability warning.
    pub comfort: f64,
}

impl Default for CnConfig {
    fn default() -> Self {
        CnConfig { z_max: 20.0, n_nodes: 2049, dt: 1e-3, comfort: 10.0 }
    }
}

/// `max(20, 10 sqrt(nu t_final) + support)`.
pub fn default_z_max(nu: f64, t_final: f64, support: f64) -> f64 {
    (10.0 * (nu * t_final).sqrt() + support).max(20.0)
}

/// Trajectory plus the tangential energy after every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnRun {
    pub trajectory: Trajectory,
    /// Trapezoid `L^2` norm of the tangential pair, initial state first.
    pub step_energy: Vec<f64>,
}

/// Factored block tridiagonal matrix with scalar off-diagonals.
struct BlockThomas {
    lower: Vec<C>,
    /// Inverses of the eliminated diagonal blocks.
    pivots: Vec<Mat2C>,
    /// Eliminated super-diagonal blocks.
    upper: Vec<Mat2C>,
}

impl BlockThomas {
    fn new(lower: Vec<C>, diag: Vec<Mat2C>, upper: Vec<C>) -> Result<Self> {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut up = Vec::with_capacity(n);
        for i in 0..n {
            let m = if i == 0 { diag[0] } else { diag[i] - up[i - 1] * lower[i] };
            let inv = m.inverse().ok_or(Error::InvalidParameter("singular time-step matrix".into()))?;
            up.push(if i + 1 < n { inv * upper[i] } else { Mat2C::ZERO });
            pivots.push(inv);
        }
        Ok(BlockThomas { lower, pivots, upper: up })
    }

    fn solve(&self, rhs: &mut [Vec2C]) {
        let n = rhs.len();
        let mut prev = [ZERO; 2];
        for ((x, l), p) in rhs.iter_mut().zip(&self.lower).zip(&self.pivots) {
            let r = [x[0] - l * prev[0], x[1] - l * prev[1]];
            prev = p.mul_vec(&r);
            *x = prev;
        }
        for i in (0..n - 1).rev() {
            let c = self.upper[i].mul_vec(&rhs[i + 1]);
            rhs[i] = [rhs[i][0] - c[0], rhs[i][1] - c[1]];
        }
    }
}

struct Stepper {
    n: usize,
    h: f64,
    nu: f64,
    k2: f64,
    /// Wall operator in `du/dz = -K u - g/nu`.
    wall: Mat2C,
    /// Normal component obeys a Neumann condition (zero mode only).
    normal_neumann: bool,
    dt: f64,
    tangential: BlockThomas,
    normal: BlockThomas,
}

impl Stepper {
    fn new(problem: &StokesProblem, h: f64, n: usize, dt: f64) -> Result<Self> {
        let mode = &problem.mode;
        let (nu, k2) = (problem.nu, mode.norm2());
        let wall = if mode.is_zero() { Mat2C::ZERO } else { mode.perp_projector().scale_re(1.0 / mode.norm()) };
        let normal_neumann = mode.is_zero();
        let a = nu / (h * h);
        let half = 0.5 * dt;
        let centre = C::new(1.0 + half * (2.0 * a + nu * k2), 0.0);
        let off = C::new(-half * a, 0.0);
        let m = n - 1;
        let mut diag = vec![Mat2C::IDENTITY.scale(centre); m];
        diag[0] = diag[0] - wall.scale_re(half * 2.0 * nu / h);
        let mut upper = vec![off; m];
        upper[0] = off * 2.0;
        let tangential = BlockThomas::new(vec![off; m], diag, upper)?;

        let rows = if normal_neumann { n - 1 } else { n - 2 };
        let mut upper = vec![off; rows];
        if normal_neumann {
            upper[0] = off * 2.0;
        }
        let normal = BlockThomas::new(vec![off; rows], vec![Mat2C::IDENTITY.scale(centre); rows], upper)?;
        Ok(Stepper { n, h, nu, k2, wall, normal_neumann, dt, tangential, normal })
    }

    /// Tangential `L u` without the boundary datum.
    fn apply_tangential(&self, u: &[Vec2C]) -> Vec<Vec2C> {
        let a = self.nu / (self.h * self.h);
        let m = u.len();
        let at = |i: usize| if i < m { u[i] } else { [ZERO; 2] };
        (0..m)
            .map(|i| {
                let (lo, hi) = if i == 0 { (at(1), at(1)) } else { (at(i - 1), at(i + 1)) };
                let mut v = [0, 1].map(|c| (lo[c] + hi[c] - u[i][c] * 2.0) * a - u[i][c] * (self.nu * self.k2));
                if i == 0 {
                    let ku = self.wall.mul_vec(&u[0]);
                    v = [0, 1].map(|c| v[c] + ku[c] * (2.0 * self.nu / self.h));
                }
                v
            })
            .collect()
    }

    /// Normal `L u` on the unknowns (nodes `1..n-1`, or `0..n-1` with a Neumann wall).
    fn apply_normal(&self, u: &[C]) -> Vec<C> {
        let a = self.nu / (self.h * self.h);
        let m = u.len();
        let at = |i: usize| if i < m { u[i] } else { ZERO };
        (0..m)
            .map(|i| {
                let lo = match (i, self.normal_neumann) {
                    (0, true) => at(1),
                    (0, false) => ZERO,
                    _ => u[i - 1],
                };
                (lo + at(i + 1) - u[i] * 2.0) * a - u[i] * (self.nu * self.k2)
            })
            .collect()
    }

    /// Tangential and normal sources at time `t`.
    fn sources(&self, problem: &StokesProblem, grid: &HalfLineGrid, t: f64) -> (Vec<Vec2C>, Vec<C>) {
        let data = &problem.data;
        let m = self.n - 1;
        let mut tan = vec![[ZERO; 2]; m];
        let mut nor = vec![ZERO; m];
        if data.has_forcing() {
            for i in 0..m {
                let f = data.forcing(t, grid.nodes()[i]);
                tan[i] = [f[0], f[1]];
                nor[i] = f[2];
            }
        }
        if data.has_boundary() {
            let g = data.boundary(t);
            tan[0] = [tan[0][0] + g[0] * (2.0 / self.h), tan[0][1] + g[1] * (2.0 / self.h)];
        }
        let first = usize::from(!self.normal_neumann);
        (tan, nor[first..].to_vec())
    }

    fn step(&self, tan: &mut [Vec2C], nor: &mut [C], src0: &(Vec<Vec2C>, Vec<C>), src1: &(Vec<Vec2C>, Vec<C>)) {
        let half = 0.5 * self.dt;
        let lt = self.apply_tangential(tan);
        for i in 0..tan.len() {
            for c in 0..2 {
                tan[i][c] += (lt[i][c] + src0.0[i][c] + src1.0[i][c]) * half;
            }
        }
        self.tangential.solve(tan);
        let ln = self.apply_normal(nor);
        for i in 0..nor.len() {
            nor[i] += (ln[i] + src0.1[i] + src1.1[i]) * half;
        }
        let mut pairs: Vec<Vec2C> = nor.iter().map(|v| [*v, ZERO]).collect();
        self.normal.solve(&mut pairs);
        for (v, p) in nor.iter_mut().zip(pairs) {
            *v = p[0];
        }
    }

    fn energy(&self, tan: &[Vec2C]) -> f64 {
        tan.iter()
            .enumerate()
            .map(|(i, v)| (v[0].norm_sqr() + v[1].norm_sqr()) * if i == 0 { 0.5 * self.h } else { self.h })
            .sum::<f64>()
            .sqrt()
    }

    fn state(&self, grid: &Arc<HalfLineGrid>, tan: &[Vec2C], nor: &[C]) -> Result<ModeField> {
        let mut comps = vec![vec![ZERO; self.n]; 3];
        for (i, v) in tan.iter().enumerate() {
            comps[0][i] = v[0];
            comps[1][i] = v[1];
        }
        let first = usize::from(!self.normal_neumann);
        for (i, v) in nor.iter().enumerate() {
            comps[2][i + first] = *v;
        }
        ModeField::new(grid.clone(), comps)
    }
}

/// Reference solution on a uniform grid; the far node is held at zero.
pub fn crank_nicolson_oracle(problem: &StokesProblem, times: &[f64], cfg: &CnConfig) -> Result<Trajectory> {
    Ok(crank_nicolson_run(problem, times, cfg)?.trajectory)
}

pub fn crank_nicolson_run(problem: &StokesProblem, times: &[f64], cfg: &CnConfig) -> Result<CnRun> {
    check_times(times, problem.t_final)?;
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {}", cfg.dt)));
    }
    if cfg.n_nodes < 4 {
        return Err(Error::GridTooSmall { min: 4, got: cfg.n_nodes });
    }
    let grid = Arc::new(HalfLineGrid::uniform(cfg.z_max, cfg.n_nodes)?);
    let (h, n) = (grid.spacing().expect("uniform"), grid.len());
    let (omega0, correction) = problem.sample_initial(&grid)?;
    let mut warnings: Vec<Warning> = correction.into_iter().collect();
    let ratio = problem.nu * cfg.dt / (h * h);
    if ratio > cfg.comfort {
        warnings.push(Warning::Stability { ratio, comfort: cfg.comfort });
    }

    let mut stepper = Stepper::new(problem, h, n, cfg.dt)?;
    let mut tan: Vec<Vec2C> = (0..n - 1).map(|i| [omega0.components[0][i], omega0.components[1][i]]).collect();
    let first = usize::from(!stepper.normal_neumann);
    let mut nor: Vec<C> = omega0.components[2][first..n - 1].to_vec();

    let mut out_times = vec![0.0];
    let mut states = vec![stepper.state(&grid, &tan, &nor)?];
    let mut step_energy = vec![stepper.energy(&tan)];
    let mut t = 0.0;
    let mut src = stepper.sources(problem, &grid, t);
    for &target in times.iter().filter(|&&s| s > 0.0) {
        let span = target - t;
        let steps = ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        if (dt - stepper.dt).abs() > 1e-14 * dt {
            stepper = Stepper::new(problem, h, n, dt)?;
        }
        let t0 = t;
        for j in 1..=steps {
            let t1 = t0 + j as f64 * dt;
            let next = stepper.sources(problem, &grid, t1);
            stepper.step(&mut tan, &mut nor, &src, &next);
            src = next;
            step_energy.push(stepper.energy(&tan));
        }
        t = target;
        out_times.push(target);
        states.push(stepper.state(&grid, &tan, &nor)?);
    }
    warnings.extend(states.last().and_then(|s| s.truncation_warning()));
    let trajectory =
        Trajectory { mode: problem.mode, nu: problem.nu, method: "crank-nicolson".into(), times: out_times, states, warnings };
    Ok(CnRun { trajectory, step_energy })
}
