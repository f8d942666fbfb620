//! Duhamel representation evaluated with the contour Green matrix.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{check_times, StokesProblem, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{HalfLineGrid, ModeField};
use crate::kernels::{scalar_residual, ContourOptions};
use crate::spectral::FourierMode;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Gaussian tails beyond this many widths are dropped.
const GAUSS_REACH: f64 = 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelConfig {
    pub z_max: f64,
    pub n_nodes: usize,
    /// Simpson panels in `sigma = sqrt(t - s)` per output time, graded towards `sigma = 0`.
    pub sigma_panels: usize,
    pub contour: ContourOptions,
}

impl Default for DuhamelConfig {
    fn default() -> Self {
        DuhamelConfig { z_max: 20.0, n_nodes: 2049, sigma_panels: 64, contour: ContourOptions::default() }
    }
}

/// Nodes and weights of composite Simpson on `[0, sqrt(t)]` with panel edges `sqrt(t) (p/P)^2`.
pub fn sigma_rule(t: f64, panels: usize) -> Vec<(f64, f64)> {
    let root = t.sqrt();
    let edge = |p: usize| root * (p as f64 / panels as f64).powi(2);
    let mut out: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for p in 0..panels {
        let (a, b) = (edge(p), edge(p + 1));
        let w = (b - a) / 6.0;
        out.last_mut().expect("non-empty").1 += w;
        out.push((0.5 * (a + b), 4.0 * w));
        out.push((b, w));
    }
    out
}

/// Solution operator data at one elapsed time `tau` on a uniform grid.
struct Propagator {
    nu: f64,
    tau: f64,
    mode: FourierMode,
    h: f64,
    decay: f64,
    /// Product-integration weights of the Gaussian per interval, indexed by offset `d + n`.
    near: Vec<f64>,
    far: Vec<f64>,
    offset: usize,
    reach: usize,
    /// `r(tau, m h)`, truncated where negligible.
    r: Vec<C>,
}

impl Propagator {
    fn new(tau: f64, nu: f64, mode: &FourierMode, grid: &HalfLineGrid, r_len: usize, opts: &ContourOptions) -> Result<Self> {
        let n = grid.len();
        let h = grid.spacing().expect("uniform grid");
        let width = 2.0 * (nu * tau).sqrt();
        let reach = ((GAUSS_REACH * width / h).ceil() as usize + 1).min(2 * n);
        let offset = n;
        let norm = 1.0 / (PI * width * width).sqrt();
        let mut near = vec![0.0; 3 * n];
        let mut far = vec![0.0; 3 * n];
        for d in -(reach.min(n) as i64)..(reach.min(2 * n - 1) as i64) {
            let (u0, u1) = (d as f64 * h / width, (d + 1) as f64 * h / width);
            let i0 = if u0 >= 0.0 {
                0.5 * (libm::erfc(u0) - libm::erfc(u1))
            } else if u1 <= 0.0 {
                0.5 * (libm::erfc(-u1) - libm::erfc(-u0))
            } else {
                0.5 * (libm::erf(u1) - libm::erf(u0))
            };
            let i1 = -0.5 * width * width * norm * ((-u1 * u1).exp() - (-u0 * u0).exp());
            let f = (i1 - d as f64 * h * i0) / h;
            let idx = (d + offset as i64) as usize;
            near[idx] = i0 - f;
            far[idx] = f;
        }
        let r = if mode.is_zero() || r_len == 0 {
            Vec::new()
        } else {
            residual_table(tau, nu, mode, h, r_len, opts)?
        };
        Ok(Propagator { nu, tau, mode: *mode, h, decay: (-nu * mode.norm2() * tau).exp(), near, far, offset, reach, r })
    }

    /// Adds `scale * int (g(y-z) + sign g(y+z)) f(z) dz` for a linear interpolant of `f`.
    fn heat(&self, f: &[C], sign: f64, scale: f64, out: &mut [C]) {
        let n = f.len();
        let s = scale * self.decay;
        let reach = self.reach as i64;
        for (i, o) in out.iter_mut().enumerate() {
            let ii = i as i64;
            let mut acc = ZERO;
            let lo = (ii - reach).max(0);
            let hi = (ii + reach).min(n as i64 - 2);
            for q in lo..=hi {
                let idx = (q - ii + self.offset as i64) as usize;
                acc += f[q as usize] * self.near[idx] + f[q as usize + 1] * self.far[idx];
            }
            let hi = (reach - ii).min(n as i64 - 2);
            for q in 0..=hi {
                let idx = (q + ii) as usize + self.offset;
                acc += (f[q as usize] * self.near[idx] + f[q as usize + 1] * self.far[idx]) * sign;
            }
            *o += acc * s;
        }
    }

    /// Adds `scale * P sum_j w_j r(y_i + z_j) f(z_j)` to the tangential pair.
    fn residual(&self, f: [&[C]; 2], w: &[f64], scale: f64, out: [&mut [C]; 2]) {
        if self.r.is_empty() {
            return;
        }
        let p = self.mode.perp_projector();
        let n = w.len();
        let [o1, o2] = out;
        for i in 0..n.min(self.r.len()) {
            let (mut s1, mut s2) = (ZERO, ZERO);
            for j in 0..n.min(self.r.len() - i) {
                let k = self.r[i + j] * w[j];
                s1 += k * f[0][j];
                s2 += k * f[1][j];
            }
            let v = p.mul_vec(&[s1, s2]);
            o1[i] += v[0] * scale;
            o2[i] += v[1] * scale;
        }
    }

    /// Adds `scale * K_tau f` to `out`.
    fn apply(&self, f: &[Vec<C>], w: &[f64], scale: f64, out: &mut [Vec<C>]) {
        let normal_sign = if self.mode.is_zero() { 1.0 } else { -1.0 };
        self.heat(&f[0], 1.0, scale, &mut out[0]);
        self.heat(&f[1], 1.0, scale, &mut out[1]);
        self.heat(&f[2], normal_sign, scale, &mut out[2]);
        let (a, b) = out.split_at_mut(1);
        self.residual([&f[0], &f[1]], w, scale, [&mut a[0], &mut b[0]]);
    }

    /// Adds `scale * G(tau, y, 0) (g, 0)` to the tangential pair.
    fn boundary(&self, g: [C; 2], scale: f64, out: &mut [Vec<C>]) {
        let width2 = 4.0 * self.nu * self.tau;
        let norm = 2.0 * self.decay / (PI * width2).sqrt();
        let p = self.mode.perp_projector();
        let pg = p.mul_vec(&g);
        for i in 0..out[0].len() {
            let y = i as f64 * self.h;
            let heat = norm * (-y * y / width2).exp();
            let r = self.r.get(i).copied().unwrap_or(ZERO);
            out[0][i] += (g[0] * heat + pg[0] * r) * scale;
            out[1][i] += (g[1] * heat + pg[1] * r) * scale;
        }
    }
}

/// `r(tau, m h)` for `m < len`, stopping where the residual profile is negligible.
fn residual_table(tau: f64, nu: f64, mode: &FourierMode, h: f64, len: usize, opts: &ContourOptions) -> Result<Vec<C>> {
    let k = mode.norm();
    let root = (nu * tau).sqrt();
    let negligible = |s: f64| s / (2.0 * root) - k * root > 6.5 || (2.0 / k) * (-k * s).exp() < 1e-18;
    let len = (0..len).find(|&m| negligible(m as f64 * h)).unwrap_or(len);
    (0..len)
        .into_par_iter()
        .map(|m| Ok(scalar_residual(tau, nu, mode.norm2(), m as f64 * h, k, k, opts)?.total(0)))
        .collect()
}

fn check_grid(cfg: &DuhamelConfig) -> Result<Arc<HalfLineGrid>> {
    if cfg.sigma_panels == 0 {
        return Err(Error::InvalidParameter("need at least one sigma panel".into()));
    }
    Ok(Arc::new(HalfLineGrid::uniform(cfg.z_max, cfg.n_nodes)?))
}

/// Evaluates the Duhamel formula at the requested times (a `t = 0` state is always included).
pub fn duhamel_solve(problem: &StokesProblem, times: &[f64], cfg: &DuhamelConfig) -> Result<Trajectory> {
    check_times(times, problem.t_final)?;
    let grid = check_grid(cfg)?;
    let (omega0, warning) = problem.sample_initial(&grid)?;
    let mut out_times = vec![0.0];
    let mut states = vec![omega0.clone()];
    for &t in times.iter().filter(|&&t| t > 0.0) {
        out_times.push(t);
        states.push(duhamel_state(problem, &omega0, t, cfg)?);
    }
    let mut warnings: Vec<_> = warning.into_iter().collect();
    warnings.extend(states.last().and_then(|s| s.truncation_warning()));
    Ok(Trajectory { mode: problem.mode, nu: problem.nu, method: "duhamel".into(), times: out_times, states, warnings })
}

fn duhamel_state(problem: &StokesProblem, omega0: &ModeField, t: f64, cfg: &DuhamelConfig) -> Result<ModeField> {
    let grid = &omega0.grid;
    let n = grid.len();
    let (nu, mode) = (problem.nu, &problem.mode);
    let w = grid.trapezoid_weights();
    let data = &problem.data;
    let (forced, bounded) = (data.has_forcing(), data.has_boundary());
    let mut out = vec![vec![ZERO; n]; 3];

    let initial = Propagator::new(t, nu, mode, grid, 2 * n - 1, &cfg.contour)?;
    initial.apply(&omega0.components, &w, 1.0, &mut out);

    if !(forced || bounded) {
        return ModeField::new(grid.clone(), out);
    }
    let r_len = if forced { 2 * n - 1 } else { n };
    for (sigma, weight) in sigma_rule(t, cfg.sigma_panels) {
        if sigma == 0.0 {
            if bounded {
                let g = data.boundary(t);
                let limit = 2.0 / (PI * nu).sqrt() * weight;
                out[0][0] += g[0] * limit;
                out[1][0] += g[1] * limit;
            }
            continue;
        }
        let tau = sigma * sigma;
        let s = t - tau;
        let scale = 2.0 * sigma * weight;
        let prop = Propagator::new(tau, nu, mode, grid, r_len, &cfg.contour)?;
        if forced {
            let f = problem.sample_forcing(s, grid);
            prop.apply(&f, &w, scale, &mut out);
        }
        if bounded {
            prop.boundary(data.boundary(s), scale, &mut out);
        }
    }
    let field = ModeField::new(grid.clone(), out)?;
    if !field.is_finite() {
        return Err(Error::QuadratureUnderresolved { estimate: f64::INFINITY, tolerance: cfg.contour.quad.rel_tol });
    }
    Ok(field)
}

/// Applies the Green matrix at elapsed time `tau` to a field on a uniform grid.
pub fn propagate(field: &ModeField, tau: f64, nu: f64, mode: &FourierMode, opts: &ContourOptions) -> Result<ModeField> {
    if !field.grid.is_uniform() || field.n_components() != 3 {
        return Err(Error::InvalidGrid("propagation needs a uniform grid and 3 components".into()));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!("elapsed time must be positive, got {tau}")));
    }
    let grid = &field.grid;
    let n = grid.len();
    let prop = Propagator::new(tau, nu, mode, grid, 2 * n - 1, opts)?;
    let mut out = vec![vec![ZERO; n]; 3];
    prop.apply(&field.components, &grid.trapezoid_weights(), 1.0, &mut out);
    ModeField::new(grid.clone(), out)
}
