//! Per-mode Biot-Savart operator: Dirichlet/Neumann inverses, curl, trace identities
//! and the boundary source operator.

use crate::error::{Error, Result};
use crate::expkernel::image_kernel_apply;
use crate::grid::{derivative_fourth_order, first_derivative, HalfLineGrid, ModeField};
use crate::spectral::FourierMode;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

fn nonzero(mode: &FourierMode) -> Result<f64> {
    if mode.is_zero() {
        Err(Error::ZeroModeUnsupported)
    } else {
        Ok(mode.norm())
    }
}

fn inverse(f: &[C], grid: &HalfLineGrid, k: f64, sign: f64) -> Vec<C> {
    let (v, _, _) = image_kernel_apply(grid, f, C::new(k, 0.0), sign);
    v.into_iter().map(|x| x / (2.0 * k)).collect()
}

/// Solves `(|xi|^2 - d^2/dz^2) h = f`, `h(0) = 0`, decaying.
pub fn dirichlet_inverse(f: &[C], mode: &FourierMode, grid: &HalfLineGrid) -> Result<Vec<C>> {
    let k = nonzero(mode)?;
    Ok(inverse(f, grid, k, -1.0))
}

/// Solves `(|xi|^2 - d^2/dz^2) h = f`, `h'(0) = 0`, decaying.
pub fn neumann_inverse(f: &[C], mode: &FourierMode, grid: &HalfLineGrid) -> Result<Vec<C>> {
    let k = nonzero(mode)?;
    Ok(inverse(f, grid, k, 1.0))
}

fn check_three(f: &ModeField) -> Result<()> {
    if f.n_components() != 3 {
        return Err(Error::ShapeMismatch(format!("expected 3 components, got {}", f.n_components())));
    }
    Ok(())
}

/// `(Dirichlet^{-1} w1, Dirichlet^{-1} w2, Neumann^{-1} w3)`.
pub fn phi(omega: &ModeField, mode: &FourierMode) -> Result<ModeField> {
    check_three(omega)?;
    let g = &omega.grid;
    Ok(ModeField {
        grid: g.clone(),
        components: vec![
            dirichlet_inverse(&omega.components[0], mode, g)?,
            dirichlet_inverse(&omega.components[1], mode, g)?,
            neumann_inverse(&omega.components[2], mode, g)?,
        ],
    })
}

/// `(i xi2 W3 - W2', W1' - i xi1 W3, i xi1 W2 - i xi2 W1)`.
pub fn curl_mode(w: &ModeField, mode: &FourierMode) -> Result<ModeField> {
    check_three(w)?;
    let g = &w.grid;
    let [x1, x2] = mode.xi_f64();
    let (i1, i2) = (C::new(0.0, x1), C::new(0.0, x2));
    let d1 = first_derivative(g, &w.components[0]);
    let d2 = first_derivative(g, &w.components[1]);
    let [w1, w2, w3] = [&w.components[0], &w.components[1], &w.components[2]];
    let n = g.len();
    let c0 = (0..n).map(|j| i2 * w3[j] - d2[j]).collect();
    let c1 = (0..n).map(|j| d1[j] - i1 * w3[j]).collect();
    let c2 = (0..n).map(|j| i1 * w2[j] - i2 * w1[j]).collect();
    Ok(ModeField { grid: g.clone(), components: vec![c0, c1, c2] })
}

/// `i xi1 u1 + i xi2 u2 + u3'` (fourth-order derivative).
pub fn divergence(u: &ModeField, mode: &FourierMode) -> Result<Vec<C>> {
    check_three(u)?;
    let [x1, x2] = mode.xi_f64();
    let d3 = derivative_fourth_order(&u.grid, &u.components[2], 1);
    Ok((0..u.grid.len())
        .map(|j| C::new(0.0, x1) * u.components[0][j] + C::new(0.0, x2) * u.components[1][j] + d3[j])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    /// `max |curl phi curl h - h| / max |h|`.
    pub relative_error: f64,
    pub divergence: f64,
    pub boundary_value: f64,
}

/// Relative size of the discrete divergence and wall value accepted as zero.
pub const PRECHECK_TOL: f64 = 1e-6;

/// Checks `curl phi curl h = h` for solenoidal `h` vanishing on the wall.
pub fn check_biot_savart_roundtrip(h: &ModeField, mode: &FourierMode) -> Result<RoundtripReport> {
    check_three(h)?;
    nonzero(mode)?;
    let scale = h.max_abs();
    if scale == 0.0 {
        return Ok(RoundtripReport { relative_error: 0.0, divergence: 0.0, boundary_value: 0.0 });
    }
    let div = divergence(h, mode)?.iter().fold(0.0f64, |a, v| a.max(v.norm())) / scale;
    let wall = h.components.iter().map(|c| c[0].norm()).fold(0.0, f64::max) / scale;
    if div > PRECHECK_TOL || wall > PRECHECK_TOL {
        return Err(Error::HypothesisViolated(format!(
            "field must be solenoidal and vanish on the wall (div {div:e}, wall {wall:e})"
        )));
    }
    let back = curl_mode(&phi(&curl_mode(h, mode)?, mode)?, mode)?;
    let err = back.sub(h)?.max_abs() / scale;
    Ok(RoundtripReport { relative_error: err, divergence: div, boundary_value: wall })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceIdentityReport {
    /// `|trace d/dz Dirichlet^{-1} Delta f - f'(0) - |xi| f(0)|`.
    pub dirichlet_error: f64,
    /// `|trace Neumann^{-1} Delta f - f(0) - f'(0) / |xi||`.
    pub neumann_error: f64,
}

/// `int_0^Z e^{-|xi| z} f(z) dz` with the grid's weights.
fn exp_moment(f: &[C], grid: &HalfLineGrid, k: f64) -> C {
    f.iter()
        .zip(grid.nodes().iter().zip(grid.weights()))
        .map(|(v, (z, w))| v * ((-k * z).exp() * w))
        .sum()
}

/// Residuals of the two trace identities for a smooth decaying scalar `f`.
///
/// Both traces reduce to the moment `int e^{-|xi| z} (|xi|^2 - d^2) f dz`.
pub fn check_trace_identities(f: &[C], mode: &FourierMode, grid: &HalfLineGrid) -> Result<TraceIdentityReport> {
    let k = nonzero(mode)?;
    if f.len() != grid.len() {
        return Err(Error::ShapeMismatch("field does not match grid".into()));
    }
    let d2 = derivative_fourth_order(grid, f, 2);
    let d1 = derivative_fourth_order(grid, f, 1);
    let lap: Vec<C> = f.iter().zip(&d2).map(|(v, d)| v * (k * k) - d).collect();
    let m = exp_moment(&lap, grid, k);
    let (f0, df0) = (f[0], d1[0]);
    Ok(TraceIdentityReport {
        dirichlet_error: (m - df0 - f0 * k).norm(),
        neumann_error: (m / k - f0 - df0 / k).norm(),
    })
}

/// Tangential boundary source `trace(d/dz Dirichlet^{-1} g_tau + i xi Neumann^{-1} g3)`.
pub fn boundary_source_k(g: &ModeField, mode: &FourierMode) -> Result<[C; 2]> {
    check_three(g)?;
    let k = nonzero(mode)?;
    let grid = &g.grid;
    let m1 = exp_moment(&g.components[0], grid, k);
    let m2 = exp_moment(&g.components[1], grid, k);
    let n3 = exp_moment(&g.components[2], grid, k) / k;
    let [x1, x2] = mode.xi_f64();
    Ok([m1 + C::new(0.0, x1) * n3, m2 + C::new(0.0, x2) * n3])
}
