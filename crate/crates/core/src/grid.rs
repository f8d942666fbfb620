//! Half-line grids, sampled mode fields and finite-difference stencils.

use crate::error::{Error, Result, Warning};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Nodes on `[0, z_max]` with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    uniform: bool,
}

impl HalfLineGrid {
    pub fn uniform(z_max: f64, n_nodes: usize) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::GridTooSmall { min: 3, got: n_nodes });
        }
        if !(z_max.is_finite() && z_max > 0.0) {
            return Err(Error::InvalidGrid(format!("z_max must be positive, got {z_max}")));
        }
        let h = z_max / (n_nodes - 1) as f64;
        let nodes: Vec<f64> = (0..n_nodes).map(|i| i as f64 * h).collect();
        let weights = if n_nodes % 2 == 1 {
            simpson_weights(n_nodes, h)
        } else {
            trapezoid_weights(&nodes)
        };
        Ok(HalfLineGrid { nodes, weights, uniform: true })
    }

    /// Arbitrary strictly increasing nodes starting at 0; trapezoid weights.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::GridTooSmall { min: 3, got: nodes.len() });
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid("first node must be 0".into()));
        }
        if nodes.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid("nodes must be finite and strictly increasing".into()));
        }
        let weights = trapezoid_weights(&nodes);
        Ok(HalfLineGrid { nodes, weights, uniform: false })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn z_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Spacing of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        self.uniform.then(|| self.nodes[1] - self.nodes[0])
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(&self.nodes)
    }

    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Every other node; `None` when the node count is even.
    pub fn coarsen(&self) -> Option<HalfLineGrid> {
        if self.len() % 2 == 0 || self.len() < 5 {
            return None;
        }
        let nodes: Vec<f64> = self.nodes.iter().step_by(2).copied().collect();
        if self.uniform {
            HalfLineGrid::uniform(self.z_max(), nodes.len()).ok()
        } else {
            HalfLineGrid::from_nodes(nodes).ok()
        }
    }

    /// Uniform grid with twice the resolution (same end point).
    pub fn refine(&self) -> Result<HalfLineGrid> {
        HalfLineGrid::uniform(self.z_max(), 2 * self.len() - 1)
    }

    /// Index `j` with `nodes[j] <= z < nodes[j+1]`, clamped.
    fn bracket(&self, z: f64) -> usize {
        let n = self.len();
        if self.uniform {
            let h = self.nodes[1];
            ((z / h).floor().max(0.0) as usize).min(n - 2)
        } else {
            match self.nodes.partition_point(|&x| x <= z) {
                0 => 0,
                p => (p - 1).min(n - 2),
            }
        }
    }
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == n - 1 {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
    }
    w
}

fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Complex vector field sampled on a grid, one row per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeField {
    pub grid: Arc<HalfLineGrid>,
    pub components: Vec<Vec<Complex64>>,
}

impl ModeField {
    pub fn new(grid: Arc<HalfLineGrid>, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ShapeMismatch("no components".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch(format!(
                    "component {i} has {} samples, grid has {}",
                    c.len(),
                    grid.len()
                )));
            }
        }
        Ok(ModeField { grid, components })
    }

    pub fn zeros(grid: Arc<HalfLineGrid>, n_components: usize) -> Self {
        let n = grid.len();
        ModeField { grid, components: vec![vec![Complex64::new(0.0, 0.0); n]; n_components] }
    }

    pub fn from_fn<F>(grid: Arc<HalfLineGrid>, n_components: usize, f: F) -> Self
    where
        F: Fn(usize, f64) -> Complex64,
    {
        let components = (0..n_components)
            .map(|c| grid.nodes().iter().map(|&z| f(c, z)).collect())
            .collect();
        ModeField { grid, components }
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.components[i]
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.weights();
        self.components
            .iter()
            .map(|c| c.iter().zip(w).map(|(v, wi)| v.norm_sqr() * wi).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Linear interpolation of component `c` at `z` (zero beyond the grid).
    pub fn interpolate(&self, c: usize, z: f64) -> Complex64 {
        let g = &self.grid;
        if z > g.z_max() || z < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let j = g.bracket(z);
        let (z0, z1) = (g.nodes()[j], g.nodes()[j + 1]);
        let s = (z - z0) / (z1 - z0);
        let v = &self.components[c];
        v[j] * (1.0 - s) + v[j + 1] * s
    }

    /// Flags slow decay: tail magnitude above `1e-10` of the field maximum.
    pub fn truncation_warning(&self) -> Option<Warning> {
        let max = self.max_abs();
        if max == 0.0 {
            return None;
        }
        let tail = self
            .components
            .iter()
            .map(|c| c.last().map_or(0.0, |v| v.norm()))
            .fold(0.0, f64::max);
        let rel = tail / max;
        (rel > 1e-10).then_some(Warning::Truncation { relative_tail: rel })
    }

    pub fn sub(&self, other: &ModeField) -> Result<ModeField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ModeField) -> Result<ModeField> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &ModeField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<ModeField> {
        if self.grid.len() != other.grid.len() || self.n_components() != other.n_components() {
            return Err(Error::ShapeMismatch("fields differ in shape".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        Ok(ModeField { grid: self.grid.clone(), components })
    }
}

/// Finite-difference weights for the `m`-th derivative at `x0` (Fornberg's algorithm).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Stencil index window for node `i`: centred where possible, one-sided at the ends.
fn window(i: usize, n: usize, width: usize) -> std::ops::Range<usize> {
    let half = width / 2;
    let start = i.saturating_sub(half).min(n - width);
    start..start + width
}

fn derivative_stencil(grid: &HalfLineGrid, f: &[Complex64], m: usize, interior: usize, edge: usize) -> Vec<Complex64> {
    let x = grid.nodes();
    let n = x.len();
    let half = interior / 2;
    (0..n)
        .map(|i| {
            let width = if i >= half && i + half < n { interior } else { edge };
            let win = window(i, n, width);
            let w = fd_weights(x[i], &x[win.clone()], m);
            win.zip(w).map(|(j, wj)| f[j] * wj).sum()
        })
        .collect()
}

/// `m`-th derivative of samples; second order accurate for `m <= 2`.
pub fn derivative(grid: &HalfLineGrid, f: &[Complex64], m: usize) -> Vec<Complex64> {
    derivative_stencil(grid, f, m, 3, m + 2)
}

/// Fourth-order accurate `m`-th derivative (`m <= 2`).
pub fn derivative_fourth_order(grid: &HalfLineGrid, f: &[Complex64], m: usize) -> Vec<Complex64> {
    derivative_stencil(grid, f, m, 5, m + 4)
}

pub fn first_derivative(grid: &HalfLineGrid, f: &[Complex64]) -> Vec<Complex64> {
    derivative(grid, f, 1)
}

/// `nu (-|xi|^2 + d^2/dz^2)` applied to every component.
pub fn apply_delta_xi(field: &ModeField, nu: f64, k2: f64) -> ModeField {
    let components = field
        .components
        .iter()
        .map(|c| {
            derivative(&field.grid, c, 2)
                .into_iter()
                .zip(c)
                .map(|(d2, v)| (d2 - v * k2) * nu)
                .collect()
        })
        .collect();
    ModeField { grid: field.grid.clone(), components }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let g = HalfLineGrid::uniform(2.0, 5).unwrap();
        let f: Vec<_> = g.nodes().iter().map(|&z| c(z * z * z)).collect();
        assert!((g.integrate(&f).re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_nodes() {
        assert!(matches!(HalfLineGrid::uniform(1.0, 2), Err(Error::GridTooSmall { .. })));
        assert!(HalfLineGrid::from_nodes(vec![0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn fornberg_centred_second_derivative() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = fd_weights(0.0, &[0.0, 1.0, 2.0], 1);
        assert!((w[0] + 1.5).abs() < 1e-15 && (w[1] - 2.0).abs() < 1e-15 && (w[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_xi_of_exponential_is_second_order() {
        // (-1 + d^2) e^{-2z} = 3 e^{-2z}
        let mut errs = vec![];
        for n in [201, 401, 801] {
            let g = Arc::new(HalfLineGrid::uniform(5.0, n).unwrap());
            let f = ModeField::from_fn(g.clone(), 1, |_, z| c((-2.0 * z).exp()));
            let d = apply_delta_xi(&f, 1.0, 1.0);
            let err = g
                .nodes()
                .iter()
                .zip(d.component(0))
                .map(|(&z, v)| (v - c(3.0 * (-2.0 * z).exp())).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
        }
    }

    #[test]
    fn nonuniform_first_derivative() {
        let nodes: Vec<f64> = (0..200).map(|i| (i as f64 / 199.0).powi(2) * 4.0).collect();
        let g = HalfLineGrid::from_nodes(nodes).unwrap();
        let f: Vec<_> = g.nodes().iter().map(|&z| c(z.sin())).collect();
        let d = first_derivative(&g, &f);
        for (z, v) in g.nodes().iter().zip(&d) {
            assert!((v.re - z.cos()).abs() < 2e-3);
        }
    }

    #[test]
    fn interpolation_and_coarsening() {
        let g = Arc::new(HalfLineGrid::uniform(4.0, 9).unwrap());
        let f = ModeField::from_fn(g.clone(), 1, |_, z| c(2.0 * z + 1.0));
        assert!((f.interpolate(0, 1.25).re - 3.5).abs() < 1e-14);
        assert_eq!(f.interpolate(0, 5.0).re, 0.0);
        let cg = g.coarsen().unwrap();
        assert_eq!(cg.len(), 5);
        assert_eq!(cg.nodes()[1], 1.0);
    }
}
