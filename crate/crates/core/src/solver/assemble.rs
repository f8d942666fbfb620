//! Synthesis of physical-space samples from per-mode fields.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::duhamel::{duhamel_solve, DuhamelConfig};
use super::problem::{StokesProblem, Trajectory};
use crate::error::{Error, Result};
use crate::grid::ModeField;
use crate::spectral::FourierMode;

type C = Complex64;

/// Real samples `values[point][node] = omega(x1, x2, z_node)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSamples {
    pub points: Vec<[f64; 2]>,
    pub z: Vec<f64>,
    pub values: Vec<Vec<[f64; 3]>>,
    /// Largest discarded imaginary part.
    pub max_imaginary: f64,
}

fn check_mode_set(fields: &[(FourierMode, &ModeField)]) -> Result<()> {
    let set: BTreeSet<[i64; 2]> = fields.iter().map(|(m, _)| m.xi).collect();
    if set.len() != fields.len() {
        return Err(Error::InvalidParameter("mode set contains duplicates".into()));
    }
    if let Some(missing) = fields.iter().find(|(m, _)| !set.contains(&m.neg().xi)) {
        return Err(Error::AsymmetricModeSet(format!("({}, {}) has no partner", missing.0.xi[0], missing.0.xi[1])));
    }
    let first = fields.first().ok_or(Error::InvalidParameter("empty mode set".into()))?.1;
    for (_, f) in fields {
        if f.grid.nodes() != first.grid.nodes() || f.n_components() != first.n_components() {
            return Err(Error::ShapeMismatch("mode fields live on different grids".into()));
        }
    }
    Ok(())
}

/// `sum_xi omega_xi(z) e^{i xi . x}` at every point and grid node; fails unless the sum is real.
pub fn assemble_fields(fields: &[(FourierMode, &ModeField)], points: &[[f64; 2]]) -> Result<PhysicalSamples> {
    check_mode_set(fields)?;
    let grid = &fields[0].1.grid;
    let n = grid.len();
    let sums: Vec<(Vec<[f64; 3]>, f64, f64)> = points
        .par_iter()
        .map(|x| {
            let phases: Vec<C> = fields
                .iter()
                .map(|(m, _)| {
                    let [a, b] = m.xi_f64();
                    C::from_polar(1.0, a * x[0] + b * x[1])
                })
                .collect();
            let mut vals = vec![[0.0; 3]; n];
            let (mut imag, mut size) = (0.0f64, 0.0f64);
            for (j, v) in vals.iter_mut().enumerate() {
                for (c, vc) in v.iter_mut().enumerate() {
                    let s: C = fields.iter().zip(&phases).map(|((_, f), p)| f.components[c][j] * p).sum();
                    *vc = s.re;
                    imag = imag.max(s.im.abs());
                    size = size.max(s.re.abs());
                }
            }
            (vals, imag, size)
        })
        .collect();
    let max_imaginary = sums.iter().map(|s| s.1).fold(0.0, f64::max);
    let size = sums.iter().map(|s| s.2).fold(0.0, f64::max);
    if max_imaginary > 1e-10 * size.max(1.0) {
        return Err(Error::IncompatibleData(format!(
            "assembled field has imaginary part {max_imaginary:e}; data are not conjugate-symmetric"
        )));
    }
    Ok(PhysicalSamples {
        points: points.to_vec(),
        z: grid.nodes().to_vec(),
        values: sums.into_iter().map(|s| s.0).collect(),
        max_imaginary,
    })
}

/// Assembles state `time_index` of a set of per-mode trajectories.
pub fn assemble_3d(trajectories: &[Trajectory], time_index: usize, points: &[[f64; 2]]) -> Result<PhysicalSamples> {
    let fields: Vec<(FourierMode, &ModeField)> = trajectories
        .iter()
        .map(|t| {
            t.states
                .get(time_index)
                .map(|s| (t.mode, s))
                .ok_or(Error::InvalidParameter(format!("time index {time_index} out of range")))
        })
        .collect::<Result<_>>()?;
    assemble_fields(&fields, points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    /// Mean over `T^2` of the `z`-integrated `|omega|^2`.
    pub physical: f64,
    /// `sum_xi ||omega_xi||^2`.
    pub spectral: f64,
    pub relative_error: f64,
}

/// Compares both sides of Parseval's identity on an `m x m` torus grid.
pub fn parseval_check(fields: &[(FourierMode, &ModeField)], m: usize) -> Result<ParsevalReport> {
    let reach = fields.iter().map(|(f, _)| f.xi[0].abs().max(f.xi[1].abs())).max().unwrap_or(0) as usize;
    if m <= 2 * reach {
        return Err(Error::InvalidParameter(format!("{m} points per direction alias modes up to {reach}")));
    }
    let step = 2.0 * PI / m as f64;
    let points: Vec<[f64; 2]> = (0..m * m).map(|i| [(i / m) as f64 * step, (i % m) as f64 * step]).collect();
    let samples = assemble_fields(fields, &points)?;
    let w = fields[0].1.grid.weights();
    let physical = samples
        .values
        .iter()
        .map(|col| col.iter().zip(w).map(|(v, wi)| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * wi).sum::<f64>())
        .sum::<f64>()
        / points.len() as f64;
    let spectral: f64 = fields.iter().map(|(_, f)| f.l2_norm().powi(2)).sum();
    let relative_error = (physical - spectral).abs() / spectral.max(f64::MIN_POSITIVE);
    Ok(ParsevalReport { physical, spectral, relative_error })
}

/// Independent per-mode Duhamel solves, run in parallel.
pub fn solve_modes(problems: &[StokesProblem], times: &[f64], cfg: &DuhamelConfig) -> Result<Vec<Trajectory>> {
    problems.par_iter().map(|p| duhamel_solve(p, times, cfg)).collect()
}
