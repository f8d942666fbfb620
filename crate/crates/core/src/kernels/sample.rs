//! Green matrix samples on a `(y, z)` grid.

use super::contour::{ContourOptions, Regime};
use super::heat::heat_kernel_neumann;
use super::residual::{residual_kernel, residual_kernel_general};
use crate::error::Result;
use crate::io::CsvTable;
use crate::mat2::Mat2C;
use crate::resolvent::BoundaryOperatorD;
use crate::spectral::FourierMode;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub t: f64,
    pub nu: f64,
    pub mode: FourierMode,
    pub y: f64,
    pub z: f64,
    /// Scalar heat part (multiplies the identity).
    pub heat: f64,
    pub r1: Mat2C,
    pub r2: Mat2C,
    /// `heat I + r1 + r2`.
    pub value: Mat2C,
}

/// Samples over all pairs of `ys` and `zs`; the residual part is evaluated once per
/// distinct `y + z`.
pub fn sample_kernel_grid(
    t: f64,
    nu: f64,
    mode: &FourierMode,
    ys: &[f64],
    zs: &[f64],
    opts: &ContourOptions,
) -> Result<Vec<KernelSample>> {
    sample_with(t, nu, mode, ys, zs, |s| {
        if mode.is_zero() {
            Ok((Mat2C::ZERO, Mat2C::ZERO))
        } else {
            residual_kernel(t, nu, mode, s, 0, opts).map(|p| (p.r1.value(), p.r2.value()))
        }
    })
}

/// As [`sample_kernel_grid`] for the boundary condition `du(0) = -D u(0)`.
pub fn sample_general_kernel_grid(
    t: f64,
    nu: f64,
    mode: &FourierMode,
    d: &BoundaryOperatorD,
    ys: &[f64],
    zs: &[f64],
    opts: &ContourOptions,
) -> Result<Vec<KernelSample>> {
    sample_with(t, nu, mode, ys, zs, |s| {
        residual_kernel_general(t, nu, mode, d, s, 0, opts).map(|p| (p.r1.value(), p.r2.value()))
    })
}

fn sample_with<F>(t: f64, nu: f64, mode: &FourierMode, ys: &[f64], zs: &[f64], residual: F) -> Result<Vec<KernelSample>>
where
    F: Fn(f64) -> Result<(Mat2C, Mat2C)> + Sync,
{
    let mut sums: Vec<f64> = ys.iter().flat_map(|y| zs.iter().map(move |z| y + z)).collect();
    sums.sort_by(f64::total_cmp);
    sums.dedup();
    let parts: Vec<(Mat2C, Mat2C)> = sums.par_iter().map(|&s| residual(s)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(ys.len() * zs.len());
    for &y in ys {
        for &z in zs {
            let idx = sums.binary_search_by(|v| v.total_cmp(&(y + z))).expect("sum present");
            let (r1, r2) = parts[idx];
            let heat = heat_kernel_neumann(t, nu, mode, y, z)?;
            out.push(KernelSample {
                t,
                nu,
                mode: *mode,
                y,
                z,
                heat,
                r1,
                r2,
                value: Mat2C::IDENTITY.scale_re(heat) + r1 + r2,
            });
        }
    }
    Ok(out)
}

const ENTRIES: [&str; 4] = ["11", "12", "21", "22"];

/// CSV with columns `t, y, z, entry_ij_re/im, heat, r1_ij_re/im, r2_ij_re/im`.
pub fn kernel_csv(samples: &[KernelSample], opts: &ContourOptions) -> CsvTable {
    let mut cols = vec!["t".to_string(), "y".into(), "z".into()];
    for prefix in ["entry", "r1", "r2"] {
        for e in ENTRIES {
            cols.push(format!("{prefix}_{e}_re"));
            cols.push(format!("{prefix}_{e}_im"));
        }
        if prefix == "entry" {
            cols.push("heat".into());
        }
    }
    let mut table = CsvTable::new(&cols);
    if let Some(s) = samples.first() {
        let regime = if s.nu * s.mode.norm2() <= 1.0 { Regime::LowFrequency } else { Regime::HighFrequency };
        let contour = match regime {
            Regime::LowFrequency => "arc+rays arc_radius=max(c,pole)+max(1/t,nu|xi|^2/2)-c",
            Regime::HighFrequency => "parabola theta=1/2_if_a/root_in_[1/2,3/2] residue_when_theta*a<root root=pole_of_mu",
        };
        table.provenance(format!(
            "kernel=heat_neumann_closed_form+residual_inverse_laplace t={} nu={} xi=({},{}) regime={regime:?}",
            s.t, s.nu, s.mode.xi[0], s.mode.xi[1]
        ));
        table.provenance(format!(
            "contour={contour} rel_tol={:e} truncation={:e}",
            opts.quad.rel_tol, opts.truncation
        ));
    }
    for s in samples {
        let mut v = vec![s.t, s.y, s.z];
        let push = |v: &mut Vec<f64>, m: &Mat2C| {
            for e in m.entries() {
                v.push(e.re);
                v.push(e.im);
            }
        };
        push(&mut v, &s.value);
        v.push(s.heat);
        push(&mut v, &s.r1);
        push(&mut v, &s.r2);
        table.row(&[], &v);
    }
    table
}
