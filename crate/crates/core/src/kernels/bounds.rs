//! Empirical certificates for the upper bounds of the residual kernel parts.

use super::contour::ContourOptions;
use super::residual::scalar_residual;
use crate::error::Result;
use crate::resolvent::BoundaryOperatorD;
use crate::spectral::FourierMode;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parameter grid of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    pub nus: Vec<f64>,
    pub modes: Vec<FourierMode>,
    pub orders: Vec<usize>,
    pub times: Vec<f64>,
    /// Values of `y + z`.
    pub s_values: Vec<f64>,
    pub theta0: f64,
    /// Traces `alpha + beta` of general boundary operators, as multiples of `|xi|`.
    pub general_sigma_factors: Vec<f64>,
    pub opts: ContourOptions,
}

impl Default for BoundSweep {
    fn default() -> Self {
        BoundSweep {
            nus: vec![1.0, 0.04],
            modes: (1..=8).map(|k| FourierMode::new(k, 0)).collect(),
            orders: vec![0, 1, 2],
            times: (0..9).map(|i| 10f64.powf(-2.0 + 0.25 * i as f64)).collect(),
            s_values: (0..=40).map(|i| 0.25 * i as f64).collect(),
            theta0: 0.25,
            general_sigma_factors: vec![0.5, 1.0, 2.0],
            opts: ContourOptions::default(),
        }
    }
}

/// Suprema for one `(nu, xi, order)` and boundary operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub nu: f64,
    pub mode: FourierMode,
    pub order: usize,
    /// `None` for the vorticity condition, else `alpha + beta`.
    pub sigma: Option<f64>,
    /// `sup |d^k R1| / (mu0^{k+1} e^{-theta0 mu0 s})`.
    pub sup_r1: f64,
    /// `sup |d^k R2| (nu t)^{(k+1)/2} e^{s^2 / (4 nu t)} e^{nu |xi|^2 t / 8}`.
    pub sup_r2: f64,
    /// Natural log of the same supremum with `e^{s^2 / (nu t)}` (may be astronomically large).
    pub ln_sup_r2_full_exponent: f64,
    pub sup_r1_refined: f64,
    pub sup_r2_refined: f64,
    /// `(t, s)` where each supremum is attained.
    pub argmax_r1: (f64, f64),
    pub argmax_r2: (f64, f64),
    pub drift: f64,
}

impl BoundEntry {
    pub fn is_finite(&self) -> bool {
        self.sup_r1.is_finite() && self.sup_r2.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta0: f64,
    pub entries: Vec<BoundEntry>,
    pub max_drift: f64,
    pub all_finite: bool,
}

impl BoundReport {
    /// Finite suprema with less than 10% drift under doubled resolution.
    pub fn pass(&self) -> bool {
        self.all_finite && self.max_drift < 0.1
    }
}

/// Scale `|xi| + nu^{-1/2}` of the first-part bound.
pub fn mu0(nu: f64, mode: &FourierMode) -> f64 {
    mode.norm() + 1.0 / nu.sqrt()
}

#[derive(Clone, Copy)]
struct Sup {
    r1: f64,
    r2: f64,
    r2_full_ln: f64,
    at1: (f64, f64),
    at2: (f64, f64),
}

fn sweep_one(
    sw: &BoundSweep,
    nu: f64,
    mode: &FourierMode,
    sigma: Option<f64>,
    opts: &ContourOptions,
) -> Result<Vec<Sup>> {
    let k = mode.norm();
    let k2 = mode.norm2();
    let mu0 = mu0(nu, mode);
    let (pole, c) = match sigma {
        Some(sg) => (sg, 1.0),
        None => (k, k),
    };
    // |M| for M = P or D (Frobenius)
    let mnorm = match sigma {
        Some(sg) => sg,
        None => k2,
    };
    let growth = sigma.map_or(0.0, |sg| (nu * (sg * sg - k2)).max(0.0));
    let mut sups = vec![
        Sup { r1: 0.0, r2: 0.0, r2_full_ln: f64::NEG_INFINITY, at1: (0.0, 0.0), at2: (0.0, 0.0) };
        sw.orders.len()
    ];
    for &t in &sw.times {
        for &s in &sw.s_values {
            let sr = scalar_residual(t, nu, k2, s, pole, c, opts)?;
            for (slot, &order) in sups.iter_mut().zip(&sw.orders) {
                let ko = order as f64;
                let ln1 = (sr.r1[order].mantissa.norm() * mnorm).ln() + sr.r1[order].log_scale;
                let ln2 = (sr.r2[order].mantissa.norm() * mnorm).ln() + sr.r2[order].log_scale;
                let common = -growth * t;
                let q1 = ln1 - (ko + 1.0) * mu0.ln() + sw.theta0 * mu0 * s + common;
                let base2 = ln2 + 0.5 * (ko + 1.0) * (nu * t).ln() + nu * k2 * t / 8.0 + common;
                let q2 = base2 + s * s / (4.0 * nu * t);
                let q2full = base2 + s * s / (nu * t);
                if q1.exp() > slot.r1 {
                    slot.r1 = q1.exp();
                    slot.at1 = (t, s);
                }
                if q2.exp() > slot.r2 {
                    slot.r2 = q2.exp();
                    slot.at2 = (t, s);
                }
                slot.r2_full_ln = slot.r2_full_ln.max(q2full);
            }
        }
    }
    Ok(sups)
}

/// Evaluates the bound ratios over the sweep at the configured and at doubled
/// quadrature resolution.
pub fn verify_kernel_bounds(sw: &BoundSweep) -> Result<BoundReport> {
    let mut jobs = Vec::new();
    for &nu in &sw.nus {
        for mode in &sw.modes {
            jobs.push((nu, *mode, None));
            for &f in &sw.general_sigma_factors {
                jobs.push((nu, *mode, Some(f * mode.norm())));
            }
        }
    }
    let doubled = ContourOptions { quad: sw.opts.quad.doubled(), ..sw.opts };
    let results: Vec<Vec<BoundEntry>> = jobs
        .par_iter()
        .map(|&(nu, mode, sigma)| {
            let a = sweep_one(sw, nu, &mode, sigma, &sw.opts)?;
            let b = sweep_one(sw, nu, &mode, sigma, &doubled)?;
            Ok(sw
                .orders
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(&order, (x, y))| {
                    let rel = |p: f64, q: f64| if q > 0.0 { (p - q).abs() / q } else { (p - q).abs() };
                    BoundEntry {
                        nu,
                        mode,
                        order,
                        sigma,
                        sup_r1: x.r1,
                        sup_r2: x.r2,
                        ln_sup_r2_full_exponent: x.r2_full_ln,
                        sup_r1_refined: y.r1,
                        sup_r2_refined: y.r2,
                        argmax_r1: x.at1,
                        argmax_r2: x.at2,
                        drift: rel(x.r1, y.r1).max(rel(x.r2, y.r2)),
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let entries: Vec<BoundEntry> = results.into_iter().flatten().collect();
    let max_drift = entries.iter().map(|e| e.drift).fold(0.0, f64::max);
    let all_finite = entries.iter().all(|e| e.is_finite());
    Ok(BoundReport { theta0: sw.theta0, entries, max_drift, all_finite })
}

/// Boundary operator `alpha = beta = gamma = sigma / 2` used by the sweep.
pub fn sweep_operator(sigma: f64, mode: &FourierMode) -> Result<BoundaryOperatorD> {
    BoundaryOperatorD::new(0.5 * sigma, 0.5 * sigma, 0.5 * sigma, mode, sigma / mode.norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_finite_and_stable() {
        let sw = BoundSweep {
            nus: vec![1.0],
            modes: vec![FourierMode::new(1, 0), FourierMode::new(3, 0)],
            times: vec![0.01, 0.1, 1.0],
            s_values: vec![0.0, 0.5, 2.0, 6.0],
            ..Default::default()
        };
        let r = verify_kernel_bounds(&sw).unwrap();
        assert!(r.pass(), "drift {}", r.max_drift);
        assert_eq!(r.entries.len(), 2 * 4 * 3);
    }
}
