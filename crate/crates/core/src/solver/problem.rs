//! Problem data, time series and trajectories.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::grid::{HalfLineGrid, ModeField};
use crate::io::{fmt_f64, CsvTable};
use crate::spectral::{check_nu, FourierMode};

type C = Complex64;

/// Initial state, interior forcing and tangential wall datum of one mode.
///
/// Components are ordered `(tangential_1, tangential_2, normal)`.
pub trait ProblemData: Send + Sync {
    fn initial(&self, z: f64) -> [C; 3];
    fn forcing(&self, t: f64, z: f64) -> [C; 3];
    fn boundary(&self, t: f64) -> [C; 2];

    /// `false` lets solvers skip the forcing integral.
    fn has_forcing(&self) -> bool {
        true
    }

    fn has_boundary(&self) -> bool {
        true
    }
}

/// Samples at increasing times, linearly interpolated and held constant outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub times: Vec<f64>,
    pub values: Vec<T>,
}

impl<T> TimeSeries<T> {
    pub fn new(times: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::ShapeMismatch(format!("{} times for {} samples", times.len(), values.len())));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sample times must be finite and increasing".into()));
        }
        Ok(TimeSeries { times, values })
    }

    /// Bracketing sample indices and the weight of the upper one.
    fn locate(&self, t: f64) -> (usize, usize, f64) {
        let n = self.times.len();
        if t <= self.times[0] {
            return (0, 0, 0.0);
        }
        if t >= self.times[n - 1] {
            return (n - 1, n - 1, 0.0);
        }
        let j = self.times.partition_point(|&s| s <= t) - 1;
        let s = (t - self.times[j]) / (self.times[j + 1] - self.times[j]);
        (j, j + 1, s)
    }

    /// Smallest number of samples per unit time over the covered span.
    pub fn density(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| 1.0 / (w[1] - w[0]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Grid- and time-sampled data, the form read from files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledData {
    pub omega0: ModeField,
    pub forcing: Option<TimeSeries<ModeField>>,
    pub boundary_g: Option<TimeSeries<[C; 2]>>,
}

impl SampledData {
    pub fn new(
        omega0: ModeField,
        forcing: Option<TimeSeries<ModeField>>,
        boundary_g: Option<TimeSeries<[C; 2]>>,
    ) -> Result<Self> {
        if omega0.n_components() != 3 {
            return Err(Error::ShapeMismatch("initial field needs 3 components".into()));
        }
        if let Some(f) = &forcing {
            if f.values.iter().any(|v| v.n_components() != 3) {
                return Err(Error::ShapeMismatch("forcing needs 3 components".into()));
            }
        }
        Ok(SampledData { omega0, forcing, boundary_g })
    }
}

fn field_at(f: &ModeField, z: f64) -> [C; 3] {
    [f.interpolate(0, z), f.interpolate(1, z), f.interpolate(2, z)]
}

impl ProblemData for SampledData {
    fn initial(&self, z: f64) -> [C; 3] {
        field_at(&self.omega0, z)
    }

    fn forcing(&self, t: f64, z: f64) -> [C; 3] {
        let Some(f) = &self.forcing else {
            return [C::new(0.0, 0.0); 3];
        };
        let (a, b, s) = f.locate(t);
        let (fa, fb) = (field_at(&f.values[a], z), field_at(&f.values[b], z));
        [0, 1, 2].map(|c| fa[c] * (1.0 - s) + fb[c] * s)
    }

    fn boundary(&self, t: f64) -> [C; 2] {
        let Some(g) = &self.boundary_g else {
            return [C::new(0.0, 0.0); 2];
        };
        let (a, b, s) = g.locate(t);
        [0, 1].map(|c| g.values[a][c] * (1.0 - s) + g.values[b][c] * s)
    }

    fn has_forcing(&self) -> bool {
        self.forcing.is_some()
    }

    fn has_boundary(&self) -> bool {
        self.boundary_g.is_some()
    }
}

/// Data given by closures.
pub struct AnalyticData<I, F, G> {
    pub initial: I,
    pub forcing: Option<F>,
    pub boundary: Option<G>,
}

impl<I, F, G> ProblemData for AnalyticData<I, F, G>
where
    I: Fn(f64) -> [C; 3] + Send + Sync,
    F: Fn(f64, f64) -> [C; 3] + Send + Sync,
    G: Fn(f64) -> [C; 2] + Send + Sync,
{
    fn initial(&self, z: f64) -> [C; 3] {
        (self.initial)(z)
    }

    fn forcing(&self, t: f64, z: f64) -> [C; 3] {
        self.forcing.as_ref().map_or([C::new(0.0, 0.0); 3], |f| f(t, z))
    }

    fn boundary(&self, t: f64) -> [C; 2] {
        self.boundary.as_ref().map_or([C::new(0.0, 0.0); 2], |g| g(t))
    }

    fn has_forcing(&self) -> bool {
        self.forcing.is_some()
    }

    fn has_boundary(&self) -> bool {
        self.boundary.is_some()
    }
}

/// [`AnalyticData`] without forcing or wall data.
pub type InitialOnly<I> = AnalyticData<I, fn(f64, f64) -> [C; 3], fn(f64) -> [C; 2]>;

/// Homogeneous data with the given initial state.
pub fn initial_only<I>(initial: I) -> InitialOnly<I>
where
    I: Fn(f64) -> [C; 3] + Send + Sync,
{
    AnalyticData { initial, forcing: None, boundary: None }
}

#[derive(Clone)]
pub struct StokesProblem {
    pub mode: FourierMode,
    pub nu: f64,
    pub data: Arc<dyn ProblemData>,
    pub t_final: f64,
}

impl std::fmt::Debug for StokesProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StokesProblem")
            .field("mode", &self.mode)
            .field("nu", &self.nu)
            .field("t_final", &self.t_final)
            .finish_non_exhaustive()
    }
}

impl StokesProblem {
    pub fn new(mode: FourierMode, nu: f64, data: Arc<dyn ProblemData>, t_final: f64) -> Result<Self> {
        check_nu(nu)?;
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter(format!("final time must be positive, got {t_final}")));
        }
        Ok(StokesProblem { mode, nu, data, t_final })
    }

    /// Initial state sampled on `grid`, with the wall value of the normal
    /// component removed by a hat-function correction (nonzero modes only).
    ///
    /// Fails if that value exceeds one percent of the field maximum.
    pub fn sample_initial(&self, grid: &Arc<HalfLineGrid>) -> Result<(ModeField, Option<Warning>)> {
        let mut comps: Vec<Vec<C>> = (0..3).map(|_| Vec::with_capacity(grid.len())).collect();
        for &z in grid.nodes() {
            for (c, v) in self.data.initial(z).into_iter().enumerate() {
                comps[c].push(v);
            }
        }
        let field = ModeField::new(grid.clone(), comps)?;
        if !field.is_finite() {
            return Err(Error::IncompatibleData("initial field is not finite".into()));
        }
        let wall = field.components[2][0].norm();
        if wall == 0.0 || self.mode.is_zero() {
            return Ok((field, None));
        }
        let scale = field.max_abs();
        if wall > 1e-2 * scale {
            return Err(Error::IncompatibleData(format!(
                "normal component is {wall:e} at the wall (field max {scale:e})"
            )));
        }
        let mut field = field;
        field.components[2][0] = C::new(0.0, 0.0);
        Ok((field, Some(Warning::CompatibilityCorrection { magnitude: wall })))
    }

    pub fn sample_forcing(&self, t: f64, grid: &HalfLineGrid) -> [Vec<C>; 3] {
        let mut out: [Vec<C>; 3] = Default::default();
        for &z in grid.nodes() {
            for (c, v) in self.data.forcing(t, z).into_iter().enumerate() {
                out[c].push(v);
            }
        }
        out
    }
}

/// Output times: finite, non-negative, increasing and within `(0, t_final]`.
pub(crate) fn check_times(times: &[f64], t_final: f64) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0 || *t > t_final * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("output times must lie in [0, {t_final}]")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("output times must increase".into()));
    }
    Ok(())
}

/// States of one mode at increasing times, starting from `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode: FourierMode,
    pub nu: f64,
    pub method: String,
    pub times: Vec<f64>,
    pub states: Vec<ModeField>,
    pub warnings: Vec<Warning>,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<HalfLineGrid> {
        &self.states[0].grid
    }

    /// State at the output time closest to `t`.
    pub fn state_at(&self, t: f64) -> &ModeField {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map_or(0, |(i, _)| i);
        &self.states[i]
    }

    /// `xi . omega_tau` at every node of state `i`.
    pub fn xi_dot_tangential(&self, i: usize) -> Vec<C> {
        let [x1, x2] = self.mode.xi_f64();
        let s = &self.states[i];
        s.components[0].iter().zip(&s.components[1]).map(|(a, b)| a * x1 + b * x2).collect()
    }

    /// Trapezoid `L^2` norm of the tangential pair of state `i`.
    pub fn tangential_norm(&self, i: usize) -> f64 {
        let s = &self.states[i];
        let w = s.grid.trapezoid_weights();
        (0..2)
            .map(|c| s.components[c].iter().zip(&w).map(|(v, wi)| v.norm_sqr() * wi).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Long-format table `t, z, component, re, im`.
    pub fn to_csv(&self, provenance: &[String]) -> CsvTable {
        let mut table = CsvTable::new(&["t", "z", "component", "re", "im"]);
        for p in provenance {
            table.provenance(p.clone());
        }
        table.provenance(format!(
            "trajectory method={} xi=({},{}) nu={}",
            self.method, self.mode.xi[0], self.mode.xi[1], self.nu
        ));
        for (t, s) in self.times.iter().zip(&self.states) {
            for (c, comp) in s.components.iter().enumerate() {
                for (z, v) in s.grid.nodes().iter().zip(comp) {
                    table.row(&[&fmt_f64(*t), &fmt_f64(*z), &c.to_string()], &[v.re, v.im]);
                }
            }
        }
        table
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serialises")
    }
}
