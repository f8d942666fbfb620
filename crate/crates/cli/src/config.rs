//! Run configuration: flags merged over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use stokes_halfspace::resolvent::BoundaryOperatorD;
use stokes_halfspace::{Complex64, FourierMode};

use crate::CliError;

/// Flags shared by every command. All optional so that a config file can fill them.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Fourier mode `I J`.
    #[arg(long, num_args = 2, value_names = ["I", "J"], allow_negative_numbers = true)]
    pub xi: Option<Vec<i64>>,
    /// Viscosity.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Time (final time for `solve`).
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Spectral parameter `RE IM`.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    /// Sample grid `A:B:N`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Boundary operator `alpha=..,beta=..,gamma=..,c0=..`.
    #[arg(long = "general-bc")]
    pub general_bc: Option<String>,
    /// Compare against the finite-difference reference.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub oracle: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Number of output times (`solve`).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Time step of the finite-difference reference.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Reduced parameter sweeps (`verify`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub quick: Option<bool>,
}

impl RunConfig {
    /// Values set on `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            xi: self.xi.or(base.xi),
            nu: self.nu.or(base.nu),
            t: self.t.or(base.t),
            lambda: self.lambda.or(base.lambda),
            grid: self.grid.or(base.grid),
            general_bc: self.general_bc.or(base.general_bc),
            oracle: self.oracle.or(base.oracle),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            tol: self.tol.or(base.tol),
            steps: self.steps.or(base.steps),
            dt: self.dt.or(base.dt),
            quick: self.quick.or(base.quick),
        }
    }

    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn mode(&self) -> Result<FourierMode, CliError> {
        match self.xi.as_deref() {
            None => Ok(FourierMode::new(1, 0)),
            Some([a, b]) => Ok(FourierMode::new(*a, *b)),
            Some(v) => Err(CliError::Config(format!("--xi takes two integers, got {v:?}"))),
        }
    }

    pub fn nu(&self) -> Result<f64, CliError> {
        positive("nu", self.nu.unwrap_or(1.0))
    }

    pub fn time(&self, default: f64) -> Result<f64, CliError> {
        positive("t", self.t.unwrap_or(default))
    }

    pub fn lambda(&self) -> Result<Complex64, CliError> {
        match self.lambda.as_deref() {
            None => Ok(Complex64::new(3.0, 0.0)),
            Some([re, im]) if re.is_finite() && im.is_finite() => Ok(Complex64::new(*re, *im)),
            Some(v) => Err(CliError::Config(format!("--lambda takes two finite numbers, got {v:?}"))),
        }
    }

    pub fn grid(&self, default: &str) -> Result<GridSpec, CliError> {
        GridSpec::parse(self.grid.as_deref().unwrap_or(default))
    }

    pub fn tol(&self, default: f64) -> Result<f64, CliError> {
        let t = self.tol.unwrap_or(default);
        if t > 0.0 && t < 1.0 {
            Ok(t)
        } else {
            Err(CliError::Config(format!("--tol must lie in (0, 1), got {t}")))
        }
    }

    pub fn boundary_operator(&self, mode: &FourierMode) -> Result<Option<BoundaryOperatorD>, CliError> {
        self.general_bc.as_deref().map(|s| parse_general_bc(s, mode)).transpose()
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

/// `A:B:N`, `N` equally spaced points from `A` to `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<GridSpec, CliError> {
        let bad = || CliError::Config(format!("grid must look like A:B:N, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let end: f64 = b.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if !(start.is_finite() && end.is_finite()) || start < 0.0 || end <= start || n < 2 {
            return Err(CliError::Config(format!("grid needs 0 <= A < B and N >= 2, got {s:?}")));
        }
        Ok(GridSpec { start, end, n })
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.start + i as f64 * h).collect()
    }

    /// Half-line grids must start at the wall.
    pub fn half_line(&self) -> Result<(f64, usize), CliError> {
        if self.start != 0.0 {
            return Err(CliError::Config(format!("this command needs a grid starting at 0, got {}", self.start)));
        }
        Ok((self.end, self.n))
    }
}

pub fn parse_general_bc(s: &str, mode: &FourierMode) -> Result<BoundaryOperatorD, CliError> {
    let (mut alpha, mut beta, mut gamma, mut c0) = (0.0, 0.0, 0.0, 1.0);
    for item in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value in --general-bc, got {item:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("bad number in {item:?}")))?;
        match k.trim() {
            "alpha" => alpha = v,
            "beta" => beta = v,
            "gamma" => gamma = v,
            "c0" => c0 = v,
            other => return Err(CliError::Config(format!("unknown --general-bc key {other:?}"))),
        }
    }
    BoundaryOperatorD::new(alpha, beta, gamma, mode, c0).map_err(CliError::from)
}
