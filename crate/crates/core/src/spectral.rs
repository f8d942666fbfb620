//! Fourier modes, spectral points and the spectral root.

use crate::error::{Error, Result};
use crate::mat2::Mat2C;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tangential wave vector on the 2-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourierMode {
    pub xi: [i64; 2],
}

impl FourierMode {
    pub fn new(xi1: i64, xi2: i64) -> Self {
        FourierMode { xi: [xi1, xi2] }
    }

    pub fn zero() -> Self {
        FourierMode { xi: [0, 0] }
    }

    pub fn is_zero(&self) -> bool {
        self.xi == [0, 0]
    }

    pub fn norm2(&self) -> f64 {
        let [a, b] = self.xi;
        (a * a + b * b) as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn xi_f64(&self) -> [f64; 2] {
        [self.xi[0] as f64, self.xi[1] as f64]
    }

    pub fn neg(&self) -> Self {
        FourierMode::new(-self.xi[0], -self.xi[1])
    }

    /// `xi xi^T`.
    pub fn outer(&self) -> Mat2C {
        let [a, b] = self.xi_f64();
        Mat2C::from_real([[a * a, a * b], [a * b, b * b]])
    }

    /// `xi_perp xi_perp^T` with `xi_perp = (-xi2, xi1)`; satisfies `P^2 = |xi|^2 P`.
    pub fn perp_projector(&self) -> Mat2C {
        let [a, b] = self.xi_f64();
        Mat2C::from_real([[b * b, -a * b], [-a * b, a * a]])
    }
}

/// Principal square root of `(lambda + nu |xi|^2) / nu`.
///
/// Fails when the argument lies on the closed negative real axis.
pub fn spectral_root(lambda: Complex64, nu: f64, mode: &FourierMode) -> Result<Complex64> {
    check_nu(nu)?;
    let k2 = mode.norm2();
    let w = lambda / nu + k2;
    if on_cut(w) {
        return Err(Error::BranchCutViolation {
            re: lambda.re,
            im: lambda.im,
            nu,
            k2,
        });
    }
    Ok(principal_sqrt(w))
}

pub(crate) fn on_cut(w: Complex64) -> bool {
    w.re <= 0.0 && w.im.abs() <= 1e-14 * w.norm()
}

/// `exp(log(w)/2)` with the principal logarithm.
#[inline]
pub(crate) fn principal_sqrt(w: Complex64) -> Complex64 {
    let r = w.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(r.sqrt(), 0.5 * w.arg())
}

pub(crate) fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidViscosity(nu))
    }
}

/// `(lambda, nu, xi)` together with its spectral root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub nu: f64,
    pub mode: FourierMode,
    pub mu: Complex64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64, nu: f64, mode: FourierMode) -> Result<Self> {
        let mu = spectral_root(lambda, nu, &mode)?;
        Ok(SpectralPoint { lambda, nu, mode, mu })
    }

    pub fn k(&self) -> f64 {
        self.mode.norm()
    }
}
