//! Closed-form heat kernels on the half-line, damped by `e^{-nu |xi|^2 t}`.

use crate::error::{Error, Result};
use crate::spectral::{check_nu, FourierMode};

fn heat(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64, sign: f64) -> Result<f64> {
    check_nu(nu)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    if y < 0.0 || z < 0.0 {
        return Err(Error::InvalidParameter("points must lie in z >= 0".into()));
    }
    let d = 4.0 * nu * t;
    let g = (-(z - y).powi(2) / d).exp() + sign * (-(z + y).powi(2) / d).exp();
    Ok(g * (-nu * mode.norm2() * t).exp() / (std::f64::consts::PI * d).sqrt())
}

/// Heat kernel with the reflecting (Neumann) image.
pub fn heat_kernel_neumann(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64) -> Result<f64> {
    heat(t, nu, mode, y, z, 1.0)
}

/// Heat kernel with the absorbing (Dirichlet) image.
pub fn heat_kernel_dirichlet(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64) -> Result<f64> {
    heat(t, nu, mode, y, z, -1.0)
}
