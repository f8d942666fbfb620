//! Time-domain residual kernel by contour quadrature, with residues and the full Green matrix.

use super::contour::{build_contour, circle_contour, Contour, ContourOptions, Regime};
use super::heat::heat_kernel_neumann;
use crate::error::{Error, Result};
use crate::mat2::Mat2C;
use crate::quadrature::CVec;
use crate::resolvent::BoundaryOperatorD;
use crate::spectral::{check_nu, FourierMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// `mantissa * e^{log_scale}`; keeps values representable when the exponent is extreme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled<V> {
    pub mantissa: V,
    pub log_scale: f64,
}

impl Scaled<Mat2C> {
    pub fn value(&self) -> Mat2C {
        scaled_mat(&self.mantissa, self.log_scale)
    }

    /// `ln |value|` (Frobenius), finite even when `value()` underflows.
    pub fn ln_norm(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}

impl Scaled<C> {
    pub fn value(&self) -> C {
        if self.mantissa == C::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa * self.log_scale.exp()
    }
}

fn scaled_mat(m: &Mat2C, log_scale: f64) -> Mat2C {
    if *m == Mat2C::ZERO {
        return *m;
    }
    m.scale_re(log_scale.exp())
}

/// Scalar profile `r` with `R = M r` (`M = P` or `D`), for derivative orders 0..=2.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarResidual {
    pub r1: [Scaled<C>; 3],
    pub r2: [Scaled<C>; 3],
    pub contour: Contour,
    /// Quadrature error estimate relative to `e^{r2 log_scale}`.
    pub error: f64,
}

impl ScalarResidual {
    pub fn total(&self, order: usize) -> C {
        self.r1[order].value() + self.r2[order].value()
    }
}

/// Inverse Laplace transform of `e^{-mu s} / (nu c mu (mu - m_p))` in `lambda`.
pub fn scalar_residual(
    t: f64,
    nu: f64,
    k2: f64,
    s: f64,
    pole_mu: f64,
    c: f64,
    opts: &ContourOptions,
) -> Result<ScalarResidual> {
    check_nu(nu)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParameter(format!("y + z must be non-negative, got {s}")));
    }
    let contour = build_contour(t, nu, k2, s, Some(pole_mu), opts)?;
    let log_scale = contour.log_scale(s);
    let res = contour.integrate(
        s,
        log_scale,
        |q| {
            let h = 2.0 / (c * (q.mu - pole_mu));
            CVec([h, -h * q.mu, h * q.mu * q.mu])
        },
        &opts.quad,
    )?;
    let scaled = |v: CVec<3>, ls: f64| v.0.map(|m| Scaled { mantissa: m, log_scale: ls });
    let r2 = scaled(res.second, log_scale);
    let r1 = match contour.residue_at {
        Some(lp) => {
            let h = C::new(2.0 / c, 0.0);
            let ls = lp.re * t - pole_mu * s;
            scaled(CVec([h, -h * pole_mu, h * pole_mu * pole_mu]), ls)
        }
        None => scaled(res.first, log_scale),
    };
    Ok(ScalarResidual { r1, r2, contour, error: res.error })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualParts {
    pub t: f64,
    pub nu: f64,
    pub mode: FourierMode,
    /// `y + z`.
    pub s: f64,
    /// Order of the `z`-derivative.
    pub order: usize,
    pub regime: Regime,
    pub r1: Scaled<Mat2C>,
    pub r2: Scaled<Mat2C>,
    pub arc_radius: Option<f64>,
    pub theta: Option<f64>,
    pub residue_at: Option<C>,
}

impl ResidualParts {
    pub fn total(&self) -> Mat2C {
        self.r1.value() + self.r2.value()
    }

    fn from_scalar(t: f64, nu: f64, mode: FourierMode, s: f64, order: usize, m: Mat2C, sr: &ScalarResidual) -> Self {
        let lift = |v: &Scaled<C>| Scaled { mantissa: m.scale(v.mantissa), log_scale: v.log_scale };
        ResidualParts {
            t,
            nu,
            mode,
            s,
            order,
            regime: sr.contour.regime,
            r1: lift(&sr.r1[order]),
            r2: lift(&sr.r2[order]),
            arc_radius: sr.contour.arc_radius,
            theta: sr.contour.theta,
            residue_at: sr.contour.residue_at,
        }
    }

    fn zero(t: f64, nu: f64, mode: FourierMode, s: f64, order: usize, regime: Regime) -> Self {
        let z = Scaled { mantissa: Mat2C::ZERO, log_scale: 0.0 };
        ResidualParts { t, nu, mode, s, order, regime, r1: z, r2: z, arc_radius: None, theta: None, residue_at: None }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("derivative order {order} > 2")));
    }
    Ok(())
}

/// `d^order/dz^order` of the residual Green matrix at `y + z = s`.
pub fn residual_kernel(
    t: f64,
    nu: f64,
    mode: &FourierMode,
    s: f64,
    order: usize,
    opts: &ContourOptions,
) -> Result<ResidualParts> {
    check_order(order)?;
    if mode.is_zero() {
        return Err(Error::ZeroModeUnsupported);
    }
    let k = mode.norm();
    let sr = scalar_residual(t, nu, mode.norm2(), s, k, k, opts)?;
    Ok(ResidualParts::from_scalar(t, nu, *mode, s, order, mode.perp_projector(), &sr))
}

/// Residual Green matrix at `(y, z)` with default contour options.
pub fn residual_kernel_time(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64) -> Result<ResidualParts> {
    residual_kernel(t, nu, mode, y + z, 0, &ContourOptions::default())
}

/// Residual kernel for the boundary condition `du(0) = -D u(0)`.
pub fn residual_kernel_general(
    t: f64,
    nu: f64,
    mode: &FourierMode,
    d: &BoundaryOperatorD,
    s: f64,
    order: usize,
    opts: &ContourOptions,
) -> Result<ResidualParts> {
    check_order(order)?;
    if d.is_zero() {
        check_nu(nu)?;
        let regime = if nu * mode.norm2() <= 1.0 { Regime::LowFrequency } else { Regime::HighFrequency };
        return Ok(ResidualParts::zero(t, nu, *mode, s, order, regime));
    }
    let sr = scalar_residual(t, nu, mode.norm2(), s, d.sigma(), 1.0, opts)?;
    Ok(ResidualParts::from_scalar(t, nu, *mode, s, order, d.matrix(), &sr))
}

/// Analytic residue of `e^{lambda t} R_lambda` at `lambda = 0`: `(2/|xi|) P e^{-|xi| s}`.
pub fn residue_at_zero(mode: &FourierMode, s: f64) -> Result<Mat2C> {
    if mode.is_zero() {
        return Err(Error::ZeroModeUnsupported);
    }
    let k = mode.norm();
    Ok(mode.perp_projector().scale_re(2.0 / k * (-k * s).exp()))
}

/// Residue at `lambda = 0` by quadrature over a small circle.
pub fn residue_by_circle(t: f64, nu: f64, mode: &FourierMode, s: f64, opts: &ContourOptions) -> Result<Mat2C> {
    if mode.is_zero() {
        return Err(Error::ZeroModeUnsupported);
    }
    let k = mode.norm();
    let k2 = mode.norm2();
    let circle = circle_contour(t, nu, k2, C::new(0.0, 0.0), 0.25 * nu * k2);
    let r = circle.integrate(s, 0.0, |q| C::new(2.0 / k, 0.0) / (q.mu - k), &opts.quad)?;
    Ok(mode.perp_projector().scale(r.first))
}

/// Residue of the general kernel at `lambda* = nu (sigma^2 - |xi|^2)`: `2 D e^{lambda* t - sigma s}`.
pub fn residue_general(t: f64, nu: f64, mode: &FourierMode, d: &BoundaryOperatorD, s: f64) -> Mat2C {
    let sigma = d.sigma();
    let lp = nu * (sigma * sigma - mode.norm2());
    d.matrix().scale_re(2.0 * (lp * t - sigma * s).exp())
}

/// Full Green matrix `H I + R` at `(y, z)`, heat part in closed form.
pub fn green_time(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64, opts: &ContourOptions) -> Result<Mat2C> {
    let h = heat_kernel_neumann(t, nu, mode, y, z)?;
    let mut g = Mat2C::IDENTITY.scale_re(h);
    if !mode.is_zero() {
        g += residual_kernel(t, nu, mode, y + z, 0, opts)?.total();
    }
    Ok(g)
}

/// Full Green matrix from one contour integral of the resolvent kernel.
pub fn green_by_contour(t: f64, nu: f64, mode: &FourierMode, y: f64, z: f64, opts: &ContourOptions) -> Result<Mat2C> {
    check_nu(nu)?;
    if y < 0.0 || z < 0.0 {
        return Err(Error::InvalidParameter("points must lie in z >= 0".into()));
    }
    let k2 = mode.norm2();
    let k = mode.norm();
    let p = mode.perp_projector();
    let near = (y - z).abs();
    let far = y + z;
    let pole = (!mode.is_zero()).then_some(k);
    let contour = build_contour(t, nu, k2, near, pole, opts)?;
    let ls = contour.log_scale(near);
    let res = contour.integrate(
        near,
        ls,
        |q| {
            let img = (-q.mu * (far - near)).exp();
            let mut m = Mat2C::IDENTITY.scale(1.0 + img);
            if let Some(k) = pole {
                m += p.scale(img * 2.0 / (k * (q.mu - k)));
            }
            m
        },
        &opts.quad,
    )?;
    let mut g = (res.first + res.second).scale_re(ls.exp());
    if let Some(lp) = contour.residue_at {
        g += p.scale_re(2.0 / k * (lp.re * t - k * far).exp());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_matches_circle() {
        let o = ContourOptions::default();
        for (nu, m, s) in [(1.0, FourierMode::new(1, 0), 0.3), (0.1, FourierMode::new(2, 1), 1.0)] {
            let a = residue_at_zero(&m, s).unwrap();
            let b = residue_by_circle(0.7, nu, &m, s, &o).unwrap();
            assert!((a - b).max_abs() < 1e-12 * a.max_abs());
        }
    }

    #[test]
    fn zero_operator_gives_zero_kernel() {
        let m = FourierMode::new(1, 1);
        let r = residual_kernel_general(0.5, 1.0, &m, &BoundaryOperatorD::zero(), 0.4, 0, &ContourOptions::default())
            .unwrap();
        assert_eq!(r.total(), Mat2C::ZERO);
    }

    #[test]
    fn zero_mode_and_bad_order() {
        let o = ContourOptions::default();
        assert!(matches!(residual_kernel(1.0, 1.0, &FourierMode::zero(), 0.0, 0, &o), Err(Error::ZeroModeUnsupported)));
        assert!(residual_kernel(1.0, 1.0, &FourierMode::new(1, 0), 0.0, 3, &o).is_err());
        assert!(residual_kernel(1.0, 1.0, &FourierMode::new(1, 0), -1.0, 0, &o).is_err());
    }

    #[test]
    fn kernel_lies_in_range_of_projector() {
        let m = FourierMode::new(2, 1);
        let r = residual_kernel_time(0.2, 0.1, &m, 0.3, 0.4).unwrap().total();
        let xi = [C::new(2.0, 0.0), C::new(1.0, 0.0)];
        let v = r.transpose().mul_vec(&xi);
        assert!(v[0].norm() + v[1].norm() < 1e-14 * r.max_abs());
    }
}
