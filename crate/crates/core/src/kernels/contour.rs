//! Integration contours for the inverse Laplace transform of the residual kernel.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, QuadValue, QuadratureConfig};
use crate::spectral::principal_sqrt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `nu |xi|^2 <= 1`: arc plus two parabolic rays.
    LowFrequency,
    /// `nu |xi|^2 > 1`: single parabola, residue added when the pole lies to its right.
    HighFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// `lambda = nu ((a + i b)^2 - |xi|^2 / 2) + i shift`.
    Ray { a: f64, shift: f64 },
    /// `lambda = centre + radius e^{i theta}`.
    Arc { centre: f64, radius: f64 },
    /// `mu = m0 + i b`, `lambda = nu (mu^2 - |xi|^2)`.
    Parabola { m0: f64 },
    /// `lambda = centre + radius e^{i theta}`, full turn.
    Circle { centre: C, radius: f64 },
}

/// Which part of the kernel a segment contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSegment {
    pub kind: SegmentKind,
    pub range: (f64, f64),
    pub part: Part,
}

/// A point on the contour: `lambda`, the matching spectral root and `d mu / d p`.
#[derive(Debug, Clone, Copy)]
pub struct ContourPoint {
    pub lambda: C,
    pub mu: C,
    pub dmu: C,
}

impl ContourSegment {
    pub fn point(&self, p: f64, nu: f64, k2: f64) -> ContourPoint {
        let from_lambda = |lambda: C, dlambda: C| {
            let mu = principal_sqrt(lambda / nu + k2);
            ContourPoint { lambda, mu, dmu: dlambda / (2.0 * nu * mu) }
        };
        match self.kind {
            SegmentKind::Ray { a, shift } => {
                let z = C::new(a, p);
                let lambda = nu * (z * z - 0.5 * k2) + C::new(0.0, shift);
                from_lambda(lambda, 2.0 * nu * C::i() * z)
            }
            SegmentKind::Arc { centre, radius } => {
                let e = C::from_polar(radius, p);
                from_lambda(centre + e, C::i() * e)
            }
            SegmentKind::Circle { centre, radius } => {
                let e = C::from_polar(radius, p);
                from_lambda(centre + e, C::i() * e)
            }
            SegmentKind::Parabola { m0 } => {
                let mu = C::new(m0, p);
                ContourPoint { lambda: nu * (mu * mu - k2), mu, dmu: C::i() }
            }
        }
    }
}

/// Tunables of the contour construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourOptions {
    pub quad: QuadratureConfig,
    /// Multiplies the default arc radius.
    pub arc_scale: f64,
    /// Rays and parabolas are cut where `e^{-nu t b^2}` drops below this.
    pub truncation: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { quad: QuadratureConfig::default(), arc_scale: 1.0, truncation: 1e-16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub regime: Regime,
    pub t: f64,
    pub nu: f64,
    pub k2: f64,
    pub segments: Vec<ContourSegment>,
    /// Arc radius (low frequency).
    pub arc_radius: Option<f64>,
    /// Parabola vertex factor (high frequency).
    pub theta: Option<f64>,
    /// Pole to the right of the contour whose residue must be added.
    pub residue_at: Option<C>,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive, got {t}")))
    }
}

fn truncation_b(t: f64, nu: f64, opts: &ContourOptions) -> f64 {
    (-opts.truncation.ln() / (nu * t)).sqrt()
}

/// Arc plus rays; every pole (given by its spectral root) ends up to the left.
pub fn build_contour_lowfreq(
    t: f64,
    nu: f64,
    k2: f64,
    s: f64,
    pole_mu: Option<f64>,
    opts: &ContourOptions,
) -> Result<Contour> {
    check_time(t)?;
    if nu * k2 > 1.0 {
        return Err(Error::InvalidRegime(format!("nu |xi|^2 = {} > 1", nu * k2)));
    }
    let a = s / (2.0 * nu * t);
    let c = nu * (a * a - 0.5 * k2);
    let base = match pole_mu {
        Some(m) => c.max(nu * (m * m - k2)),
        None => c,
    };
    let cross = base + (1.0 / t).max(0.5 * nu * k2);
    let radius = opts.arc_scale * (cross - c);
    let b_max = truncation_b(t, nu, opts);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let segments = vec![
        ContourSegment { kind: SegmentKind::Ray { a, shift: -radius }, range: (-b_max, 0.0), part: Part::Second },
        ContourSegment { kind: SegmentKind::Arc { centre: c, radius }, range: (-half_pi, half_pi), part: Part::First },
        ContourSegment { kind: SegmentKind::Ray { a, shift: radius }, range: (0.0, b_max), part: Part::Second },
    ];
    Ok(Contour {
        regime: Regime::LowFrequency,
        t,
        nu,
        k2,
        segments,
        arc_radius: Some(radius),
        theta: None,
        residue_at: None,
    })
}

/// Parabola through `nu ((theta a)^2 - |xi|^2)`; `theta` moves it away from the pole.
pub fn build_contour_highfreq(
    t: f64,
    nu: f64,
    k2: f64,
    s: f64,
    pole_mu: Option<f64>,
    opts: &ContourOptions,
) -> Result<Contour> {
    check_time(t)?;
    if nu * k2 < 1.0 {
        return Err(Error::InvalidRegime(format!("nu |xi|^2 = {} < 1", nu * k2)));
    }
    let a = s / (2.0 * nu * t);
    let theta = match pole_mu {
        Some(m) if m > 0.0 && (0.5..=1.5).contains(&(a / m)) => 0.5,
        _ => 1.0,
    };
    let m0 = theta * a;
    let residue_at = match pole_mu {
        Some(m) if m > 0.0 && m0 < m => Some(C::new(nu * (m * m - k2), 0.0)),
        _ => None,
    };
    let b_max = truncation_b(t, nu, opts);
    let segments = vec![
        ContourSegment { kind: SegmentKind::Parabola { m0 }, range: (-b_max, 0.0), part: Part::Second },
        ContourSegment { kind: SegmentKind::Parabola { m0 }, range: (0.0, b_max), part: Part::Second },
    ];
    Ok(Contour {
        regime: Regime::HighFrequency,
        t,
        nu,
        k2,
        segments,
        arc_radius: None,
        theta: Some(theta),
        residue_at,
    })
}

/// Regime chosen by `nu |xi|^2 <= 1`.
pub fn build_contour(t: f64, nu: f64, k2: f64, s: f64, pole_mu: Option<f64>, opts: &ContourOptions) -> Result<Contour> {
    if nu * k2 <= 1.0 {
        build_contour_lowfreq(t, nu, k2, s, pole_mu, opts)
    } else {
        build_contour_highfreq(t, nu, k2, s, pole_mu, opts)
    }
}

/// Result of integrating over the two parts of a contour, each carrying `e^{log_scale}`.
#[derive(Debug, Clone, Copy)]
pub struct PartIntegrals<V> {
    pub first: V,
    pub second: V,
    pub log_scale: f64,
    pub error: f64,
}

impl Contour {
    /// `max Re(lambda t - mu s)` over a sample of contour points.
    pub fn log_scale(&self, s: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for seg in &self.segments {
            let (p0, p1) = seg.range;
            for j in 0..=64 {
                let p = p0 + (p1 - p0) * j as f64 / 64.0;
                let q = seg.point(p, self.nu, self.k2);
                best = best.max((q.lambda * self.t - q.mu * s).re);
            }
        }
        best
    }

    /// `(1 / 2 pi i) int g(lambda, mu) e^{lambda t - mu s - log_scale} dmu` split by part.
    pub fn integrate<V, F>(&self, s: f64, log_scale: f64, g: F, quad: &QuadratureConfig) -> Result<PartIntegrals<V>>
    where
        V: QuadValue + std::ops::Mul<C, Output = V>,
        F: Fn(&ContourPoint) -> V,
    {
        let mut first = V::zero();
        let mut second = V::zero();
        let mut error = 0.0;
        let norm = C::new(0.0, -0.5 / std::f64::consts::PI);
        for seg in &self.segments {
            let mut f = |p: f64| {
                let q = seg.point(p, self.nu, self.k2);
                let e = (q.lambda * self.t - q.mu * s - log_scale).exp();
                g(&q) * (e * q.dmu * norm)
            };
            let r = integrate_pieces(&mut f, &[seg.range.0, seg.range.1], quad)?;
            error += r.error;
            match seg.part {
                Part::First => first = first + r.value,
                Part::Second => second = second + r.value,
            }
        }
        Ok(PartIntegrals { first, second, log_scale, error })
    }
}

/// Counter-clockwise circle around `centre`.
pub fn circle_contour(t: f64, nu: f64, k2: f64, centre: C, radius: f64) -> Contour {
    Contour {
        regime: Regime::LowFrequency,
        t,
        nu,
        k2,
        segments: vec![ContourSegment {
            kind: SegmentKind::Circle { centre, radius },
            range: (0.0, 2.0 * std::f64::consts::PI),
            part: Part::First,
        }],
        arc_radius: None,
        theta: None,
        residue_at: None,
    }
}
