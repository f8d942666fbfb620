//! Adaptive Gauss-Kronrod (10/21 point) quadrature for complex-valued integrands.

use crate::error::{Error, Result};
use crate::mat2::Mat2C;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl Mul<f64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: f64) -> Mat2C {
        self.scale_re(s)
    }
}

impl QuadValue for Mat2C {
    fn zero() -> Self {
        Mat2C::ZERO
    }
    fn norm(&self) -> f64 {
        Mat2C::norm(self)
    }
}

/// Fixed-length vector of complex values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl<const N: usize> Mul<Complex64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, s: Complex64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([Complex64::new(0.0, 0.0); N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Equal pieces each interval is split into before adapting.
    pub initial_panels: usize,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-11, abs_tol: 0.0, initial_panels: 4, max_subdivisions: 4000 }
    }
}

impl QuadratureConfig {
    /// Twice the starting resolution and half the tolerance.
    pub fn doubled(&self) -> Self {
        QuadratureConfig {
            rel_tol: 0.5 * self.rel_tol,
            abs_tol: 0.5 * self.abs_tol,
            initial_panels: 2 * self.initial_panels,
            max_subdivisions: 2 * self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    /// Integral of the absolute value (cancellation indicator).
    pub abs_integral: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    abs: f64,
}

fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Piece<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = V::zero();
    let mut abs = fc.norm() * WGK[10];
    for i in 0..10 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        kron = kron + s * WGK[i];
        abs += (f1.norm() + f2.norm()) * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + s * WG[i / 2];
        }
    }
    let value = kron * h;
    let error = (kron - gauss).norm() * h.abs();
    Piece { a, b, value, error, abs: abs * h.abs() }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult<V>> {
    integrate_pieces(&mut f, &[a, b], cfg)
}

/// Adaptive integration over consecutive intervals `[breaks[i], breaks[i+1]]`.
pub fn integrate_pieces<V: QuadValue, F: FnMut(f64) -> V>(
    f: &mut F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult<V>> {
    let panels = cfg.initial_panels.max(1);
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        for p in 0..panels {
            let pa = a + (b - a) * p as f64 / panels as f64;
            let pb = a + (b - a) * (p + 1) as f64 / panels as f64;
            pieces.push(gk21(f, pa, pb));
        }
    }
    let mut evaluations = 21 * pieces.len();
    loop {
        let value = pieces.iter().fold(V::zero(), |acc, p| acc + p.value);
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let abs: f64 = pieces.iter().map(|p| p.abs).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.norm()).max(1e-15 * abs);
        if !(error.is_finite() && abs.is_finite()) {
            return Err(Error::QuadratureUnderresolved { estimate: f64::INFINITY, tolerance: tol });
        }
        if error <= tol || abs == 0.0 {
            return Ok(QuadResult { value, error, abs_integral: abs, evaluations });
        }
        if pieces.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureUnderresolved { estimate: error, tolerance: tol });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = pieces.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        pieces.push(gk21(f, p.a, m));
        pieces.push(gk21(f, m, p.b));
        evaluations += 42;
    }
}
