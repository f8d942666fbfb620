//! Small complex 2x2 matrices and 2-vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type Vec2C = [Complex64; 2];

const Z: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Mat2C(pub [[Complex64; 2]; 2]);

impl Mat2C {
    pub const ZERO: Mat2C = Mat2C([[Z, Z], [Z, Z]]);
    pub const IDENTITY: Mat2C = Mat2C([[ONE, Z], [Z, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2C([[a, b], [c, d]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2C([
            [m[0][0].into(), m[0][1].into()],
            [m[1][0].into(), m[1][1].into()],
        ])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2C([[a, Z], [Z, d]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2C([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2C([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse, or `None` when the determinant vanishes relative to the entries.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        let scale = self.max_abs().powi(2);
        if d.norm() <= 1e-300 || d.norm() <= 1e-15 * scale {
            return None;
        }
        let m = &self.0;
        let inv = 1.0 / d;
        Some(Mat2C([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ]))
    }

    pub fn mul_vec(&self, v: &Vec2C) -> Vec2C {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]]
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        let (a, b) = (&self.0, &o.0);
        Mat2C([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for Mat2C {
    fn add_assign(&mut self, o: Mat2C) {
        *self = *self + o;
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        self + (-o)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[Z; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2C(out)
    }
}

impl Mul<Complex64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: Complex64) -> Mat2C {
        self.scale(s)
    }
}

pub fn vec_add(a: &Vec2C, b: &Vec2C) -> Vec2C {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn vec_scale(a: &Vec2C, s: Complex64) -> Vec2C {
    [a[0] * s, a[1] * s]
}

pub fn vec_norm(a: &Vec2C) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}
