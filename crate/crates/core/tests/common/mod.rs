//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Residual profile `r(t, s)` with `R = P r`, from the Laplace-table inverse of
/// `e^{-mu s} / (nu k mu (mu - k))`.
pub fn residual_profile(t: f64, nu: f64, k: f64, s: f64) -> f64 {
    let rt = (nu * t).sqrt();
    (-k * s).exp() * libm::erfc(s / (2.0 * rt) - k * rt) / k
}

/// `d/ds` of [`residual_profile`].
pub fn residual_profile_ds(t: f64, nu: f64, k: f64, s: f64) -> f64 {
    let g = (-s * s / (4.0 * nu * t) - nu * k * k * t).exp() / (k * (PI * nu * t).sqrt());
    -k * residual_profile(t, nu, k, s) - g
}

/// `d^2/ds^2` of [`residual_profile`].
pub fn residual_profile_ds2(t: f64, nu: f64, k: f64, s: f64) -> f64 {
    let g = (-s * s / (4.0 * nu * t) - nu * k * k * t).exp() / (k * (PI * nu * t).sqrt());
    -k * residual_profile_ds(t, nu, k, s) + s / (2.0 * nu * t) * g
}

/// Profile for `du(0) = -D u(0)` with `sigma = tr D`, `R = D r`.
pub fn general_profile(t: f64, nu: f64, k: f64, sigma: f64, s: f64) -> f64 {
    let rt = (nu * t).sqrt();
    (nu * (sigma * sigma - k * k) * t - sigma * s).exp() * libm::erfc(s / (2.0 * rt) - sigma * rt)
}

/// `erfc(w) e^{w^2}` for `w >= 0`.
pub fn erfcx(w: f64) -> f64 {
    if w < 25.0 {
        return libm::erfc(w) * (w * w).exp();
    }
    // asymptotic series, converged to rounding for w >= 25
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..12 {
        term *= -((2 * n - 1) as f64) / (2.0 * w * w);
        sum += term;
    }
    sum / (w * PI.sqrt())
}

/// `r`, `dr/ds`, `d2r/ds2` as mantissas times `e^{log}` (returned second).
pub fn residual_profile_scaled(t: f64, nu: f64, k: f64, s: f64) -> ([f64; 3], f64) {
    let rt = (nu * t).sqrt();
    let w = s / (2.0 * rt) - k * rt;
    let (e, log, g) = if w > 0.0 {
        (erfcx(w), -k * s - w * w, 1.0)
    } else {
        (libm::erfc(w), -k * s, (-w * w).exp())
    };
    let g = g / (k * (PI * nu * t).sqrt());
    let r0 = e / k;
    let r1 = -k * r0 - g;
    let r2 = -k * r1 + s / (2.0 * nu * t) * g;
    ([r0, r1, r2], log)
}

/// General-operator profile as mantissa and log scale.
pub fn general_profile_scaled(t: f64, nu: f64, k: f64, sigma: f64, s: f64) -> (f64, f64) {
    let rt = (nu * t).sqrt();
    let w = s / (2.0 * rt) - sigma * rt;
    let base = nu * (sigma * sigma - k * k) * t - sigma * s;
    if w > 0.0 {
        (erfcx(w), base - w * w)
    } else {
        (libm::erfc(w), base)
    }
}

/// Free heat kernel `(4 pi nu t)^{-1/2} e^{-d^2 / 4 nu t}`.
pub fn gauss(t: f64, nu: f64, d: f64) -> f64 {
    (-d * d / (4.0 * nu * t)).exp() / (4.0 * PI * nu * t).sqrt()
}

/// Relative distance between two complex matrices given as 4-entry arrays.
pub fn rel_diff(a: &[num_complex::Complex64; 4], b: &[num_complex::Complex64; 4]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

type Cx = num_complex::Complex64;

fn inv2(m: [[Cx; 2]; 2]) -> [[Cx; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn mul2(a: [[Cx; 2]; 2], b: [[Cx; 2]; 2]) -> [[Cx; 2]; 2] {
    let mut out = [[Cx::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn apply2(a: [[Cx; 2]; 2], v: [Cx; 2]) -> [Cx; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Second-order finite differences for `(lambda - nu (d^2 - k^2)) u = f` on a uniform grid,
/// `du(0) = -D u(0)` via a ghost node, `u = 0` at the last node.
pub fn robin_fd_solve(f: &[[Cx; 2]], h: f64, lambda: Cx, nu: f64, k2: f64, d: [[f64; 2]; 2]) -> Vec<[Cx; 2]> {
    let n = f.len() - 1;
    let a = nu / (h * h);
    let centre = lambda + nu * k2 + 2.0 * a;
    let zero = Cx::new(0.0, 0.0);
    let diag = |i: usize| {
        let mut m = [[centre, zero], [zero, centre]];
        if i == 0 {
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] -= 2.0 * nu / h * d[r][c];
                }
            }
        }
        m
    };
    let upper = |i: usize| if i == 0 { -2.0 * a } else { -a };
    let lower = -a;
    let mut cprime = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = diag(i);
        let mut rhs = f[i];
        if i > 0 {
            let cp: [[Cx; 2]; 2] = cprime[i - 1];
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] -= lower * cp[r][c];
                }
            }
            let yp: [Cx; 2] = y[i - 1];
            rhs = [rhs[0] - lower * yp[0], rhs[1] - lower * yp[1]];
        }
        let inv = inv2(m);
        let u = Cx::new(upper(i), 0.0);
        cprime.push(mul2(inv, [[u, zero], [zero, u]]));
        y.push(apply2(inv, rhs));
    }
    let mut x = vec![[zero; 2]; n + 1];
    x[n - 1] = y[n - 1];
    for i in (0..n - 1).rev() {
        let c = apply2(cprime[i], x[i + 1]);
        x[i] = [y[i][0] - c[0], y[i][1] - c[1]];
    }
    x
}
