//! Exact integration of exponential kernels against piecewise-linear data.

use crate::grid::HalfLineGrid;
use num_complex::Complex64;

type C = Complex64;

/// Weights `(near, far)` for `int_0^h e^{-mu u} f(u) du` with `f` linear between
/// its values at `u = 0` (near) and `u = h` (far).
#[inline]
pub(crate) fn interval_weights(mu: C, h: f64) -> (C, C) {
    let x = mu * h;
    let (e1, e2) = if x.norm() < 0.5 {
        // (1 - e^{-x})/x and (1 - e^{-x}(1 + x))/x^2 as series
        let mut e1 = C::new(0.0, 0.0);
        let mut e2 = C::new(0.0, 0.0);
        let mut p = C::new(1.0, 0.0); // (-x)^k
        let mut fact = 1.0; // (k+1)!
        for k in 0..20 {
            fact *= (k + 1) as f64;
            e1 += p / fact;
            e2 += p * ((k + 1) as f64) / (fact * (k + 2) as f64);
            p *= -x;
        }
        (e1, e2)
    } else {
        let ex = (-x).exp();
        ((1.0 - ex) / x, (1.0 - ex * (1.0 + x)) / (x * x))
    };
    (h * (e1 - e2), h * e2)
}

/// One-sided exponential sums at every node.
pub(crate) struct ExpSweeps {
    /// `int_0^{y_i} e^{-mu (y_i - z)} f(z) dz`
    pub left: Vec<C>,
    /// `int_{y_i}^{Z} e^{-mu (z - y_i)} f(z) dz`
    pub right: Vec<C>,
    /// `int_0^Z e^{-mu z} f(z) dz`
    pub moment: C,
}

pub(crate) fn exp_sweeps(grid: &HalfLineGrid, f: &[C], mu: C) -> ExpSweeps {
    let x = grid.nodes();
    let n = x.len();
    let mut left = vec![C::new(0.0, 0.0); n];
    let mut right = vec![C::new(0.0, 0.0); n];
    let mut moment = C::new(0.0, 0.0);
    let uniform = grid.spacing();
    let w_uniform = uniform.map(|h| (interval_weights(mu, h), (-mu * h).exp()));
    let weights = |j: usize| match w_uniform {
        Some(w) => w,
        None => {
            let h = x[j + 1] - x[j];
            (interval_weights(mu, h), (-mu * h).exp())
        }
    };
    for j in 0..n - 1 {
        let ((near, far), decay) = weights(j);
        left[j + 1] = decay * left[j] + near * f[j + 1] + far * f[j];
        moment += (-mu * x[j]).exp() * (near * f[j] + far * f[j + 1]);
    }
    for j in (0..n - 1).rev() {
        let ((near, far), decay) = weights(j);
        right[j] = decay * right[j + 1] + near * f[j] + far * f[j + 1];
    }
    ExpSweeps { left, right, moment }
}

/// `int (e^{-mu|y-z|} + sign e^{-mu(y+z)}) f(z) dz` and its `y`-derivative at every node.
pub(crate) fn image_kernel_apply(grid: &HalfLineGrid, f: &[C], mu: C, sign: f64) -> (Vec<C>, Vec<C>, C) {
    let sw = exp_sweeps(grid, f, mu);
    let mut val = Vec::with_capacity(grid.len());
    let mut der = Vec::with_capacity(grid.len());
    for (i, &y) in grid.nodes().iter().enumerate() {
        let img = (-mu * y).exp() * sw.moment * sign;
        val.push(sw.left[i] + sw.right[i] + img);
        der.push(mu * (sw.right[i] - sw.left[i] - img));
    }
    (val, der, sw.moment)
}
