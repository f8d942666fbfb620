//! Resolvent against closed forms, finite differences and norm bounds.
#![allow(clippy::needless_range_loop)]

mod common;

use std::sync::Arc;

use common::robin_fd_solve;
use stokes_halfspace::grid::derivative;
use stokes_halfspace::resolvent::{
    check_resolvent_bound, correction_w, free_part_v, resolvent_apply, resolvent_apply_general, resolvent_kernel,
    BoundCheckConfig, BoundaryOperatorD,
};
use stokes_halfspace::{Complex64 as C, FourierMode, HalfLineGrid, ModeField, SpectralPoint};

fn point(re: f64, im: f64, nu: f64, a: i64, b: i64) -> SpectralPoint {
    SpectralPoint::new(C::new(re, im), nu, FourierMode::new(a, b)).unwrap()
}

fn grid(z_max: f64, n: usize) -> Arc<HalfLineGrid> {
    Arc::new(HalfLineGrid::uniform(z_max, n).unwrap())
}

fn exp_field(g: &Arc<HalfLineGrid>, a: C, b: C) -> ModeField {
    ModeField::from_fn(g.clone(), 2, |c, z| if c == 0 { a } else { b } * (-z).exp())
}

#[test]
fn free_part_of_exponential_matches_split_integral() {
    let p = point(3.0, 0.0, 1.0, 1, 0);
    let g = grid(40.0, 8193);
    let f = exp_field(&g, C::new(1.0, 0.0), C::new(0.0, 0.0));
    let v = free_part_v(&f, &p).unwrap();
    let mu = 2.0f64;
    for y in [0.0f64, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let exact = ((-y).exp() - (-mu * y).exp()) / (mu - 1.0) + (-y).exp() / (mu + 1.0)
            + (-mu * y).exp() / (mu + 1.0);
        let exact = exact / (2.0 * mu);
        let got = v.interpolate(0, y);
        assert!((got.re - exact).abs() < 1e-6, "y = {y}: {got} vs {exact}");
        assert!(v.interpolate(1, y).norm() == 0.0);
    }
}

#[test]
fn free_part_of_narrow_hat_approaches_kernel() {
    let p = point(3.0, 0.0, 1.0, 1, 0);
    let z0 = 1.0;
    let ys = [0.0, 0.5, 2.0, 3.0];
    let mut errors = Vec::new();
    for delta in [0.1, 0.05, 0.025] {
        let g = grid(20.0, (20.0 / (delta / 8.0)) as usize + 1);
        let f = ModeField::from_fn(g.clone(), 2, |c, z| {
            C::new(if c == 0 { (1.0 - (z - z0).abs() / delta).max(0.0) / delta } else { 0.0 }, 0.0)
        });
        let v = free_part_v(&f, &p).unwrap();
        let err = ys
            .iter()
            .map(|&y| {
                let exact = 0.25 * ((-2.0 * (y - z0).abs()).exp() + (-2.0 * (y + z0)).exp());
                (v.interpolate(0, y).re - exact).abs()
            })
            .fold(0.0, f64::max);
        errors.push(err);
    }
    println!("hat errors {errors:?}");
    assert!(errors[2] < 1e-3);
    for w in errors.windows(2) {
        assert!((3.5..4.5).contains(&(w[0] / w[1])), "{errors:?}");
    }
}

#[test]
fn exponential_forcing_meets_boundary_condition() {
    let p = point(3.0, 0.0, 1.0, 1, 0);
    let g = grid(40.0, 4097);
    let f = exp_field(&g, C::new(1.0, 0.0), C::new(0.0, 0.0));
    let sol = resolvent_apply(&f, &p).unwrap();
    assert!(sol.boundary_residual < 1e-10);
    let sum = sol.v.add(&sol.w).unwrap().sub(&sol.u).unwrap().max_abs();
    assert!(sum <= 1e-13 * (sol.v.max_abs() + sol.w.max_abs()));
    let zero = resolvent_apply(&ModeField::zeros(g, 2), &p).unwrap();
    assert_eq!(zero.u.max_abs(), 0.0);
}

#[test]
fn vorticity_condition_matches_finite_differences() {
    for (p, f1, f2) in [
        (point(3.0, 0.0, 1.0, 1, 0), C::new(1.0, 0.0), C::new(0.0, 0.0)),
        (point(2.0, 1.0, 0.1, 2, 1), C::new(1.0, 0.5), C::new(-0.3, 1.0)),
    ] {
        let g = grid(30.0, 8193);
        let f = ModeField::from_fn(g.clone(), 2, |c, z| if c == 0 { f1 } else { f2 } * (-(z - 1.5).powi(2)).exp());
        let sol = resolvent_apply(&f, &p).unwrap();
        let k = p.k();
        let proj = p.mode.perp_projector();
        let d = [[proj.get(0, 0).re / k, proj.get(0, 1).re / k], [proj.get(1, 0).re / k, proj.get(1, 1).re / k]];
        let rows: Vec<[C; 2]> = (0..g.len()).map(|i| [f.components[0][i], f.components[1][i]]).collect();
        let fd = robin_fd_solve(&rows, g.spacing().unwrap(), p.lambda, p.nu, p.mode.norm2(), d);
        let size = sol.u.max_abs();
        let err = (0..g.len())
            .map(|i| (0..2).map(|c| (sol.u.components[c][i] - fd[i][c]).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        println!("lambda {} relative difference {:e}", p.lambda, err / size);
        assert!(err < 1e-4 * size);
    }
}

#[test]
fn general_operator_matches_finite_differences() {
    let mode = FourierMode::new(2, 0);
    let p = SpectralPoint::new(C::new(5.0, 0.0), 1.0, mode).unwrap();
    let t = 0.25;
    let d = BoundaryOperatorD::new(t, t, t, &mode, 1.0).unwrap();
    let g = grid(40.0, 8193);
    let f = exp_field(&g, C::new(1.0, 0.0), C::new(1.0, 0.0));
    let sol = resolvent_apply_general(&f, &p, &d).unwrap();
    let rows: Vec<[C; 2]> = (0..g.len()).map(|i| [f.components[0][i], f.components[1][i]]).collect();
    let fd = robin_fd_solve(&rows, g.spacing().unwrap(), p.lambda, 1.0, 4.0, [[t, t], [t, t]]);
    let size = sol.u.max_abs();
    let err = (0..g.len())
        .map(|i| (0..2).map(|c| (sol.u.components[c][i] - fd[i][c]).norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    println!("general relative difference {:e}", err / size);
    assert!(err < 1e-3 * size);
    assert!(sol.boundary_residual < 1e-10);

    let neumann = resolvent_apply_general(&f, &p, &BoundaryOperatorD::zero()).unwrap();
    assert_eq!(neumann.u, free_part_v(&f, &p).unwrap());
}

#[test]
fn kernel_is_symmetric_on_node_sample() {
    for p in [point(3.0, 0.0, 1.0, 1, 0), point(2.0, 1.0, 0.1, 2, 1), point(50.0, 0.0, 0.1, 2, 1)] {
        let nodes: Vec<f64> = (0..20).map(|i| 0.15 * i as f64).collect();
        for &y in &nodes {
            for &z in &nodes {
                let a = resolvent_kernel(&p, y, z).unwrap();
                let b = resolvent_kernel(&p, z, y).unwrap().transpose();
                assert!((a - b).max_abs() < 1e-12);
            }
        }
    }
}

#[test]
fn correction_respects_tangential_structure() {
    let p = point(2.0, 1.0, 0.5, 2, 1);
    let g = grid(20.0, 2049);
    let shape = |z: f64| (-(z - 1.0).powi(2)).exp();
    // xi . f = 0: correction along xi_perp = (1, -2).
    let f = ModeField::from_fn(g.clone(), 2, |c, z| C::new(if c == 0 { 1.0 } else { -2.0 } * shape(z), 0.0));
    let sol = resolvent_apply(&f, &p).unwrap();
    let xi_dot_c = sol.c0[0] * 2.0 + sol.c0[1];
    assert!(xi_dot_c.norm() < 1e-14 * (sol.c0[0].norm() + sol.c0[1].norm()));
    assert!(sol.w.max_abs() > 0.0);
    // f parallel to xi: no correction.
    let f = ModeField::from_fn(g, 2, |c, z| C::new(if c == 0 { 2.0 } else { 1.0 } * shape(z), 0.0));
    let sol = resolvent_apply(&f, &p).unwrap();
    assert!(sol.w.max_abs() < 1e-14 * sol.v.max_abs());
    let zero = correction_w(&[C::new(0.0, 0.0); 2], &p).unwrap();
    assert_eq!(zero, [C::new(0.0, 0.0); 2]);
}

/// Max interior residual of `(lambda - nu Delta) u - f`, relative to `max |f|`.
fn interior_residual(p: &SpectralPoint, n: usize) -> f64 {
    let g = grid(20.0 / p.mu.re.min(1.0), n);
    let f = ModeField::from_fn(g.clone(), 2, |c, z| {
        if c == 0 {
            C::new((-(z - 2.0).powi(2)).exp(), 0.0)
        } else {
            C::new(0.0, z * (-z).exp())
        }
    });
    let sol = resolvent_apply(&f, p).unwrap();
    let mut worst = 0.0f64;
    for c in 0..2 {
        let d2 = derivative(&g, &sol.u.components[c], 2);
        for i in 1..n - 1 {
            let r = p.lambda * sol.u.components[c][i] - (d2[i] - sol.u.components[c][i] * p.mode.norm2()) * p.nu
                - f.components[c][i];
            worst = worst.max(r.norm());
        }
    }
    worst / f.max_abs()
}

#[test]
fn interior_residual_converges_at_second_order() {
    for p in [point(3.0, 0.0, 1.0, 1, 0), point(2.0, 1.0, 0.1, 2, 1), point(50.0, 0.0, 0.1, 1, 0)] {
        let r: Vec<f64> = [4097, 8193, 16385].iter().map(|&n| interior_residual(&p, n)).collect();
        println!("lambda {} residuals {r:?}", p.lambda);
        for w in r.windows(2) {
            assert!((3.5..4.5).contains(&(w[0] / w[1])), "{r:?}");
        }
    }
}

#[test]
fn bound_examples() {
    let cfg = BoundCheckConfig { trials: 20, seed: 11, n_nodes: 1025 };
    let low = check_resolvent_bound(&point(1.0, 0.0, 1.0, 1, 0), &cfg).unwrap();
    assert!(low.sup_l2 <= 5.0, "{low:?}");
    let large = check_resolvent_bound(&point(100.0, 0.0, 1.0, 1, 0), &cfg).unwrap();
    assert!(large.sup_l2 < 3.0, "{large:?}");
    let sweep: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&l| check_resolvent_bound(&point(l, 0.0, 1.0, 1, 0), &cfg).unwrap().sup_l2)
        .collect();
    println!("lambda sweep sup ratios {sweep:?}");
    assert!(sweep.iter().all(|s| s.is_finite() && *s < 5.0));
    let rising = sweep.windows(2).all(|w| w[1] >= w[0]);
    let falling = sweep.windows(2).all(|w| w[1] <= w[0]);
    assert!(rising || falling, "{sweep:?}");
}

#[test]
fn zero_trace_data_obey_the_heat_resolvent_bound() {
    for p in [point(3.0, 0.0, 1.0, 1, 0), point(2.0, 1.0, 0.1, 2, 1)] {
        let g = grid(20.0, 4097);
        let f1 = ModeField::from_fn(g.clone(), 2, |c, z| C::new((-(z - 1.0 - c as f64).powi(2)).exp(), 0.0));
        let f2 = ModeField::from_fn(g.clone(), 2, |_, z| C::new(0.0, (-(z - 3.0).powi(2) * 2.0).exp()));
        let (v1, v2) = (free_part_v(&f1, &p).unwrap(), free_part_v(&f2, &p).unwrap());
        let mut f = ModeField::zeros(g.clone(), 2);
        for c in 0..2 {
            let s = v1.components[c][0] / v2.components[c][0];
            for i in 0..g.len() {
                f.components[c][i] = f1.components[c][i] - s * f2.components[c][i];
            }
        }
        let sol = resolvent_apply(&f, &p).unwrap();
        assert!(sol.v.components[0][0].norm() < 1e-12 && sol.v.components[1][0].norm() < 1e-12);
        assert!(sol.w.max_abs() < 1e-10 * sol.v.max_abs());
        let shift = (p.lambda + p.nu * p.mode.norm2()).norm();
        let ratio = shift * sol.u.l2_norm() / f.l2_norm();
        println!("lambda {} ratio {ratio}", p.lambda);
        assert!(ratio <= 1.0 + 1e-6);
    }
}
