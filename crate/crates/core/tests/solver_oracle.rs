//! Duhamel solver and finite-difference reference against manufactured and closed-form solutions.
#![allow(clippy::needless_range_loop)]

mod common;

use std::sync::Arc;
use std::time::Instant;

use stokes_halfspace::solver::{
    crank_nicolson_oracle, crank_nicolson_run, duhamel_solve, initial_only, propagate, uniqueness_demo,
    AnalyticData, CnConfig, DuhamelConfig, StokesProblem, Trajectory,
};
use stokes_halfspace::{Complex64 as C, FourierMode, HalfLineGrid, ModeField};

const NU: f64 = 0.1;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// `omega_tau = e^{-t} e^{-2z} (1, 1)`, `omega_3 = e^{-t} z e^{-z}` at `xi = (1, 0)`.
fn manufactured(t: f64, z: f64) -> [C; 3] {
    let e = (-t).exp();
    [c(e * (-2.0 * z).exp()), c(e * (-2.0 * z).exp()), c(e * z * (-z).exp())]
}

fn manufactured_problem() -> StokesProblem {
    let data = AnalyticData {
        initial: |z: f64| manufactured(0.0, z),
        forcing: Some(|t: f64, z: f64| {
            let w = manufactured(t, z);
            let e = (-t).exp() * (-z).exp();
            [w[0] * -(1.0 + 3.0 * NU), w[1] * -(1.0 + 3.0 * NU), c(e * (2.0 * NU - z))]
        }),
        boundary: Some(|t: f64| [c(2.0 * NU * (-t).exp()), c(NU * (-t).exp())]),
    };
    StokesProblem::new(FourierMode::new(1, 0), NU, Arc::new(data), 1.0).unwrap()
}

/// Max-norm error against the manufactured solution, relative to its maximum.
fn error_vs_exact(tr: &Trajectory, i: usize) -> f64 {
    let t = tr.times[i];
    let s = &tr.states[i];
    let mut err = 0.0f64;
    let mut size = 0.0f64;
    for (j, &z) in s.grid.nodes().iter().enumerate() {
        let e = manufactured(t, z);
        for k in 0..3 {
            err = err.max((s.components[k][j] - e[k]).norm());
            size = size.max(e[k].norm());
        }
    }
    err / size
}

#[test]
fn crank_nicolson_recovers_manufactured_solution_at_second_order() {
    let p = manufactured_problem();
    let coarse = CnConfig { n_nodes: 1001, dt: 2e-3, ..CnConfig::default() };
    let fine = CnConfig { n_nodes: 2001, dt: 1e-3, ..CnConfig::default() };
    let e1 = error_vs_exact(&crank_nicolson_oracle(&p, &[1.0], &coarse).unwrap(), 1);
    let e2 = error_vs_exact(&crank_nicolson_oracle(&p, &[1.0], &fine).unwrap(), 1);
    println!("cn errors {e1:e} {e2:e} ratio {}", e1 / e2);
    assert!(e2 < 1e-4);
    assert!((3.5..4.5).contains(&(e1 / e2)), "ratio {}", e1 / e2);
}

#[test]
fn duhamel_recovers_manufactured_solution() {
    let p = manufactured_problem();
    let start = Instant::now();
    let tr = duhamel_solve(&p, &[0.25, 1.0], &DuhamelConfig::default()).unwrap();
    println!("duhamel {:?}", start.elapsed());
    assert_eq!(tr.times, vec![0.0, 0.25, 1.0]);
    for i in 1..tr.times.len() {
        let e = error_vs_exact(&tr, i);
        println!("t = {} error {e:e}", tr.times[i]);
        assert!(e < 1e-4, "t = {}: {e:e}", tr.times[i]);
    }
}

fn gaussian(z: f64, centre: f64, var: f64) -> f64 {
    (-(z - centre).powi(2) / (4.0 * var)).exp()
}

fn max_rel(a: &[C], b: &[C]) -> f64 {
    let size = b.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm())) / size
}

#[test]
fn normal_component_follows_dirichlet_heat_flow() {
    let (nu, t) = (0.5, 1.0);
    let mode = FourierMode::new(1, 0);
    let data = initial_only(|z: f64| [c(0.0), c(0.0), c(gaussian(z, 3.0, 1.0) - gaussian(z, -3.0, 1.0))]);
    let p = StokesProblem::new(mode, nu, Arc::new(data), t).unwrap();
    let cfg = DuhamelConfig { n_nodes: 8193, ..DuhamelConfig::default() };
    let tr = duhamel_solve(&p, &[t], &cfg).unwrap();
    let var = 1.0 + nu * t;
    let damp = (-nu * t).exp() / var.sqrt();
    let exact: Vec<C> =
        tr.grid().nodes().iter().map(|&z| c(damp * (gaussian(z, 3.0, var) - gaussian(z, -3.0, var)))).collect();
    let e = max_rel(&tr.states[1].components[2], &exact);
    println!("dirichlet error {e:e}");
    assert!(e < 1e-6);
    assert_eq!(tr.states[1].max_abs(), tr.states[1].components[2].iter().fold(0.0f64, |m, v| m.max(v.norm())));
}

#[test]
fn unforced_evolution_matches_crank_nicolson() {
    let mode = FourierMode::new(1, 0);
    let data = initial_only(|z: f64| [c(0.0), c(gaussian(z, 2.0, 0.25)), c(0.0)]);
    let p = StokesProblem::new(mode, NU, Arc::new(data), 1.0).unwrap();
    let times = [0.1, 0.5, 1.0];
    let d = duhamel_solve(&p, &times, &DuhamelConfig::default()).unwrap();
    let cn = crank_nicolson_oracle(&p, &times, &CnConfig { n_nodes: 4097, dt: 1e-3, ..CnConfig::default() }).unwrap();
    for i in 1..d.times.len() {
        let coarse: Vec<C> = (0..d.grid().len()).map(|j| cn.states[i].components[1][2 * j]).collect();
        let e = max_rel(&d.states[i].components[1], &coarse);
        println!("t = {} rel error {e:e}", d.times[i]);
        assert!(e < 1e-3);
    }
}

#[test]
fn tangential_energy_never_increases() {
    let mode = FourierMode::new(2, 1);
    let data = initial_only(|z: f64| [c(gaussian(z, 1.0, 0.1)), C::new(0.0, gaussian(z, 0.5, 0.3)), c(0.0)]);
    let p = StokesProblem::new(mode, 0.3, Arc::new(data), 1.0).unwrap();
    let run = crank_nicolson_run(&p, &[0.25, 0.5, 1.0], &CnConfig { n_nodes: 2049, dt: 1e-3, ..CnConfig::default() }).unwrap();
    let worst = run.step_energy.windows(2).map(|w| (w[1] - w[0]) / w[0]).fold(f64::NEG_INFINITY, f64::max);
    println!("largest relative step increase {worst:e}");
    assert!(worst <= 1e-10);
    let d = duhamel_solve(&p, &[0.25, 0.5, 1.0], &DuhamelConfig::default()).unwrap();
    let norms: Vec<f64> = (0..d.times.len()).map(|i| d.tangential_norm(i)).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0]), "{norms:?}");
}

#[test]
fn xi_component_stays_zero_for_perpendicular_data() {
    let mode = FourierMode::new(2, 1);
    let perp = [c(-1.0), c(2.0)];
    let data = AnalyticData {
        initial: move |z: f64| [perp[0] * gaussian(z, 1.0, 0.2), perp[1] * gaussian(z, 1.0, 0.2), c(0.0)],
        forcing: None::<fn(f64, f64) -> [C; 3]>,
        boundary: Some(move |t: f64| [perp[0] * (0.1 * (-t).exp()), perp[1] * (0.1 * (-t).exp())]),
    };
    let p = StokesProblem::new(mode, 0.2, Arc::new(data), 1.0).unwrap();
    let times = [0.5, 1.0];
    let cn = crank_nicolson_oracle(&p, &times, &CnConfig { n_nodes: 2049, dt: 1e-3, ..CnConfig::default() }).unwrap();
    let d = duhamel_solve(&p, &times, &DuhamelConfig::default()).unwrap();
    for tr in [&cn, &d] {
        for i in 1..tr.times.len() {
            let dot = tr.xi_dot_tangential(i).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let size = tr.states[i].max_abs();
            println!("{} t = {} |xi.omega| / |omega| = {:e}", tr.method, tr.times[i], dot / size);
            assert!(dot < 1e-8 * size);
        }
    }
}

#[test]
fn semigroup_law_holds_for_the_green_matrix() {
    let mode = FourierMode::new(1, 1);
    let grid = Arc::new(HalfLineGrid::uniform(20.0, 2049).unwrap());
    let f = ModeField::from_fn(grid, 3, |k, z| match k {
        0 => c(gaussian(z, 1.0, 0.2)),
        1 => C::new(0.0, z * (-z).exp()),
        _ => c(z * z * (-z).exp()),
    });
    let opts = Default::default();
    let two = propagate(&propagate(&f, 0.3, 0.5, &mode, &opts).unwrap(), 0.2, 0.5, &mode, &opts).unwrap();
    let one = propagate(&f, 0.5, 0.5, &mode, &opts).unwrap();
    let err = two.sub(&one).unwrap().max_abs() / one.max_abs();
    println!("semigroup error {err:e}");
    assert!(err < 1e-4);
}

#[test]
fn state_approaches_initial_data_at_half_order() {
    let mode = FourierMode::new(1, 0);
    let tent = |z: f64| (1.0 - (z - 2.0).abs()).max(0.0);
    let data = initial_only(move |z: f64| [c(tent(z)), c(0.5 * tent(z)), c(0.0)]);
    let p = StokesProblem::new(mode, 1.0, Arc::new(data), 0.01).unwrap();
    let cfg = DuhamelConfig { z_max: 10.0, n_nodes: 8193, ..DuhamelConfig::default() };
    let tr = duhamel_solve(&p, &[1e-4, 1e-3, 1e-2], &cfg).unwrap();
    let errs: Vec<f64> = (1..4).map(|i| tr.states[i].sub(&tr.states[0]).unwrap().max_abs()).collect();
    let rates: Vec<f64> = errs.windows(2).map(|w| (w[1] / w[0]).log10()).collect();
    println!("errors {errs:?} rates {rates:?}");
    assert!(rates.iter().all(|r| (0.4..=0.6).contains(r)));
}

#[test]
fn noise_does_not_grow() {
    let cfg = CnConfig { n_nodes: 2049, dt: 1e-3, ..CnConfig::default() };
    let r = uniqueness_demo(FourierMode::new(1, 1), NU, 1e-12, 7, &cfg).unwrap();
    println!("norms {:?}", r.norms);
    assert!(r.no_growth());
    assert!(*r.norms.last().unwrap() <= 1e-12);
    assert!(r.max_step_growth <= 1.0 + 1e-10);
    assert!(r.xi_dot_norms.iter().all(|&n| n <= 1e-12));
}

#[test]
fn parallel_tangential_data_follows_neumann_heat() {
    let mode = FourierMode::new(1, 2);
    let (nu, t) = (0.2, 1.0);
    let data = initial_only(|z: f64| [c(gaussian(z, 0.0, 0.25)), c(2.0 * gaussian(z, 0.0, 0.25)), c(0.0)]);
    let p = StokesProblem::new(mode, nu, Arc::new(data), t).unwrap();
    let tr = crank_nicolson_oracle(&p, &[t], &CnConfig { n_nodes: 4097, dt: 1e-3, ..CnConfig::default() }).unwrap();
    let var = 0.25 + nu * t;
    let amp = 5.0 * (-5.0 * nu * t).exp() * (0.25 / var).sqrt();
    let exact: Vec<C> = tr.grid().nodes().iter().map(|&z| c(amp * gaussian(z, 0.0, var))).collect();
    let e = max_rel(&tr.xi_dot_tangential(1), &exact);
    println!("neumann reduction error {e:e}");
    assert!(e < 1e-5);
}

#[test]
fn wall_value_of_normal_component_is_corrected_or_rejected() {
    use stokes_halfspace::Warning;
    let mode = FourierMode::new(1, 0);
    let small = initial_only(|z: f64| [c(0.0), c(0.0), c(z * (-z).exp() + 1e-4)]);
    let p = StokesProblem::new(mode, NU, Arc::new(small), 1.0).unwrap();
    let cfg = CnConfig { n_nodes: 201, dt: 1e-2, ..CnConfig::default() };
    let tr = crank_nicolson_oracle(&p, &[0.1], &cfg).unwrap();
    assert!(tr.warnings.iter().any(|w| matches!(w, Warning::CompatibilityCorrection { magnitude } if (*magnitude - 1e-4).abs() < 1e-12)));
    assert_eq!(tr.states[0].components[2][0], c(0.0));
    let big = initial_only(|_z: f64| [c(0.0), c(0.0), c(1.0)]);
    let p = StokesProblem::new(mode, NU, Arc::new(big), 1.0).unwrap();
    assert!(duhamel_solve(&p, &[0.1], &DuhamelConfig::default()).is_err());
}
