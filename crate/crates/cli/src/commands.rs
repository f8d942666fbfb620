//! The five subcommands.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stokes_halfspace::biot_savart::{check_biot_savart_roundtrip, check_trace_identities};
use stokes_halfspace::io::{fmt_f64, CsvTable};
use stokes_halfspace::kernels::*;
use stokes_halfspace::resolvent::{
    check_resolvent_bound, free_part_v, random_bumps, resolvent_apply, resolvent_apply_general, BoundCheckConfig,
    BoundaryOperatorD,
};
use stokes_halfspace::solver::{crank_nicolson_oracle, duhamel_solve, initial_only, CnConfig, DuhamelConfig, StokesProblem};
use stokes_halfspace::{Complex64 as C, FourierMode, HalfLineGrid, Mat2C, ModeField, SpectralPoint};

use crate::config::RunConfig;
use crate::CliError;

fn provenance(command: &str, cfg: &RunConfig) -> Vec<String> {
    let mut shown = serde_json::to_value(RunConfig { out: None, ..cfg.clone() }).expect("config serialises");
    if let Some(map) = shown.as_object_mut() {
        map.retain(|_, v| !v.is_null());
    }
    vec![format!("stokes-hs {} command={command}", env!("CARGO_PKG_VERSION")), format!("config={shown}")]
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

fn operator_line(d: &BoundaryOperatorD) -> String {
    format!("boundary=general du(0)=-D u(0) alpha={} beta={} gamma={}", d.alpha, d.beta, d.gamma)
}

fn bump_sum(bumps: &[(f64, f64, [C; 2])], c: usize, z: f64) -> C {
    bumps.iter().map(|(m, w, a)| a[c] * (-((z - m) / w).powi(2)).exp()).sum()
}

pub fn kernel(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = cfg.mode()?;
    let nu = cfg.nu()?;
    let t = cfg.time(0.5)?;
    let pts = cfg.grid("0:10:64")?.points();
    let d = cfg.boundary_operator(&mode)?;
    let opts = ContourOptions::default();
    let samples = match &d {
        Some(d) => sample_general_kernel_grid(t, nu, &mode, d, &pts, &pts, &opts)?,
        None => sample_kernel_grid(t, nu, &mode, &pts, &pts, &opts)?,
    };
    // pole root and numerator scale of the residual profile
    let pole = match &d {
        Some(d) if !d.is_zero() => Some((d.sigma(), 1.0)),
        Some(_) => None,
        None if mode.is_zero() => None,
        None => Some((mode.norm(), mode.norm())),
    };
    let mut sums: Vec<f64> = pts.iter().flat_map(|y| pts.iter().map(move |z| y + z)).collect();
    sums.sort_by(f64::total_cmp);
    sums.dedup();
    let mut quad_error = 0.0f64;
    if let Some((p, c)) = pole {
        for &s in &sums {
            let r = scalar_residual(t, nu, mode.norm2(), s, p, c, &opts)?;
            quad_error = quad_error.max(r.error * r.r2[0].log_scale.exp());
        }
    }
    let mut table = kernel_csv(&samples, &opts);
    table.prepend_provenance(provenance("kernel", cfg));
    if let Some(d) = &d {
        table.provenance(operator_line(d));
    }
    table.provenance(format!("quadrature_error_estimate={quad_error:e}"));
    emit(cfg, &table.render())
}

pub fn resolvent(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = cfg.mode()?;
    let point = SpectralPoint::new(cfg.lambda()?, cfg.nu()?, mode)?;
    let (z_max, n) = cfg.grid("0:20:2049")?.half_line()?;
    let grid = Arc::new(HalfLineGrid::uniform(z_max, n)?);
    let seed = cfg.seed.unwrap_or(0);
    let bumps = random_bumps(&mut ChaCha8Rng::seed_from_u64(seed));
    let f = ModeField::from_fn(grid, 2, |c, z| bump_sum(&bumps, c, z));
    let d = cfg.boundary_operator(&mode)?;
    let sol = match &d {
        Some(d) => resolvent_apply_general(&f, &point, d)?,
        None => resolvent_apply(&f, &point)?,
    };
    let mut table = CsvTable::new(&["z", "component", "u_re", "u_im", "du_re", "du_im"]);
    for line in provenance("resolvent", cfg) {
        table.provenance(line);
    }
    table.provenance(format!(
        "resolvent=neumann_free_part+wall_correction lambda={}{:+}i mu={}{:+}i data=gaussian_bumps seed={seed}",
        point.lambda.re, point.lambda.im, point.mu.re, point.mu.im
    ));
    if let Some(d) = &d {
        table.provenance(operator_line(d));
    }
    let warnings: Vec<String> = sol.warnings.iter().map(ToString::to_string).collect();
    table.provenance(format!("boundary_residual={:e} warnings=[{}]", sol.boundary_residual, warnings.join("; ")));
    for (i, &z) in sol.u.grid.nodes().iter().enumerate() {
        for c in 0..2 {
            let (u, du) = (sol.u.components[c][i], sol.du.components[c][i]);
            table.row(&[&fmt_f64(z), &c.to_string()], &[u.re, u.im, du.re, du.im]);
        }
    }
    emit(cfg, &table.render())
}

#[derive(Serialize)]
struct OracleReport {
    times: Vec<f64>,
    max_relative_difference: Vec<f64>,
    tolerance: f64,
    pass: bool,
    warnings: Vec<String>,
}

pub fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = cfg.mode()?;
    let nu = cfg.nu()?;
    let t_final = cfg.time(1.0)?;
    let (z_max, n) = cfg.grid("0:20:2049")?.half_line()?;
    let steps = cfg.steps.unwrap_or(4);
    if steps == 0 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    let seed = cfg.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tangential = random_bumps(&mut rng);
    let normal = random_bumps(&mut rng);
    let data = initial_only(move |z: f64| {
        [
            bump_sum(&tangential, 0, z),
            bump_sum(&tangential, 1, z),
            bump_sum(&normal, 0, z) * (1.0 - (-2.0 * z).exp()),
        ]
    });
    let problem = StokesProblem::new(mode, nu, Arc::new(data), t_final)?;
    let times: Vec<f64> = (1..=steps).map(|i| t_final * i as f64 / steps as f64).collect();
    let dcfg = DuhamelConfig { z_max, n_nodes: n, ..DuhamelConfig::default() };
    let tr = duhamel_solve(&problem, &times, &dcfg)?;
    let mut prov = provenance("solve", cfg);
    prov.push(format!(
        "solution=duhamel heat_part+residual_part+wall_term data=gaussian_bumps seed={seed} sigma_panels={}",
        dcfg.sigma_panels
    ));
    let csv = tr.to_csv(&prov).render();
    if cfg.oracle != Some(true) {
        return emit(cfg, &csv);
    }
    let cn = crank_nicolson_oracle(
        &problem,
        &times,
        &CnConfig { z_max, n_nodes: n, dt: cfg.dt.unwrap_or(1e-3), ..CnConfig::default() },
    )?;
    let tol = cfg.tol(1e-3)?;
    let diffs: Vec<f64> = (1..tr.times.len())
        .map(|i| {
            let size = cn.states[i].max_abs();
            tr.states[i].sub(&cn.states[i]).map(|d| d.max_abs() / size.max(f64::MIN_POSITIVE))
        })
        .collect::<Result<_, _>>()?;
    let report = OracleReport {
        times: times.clone(),
        pass: diffs.iter().all(|d| *d <= tol),
        max_relative_difference: diffs,
        tolerance: tol,
        warnings: tr.warnings.iter().chain(&cn.warnings).map(ToString::to_string).collect(),
    };
    let text = to_json(&report);
    if cfg.out.is_some() {
        emit(cfg, &csv)?;
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        emit(cfg, &csv)?;
        eprint!("{text}");
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Numerical("solution differs from the finite-difference reference beyond tolerance".into()))
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Check {
        Check { name, value, tolerance, pass: value.is_finite() && value < tolerance, detail: None }
    }

    fn with(mut self, detail: String) -> Check {
        self.detail = Some(detail);
        self
    }
}

#[derive(Serialize)]
struct VerifyReport {
    provenance: Vec<String>,
    checks: Vec<Check>,
    pass: bool,
}

fn rel(a: &Mat2C, b: &Mat2C) -> f64 {
    (*a - *b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn bound_sweep(quick: bool) -> BoundSweep {
    if quick {
        BoundSweep {
            nus: vec![1.0],
            modes: (1..=3).map(|k| FourierMode::new(k, 0)).collect(),
            times: vec![0.01, 0.1, 1.0],
            s_values: (0..=10).map(|i| i as f64).collect(),
            ..BoundSweep::default()
        }
    } else {
        BoundSweep::default()
    }
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = cfg.mode()?;
    let nu = cfg.nu()?;
    if mode.is_zero() {
        return Err(CliError::Config("verify needs a nonzero mode".into()));
    }
    let quick = cfg.quick == Some(true);
    let tol = cfg.tol(1e-6)?;
    let seed = cfg.seed.unwrap_or(0);
    let opts = ContourOptions::default();
    let mut checks = Vec::new();

    let rep = verify_kernel_bounds(&bound_sweep(quick))?;
    let (r1, r2) = rep.entries.iter().fold((0.0f64, 0.0f64), |a, e| (a.0.max(e.sup_r1), a.1.max(e.sup_r2)));
    let drift = if rep.all_finite { rep.max_drift } else { f64::INFINITY };
    checks.push(Check::below("kernel_bound_drift", drift, 0.1).with(format!(
        "theta0={} entries={} sup_r1={r1:e} sup_r2={r2:e}",
        rep.theta0,
        rep.entries.len()
    )));

    let bcfg = BoundCheckConfig { trials: if quick { 10 } else { 50 }, seed, n_nodes: 2049 };
    let base = nu * mode.norm2().max(1.0);
    let mut worst = 0.0f64;
    let mut sup = 0.0f64;
    for (scale, arg) in [(1.0, 0.0), (1.0, 0.5), (10.0, 0.75), (100.0, -0.75), (100.0, 0.0)] {
        let p = SpectralPoint::new(C::from_polar(scale * base, arg * PI), nu, mode)?;
        let r = check_resolvent_bound(&p, &bcfg)?;
        worst = worst.max(if r.sup_l2.is_finite() { r.drift } else { f64::INFINITY });
        sup = sup.max(r.sup_l2);
    }
    checks.push(Check::below("resolvent_bound_drift", worst, 0.1).with(format!("sup_l2={sup:e}")));

    let (mut decomp, mut arc, mut residue, mut wall) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let k = mode.norm();
    let wall_op = mode.perp_projector().scale_re(1.0 / k);
    for t in [0.05, 0.3, 1.0] {
        for (y, z) in [(0.0, 0.0), (0.3, 0.7), (1.5, 0.2)] {
            let a = green_by_contour(t, nu, &mode, y, z, &opts)?;
            decomp = decomp.max(rel(&a, &green_time(t, nu, &mode, y, z, &opts)?));
            let s = y + z;
            let r = residual_kernel(t, nu, &mode, s, 0, &opts)?.total();
            let wide = residual_kernel(t, nu, &mode, s, 0, &ContourOptions { arc_scale: 2.0, ..opts })?.total();
            arc = arc.max(rel(&wide, &r));
            residue = residue.max(rel(&residue_by_circle(t, nu, &mode, s, &opts)?, &residue_at_zero(&mode, s)?));
            let dg = residual_kernel(t, nu, &mode, y, 1, &opts)?.total();
            let kg = wall_op * green_time(t, nu, &mode, y, 0.0, &opts)?;
            wall = wall.max((dg + kg).max_abs() / dg.max_abs().max(kg.max_abs()));
        }
    }
    checks.push(Check::below("kernel_decomposition", decomp, tol));
    checks.push(Check::below("contour_independence", arc, 1e-8));
    checks.push(Check::below("residue_at_zero", residue, 1e-10));
    checks.push(Check::below("green_wall_condition", wall, tol));

    let (roundtrip, traces) = biot_savart_checks(&mode, seed, 8.0, 2049)?;
    checks.push(Check::below("biot_savart_roundtrip", roundtrip.relative_error, 1e-4));
    checks.push(Check::below("trace_identities", traces, 1e-6));

    let zero = BoundaryOperatorD::zero();
    let grid = Arc::new(HalfLineGrid::uniform(20.0, 1025)?);
    let f = ModeField::from_fn(grid, 2, |c, z| C::new((-(z - 1.0 - c as f64).powi(2)).exp(), 0.0));
    let p = SpectralPoint::new(C::new(2.0, 1.0), nu, mode)?;
    let v = free_part_v(&f, &p)?;
    let reduction = resolvent_apply_general(&f, &p, &zero)?.u.sub(&v)?.max_abs() / v.max_abs();
    let r0 = residual_kernel_general(0.3, nu, &mode, &zero, 0.5, 0, &opts)?.total().max_abs();
    checks.push(Check::below("general_zero_operator", reduction.max(r0), 1e-10));

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport { provenance: provenance("verify", cfg), checks, pass };
    emit(cfg, &to_json(&report))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numerical("some checks failed".into()))
    }
}

/// `phi = (z/L)^3 (1 - z/L)^6` on `[0, L]` and its first two derivatives.
fn profile(z: f64, l: f64) -> [f64; 3] {
    if z >= l {
        return [0.0; 3];
    }
    let (x, y) = (z / l, 1.0 - z / l);
    [
        x.powi(3) * y.powi(6),
        (3.0 * x * x * y.powi(6) - 6.0 * x.powi(3) * y.powi(5)) / l,
        (6.0 * x * y.powi(6) - 36.0 * x * x * y.powi(5) + 30.0 * x.powi(3) * y.powi(4)) / (l * l),
    ]
}

/// `h = curl (a phi)` and `omega = curl h` in closed form, with seeded `a`.
fn seeded_solenoidal(mode: &FourierMode, seed: u64, grid: Arc<HalfLineGrid>) -> (ModeField, ModeField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<C> = (0..3).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let l = 0.625 * grid.z_max();
    let [x1, x2] = mode.xi_f64();
    let (i1, i2) = (C::new(0.0, x1), C::new(0.0, x2));
    let k2 = mode.norm2();
    let h = ModeField::from_fn(grid.clone(), 3, |c, z| {
        let [p, dp, _] = profile(z, l);
        match c {
            0 => i2 * a[2] * p - a[1] * dp,
            1 => a[0] * dp - i1 * a[2] * p,
            _ => i1 * a[1] * p - i2 * a[0] * p,
        }
    });
    // curl curl A = grad div A - Laplacian A
    let div_a = i1 * a[0] + i2 * a[1];
    let omega = ModeField::from_fn(grid, 3, |c, z| {
        let [p, dp, d2p] = profile(z, l);
        let grad_div = div_a * p + a[2] * dp;
        match c {
            0 => i1 * grad_div + a[0] * (k2 * p - d2p),
            1 => i2 * grad_div + a[1] * (k2 * p - d2p),
            _ => div_a * dp + a[2] * (k2 * p),
        }
    });
    (h, omega)
}

fn biot_savart_checks(
    mode: &FourierMode,
    seed: u64,
    z_max: f64,
    n: usize,
) -> Result<(stokes_halfspace::biot_savart::RoundtripReport, f64), CliError> {
    let grid = Arc::new(HalfLineGrid::uniform(z_max, n)?);
    let (h, omega) = seeded_solenoidal(mode, seed, grid.clone());
    let roundtrip = check_biot_savart_roundtrip(&h, mode)?;
    let scale = omega.max_abs().max(f64::MIN_POSITIVE);
    let mut traces = 0.0f64;
    for c in &omega.components {
        let r = check_trace_identities(c, mode, &grid)?;
        traces = traces.max(r.dirichlet_error.max(r.neumann_error) / scale);
    }
    Ok((roundtrip, traces))
}

#[derive(Serialize)]
struct BiotSavartReport {
    provenance: Vec<String>,
    roundtrip_error: f64,
    divergence: f64,
    boundary_value: f64,
    trace_error: f64,
}

pub fn biot_savart(cfg: &RunConfig) -> Result<(), CliError> {
    let mode = cfg.mode()?;
    let (z_max, n) = cfg.grid("0:8:2049")?.half_line()?;
    let seed = cfg.seed.unwrap_or(0);
    let (r, traces) = biot_savart_checks(&mode, seed, z_max, n)?;
    let mut prov = provenance("biot-savart", cfg);
    prov.push(format!("field=curl(a phi) seed={seed} phi=(z/L)^3(1-z/L)^6 L={}", 0.625 * z_max));
    let report = BiotSavartReport {
        provenance: prov,
        roundtrip_error: r.relative_error,
        divergence: r.divergence,
        boundary_value: r.boundary_value,
        trace_error: traces,
    };
    emit(cfg, &to_json(&report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use stokes_halfspace::biot_savart::curl_mode;

    #[test]
    fn closed_form_vorticity_matches_discrete_curl() {
        let mode = FourierMode::new(2, -1);
        let err = |n| {
            let grid = Arc::new(HalfLineGrid::uniform(8.0, n).unwrap());
            let (h, omega) = seeded_solenoidal(&mode, 3, grid);
            let w = curl_mode(&h, &mode).unwrap();
            w.sub(&omega).unwrap().max_abs() / omega.max_abs()
        };
        let (coarse, fine) = (err(1025), err(2049));
        assert!(fine < 1e-4, "{fine}");
        assert!(coarse / fine > 3.5, "{coarse} {fine}");
    }
}
