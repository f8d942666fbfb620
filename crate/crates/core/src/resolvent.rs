//! Per-mode resolvent with the vorticity boundary condition and its general variant.

use crate::error::{Error, Result, Warning};
use crate::expkernel::{exp_sweeps, image_kernel_apply};
use crate::grid::{HalfLineGrid, ModeField};
use crate::mat2::{Mat2C, Vec2C};
use crate::spectral::{FourierMode, SpectralPoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type C = Complex64;

/// Symmetric rank-one boundary operator `D = [[alpha, gamma], [gamma, beta]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOperatorD {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BoundaryOperatorD {
    /// Validates `det D = 0`, `alpha, beta >= 0` and `alpha + beta <= c0 |xi|`.
    pub fn new(alpha: f64, beta: f64, gamma: f64, mode: &FourierMode, c0: f64) -> Result<Self> {
        if ![alpha, beta, gamma, c0].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidBoundaryOperator("non-finite entry".into()));
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(Error::HypothesisViolated(format!(
                "diagonal entries must be non-negative (alpha = {alpha}, beta = {beta})"
            )));
        }
        let det = alpha * beta - gamma * gamma;
        let scale = (alpha.abs() + beta.abs() + gamma.abs()).powi(2).max(f64::MIN_POSITIVE);
        if det.abs() > 1e-12 * scale {
            return Err(Error::HypothesisViolated(format!("det D = {det} is not zero")));
        }
        if alpha + beta > c0 * mode.norm() * (1.0 + 1e-12) {
            return Err(Error::HypothesisViolated(format!(
                "alpha + beta = {} exceeds C0 |xi| = {}",
                alpha + beta,
                c0 * mode.norm()
            )));
        }
        Ok(BoundaryOperatorD { alpha, beta, gamma })
    }

    /// From a full matrix; rejects asymmetric input.
    pub fn from_matrix(m: [[f64; 2]; 2], mode: &FourierMode, c0: f64) -> Result<Self> {
        if (m[0][1] - m[1][0]).abs() > 1e-14 * (m[0][1].abs() + m[1][0].abs()).max(1.0) {
            return Err(Error::InvalidBoundaryOperator("D must be symmetric".into()));
        }
        Self::new(m[0][0], m[1][1], m[0][1], mode, c0)
    }

    /// `P / |xi|`, which turns the general condition into the vorticity condition.
    pub fn vorticity(mode: &FourierMode) -> Result<Self> {
        if mode.is_zero() {
            return Err(Error::ZeroModeUnsupported);
        }
        let k = mode.norm();
        let [a, b] = mode.xi_f64();
        Ok(BoundaryOperatorD { alpha: b * b / k, beta: a * a / k, gamma: -a * b / k })
    }

    pub fn zero() -> Self {
        BoundaryOperatorD { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0 && self.gamma == 0.0
    }

    pub fn matrix(&self) -> Mat2C {
        Mat2C::from_real([[self.alpha, self.gamma], [self.gamma, self.beta]])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSolution {
    pub point: SpectralPoint,
    /// Neumann free part.
    pub v: ModeField,
    /// Boundary correction `c0 e^{-mu z}`.
    pub w: ModeField,
    pub u: ModeField,
    /// `du/dz`.
    pub du: ModeField,
    pub c0: Vec2C,
    /// `|du(0) + K u(0)|` with `K = P/|xi|` or `D`.
    pub boundary_residual: f64,
    pub warnings: Vec<Warning>,
}

fn check_grid(f: &ModeField) -> Result<()> {
    if f.grid.len() < 3 {
        return Err(Error::GridTooSmall { min: 3, got: f.grid.len() });
    }
    if !f.is_finite() {
        return Err(Error::IncompatibleData("non-finite samples".into()));
    }
    Ok(())
}

/// Free (Neumann) part and its derivative.
fn free_part_with_derivative(f: &ModeField, point: &SpectralPoint) -> (ModeField, ModeField, Vec<C>) {
    let mu = point.mu;
    let pref = 1.0 / (2.0 * point.nu * mu);
    let mut v = Vec::with_capacity(f.n_components());
    let mut dv = Vec::with_capacity(f.n_components());
    let mut moments = Vec::with_capacity(f.n_components());
    for comp in &f.components {
        let (val, der, s) = image_kernel_apply(&f.grid, comp, mu, 1.0);
        v.push(val.into_iter().map(|x| x * pref).collect());
        dv.push(der.into_iter().map(|x| x * pref).collect());
        moments.push(s);
    }
    (
        ModeField { grid: f.grid.clone(), components: v },
        ModeField { grid: f.grid.clone(), components: dv },
        moments,
    )
}

/// `v(y) = (1/(2 nu mu)) int (e^{-mu|z-y|} + e^{-mu(y+z)}) f(z) dz` for each component.
pub fn free_part_v(f: &ModeField, point: &SpectralPoint) -> Result<ModeField> {
    check_grid(f)?;
    Ok(free_part_with_derivative(f, point).0)
}

/// Like [`free_part_v`] but fails when the grid-halving error estimate exceeds `tol`
/// relative to the solution maximum.
pub fn free_part_v_checked(f: &ModeField, point: &SpectralPoint, tol: f64) -> Result<ModeField> {
    let v = free_part_v(f, point)?;
    if let Some(coarse) = f.grid.coarsen() {
        let coarse = Arc::new(coarse);
        let fc = ModeField {
            grid: coarse.clone(),
            components: f.components.iter().map(|c| c.iter().step_by(2).copied().collect()).collect(),
        };
        let vc = free_part_v(&fc, point)?;
        let mut diff: f64 = 0.0;
        for (a, b) in v.components.iter().zip(&vc.components) {
            for (x, y) in a.iter().step_by(2).zip(b) {
                diff = diff.max((x - y).norm());
            }
        }
        let estimate = diff / 3.0 / v.max_abs().max(f64::MIN_POSITIVE);
        if estimate > tol {
            return Err(Error::QuadratureUnderresolved { estimate, tolerance: tol });
        }
    }
    Ok(v)
}

/// `B = (mu - |xi|) I + xi xi^T / |xi|`.
pub fn boundary_matrix_b(point: &SpectralPoint) -> Result<Mat2C> {
    if point.mode.is_zero() {
        return Err(Error::ZeroModeUnsupported);
    }
    let k = point.k();
    let b = Mat2C::IDENTITY.scale(point.mu - k) + point.mode.outer().scale_re(1.0 / k);
    let det = b.det();
    if det.norm() <= 1e-12 * (point.mu.norm() + k).powi(2) {
        return Err(Error::SingularB { det: det.norm() });
    }
    Ok(b)
}

/// Coefficient `c0` of the boundary correction `w = c0 e^{-mu z}`.
pub fn correction_w(v0: &Vec2C, point: &SpectralPoint) -> Result<Vec2C> {
    let b = boundary_matrix_b(point)?;
    let k = point.k();
    let xi = point.mode.xi_f64();
    let dot = v0[0] * xi[0] + v0[1] * xi[1];
    let rhs = [v0[0] * k - dot * (xi[0] / k), v0[1] * k - dot * (xi[1] / k)];
    let inv = b.inverse().ok_or(Error::SingularB { det: b.det().norm() })?;
    Ok(inv.mul_vec(&rhs))
}

fn assemble(
    f: &ModeField,
    point: &SpectralPoint,
    v: ModeField,
    dv: ModeField,
    c0: Vec2C,
    bc: Mat2C,
) -> ResolventSolution {
    let grid = f.grid.clone();
    let mu = point.mu;
    let n = grid.len();
    let mut w = ModeField::zeros(grid.clone(), v.n_components());
    let mut u = v.clone();
    let mut du = dv.clone();
    for (c, &coef) in c0.iter().enumerate().take(v.n_components().min(2)) {
        for i in 0..n {
            let e = (-mu * grid.nodes()[i]).exp() * coef;
            w.components[c][i] = e;
            u.components[c][i] += e;
            du.components[c][i] -= mu * e;
        }
    }
    let u0 = [u.components[0][0], u.components[1][0]];
    let du0 = [du.components[0][0], du.components[1][0]];
    let ku0 = bc.mul_vec(&u0);
    let res = ((du0[0] + ku0[0]).norm_sqr() + (du0[1] + ku0[1]).norm_sqr()).sqrt();
    let boundary_residual = res;
    let mut warnings = Vec::new();
    if let Some(wn) = f.truncation_warning() {
        warnings.push(wn);
    }
    ResolventSolution { point: *point, v, w, u, du, c0, boundary_residual, warnings }
}

fn check_tangential(f: &ModeField) -> Result<()> {
    if f.n_components() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "expected 2 tangential components, got {}",
            f.n_components()
        )));
    }
    Ok(())
}

/// `u = (lambda - nu Delta_xi)^{-1} f` with `du(0) = -(1/|xi|) P u(0)`.
///
/// For the zero mode only the Neumann part is returned.
pub fn resolvent_apply(f: &ModeField, point: &SpectralPoint) -> Result<ResolventSolution> {
    check_tangential(f)?;
    check_grid(f)?;
    if point.lambda == C::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    let (v, dv, _) = free_part_with_derivative(f, point);
    if point.mode.is_zero() {
        return Ok(assemble(f, point, v, dv, [C::new(0.0, 0.0); 2], Mat2C::ZERO));
    }
    let k = point.k();
    if (point.mu - k).norm() <= 1e-12 * k {
        return Err(Error::PoleHit(format!("mu = |xi| = {k}")));
    }
    let v0 = [v.components[0][0], v.components[1][0]];
    let c0 = correction_w(&v0, point)?;
    let bc = point.mode.perp_projector().scale_re(1.0 / k);
    Ok(assemble(f, point, v, dv, c0, bc))
}

/// Resolvent with `du(0) = -D u(0)` for a rank-one `D`.
pub fn resolvent_apply_general(f: &ModeField, point: &SpectralPoint, d: &BoundaryOperatorD) -> Result<ResolventSolution> {
    check_tangential(f)?;
    check_grid(f)?;
    if point.lambda == C::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    let (v, dv, moments) = free_part_with_derivative(f, point);
    let sigma = d.sigma();
    let mu = point.mu;
    if d.is_zero() {
        return Ok(assemble(f, point, v, dv, [C::new(0.0, 0.0); 2], Mat2C::ZERO));
    }
    if (mu - sigma).norm() <= 1e-12 * sigma.max(mu.norm()) {
        return Err(Error::PoleHit(format!("mu = alpha + beta = {sigma}")));
    }
    let coef = 1.0 / (point.nu * mu * (mu - sigma));
    let c0 = d.matrix().scale(coef).mul_vec(&[moments[0], moments[1]]);
    Ok(assemble(f, point, v, dv, c0, d.matrix()))
}

/// Resolvent Green matrix `H I + R` at `(y, z)`.
pub fn resolvent_kernel(point: &SpectralPoint, y: f64, z: f64) -> Result<Mat2C> {
    if point.lambda == C::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    let mu = point.mu;
    let nu = point.nu;
    let h = ((-mu * (y - z).abs()).exp() + (-mu * (y + z)).exp()) / (2.0 * nu * mu);
    let mut g = Mat2C::IDENTITY.scale(h);
    if !point.mode.is_zero() {
        let k = point.k();
        if (mu - k).norm() <= 1e-12 * k {
            return Err(Error::PoleHit(format!("mu = |xi| = {k}")));
        }
        let coef = (mu + k) / (mu * point.lambda * k) * (-mu * (y + z)).exp();
        g += point.mode.perp_projector().scale(coef);
    }
    Ok(g)
}

/// Grid on `[0, 20 / min(1, Re mu)]` with 2049 nodes.
pub fn default_grid(point: &SpectralPoint) -> Result<HalfLineGrid> {
    HalfLineGrid::uniform(20.0 / point.mu.re.min(1.0), 2049)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub n_nodes: usize,
}

impl Default for BoundCheckConfig {
    fn default() -> Self {
        BoundCheckConfig { trials: 50, seed: 0, n_nodes: 2049 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventBoundReport {
    pub point: SpectralPoint,
    /// `sup |lambda + nu |xi|^2| ||u|| / ||f||`.
    pub sup_l2: f64,
    /// `sup sqrt(nu) |lambda + nu |xi|^2|^{1/2} ||du/dz|| / ||f||`.
    pub sup_h1: f64,
    pub sup_l2_refined: f64,
    pub sup_h1_refined: f64,
    /// Largest relative change of the two suprema under grid doubling.
    pub drift: f64,
    pub trials: usize,
}

/// Sum of a few Gaussian bumps with seeded complex amplitudes.
pub fn random_bumps(rng: &mut ChaCha8Rng) -> Vec<(f64, f64, [C; 2])> {
    let m = rng.random_range(1..=3);
    (0..m)
        .map(|_| {
            let centre = rng.random_range(0.0..4.0);
            let width = rng.random_range(0.2..1.5);
            let amp = [
                C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ];
            (centre, width, amp)
        })
        .collect()
}

fn bumps_field(grid: Arc<HalfLineGrid>, bumps: &[(f64, f64, [C; 2])]) -> ModeField {
    ModeField::from_fn(grid, 2, |c, z| {
        bumps
            .iter()
            .map(|(m, w, a)| a[c] * (-((z - m) / w).powi(2)).exp())
            .sum()
    })
}

fn bound_sups(point: &SpectralPoint, grid: Arc<HalfLineGrid>, data: &[Vec<(f64, f64, [C; 2])>]) -> Result<(f64, f64)> {
    let shift = (point.lambda + point.nu * point.mode.norm2()).norm();
    let ratios: Vec<(f64, f64)> = data
        .par_iter()
        .map(|bumps| {
            let f = bumps_field(grid.clone(), bumps);
            let sol = resolvent_apply(&f, point)?;
            let nf = f.l2_norm();
            Ok((
                shift * sol.u.l2_norm() / nf,
                (point.nu * shift).sqrt() * sol.du.l2_norm() / nf,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.iter().fold((0.0f64, 0.0f64), |a, r| (a.0.max(r.0), a.1.max(r.1))))
}

/// Empirical resolvent-bound certificate over seeded random data.
pub fn check_resolvent_bound(point: &SpectralPoint, cfg: &BoundCheckConfig) -> Result<ResolventBoundReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let data: Vec<_> = (0..cfg.trials).map(|_| random_bumps(&mut rng)).collect();
    let z_max = 20.0 / point.mu.re.min(1.0);
    let grid = Arc::new(HalfLineGrid::uniform(z_max, cfg.n_nodes)?);
    let fine = Arc::new(grid.refine()?);
    let (l2, h1) = bound_sups(point, grid, &data)?;
    let (l2r, h1r) = bound_sups(point, fine, &data)?;
    let drift = ((l2 - l2r).abs() / l2r).max((h1 - h1r).abs() / h1r);
    Ok(ResolventBoundReport {
        point: *point,
        sup_l2: l2,
        sup_h1: h1,
        sup_l2_refined: l2r,
        sup_h1_refined: h1r,
        drift,
        trials: cfg.trials,
    })
}

/// `int_0^Z e^{-mu z} f(z) dz` per component, exact for piecewise-linear data.
pub fn exponential_moment(f: &ModeField, mu: C) -> Vec<C> {
    f.components.iter().map(|c| exp_sweeps(&f.grid, c, mu).moment).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64, im: f64, nu: f64, a: i64, b: i64) -> SpectralPoint {
        SpectralPoint::new(C::new(re, im), nu, FourierMode::new(a, b)).unwrap()
    }

    #[test]
    fn b_matrix_for_unit_mode() {
        let p = pt(3.0, 0.0, 1.0, 1, 0);
        let b = boundary_matrix_b(&p).unwrap();
        assert!((b - Mat2C::from_real([[2.0, 0.0], [0.0, 1.0]])).max_abs() < 1e-15);
        assert!((b.det() - p.mu * (p.mu - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn b_matrix_diagonal_mode() {
        let p = pt(3.0, 0.0, 1.0, 1, 1);
        let b = boundary_matrix_b(&p).unwrap();
        let k = 2f64.sqrt();
        let mu = p.mu.re;
        let want = Mat2C::from_real([[mu - k + 1.0 / k, 1.0 / k], [1.0 / k, mu - k + 1.0 / k]]);
        assert!((b - want).max_abs() < 1e-14);
        assert!((b.det() - p.mu * (p.mu - k)).norm() < 1e-13);
    }

    #[test]
    fn b_singular_and_zero_mode() {
        let p = SpectralPoint { lambda: C::new(0.0, 0.0), nu: 1.0, mode: FourierMode::new(1, 0), mu: C::new(1.0, 0.0) };
        assert!(matches!(boundary_matrix_b(&p), Err(Error::SingularB { .. })));
        let p = pt(1.0, 0.0, 1.0, 0, 0);
        assert!(matches!(boundary_matrix_b(&p), Err(Error::ZeroModeUnsupported)));
    }

    #[test]
    fn correction_examples() {
        let p = pt(3.0, 0.0, 1.0, 1, 0);
        let c0 = correction_w(&[C::new(0.0, 0.0), C::new(1.0, 0.0)], &p).unwrap();
        assert!((c0[0]).norm() < 1e-15 && (c0[1] - 1.0).norm() < 1e-15);
        let c0 = correction_w(&[C::new(1.0, 0.0), C::new(0.0, 0.0)], &p).unwrap();
        assert!(c0[0].norm() + c0[1].norm() < 1e-15);
    }

    #[test]
    fn kernel_at_origin() {
        let p = pt(3.0, 0.0, 1.0, 1, 0);
        let g = resolvent_kernel(&p, 0.0, 0.0).unwrap();
        assert!((g - Mat2C::from_real([[0.5, 0.0], [0.0, 1.0]])).max_abs() < 1e-15);
    }

    #[test]
    fn kernel_is_symmetric() {
        let p = pt(2.0, 1.0, 0.1, 2, 1);
        for &(y, z) in &[(0.1, 0.7), (1.3, 0.2), (0.0, 2.0)] {
            let a = resolvent_kernel(&p, y, z).unwrap();
            let b = resolvent_kernel(&p, z, y).unwrap().transpose();
            assert!((a - b).max_abs() < 1e-15);
        }
    }

    #[test]
    fn hypothesis_checks() {
        let m = FourierMode::new(1, 1);
        assert!(BoundaryOperatorD::new(1.0, 1.0, 1.0, &m, 2.0).is_ok());
        assert!(matches!(BoundaryOperatorD::new(1.0, 1.0, 0.5, &m, 2.0), Err(Error::HypothesisViolated(_))));
        assert!(matches!(BoundaryOperatorD::new(-1.0, -1.0, 1.0, &m, 2.0), Err(Error::HypothesisViolated(_))));
        assert!(matches!(BoundaryOperatorD::new(2.0, 2.0, 2.0, &m, 1.0), Err(Error::HypothesisViolated(_))));
        assert!(matches!(
            BoundaryOperatorD::from_matrix([[1.0, 1.0], [0.5, 1.0]], &m, 2.0),
            Err(Error::InvalidBoundaryOperator(_))
        ));
    }

    #[test]
    fn vorticity_operator_is_admissible() {
        for (a, b) in [(1, 0), (2, 1), (-3, 4)] {
            let m = FourierMode::new(a, b);
            let d = BoundaryOperatorD::vorticity(&m).unwrap();
            let again = BoundaryOperatorD::new(d.alpha, d.beta, d.gamma, &m, 1.0).unwrap();
            assert!((again.sigma() - m.norm()).abs() < 1e-14);
            let p = m.perp_projector().scale_re(1.0 / m.norm());
            assert!((d.matrix() - p).max_abs() < 1e-15);
        }
    }

    #[test]
    fn zero_lambda_rejected() {
        let g = Arc::new(HalfLineGrid::uniform(5.0, 11).unwrap());
        let f = ModeField::zeros(g, 2);
        let p = SpectralPoint { lambda: C::new(0.0, 0.0), nu: 1.0, mode: FourierMode::new(1, 0), mu: C::new(1.0, 0.0) };
        assert!(matches!(resolvent_apply(&f, &p), Err(Error::ZeroLambda)));
    }
}
