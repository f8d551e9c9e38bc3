//! Independent verification oracles for computed eigenpairs.
//!
//! Every solver result is checked against structure the equation imposes:
//! the Rellich-Pohozaev boundary identity, scaling invariance of the
//! sup-norm ratio, the pointwise Picone inequalities, and the definitional
//! identities (unit norm, sign, energy) of a first eigenpair.

use serde::{Deserialize, Serialize};

use crate::core::{pohozaev_constant, unit_ball_volume, ProblemParams, QEigenpair, SignClass};
use crate::error::{Error, Result};
use crate::grid2d::{apply_laplacian, GridField};
use crate::radial::RadialProfile;

/// Outcome of one check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound_or_target: f64,
    pub tolerance: f64,
    /// Solver provenance and sub-check detail.
    pub context: String,
}

impl CheckReport {
    fn relative(name: &str, measured: f64, target: f64, tol: f64, context: String) -> Self {
        let mismatch = (measured - target).abs() / target.abs().max(f64::MIN_POSITIVE);
        Self {
            name: name.into(),
            passed: mismatch <= tol,
            measured,
            bound_or_target: target,
            tolerance: tol,
            context,
        }
    }

    /// Relative mismatch against the target.
    pub fn mismatch(&self) -> f64 {
        (self.measured - self.bound_or_target).abs() / self.bound_or_target.abs().max(f64::MIN_POSITIVE)
    }
}

/// Pohozaev identity for a radial ball pair: with unit `L^q` norm,
/// `lambda = C_(q,N) N omega_N R^N u'(R)^2`.
pub fn pohozaev_check_radial(
    pair: &QEigenpair<RadialProfile>,
    params: &ProblemParams,
    tol: f64,
) -> CheckReport {
    let profile = &pair.eigenfunction;
    let n = params.n() as f64;
    let r = profile.radius();
    let slope = profile.boundary_slope();
    let boundary = n * unit_ball_volume(params.n()) * r.powf(n) * slope * slope;
    let measured = pohozaev_constant(params) * boundary;
    let target = pair.lambda * pair.lq_norm * pair.lq_norm;
    CheckReport::relative(
        "pohozaev-radial",
        measured,
        target,
        tol,
        format!("ball R={r}, N={}, q={}, boundary slope {slope:.6e}", params.n(), params.q()),
    )
}

/// Pohozaev identity for a grid pair on a full rectangle, coordinates
/// centered at the rectangle midpoint (the identity needs a star center).
/// Boundary gradients use second-order one-sided differences into the
/// interior; with `u = 0` on the boundary, `u_n = (4 u_1 - u_2) / (2h)`.
pub fn pohozaev_check_grid(
    pair: &QEigenpair<GridField>,
    params: &ProblemParams,
    tol: f64,
) -> Result<CheckReport> {
    let mask = &pair.eigenfunction.mask;
    let u = &pair.eigenfunction.values;
    if mask.dim != 2 || mask.mirror_col.is_some() || mask.len() != mask.nx * mask.ny {
        return Err(Error::UnsupportedDomain(
            "grid Pohozaev check needs a full rectangle mask".into(),
        ));
    }
    if mask.nx < 2 || mask.ny < 2 {
        return Err(Error::UnsupportedDomain("rectangle too coarse for one-sided differences".into()));
    }
    let h = mask.h;
    let (nx, ny) = (mask.nx, mask.ny);
    // Interior nodes at (i+1)h x (j+1)h inside (0,a) x (0,b).
    let a = (nx + 1) as f64 * h;
    let b = (ny + 1) as f64 * h;
    let (cx, cy) = (0.5 * a, 0.5 * b);
    let at = |i: usize, j: usize| u[mask.idx(i as i64, j as i64).expect("full rectangle")];
    let un = |u1: f64, u2: f64| (4.0 * u1 - u2) / (2.0 * h);
    let mut boundary = 0.0;
    for j in 0..ny {
        // left edge x = 0, <x - c, nu> = cx; right edge likewise.
        let g = un(at(0, j), at(1, j));
        boundary += h * cx * g * g;
        let g = un(at(nx - 1, j), at(nx - 2, j));
        boundary += h * cx * g * g;
    }
    for i in 0..nx {
        let g = un(at(i, 0), at(i, 1));
        boundary += h * cy * g * g;
        let g = un(at(i, ny - 1), at(i, ny - 2));
        boundary += h * cy * g * g;
    }
    let measured = pohozaev_constant(params) * boundary;
    let target = pair.lambda * pair.lq_norm * pair.lq_norm;
    Ok(CheckReport::relative(
        "pohozaev-grid",
        measured,
        target,
        tol,
        format!("rectangle {a}x{b}, h={h}, q={}", params.q()),
    ))
}

/// Scaling invariance of the sup-norm ratio
/// `rho(R) = ||U||_inf / (sqrt(lambda)^(2*/(2*-q)) ||U||_q)` across a radius
/// sweep; the combination is domain-free for `N >= 3`, so the spread over the
/// sweep measures numerical error only.
pub fn linf_bound_ratio(
    pairs: &[QEigenpair<RadialProfile>],
    params: &ProblemParams,
    spread_bound: f64,
) -> Result<CheckReport> {
    if params.n() < 3 {
        return Err(Error::UnsupportedDomain(format!(
            "the sup-norm ratio is scale-free only for N >= 3, got N = {}",
            params.n()
        )));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidInput("empty radius sweep".into()));
    }
    let two_star = params.two_star();
    let expo = two_star / (two_star - params.q());
    let mut ratios = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let linf = pair.eigenfunction.u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        ratios.push(linf / (pair.lambda.sqrt().powf(expo) * pair.lq_norm));
    }
    let max = ratios.iter().fold(f64::NEG_INFINITY, |a, &r| a.max(r));
    let min = ratios.iter().fold(f64::INFINITY, |a, &r| a.min(r));
    let spread = max / min;
    Ok(CheckReport {
        name: "linf-ratio-spread".into(),
        passed: spread <= spread_bound,
        measured: spread,
        bound_or_target: spread_bound,
        tolerance: spread_bound - 1.0,
        context: format!("{} radii, exponent 2*/(2*-q) = {expo}", pairs.len()),
    })
}

/// Scalar field on the full lattice of a rectangle `(0, (nx-1)h) x (0, (ny-1)h)`,
/// boundary nodes included, for pointwise gradient checks.
#[derive(Debug, Clone)]
pub struct RectField {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl RectField {
    /// Samples `f(x, y)` on the `nx x ny` lattice of mesh width `h`.
    pub fn sample(h: f64, nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i as f64 * h, j as f64 * h)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self { h, nx, ny, values }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Centered gradient at a strictly interior node.
    fn grad(&self, i: usize, j: usize) -> (f64, f64) {
        (
            (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * self.h),
            (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * self.h),
        )
    }

    fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiconeVariant {
    /// `<grad psi, grad(phi^2/psi)> <= |grad phi|^2`.
    Classical,
    /// `<grad psi, grad(phi^q/psi^(q-1))> <= |grad phi|^q |grad psi|^(2-q)`,
    /// meaningful for `1 < q < 2`.
    Generalized,
}

/// First-order stencil slack constant: the discrete inequality may overshoot
/// by at most `PICONE_SLACK * h` on C^2 inputs. Calibrated once on analytic
/// trigonometric families and frozen.
pub const PICONE_SLACK: f64 = 8.0;

/// Pointwise Picone inequality on sampled fields, centered differences on the
/// strictly interior nodes. Reports the worst violation.
pub fn picone_check(
    psi: &RectField,
    phi: &RectField,
    variant: PiconeVariant,
    params: &ProblemParams,
) -> Result<CheckReport> {
    let q = params.q();
    if variant == PiconeVariant::Generalized && !params.sub_homogeneous() {
        return Err(Error::Regime(format!(
            "the generalized inequality is used in the regime 1 < q < 2, got q = {q}"
        )));
    }
    if psi.nx != phi.nx || psi.ny != phi.ny || psi.h != phi.h {
        return Err(Error::InvalidInput("fields sampled on different lattices".into()));
    }
    let psi_min = psi.min();
    if !(psi_min > 0.0) {
        return Err(Error::InvalidInput(format!("psi must be strictly positive, min = {psi_min}")));
    }
    if phi.min() < 0.0 {
        return Err(Error::InvalidInput("phi must be nonnegative".into()));
    }
    // The quotient field whose gradient pairs with grad psi.
    let w = RectField {
        h: psi.h,
        nx: psi.nx,
        ny: psi.ny,
        values: psi
            .values
            .iter()
            .zip(&phi.values)
            .map(|(&s, &f)| match variant {
                PiconeVariant::Classical => f * f / s,
                PiconeVariant::Generalized => f.powf(q) / s.powf(q - 1.0),
            })
            .collect(),
    };
    let mut worst = f64::NEG_INFINITY;
    for j in 1..psi.ny - 1 {
        for i in 1..psi.nx - 1 {
            let gs = psi.grad(i, j);
            let gf = phi.grad(i, j);
            let gw = w.grad(i, j);
            let lhs = gs.0 * gw.0 + gs.1 * gw.1;
            let rhs = match variant {
                PiconeVariant::Classical => gf.0 * gf.0 + gf.1 * gf.1,
                PiconeVariant::Generalized => {
                    let nf = (gf.0 * gf.0 + gf.1 * gf.1).sqrt();
                    let ns = (gs.0 * gs.0 + gs.1 * gs.1).sqrt();
                    nf.powf(q) * ns.powf(2.0 - q)
                }
            };
            worst = worst.max(lhs - rhs);
        }
    }
    let slack = PICONE_SLACK * psi.h;
    Ok(CheckReport {
        name: match variant {
            PiconeVariant::Classical => "picone-classical".into(),
            PiconeVariant::Generalized => "picone-generalized".into(),
        },
        passed: worst <= slack,
        measured: worst,
        bound_or_target: slack,
        tolerance: slack,
        context: format!("{}x{} lattice, h={}, psi_min={psi_min:.3e}", psi.nx, psi.ny, psi.h),
    })
}

/// Definitional consistency of a computed eigenpair: `lambda >= lambda_1 - tol`,
/// nonnegativity of first eigenfunctions, unit `L^q` norm, and the energy
/// identity `energy = lambda * ||u||_q^2`.
fn sanity(
    lambda: f64,
    energy: f64,
    lq_norm: f64,
    min_value: f64,
    sign_class: SignClass,
    lambda1: f64,
    tol: f64,
    provenance: &str,
) -> CheckReport {
    let above = lambda >= lambda1 - tol * lambda1.abs();
    let nonneg = sign_class != SignClass::Positive || min_value >= -tol;
    let unit = (lq_norm - 1.0).abs() <= tol;
    let energy_target = lambda * lq_norm * lq_norm;
    let energy_rel = (energy - energy_target).abs() / energy_target.abs().max(f64::MIN_POSITIVE);
    let identity = energy_rel <= tol;
    CheckReport {
        name: "eigenpair-sanity".into(),
        passed: above && nonneg && unit && identity,
        measured: energy_rel,
        bound_or_target: 0.0,
        tolerance: tol,
        context: format!(
            "{provenance}; lambda>=lambda1: {above}, nonnegative: {nonneg}, unit norm: {unit}, energy identity: {identity}"
        ),
    }
}

pub fn eigenpair_sanity_radial(
    pair: &QEigenpair<RadialProfile>,
    lambda1: f64,
    params: &ProblemParams,
    tol: f64,
) -> CheckReport {
    let min_value = pair.eigenfunction.u.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    sanity(
        pair.lambda,
        pair.eigenfunction.energy,
        pair.lq_norm,
        min_value,
        pair.sign_class,
        lambda1,
        tol,
        &format!("radial N={} q={}", params.n(), params.q()),
    )
}

pub fn eigenpair_sanity_grid(
    pair: &QEigenpair<GridField>,
    lambda1: f64,
    params: &ProblemParams,
    tol: f64,
) -> CheckReport {
    let min_value = pair.eigenfunction.values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    sanity(
        pair.lambda,
        pair.eigenfunction.energy(),
        pair.lq_norm,
        min_value,
        pair.sign_class,
        lambda1,
        tol,
        &format!("grid h={} q={}", pair.eigenfunction.mask.h, params.q()),
    )
}

/// Residual check helper shared by the CLI: scaled max-norm residual of the
/// discrete equation for a grid pair.
pub fn grid_residual_report(pair: &QEigenpair<GridField>, params: &ProblemParams, tol: f64) -> CheckReport {
    let q = params.q();
    let u = &pair.eigenfunction.values;
    let au = apply_laplacian(&pair.eigenfunction.mask, u);
    let linf = pair.eigenfunction.linf();
    let scale = pair.lambda * linf.powf(q - 1.0);
    let mut worst = 0.0f64;
    for (p, &aup) in au.iter().enumerate() {
        worst = worst.max((aup - pair.lambda * u[p].abs().powf(q - 1.0) * u[p].signum()).abs());
    }
    let measured = worst / scale;
    CheckReport {
        name: "grid-residual".into(),
        passed: measured <= tol,
        measured,
        bound_or_target: 0.0,
        tolerance: tol,
        context: format!("h={}, q={q}", pair.eigenfunction.mask.h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::DomainSpec;
    use crate::grid2d::{minimize_rayleigh, rasterize, SolveOpts};
    use crate::radial::{ball_eigenvalue, ShootTol};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn pohozaev_radial_tight() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        let pair = ball_eigenvalue(&p, 1.0, 1, &ShootTol::default()).unwrap();
        let rep = pohozaev_check_radial(&pair, &p, 1e-4);
        assert!(rep.passed, "mismatch {}", rep.mismatch());
        assert!(rep.mismatch() < 1e-6, "mismatch {}", rep.mismatch());
    }

    #[test]
    fn pohozaev_grid_decays_with_h() {
        let p = ProblemParams::classical(2).unwrap();
        let opts = SolveOpts::default();
        let mut mismatches = Vec::new();
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let mask = rasterize(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, h).unwrap();
            let pair = minimize_rayleigh(&p, &mask, &opts).unwrap();
            let rep = pohozaev_check_grid(&pair, &p, 0.1).unwrap();
            assert!(rep.passed, "h={h} mismatch {}", rep.mismatch());
            mismatches.push(rep.mismatch());
        }
        assert!(
            mismatches[1] < mismatches[0] / 1.8,
            "no first-order decay: {mismatches:?}"
        );
    }

    #[test]
    fn pohozaev_grid_rejects_non_rectangle() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        let mask = rasterize(&DomainSpec::Ball { radius: 1.0 }, 1.0 / 16.0).unwrap();
        let pair = minimize_rayleigh(&p, &mask, &SolveOpts::default()).unwrap();
        assert!(matches!(
            pohozaev_check_grid(&pair, &p, 0.1),
            Err(Error::UnsupportedDomain(_))
        ));
    }

    #[test]
    fn linf_ratio_constant_across_radii() {
        let p = ProblemParams::new(3, 3.0).unwrap();
        let tol = ShootTol::default();
        let pairs: Vec<_> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| ball_eigenvalue(&p, r, 1, &tol).unwrap())
            .collect();
        let rep = linf_bound_ratio(&pairs, &p, 1.01).unwrap();
        assert!(rep.passed, "spread {}", rep.measured);
        let single = linf_bound_ratio(&pairs[..1], &p, 1.01).unwrap();
        assert_eq!(single.measured, 1.0);
    }

    #[test]
    fn linf_ratio_needs_three_dimensions() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        assert!(matches!(linf_bound_ratio(&[], &p, 1.01), Err(Error::UnsupportedDomain(_))));
    }

    #[test]
    fn picone_equality_and_zero_cases() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let h = 1.0 / 32.0;
        let psi = RectField::sample(h, 33, 33, |x, y| 2.0 + (PI * x).sin() * (PI * y).cos());
        let rep = picone_check(&psi, &psi, PiconeVariant::Classical, &p).unwrap();
        assert!(rep.passed && rep.measured <= 1e-12, "equality case violated: {}", rep.measured);
        let zero = RectField::sample(h, 33, 33, |_, _| 0.0);
        let rep = picone_check(&psi, &zero, PiconeVariant::Generalized, &p).unwrap();
        assert!(rep.passed && rep.measured <= 1e-12);
    }

    #[test]
    fn picone_random_trig_fields() {
        // Seeded trigonometric polynomials; both variants must stay within
        // stencil slack on every pair.
        let p = ProblemParams::new(2, 1.5).unwrap();
        let h = 1.0 / 64.0;
        let n = 65;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..100 {
            let coeffs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let trig = |c: &[f64], x: f64, y: f64| {
                c[0] * (PI * x).sin() * (PI * y).sin()
                    + c[1] * (2.0 * PI * x).cos() * (PI * y).sin()
                    + c[2] * (PI * x).sin() * (2.0 * PI * y).cos()
                    + c[3] * (2.0 * PI * x).cos() * (2.0 * PI * y).cos()
            };
            let (a, b) = coeffs.split_at(4);
            let a = a.to_vec();
            let b = b.to_vec();
            let psi = RectField::sample(h, n, n, |x, y| 4.1 + trig(&a, x, y));
            let phi = RectField::sample(h, n, n, |x, y| 4.1 + trig(&b, x, y));
            for variant in [PiconeVariant::Classical, PiconeVariant::Generalized] {
                let rep = picone_check(&psi, &phi, variant, &p).unwrap();
                assert!(rep.passed, "{:?} violation {} > slack {}", variant, rep.measured, rep.bound_or_target);
            }
        }
    }

    #[test]
    fn picone_rejects_nonpositive_psi() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let psi = RectField::sample(0.25, 5, 5, |x, _| x - 0.1);
        let phi = RectField::sample(0.25, 5, 5, |_, _| 1.0);
        assert!(matches!(
            picone_check(&psi, &phi, PiconeVariant::Classical, &p),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sanity_pass_and_negative_control() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        let pair = ball_eigenvalue(&p, 1.0, 1, &ShootTol::default()).unwrap();
        let rep = eigenpair_sanity_radial(&pair, pair.lambda, &p, 1e-6);
        assert!(rep.passed, "{}", rep.context);
        // Corrupting lambda breaks the energy identity.
        let mut bad = pair.clone();
        bad.lambda *= 1.1;
        let rep = eigenpair_sanity_radial(&bad, pair.lambda, &p, 1e-6);
        assert!(!rep.passed);
        assert!(rep.context.contains("energy identity: false"), "{}", rep.context);
    }

    #[test]
    fn sanity_second_radial_pair() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let tol = ShootTol::default();
        let first = ball_eigenvalue(&p, 1.0, 1, &tol).unwrap();
        let second = ball_eigenvalue(&p, 1.0, 2, &tol).unwrap();
        assert!(second.lambda > first.lambda);
        assert_eq!(second.sign_class, SignClass::SignChanging);
        let rep = eigenpair_sanity_radial(&second, first.lambda, &p, 1e-6);
        assert!(rep.passed, "{}", rep.context);
    }
}
