//! Shooting solver for the free Lane-Emden equation on balls (any `N >= 1`)
//! and intervals.
//!
//! The free equation `-(rho^(N-1) u')' = rho^(N-1) |u|^(q-2) u` is integrated
//! forward from the origin with a two-term Taylor start; eigenvalues are then
//! produced through the free-functional correspondence (`lambda = ||U||_Lq^(q-2)`
//! on the ball truncated at a zero) and the scaling law.

mod ode;

pub use ode::{rk4, Node, OdeTol};

use serde::{Deserialize, Serialize};

use crate::core::{
    pohozaev_constant, scale_eigenvalue, unit_ball_volume, ProblemParams, QEigenpair, SignClass,
};
use crate::error::{Error, Result};

/// Solver tolerances for the shooting pipeline.
#[derive(Debug, Clone, Copy)]
pub struct ShootTol {
    pub ode: OdeTol,
    /// Absolute tolerance in `rho` for zero bisection.
    pub zero: f64,
}

impl Default for ShootTol {
    fn default() -> Self {
        Self { ode: OdeTol::default(), zero: 1e-12 }
    }
}

/// Sampled radial profile `u(rho)` with located zeros and integral bookkeeping.
///
/// For interval profiles the samples are in the `x` coordinate of `(0, L)` and
/// the measure weight is 1; for ball profiles the integrals carry the weight
/// `N omega_N rho^(N-1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialProfile {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    pub zeros: Vec<f64>,
    pub n: u32,
    pub q: f64,
    /// Peak value of the profile (`u(0)` for ball profiles).
    pub amplitude: f64,
    /// Integral of `|u|^q` against the profile measure.
    pub lq_norm_q: f64,
    /// Dirichlet energy, integral of `u'^2`.
    pub energy: f64,
    /// Integral of `u^2`.
    pub l2_sq: f64,
}

impl RadialProfile {
    pub fn lq_norm(&self) -> f64 {
        self.lq_norm_q.powf(1.0 / self.q)
    }

    /// Boundary slope `u'(R)` read from the last sample.
    pub fn boundary_slope(&self) -> f64 {
        *self.uprime.last().expect("profile has samples")
    }

    pub fn radius(&self) -> f64 {
        *self.rho.last().expect("profile has samples")
    }

    /// `rho,u,uprime` rows, header included.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho,u,uprime\n");
        for i in 0..self.rho.len() {
            s.push_str(&format!("{:e},{:e},{:e}\n", self.rho[i], self.u[i], self.uprime[i]));
        }
        s
    }
}

/// Universal constants attached to a first ball eigenpair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BallConstants {
    /// Lebesgue measure of the unit N-ball.
    pub omega_n: f64,
    /// Pohozaev constant.
    pub c_qn: f64,
    /// Boundary slope `sqrt(lambda_1 / (N omega_N R^N) / C_qN)`.
    pub script_c: f64,
}

impl BallConstants {
    pub fn for_first_eigenpair(params: &ProblemParams, lambda1: f64, radius: f64) -> Self {
        let omega_n = unit_ball_volume(params.n());
        let c_qn = pohozaev_constant(params);
        let n = params.n() as f64;
        let script_c = (lambda1 / (n * omega_n * radius.powf(n)) / c_qn).sqrt();
        Self { omega_n, c_qn, script_c }
    }
}

// Augmented shooting state: [u, u', Iq, E, I2] where the primed integrals run
// against the measure N omega_N rho^(N-1) drho.
const D: usize = 5;

struct Shot {
    nodes: Vec<Node<D>>,
    /// Augmented state bisected onto each zero of u, paired with its radius.
    zeros: Vec<(f64, [f64; D])>,
}

fn free_rhs(n: u32, q: f64) -> impl Fn(f64, &[f64; D]) -> [f64; D] {
    let nm1 = (n - 1) as f64;
    let w = n as f64 * unit_ball_volume(n);
    move |rho: f64, y: &[f64; D]| {
        let (u, v) = (y[0], y[1]);
        let f_u = u.abs().powf(q - 1.0) * u.signum();
        let weight = w * rho.powf(nm1);
        [v, -nm1 / rho * v - f_u, weight * u.abs().powf(q), weight * v * v, weight * u * u]
    }
}

fn taylor_start(n: u32, q: f64, amplitude: f64) -> (f64, [f64; D], [f64; 3]) {
    let a = amplitude;
    let h0 = 1e-6 * 1f64.max(a.powf((2.0 - q) / 2.0));
    let nf = n as f64;
    let u = a - a.powf(q - 1.0) * h0 * h0 / (2.0 * nf);
    let v = -a.powf(q - 1.0) * h0 / nf;
    // Leading-order integrals over [0, h0]; u is constant to O(h0^2) there.
    let w = nf * unit_ball_volume(n);
    let iq = w * a.powf(q) * h0.powf(nf) / nf;
    let slope = a.powf(q - 1.0) / nf;
    let e = w * slope * slope * h0.powf(nf + 2.0) / (nf + 2.0);
    let i2 = w * a * a * h0.powf(nf) / nf;
    (h0, [u, v, iq, e, i2], [iq, e, i2])
}

fn shoot_augmented(params: &ProblemParams, amplitude: f64, rho_max: f64, tol: &ShootTol) -> Result<Shot> {
    if !(amplitude > 0.0) {
        return Err(Error::InvalidInput(format!("amplitude = {amplitude} must be positive")));
    }
    if !(rho_max > 0.0) {
        return Err(Error::InvalidInput(format!("rho_max = {rho_max} must be positive")));
    }
    let (n, q) = (params.n(), params.q());
    let rhs = free_rhs(n, q);
    let (h0, mut y0, start_integrals) = taylor_start(n, q, amplitude);
    // Carry the start-interval contribution inside the integral components.
    y0[2] = start_integrals[0];
    y0[3] = start_integrals[1];
    y0[4] = start_integrals[2];
    let nodes = ode::integrate(&rhs, h0, y0, rho_max, tol.ode)?;

    // Sign-change bracketing on accepted nodes, then bisection on a fixed-step
    // re-integration of the bracketing step. Tangential near-zeros without a
    // sign change are not crossings.
    let mut zeros = Vec::new();
    for w in nodes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.y[0] != 0.0 && b.y[0] != 0.0 && a.y[0].signum() != b.y[0].signum() {
            let eval = |rho: f64| -> [f64; D] {
                if rho <= a.t {
                    a.y
                } else {
                    ode::rk4(&rhs, a.t, a.y, rho, 32)
                }
            };
            let (mut lo, mut hi) = (a.t, b.t);
            let mut s_lo = a.y[0].signum();
            while hi - lo > tol.zero {
                let mid = 0.5 * (lo + hi);
                let um = eval(mid)[0];
                if um == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if um.signum() == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
                s_lo = eval(lo)[0].signum();
            }
            let z = 0.5 * (lo + hi);
            zeros.push((z, eval(z)));
        }
    }
    Ok(Shot { nodes, zeros })
}

/// Integrates the free equation from the origin up to `rho_max`, locating all
/// sign changes.
pub fn shoot_free(params: &ProblemParams, amplitude: f64, rho_max: f64, tol: &ShootTol) -> Result<RadialProfile> {
    let shot = shoot_augmented(params, amplitude, rho_max, tol)?;
    Ok(profile_from_shot(params, amplitude, &shot, None, 1.0, 1.0))
}

/// Builds a profile from shot nodes, optionally truncated at `truncate_at`
/// (a located zero), with value scale `c` and coordinate scale `t`
/// (`u_out(rho) = c * u(rho / t)`).
fn profile_from_shot(
    params: &ProblemParams,
    amplitude: f64,
    shot: &Shot,
    truncate_at: Option<f64>,
    c: f64,
    t: f64,
) -> RadialProfile {
    let (n, q) = (params.n(), params.q());
    let nf = n as f64;
    let r_cut = truncate_at.unwrap_or(f64::INFINITY);
    let mut rho = vec![0.0];
    let mut u = vec![c * amplitude];
    let mut uprime = vec![0.0];
    let mut last_state = shot.nodes[0].y;
    for node in &shot.nodes {
        if node.t > r_cut {
            break;
        }
        rho.push(t * node.t);
        u.push(c * node.y[0]);
        uprime.push(c / t * node.y[1]);
        last_state = node.y;
    }
    let end_state = match truncate_at {
        Some(rz) => {
            let state = shot
                .zeros
                .iter()
                .find(|(z, _)| (*z - rz).abs() <= 1e-9 * rz.max(1.0))
                .map(|(_, s)| *s)
                .unwrap_or(last_state);
            if *rho.last().unwrap() < t * rz {
                rho.push(t * rz);
                u.push(0.0);
                uprime.push(c / t * state[1]);
            }
            state
        }
        None => *shot.nodes.last().map(|n| &n.y).unwrap_or(&last_state),
    };
    let zeros: Vec<f64> = shot.zeros.iter().map(|(z, _)| t * z).filter(|z| *z <= t * r_cut * (1.0 + 1e-14)).collect();
    // Rescale integrals: for u_out = c u(./t) on the weighted measure,
    // Iq -> c^q t^N Iq, E -> c^2 t^(N-2) E, I2 -> c^2 t^N I2.
    RadialProfile {
        rho,
        u,
        uprime,
        zeros,
        n,
        q,
        amplitude: c * amplitude,
        lq_norm_q: c.abs().powf(q) * t.powf(nf) * end_state[2],
        energy: c * c * t.powf(nf - 2.0) * end_state[3],
        l2_sq: c * c * t.powf(nf) * end_state[4],
    }
}

/// Shoots with a geometrically grown window until at least `k` zeros are found.
fn shoot_with_k_zeros(params: &ProblemParams, amplitude: f64, k: usize, tol: &ShootTol) -> Result<Shot> {
    let q = params.q();
    let mut window = 4.0 * k as f64 * 1f64.max(amplitude.powf((2.0 - q) / 2.0));
    for _ in 0..24 {
        let shot = shoot_augmented(params, amplitude, window, tol)?;
        if shot.zeros.len() >= k {
            return Ok(shot);
        }
        window *= 2.0;
    }
    Err(Error::NotFound(format!("fewer than {k} zeros found up to rho = {window}")))
}

/// Radius of the k-th zero of the shot profile (`k >= 1`).
pub fn kth_zero_radius(params: &ProblemParams, amplitude: f64, k: usize, tol: &ShootTol) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let shot = shoot_with_k_zeros(params, amplitude, k, tol)?;
    Ok(shot.zeros[k - 1].0)
}

/// k-th eigenvalue of the radial family on the ball of radius `R`.
///
/// Shoots with amplitude 1, truncates at the k-th zero `R_k`, reads off
/// `lambda(B_{R_k}) = ||U||_Lq^(q-2)` (the `q = 2` path bypasses the
/// correspondence: the free equation there is the Helmholtz equation, so
/// `lambda(B_{R_k}) = 1`), then rescales to radius `R`.
pub fn ball_eigenvalue(params: &ProblemParams, radius: f64, k: usize, tol: &ShootTol) -> Result<QEigenpair<RadialProfile>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius = {radius} must be positive")));
    }
    let shot = shoot_with_k_zeros(params, 1.0, k, tol)?;
    Ok(ball_pair_from_shot(params, &shot, radius, k))
}

fn ball_pair_from_shot(params: &ProblemParams, shot: &Shot, radius: f64, k: usize) -> QEigenpair<RadialProfile> {
    let (n, q) = (params.n() as f64, params.q());
    let (r_k, state) = shot.zeros[k - 1];
    let iq = state[2];
    let lambda_rk = if params.is_classical() { 1.0 } else { iq.powf((q - 2.0) / q) };
    let t = radius / r_k;
    let lambda = scale_eigenvalue(lambda_rk, t, params).expect("positive eigenvalue");
    let m = iq.powf(1.0 / q);
    let c = t.powf(-n / q) / m;
    let profile = profile_from_shot(params, 1.0, shot, Some(r_k), c, t);
    let sign_class = if k == 1 { SignClass::Positive } else { SignClass::SignChanging };
    QEigenpair { lambda, lq_norm: profile.lq_norm(), eigenfunction: profile, sign_class }
}

/// Eigenvalues of the radial family on `B_radius` for `k = 1..=k_max`,
/// computed from a single shot.
pub fn ball_spectrum(params: &ProblemParams, radius: f64, k_max: usize, tol: &ShootTol) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be >= 1".into()));
    }
    let shot = shoot_with_k_zeros(params, 1.0, k_max, tol)?;
    let q = params.q();
    Ok((1..=k_max)
        .map(|k| {
            let (r_k, state) = shot.zeros[k - 1];
            let lambda_rk = if params.is_classical() { 1.0 } else { state[2].powf((q - 2.0) / q) };
            scale_eigenvalue(lambda_rk, radius / r_k, params).expect("positive eigenvalue")
        })
        .collect())
}

/// k-th eigenvalue of the interval `(0, L)` with Dirichlet ends (`N = 1`).
///
/// The free 1-D equation is odd-symmetric, so a k-bump solution on an
/// interval is built by reflecting the even shot profile: each bump is the
/// profile up to its first zero `R_1`, alternating signs, on a free interval
/// of length `2 k R_1`.
pub fn interval_eigenvalue(params: &ProblemParams, length: f64, k: usize, tol: &ShootTol) -> Result<QEigenpair<RadialProfile>> {
    if params.n() != 1 {
        return Err(Error::InvalidInput(format!("interval solver requires N = 1, got N = {}", params.n())));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!("length = {length} must be positive")));
    }
    let q = params.q();
    let shot = shoot_with_k_zeros(params, 1.0, 1, tol)?;
    let (r1, state) = shot.zeros[0];
    // Integrals of the half bump against plain drho times the N=1 weight 2.
    let (iq_half, e_half, i2_half) = (state[2], state[3], state[4]);
    let kf = k as f64;
    let iq_free = kf * iq_half; // k bumps, each of mass 2 * (half-bump integral / 2) -- weight 2 already counts both halves
    let lambda_free = if params.is_classical() { 1.0 } else { iq_free.powf((q - 2.0) / q) };
    let l_free = 2.0 * kf * r1;
    let t = length / l_free;
    let lambda = scale_eigenvalue(lambda_free, t, params)?;
    let m = iq_free.powf(1.0 / q);
    let c = t.powf(-1.0 / q) / m;

    // Stitch the bump samples into a profile on (0, L).
    let mut half_rho = vec![0.0];
    let mut half_u = vec![1.0];
    let mut half_v = vec![0.0];
    for node in &shot.nodes {
        if node.t >= r1 {
            break;
        }
        half_rho.push(node.t);
        half_u.push(node.y[0]);
        half_v.push(node.y[1]);
    }
    half_rho.push(r1);
    half_u.push(0.0);
    half_v.push(state[1]);

    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for j in 0..k {
        let center = (2 * j + 1) as f64 * r1;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        // Left half: rho descending from R1 to 0 maps to x ascending.
        for i in (0..half_rho.len()).rev() {
            let x = center - half_rho[i];
            if j > 0 && i == half_rho.len() - 1 {
                continue; // shared zero with the previous bump
            }
            xs.push(t * x);
            us.push(c * sign * half_u[i]);
            vs.push(c / t * sign * half_v[i]);
        }
        // Right half: rho ascending, skip the duplicated center sample.
        for i in 1..half_rho.len() {
            let x = center + half_rho[i];
            xs.push(t * x);
            us.push(c * sign * half_u[i]);
            vs.push(c / t * -sign * half_v[i]);
        }
    }
    let zeros: Vec<f64> = (0..=k).map(|j| t * (2 * j) as f64 * r1).collect();
    let profile = RadialProfile {
        rho: xs,
        u: us,
        uprime: vs,
        zeros,
        n: 1,
        q,
        amplitude: c,
        lq_norm_q: c.abs().powf(q) * t * iq_free,
        energy: c * c / t * kf * e_half,
        l2_sq: c * c * t * kf * i2_half,
    };
    let sign_class = if k == 1 { SignClass::Positive } else { SignClass::SignChanging };
    Ok(QEigenpair { lambda, lq_norm: profile.lq_norm(), eigenfunction: profile, sign_class })
}

/// Relative residual between the profile's boundary slope and the universal
/// constant of the ball uniqueness argument.
pub fn boundary_slope_check(pair: &QEigenpair<RadialProfile>, constants: &BallConstants) -> Result<f64> {
    if pair.sign_class != SignClass::Positive {
        return Err(Error::InvalidInput("boundary slope check requires a first (positive) eigenpair".into()));
    }
    let slope = pair.eigenfunction.boundary_slope().abs();
    Ok((slope - constants.script_c).abs() / constants.script_c)
}
