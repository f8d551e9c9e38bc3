//! Finite-difference solver on rasterized planar domains: first q-eigenvalue
//! by normalized inverse iteration, symmetric-subspace minima, Lane-Emden
//! residuals, the linearized-operator spectrum, and the dumbbell
//! symmetry-breaking experiment.

mod dumbbell;
mod linearized;
mod mask;

pub use dumbbell::{dumbbell_experiment, dumbbell_half_mask, dumbbell_mask, symmetric_factor, DumbbellReport};
pub use linearized::{linearized_spectrum, LinearizedSpectrum};
pub use mask::{rasterize, rasterize_predicate, GridMask, Reflection};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core::{ProblemParams, QEigenpair, SignClass};
use crate::error::{Error, Result};

/// Values on the interior nodes of a rasterized domain.
#[derive(Debug, Clone)]
pub struct GridField {
    pub mask: GridMask,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(mask: GridMask, values: Vec<f64>) -> Self {
        assert_eq!(mask.len(), values.len());
        Self { mask, values }
    }

    /// Discrete `L^q` norm with the mask's quadrature weights.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let m = self.mask.cell_measure();
        let s: f64 = self
            .values
            .iter()
            .zip(&self.mask.weights)
            .map(|(&v, &w)| w * v.abs().powf(q))
            .sum();
        (m * s).powf(1.0 / q)
    }

    /// Discrete Dirichlet energy `sum u (A u) h^dim`.
    pub fn energy(&self) -> f64 {
        let au = apply_laplacian(&self.mask, &self.values);
        self.mask.cell_measure() * dot_w(&self.mask, &self.values, &au)
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x,y,value` rows, header included.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,value\n");
        for (p, &v) in self.values.iter().enumerate() {
            let (x, y) = self.mask.coords(p);
            s.push_str(&format!("{x:e},{y:e},{v:e}\n"));
        }
        s
    }

    /// JSON header with mesh width, bounding box and mask hash.
    pub fn header_json(&self) -> serde_json::Value {
        let m = &self.mask;
        serde_json::json!({
            "h": m.h,
            "bbox": [m.x0, m.y0, m.x0 + (m.nx - 1) as f64 * m.h, m.y0 + (m.ny - 1) as f64 * m.h],
            "mask_hash": format!("{:016x}", m.hash()),
        })
    }
}

/// Weighted inner product on interior points (no cell measure).
fn dot_w(mask: &GridMask, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).zip(&mask.weights).map(|((&x, &y), &w)| w * x * y).sum()
}

/// Applies the 5-point Dirichlet Laplacian (3-point for 1-D grids); a mirror
/// column reflects its left neighbor back to the right one.
pub fn apply_laplacian(mask: &GridMask, u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    apply_laplacian_into(mask, u, &mut out);
    out
}

fn apply_laplacian_into(mask: &GridMask, u: &[f64], out: &mut [f64]) {
    let inv_h2 = 1.0 / (mask.h * mask.h);
    let one_d = mask.dim == 1;
    for (p, &(i, j)) in mask.interior.iter().enumerate() {
        let (i, j) = (i as i64, j as i64);
        let mut acc = if one_d { 2.0 * u[p] } else { 4.0 * u[p] };
        let left = if mask.mirror_col == Some(i as usize) { (i + 1, j) } else { (i - 1, j) };
        if let Some(idx) = mask.idx(left.0, left.1) {
            acc -= u[idx];
        }
        if let Some(idx) = mask.idx(i + 1, j) {
            acc -= u[idx];
        }
        if !one_d {
            if let Some(idx) = mask.idx(i, j - 1) {
                acc -= u[idx];
            }
            if let Some(idx) = mask.idx(i, j + 1) {
                acc -= u[idx];
            }
        }
        out[p] = acc * inv_h2;
    }
}

/// Conjugate gradient for `op(x) = b`, where `op` is self-adjoint positive
/// definite in the mask's weighted inner product.
pub(crate) fn conjugate_gradient(
    mask: &GridMask,
    op: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    let mut ax = vec![0.0; n];
    op(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect();
    let b_norm2 = dot_w(mask, b, b).max(f64::MIN_POSITIVE);
    let mut rr = dot_w(mask, &r, &r);
    if rr <= rel_tol * rel_tol * b_norm2 {
        return Ok(x);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        op(&p, &mut ap);
        let pap = dot_w(mask, &p, &ap);
        if pap <= 0.0 {
            return Err(Error::Solver(format!("indefinite operator in CG (pAp = {pap})")));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot_w(mask, &r, &r);
        if rr_new <= rel_tol * rel_tol * b_norm2 {
            return Ok(x);
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Solver(format!("CG stalled after {max_iter} iterations (residual^2 {rr:e})")))
}

/// Initial iterate for the nonlinear eigenvalue iteration.
#[derive(Debug, Clone, Default)]
pub enum Start {
    /// Uniform positive random values, seeded.
    #[default]
    RandomPositive,
    /// Deterministic start with mass concentrated where `x > 0`.
    RightLobe,
    Given(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SolveOpts {
    pub tol: f64,
    pub max_iter: usize,
    pub cg_tol: f64,
    pub seed: u64,
    pub start: Start,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, cg_tol: 1e-12, seed: 0x5EED, start: Start::RandomPositive }
    }
}

fn start_field(mask: &GridMask, opts: &SolveOpts) -> Vec<f64> {
    match &opts.start {
        Start::RandomPositive => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            (0..mask.len()).map(|_| rng.gen_range(0.5..1.5)).collect()
        }
        Start::RightLobe => (0..mask.len())
            .map(|p| {
                let (x, _) = mask.coords(p);
                if x > 0.0 {
                    1.0
                } else {
                    1e-3
                }
            })
            .collect(),
        Start::Given(v) => {
            assert_eq!(v.len(), mask.len());
            v.clone()
        }
    }
}

fn normalize_lq(mask: &GridMask, q: f64, u: &mut [f64]) -> f64 {
    let m = mask.cell_measure();
    let s: f64 = u.iter().zip(&mask.weights).map(|(&v, &w)| w * v.abs().powf(q)).sum();
    let norm = (m * s).powf(1.0 / q);
    for v in u.iter_mut() {
        *v /= norm;
    }
    norm
}

fn rayleigh_quotient(mask: &GridMask, q: f64, u: &[f64]) -> f64 {
    let au = apply_laplacian(mask, u);
    let m = mask.cell_measure();
    let energy = m * dot_w(mask, u, &au);
    let s: f64 = u.iter().zip(&mask.weights).map(|(&v, &w)| w * v.abs().powf(q)).sum();
    energy / (m * s).powf(2.0 / q)
}

fn iterate_rayleigh(
    params: &ProblemParams,
    mask: &GridMask,
    opts: &SolveOpts,
    symmetrize: Option<&[usize]>,
) -> Result<QEigenpair<GridField>> {
    let q = params.q();
    if mask.is_empty() {
        return Err(Error::EmptyDomain { h: mask.h });
    }
    let mut u = start_field(mask, opts);
    if let Some(perm) = symmetrize {
        reflect_average(&mut u, perm);
    }
    normalize_lq(mask, q, &mut u);
    let mut quotient = rayleigh_quotient(mask, q, &u);
    let mut v_prev: Option<Vec<f64>> = None;
    let lap = |x: &[f64], out: &mut [f64]| apply_laplacian_into(mask, x, out);
    for _ in 0..opts.max_iter {
        let rhs: Vec<f64> = u.iter().map(|&ui| ui.abs().powf(q - 1.0) * ui.signum()).collect();
        let v = conjugate_gradient(mask, &lap, &rhs, v_prev.as_deref(), opts.cg_tol, 100 * mask.len() + 1000)?;
        v_prev = Some(v.clone());
        u = v;
        if let Some(perm) = symmetrize {
            reflect_average(&mut u, perm);
        }
        normalize_lq(mask, q, &mut u);
        let new_q = rayleigh_quotient(mask, q, &u);
        let done = (new_q - quotient).abs() <= opts.tol * new_q.abs();
        quotient = new_q;
        if done {
            // Positive starts stay positive: the discrete Laplacian is an
            // M-matrix and the reflection average preserves sign.
            let field = GridField::new(mask.clone(), u);
            let lq = field.lq_norm(q);
            return Ok(QEigenpair {
                lambda: quotient,
                eigenfunction: field,
                lq_norm: lq,
                sign_class: SignClass::Positive,
            });
        }
    }
    Err(Error::Convergence { iters: opts.max_iter, last: quotient })
}

fn reflect_average(u: &mut [f64], perm: &[usize]) {
    let orig = u.to_vec();
    for (p, &pr) in perm.iter().enumerate() {
        u[p] = 0.5 * (orig[p] + orig[pr]);
    }
}

/// First q-eigenvalue of the rasterized domain by normalized inverse
/// iteration: solve `-Delta_h v = u^(q-1)`, renormalize in `L^q`, repeat until
/// the discrete Rayleigh quotient settles.
pub fn minimize_rayleigh(params: &ProblemParams, mask: &GridMask, opts: &SolveOpts) -> Result<QEigenpair<GridField>> {
    iterate_rayleigh(params, mask, opts, None)
}

/// Same iteration constrained to the reflection-symmetric subspace: the
/// iterate is replaced by its reflection average each step.
pub fn minimize_rayleigh_symmetric(
    params: &ProblemParams,
    mask: &GridMask,
    reflection: &Reflection,
    opts: &SolveOpts,
) -> Result<QEigenpair<GridField>> {
    let perm = reflection.permutation(mask)?;
    iterate_rayleigh(params, mask, opts, Some(&perm))
}

/// Scaled max-norm residual of the discrete Lane-Emden equation
/// `-Delta_h u = lambda |u|^(q-2) u` for a computed pair.
pub fn residual(pair: &QEigenpair<GridField>, params: &ProblemParams) -> f64 {
    let q = params.q();
    let u = &pair.eigenfunction.values;
    let au = apply_laplacian(&pair.eigenfunction.mask, u);
    let linf = pair.eigenfunction.linf();
    let scale = pair.lambda * linf.powf(q - 1.0);
    let mut worst = 0.0f64;
    for (p, &aup) in au.iter().enumerate() {
        let r = aup - pair.lambda * u[p].abs().powf(q - 1.0) * u[p].signum();
        worst = worst.max(r.abs());
    }
    worst / scale
}

/// Richardson extrapolation of a second-order quantity from values at `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenvalueReport {
    pub lambda: f64,
    pub lambda_coarse: Option<f64>,
    pub lambda_richardson: Option<f64>,
    pub interior_points: usize,
}
