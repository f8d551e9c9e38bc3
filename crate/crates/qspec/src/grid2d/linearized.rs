//! Smallest eigenvalues of the linearized operator
//! `-Delta_h - (q-1) lambda_1 U^(q-2)` around a first positive eigenpair.
//!
//! Shift-invert inverse iteration with deflation: the shift sits below the
//! Gershgorin lower bound of the operator, so the shifted system is positive
//! definite and plain CG applies.

use serde::{Deserialize, Serialize};

use super::{apply_laplacian, conjugate_gradient, GridField, SolveOpts};
use crate::core::{ProblemParams, QEigenpair, SignClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearizedSpectrum {
    /// The `m` smallest eigenvalues, non-decreasing.
    pub mu: Vec<f64>,
    pub m: usize,
    /// Sign pattern of the ground eigenvector: (positive entries, negative entries).
    pub ground_state_sign: (usize, usize),
}

pub fn linearized_spectrum(
    pair: &QEigenpair<GridField>,
    params: &ProblemParams,
    m: usize,
    opts: &SolveOpts,
) -> Result<LinearizedSpectrum> {
    let q = params.q();
    if !(q > 2.0) {
        return Err(Error::Regime(format!("linearized spectrum requires 2 < q < 2*, got q = {q}")));
    }
    if pair.sign_class != SignClass::Positive {
        return Err(Error::InvalidInput("linearization requires a first positive eigenpair".into()));
    }
    let mask = &pair.eigenfunction.mask;
    let n = mask.len();
    let potential: Vec<f64> = pair
        .eigenfunction
        .values
        .iter()
        .map(|&u| (q - 1.0) * pair.lambda * u.abs().powf(q - 2.0))
        .collect();
    let linf = pair.eigenfunction.linf();
    let shift = -(q - 1.0) * pair.lambda * linf.powf(q - 2.0) - 1.0;

    let apply_l = |x: &[f64], out: &mut Vec<f64>| {
        *out = apply_laplacian(mask, x);
        for i in 0..n {
            out[i] -= potential[i] * x[i];
        }
    };
    let apply_shifted = |x: &[f64], out: &mut [f64]| {
        let mut tmp = Vec::new();
        apply_l(x, &mut tmp);
        for i in 0..n {
            out[i] = tmp[i] - shift * x[i];
        }
    };

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(&x, &y)| x * y).sum() };

    let mut eigvecs: Vec<Vec<f64>> = Vec::new();
    let mut mus: Vec<f64> = Vec::new();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed ^ 0xA11CE);

    for _ in 0..m {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut x, &eigvecs, &dot);
        normalize(&mut x, &dot);
        let mut mu_prev = f64::INFINITY;
        let mut mu = 0.0;
        let mut converged = false;
        for _ in 0..500 {
            let y = conjugate_gradient(mask, &apply_shifted, &x, Some(&x), opts.cg_tol.max(1e-10), 100 * n + 1000)?;
            x = y;
            orthogonalize(&mut x, &eigvecs, &dot);
            normalize(&mut x, &dot);
            let mut lx = Vec::new();
            apply_l(&x, &mut lx);
            mu = dot(&x, &lx);
            if (mu - mu_prev).abs() <= 1e-10 * (mu.abs() + 1.0) {
                converged = true;
                break;
            }
            mu_prev = mu;
        }
        if !converged {
            return Err(Error::Convergence { iters: 500, last: mu });
        }
        mus.push(mu);
        eigvecs.push(x);
    }

    let ground = &eigvecs[0];
    let tol = ground.iter().fold(0.0f64, |a, &v| a.max(v.abs())) * 1e-9;
    let pos = ground.iter().filter(|&&v| v > tol).count();
    let neg = ground.iter().filter(|&&v| v < -tol).count();

    // Deflated inverse iteration returns them in increasing distance from the
    // shift, which for a below-spectrum shift is increasing order; sort anyway.
    let mut order: Vec<usize> = (0..mus.len()).collect();
    order.sort_by(|&a, &b| mus[a].total_cmp(&mus[b]));
    let mu_sorted: Vec<f64> = order.iter().map(|&i| mus[i]).collect();

    Ok(LinearizedSpectrum { mu: mu_sorted, m, ground_state_sign: (pos, neg) })
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>], dot: &dyn Fn(&[f64], &[f64]) -> f64) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(x, v);
            for i in 0..x.len() {
                x[i] -= c * v[i];
            }
        }
    }
}

fn normalize(x: &mut [f64], dot: &dyn Fn(&[f64], &[f64]) -> f64) {
    let nrm = dot(x, x).sqrt();
    for v in x.iter_mut() {
        *v /= nrm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::DomainSpec;
    use crate::grid2d::{minimize_rayleigh, rasterize};
    use std::f64::consts::PI;

    #[test]
    fn linearized_square_q3() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        let mask = rasterize(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 1.0 / 24.0).unwrap();
        let opts = SolveOpts::default();
        let pair = minimize_rayleigh(&p, &mask, &opts).unwrap();
        let spec = linearized_spectrum(&pair, &p, 3, &opts).unwrap();
        assert!(spec.mu[0] < 0.0, "mu1 = {}", spec.mu[0]);
        assert!(spec.mu[1] > 0.0, "mu2 = {}", spec.mu[1]);
        assert!(spec.mu.windows(2).all(|w| w[0] <= w[1]));
        // Ground eigenvector has constant sign.
        let (pos, neg) = spec.ground_state_sign;
        assert!(pos == 0 || neg == 0, "ground state changes sign: {pos}/{neg}");
        // Upper bound mu1 <= (2-q) lambda1 / ||U||_2^2.
        let l2sq: f64 = pair
            .eigenfunction
            .values
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            * pair.eigenfunction.mask.cell_measure();
        let bound = (2.0 - p.q()) * pair.lambda / l2sq;
        assert!(spec.mu[0] <= bound + 1e-9, "mu1 {} bound {bound}", spec.mu[0]);
    }

    #[test]
    fn rejects_subhomogeneous() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let mask = rasterize(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 1.0 / 8.0).unwrap();
        let pair = minimize_rayleigh(&p, &mask, &SolveOpts::default()).unwrap();
        assert!(linearized_spectrum(&pair, &p, 2, &SolveOpts::default()).is_err());
    }

    #[test]
    fn classical_potential_free_check() {
        // With U == 0 potential the operator is the plain Laplacian; check the
        // two smallest square eigenvalues against the discrete formula.
        let p = ProblemParams::new(2, 3.0).unwrap();
        let h = 1.0 / 16.0;
        let mask = rasterize(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, h).unwrap();
        let zero_pair = QEigenpair {
            lambda: 1e-30, // vanishing potential
            lq_norm: 1.0,
            eigenfunction: GridField::new(mask.clone(), vec![0.0; mask.len()]),
            sign_class: SignClass::Positive,
        };
        let spec = linearized_spectrum(&zero_pair, &p, 2, &SolveOpts::default()).unwrap();
        let eig = |kx: f64, ky: f64| {
            (2.0 - 2.0 * (PI * kx * h).cos() + 2.0 - 2.0 * (PI * ky * h).cos()) / (h * h)
        };
        assert!((spec.mu[0] - eig(1.0, 1.0)).abs() < 1e-6 * eig(1.0, 1.0), "{}", spec.mu[0]);
        assert!((spec.mu[1] - eig(1.0, 2.0)).abs() < 1e-5 * eig(1.0, 2.0), "{}", spec.mu[1]);
    }
}
