//! Independent cross-check of the interval shooting solver against a dense
//! second-order finite-difference discretization solved with the Thomas
//! algorithm — no code shared with the shooting pipeline.

use qspec::core::ProblemParams;
use qspec::radial::{interval_eigenvalue, ShootTol};

/// Solves `A x = b` for the tridiagonal matrix with constant diagonal `diag`
/// and off-diagonal `off`.
fn thomas(diag: f64, off: f64, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = off / diag;
    d[0] = b[0] / diag;
    for i in 1..n {
        let m = diag - off * c[i - 1];
        c[i] = off / m;
        d[i] = (b[i] - off * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// First eigenvalue of `-u'' = lambda u^(q-1)` on `(0, 1)`, unit `L^q` norm,
/// by normalized nonlinear inverse iteration on the dense discretization.
fn dense_first_eigenvalue(q: f64, n: usize) -> f64 {
    let h = 1.0 / (n + 1) as f64;
    let diag = 2.0 / (h * h);
    let off = -1.0 / (h * h);
    // Positive symmetric start.
    let mut u: Vec<f64> = (1..=n)
        .map(|i| (std::f64::consts::PI * i as f64 * h).sin())
        .collect();
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let rhs: Vec<f64> = u.iter().map(|&v| v.powf(q - 1.0)).collect();
        let w = thomas(diag, off, &rhs);
        let norm = (h * w.iter().map(|&v| v.powf(q)).sum::<f64>()).powf(1.0 / q);
        for (ui, wi) in u.iter_mut().zip(&w) {
            *ui = wi / norm;
        }
        // Energy of the unit-norm iterate, boundary values zero.
        let mut energy = (u[0] / h).powi(2) * h + (u[n - 1] / h).powi(2) * h;
        for i in 0..n - 1 {
            energy += ((u[i + 1] - u[i]) / h).powi(2) * h;
        }
        if (energy - lambda).abs() <= 1e-12 * energy {
            return energy;
        }
        lambda = energy;
    }
    lambda
}

#[test]
fn dense_oracle_recovers_the_classical_interval_eigenvalue() {
    let lambda = dense_first_eigenvalue(2.0, 4095);
    assert!((lambda - std::f64::consts::PI.powi(2)).abs() < 1e-5, "got {lambda}");
}

#[test]
fn shooting_matches_the_dense_oracle_in_the_sub_homogeneous_regime() {
    let dense = dense_first_eigenvalue(1.5, 4095);
    let params = ProblemParams::new(1, 1.5).unwrap();
    let shot = interval_eigenvalue(&params, 1.0, 1, &ShootTol::default()).unwrap().lambda;
    assert!(
        (dense - shot).abs() / shot < 1e-3,
        "dense {dense} vs shooting {shot}"
    );
    // Frozen reference for the same problem.
    assert!((shot - 10.754273095835).abs() < 1e-8);
}

#[test]
fn shooting_matches_the_dense_oracle_in_the_super_homogeneous_regime() {
    let dense = dense_first_eigenvalue(3.0, 4095);
    let params = ProblemParams::new(1, 3.0).unwrap();
    let shot = interval_eigenvalue(&params, 1.0, 1, &ShootTol::default()).unwrap().lambda;
    assert!(
        (dense - shot).abs() / shot < 1e-3,
        "dense {dense} vs shooting {shot}"
    );
}
