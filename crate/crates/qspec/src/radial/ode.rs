//! Embedded Dormand-Prince 5(4) integrator with step collection.
//!
//! The radial shooting problems are small (2-5 state components), so the
//! integrator is generic over a const dimension and takes the right-hand
//! side as a closure.

use crate::error::{Error, Result};

const STAGES: usize = 7;

const C: [f64; STAGES] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// 5th order weights (same as the last A row) and the embedded 4th order pair.
const B5: [f64; STAGES] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeTol {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTol {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

/// One accepted integration node.
#[derive(Debug, Clone, Copy)]
pub struct Node<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
}

/// Adaptive integration from `t0` to `t_end`, collecting every accepted node.
pub fn integrate<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    tol: OdeTol,
) -> Result<Vec<Node<D>>> {
    let mut nodes = vec![Node { t: t0, y: y0 }];
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t_end - t0) * 1e-4).max(1e-10);
    let h_min = (t_end - t0).abs() * 1e-14 + 1e-300;

    let mut k = [[0.0; D]; STAGES];
    while t < t_end {
        if h < h_min {
            return Err(Error::Stiffness { rho: t, h });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        k[0] = f(t, &y);
        for s in 1..STAGES {
            let mut ys = y;
            for j in 0..s {
                let a = A[s][j];
                if a != 0.0 {
                    for d in 0..D {
                        ys[d] += h * a * k[j][d];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut y4 = y;
        for s in 0..STAGES {
            for d in 0..D {
                y5[d] += h * B5[s] * k[s][d];
                y4[d] += h * B4[s] * k[s][d];
            }
        }
        // Weighted RMS error norm.
        let mut err = 0.0;
        for d in 0..D {
            let sc = tol.atol + tol.rtol * y[d].abs().max(y5[d].abs());
            let e = (y5[d] - y4[d]) / sc;
            err += e * e;
        }
        let err = (err / D as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            nodes.push(Node { t, y });
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(nodes)
}

/// Fixed-step classical RK4 from `(t0, y0)` to `t_end` with `steps` steps.
///
/// Used to re-integrate inside a single accepted step during zero bisection,
/// and as the independent cross-check integrator in tests.
pub fn rk4<const D: usize>(
    f: impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    steps: usize,
) -> [f64; D] {
    let h = (t_end - t0) / steps as f64;
    let mut t = t0;
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(t, &y);
        let mut y2 = y;
        for d in 0..D {
            y2[d] += 0.5 * h * k1[d];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = y;
        for d in 0..D {
            y3[d] += 0.5 * h * k2[d];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = y;
        for d in 0..D {
            y4[d] += h * k3[d];
        }
        let k4 = f(t + h, &y4);
        for d in 0..D {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        t += h;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_harmonic_oscillator() {
        // y'' = -y, y(0)=1, y'(0)=0: y = cos t.
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let nodes = integrate(f, 0.0, [1.0, 0.0], 10.0, OdeTol::default()).unwrap();
        let last = nodes.last().unwrap();
        assert!((last.y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((last.y[1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn rk4_matches_adaptive() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y = rk4(f, 0.0, [1.0, 0.0], 3.0, 20000);
        assert!((y[0] - 3f64.cos()).abs() < 1e-12);
    }
}
