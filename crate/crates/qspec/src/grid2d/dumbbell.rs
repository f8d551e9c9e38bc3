//! Symmetry-breaking experiment on the dumbbell made of two overlapping
//! l^1 cubes centered at `(-(1-eps), 0)` and `(1-eps, 0)`, joined through a
//! neck of half-width `eps` at `x = 0`.

use serde::{Deserialize, Serialize};

use super::{minimize_rayleigh, minimize_rayleigh_symmetric, rasterize_predicate, GridMask, Reflection, SolveOpts, Start};
use crate::core::ProblemParams;
use crate::error::{Error, Result};

fn in_cube(x: f64, y: f64) -> bool {
    x.abs() + y.abs() < 1.0
}

fn in_dumbbell(eps: f64, x: f64, y: f64) -> bool {
    let shift = 1.0 - eps;
    (x >= 0.0 && in_cube(x - shift, y)) || (x <= 0.0 && in_cube(x + shift, y))
}

/// Full dumbbell mask, symmetric about `x = 0` on the lattice.
pub fn dumbbell_mask(eps: f64, h: f64) -> Result<GridMask> {
    check_eps(eps)?;
    let span = 2.0 - eps;
    rasterize_predicate(h, (-span, span), (-1.0, 1.0), false, |x, y| in_dumbbell(eps, x, y))
}

/// Right half of the dumbbell with a mirror (natural) condition at `x = 0`.
pub fn dumbbell_half_mask(eps: f64, h: f64) -> Result<GridMask> {
    check_eps(eps)?;
    let span = 2.0 - eps;
    rasterize_predicate(h, (0.0, span), (-1.0, 1.0), true, |x, y| x >= 0.0 && in_dumbbell(eps, x, y))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("eps = {eps} must lie in (0, 1)")))
    }
}

/// Outcome of the dumbbell experiment at one `(eps, h)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DumbbellReport {
    pub lambda1: f64,
    pub lambda1_sym: f64,
    pub mu_q_half: f64,
    /// `lambda1_sym / lambda1`.
    pub ratio: f64,
    /// Fraction of the `L^q` mass of the unconstrained minimizer in `x > 0`.
    pub localization: f64,
}

/// Runs the full experiment: unconstrained minimum (random positive and
/// one-lobe starts, lower quotient kept), reflection-constrained minimum, and
/// the half-domain eigenvalue with the natural condition on the symmetry line.
pub fn dumbbell_experiment(
    eps: f64,
    params: &ProblemParams,
    h: f64,
    opts: &SolveOpts,
) -> Result<DumbbellReport> {
    let q = params.q();
    if !(q > 2.0) && !params.is_classical() {
        return Err(Error::Regime(format!(
            "dumbbell symmetry breaking is a super-homogeneous phenomenon; got q = {q}"
        )));
    }
    let mask = dumbbell_mask(eps, h)?;

    let mut opts_rand = opts.clone();
    opts_rand.start = Start::RandomPositive;
    let pair_rand = minimize_rayleigh(params, &mask, &opts_rand)?;
    let mut opts_lobe = opts.clone();
    opts_lobe.start = Start::RightLobe;
    let pair_lobe = minimize_rayleigh(params, &mask, &opts_lobe)?;
    // The symmetric saddle can trap the random-start iteration; keep whichever
    // start reached the lower quotient.
    let pair = if pair_lobe.lambda <= pair_rand.lambda { pair_lobe } else { pair_rand };

    let reflection = Reflection::vertical(&mask, 0.0)?;
    let pair_sym = minimize_rayleigh_symmetric(params, &mask, &reflection, opts)?;

    let half = dumbbell_half_mask(eps, h)?;
    let pair_half = minimize_rayleigh(params, &half, opts)?;

    let m = pair.eigenfunction.mask.cell_measure();
    let mut right = 0.0;
    let mut total = 0.0;
    for (p, &v) in pair.eigenfunction.values.iter().enumerate() {
        let (x, _) = pair.eigenfunction.mask.coords(p);
        let mass = m * v.abs().powf(q);
        total += mass;
        if x > 0.0 {
            right += mass;
        } else if x == 0.0 {
            right += 0.5 * mass;
        }
    }

    Ok(DumbbellReport {
        lambda1: pair.lambda,
        lambda1_sym: pair_sym.lambda,
        mu_q_half: pair_half.lambda,
        ratio: pair_sym.lambda / pair.lambda,
        localization: right / total,
    })
}

/// `2^(1 - 2/q)`, the factor linking the symmetric minimum to the half-domain
/// eigenvalue.
pub fn symmetric_factor(q: f64) -> f64 {
    2f64.powf(1.0 - 2.0 / q)
}
