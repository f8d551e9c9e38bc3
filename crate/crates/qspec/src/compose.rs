//! Spectrum composition for disjoint unions.
//!
//! A q-eigenvalue of a disjoint union is built from component eigenvalues
//! `lambda_i` and an on/off spin `delta_i` per component via
//!
//! ```text
//! Lambda = [ sum_i (delta_i / lambda_i)^(q/(2-q)) ]^((q-2)/q),
//! ```
//!
//! with the eigenfunction restricted to component `i` equal to
//! `alpha_i = (Lambda/lambda_i)^(1/(2-q))` times the component eigenfunction.
//! Inactive spins are omitted from the sum rather than evaluated as
//! `0^(q/(2-q))`: for `q > 2` that power is infinite, and omission gives the
//! intended semantics in both regimes (a single active spin reproduces the
//! component eigenvalue exactly).
//!
//! All arithmetic is done in log space so that exponents `q/(2-q)` near the
//! classical blow-up `q -> 2` do not overflow.

use serde::{Deserialize, Serialize};

use crate::core::{check_ball_union_admissible, Admissibility, ProblemParams, RadiiRule};
use crate::error::{Error, Result};

/// On/off activation pattern over union components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinVector {
    pub delta: Vec<bool>,
}

impl SpinVector {
    pub fn new(delta: Vec<bool>) -> Result<Self> {
        if delta.iter().any(|&d| d) {
            Ok(Self { delta })
        } else {
            Err(Error::InvalidSpin)
        }
    }

    /// Indices of active components.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.delta.iter().enumerate().filter(|(_, &d)| d).map(|(i, _)| i)
    }

    pub fn active_count(&self) -> usize {
        self.delta.iter().filter(|&&d| d).count()
    }
}

/// One composite eigenvalue with full provenance: the value recomputes
/// bit-for-bit from `component_eigenvalues` and `spins`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub value: f64,
    pub spins: SpinVector,
    /// `(component index, lambda_i)` for each active spin.
    pub component_eigenvalues: Vec<(usize, f64)>,
    /// `|alpha_i|` per component; 0 for inactive spins.
    pub alpha: Vec<f64>,
    /// Other spin patterns producing the identical value (merged duplicates).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_spins: Vec<SpinVector>,
}

impl SpectrumSample {
    /// Number of distinct spin patterns realizing this value.
    pub fn multiplicity(&self) -> usize {
        1 + self.extra_spins.len()
    }
}

/// `log sum_i exp(t_i)`, stable against overflow.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().fold(f64::NEG_INFINITY, |a, &t| a.max(t));
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}

/// `Lambda` for active eigenvalues, in log space. `p = q/(2-q)`.
fn combine(active_lambdas: &[f64], q: f64) -> f64 {
    debug_assert!(!active_lambdas.is_empty());
    if active_lambdas.len() == 1 {
        // Exact single-spin embedding: Spec(Omega_j) sits inside the union
        // spectrum with no roundoff.
        return active_lambdas[0];
    }
    let p = q / (2.0 - q);
    let terms: Vec<f64> = active_lambdas.iter().map(|&l| -p * l.ln()).collect();
    (-log_sum_exp(&terms) / p).exp()
}

/// Composite eigenvalue for one spin pattern.
pub fn spin_eigenvalue(lambdas: &[f64], spins: &SpinVector, params: &ProblemParams) -> Result<SpectrumSample> {
    params.require_nonclassical("spectrum composition")?;
    let q = params.q();
    if lambdas.len() != spins.delta.len() {
        return Err(Error::InvalidInput(format!(
            "{} eigenvalues but {} spins",
            lambdas.len(),
            spins.delta.len()
        )));
    }
    if spins.active_count() == 0 {
        return Err(Error::InvalidSpin);
    }
    for &l in lambdas {
        if !(l > 0.0) {
            return Err(Error::InvalidInput(format!("component eigenvalue {l} must be positive")));
        }
    }
    let active: Vec<f64> = spins.active().map(|i| lambdas[i]).collect();
    let value = combine(&active, q);
    let alpha: Vec<f64> = spins
        .delta
        .iter()
        .zip(lambdas)
        .map(|(&d, &l)| if d { (value / l).powf(1.0 / (2.0 - q)) } else { 0.0 })
        .collect();
    Ok(SpectrumSample {
        value,
        spins: spins.clone(),
        component_eigenvalues: spins.active().map(|i| (i, lambdas[i])).collect(),
        alpha,
        extra_spins: Vec::new(),
    })
}

/// First eigenvalue of a disjoint union from the component first eigenvalues.
///
/// Sub-homogeneous `q < 2`: all spins on (activating a component strictly
/// decreases the value). Super-homogeneous `q > 2`: the plain minimum.
pub fn union_first_eigenvalue(component_lambda1s: &[f64], params: &ProblemParams) -> Result<f64> {
    params.require_nonclassical("union first eigenvalue")?;
    if component_lambda1s.is_empty() {
        return Err(Error::InvalidInput("empty component list".into()));
    }
    for &l in component_lambda1s {
        if !(l > 0.0) {
            return Err(Error::InvalidInput(format!("component eigenvalue {l} must be positive")));
        }
    }
    if params.sub_homogeneous() {
        Ok(combine(component_lambda1s, params.q()))
    } else {
        Ok(component_lambda1s.iter().fold(f64::INFINITY, |a, &l| a.min(l)))
    }
}

/// First eigenvalue of an infinite union of balls `B_(r_i)` given the unit-ball
/// first eigenvalue, with closed-form series summation for geometric rules.
pub fn union_first_eigenvalue_balls(
    unit_ball_lambda1: f64,
    rule: &RadiiRule,
    params: &ProblemParams,
) -> Result<f64> {
    params.require_nonclassical("union first eigenvalue")?;
    let q = params.q();
    let e = params.scaling_exponent();
    if !params.sub_homogeneous() {
        // lambda1(B_r) = lambda1(B_1) r^e is monotone in r; the minimum over
        // the family sits at the largest radius.
        let r_max = match rule {
            RadiiRule::Explicit { radii, .. } => {
                radii.iter().fold(f64::NEG_INFINITY, |a, &r| a.max(r))
            }
            RadiiRule::Geometric { r0, gamma } => {
                if *gamma >= 1.0 {
                    return Err(Error::Inadmissible("geometric radii with ratio >= 1 are unbounded".into()));
                }
                *r0
            }
            RadiiRule::Power { scale, .. } => *scale,
        };
        if !(r_max > 0.0) {
            return Err(Error::InvalidInput("empty or degenerate radii rule".into()));
        }
        return Ok(unit_ball_lambda1 * r_max.powf(e));
    }
    let report = check_ball_union_admissible(rule, params, 64)?;
    if report.verdict == Admissibility::Inadmissible {
        return Err(Error::Inadmissible(format!(
            "radii are not q-summable (exponent {})",
            report.exponent
        )));
    }
    let p = q / (2.0 - q);
    match rule {
        RadiiRule::Explicit { radii, .. } => {
            let lambdas: Vec<f64> = radii.iter().map(|&r| unit_ball_lambda1 * r.powf(e)).collect();
            union_first_eigenvalue(&lambdas, params)
        }
        RadiiRule::Geometric { r0, gamma } => {
            // sum_i lambda_i^(-p) = L^(-p) r0^(-e p) / (1 - gamma^(-e p)),
            // so Lambda = L r0^e (1 - gamma^(-e p))^(1/p).
            let rho = gamma.powf(-e * p);
            if rho >= 1.0 {
                return Err(Error::Inadmissible(format!("spin series diverges (term ratio {rho})")));
            }
            Ok(unit_ball_lambda1 * r0.powf(e) * (1.0 - rho).powf(1.0 / p))
        }
        RadiiRule::Power { scale, p: pr } => {
            // No closed form; sum until the relative tail is at machine level.
            let mut terms = Vec::new();
            let base = -p * (unit_ball_lambda1.ln() + e * scale.ln());
            let mut i = 0u64;
            loop {
                let r_ln = -pr * ((i + 1) as f64).ln();
                terms.push(base - p * e * r_ln);
                let s = log_sum_exp(&terms);
                if terms[terms.len() - 1] < s - 40.0 {
                    return Ok((-s / p).exp());
                }
                i += 1;
                if i > 10_000_000 {
                    return Err(Error::Convergence { iters: i as usize, last: (-s / p).exp() });
                }
            }
        }
    }
}

/// Enumeration budget: the `count` smallest values, everything below a value
/// ceiling, or the automatic ceiling `10 * lambda1(union)`.
#[derive(Debug, Clone, Copy)]
pub enum Cap {
    Count(usize),
    Ceiling(f64),
    Auto,
}

/// Hard cap on raw spin/eigenvalue selections; exceeding it sets `truncated`.
const HARD_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumEnumeration {
    /// Sorted by value, then lexicographic spin; exact duplicates merged.
    pub samples: Vec<SpectrumSample>,
    /// Value ceiling actually applied.
    pub ceiling: f64,
    /// Set when the budget cut the enumeration; absence of a value below the
    /// ceiling is then not a proof of absence.
    pub truncated: bool,
}

/// All composite eigenvalues obtainable by choosing, per component, either no
/// spin or one eigenvalue from its (sorted, possibly truncated) list.
///
/// For `q < 2` the output is complete below the ceiling whenever `truncated`
/// is false: activating further components only decreases the value, so every
/// selection is visited or dominated by a visited one.
pub fn enumerate_spectrum(
    component_spectra: &[Vec<f64>],
    params: &ProblemParams,
    cap: Cap,
) -> Result<SpectrumEnumeration> {
    params.require_nonclassical("spectrum enumeration")?;
    if component_spectra.is_empty() || component_spectra.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidInput("every component needs a nonempty spectrum".into()));
    }
    for spectrum in component_spectra {
        if spectrum.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("component spectra must be sorted ascending".into()));
        }
        if spectrum.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidInput("component eigenvalues must be positive".into()));
        }
    }
    let m = component_spectra.len();
    let firsts: Vec<f64> = component_spectra.iter().map(|s| s[0]).collect();
    let (ceiling, count_cap) = match cap {
        Cap::Count(n) => (f64::INFINITY, n),
        Cap::Ceiling(c) => (c, usize::MAX),
        Cap::Auto => (10.0 * union_first_eigenvalue(&firsts, params)?, usize::MAX),
    };

    // Depth-first over selections: per component, inactive or one list entry.
    let mut truncated = false;
    let mut raw: Vec<(f64, SpinVector, Vec<(usize, f64)>)> = Vec::new();
    let mut choice = vec![usize::MAX; m]; // MAX = inactive
    let mut stack = vec![0usize]; // component cursor
    fn visit(
        component_spectra: &[Vec<f64>],
        q: f64,
        ceiling: f64,
        choice: &mut Vec<usize>,
        comp: usize,
        raw: &mut Vec<(f64, SpinVector, Vec<(usize, f64)>)>,
        truncated: &mut bool,
    ) {
        if raw.len() >= HARD_CAP {
            *truncated = true;
            return;
        }
        if comp == component_spectra.len() {
            let active: Vec<(usize, f64)> = choice
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != usize::MAX)
                .map(|(i, &k)| (i, component_spectra[i][k]))
                .collect();
            if active.is_empty() {
                return;
            }
            let lambdas: Vec<f64> = active.iter().map(|&(_, l)| l).collect();
            let value = combine(&lambdas, q);
            if value <= ceiling {
                let delta: Vec<bool> = choice.iter().map(|&k| k != usize::MAX).collect();
                raw.push((value, SpinVector { delta }, active));
            }
            return;
        }
        choice[comp] = usize::MAX;
        visit(component_spectra, q, ceiling, choice, comp + 1, raw, truncated);
        for k in 0..component_spectra[comp].len() {
            choice[comp] = k;
            visit(component_spectra, q, ceiling, choice, comp + 1, raw, truncated);
        }
        choice[comp] = usize::MAX;
    }
    let _ = &mut stack;
    visit(component_spectra, params.q(), ceiling, &mut choice, 0, &mut raw, &mut truncated);

    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut samples: Vec<SpectrumSample> = Vec::new();
    for (value, spins, active) in raw {
        if let Some(last) = samples.last_mut() {
            if last.value.to_bits() == value.to_bits() {
                last.extra_spins.push(spins);
                continue;
            }
        }
        let alpha: Vec<f64> = {
            let q = params.q();
            let mut a = vec![0.0; m];
            for &(i, l) in &active {
                a[i] = (value / l).powf(1.0 / (2.0 - q));
            }
            a
        };
        samples.push(SpectrumSample { value, spins, component_eigenvalues: active, alpha, extra_spins: Vec::new() });
    }
    if samples.len() > count_cap {
        samples.truncate(count_cap);
        truncated = true;
    }
    Ok(SpectrumEnumeration { samples, ceiling, truncated })
}

/// A detected accumulation point: at least `min_cluster` distinct sample
/// values inside `(point, point + tol)`, approached from above.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccumulationPoint {
    pub point: f64,
    pub count: usize,
    /// Spin patterns of the clustered samples.
    pub witnesses: Vec<SpinVector>,
}

/// Scans a value-sorted sample list for points with at least `min_cluster`
/// distinct values packed inside a `tol` window just above them.
pub fn accumulation_points(samples: &[SpectrumSample], tol: f64, min_cluster: usize) -> Vec<AccumulationPoint> {
    let mut out = Vec::new();
    let n = samples.len();
    let mut i = 0;
    while i < n {
        let v = samples[i].value;
        let mut j = i + 1;
        // Distinct samples (possibly with tied values once the approach
        // saturates at float resolution) inside the window above v.
        while j < n && samples[j].value < v + tol {
            j += 1;
        }
        let count = j - i - 1;
        if count >= min_cluster {
            out.push(AccumulationPoint {
                point: v,
                count,
                witnesses: samples[i..j].iter().map(|s| s.spins.clone()).collect(),
            });
            i = j; // skip past the cluster
        } else {
            i += 1;
        }
    }
    out
}

/// Truncation sequence of the infinite ball union: the first `k` spins on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    /// `Lambda_k` for `k = 1..=k_max`, strictly decreasing.
    pub lambda_k: Vec<f64>,
    /// Closed-form full-series value; every `Lambda_k` stays strictly above it.
    pub limit: f64,
}

/// Partial-spin values `Lambda_k` over the first `k` balls of the rule plus
/// the full-series limit. Requires the sub-homogeneous regime.
pub fn partial_spin_tail(
    rule: &RadiiRule,
    unit_ball_lambda1: f64,
    params: &ProblemParams,
    k_max: usize,
) -> Result<TailReport> {
    let q = params.q();
    if !params.sub_homogeneous() {
        return Err(Error::Regime(format!(
            "the truncation sequence lives in the regime 1 < q < 2, got q = {q}"
        )));
    }
    if k_max == 0 {
        return Err(Error::InvalidInput("need at least one truncation level".into()));
    }
    let report = check_ball_union_admissible(rule, params, k_max)?;
    if report.verdict == Admissibility::Inadmissible {
        return Err(Error::Inadmissible(format!(
            "radii are not q-summable (exponent {})",
            report.exponent
        )));
    }
    let e = params.scaling_exponent();
    let radius = |i: usize| -> Result<f64> {
        match rule {
            RadiiRule::Explicit { radii, .. } => radii
                .get(i)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("truncation {k_max} exceeds the explicit radii list"))),
            RadiiRule::Geometric { r0, gamma } => Ok(r0 * gamma.powi(i as i32)),
            RadiiRule::Power { scale, p } => Ok(scale * ((i + 1) as f64).powf(-*p)),
        }
    };
    let mut lambdas = Vec::with_capacity(k_max);
    for i in 0..k_max {
        lambdas.push(unit_ball_lambda1 * radius(i)?.powf(e));
    }
    let mut lambda_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        lambda_k.push(combine(&lambdas[..k], q));
    }
    let limit = union_first_eigenvalue_balls(unit_ball_lambda1, rule, params)?;
    // Mathematically the sequence is strictly decreasing and stays strictly
    // above the limit; in floats it saturates once the tail drops below one
    // ulp, so the checks run at machine resolution.
    for w in lambda_k.windows(2) {
        if !(w[1] <= w[0]) {
            return Err(Error::Solver(format!("truncation sequence increased: {} -> {}", w[0], w[1])));
        }
    }
    if let Some(&last) = lambda_k.last() {
        if matches!(rule, RadiiRule::Geometric { .. } | RadiiRule::Power { .. })
            && last < limit * (1.0 - 1e-14)
        {
            return Err(Error::Solver(format!("truncation {last} fell below the limit {limit}")));
        }
    }
    Ok(TailReport { lambda_k, limit })
}
