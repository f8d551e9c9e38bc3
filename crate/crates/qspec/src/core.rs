//! Problem parameters, domain descriptions, the scaling law, admissibility
//! of ball unions and the free-functional correspondence.
//!
//! Everything here is exact arithmetic on a handful of reals; the solver
//! modules build on these primitives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Critical Sobolev exponent `2* = 2N/(N-2)`, with `+inf` for `N <= 2`.
pub fn critical_exponent(n: i64) -> Result<f64> {
    if n <= 0 {
        return Err(Error::InvalidDimension(n));
    }
    if n <= 2 {
        Ok(f64::INFINITY)
    } else {
        Ok(2.0 * n as f64 / (n as f64 - 2.0))
    }
}

/// Dimension `N`, exponent `q` and the derived critical exponent.
///
/// `q = 2` is the classical (linear) case and is only accepted through
/// [`ProblemParams::classical`]; operations whose exponents degenerate at
/// `q = 2` (spin formula, free functional) reject such parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    n: u32,
    q: f64,
    #[serde(
        serialize_with = "crate::core::ser_maybe_inf",
        deserialize_with = "crate::core::de_maybe_inf"
    )]
    two_star: f64,
    sanity_q2: bool,
}

impl ProblemParams {
    /// Subcritical parameters with `q != 2`.
    pub fn new(n: u32, q: f64) -> Result<Self> {
        let two_star = critical_exponent(n as i64)?;
        if !(q > 1.0) || q >= two_star {
            return Err(Error::InvalidExponent { q, upper: two_star });
        }
        if q == 2.0 {
            return Err(Error::Regime(
                "q = 2 is the classical case; use ProblemParams::classical".into(),
            ));
        }
        Ok(Self { n, q, two_star, sanity_q2: false })
    }

    /// The classical `q = 2` case, flagged as a sanity-check configuration.
    pub fn classical(n: u32) -> Result<Self> {
        let two_star = critical_exponent(n as i64)?;
        Ok(Self { n, q: 2.0, two_star, sanity_q2: true })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn two_star(&self) -> f64 {
        self.two_star
    }

    pub fn is_classical(&self) -> bool {
        self.sanity_q2
    }

    /// Exponent of the scaling law: `lambda(t Omega) = t^(N - 2 - 2N/q) lambda(Omega)`.
    pub fn scaling_exponent(&self) -> f64 {
        self.n as f64 - 2.0 - 2.0 * self.n as f64 / self.q
    }

    /// `true` on the sub-homogeneous side `1 < q < 2`.
    pub fn sub_homogeneous(&self) -> bool {
        self.q < 2.0
    }

    /// Rejects `q = 2` for operations where the exponents blow up.
    pub fn require_nonclassical(&self, what: &str) -> Result<()> {
        if self.q == 2.0 {
            Err(Error::Regime(format!("{what} degenerates at q = 2")))
        } else {
            Ok(())
        }
    }
}

fn ser_maybe_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_maybe_inf<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }
    match NumOrStr::deserialize(d)? {
        NumOrStr::Num(v) => Ok(v),
        NumOrStr::Str(s) if s == "inf" => Ok(f64::INFINITY),
        NumOrStr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
    }
}

/// Scaling law for eigenvalues under dilation of the domain.
pub fn scale_eigenvalue(lambda: f64, t: f64, params: &ProblemParams) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("scale t = {t} must be positive")));
    }
    Ok(t.powf(params.scaling_exponent()) * lambda)
}

/// Tagged description of a computational domain.
///
/// Serialized form follows the JSON schema
/// `{"type":"ball","radius":1.0}`, `{"type":"interval","length":1.0}`,
/// `{"type":"rectangle","a":1.0,"b":1.0}`, `{"type":"mask","path":"...","h":...}`,
/// `{"type":"union","components":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainSpec {
    Interval {
        length: f64,
    },
    Ball {
        radius: f64,
    },
    Rectangle {
        a: f64,
        b: f64,
    },
    Mask {
        path: String,
        h: f64,
    },
    Union {
        components: Vec<DomainSpec>,
        /// Pairwise separation between consecutive components (metadata only;
        /// rasterization places components side by side with at least this gap).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        separation: Option<f64>,
    },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Interval { length } => positive("interval length", *length),
            DomainSpec::Ball { radius } => positive("ball radius", *radius),
            DomainSpec::Rectangle { a, b } => {
                positive("rectangle side a", *a)?;
                positive("rectangle side b", *b)
            }
            DomainSpec::Mask { h, .. } => positive("mask mesh width", *h),
            DomainSpec::Union { components, separation } => {
                if components.is_empty() {
                    return Err(Error::InvalidInput("union with no components".into()));
                }
                if let Some(s) = separation {
                    positive("union separation", *s)?;
                }
                components.iter().try_for_each(|c| c.validate())
            }
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must be positive, got {v}")))
    }
}

/// Whether an eigenfunction keeps one sign on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    SignChanging,
}

/// Eigenvalue plus eigenfunction payload (radial profile or grid field).
///
/// After construction `lq_norm` is 1 up to the solver's normalization
/// tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QEigenpair<P> {
    pub lambda: f64,
    pub eigenfunction: P,
    pub lq_norm: f64,
    pub sign_class: SignClass,
}

/// Radii of a ball union: explicit finite list, geometric rule
/// `r_i = r0 * gamma^i`, or power rule `r_i = scale * (i+1)^(-p)` (i from 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum RadiiRule {
    Explicit {
        radii: Vec<f64>,
        /// Set when the list is a truncation of an infinite family; without a
        /// dominating rule the verdict is then undecided.
        #[serde(default)]
        truncated: bool,
    },
    Geometric {
        r0: f64,
        gamma: f64,
    },
    Power {
        scale: f64,
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub verdict: Admissibility,
    /// Summability exponent `N + 2q/(2-q)`.
    pub exponent: f64,
    /// Partial sum of `r_i^exponent` over the first `K` radii.
    pub partial_sum: f64,
    /// Closed-form value of the full series, when one exists.
    pub series_value: Option<f64>,
}

/// Summability check for the compact-embedding criterion of ball unions:
/// the union is q-admissible when `sum r_i^(N + 2q/(2-q))` is finite.
///
/// Only meaningful in the sub-homogeneous regime `1 < q < 2`.
pub fn check_ball_union_admissible(
    rule: &RadiiRule,
    params: &ProblemParams,
    truncation: usize,
) -> Result<AdmissibilityReport> {
    let q = params.q();
    if q >= 2.0 {
        return Err(Error::Regime(format!(
            "ball-union admissibility criterion requires 1 < q < 2, got q = {q}"
        )));
    }
    let e = params.n() as f64 + 2.0 * q / (2.0 - q);
    match rule {
        RadiiRule::Explicit { radii, truncated } => {
            for &r in radii {
                positive("radius", r)?;
            }
            let partial: f64 = radii.iter().take(truncation.max(radii.len())).map(|r| r.powf(e)).sum();
            let verdict = if *truncated { Admissibility::Undecided } else { Admissibility::Admissible };
            Ok(AdmissibilityReport { verdict, exponent: e, partial_sum: partial, series_value: None })
        }
        RadiiRule::Geometric { r0, gamma } => {
            positive("r0", *r0)?;
            positive("gamma", *gamma)?;
            let ratio = gamma.powf(e);
            let partial: f64 = (0..truncation).map(|i| (r0 * gamma.powi(i as i32)).powf(e)).sum();
            if *gamma >= 1.0 {
                return Ok(AdmissibilityReport {
                    verdict: Admissibility::Inadmissible,
                    exponent: e,
                    partial_sum: partial,
                    series_value: None,
                });
            }
            let series = r0.powf(e) / (1.0 - ratio);
            Ok(AdmissibilityReport {
                verdict: Admissibility::Admissible,
                exponent: e,
                partial_sum: partial,
                series_value: Some(series),
            })
        }
        RadiiRule::Power { scale, p } => {
            positive("scale", *scale)?;
            positive("p", *p)?;
            let partial: f64 = (0..truncation).map(|i| (scale * ((i + 1) as f64).powf(-p)).powf(e)).sum();
            // p-series in the exponent p*e: converges iff p*e > 1.
            let verdict = if p * e > 1.0 { Admissibility::Admissible } else { Admissibility::Inadmissible };
            Ok(AdmissibilityReport { verdict, exponent: e, partial_sum: partial, series_value: None })
        }
    }
}

/// Output of the free-functional correspondence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FreeCorrespondence {
    /// Factor `lambda^(1/(q-2))` multiplying a unit-`L^q` eigenfunction.
    pub amplitude_factor: f64,
    /// Critical value `(1/2 - 1/q) lambda^(q/(q-2))` of the free functional.
    pub critical_value: f64,
}

/// Maps a q-eigenvalue to the corresponding critical point data of the free
/// functional `1/2 |grad|^2 - 1/q |.|^q`.
pub fn free_functional_correspondence(lambda: f64, params: &ProblemParams) -> Result<FreeCorrespondence> {
    params.require_nonclassical("free-functional correspondence")?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must be positive")));
    }
    let q = params.q();
    Ok(FreeCorrespondence {
        amplitude_factor: lambda.powf(1.0 / (q - 2.0)),
        critical_value: (0.5 - 1.0 / q) * lambda.powf(q / (q - 2.0)),
    })
}

/// Inverse of [`free_functional_correspondence`] on the critical value.
pub fn eigenvalue_from_critical_value(critical_value: f64, params: &ProblemParams) -> Result<f64> {
    params.require_nonclassical("free-functional correspondence")?;
    let q = params.q();
    let scaled = critical_value / (0.5 - 1.0 / q);
    if !(scaled > 0.0) {
        return Err(Error::InvalidInput(format!(
            "critical value {critical_value} has the wrong sign for q = {q}"
        )));
    }
    Ok(scaled.powf((q - 2.0) / q))
}

/// Lebesgue measure of the unit N-ball, `pi^(N/2) / Gamma(N/2 + 1)`.
pub fn unit_ball_volume(n: u32) -> f64 {
    // Integer/half-integer Gamma by recursion; avoids pulling in a special
    // function crate for the one value we need.
    let mut vol = match n % 2 {
        0 => 1.0,
        _ => 2.0,
    };
    let mut k = n;
    while k >= 2 {
        vol *= 2.0 * std::f64::consts::PI / k as f64;
        k -= 2;
    }
    vol
}

/// Pohozaev constant `C_{q,N}`: `q/4` for `N = 2`, `(1/(2N)) * 2* q/(2* - q)` for `N >= 3`.
///
/// The same algebra also covers `N = 1`, where `2* = +inf` collapses the
/// fraction to `2q/... `; the N = 1 value is obtained by the limit `2*->inf`,
/// giving `q/2 * 1/(2N) * 2 = q/2`.
pub fn pohozaev_constant(params: &ProblemParams) -> f64 {
    let n = params.n() as f64;
    let q = params.q();
    match params.n() {
        2 => q / 4.0,
        1 => q / 2.0,
        _ => {
            let two_star = params.two_star();
            (1.0 / (2.0 * n)) * (two_star * q / (two_star - q))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(3).unwrap(), 6.0);
        assert!(critical_exponent(2).unwrap().is_infinite());
        assert!(critical_exponent(1).unwrap().is_infinite());
        assert_eq!(critical_exponent(4).unwrap(), 4.0);
        assert!(matches!(critical_exponent(0), Err(Error::InvalidDimension(0))));
        assert!(matches!(critical_exponent(-3), Err(Error::InvalidDimension(-3))));
    }

    #[test]
    fn params_invariants() {
        assert!(ProblemParams::new(2, 1.0).is_err());
        assert!(ProblemParams::new(2, 2.0).is_err());
        assert!(ProblemParams::new(3, 6.0).is_err());
        assert!(ProblemParams::new(3, 7.0).is_err());
        let p = ProblemParams::new(2, 3.0).unwrap();
        assert!(!p.is_classical());
        let c = ProblemParams::classical(2).unwrap();
        assert!(c.is_classical());
        assert!(c.require_nonclassical("spin formula").is_err());
    }

    #[test]
    fn scaling_law() {
        let c = ProblemParams::classical(5).unwrap();
        // q = 2: exponent is -2 for every N.
        assert_eq!(c.scaling_exponent(), -2.0);
        let lam = 7.5;
        assert!((scale_eigenvalue(lam, 3.0, &c).unwrap() - lam / 9.0).abs() < 1e-14);

        let p = ProblemParams::new(2, 1.5).unwrap();
        // N=2, q=3/2: exponent 2-2-8/3 = -8/3.
        assert!((p.scaling_exponent() + 8.0 / 3.0).abs() < 1e-15);
        let scaled = scale_eigenvalue(lam, 2.0, &p).unwrap();
        assert!((scaled - lam * 2f64.powf(-8.0 / 3.0)).abs() < 1e-12);
        // Identity scaling.
        assert_eq!(scale_eigenvalue(lam, 1.0, &p).unwrap(), lam);
        // Group property round trip.
        let back = scale_eigenvalue(scaled, 0.5, &p).unwrap();
        assert!((back - lam).abs() <= 1e-12 * lam);
    }

    #[test]
    fn admissibility_geometric() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let rule = RadiiRule::Geometric { r0: 1.0, gamma: 0.5 };
        let rep = check_ball_union_admissible(&rule, &p, 10).unwrap();
        assert_eq!(rep.verdict, Admissibility::Admissible);
        assert!((rep.exponent - 8.0).abs() < 1e-12);
        assert!((rep.series_value.unwrap() - 256.0 / 255.0).abs() < 1e-14);
    }

    #[test]
    fn admissibility_edge_cases() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        // Finite explicit list: always admissible.
        let rule = RadiiRule::Explicit { radii: vec![1.0, 0.2, 3.0], truncated: false };
        assert_eq!(check_ball_union_admissible(&rule, &p, 3).unwrap().verdict, Admissibility::Admissible);
        // Truncated list without an envelope: undecided.
        let rule = RadiiRule::Explicit { radii: vec![1.0, 0.5], truncated: true };
        assert_eq!(check_ball_union_admissible(&rule, &p, 2).unwrap().verdict, Admissibility::Undecided);
        // gamma >= 1 diverges.
        let rule = RadiiRule::Geometric { r0: 1.0, gamma: 1.0 };
        assert_eq!(check_ball_union_admissible(&rule, &p, 5).unwrap().verdict, Admissibility::Inadmissible);
        // Super-homogeneous regime rejected.
        let p3 = ProblemParams::new(2, 3.0).unwrap();
        assert!(check_ball_union_admissible(&RadiiRule::Geometric { r0: 1.0, gamma: 0.5 }, &p3, 5).is_err());
        // p-series: N=3, q=3/2, r_i = 1/(i+1): exponent 9, converges.
        let p = ProblemParams::new(3, 1.5).unwrap();
        let rep = check_ball_union_admissible(&RadiiRule::Power { scale: 1.0, p: 1.0 }, &p, 100).unwrap();
        assert!((rep.exponent - 9.0).abs() < 1e-12);
        assert_eq!(rep.verdict, Admissibility::Admissible);
    }

    #[test]
    fn admissibility_monotone_in_truncation() {
        let p = ProblemParams::new(2, 1.5).unwrap();
        let rule = RadiiRule::Geometric { r0: 1.0, gamma: 0.5 };
        let mut prev = -1.0;
        for k in 1..30 {
            let rep = check_ball_union_admissible(&rule, &p, k).unwrap();
            assert_eq!(rep.verdict, Admissibility::Admissible);
            assert!(rep.partial_sum >= prev);
            assert!(rep.partial_sum <= rep.series_value.unwrap() + 1e-15);
            prev = rep.partial_sum;
        }
    }

    #[test]
    fn free_functional_values() {
        let p4 = ProblemParams::new(2, 4.0).unwrap();
        let fc = free_functional_correspondence(1.0, &p4).unwrap();
        assert!((fc.amplitude_factor - 1.0).abs() < 1e-15);
        assert!((fc.critical_value - 0.25).abs() < 1e-15);

        let fc = free_functional_correspondence(16.0, &p4).unwrap();
        assert!((fc.amplitude_factor - 4.0).abs() < 1e-12);
        assert!((fc.critical_value - 64.0).abs() < 1e-10);

        let p32 = ProblemParams::new(2, 1.5).unwrap();
        let fc = free_functional_correspondence(1.0, &p32).unwrap();
        assert!((fc.critical_value + 1.0 / 6.0).abs() < 1e-15);

        let c = ProblemParams::classical(2).unwrap();
        assert!(free_functional_correspondence(1.0, &c).is_err());
    }

    #[test]
    fn free_functional_round_trip() {
        for &q in &[1.5, 3.0, 4.0, 1.1] {
            let p = ProblemParams::new(2, q).unwrap();
            for &lam in &[0.3, 1.0, 42.0, 1e6] {
                let fc = free_functional_correspondence(lam, &p).unwrap();
                let back = eigenvalue_from_critical_value(fc.critical_value, &p).unwrap();
                assert!((back - lam).abs() <= 1e-12 * lam, "q={q} lam={lam} back={back}");
            }
        }
    }

    #[test]
    fn ball_volumes() {
        use std::f64::consts::PI;
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn pohozaev_constants() {
        let p = ProblemParams::new(2, 3.0).unwrap();
        assert!((pohozaev_constant(&p) - 0.75).abs() < 1e-15);
        let c3 = ProblemParams::classical(3).unwrap();
        // N=3, q=2: (1/6) * (6*2/(6-2)) = 1/2.
        assert!((pohozaev_constant(&c3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn domain_spec_json_schema() {
        let d: DomainSpec = serde_json::from_str(r#"{"type":"ball","radius":1.0}"#).unwrap();
        assert_eq!(d, DomainSpec::Ball { radius: 1.0 });
        let d: DomainSpec =
            serde_json::from_str(r#"{"type":"union","components":[{"type":"interval","length":1.0},{"type":"rectangle","a":1.0,"b":2.0}]}"#)
                .unwrap();
        d.validate().unwrap();
        let round = serde_json::to_string(&d).unwrap();
        let d2: DomainSpec = serde_json::from_str(&round).unwrap();
        assert_eq!(d, d2);
        assert!(DomainSpec::Ball { radius: -1.0 }.validate().is_err());
    }
}
