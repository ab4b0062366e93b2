use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{
    check_nonexpansive, check_orbital_continuity_at, check_orbitally_phi_contractive,
    check_orbitally_r_contractive, check_special_limit, iterate_orbit, LimitVerdict, OrbitOptions,
    OrbitTrace, PhiFunction, SelfMap,
};
use crate::point::Point;
use crate::sampler::PointSampler;
use crate::space::{PmSpace, SpaceClass};

/// Which fixed-point theorem, and which of its hypothesis cases, to certify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremVariant {
    /// Non-expansive and orbitally continuous at the special limit.
    #[serde(rename = "T1.9-1")]
    NonexpansiveContinuous,
    /// Orbitally continuous, space bounded below by `p(fa, fa)`.
    #[serde(rename = "T1.9-2")]
    ContinuousBoundedByImage,
    /// Non-expansive, space bounded below by `p(a, a)`.
    #[serde(rename = "T1.9-3")]
    NonexpansiveBoundedByCandidate,
    /// Strong space, non-expansive.
    #[serde(rename = "T1.10-1")]
    StrongNonexpansive,
    /// Strong space, orbitally continuous.
    #[serde(rename = "T1.10-2")]
    StrongContinuous,
    /// Orbitally r-contractive and non-expansive, with orbital continuity or
    /// a lower bound `r`; concludes `p(a, a) = r`.
    #[serde(rename = "T6.4")]
    RContractive,
    /// Orbitally phi-contractive and non-expansive, with orbital continuity
    /// or a lower bound `r`; concludes `p(a, a) = r`.
    #[serde(rename = "T7.3")]
    PhiContractive,
}

impl TheoremVariant {
    pub const ALL: [TheoremVariant; 7] = [
        TheoremVariant::NonexpansiveContinuous,
        TheoremVariant::ContinuousBoundedByImage,
        TheoremVariant::NonexpansiveBoundedByCandidate,
        TheoremVariant::StrongNonexpansive,
        TheoremVariant::StrongContinuous,
        TheoremVariant::RContractive,
        TheoremVariant::PhiContractive,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TheoremVariant::NonexpansiveContinuous => "T1.9-1",
            TheoremVariant::ContinuousBoundedByImage => "T1.9-2",
            TheoremVariant::NonexpansiveBoundedByCandidate => "T1.9-3",
            TheoremVariant::StrongNonexpansive => "T1.10-1",
            TheoremVariant::StrongContinuous => "T1.10-2",
            TheoremVariant::RContractive => "T6.4",
            TheoremVariant::PhiContractive => "T7.3",
        }
    }

    fn fixes_self_distance(self) -> bool {
        matches!(
            self,
            TheoremVariant::RContractive | TheoremVariant::PhiContractive
        )
    }
}

impl fmt::Display for TheoremVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let ids: Vec<&str> = Self::ALL.iter().map(|v| v.id()).collect();
                Error::InvalidArgument(format!(
                    "unknown theorem variant `{s}` (expected one of {})",
                    ids.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub orbit: OrbitOptions,
    /// Target self-distance for the contractive variants.
    pub r: Option<f64>,
    /// Contraction constant for the r-contractive variant.
    pub c: Option<f64>,
    pub phi: Option<PhiFunction>,
    /// Orbit prefix length for the contraction certificates.
    pub prefix: usize,
    /// Pairs drawn for the non-expansive and lower-bound checks.
    pub samples: usize,
    /// Sampler for those checks; defaults to a pool of orbit points, `a` and `fa`.
    pub sampler: Option<PointSampler>,
    pub seed: u64,
    /// Further starting points whose solutions must coincide with the first.
    pub uniqueness_starts: Vec<Point>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            orbit: OrbitOptions::default(),
            r: None,
            c: None,
            phi: None,
            prefix: 64,
            samples: 1000,
            sampler: None,
            seed: 0,
            uniqueness_starts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub verdict: bool,
    pub evidence: String,
}

impl Condition {
    fn new(name: &str, verdict: bool, evidence: String) -> Self {
        Self {
            name: name.to_owned(),
            verdict,
            evidence,
        }
    }
}

/// The outcome of a fixed-point run, with every hypothesis and conclusion
/// check that was evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCertificate {
    pub theorem_variant: TheoremVariant,
    pub candidate: Point,
    pub image: Point,
    pub self_distance: f64,
    pub p_a_fa: f64,
    pub p_fa_fa: f64,
    /// `|p(a, fa) - p(a, a)| + |p(fa, fa) - p(a, a)|`.
    pub residual: f64,
    pub r: Option<f64>,
    pub r_estimate: f64,
    pub steps: usize,
    pub conditions_checked: Vec<Condition>,
    pub tolerance: f64,
    pub success: bool,
}

impl FixedPointCertificate {
    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions_checked.iter().find(|c| c.name == name)
    }

    /// Re-evaluates the recorded candidate and checks that every stored value
    /// is reproduced and, for a success, that the residual is within tolerance.
    pub fn replay(&self, space: &PmSpace, f: &SelfMap) -> Result<bool> {
        let fa = f.apply(&self.candidate)?;
        let paa = space.self_distance(&self.candidate)?;
        let pafa = space.p(&self.candidate, &fa)?;
        let pfafa = space.self_distance(&fa)?;
        let residual = (pafa - paa).abs() + (pfafa - paa).abs();
        let close = |a: f64, b: f64| (a - b).abs() <= self.tolerance;
        let reproduced = fa == self.image
            && close(paa, self.self_distance)
            && close(pafa, self.p_a_fa)
            && close(pfafa, self.p_fa_fa)
            && close(residual, self.residual);
        Ok(reproduced && (!self.success || residual <= self.tolerance))
    }
}

fn lower_bound_condition(
    space: &PmSpace,
    sampler: &PointSampler,
    samples: usize,
    bound: f64,
    tol: f64,
) -> Result<(bool, String)> {
    if let Some(r0) = space.lower_bound() {
        if r0.get() >= bound - tol {
            return Ok((
                true,
                format!("declared lower bound {} >= {bound}", r0.get()),
            ));
        }
    }
    let mut stream = sampler.stream();
    let mut lowest = f64::INFINITY;
    for _ in 0..samples {
        let x = stream.next_point();
        let y = stream.next_point();
        lowest = lowest.min(space.p(&x, &y)?);
    }
    let declared = space.lower_bound().map_or_else(
        || "none declared".to_owned(),
        |r0| format!("declared {}", r0.get()),
    );
    Ok((
        lowest >= bound - tol,
        format!("sampled minimum {lowest} over {samples} pairs vs bound {bound} ({declared})"),
    ))
}

fn default_sampler(trace: &OrbitTrace, a: &Point, fa: &Point, seed: u64) -> PointSampler {
    let stride = (trace.points.len() / 256).max(1);
    let mut pool: Vec<Point> = trace.points.iter().step_by(stride).cloned().collect();
    pool.extend(trace.tail_points().iter().cloned());
    pool.push(a.clone());
    pool.push(fa.clone());
    PointSampler::pool(pool, seed)
}

/// Iterates `f` from `x0`, takes the last iterate as the candidate fixed
/// point, checks the hypotheses of `variant` and then the conclusion.
pub fn solve_fixed_point(
    space: &PmSpace,
    f: &SelfMap,
    x0: &Point,
    variant: TheoremVariant,
    options: &SolverOptions,
) -> Result<FixedPointCertificate> {
    let tol = options.orbit.tol;
    let r = match variant {
        TheoremVariant::RContractive => {
            if options.c.is_none() {
                return Err(Error::InvalidArgument(format!(
                    "{variant} needs a contraction constant c"
                )));
            }
            Some(
                options
                    .r
                    .ok_or_else(|| Error::InvalidArgument(format!("{variant} needs r")))?,
            )
        }
        TheoremVariant::PhiContractive => {
            let phi = options
                .phi
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument(format!("{variant} needs a phi function")))?;
            Some(options.r.unwrap_or(phi.r()))
        }
        _ => None,
    };

    let trace = iterate_orbit(space, f, x0, &options.orbit)?;
    if !trace.is_cauchy() {
        return Err(Error::OrbitNotCauchy(format!(
            "{} after {} steps (tail spread {})",
            trace.verdict,
            trace.steps(),
            trace.tail.spread()
        )));
    }
    let a = trace.last().clone();
    let fa = f.apply(&a)?;
    let paa = space.self_distance(&a)?;
    let pafa = space.p(&a, &fa)?;
    let pfafa = space.self_distance(&fa)?;
    let residual = (pafa - paa).abs() + (pfafa - paa).abs();
    let sampler = options
        .sampler
        .clone()
        .unwrap_or_else(|| default_sampler(&trace, &a, &fa, options.seed));

    let mut conditions = Vec::new();
    let limit = check_special_limit(space, &trace, &a, trace.limit_tolerance())?;
    let special = limit.verdict == LimitVerdict::SpecialLimit;
    conditions.push(Condition::new(
        "special limit",
        special,
        format!(
            "{}: max |p(a,x_n) - p(a,a)| = {}, p(a,a) = {}, r_estimate = {}",
            limit.verdict, limit.max_deviation, paa, trace.r_estimate
        ),
    ));

    let mut nonexpansive = || -> Result<bool> {
        let report = check_nonexpansive(space, f, &sampler, options.samples, tol)?;
        let evidence = match &report.worst {
            Some(w) => format!(
                "worst pair ({}, {}): p(fx,fy) = {}, p(x,y) = {}",
                w.x, w.y, w.lhs, w.rhs
            ),
            None => "no pairs sampled".into(),
        };
        conditions.push(Condition::new("non-expansive", report.pass, evidence));
        Ok(report.pass)
    };
    let nonexp = match variant {
        TheoremVariant::ContinuousBoundedByImage | TheoremVariant::StrongContinuous => None,
        _ => Some(nonexpansive()?),
    };

    let continuity = |conditions: &mut Vec<Condition>| -> Result<bool> {
        if !special {
            conditions.push(Condition::new(
                "orbital continuity",
                false,
                "candidate is not a special limit".into(),
            ));
            return Ok(false);
        }
        let report = check_orbital_continuity_at(space, f, &trace, &a, trace.limit_tolerance())?;
        conditions.push(Condition::new(
            "orbital continuity",
            report.pass,
            format!("p(fa,fa) = {}, p(a,fa) = {}", report.p_fa_fa, report.p_a_fa),
        ));
        Ok(report.pass)
    };
    let bounded_below = |conditions: &mut Vec<Condition>, name: &str, bound: f64| -> Result<bool> {
        let (pass, evidence) = lower_bound_condition(space, &sampler, options.samples, bound, tol)?;
        conditions.push(Condition::new(name, pass, evidence));
        Ok(pass)
    };
    let strong = |conditions: &mut Vec<Condition>| {
        let class = space.declared_class();
        conditions.push(Condition::new(
            "strong space",
            class.is_strong(),
            format!("declared class {}", class.as_str()),
        ));
        class.is_strong()
    };

    let hypotheses = match variant {
        TheoremVariant::NonexpansiveContinuous => {
            nonexp == Some(true) && continuity(&mut conditions)?
        }
        TheoremVariant::ContinuousBoundedByImage => {
            let cont = continuity(&mut conditions)?;
            bounded_below(&mut conditions, "bounded below by p(fa,fa)", pfafa)? && cont
        }
        TheoremVariant::NonexpansiveBoundedByCandidate => {
            bounded_below(&mut conditions, "bounded below by p(a,a)", paa)? && nonexp == Some(true)
        }
        TheoremVariant::StrongNonexpansive => strong(&mut conditions) && nonexp == Some(true),
        TheoremVariant::StrongContinuous => strong(&mut conditions) && continuity(&mut conditions)?,
        TheoremVariant::RContractive | TheoremVariant::PhiContractive => {
            let r = r.expect("set above");
            let contractive = if variant == TheoremVariant::RContractive {
                let c = options.c.expect("checked above");
                let report =
                    check_orbitally_r_contractive(space, f, x0, r, c, options.prefix, tol)?;
                let evidence = match &report.first_failure {
                    Some(e) => format!(
                        "fails at n = {}: {} ({} > {})",
                        e.n, e.condition, e.lhs, e.rhs
                    ),
                    None => format!("{} indices checked with r = {r}, c = {c}", report.checked),
                };
                conditions.push(Condition::new(
                    "orbitally r-contractive",
                    report.pass,
                    evidence,
                ));
                report.pass
            } else {
                let phi = options.phi.as_ref().expect("checked above");
                let report =
                    check_orbitally_phi_contractive(space, f, x0, r, phi, options.prefix, tol)?;
                let evidence = match &report.first_failure {
                    Some(e) => format!(
                        "fails at (m, n) = ({}, {}): {} ({} > {})",
                        e.m, e.n, e.condition, e.lhs, e.rhs
                    ),
                    None => format!("{} pairs checked with phi {phi}", report.pairs_checked),
                };
                conditions.push(Condition::new(
                    "orbitally phi-contractive",
                    report.pass,
                    evidence,
                ));
                report.pass
            };
            let cont = continuity(&mut conditions)?;
            let bounded = bounded_below(&mut conditions, "bounded below by r", r)?;
            contractive && nonexp == Some(true) && (cont || bounded)
        }
    };

    let mut certificate = FixedPointCertificate {
        theorem_variant: variant,
        candidate: a.clone(),
        image: fa.clone(),
        self_distance: paa,
        p_a_fa: pafa,
        p_fa_fa: pfafa,
        residual,
        r,
        r_estimate: trace.r_estimate,
        steps: trace.steps(),
        conditions_checked: conditions,
        tolerance: tol,
        success: false,
    };

    if !special || !hypotheses {
        let failed = certificate
            .conditions_checked
            .iter()
            .filter(|c| !c.verdict)
            .map(|c| c.name.clone())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::HypothesisFailed {
            variant: variant.to_string(),
            condition: failed,
            certificate: Box::new(certificate),
        });
    }

    let mut conclusion = vec![
        ("p(a,fa) = p(a,a)", (pafa - paa).abs()),
        ("p(fa,fa) = p(a,a)", (pfafa - paa).abs()),
    ];
    if let Some(r) = r.filter(|_| variant.fixes_self_distance()) {
        conclusion.push(("p(a,a) = r", (paa - r).abs()));
    }
    if space.declared_class() == SpaceClass::Metric {
        conclusion.push(("p(a,fa) = 0", pafa.abs()));
    }
    let mut worst = residual;
    for (name, value) in &conclusion {
        certificate.conditions_checked.push(Condition::new(
            name,
            *value <= tol,
            format!("deviation {value}"),
        ));
        worst = worst.max(*value);
    }
    if worst > tol {
        return Err(Error::ResidualExceeded {
            variant: variant.to_string(),
            residual: worst,
            tolerance: tol,
            certificate: Box::new(certificate),
        });
    }

    for start in &options.uniqueness_starts {
        let other_options = SolverOptions {
            uniqueness_starts: Vec::new(),
            ..options.clone()
        };
        let other = solve_fixed_point(space, f, start, variant, &other_options)?;
        let b = &other.candidate;
        let pab = space.p(&a, b)?;
        let pbb = other.self_distance;
        let gap = (pab - paa).abs().max((pab - pbb).abs());
        let agree = gap <= trace.limit_tolerance();
        certificate.conditions_checked.push(Condition::new(
            "same fixed point",
            agree,
            format!("from x0 = {start}: candidate {b}, p(a,b) = {pab}, p(b,b) = {pbb}"),
        ));
        if !agree {
            return Err(Error::Disagreement {
                variant: variant.to_string(),
                detail: format!("start {start} reaches {b}, not {a}"),
                certificate: Box::new(certificate),
            });
        }
    }

    certificate.success = true;
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_metric_line, make_punctured_line};

    fn contraction_options() -> SolverOptions {
        SolverOptions {
            r: Some(0.0),
            c: Some(0.5),
            ..SolverOptions::default()
        }
    }

    #[test]
    fn variant_ids_round_trip() {
        for v in TheoremVariant::ALL {
            assert_eq!(v.id().parse::<TheoremVariant>().unwrap(), v);
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(json, format!("\"{}\"", v.id()));
        }
        assert!("T2.1".parse::<TheoremVariant>().is_err());
    }

    #[test]
    fn affine_contraction_every_variant() {
        let space = make_metric_line();
        let f = SelfMap::linear(0.5, 1.0);
        let mut options = contraction_options();
        options.phi = Some(PhiFunction::linear(0.0, 0.5).unwrap());
        for v in TheoremVariant::ALL {
            let cert = solve_fixed_point(&space, &f, &Point::Real(0.0), v, &options).unwrap();
            let a = cert.candidate.as_real().unwrap();
            assert!((a - 2.0).abs() <= 1e-8, "{v}: {a}");
            assert!(cert.success);
            assert!(cert.residual <= cert.tolerance);
            assert!(cert.replay(&space, &f).unwrap());
        }
    }

    #[test]
    fn second_start_agrees() {
        let space = make_metric_line();
        let options = SolverOptions {
            uniqueness_starts: vec![Point::Real(100.0)],
            ..contraction_options()
        };
        let cert = solve_fixed_point(
            &space,
            &SelfMap::linear(0.5, 1.0),
            &Point::Real(0.0),
            TheoremVariant::RContractive,
            &options,
        )
        .unwrap();
        assert!(cert.condition("same fixed point").unwrap().verdict);
    }

    #[test]
    fn translation_is_not_cauchy() {
        let space = make_metric_line();
        let options = SolverOptions {
            orbit: OrbitOptions {
                max_steps: 5000,
                ..OrbitOptions::default()
            },
            ..contraction_options()
        };
        for v in TheoremVariant::ALL {
            let mut options = options.clone();
            options.phi = Some(PhiFunction::linear(0.0, 0.5).unwrap());
            let err = solve_fixed_point(
                &space,
                &SelfMap::translate(1.0),
                &Point::Real(0.0),
                v,
                &options,
            );
            assert!(matches!(err, Err(Error::OrbitNotCauchy(_))), "{v}");
        }
    }

    #[test]
    fn missing_parameters() {
        let space = make_metric_line();
        let err = solve_fixed_point(
            &space,
            &SelfMap::halving(),
            &Point::Real(1.0),
            TheoremVariant::RContractive,
            &SolverOptions::default(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let err = solve_fixed_point(
            &space,
            &SelfMap::halving(),
            &Point::Real(1.0),
            TheoremVariant::PhiContractive,
            &SolverOptions::default(),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn failed_hypothesis_keeps_certificate() {
        // Doubling fixes 0 but expands, so the non-expansive case is refuted.
        let space = make_metric_line();
        let err = solve_fixed_point(
            &space,
            &SelfMap::linear(2.0, 0.0),
            &Point::Real(0.0),
            TheoremVariant::StrongNonexpansive,
            &SolverOptions {
                sampler: Some(PointSampler::uniform_reals(-1.0, 1.0, 1)),
                ..SolverOptions::default()
            },
        );
        match err {
            Err(Error::HypothesisFailed {
                condition,
                certificate,
                ..
            }) => {
                assert_eq!(condition, "non-expansive");
                assert!(!certificate.success);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_r_is_a_falsified_conclusion() {
        // The punctured line's halving orbit has r = -1, so asking for r = -1/2
        // fails r-contractivity on the self-distances.
        let space = make_punctured_line();
        let options = SolverOptions {
            r: Some(-1.0),
            c: Some(0.5),
            ..SolverOptions::default()
        };
        let cert = solve_fixed_point(
            &space,
            &SelfMap::halving(),
            &Point::Real(1.0),
            TheoremVariant::RContractive,
            &options,
        )
        .unwrap();
        assert_eq!(cert.self_distance, -1.0);
        let options = SolverOptions {
            r: Some(-0.5),
            ..options
        };
        let err = solve_fixed_point(
            &space,
            &SelfMap::halving(),
            &Point::Real(1.0),
            TheoremVariant::RContractive,
            &options,
        );
        assert!(matches!(err, Err(Error::HypothesisFailed { .. })));
    }
}
