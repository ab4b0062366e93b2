use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{check_special_limit, LimitVerdict, OrbitTrace, PhiFunction, SelfMap};
use crate::point::Point;
use crate::sampler::PointSampler;
use crate::space::PmSpace;

fn check_sampler(space: &PmSpace, sampler: &PointSampler) -> Result<()> {
    let produced = sampler.point_kind()?;
    if space.point_kind().includes(produced) {
        Ok(())
    } else {
        Err(Error::SamplerMismatch {
            space: space.point_kind(),
            sampler: produced,
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be finite and >= 0, got {tol}"
        )))
    }
}

/// `x_0, ..., x_len`.
pub fn orbit_prefix(space: &PmSpace, f: &SelfMap, x0: &Point, len: usize) -> Result<Vec<Point>> {
    space.check_point(x0)?;
    let mut points = Vec::with_capacity(len + 1);
    points.push(x0.clone());
    for _ in 0..len {
        let next = f.apply(points.last().expect("nonempty"))?;
        space.check_point(&next)?;
        points.push(next);
    }
    Ok(points)
}

/// A pair of points with both sides of the inequality that was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub x: Point,
    pub y: Point,
    pub lhs: f64,
    pub rhs: f64,
}

/// Orbit indices with both sides of the inequality that was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexFailure {
    pub m: usize,
    pub n: usize,
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonExpansiveReport {
    pub pass: bool,
    /// The pair maximising `p(fx, fy) - p(x, y)`.
    pub worst: Option<PairFailure>,
    pub samples: usize,
    pub tolerance: f64,
}

/// Checks `p(fx, fy) <= p(x, y)` on `n` sampled pairs.
pub fn check_nonexpansive(
    space: &PmSpace,
    f: &SelfMap,
    sampler: &PointSampler,
    n: usize,
    tol: f64,
) -> Result<NonExpansiveReport> {
    check_tol(tol)?;
    check_sampler(space, sampler)?;
    let mut stream = sampler.stream();
    let mut worst: Option<PairFailure> = None;
    for _ in 0..n {
        let x = stream.next_point();
        let y = stream.next_point();
        let lhs = space.p(&f.apply(&x)?, &f.apply(&y)?)?;
        let rhs = space.p(&x, &y)?;
        if worst.as_ref().is_none_or(|w| lhs - rhs > w.lhs - w.rhs) {
            worst = Some(PairFailure { x, y, lhs, rhs });
        }
    }
    let pass = worst.as_ref().is_none_or(|w| w.lhs <= w.rhs + tol);
    Ok(NonExpansiveReport {
        pass,
        worst,
        samples: n,
        tolerance: tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub pass: bool,
    pub p_fa_fa: f64,
    pub p_a_fa: f64,
    pub tolerance: f64,
}

/// Checks `p(fa, fa) = p(a, fa)`, the orbital continuity criterion at a
/// special limit `a` of the traced orbit.
pub fn check_orbital_continuity_at(
    space: &PmSpace,
    f: &SelfMap,
    trace: &OrbitTrace,
    a: &Point,
    tol: f64,
) -> Result<ContinuityReport> {
    check_tol(tol)?;
    let limit = check_special_limit(space, trace, a, trace.limit_tolerance())?;
    if limit.verdict != LimitVerdict::SpecialLimit {
        return Err(Error::Precondition(format!(
            "{a} is not a special limit of the orbit ({}, deviation {}, p(a,a) = {}, r = {})",
            limit.verdict, limit.max_deviation, limit.self_distance, limit.r_estimate
        )));
    }
    let fa = f.apply(a)?;
    let p_fa_fa = space.self_distance(&fa)?;
    let p_a_fa = space.p(a, &fa)?;
    Ok(ContinuityReport {
        pass: (p_fa_fa - p_a_fa).abs() <= tol,
        p_fa_fa,
        p_a_fa,
        tolerance: tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RContractiveReport {
    pub pass: bool,
    pub first_failure: Option<IndexFailure>,
    /// Number of indices `n` checked.
    pub checked: usize,
}

fn check_contraction_constant(c: f64) -> Result<()> {
    if (0.0..1.0).contains(&c) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "contraction constant must satisfy 0 <= c < 1, got {c}"
        )))
    }
}

/// Checks, for `n = 0..=prefix-2`, that `r <= p(x_n, x_n)` and
/// `p(x_{n+2}, x_{n+1}) <= r + c^{n+1} |p(x_1, x_0)|`.
pub fn check_orbitally_r_contractive(
    space: &PmSpace,
    f: &SelfMap,
    x0: &Point,
    r: f64,
    c: f64,
    prefix: usize,
    tol: f64,
) -> Result<RContractiveReport> {
    check_tol(tol)?;
    check_contraction_constant(c)?;
    if prefix < 2 {
        return Err(Error::InvalidArgument(format!(
            "orbit prefix must be at least 2, got {prefix}"
        )));
    }
    let xs = orbit_prefix(space, f, x0, prefix)?;
    let first_step = space.p(&xs[1], &xs[0])?.abs();
    let mut first_failure = None;
    let mut checked = 0;
    for n in 0..=prefix - 2 {
        checked += 1;
        let pnn = space.self_distance(&xs[n])?;
        if r > pnn + tol {
            first_failure = Some(IndexFailure {
                m: n,
                n,
                condition: "r <= p(x_n, x_n)".into(),
                lhs: r,
                rhs: pnn,
            });
            break;
        }
        let lhs = space.p(&xs[n + 2], &xs[n + 1])?;
        let rhs = r + c.powi(n as i32 + 1) * first_step;
        if lhs > rhs + tol {
            first_failure = Some(IndexFailure {
                m: n + 2,
                n: n + 1,
                condition: "p(x_{n+2}, x_{n+1}) <= r + c^{n+1} |p(x_1, x_0)|".into(),
                lhs,
                rhs,
            });
            break;
        }
    }
    Ok(RContractiveReport {
        pass: first_failure.is_none(),
        first_failure,
        checked,
    })
}

/// Checks `p(x_m, x_n) <= r + c^n |p(x_1, x_0)| / (1 - c)` for all
/// `m > n` within `points`, returning the first violation.
pub fn check_cauchy_tail_bound(
    space: &PmSpace,
    points: &[Point],
    r: f64,
    c: f64,
    tol: f64,
) -> Result<Option<IndexFailure>> {
    check_tol(tol)?;
    check_contraction_constant(c)?;
    if points.len() < 2 {
        return Ok(None);
    }
    let first_step = space.p(&points[1], &points[0])?.abs();
    for n in 0..points.len() {
        let rhs = r + c.powi(n as i32) * first_step / (1.0 - c);
        for m in n + 1..points.len() {
            let lhs = space.p(&points[m], &points[n])?;
            if lhs > rhs + tol {
                return Ok(Some(IndexFailure {
                    m,
                    n,
                    condition: "p(x_m, x_n) <= r + c^n |p(x_1, x_0)| / (1 - c)".into(),
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiContractiveReport {
    pub pass: bool,
    pub first_failure: Option<IndexFailure>,
    pub pairs_checked: usize,
}

/// Checks, for all `0 <= m, n < prefix`, that `r <= p(x_n, x_n)` and
/// `p(x_{m+1}, x_{n+1}) <= p(x_m, x_n) - phi(p(x_m, x_n))`.
pub fn check_orbitally_phi_contractive(
    space: &PmSpace,
    f: &SelfMap,
    x0: &Point,
    r: f64,
    phi: &PhiFunction,
    prefix: usize,
    tol: f64,
) -> Result<PhiContractiveReport> {
    check_tol(tol)?;
    if phi.r() != r {
        return Err(Error::InvalidPhi(format!(
            "phi is defined from {} but r = {r}",
            phi.r()
        )));
    }
    if prefix < 1 {
        return Err(Error::InvalidArgument(
            "orbit prefix must be at least 1".into(),
        ));
    }
    let xs = orbit_prefix(space, f, x0, prefix)?;
    let mut pairs_checked = 0;
    for m in 0..prefix {
        let pmm = space.self_distance(&xs[m])?;
        if r > pmm + tol {
            return Ok(PhiContractiveReport {
                pass: false,
                first_failure: Some(IndexFailure {
                    m,
                    n: m,
                    condition: "r <= p(x_n, x_n)".into(),
                    lhs: r,
                    rhs: pmm,
                }),
                pairs_checked,
            });
        }
        for n in 0..prefix {
            let v = space.p(&xs[m], &xs[n])?;
            if v < r - tol {
                return Err(Error::PhiDomain { m, n, value: v, r });
            }
            let v = v.max(r);
            pairs_checked += 1;
            let lhs = space.p(&xs[m + 1], &xs[n + 1])?;
            let rhs = v - phi.eval(v)?;
            if lhs > rhs + tol {
                return Ok(PhiContractiveReport {
                    pass: false,
                    first_failure: Some(IndexFailure {
                        m,
                        n,
                        condition: "p(x_{m+1}, x_{n+1}) <= p(x_m, x_n) - phi(p(x_m, x_n))".into(),
                        lhs,
                        rhs,
                    }),
                    pairs_checked,
                });
            }
        }
    }
    Ok(PhiContractiveReport {
        pass: true,
        first_failure: None,
        pairs_checked,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinVariant {
    /// `min{p(fx,fy), p(x,fx), p(y,fy)} <= c p(x,y)`.
    Min,
    /// `min{p(fx,fy) p(x,y), p(x,fx) p(y,fy)} / min{p(x,fx), p(y,fy)} <= c p(x,y)`.
    MinRatio,
}

impl std::str::FromStr for MinVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(MinVariant::Min),
            "min-ratio" | "min_ratio" => Ok(MinVariant::MinRatio),
            other => Err(Error::InvalidArgument(format!(
                "unknown min-condition variant `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for MinVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MinVariant::Min => "min",
            MinVariant::MinRatio => "min-ratio",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitInequalityReport {
    pub pass: bool,
    /// First `n` with `p(x_{n+1}, x_{n+2}) > c p(x_n, x_{n+1})`.
    pub first_failure: Option<IndexFailure>,
    pub checked: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinConditionReport {
    pub variant: MinVariant,
    pub c: f64,
    pub pass: bool,
    /// The sampled pair maximising `lhs - rhs`.
    pub worst: Option<PairFailure>,
    pub evaluated: usize,
    /// Pairs skipped because `p(x, fx) = 0` or `p(y, fy) = 0`.
    pub skipped: usize,
    pub orbit: OrbitInequalityReport,
    pub tolerance: f64,
}

/// Checks a min-type contraction condition on `n` sampled pairs, and the
/// derived inequality `p(x_{n+1}, x_{n+2}) <= c p(x_n, x_{n+1})` along `orbit`.
#[allow(clippy::too_many_arguments)]
pub fn check_min_condition(
    space: &PmSpace,
    f: &SelfMap,
    sampler: &PointSampler,
    c: f64,
    n: usize,
    variant: MinVariant,
    tol: f64,
    orbit: &[Point],
) -> Result<MinConditionReport> {
    check_tol(tol)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "constant must satisfy 0 < c < 1, got {c}"
        )));
    }
    check_sampler(space, sampler)?;
    let mut stream = sampler.stream();
    let mut worst: Option<PairFailure> = None;
    let mut evaluated = 0;
    let mut skipped = 0;
    for _ in 0..n {
        let x = stream.next_point();
        let y = stream.next_point();
        let fx = f.apply(&x)?;
        let fy = f.apply(&y)?;
        let pxy = space.p(&x, &y)?;
        let pfxfy = space.p(&fx, &fy)?;
        let pxfx = space.p(&x, &fx)?;
        let pyfy = space.p(&y, &fy)?;
        let lhs = match variant {
            MinVariant::Min => pfxfy.min(pxfx).min(pyfy),
            MinVariant::MinRatio => {
                if pxfx == 0.0 || pyfy == 0.0 {
                    skipped += 1;
                    continue;
                }
                let den = pxfx.min(pyfy);
                if den == 0.0 {
                    return Err(Error::ZeroDenominator {
                        x: x.to_string(),
                        y: y.to_string(),
                    });
                }
                (pfxfy * pxy).min(pxfx * pyfy) / den
            }
        };
        evaluated += 1;
        let rhs = c * pxy;
        if worst.as_ref().is_none_or(|w| lhs - rhs > w.lhs - w.rhs) {
            worst = Some(PairFailure { x, y, lhs, rhs });
        }
    }
    let pass = worst.as_ref().is_none_or(|w| w.lhs <= w.rhs + tol);

    let mut first_failure = None;
    let mut checked = 0;
    for k in 0..orbit.len().saturating_sub(2) {
        checked += 1;
        let lhs = space.p(&orbit[k + 1], &orbit[k + 2])?;
        let rhs = c * space.p(&orbit[k], &orbit[k + 1])?;
        if lhs > rhs + tol {
            first_failure = Some(IndexFailure {
                m: k + 1,
                n: k + 2,
                condition: "p(x_{n+1}, x_{n+2}) <= c p(x_n, x_{n+1})".into(),
                lhs,
                rhs,
            });
            break;
        }
    }
    Ok(MinConditionReport {
        variant,
        c,
        pass,
        worst,
        evaluated,
        skipped,
        orbit: OrbitInequalityReport {
            pass: first_failure.is_none(),
            first_failure,
            checked,
        },
        tolerance: tol,
    })
}
