use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::SelfMap;
use crate::point::Point;
use crate::space::PmSpace;

/// Stopping parameters for orbit iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    /// Maximum number of applications of the map.
    pub max_steps: usize,
    /// Number of trailing iterates examined by the Cauchy test.
    pub window: usize,
    /// All pairwise values in the window must lie within `2 * tol` of each other.
    pub tol: f64,
    /// Any `|p|` above this bound marks the orbit as diverged.
    pub blowup: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            window: 32,
            tol: 1e-9,
            blowup: 1e12,
        }
    }
}

impl OrbitOptions {
    fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidArgument(format!(
                "window must be at least 2, got {}",
                self.window
            )));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be finite and >= 0, got {}",
                self.tol
            )));
        }
        if self.blowup.is_nan() || self.blowup <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "blow-up bound must be positive, got {}",
                self.blowup
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauchyVerdict {
    CauchyWithinTolerance,
    NotConverged,
    Diverged,
}

impl CauchyVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CauchyVerdict::CauchyWithinTolerance => "cauchy_within_tolerance",
            CauchyVerdict::NotConverged => "not_converged",
            CauchyVerdict::Diverged => "diverged",
        }
    }
}

impl fmt::Display for CauchyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Range of pairwise values over the trailing window, starting at iterate `start`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailStats {
    pub start: usize,
    pub max: f64,
    pub min: f64,
}

impl TailStats {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

/// The iterates `x_0, x_1, ...` together with the Cauchy verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub points: Vec<Point>,
    pub self_distances: Vec<f64>,
    pub tail: TailStats,
    pub verdict: CauchyVerdict,
    /// Midpoint of the tail range; the estimate of `lim p(x_m, x_n)`.
    pub r_estimate: f64,
    pub tol: f64,
    pub window: usize,
}

impl OrbitTrace {
    /// Number of map applications performed.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last(&self) -> &Point {
        self.points
            .last()
            .expect("an orbit holds at least its start")
    }

    pub fn tail_points(&self) -> &[Point] {
        &self.points[self.tail.start..]
    }

    pub fn is_cauchy(&self) -> bool {
        self.verdict == CauchyVerdict::CauchyWithinTolerance
    }

    /// The accuracy to which the window certifies the limit: a spread of `2 * tol`.
    pub fn limit_tolerance(&self) -> f64 {
        2.0 * self.tol
    }
}

/// Minimum and maximum of `p(x_i, x_j)` over `i, j` in `points`.
fn window_range(space: &PmSpace, points: &[Point]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, x) in points.iter().enumerate() {
        for y in &points[i..] {
            let v = space.p(x, y)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok((lo, hi))
}

/// Iterates `f` from `x0` until the trailing window is Cauchy within
/// tolerance, a value exceeds the blow-up bound, or `max_steps` is reached.
///
/// Each step evaluates `p(x_n, x_n)`, `p(x_n, x_{n-w+1})` and `p(x_n, x_0)`;
/// the full window is scanned only when the first two already agree within
/// `2 * tol`, which the window rule requires.
pub fn iterate_orbit(
    space: &PmSpace,
    f: &SelfMap,
    x0: &Point,
    options: &OrbitOptions,
) -> Result<OrbitTrace> {
    options.validate()?;
    space.check_point(x0)?;
    let w = options.window;
    let spread = 2.0 * options.tol;
    let mut points = vec![x0.clone()];
    let mut self_distances = Vec::new();
    let verdict = loop {
        let n = points.len() - 1;
        let xn = &points[n];
        let pnn = space.self_distance(xn)?;
        self_distances.push(pnn);
        let oldest = space.p(xn, &points[n.saturating_sub(w - 1)])?;
        let from_start = space.p(xn, x0)?;
        if [pnn, oldest, from_start]
            .iter()
            .any(|v| v.abs() > options.blowup)
        {
            break CauchyVerdict::Diverged;
        }
        if n + 1 >= w && (oldest - pnn).abs() <= spread {
            let (lo, hi) = window_range(space, &points[n + 1 - w..])?;
            if hi - lo <= spread {
                break CauchyVerdict::CauchyWithinTolerance;
            }
        }
        if n >= options.max_steps {
            break CauchyVerdict::NotConverged;
        }
        let next = f.apply(xn)?;
        space.check_point(&next)?;
        points.push(next);
    };
    let n = points.len() - 1;
    let start = (n + 1).saturating_sub(w);
    let (min, max) = window_range(space, &points[start..])?;
    Ok(OrbitTrace {
        points,
        self_distances,
        tail: TailStats { start, max, min },
        verdict,
        r_estimate: 0.5 * (max + min),
        tol: options.tol,
        window: w,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    /// `x_n -> a` and `p(a, a) = lim p(x_m, x_n)`.
    SpecialLimit,
    /// `x_n -> a` only.
    LimitOnly,
    Neither,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitVerdict::SpecialLimit => "special_limit",
            LimitVerdict::LimitOnly => "limit_only",
            LimitVerdict::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialLimitReport {
    pub verdict: LimitVerdict,
    pub self_distance: f64,
    /// `max |p(a, x_n) - p(a, a)|` over the tail.
    pub max_deviation: f64,
    pub r_estimate: f64,
    pub tol: f64,
}

/// Decides whether `a` is a limit, and a special limit, of the traced orbit.
pub fn check_special_limit(
    space: &PmSpace,
    trace: &OrbitTrace,
    a: &Point,
    tol: f64,
) -> Result<SpecialLimitReport> {
    let paa = space.self_distance(a)?;
    let mut max_deviation: f64 = 0.0;
    for x in trace.tail_points() {
        max_deviation = max_deviation.max((space.p(a, x)? - paa).abs());
    }
    let limit = max_deviation <= tol;
    let verdict = if limit && trace.is_cauchy() && (paa - trace.r_estimate).abs() <= tol {
        LimitVerdict::SpecialLimit
    } else if limit {
        LimitVerdict::LimitOnly
    } else {
        LimitVerdict::Neither
    };
    Ok(SpecialLimitReport {
        verdict,
        self_distance: paa,
        max_deviation,
        r_estimate: trace.r_estimate,
        tol,
    })
}
