//! The partial metric space abstraction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{PmValue, Point, PointKind};
use crate::sampler::{PointSampler, SamplerKind};

/// Default strict-inequality margin for real-valued spaces.
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-12;

/// A distance function on one point domain.
///
/// Implementations must be deterministic and total on points admitted by
/// [`PartialMetric::point_kind`]; [`PmSpace`] checks admission before calling
/// [`PartialMetric::eval`].
pub trait PartialMetric: Send + Sync + fmt::Debug {
    fn point_kind(&self) -> PointKind;

    fn eval(&self, x: &Point, y: &Point) -> Result<f64>;
}

/// The class a space claims to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceClass {
    Metric,
    StrongPmetric,
    Pmetric,
}

impl SpaceClass {
    /// Metric spaces are strong partial metric spaces.
    pub fn is_strong(self) -> bool {
        matches!(self, SpaceClass::Metric | SpaceClass::StrongPmetric)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SpaceClass::Metric => "metric",
            SpaceClass::StrongPmetric => "strong_pmetric",
            SpaceClass::Pmetric => "pmetric",
        }
    }
}

impl fmt::Display for SpaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point domain with a distance function, a declared class and an optional
/// declared lower bound. Immutable once built and cheap to clone.
#[derive(Clone)]
pub struct PmSpace {
    name: String,
    metric: Arc<dyn PartialMetric>,
    class: SpaceClass,
    lower_bound: Option<PmValue>,
    exact: bool,
    sampler: Option<SamplerKind>,
}

impl fmt::Debug for PmSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PmSpace")
            .field("name", &self.name)
            .field("point_kind", &self.point_kind())
            .field("class", &self.class)
            .field("lower_bound", &self.lower_bound)
            .field("exact", &self.exact)
            .finish()
    }
}

impl PmSpace {
    pub fn new(
        name: impl Into<String>,
        metric: impl PartialMetric + 'static,
        class: SpaceClass,
    ) -> Self {
        Self {
            name: name.into(),
            metric: Arc::new(metric),
            class,
            lower_bound: None,
            exact: false,
            sampler: None,
        }
    }

    pub fn with_lower_bound(mut self, r0: f64) -> Result<Self> {
        self.lower_bound = Some(PmValue::new(r0)?);
        Ok(self)
    }

    /// Marks the distance as exactly representable (integer valued), which
    /// makes the default axiom tolerance zero.
    pub fn exact(mut self) -> Self {
        self.exact = true;
        self
    }

    pub fn with_default_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = Some(sampler);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn point_kind(&self) -> PointKind {
        self.metric.point_kind()
    }

    pub fn declared_class(&self) -> SpaceClass {
        self.class
    }

    pub fn lower_bound(&self) -> Option<PmValue> {
        self.lower_bound
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn default_tolerance(&self) -> f64 {
        if self.exact {
            0.0
        } else {
            DEFAULT_FLOAT_TOLERANCE
        }
    }

    /// The space's default sampler with the given seed, if it declares one.
    pub fn default_sampler(&self, seed: u64) -> Option<PointSampler> {
        self.sampler
            .clone()
            .map(|kind| PointSampler::new(kind, seed))
    }

    pub fn check_point(&self, point: &Point) -> Result<()> {
        let expected = self.point_kind();
        if expected.admits(point) {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected,
                found: point.kind(),
            })
        }
    }

    /// Evaluates `p(x, y)`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<PmValue> {
        self.check_point(x)?;
        self.check_point(y)?;
        let value = self.metric.eval(x, y)?;
        if !value.is_finite() {
            return Err(Error::NonFinite {
                value,
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        PmValue::new(value)
    }

    /// `p(x, y)` as a plain float.
    pub fn p(&self, x: &Point, y: &Point) -> Result<f64> {
        self.distance(x, y).map(PmValue::get)
    }

    pub fn self_distance(&self, x: &Point) -> Result<f64> {
        self.p(x, x)
    }
}
