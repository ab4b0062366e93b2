use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{parse_real, Point};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PointFn = Arc<dyn Fn(&Point) -> Option<Point> + Send + Sync>;

#[derive(Clone)]
enum MapFn {
    Real(RealFn),
    Point(PointFn),
}

/// A self-map `f: X -> X`.
///
/// Real maps act on the real coordinate of real and positive-real points and
/// fix the adjoined point `a`. A result outside the point's domain (a
/// non-finite value, or a non-positive value for a positive-real point) is an
/// error rather than a silent clamp.
#[derive(Clone)]
pub struct SelfMap {
    name: String,
    params: BTreeMap<String, f64>,
    func: MapFn,
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let items: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            write!(f, ":{}", items.join(","))?;
        }
        Ok(())
    }
}

pub const MAP_NAMES: [&str; 5] = ["linear", "halving", "translate", "exp_sin", "identity"];

impl SelfMap {
    pub fn real(
        name: &str,
        params: &[(&str, f64)],
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_owned(),
            params: params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
            func: MapFn::Real(Arc::new(f)),
        }
    }

    /// A map on arbitrary points; returning `None` signals leaving the domain.
    pub fn custom(name: &str, f: impl Fn(&Point) -> Option<Point> + Send + Sync + 'static) -> Self {
        Self {
            name: name.to_owned(),
            params: BTreeMap::new(),
            func: MapFn::Point(Arc::new(f)),
        }
    }

    /// `x -> a x + b`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::real("linear", &[("a", a), ("b", b)], move |x| a * x + b)
    }

    /// `x -> x / 2`.
    pub fn halving() -> Self {
        Self::real("halving", &[], |x| x / 2.0)
    }

    /// `x -> x + b`.
    pub fn translate(b: f64) -> Self {
        Self::real("translate", &[("b", b)], move |x| x + b)
    }

    /// `x -> e^x sin x / e^{pi/2} + pi/2 - 1`, with fixed point `pi/2`.
    pub fn exp_sin() -> Self {
        let scale = FRAC_PI_2.exp();
        Self::real("exp_sin", &[], move |x| {
            x.exp() * x.sin() / scale + FRAC_PI_2 - 1.0
        })
    }

    pub fn identity() -> Self {
        Self::real("identity", &[], |x| x)
    }

    /// Looks up a built-in map by name.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "linear" => &["a", "b"],
            "translate" => &["b"],
            "halving" | "exp_sin" | "identity" => &[],
            other => return Err(Error::UnknownMap(other.to_owned())),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidArgument(format!(
                "map `{name}` has no parameter `{k}`"
            )));
        }
        let get = |k: &str| {
            params.get(k).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("map `{name}` needs parameter `{k}`"))
            })
        };
        Ok(match name {
            "linear" => Self::linear(get("a")?, get("b")?),
            "translate" => Self::translate(get("b")?),
            "halving" => Self::halving(),
            "exp_sin" => Self::exp_sin(),
            _ => Self::identity(),
        })
    }

    /// Parses `name` or `name:key=value,...`, e.g. `linear:a=1/2,b=1`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let (name, rest) = descriptor.split_once(':').unwrap_or((descriptor, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value, got `{item}`"))
            })?;
            params.insert(k.trim().to_owned(), parse_real(v)?);
        }
        Self::from_name(name.trim(), &params)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn apply(&self, point: &Point) -> Result<Point> {
        let leaves = || Error::LeavesDomain {
            map: self.to_string(),
            point: point.to_string(),
        };
        match &self.func {
            MapFn::Point(f) => f(point).ok_or_else(leaves),
            MapFn::Real(f) => match point {
                Point::Adjoined => Ok(Point::Adjoined),
                Point::Real(x) => {
                    let y = f(*x);
                    if y.is_finite() {
                        Ok(Point::Real(y))
                    } else {
                        Err(leaves())
                    }
                }
                Point::PositiveReal(x) => Point::positive(f(*x)).map_err(|_| leaves()),
                Point::Word(_) => Err(leaves()),
            },
        }
    }
}
