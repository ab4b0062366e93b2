//! Built-in spaces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alignment::{optimal_score_capped, AlignmentParams, Alphabet, DEFAULT_MAX_WORD_LEN};
use crate::error::{Error, Result};
use crate::point::{parse_real, Point, PointKind};
use crate::sampler::{SamplerKind, REAL_ATOMS};
use crate::space::{PartialMetric, PmSpace, SpaceClass};

fn real(space: &'static str, p: &Point) -> Result<f64> {
    p.as_real()
        .ok_or_else(|| Error::InvalidPoint(format!("{p} is not a point of {space}")))
}

/// `p(x, y) = |x - y|` on the reals.
#[derive(Debug, Clone, Copy)]
pub struct AbsoluteDifference;

impl PartialMetric for AbsoluteDifference {
    fn point_kind(&self) -> PointKind {
        PointKind::Real
    }

    fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok((real("the metric line", x)? - real("the metric line", y)?).abs())
    }
}

/// The reals with one point `a` adjoined: `p(a,a) = 0`, `p(a,x) = |x|`,
/// `p(x,y) = |x - y| - 1`.
#[derive(Debug, Clone, Copy)]
pub struct PuncturedLine;

impl PartialMetric for PuncturedLine {
    fn point_kind(&self) -> PointKind {
        PointKind::RealAdjoinedPoint
    }

    fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(match (x, y) {
            (Point::Adjoined, Point::Adjoined) => 0.0,
            (Point::Adjoined, Point::Real(v)) | (Point::Real(v), Point::Adjoined) => v.abs(),
            (Point::Real(u), Point::Real(v)) => (u - v).abs() - 1.0,
            _ => {
                return Err(Error::InvalidPoint(format!(
                    "({x}, {y}) are not points of the punctured line"
                )))
            }
        })
    }
}

/// Positive reals with `s(x,x) = x` and `s(x,y) = x + y` for `x != y`.
#[derive(Debug, Clone, Copy)]
pub struct SumDistance;

impl PartialMetric for SumDistance {
    fn point_kind(&self) -> PointKind {
        PointKind::PositiveReal
    }

    fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let (u, v) = (real("the sum space", x)?, real("the sum space", y)?);
        Ok(if x == y { u } else { u + v })
    }
}

/// `p(x, y) = -s(x, y)` for the optimal global-alignment score `s`.
#[derive(Debug, Clone)]
pub struct AlignmentDistance {
    pub params: AlignmentParams,
    pub alphabet: Alphabet,
    pub max_len: usize,
}

impl PartialMetric for AlignmentDistance {
    fn point_kind(&self) -> PointKind {
        PointKind::WordOverAlphabet
    }

    fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let word = |p: &Point| {
            let w = p
                .as_word()
                .ok_or_else(|| Error::InvalidPoint(format!("{p} is not a word")))?;
            self.alphabet.check_word(w)?;
            Ok::<_, Error>(w.clone())
        };
        let r = optimal_score_capped(&word(x)?, &word(y)?, &self.params, self.max_len)?;
        Ok(-r.score)
    }
}

/// The real line with `p(x,y) = |x - y|`.
pub fn make_metric_line() -> PmSpace {
    PmSpace::new("metric-line", AbsoluteDifference, SpaceClass::Metric)
        .with_lower_bound(0.0)
        .expect("finite bound")
        .with_default_sampler(real_sampler(0.0))
}

/// The reals with an adjoined point; a partial metric that is not strong.
pub fn make_punctured_line() -> PmSpace {
    PmSpace::new("punctured-line", PuncturedLine, SpaceClass::Pmetric)
        .with_lower_bound(-1.0)
        .expect("finite bound")
        .with_default_sampler(real_sampler(0.1))
}

/// The positive reals under `s(x,y) = x + y`; strong but not a metric.
pub fn make_sum_space() -> PmSpace {
    PmSpace::new("sum-space", SumDistance, SpaceClass::StrongPmetric)
        .with_lower_bound(0.0)
        .expect("finite bound")
        .with_default_sampler(SamplerKind::PositiveReals {
            hi: 10.0,
            atoms: vec![1.0, 0.5, 0.25, 2.0],
            atom_prob: 0.2,
        })
}

pub fn make_alignment_space(params: AlignmentParams, alphabet: Alphabet) -> Result<PmSpace> {
    make_alignment_space_capped(params, alphabet, DEFAULT_MAX_WORD_LEN)
}

/// Words over `alphabet` under the negated optimal alignment score. Words
/// longer than `max_len` are rejected when measured.
pub fn make_alignment_space_capped(
    params: AlignmentParams,
    alphabet: Alphabet,
    max_len: usize,
) -> Result<PmSpace> {
    // Re-validate: the fields of AlignmentParams are public.
    let params = AlignmentParams::new(params.alpha, params.beta, params.gamma)?;
    let mut space = PmSpace::new(
        "alignment",
        AlignmentDistance {
            params,
            alphabet: alphabet.clone(),
            max_len,
        },
        SpaceClass::StrongPmetric,
    )
    .with_default_sampler(SamplerKind::Words {
        alphabet,
        max_len: 6.min(max_len),
    });
    if params.as_integers().is_some() {
        space = space.exact();
    }
    Ok(space)
}

fn real_sampler(adjoined_prob: f64) -> SamplerKind {
    SamplerKind::Reals {
        lo: -10.0,
        hi: 10.0,
        atoms: REAL_ATOMS.to_vec(),
        atom_prob: 0.25,
        adjoined_prob,
    }
}

/// A named space with parameters, as written on the command line:
/// `name` or `name:key=value,key=value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub alphabet: Option<String>,
    pub expected_class: SpaceClass,
    pub expected_lower_bound: Option<f64>,
}

pub const SPACE_NAMES: [&str; 4] = ["metric-line", "punctured-line", "sum-space", "alignment"];

impl SpaceDescriptor {
    pub fn new(name: &str) -> Result<Self> {
        let (expected_class, expected_lower_bound) = match name {
            "metric-line" => (SpaceClass::Metric, Some(0.0)),
            "punctured-line" => (SpaceClass::Pmetric, Some(-1.0)),
            "sum-space" => (SpaceClass::StrongPmetric, Some(0.0)),
            "alignment" => (SpaceClass::StrongPmetric, None),
            other => return Err(Error::UnknownSpace(other.to_owned())),
        };
        Ok(Self {
            name: name.to_owned(),
            parameters: BTreeMap::new(),
            alphabet: None,
            expected_class,
            expected_lower_bound,
        })
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_owned(), value);
        self
    }

    pub fn parse(descriptor: &str) -> Result<Self> {
        let (name, rest) = descriptor.split_once(':').unwrap_or((descriptor, ""));
        let mut d = Self::new(name.trim())?;
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("expected key=value, got `{item}`"))
            })?;
            let k = k.trim();
            if k == "alphabet" {
                d.alphabet = Some(v.trim().to_owned());
            } else {
                d.parameters.insert(k.to_owned(), parse_real(v)?);
            }
        }
        Ok(d)
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.parameters.get(key).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("space `{}` needs parameter `{key}`", self.name))
        })
    }

    pub fn build(&self) -> Result<PmSpace> {
        let allowed: &[&str] = match self.name.as_str() {
            "alignment" => &["alpha", "beta", "gamma", "max_len"],
            _ => &[],
        };
        if let Some(k) = self
            .parameters
            .keys()
            .find(|k| !allowed.contains(&k.as_str()))
        {
            return Err(Error::InvalidArgument(format!(
                "space `{}` has no parameter `{k}`",
                self.name
            )));
        }
        if self.alphabet.is_some() && self.name != "alignment" {
            return Err(Error::InvalidArgument(format!(
                "space `{}` takes no alphabet",
                self.name
            )));
        }
        match self.name.as_str() {
            "metric-line" => Ok(make_metric_line()),
            "punctured-line" => Ok(make_punctured_line()),
            "sum-space" => Ok(make_sum_space()),
            "alignment" => {
                let params = AlignmentParams::new(
                    self.param("alpha")?,
                    self.param("beta")?,
                    self.param("gamma")?,
                )?;
                let alphabet = match &self.alphabet {
                    Some(a) => Alphabet::new(a)?,
                    None => Alphabet::dna(),
                };
                let cap = match self.parameters.get("max_len") {
                    Some(&v) if v >= 0.0 && v.fract() == 0.0 => v as usize,
                    Some(&v) => {
                        return Err(Error::InvalidArgument(format!(
                            "max_len {v} is not a count"
                        )))
                    }
                    None => DEFAULT_MAX_WORD_LEN,
                };
                make_alignment_space_capped(params, alphabet, cap)
            }
            other => Err(Error::UnknownSpace(other.to_owned())),
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        let mut items: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if let Some(a) = &self.alphabet {
            items.push(format!("alphabet={a}"));
        }
        if !items.is_empty() {
            write!(f, ":{}", items.join(","))?;
        }
        Ok(())
    }
}
