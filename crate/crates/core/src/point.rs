//! Points, point domains and distance values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real distance value. Negative values are allowed.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PmValue(f64);

impl PmValue {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidArgument(format!(
                "distance value {value} is not finite"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PmValue {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PmValue> for f64 {
    fn from(v: PmValue) -> f64 {
        v.0
    }
}

impl fmt::Display for PmValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word over an uppercase alphabet. Never contains the gap symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    /// Builds a word from uppercase ASCII letters.
    pub fn new(symbols: impl Into<Vec<u8>>) -> Result<Self> {
        let symbols = symbols.into();
        for (position, &b) in symbols.iter().enumerate() {
            if !b.is_ascii_uppercase() {
                return Err(Error::InvalidSymbol {
                    symbol: b as char,
                    position,
                    context: String::new(),
                });
            }
        }
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII uppercase bytes are admitted.
        std::str::from_utf8(&self.0).expect("word bytes are ASCII")
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(s.into_bytes())
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.as_str().to_owned()
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.as_bytes().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("\"\"")
        } else {
            f.write_str(self.as_str())
        }
    }
}

/// The point domains used by the built-in spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Real,
    /// The real line with one extra point `a` adjoined.
    RealAdjoinedPoint,
    PositiveReal,
    WordOverAlphabet,
}

impl PointKind {
    pub fn of(point: &Point) -> Self {
        match point {
            Point::Real(_) => PointKind::Real,
            Point::Adjoined => PointKind::RealAdjoinedPoint,
            Point::PositiveReal(_) => PointKind::PositiveReal,
            Point::Word(_) => PointKind::WordOverAlphabet,
        }
    }

    /// Whether every point of kind `other` is a point of this kind.
    pub fn includes(self, other: PointKind) -> bool {
        self == other || (self == PointKind::RealAdjoinedPoint && other == PointKind::Real)
    }

    pub fn admits(self, point: &Point) -> bool {
        self.includes(PointKind::of(point))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Real => "real",
            PointKind::RealAdjoinedPoint => "real-adjoined-point",
            PointKind::PositiveReal => "positive-real",
            PointKind::WordOverAlphabet => "word-over-alphabet",
        }
    }

    /// Parses a point written in the textual form used by the CLI and reports:
    /// `a` for the adjoined point, a decimal or `p/q` rational for reals, and
    /// the bare symbols (or `""`) for words.
    pub fn parse_point(self, s: &str) -> Result<Point> {
        let s = s.trim();
        match self {
            PointKind::Real => Ok(Point::Real(parse_real(s)?)),
            PointKind::RealAdjoinedPoint => {
                if s == "a" {
                    Ok(Point::Adjoined)
                } else {
                    Ok(Point::Real(parse_real(s)?))
                }
            }
            PointKind::PositiveReal => Point::positive(parse_real(s)?),
            PointKind::WordOverAlphabet => {
                let body = if s == "\"\"" { "" } else { s };
                Ok(Point::Word(Word::new(
                    body.to_ascii_uppercase().into_bytes(),
                )?))
            }
        }
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parses a finite real written as a decimal or as a simple rational `p/q`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad =
        || Error::InvalidArgument(format!("`{s}` is not a finite decimal or rational number"));
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// A point of one of the built-in domains.
///
/// Equality is domain equality: reals compare by bit pattern, the adjoined
/// point equals only itself, and words compare symbol by symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Point {
    Real(f64),
    Adjoined,
    PositiveReal(f64),
    Word(Word),
}

impl Point {
    pub fn positive(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Point::PositiveReal(value))
        } else {
            Err(Error::InvalidPoint(format!(
                "{value} is not a positive real"
            )))
        }
    }

    pub fn word(s: &str) -> Result<Self> {
        Ok(Point::Word(s.parse()?))
    }

    /// The real coordinate of a real or positive-real point.
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            Point::Real(x) | Point::PositiveReal(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Point::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn kind(&self) -> PointKind {
        PointKind::of(self)
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Real(x), Point::Real(y)) | (Point::PositiveReal(x), Point::PositiveReal(y)) => {
                x.to_bits() == y.to_bits()
            }
            (Point::Adjoined, Point::Adjoined) => true,
            (Point::Word(x), Point::Word(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Point {}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) | Point::PositiveReal(x) => write!(f, "{x}"),
            Point::Adjoined => f.write_str("a"),
            Point::Word(w) => write!(f, "{w}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_compare_by_bits() {
        assert_eq!(Point::Real(0.5), Point::Real(0.5));
        assert_ne!(Point::Real(0.0), Point::Real(-0.0));
        assert_ne!(Point::Real(1.0), Point::PositiveReal(1.0));
        assert_ne!(Point::Adjoined, Point::Real(0.0));
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_real("-1/2").unwrap(), -0.5);
        assert_eq!(parse_real("3").unwrap(), 3.0);
        assert_eq!(parse_real(" 0.25 ").unwrap(), 0.25);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("inf").is_err());
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn point_text_round_trips() {
        let kind = PointKind::RealAdjoinedPoint;
        for p in [Point::Adjoined, Point::Real(-0.1), Point::Real(1e-300)] {
            assert_eq!(kind.parse_point(&p.to_string()).unwrap(), p);
        }
        let w = PointKind::WordOverAlphabet.parse_point("\"\"").unwrap();
        assert_eq!(w, Point::Word(Word::default()));
        assert_eq!(
            PointKind::WordOverAlphabet.parse_point("acg").unwrap(),
            Point::word("ACG").unwrap()
        );
    }

    #[test]
    fn positive_points_reject_nonpositive() {
        assert!(Point::positive(0.0).is_err());
        assert!(Point::positive(-1.0).is_err());
        assert!(PointKind::PositiveReal.parse_point("0").is_err());
    }

    #[test]
    fn words_reject_gaps_and_lowercase() {
        assert!(Word::new(b"AC-G".to_vec()).is_err());
        assert!(Word::new(b"acg".to_vec()).is_err());
        assert_eq!(Word::new(b"ACG".to_vec()).unwrap().len(), 3);
    }

    #[test]
    fn pm_value_is_finite() {
        assert!(PmValue::new(f64::NAN).is_err());
        assert!(PmValue::new(f64::INFINITY).is_err());
        assert_eq!(PmValue::new(-1.5).unwrap().get(), -1.5);
    }
}
