use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::parse_real;

#[derive(Clone)]
enum PhiKind {
    Linear { k: f64 },
    QuadraticSaturating { scale: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A continuous non-decreasing `phi: [r, inf) -> [0, inf)` with `phi(r) = 0`
/// and `phi(t) > 0` for `t > r`.
#[derive(Clone)]
pub struct PhiFunction {
    name: String,
    r: f64,
    kind: PhiKind,
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhiFunction({self})")
    }
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PhiKind::Linear { k } => write!(f, "linear:k={k},r={}", self.r),
            PhiKind::QuadraticSaturating { scale } => {
                write!(f, "quadratic:scale={scale},r={}", self.r)
            }
            PhiKind::Custom(_) => write!(f, "{}:r={}", self.name, self.r),
        }
    }
}

impl PhiFunction {
    /// `t -> k (t - r)` with `0 < k <= 1`.
    pub fn linear(r: f64, k: f64) -> Result<Self> {
        if !r.is_finite() || !(k > 0.0 && k <= 1.0) {
            return Err(Error::InvalidPhi(format!(
                "linear phi needs finite r and 0 < k <= 1, got r={r}, k={k}"
            )));
        }
        Ok(Self {
            name: "linear".into(),
            r,
            kind: PhiKind::Linear { k },
        })
    }

    /// `t -> scale (t-r)^2 / (1 + (t-r)^2)`.
    pub fn quadratic_saturating(r: f64, scale: f64) -> Result<Self> {
        if !r.is_finite() || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidPhi(format!(
                "quadratic phi needs finite r and scale > 0, got {scale}"
            )));
        }
        Ok(Self {
            name: "quadratic".into(),
            r,
            kind: PhiKind::QuadraticSaturating { scale },
        })
    }

    /// A user-supplied function, validated by `phi(r) = 0` exactly and by
    /// positivity and monotonicity on a grid of points above `r`.
    pub fn custom(
        name: &str,
        r: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidPhi(format!("r = {r} is not finite")));
        }
        let at_r = f(r);
        if at_r != 0.0 {
            return Err(Error::InvalidPhi(format!("phi(r) = {at_r}, expected 0")));
        }
        let mut prev = 0.0;
        for e in -20..=20 {
            let t = r + 2f64.powi(e);
            let v = f(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidPhi(format!(
                    "phi({t}) = {v}, expected a positive value"
                )));
            }
            if v < prev {
                return Err(Error::InvalidPhi(format!("phi decreases before t = {t}")));
            }
            prev = v;
        }
        Ok(Self {
            name: name.to_owned(),
            r,
            kind: PhiKind::Custom(Arc::new(f)),
        })
    }

    /// Parses `linear:k=<k>` or `quadratic:scale=<s>` for the given `r`.
    pub fn parse(descriptor: &str, r: f64) -> Result<Self> {
        let (name, rest) = descriptor.split_once(':').unwrap_or((descriptor, ""));
        let mut value = None;
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                Some(("k" | "scale", v)) => value = Some(parse_real(v)?),
                Some(("r", _)) => {}
                _ => return Err(Error::InvalidPhi(format!("unexpected `{item}`"))),
            }
        }
        match name {
            "linear" => Self::linear(r, value.unwrap_or(0.5)),
            "quadratic" => Self::quadratic_saturating(r, value.unwrap_or(1.0)),
            other => Err(Error::InvalidPhi(format!("unknown phi `{other}`"))),
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Evaluates `phi(t)`; `t < r` is outside the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < self.r {
            return Err(Error::InvalidPhi(format!("{t} lies below r = {}", self.r)));
        }
        let d = t - self.r;
        Ok(match &self.kind {
            PhiKind::Linear { k } => k * d,
            PhiKind::QuadraticSaturating { scale } => scale * d * d / (1.0 + d * d),
            PhiKind::Custom(f) => f(t),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vanishes_at_r() {
        for phi in [
            PhiFunction::linear(-1.0, 0.5).unwrap(),
            PhiFunction::quadratic_saturating(-1.0, 2.0).unwrap(),
            PhiFunction::custom("cube", -1.0, |t| (t + 1.0).powi(3)).unwrap(),
        ] {
            assert_eq!(phi.eval(-1.0).unwrap(), 0.0);
            assert!(phi.eval(-0.5).unwrap() > 0.0);
            assert!(phi.eval(-1.5).is_err());
        }
    }

    #[test]
    fn invalid_phis_rejected() {
        assert!(PhiFunction::custom("shifted", 0.0, |t| t + 1.0).is_err());
        assert!(PhiFunction::custom("decreasing", 0.0, |t| t / (1.0 + t * t * t * t)).is_err());
        assert!(PhiFunction::custom("flat", 0.0, |_| 0.0).is_err());
        assert!(PhiFunction::linear(0.0, 0.0).is_err());
        assert!(PhiFunction::linear(0.0, 1.5).is_err());
        assert!(PhiFunction::quadratic_saturating(0.0, -1.0).is_err());
        assert!(PhiFunction::parse("sqrt", 0.0).is_err());
    }

    #[test]
    fn parse() {
        let phi = PhiFunction::parse("linear:k=1/2", 0.0).unwrap();
        assert_eq!(phi.eval(4.0).unwrap(), 2.0);
        assert_eq!(
            PhiFunction::parse("quadratic", 1.0)
                .unwrap()
                .eval(2.0)
                .unwrap(),
            0.5
        );
    }

    proptest! {
        #[test]
        fn builtins_are_monotone(r in -5.0f64..5.0, a in 0.0f64..50.0, b in 0.0f64..50.0, k in 0.01f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for phi in [PhiFunction::linear(r, k).unwrap(), PhiFunction::quadratic_saturating(r, k).unwrap()] {
                prop_assert!(phi.eval(r + lo).unwrap() <= phi.eval(r + hi).unwrap());
            }
        }
    }
}
