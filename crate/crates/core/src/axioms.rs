//! Sampled decision procedures for the partial metric axioms.
//!
//! Each axiom is decided on one tuple of points by [`evaluate`]; [`check_axiom`]
//! runs it over `n` sampled tuples and stops at the first violation.
//!
//! Non-strict inequalities count as violated only when they fail by more than
//! the tolerance. The strict inequality of `sssd` is tested as
//! `p(x,x) < p(x,y) - tol`, and `sep` treats values within `tol` as equal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::sampler::PointSampler;
use crate::space::{PmSpace, SpaceClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    /// `p(x,x) = p(x,y) = p(y,y)` iff `x = y`.
    Sep,
    /// `p(x,x) <= p(x,y)`.
    Ssd,
    /// `p(x,y) = p(y,x)`.
    Sym,
    /// `p(x,y) <= p(x,z) + p(z,y) - p(z,z)`.
    Ptri,
    /// `p(x,x) < p(x,y)` for `x != y`.
    Sssd,
    /// `p(x,y) >= r0` for the declared lower bound `r0`.
    Lbd,
    /// `p(x,x) = 0`; the extra condition separating metrics.
    Zsd,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Sep,
        Axiom::Ssd,
        Axiom::Sym,
        Axiom::Ptri,
        Axiom::Sssd,
        Axiom::Lbd,
        Axiom::Zsd,
    ];

    /// Number of points in one sampled tuple.
    pub fn arity(self) -> usize {
        match self {
            Axiom::Ptri => 3,
            Axiom::Zsd => 1,
            _ => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::Sep => "sep",
            Axiom::Ssd => "ssd",
            Axiom::Sym => "sym",
            Axiom::Ptri => "ptri",
            Axiom::Sssd => "sssd",
            Axiom::Lbd => "lbd",
            Axiom::Zsd => "zsd",
        }
    }

    /// The axioms a space of the given class must satisfy, excluding `lbd`.
    pub fn for_class(class: SpaceClass) -> &'static [Axiom] {
        match class {
            SpaceClass::Pmetric => &[Axiom::Sep, Axiom::Ssd, Axiom::Sym, Axiom::Ptri],
            SpaceClass::StrongPmetric => {
                &[Axiom::Sep, Axiom::Ssd, Axiom::Sym, Axiom::Ptri, Axiom::Sssd]
            }
            SpaceClass::Metric => &[
                Axiom::Sep,
                Axiom::Ssd,
                Axiom::Sym,
                Axiom::Ptri,
                Axiom::Sssd,
                Axiom::Zsd,
            ],
        }
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::UnknownAxiom(s.to_owned()))
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassOnSample,
    Fail,
}

/// A tuple violating an axiom, with the distance values involved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Point>,
    pub values: Vec<(String, f64)>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(ToString::to_string).collect();
        write!(f, "({})", pts.join(", "))?;
        for (label, v) in &self.values {
            write!(f, " {label}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub samples_used: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::PassOnSample
    }

    /// Re-evaluates the recorded witness. Returns `true` when the violation
    /// reproduces (and `true` trivially for passing reports).
    pub fn replay(&self, space: &PmSpace) -> Result<bool> {
        match (&self.verdict, &self.witness) {
            (Verdict::PassOnSample, _) => Ok(true),
            (Verdict::Fail, Some(w)) => {
                Ok(evaluate(space, self.axiom, &w.points, self.tolerance)?.is_some())
            }
            (Verdict::Fail, None) => Ok(false),
        }
    }
}

fn witness(points: &[Point], values: &[(&str, f64)]) -> Option<Witness> {
    Some(Witness {
        points: points.to_vec(),
        values: values.iter().map(|(l, v)| ((*l).to_owned(), *v)).collect(),
    })
}

/// Decides one axiom on one tuple. Returns the witness if the tuple violates it.
pub fn evaluate(
    space: &PmSpace,
    axiom: Axiom,
    points: &[Point],
    tol: f64,
) -> Result<Option<Witness>> {
    if points.len() != axiom.arity() {
        return Err(Error::InvalidArgument(format!(
            "{axiom} takes {} points, got {}",
            axiom.arity(),
            points.len()
        )));
    }
    let x = &points[0];
    let out = match axiom {
        Axiom::Sep => {
            let y = &points[1];
            let (pxx, pxy, pyy) = (space.p(x, x)?, space.p(x, y)?, space.p(y, y)?);
            let all_equal = (pxx - pxy).abs() <= tol && (pyy - pxy).abs() <= tol;
            let violated = if x == y { !all_equal } else { all_equal };
            if violated {
                witness(points, &[("p(x,x)", pxx), ("p(x,y)", pxy), ("p(y,y)", pyy)])
            } else {
                None
            }
        }
        Axiom::Ssd => {
            let y = &points[1];
            let (pxx, pxy) = (space.p(x, x)?, space.p(x, y)?);
            if pxx > pxy + tol {
                witness(points, &[("p(x,x)", pxx), ("p(x,y)", pxy)])
            } else {
                None
            }
        }
        Axiom::Sym => {
            let y = &points[1];
            let (pxy, pyx) = (space.p(x, y)?, space.p(y, x)?);
            if (pxy - pyx).abs() > tol {
                witness(points, &[("p(x,y)", pxy), ("p(y,x)", pyx)])
            } else {
                None
            }
        }
        Axiom::Ptri => {
            let (y, z) = (&points[1], &points[2]);
            let pxy = space.p(x, y)?;
            let (pxz, pzy, pzz) = (space.p(x, z)?, space.p(z, y)?, space.p(z, z)?);
            if pxy > pxz + pzy - pzz + tol {
                witness(
                    points,
                    &[
                        ("p(x,y)", pxy),
                        ("p(x,z)", pxz),
                        ("p(z,y)", pzy),
                        ("p(z,z)", pzz),
                    ],
                )
            } else {
                None
            }
        }
        Axiom::Sssd => {
            let y = &points[1];
            if x == y {
                None
            } else {
                let (pxx, pxy) = (space.p(x, x)?, space.p(x, y)?);
                if pxx < pxy - tol {
                    None
                } else {
                    witness(points, &[("p(x,x)", pxx), ("p(x,y)", pxy)])
                }
            }
        }
        Axiom::Lbd => {
            let y = &points[1];
            let r0 = space
                .lower_bound()
                .ok_or_else(|| Error::MissingLowerBound(space.name().to_owned()))?
                .get();
            let pxy = space.p(x, y)?;
            if pxy < r0 - tol {
                witness(points, &[("p(x,y)", pxy), ("r0", r0)])
            } else {
                None
            }
        }
        Axiom::Zsd => {
            let pxx = space.p(x, x)?;
            if pxx.abs() > tol {
                witness(points, &[("p(x,x)", pxx)])
            } else {
                None
            }
        }
    };
    Ok(out)
}

/// Checks `axiom` on `n` sampled tuples, returning the first violation found.
pub fn check_axiom(
    space: &PmSpace,
    axiom: Axiom,
    sampler: &PointSampler,
    n: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be finite and >= 0"
        )));
    }
    let sampler_kind = sampler.point_kind()?;
    if !space.point_kind().includes(sampler_kind) {
        return Err(Error::SamplerMismatch {
            space: space.point_kind(),
            sampler: sampler_kind,
        });
    }
    if axiom == Axiom::Lbd && space.lower_bound().is_none() {
        return Err(Error::MissingLowerBound(space.name().to_owned()));
    }

    let mut stream = sampler.stream();
    let mut tuple = Vec::with_capacity(axiom.arity());
    for i in 0..n {
        tuple.clear();
        tuple.extend((0..axiom.arity()).map(|_| stream.next_point()));
        if let Some(w) = evaluate(space, axiom, &tuple, tol)? {
            return Ok(AxiomReport {
                axiom,
                verdict: Verdict::Fail,
                witness: Some(w),
                samples_used: i + 1,
                tolerance: tol,
                seed: sampler.seed,
            });
        }
    }
    Ok(AxiomReport {
        axiom,
        verdict: Verdict::PassOnSample,
        witness: None,
        samples_used: n,
        tolerance: tol,
        seed: sampler.seed,
    })
}

/// Checks every axiom of the space's declared class, plus `lbd` when a lower
/// bound is declared.
pub fn check_declared_class(
    space: &PmSpace,
    sampler: &PointSampler,
    n: usize,
    tol: f64,
) -> Result<Vec<AxiomReport>> {
    let mut axioms = Axiom::for_class(space.declared_class()).to_vec();
    if space.lower_bound().is_some() {
        axioms.push(Axiom::Lbd);
    }
    axioms
        .into_iter()
        .map(|a| check_axiom(space, a, sampler, n, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SamplerKind;
    use crate::spaces::{make_metric_line, make_punctured_line, make_sum_space};

    #[test]
    fn punctured_line_fails_sssd_at_a_and_zero() {
        let space = make_punctured_line();
        let sampler = PointSampler::pool(vec![Point::Adjoined, Point::Real(0.0)], 9);
        let report = check_axiom(&space, Axiom::Sssd, &sampler, 100, 0.0).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let w = report.witness.as_ref().unwrap();
        assert_eq!(w.points, vec![Point::Adjoined, Point::Real(0.0)]);
        assert_eq!(
            w.values,
            vec![("p(x,x)".to_owned(), 0.0), ("p(x,y)".to_owned(), 0.0)]
        );
        assert!(report.replay(&space).unwrap());
        assert_eq!(report.seed, 9);
    }

    #[test]
    fn metric_line_ptri_passes() {
        let space = make_metric_line();
        let sampler = space.default_sampler(1).unwrap();
        let r = check_axiom(&space, Axiom::Ptri, &sampler, 1000, 0.0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.samples_used, 1000);
    }

    #[test]
    fn sum_space_sssd_passes_on_uniform_sampler() {
        let space = make_sum_space();
        let sampler = PointSampler::new(
            SamplerKind::PositiveReals {
                hi: 10.0,
                atoms: vec![],
                atom_prob: 0.0,
            },
            5,
        );
        let r = check_axiom(&space, Axiom::Sssd, &sampler, 1000, 0.0).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn unknown_axiom_is_an_error() {
        assert!(matches!(
            "tri".parse::<Axiom>(),
            Err(Error::UnknownAxiom(_))
        ));
        assert_eq!("ptri".parse::<Axiom>().unwrap(), Axiom::Ptri);
    }

    #[test]
    fn sampler_kind_mismatch_is_an_error() {
        let space = make_metric_line();
        let sampler = PointSampler::pool(vec![Point::Adjoined], 0);
        assert!(matches!(
            check_axiom(&space, Axiom::Sym, &sampler, 10, 0.0),
            Err(Error::SamplerMismatch { .. })
        ));
        let words = PointSampler::pool(vec![Point::word("A").unwrap()], 0);
        assert!(check_axiom(&space, Axiom::Sym, &words, 10, 0.0).is_err());
    }

    #[test]
    fn bad_arguments_rejected() {
        let space = make_metric_line();
        let sampler = space.default_sampler(0).unwrap();
        assert!(check_axiom(&space, Axiom::Sym, &sampler, 0, 0.0).is_err());
        assert!(check_axiom(&space, Axiom::Sym, &sampler, 1, -1.0).is_err());
    }

    #[test]
    fn sep_flags_indistinguishable_points() {
        // p(a,a) = p(a,0) = 0 but p(0,0) = -1, so sep holds at (a, 0).
        let space = make_punctured_line();
        let w = evaluate(
            &space,
            Axiom::Sep,
            &[Point::Adjoined, Point::Real(0.0)],
            0.0,
        )
        .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn lbd_needs_a_declared_bound() {
        let space = crate::spaces::make_alignment_space(
            crate::alignment::AlignmentParams::new(1.0, -1.0, -2.0).unwrap(),
            crate::alignment::Alphabet::dna(),
        )
        .unwrap();
        let sampler = space.default_sampler(0).unwrap();
        assert!(matches!(
            check_axiom(&space, Axiom::Lbd, &sampler, 10, 0.0),
            Err(Error::MissingLowerBound(_))
        ));
    }

    #[test]
    fn zsd_distinguishes_metric_from_punctured_line() {
        let metric = make_metric_line();
        let s = metric.default_sampler(2).unwrap();
        assert!(check_axiom(&metric, Axiom::Zsd, &s, 500, 0.0)
            .unwrap()
            .passed());
        let punctured = make_punctured_line();
        let s = punctured.default_sampler(2).unwrap();
        assert!(!check_axiom(&punctured, Axiom::Zsd, &s, 500, 0.0)
            .unwrap()
            .passed());
    }
}
