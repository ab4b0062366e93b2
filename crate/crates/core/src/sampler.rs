//! Seeded, reproducible point samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::Alphabet;
use crate::error::{Error, Result};
use crate::point::{Point, PointKind, Word};

/// Special reals drawn with elevated probability by the built-in real samplers:
/// zero and a few dyadic rationals.
pub const REAL_ATOMS: [f64; 7] = [0.0, 1.0, -1.0, 0.5, -0.5, 0.25, 0.125];

/// How points are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Uniform on `[lo, hi]`; with probability `atom_prob` one of `atoms`
    /// instead; with probability `adjoined_prob` the adjoined point.
    Reals {
        lo: f64,
        hi: f64,
        atoms: Vec<f64>,
        atom_prob: f64,
        adjoined_prob: f64,
    },
    /// Uniform on `(0, hi]`, or one of `atoms` with probability `atom_prob`.
    PositiveReals {
        hi: f64,
        atoms: Vec<f64>,
        atom_prob: f64,
    },
    /// Length uniform on `0..=max_len`, symbols uniform over the alphabet.
    Words { alphabet: Alphabet, max_len: usize },
    /// Uniform choice from a fixed pool.
    Pool { points: Vec<Point> },
}

impl SamplerKind {
    pub fn uniform_reals(lo: f64, hi: f64) -> Self {
        SamplerKind::Reals {
            lo,
            hi,
            atoms: Vec::new(),
            atom_prob: 0.0,
            adjoined_prob: 0.0,
        }
    }
}

/// A sampler description together with its seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSampler {
    pub kind: SamplerKind,
    pub seed: u64,
}

impl PointSampler {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn uniform_reals(lo: f64, hi: f64, seed: u64) -> Self {
        Self::new(SamplerKind::uniform_reals(lo, hi), seed)
    }

    pub fn pool(points: Vec<Point>, seed: u64) -> Self {
        Self::new(SamplerKind::Pool { points }, seed)
    }

    /// Checks the parameters and returns the kind of the points produced.
    pub fn point_kind(&self) -> Result<PointKind> {
        match &self.kind {
            SamplerKind::Reals {
                lo,
                hi,
                atoms,
                atom_prob,
                adjoined_prob,
            } => {
                let ok = lo.is_finite()
                    && hi.is_finite()
                    && lo <= hi
                    && (0.0..=1.0).contains(atom_prob)
                    && (0.0..=1.0).contains(adjoined_prob)
                    && atom_prob + adjoined_prob <= 1.0
                    && (*atom_prob == 0.0 || !atoms.is_empty())
                    && atoms.iter().all(|a| a.is_finite());
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "bad real sampler {:?}",
                        self.kind
                    )));
                }
                Ok(if *adjoined_prob > 0.0 {
                    PointKind::RealAdjoinedPoint
                } else {
                    PointKind::Real
                })
            }
            SamplerKind::PositiveReals {
                hi,
                atoms,
                atom_prob,
            } => {
                let ok = hi.is_finite()
                    && *hi > 0.0
                    && (0.0..=1.0).contains(atom_prob)
                    && (*atom_prob == 0.0 || !atoms.is_empty())
                    && atoms.iter().all(|a| a.is_finite() && *a > 0.0);
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "bad positive-real sampler {:?}",
                        self.kind
                    )));
                }
                Ok(PointKind::PositiveReal)
            }
            SamplerKind::Words { .. } => Ok(PointKind::WordOverAlphabet),
            SamplerKind::Pool { points } => {
                let first = points
                    .first()
                    .ok_or_else(|| Error::InvalidArgument("empty sampler pool".into()))?;
                let mut kind = first.kind();
                for p in points {
                    let k = p.kind();
                    if k.includes(kind) {
                        kind = k;
                    } else if !kind.includes(k) {
                        return Err(Error::InvalidArgument(
                            "sampler pool mixes point kinds".into(),
                        ));
                    }
                }
                Ok(kind)
            }
        }
    }

    /// A fresh stream positioned at the start of this sampler's sequence.
    pub fn stream(&self) -> SampleStream<'_> {
        SampleStream {
            kind: &self.kind,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

/// An iterator over sampled points. Two streams of the same sampler yield
/// identical sequences.
pub struct SampleStream<'a> {
    kind: &'a SamplerKind,
    rng: ChaCha8Rng,
}

impl SampleStream<'_> {
    pub fn next_point(&mut self) -> Point {
        let rng = &mut self.rng;
        match self.kind {
            SamplerKind::Reals {
                lo,
                hi,
                atoms,
                atom_prob,
                adjoined_prob,
            } => {
                let u: f64 = rng.random();
                if u < *adjoined_prob {
                    Point::Adjoined
                } else if u < adjoined_prob + atom_prob {
                    Point::Real(atoms[rng.random_range(0..atoms.len())])
                } else {
                    Point::Real(lo + (hi - lo) * rng.random::<f64>())
                }
            }
            SamplerKind::PositiveReals {
                hi,
                atoms,
                atom_prob,
            } => {
                if rng.random::<f64>() < *atom_prob {
                    Point::PositiveReal(atoms[rng.random_range(0..atoms.len())])
                } else {
                    // 1 - u lies in (0, 1].
                    Point::PositiveReal(hi * (1.0 - rng.random::<f64>()))
                }
            }
            SamplerKind::Words { alphabet, max_len } => {
                let len = rng.random_range(0..=*max_len);
                let symbols = alphabet.symbols();
                let word: Vec<u8> = (0..len)
                    .map(|_| symbols[rng.random_range(0..symbols.len())])
                    .collect();
                Point::Word(Word::new(word).expect("alphabet symbols are valid word symbols"))
            }
            SamplerKind::Pool { points } => points[rng.random_range(0..points.len())].clone(),
        }
    }
}

impl Iterator for SampleStream<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        Some(self.next_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let s = PointSampler::new(
            SamplerKind::Reals {
                lo: -10.0,
                hi: 10.0,
                atoms: REAL_ATOMS.to_vec(),
                atom_prob: 0.25,
                adjoined_prob: 0.1,
            },
            42,
        );
        let a: Vec<Point> = s.stream().take(200).collect();
        let b: Vec<Point> = s.stream().take(200).collect();
        assert_eq!(a, b);
        assert!(a.contains(&Point::Adjoined));
        assert!(a.contains(&Point::Real(0.0)));
        assert_eq!(s.point_kind().unwrap(), PointKind::RealAdjoinedPoint);
    }

    #[test]
    fn positive_reals_stay_positive() {
        let s = PointSampler::new(
            SamplerKind::PositiveReals {
                hi: 10.0,
                atoms: vec![],
                atom_prob: 0.0,
            },
            1,
        );
        for p in s.stream().take(1000) {
            let x = p.as_real().unwrap();
            assert!(x > 0.0 && x <= 10.0);
        }
    }

    #[test]
    fn word_lengths_bounded() {
        let s = PointSampler::new(
            SamplerKind::Words {
                alphabet: Alphabet::dna(),
                max_len: 6,
            },
            3,
        );
        let words: Vec<Point> = s.stream().take(500).collect();
        assert!(words.iter().all(|w| w.as_word().unwrap().len() <= 6));
        assert!(words.iter().any(|w| w.as_word().unwrap().is_empty()));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(PointSampler::uniform_reals(1.0, 0.0, 0)
            .point_kind()
            .is_err());
        assert!(PointSampler::pool(vec![], 0).point_kind().is_err());
        let mixed = PointSampler::pool(vec![Point::Real(1.0), Point::word("A").unwrap()], 0);
        assert!(mixed.point_kind().is_err());
        let ok = PointSampler::pool(vec![Point::Real(1.0), Point::Adjoined], 0);
        assert_eq!(ok.point_kind().unwrap(), PointKind::RealAdjoinedPoint);
    }
}
