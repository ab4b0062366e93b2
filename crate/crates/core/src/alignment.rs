//! Global alignment scores under a match / mismatch / gap scheme.
//!
//! Each column of an alignment scores `alpha` for two equal letters, `beta`
//! for two different letters, `gamma` for a letter against a gap and `0` for
//! two gaps. The score of a word pair is the maximum over all alignments.
//! Under `alpha > beta`, `alpha > gamma`, `beta >= 2 gamma` and `gamma < 0`
//! the negated score is a strong partial metric on words.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Word;

/// The gap symbol.
pub const GAP: u8 = b'-';

/// Longest word accepted by [`optimal_score`].
pub const DEFAULT_MAX_WORD_LEN: usize = 64;

/// Largest combined length accepted by [`brute_force_score`] by default.
pub const DEFAULT_ORACLE_MAX_LEN: usize = 10;

/// A finite set of uppercase letters. Never contains the gap symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Alphabet(Vec<u8>);

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        let mut out = Vec::with_capacity(symbols.len());
        for (position, c) in symbols.chars().enumerate() {
            let c = c.to_ascii_uppercase();
            if !c.is_ascii_uppercase() {
                return Err(Error::InvalidSymbol {
                    symbol: c,
                    position,
                    context: " in alphabet".into(),
                });
            }
            out.push(c as u8);
        }
        out.sort_unstable();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        Ok(Self(out))
    }

    pub fn dna() -> Self {
        Self(b"ACGT".to_vec())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.0.binary_search(&symbol).is_ok()
    }

    /// Parses a word, upper-casing it and rejecting symbols outside the alphabet.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut out = Vec::with_capacity(s.len());
        for (position, c) in s.chars().enumerate() {
            let u = c.to_ascii_uppercase();
            if !u.is_ascii() || !self.contains(u as u8) {
                return Err(Error::InvalidSymbol {
                    symbol: c,
                    position,
                    context: format!(" (alphabet {self})"),
                });
            }
            out.push(u as u8);
        }
        Word::new(out)
    }

    /// Checks that every symbol of `word` belongs to the alphabet.
    pub fn check_word(&self, word: &Word) -> Result<()> {
        match word.symbols().iter().position(|&b| !self.contains(b)) {
            None => Ok(()),
            Some(position) => Err(Error::InvalidSymbol {
                symbol: word.symbols()[position] as char,
                position,
                context: format!(" (alphabet {self})"),
            }),
        }
    }
}

impl TryFrom<String> for Alphabet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(&s)
    }
}

impl From<Alphabet> for String {
    fn from(a: Alphabet) -> String {
        a.to_string()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("ASCII alphabet"))
    }
}

/// The `(alpha, beta, gamma)` scoring scheme. Two gaps always score zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AlignmentParams {
    /// Validates `alpha > beta`, `alpha > gamma`, `beta >= 2 gamma`, `gamma < 0`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::ParameterConstraint(
                "finiteness of alpha, beta, gamma".into(),
            ));
        }
        let violated = if alpha <= beta {
            Some(format!("alpha > beta ({alpha} <= {beta})"))
        } else if alpha <= gamma {
            Some(format!("alpha > gamma ({alpha} <= {gamma})"))
        } else if beta < 2.0 * gamma {
            Some(format!("beta >= 2*gamma ({beta} < {})", 2.0 * gamma))
        } else if gamma >= 0.0 {
            Some(format!("gamma < 0 ({gamma} >= 0)"))
        } else {
            None
        };
        match violated {
            Some(msg) => Err(Error::ParameterConstraint(msg)),
            None => Ok(Self { alpha, beta, gamma }),
        }
    }

    pub fn gap_gap_score(&self) -> f64 {
        0.0
    }

    /// The scheme as exact integers, when all three scores are integers.
    pub fn as_integers(&self) -> Option<IntScheme> {
        const LIMIT: f64 = (1u64 << 31) as f64;
        let int = |v: f64| (v.fract() == 0.0 && v.abs() <= LIMIT).then_some(v as i64);
        Some(Scheme {
            matched: int(self.alpha)?,
            mismatched: int(self.beta)?,
            gap: int(self.gamma)?,
        })
    }

    fn as_floats(&self) -> Scheme<f64> {
        Scheme {
            matched: self.alpha,
            mismatched: self.beta,
            gap: self.gamma,
        }
    }
}

/// Score arithmetic: exact integers or floats.
pub trait Score: Copy + PartialOrd + Add<Output = Self> {
    const ZERO: Self;
}

impl Score for i64 {
    const ZERO: Self = 0;
}

impl Score for f64 {
    const ZERO: Self = 0.0;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scheme<T> {
    pub matched: T,
    pub mismatched: T,
    pub gap: T,
}

pub type IntScheme = Scheme<i64>;

impl<T: Score> Scheme<T> {
    fn column(&self, a: Option<u8>, b: Option<u8>) -> T {
        match (a, b) {
            (Some(a), Some(b)) if a == b => self.matched,
            (Some(_), Some(_)) => self.mismatched,
            (None, None) => T::ZERO,
            _ => self.gap,
        }
    }
}

/// Two equal-length rows over the alphabet plus the gap (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlignmentRows", into = "AlignmentRows")]
pub struct Alignment {
    top: Vec<Option<u8>>,
    bottom: Vec<Option<u8>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct AlignmentRows {
    top: String,
    bottom: String,
}

impl TryFrom<AlignmentRows> for Alignment {
    type Error = Error;

    fn try_from(r: AlignmentRows) -> Result<Self> {
        Alignment::from_rows(&r.top, &r.bottom, None)
    }
}

impl From<Alignment> for AlignmentRows {
    fn from(a: Alignment) -> Self {
        let (top, bottom) = a.rows();
        AlignmentRows { top, bottom }
    }
}

fn parse_row(row: &str, alphabet: Option<&Alphabet>, which: &str) -> Result<Vec<Option<u8>>> {
    row.chars()
        .enumerate()
        .map(|(position, c)| match c {
            '-' | '\u{2014}' => Ok(None),
            c if c.is_ascii_uppercase() && alphabet.is_none_or(|a| a.contains(c as u8)) => {
                Ok(Some(c as u8))
            }
            c => Err(Error::InvalidSymbol {
                symbol: c,
                position,
                context: format!(" in {which} row"),
            }),
        })
        .collect()
}

impl Alignment {
    pub fn new(top: Vec<Option<u8>>, bottom: Vec<Option<u8>>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::MalformedAlignment(format!(
                "row lengths differ ({} vs {})",
                top.len(),
                bottom.len()
            )));
        }
        for &s in top.iter().chain(&bottom).flatten() {
            if !s.is_ascii_uppercase() {
                return Err(Error::MalformedAlignment(format!(
                    "symbol {:?} is not a letter",
                    s as char
                )));
            }
        }
        Ok(Self { top, bottom })
    }

    /// Parses two padded rows. `-` (or an em dash) marks a gap. With an
    /// alphabet, letters outside it are rejected.
    pub fn from_rows(top: &str, bottom: &str, alphabet: Option<&Alphabet>) -> Result<Self> {
        let top = parse_row(top, alphabet, "top")?;
        let bottom = parse_row(bottom, alphabet, "bottom")?;
        Self::new(top, bottom)
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn columns(&self) -> impl Iterator<Item = (Option<u8>, Option<u8>)> + '_ {
        self.top.iter().copied().zip(self.bottom.iter().copied())
    }

    /// The two rows with `-` for gaps.
    pub fn rows(&self) -> (String, String) {
        let render = |row: &[Option<u8>]| row.iter().map(|s| s.map_or('-', char::from)).collect();
        (render(&self.top), render(&self.bottom))
    }

    /// The aligned words with gaps removed.
    pub fn stripped(&self) -> (Word, Word) {
        let strip =
            |row: &[Option<u8>]| Word::new(row.iter().flatten().copied().collect::<Vec<u8>>());
        (
            strip(&self.top).expect("validated letters"),
            strip(&self.bottom).expect("validated letters"),
        )
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, b) = self.rows();
        write!(f, "{t} / {b}")
    }
}

/// Sums the column scores of a given alignment. Exact when the scheme is integral.
pub fn score_alignment(aligned: &Alignment, params: &AlignmentParams) -> f64 {
    match params.as_integers() {
        Some(s) => aligned.columns().map(|(a, b)| s.column(a, b)).sum::<i64>() as f64,
        None => {
            let s = params.as_floats();
            aligned.columns().map(|(a, b)| s.column(a, b)).sum()
        }
    }
}

/// Parses two padded rows and scores them.
pub fn score_rows(
    top: &str,
    bottom: &str,
    params: &AlignmentParams,
    alphabet: Option<&Alphabet>,
) -> Result<f64> {
    Ok(score_alignment(
        &Alignment::from_rows(top, bottom, alphabet)?,
        params,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub score: f64,
    /// The score in exact integer arithmetic, when the scheme is integral.
    pub exact_score: Option<i64>,
    pub witness: Alignment,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Diagonal,
    Up,
    Left,
}

/// Needleman-Wunsch fill and traceback. Ties prefer diagonal, then up
/// (letter of `x` against a gap), then left.
fn global_align<T: Score>(x: &[u8], y: &[u8], s: &Scheme<T>) -> (T, Alignment) {
    let (n, m) = (x.len(), y.len());
    let w = m + 1;
    let mut score = vec![T::ZERO; (n + 1) * w];
    let mut step = vec![Step::Diagonal; (n + 1) * w];
    for i in 1..=n {
        score[i * w] = score[(i - 1) * w] + s.gap;
        step[i * w] = Step::Up;
    }
    for j in 1..=m {
        score[j] = score[j - 1] + s.gap;
        step[j] = Step::Left;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = if x[i - 1] == y[j - 1] {
                s.matched
            } else {
                s.mismatched
            };
            let mut best = (score[(i - 1) * w + j - 1] + sub, Step::Diagonal);
            let up = score[(i - 1) * w + j] + s.gap;
            if up > best.0 {
                best = (up, Step::Up);
            }
            let left = score[i * w + j - 1] + s.gap;
            if left > best.0 {
                best = (left, Step::Left);
            }
            score[i * w + j] = best.0;
            step[i * w + j] = best.1;
        }
    }

    let (mut top, mut bottom) = (Vec::with_capacity(n + m), Vec::with_capacity(n + m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match step[i * w + j] {
            Step::Diagonal => {
                top.push(Some(x[i - 1]));
                bottom.push(Some(y[j - 1]));
                i -= 1;
                j -= 1;
            }
            Step::Up => {
                top.push(Some(x[i - 1]));
                bottom.push(None);
                i -= 1;
            }
            Step::Left => {
                top.push(None);
                bottom.push(Some(y[j - 1]));
                j -= 1;
            }
        }
    }
    top.reverse();
    bottom.reverse();
    (score[n * w + m], Alignment { top, bottom })
}

/// The best global-alignment score of `x` and `y`, with one optimal alignment.
pub fn optimal_score(x: &Word, y: &Word, params: &AlignmentParams) -> Result<AlignmentResult> {
    optimal_score_capped(x, y, params, DEFAULT_MAX_WORD_LEN)
}

pub fn optimal_score_capped(
    x: &Word,
    y: &Word,
    params: &AlignmentParams,
    cap: usize,
) -> Result<AlignmentResult> {
    for w in [x, y] {
        if w.len() > cap {
            return Err(Error::WordTooLong { len: w.len(), cap });
        }
    }
    Ok(match params.as_integers() {
        Some(s) => {
            let (score, witness) = global_align(x.symbols(), y.symbols(), &s);
            AlignmentResult {
                score: score as f64,
                exact_score: Some(score),
                witness,
            }
        }
        None => {
            let (score, witness) = global_align(x.symbols(), y.symbols(), &params.as_floats());
            AlignmentResult {
                score,
                exact_score: None,
                witness,
            }
        }
    })
}

/// Maximum score over every alignment without gap-gap columns, found by
/// explicit enumeration. Independent of the dynamic program.
pub fn brute_force_score(
    x: &Word,
    y: &Word,
    params: &AlignmentParams,
    max_len: usize,
) -> Result<f64> {
    let len = x.len() + y.len();
    if len > max_len {
        return Err(Error::OracleBound { len, max: max_len });
    }
    let mut best = f64::NEG_INFINITY;
    let mut top = Vec::with_capacity(len);
    let mut bottom = Vec::with_capacity(len);
    enumerate(
        x.symbols(),
        y.symbols(),
        &mut top,
        &mut bottom,
        &mut |t, b| {
            let a = Alignment::new(t.to_vec(), b.to_vec()).expect("equal-length rows of letters");
            best = best.max(score_alignment(&a, params));
        },
    );
    Ok(best)
}

type Row = [Option<u8>];

fn enumerate(
    x: &[u8],
    y: &[u8],
    top: &mut Vec<Option<u8>>,
    bottom: &mut Vec<Option<u8>>,
    visit: &mut dyn FnMut(&Row, &Row),
) {
    if x.is_empty() && y.is_empty() {
        visit(top, bottom);
        return;
    }
    let mut branch = |t: Option<u8>,
                      b: Option<u8>,
                      xr: &[u8],
                      yr: &[u8],
                      top: &mut Vec<_>,
                      bottom: &mut Vec<_>| {
        top.push(t);
        bottom.push(b);
        enumerate(xr, yr, top, bottom, visit);
        top.pop();
        bottom.pop();
    };
    if let (Some((&a, xr)), Some((&b, yr))) = (x.split_first(), y.split_first()) {
        branch(Some(a), Some(b), xr, yr, top, bottom);
    }
    if let Some((&a, xr)) = x.split_first() {
        branch(Some(a), None, xr, y, top, bottom);
    }
    if let Some((&b, yr)) = y.split_first() {
        branch(None, Some(b), x, yr, top, bottom);
    }
}
