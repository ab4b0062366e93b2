//! The run report: greppable `key: value` lines followed by one JSON tree
//! holding the command, the configuration echo and the results.
//!
//! ```text
//! pmetric-report: 1
//! command: align
//! verdict: pass
//! timestamp: 1760000000
//! score: -2
//! --- begin structured report ---
//! { ... }
//! --- end structured report ---
//! ```
//!
//! Everything except the `timestamp:` line is a deterministic function of the
//! command line.

use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const FORMAT_LINE: &str = "pmetric-report: 1";
pub const BEGIN_MARKER: &str = "--- begin structured report ---";
pub const END_MARKER: &str = "--- end structured report ---";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunVerdict {
    Pass,
    Fail,
}

impl RunVerdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            RunVerdict::Pass
        } else {
            RunVerdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            RunVerdict::Pass => 0,
            RunVerdict::Fail => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunVerdict::Pass => "pass",
            RunVerdict::Fail => "fail",
        }
    }
}

impl FromStr for RunVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(RunVerdict::Pass),
            "fail" => Ok(RunVerdict::Fail),
            other => Err(Error::Report(format!("unknown verdict `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Tree {
    command: String,
    verdict: RunVerdict,
    config: Value,
    results: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub verdict: RunVerdict,
    pub timestamp: u64,
    /// Human-oriented `key: value` lines.
    pub summary: Vec<(String, String)>,
    pub config: Value,
    pub results: Value,
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

impl Report {
    pub fn new(command: &str, verdict: RunVerdict, config: Value, results: Value) -> Self {
        Self {
            command: command.to_owned(),
            verdict,
            timestamp: unix_now(),
            summary: Vec::new(),
            config,
            results,
        }
    }

    pub fn line(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.summary
            .push((key.to_owned(), one_line(&value.to_string())));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_LINE);
        out.push('\n');
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("verdict: {}\n", self.verdict.as_str()));
        out.push_str(&format!("timestamp: {}\n", self.timestamp));
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        let tree = Tree {
            command: self.command.clone(),
            verdict: self.verdict,
            config: self.config.clone(),
            results: self.results.clone(),
        };
        out.push_str(BEGIN_MARKER);
        out.push('\n');
        out.push_str(&serde_json::to_string_pretty(&tree).expect("JSON values always serialize"));
        out.push('\n');
        out.push_str(END_MARKER);
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(FORMAT_LINE) {
            return Err(Error::Report(format!("first line must be `{FORMAT_LINE}`")));
        }
        let mut header = Vec::new();
        loop {
            match lines.next() {
                Some(BEGIN_MARKER) => break,
                Some(line) => {
                    let (k, v) = line.split_once(": ").ok_or_else(|| {
                        Error::Report(format!("expected `key: value`, got `{line}`"))
                    })?;
                    header.push((k.to_owned(), v.to_owned()));
                }
                None => return Err(Error::Report("missing structured block".into())),
            }
        }
        let mut json = String::new();
        let mut closed = false;
        for line in lines.by_ref() {
            if line == END_MARKER {
                closed = true;
                break;
            }
            json.push_str(line);
            json.push('\n');
        }
        if !closed {
            return Err(Error::Report("unterminated structured block".into()));
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Report(
                "trailing content after the structured block".into(),
            ));
        }
        let tree: Tree = serde_json::from_str(&json)?;

        let mut take = |key: &str| -> Result<String> {
            let i = header
                .iter()
                .position(|(k, _)| k == key)
                .ok_or_else(|| Error::Report(format!("missing `{key}` line")))?;
            Ok(header.remove(i).1)
        };
        let command = take("command")?;
        let verdict: RunVerdict = take("verdict")?.parse()?;
        let timestamp = take("timestamp")?
            .parse()
            .map_err(|e| Error::Report(format!("bad timestamp: {e}")))?;
        if command != tree.command || verdict != tree.verdict {
            return Err(Error::Report("header and structured block disagree".into()));
        }
        Ok(Self {
            command,
            verdict,
            timestamp,
            summary: header,
            config: tree.config,
            results: tree.results,
        })
    }
}

/// The rendered report with its `timestamp:` line removed.
pub fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("timestamp: "))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new(
            "align",
            RunVerdict::Pass,
            json!({"alpha": 1.0}),
            json!([{"score": -2.0}]),
        );
        r.line("score", -2).line("witness", "CGATC / C-AGA\nextra");
        r
    }

    #[test]
    fn round_trip() {
        let r = sample();
        let text = r.render();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get("witness"), Some("CGATC / C-AGA extra"));
        assert_eq!(back.render(), text);
    }

    #[test]
    fn timestamp_is_the_only_varying_line() {
        let mut a = sample();
        let mut b = sample();
        a.timestamp = 1;
        b.timestamp = 2;
        assert_ne!(a.render(), b.render());
        assert_eq!(strip_timestamp(&a.render()), strip_timestamp(&b.render()));
    }

    #[test]
    fn malformed_reports_rejected() {
        let text = sample().render();
        assert!(Report::parse(&text.replace(FORMAT_LINE, "report")).is_err());
        assert!(Report::parse(&text.replace(END_MARKER, "")).is_err());
        assert!(Report::parse(&text.replace("verdict: pass", "verdict: fail")).is_err());
        assert!(Report::parse(&text.replace("timestamp: ", "time: ")).is_err());
        assert!(Report::parse(&format!("{text}junk\n")).is_err());
    }
}
