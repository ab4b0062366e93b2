//! The `pmetric` command line: argument parsing, dispatch and report emission.
//!
//! Exit status is 0 for a passing verdict, 1 for a failing or falsified one
//! and 2 for usage and configuration errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::alignment::{
    brute_force_score, optimal_score, score_alignment, Alignment, AlignmentParams, AlignmentResult,
    Alphabet, DEFAULT_ORACLE_MAX_LEN,
};
use crate::axioms::{check_axiom, check_declared_class, Axiom, AxiomReport};
use crate::error::{Error, Result};
use crate::orbit::{
    check_min_condition, check_special_limit, iterate_orbit, orbit_prefix, solve_fixed_point,
    FixedPointCertificate, MinVariant, OrbitOptions, PhiFunction, SelfMap, SolverOptions,
    TheoremVariant,
};
use crate::point::{parse_real, Point, Word};
use crate::report::{Report, RunVerdict};
use crate::sampler::PointSampler;
use crate::space::PmSpace;
use crate::spaces::SpaceDescriptor;

pub const SEED_ENV: &str = "PMETRIC_SEED";

fn real(s: &str) -> std::result::Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(
    name = "pmetric",
    version,
    about = "Partial metric spaces, alignment distances and fixed-point iteration"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every sampler; defaults to $PMETRIC_SEED, then 0.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sample the axioms of a space.
    CheckAxioms(AxiomArgs),
    /// Optimal global alignment of every pair of input words.
    Align(AlignArgs),
    /// Iterate a map and classify the orbit.
    Orbit(OrbitArgs),
    /// Certify a fixed point under one theorem variant.
    Fixpoint(FixpointArgs),
    /// Check a min-type contraction condition.
    MinCheck(MinArgs),
    /// Re-parse a report, re-run its configuration and re-validate its witnesses.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckAxioms(_) => "check-axioms",
            Command::Align(_) => "align",
            Command::Orbit(_) => "orbit",
            Command::Fixpoint(_) => "fixpoint",
            Command::MinCheck(_) => "min-check",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomArgs {
    /// Space descriptor, `name` or `name:key=value,...`.
    #[arg(long, default_value = "metric-line")]
    pub space: String,
    /// Axioms to check (repeatable); defaults to those of the declared class.
    #[arg(long = "axiom")]
    pub axioms: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Defaults to 0 for exact spaces and 1e-12 otherwise.
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub tol: Option<f64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignArgs {
    #[arg(long, default_value_t = 1.0, value_parser = real, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = -1.0, value_parser = real, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = -2.0, value_parser = real, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value = "ACGT")]
    pub alphabet: String,
    /// FASTA-like file: `>` header lines, each followed by sequence lines.
    #[arg(long)]
    pub words_file: Option<PathBuf>,
    /// Also score every pair by exhaustive enumeration.
    #[arg(long)]
    pub oracle: bool,
    pub words: Vec<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSettings {
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 32)]
    pub window: usize,
    #[arg(long, default_value_t = 1e-9, value_parser = real)]
    pub tol: f64,
    /// Divergence bound on |p|.
    #[arg(long, default_value_t = 1e12, value_parser = real)]
    pub blowup: f64,
}

impl OrbitSettings {
    fn options(&self) -> OrbitOptions {
        OrbitOptions {
            max_steps: self.max_steps,
            window: self.window,
            tol: self.tol,
            blowup: self.blowup,
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitArgs {
    #[arg(long, default_value = "metric-line")]
    pub space: String,
    /// Map descriptor, e.g. `halving` or `linear:a=1/2,b=1`.
    #[arg(long, default_value = "halving")]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[command(flatten)]
    pub settings: OrbitSettings,
    /// Candidate limits to classify (repeatable).
    #[arg(long = "limit", allow_hyphen_values = true)]
    pub limits: Vec<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixpointArgs {
    #[arg(long, default_value = "metric-line")]
    pub space: String,
    #[arg(long, default_value = "halving")]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    /// One of T1.9-1, T1.9-2, T1.9-3, T1.10-1, T1.10-2, T6.4, T7.3.
    #[arg(long)]
    pub variant: String,
    #[command(flatten)]
    pub settings: OrbitSettings,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// `linear:k=<k>` or `quadratic:scale=<s>`, anchored at r.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub prefix: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Additional starting points that must reach the same fixed point.
    #[arg(long = "start", allow_hyphen_values = true)]
    pub starts: Vec<String>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinArgs {
    #[arg(long, default_value = "metric-line")]
    pub space: String,
    #[arg(long, default_value = "halving")]
    pub map: String,
    #[arg(long, default_value_t = 0.6, value_parser = real)]
    pub c: f64,
    /// `min` or `min-ratio`.
    #[arg(long, default_value = "min")]
    pub variant: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Sample reals uniformly from [lo, hi] instead of the space's sampler.
    #[arg(long, value_parser = real, allow_hyphen_values = true, requires = "hi")]
    pub lo: Option<f64>,
    #[arg(long, value_parser = real, allow_hyphen_values = true, requires = "lo")]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 1e-12, value_parser = real)]
    pub tol: f64,
    /// Start of the orbit along which the derived inequality is checked.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, default_value_t = 50)]
    pub prefix: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub report: PathBuf,
}

/// The result of one invocation.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    /// Diagnostic for standard error.
    pub message: Option<String>,
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::UnknownAxiom(_)
            | Error::KindMismatch { .. }
            | Error::SamplerMismatch { .. }
            | Error::InvalidPoint(_)
            | Error::MissingLowerBound(_)
            | Error::ParameterConstraint(_)
            | Error::WordTooLong { .. }
            | Error::InvalidSymbol { .. }
            | Error::MalformedAlignment(_)
            | Error::OracleBound { .. }
            | Error::UnknownSpace(_)
            | Error::UnknownMap(_)
            | Error::InvalidPhi(_)
            | Error::InvalidArgument(_)
            | Error::Report(_)
            | Error::Io(_)
            | Error::Json(_)
    )
}

impl RunConfig {
    /// The configuration echo recorded in the report.
    pub fn echo(&self) -> Value {
        json!({ "seed": self.seed, "command": self.command })
    }

    fn from_echo(config: &Value) -> Result<Self> {
        Ok(Self {
            command: serde_json::from_value(config["command"].clone())?,
            seed: serde_json::from_value(config["seed"].clone())?,
            out: None,
        })
    }
}

/// Executes a parsed configuration.
pub fn run(config: &RunConfig) -> RunOutcome {
    let normalized = match normalize(config) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let outcome = match &normalized.command {
        Command::CheckAxioms(args) => run_axioms(&normalized, args),
        Command::Align(args) => run_align(&normalized, args),
        Command::Orbit(args) => run_orbit(&normalized, args),
        Command::Fixpoint(args) => run_fixpoint(&normalized, args),
        Command::MinCheck(args) => run_min(&normalized, args),
        Command::Replay(args) => run_replay(&normalized, args),
    };
    match outcome {
        Ok(report) => RunOutcome {
            exit_code: report.exit_code(),
            report: Some(report),
            message: None,
        },
        Err(e) if is_usage_error(&e) => usage(e),
        Err(e) => {
            let mut report = Report::new(
                normalized.command.name(),
                RunVerdict::Fail,
                normalized.echo(),
                json!({ "error": e.to_string() }),
            );
            report.line("error", &e);
            RunOutcome {
                exit_code: 1,
                report: Some(report),
                message: Some(e.to_string()),
            }
        }
    }
}

fn usage(e: Error) -> RunOutcome {
    RunOutcome {
        exit_code: 2,
        report: None,
        message: Some(format!("error: {e}")),
    }
}

/// Resolves inputs that live outside the command line, so that the echoed
/// configuration alone reproduces the run.
fn normalize(config: &RunConfig) -> Result<RunConfig> {
    let mut config = config.clone();
    if let Command::Align(args) = &mut config.command {
        if let Some(path) = args.words_file.take() {
            let alphabet = Alphabet::new(&args.alphabet)?;
            let text = fs::read_to_string(&path)?;
            for (_, word) in parse_records(&text, &alphabet)? {
                args.words.push(word.as_str().to_owned());
            }
        }
    }
    Ok(config)
}

/// Parses FASTA-like records: a `>` header line followed by sequence lines.
/// Lowercase symbols are uppercased; whitespace inside sequence lines is ignored.
pub fn parse_records(text: &str, alphabet: &Alphabet) -> Result<Vec<(String, Word)>> {
    let mut records: Vec<(String, String, usize)> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(header) = line.strip_prefix('>') {
            records.push((header.trim().to_owned(), String::new(), index + 1));
        } else if !line.is_empty() {
            let Some((_, seq, _)) = records.last_mut() else {
                return Err(Error::InvalidArgument(format!(
                    "line {}: sequence data before the first `>` header",
                    index + 1
                )));
            };
            seq.extend(line.chars().filter(|c| !c.is_whitespace()));
        }
    }
    records
        .into_iter()
        .map(|(header, seq, line)| match alphabet.parse_word(&seq) {
            Ok(word) => Ok((header, word)),
            Err(Error::InvalidSymbol {
                symbol,
                position,
                context,
            }) => Err(Error::InvalidSymbol {
                symbol,
                position,
                context: format!("{context} in record `{header}` starting on line {line}"),
            }),
            Err(e) => Err(e),
        })
        .collect()
}

fn build_space(descriptor: &str) -> Result<PmSpace> {
    SpaceDescriptor::parse(descriptor)?.build()
}

fn parse_point(space: &PmSpace, s: &str) -> Result<Point> {
    space.point_kind().parse_point(s)
}

fn sampler_for(space: &PmSpace, seed: u64) -> Result<PointSampler> {
    space.default_sampler(seed).ok_or_else(|| {
        Error::InvalidArgument(format!("space `{}` has no default sampler", space.name()))
    })
}

fn run_axioms(config: &RunConfig, args: &AxiomArgs) -> Result<Report> {
    let space = build_space(&args.space)?;
    let sampler = sampler_for(&space, config.seed)?;
    let tol = args.tol.unwrap_or_else(|| space.default_tolerance());
    let reports: Vec<AxiomReport> = if args.axioms.is_empty() {
        check_declared_class(&space, &sampler, args.samples, tol)?
    } else {
        args.axioms
            .iter()
            .map(|a| check_axiom(&space, a.parse::<Axiom>()?, &sampler, args.samples, tol))
            .collect::<Result<_>>()?
    };
    let pass = reports.iter().all(AxiomReport::passed);
    let mut report = Report::new(
        "check-axioms",
        RunVerdict::from_pass(pass),
        config.echo(),
        serde_json::to_value(&reports)?,
    );
    report
        .line("space", &args.space)
        .line("seed", config.seed)
        .line("samples", args.samples)
        .line("tolerance", tol);
    for r in &reports {
        let verdict = if r.passed() {
            "PASS".to_owned()
        } else {
            "FAIL".to_owned()
        };
        match &r.witness {
            Some(w) => report.line(r.axiom.as_str(), format!("{verdict} witness {w}")),
            None => report.line(r.axiom.as_str(), verdict),
        };
    }
    Ok(report)
}

#[derive(Serialize)]
struct PairResult<'a> {
    x: &'a Word,
    y: &'a Word,
    #[serde(flatten)]
    result: &'a AlignmentResult,
    pmetric: f64,
    oracle_score: Option<f64>,
}

fn run_align(config: &RunConfig, args: &AlignArgs) -> Result<Report> {
    let params = AlignmentParams::new(args.alpha, args.beta, args.gamma)?;
    let alphabet = Alphabet::new(&args.alphabet)?;
    let words: Vec<Word> = args
        .words
        .iter()
        .map(|w| alphabet.parse_word(w))
        .collect::<Result<_>>()?;
    if words.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "align needs at least two words, got {}",
            words.len()
        )));
    }
    let mut results = Vec::new();
    let mut agree = true;
    let mut report_lines = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let (x, y) = (&words[i], &words[j]);
            let result = optimal_score(x, y, &params)?;
            let oracle = if args.oracle {
                let o = brute_force_score(x, y, &params, DEFAULT_ORACLE_MAX_LEN)?;
                agree &= o == result.score;
                Some(o)
            } else {
                None
            };
            report_lines.push(format!(
                "{x} {y} score={} pmetric={} witness={}",
                result.score, -result.score, result.witness
            ));
            results.push((x.clone(), y.clone(), result, oracle));
        }
    }
    let json_results: Vec<PairResult<'_>> = results
        .iter()
        .map(|(x, y, result, oracle_score)| PairResult {
            x,
            y,
            result,
            pmetric: -result.score,
            oracle_score: *oracle_score,
        })
        .collect();
    let mut report = Report::new(
        "align",
        RunVerdict::from_pass(agree),
        config.echo(),
        serde_json::to_value(&json_results)?,
    );
    report
        .line("alpha", params.alpha)
        .line("beta", params.beta)
        .line("gamma", params.gamma)
        .line("alphabet", &alphabet);
    if let [(_, _, r, _)] = results.as_slice() {
        let (top, bottom) = r.witness.rows();
        report
            .line("score", r.score)
            .line("pmetric", -r.score)
            .line("witness", format!("{top} / {bottom}"));
    }
    for line in report_lines {
        report.line("pair", line);
    }
    if args.oracle {
        report.line("oracle", if agree { "agrees" } else { "DISAGREES" });
    }
    Ok(report)
}

fn run_orbit(config: &RunConfig, args: &OrbitArgs) -> Result<Report> {
    let space = build_space(&args.space)?;
    let map = SelfMap::parse(&args.map)?;
    let x0 = parse_point(&space, &args.x0)?;
    let limits: Vec<Point> = args
        .limits
        .iter()
        .map(|s| parse_point(&space, s))
        .collect::<Result<_>>()?;
    let trace = iterate_orbit(&space, &map, &x0, &args.settings.options())?;
    let mut limit_reports = Vec::new();
    for a in &limits {
        limit_reports.push((
            a.clone(),
            check_special_limit(&space, &trace, a, trace.limit_tolerance())?,
        ));
    }
    let results = json!({
        "steps": trace.steps(),
        "verdict": trace.verdict,
        "r_estimate": trace.r_estimate,
        "tail": trace.tail,
        "last": trace.last(),
        "last_self_distance": trace.self_distances.last(),
        "limit_tolerance": trace.limit_tolerance(),
        "limits": limit_reports
            .iter()
            .map(|(a, r)| json!({ "point": a, "report": r }))
            .collect::<Vec<_>>(),
    });
    let mut report = Report::new(
        "orbit",
        RunVerdict::from_pass(trace.is_cauchy()),
        config.echo(),
        results,
    );
    report
        .line("space", &args.space)
        .line("map", &map)
        .line("x0", &x0)
        .line("cauchy_verdict", trace.verdict)
        .line("steps", trace.steps())
        .line("r_estimate", trace.r_estimate)
        .line("tail_spread", trace.tail.spread())
        .line("last", trace.last());
    for (a, r) in &limit_reports {
        report.line(
            "limit",
            format!(
                "{a} {} deviation={} p(a,a)={}",
                r.verdict, r.max_deviation, r.self_distance
            ),
        );
    }
    Ok(report)
}

fn certificate_lines(report: &mut Report, cert: &FixedPointCertificate) {
    report
        .line("variant", cert.theorem_variant)
        .line("fixed_point", &cert.candidate)
        .line("self_distance", cert.self_distance)
        .line("residual", cert.residual)
        .line("tolerance", cert.tolerance)
        .line("steps", cert.steps);
    for c in &cert.conditions_checked {
        report.line(
            "condition",
            format!(
                "{} {} ({})",
                c.name,
                if c.verdict { "PASS" } else { "FAIL" },
                c.evidence
            ),
        );
    }
}

fn run_fixpoint(config: &RunConfig, args: &FixpointArgs) -> Result<Report> {
    let space = build_space(&args.space)?;
    let map = SelfMap::parse(&args.map)?;
    let x0 = parse_point(&space, &args.x0)?;
    let variant: TheoremVariant = args.variant.parse()?;
    let phi = match &args.phi {
        Some(descriptor) => {
            let r = args
                .r
                .ok_or_else(|| Error::InvalidArgument("--phi needs --r".into()))?;
            Some(PhiFunction::parse(descriptor, r)?)
        }
        None => None,
    };
    let options = SolverOptions {
        orbit: args.settings.options(),
        r: args.r,
        c: args.c,
        phi,
        prefix: args.prefix,
        samples: args.samples,
        sampler: None,
        seed: config.seed,
        uniqueness_starts: args
            .starts
            .iter()
            .map(|s| parse_point(&space, s))
            .collect::<Result<_>>()?,
    };
    let (verdict, certificate, error) =
        match solve_fixed_point(&space, &map, &x0, variant, &options) {
            Ok(cert) => (RunVerdict::Pass, Some(cert), None),
            Err(
                e @ (Error::HypothesisFailed { .. }
                | Error::ResidualExceeded { .. }
                | Error::Disagreement { .. }),
            ) => {
                let cert = match &e {
                    Error::HypothesisFailed { certificate, .. }
                    | Error::ResidualExceeded { certificate, .. }
                    | Error::Disagreement { certificate, .. } => (**certificate).clone(),
                    _ => unreachable!(),
                };
                (RunVerdict::Fail, Some(cert), Some(e.to_string()))
            }
            Err(e @ Error::OrbitNotCauchy(_)) => (RunVerdict::Fail, None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
    let mut report = Report::new(
        "fixpoint",
        verdict,
        config.echo(),
        json!({ "certificate": certificate, "error": error }),
    );
    report
        .line("space", &args.space)
        .line("map", &map)
        .line("x0", &x0);
    if let Some(cert) = &certificate {
        certificate_lines(&mut report, cert);
    }
    if let Some(e) = &error {
        report.line("error", e);
    }
    Ok(report)
}

fn run_min(config: &RunConfig, args: &MinArgs) -> Result<Report> {
    let space = build_space(&args.space)?;
    let map = SelfMap::parse(&args.map)?;
    let variant: MinVariant = args.variant.parse()?;
    let sampler = match (args.lo, args.hi) {
        (Some(lo), Some(hi)) => PointSampler::uniform_reals(lo, hi, config.seed),
        _ => sampler_for(&space, config.seed)?,
    };
    let x0 = parse_point(&space, &args.x0)?;
    let orbit = orbit_prefix(&space, &map, &x0, args.prefix)?;
    let result = check_min_condition(
        &space,
        &map,
        &sampler,
        args.c,
        args.samples,
        variant,
        args.tol,
        &orbit,
    )?;
    let pass = result.pass && result.orbit.pass;
    let mut report = Report::new(
        "min-check",
        RunVerdict::from_pass(pass),
        config.echo(),
        serde_json::to_value(&result)?,
    );
    report
        .line("space", &args.space)
        .line("map", &map)
        .line("variant", variant)
        .line("c", args.c)
        .line(
            "sampled_condition",
            if result.pass { "PASS" } else { "FAIL" },
        )
        .line("evaluated", result.evaluated)
        .line("skipped", result.skipped)
        .line(
            "orbit_inequality",
            if result.orbit.pass { "PASS" } else { "FAIL" },
        );
    if let Some(w) = &result.worst {
        report.line(
            "worst",
            format!("x={} y={} lhs={} rhs={}", w.x, w.y, w.lhs, w.rhs),
        );
    }
    if let Some(f) = &result.orbit.first_failure {
        report.line(
            "orbit_failure",
            format!("n={} lhs={} rhs={}", f.m - 1, f.lhs, f.rhs),
        );
    }
    Ok(report)
}

/// Re-validates a parsed report. Returns one entry per check performed.
pub fn replay_report(original: &Report) -> Result<Vec<(String, bool)>> {
    let config = RunConfig::from_echo(&original.config)?;
    if matches!(config.command, Command::Replay(_)) {
        return Err(Error::Report(
            "a replay report cannot itself be replayed".into(),
        ));
    }
    let mut checks = Vec::new();
    let rerun = run(&config);
    let same = rerun
        .report
        .as_ref()
        .is_some_and(|r| r.verdict == original.verdict && r.results == original.results);
    checks.push(("re-run reproduces the results".to_owned(), same));

    match &config.command {
        Command::CheckAxioms(args) => {
            let space = build_space(&args.space)?;
            let reports: Vec<AxiomReport> = serde_json::from_value(original.results.clone())?;
            for r in &reports {
                checks.push((format!("{} witness replays", r.axiom), r.replay(&space)?));
            }
        }
        Command::Align(args) => {
            let params = AlignmentParams::new(args.alpha, args.beta, args.gamma)?;
            let alphabet = Alphabet::new(&args.alphabet)?;
            let pairs = original
                .results
                .as_array()
                .ok_or_else(|| Error::Report("align results must be a list".into()))?;
            for pair in pairs {
                let x: Word = serde_json::from_value(pair["x"].clone())?;
                let y: Word = serde_json::from_value(pair["y"].clone())?;
                let score = pair["score"]
                    .as_f64()
                    .ok_or_else(|| Error::Report("missing score".into()))?;
                let witness: Alignment = serde_json::from_value(pair["witness"].clone())?;
                let (top, bottom) = witness.rows();
                let rescored = score_alignment(
                    &Alignment::from_rows(&top, &bottom, Some(&alphabet))?,
                    &params,
                );
                let ok = rescored == score && witness.stripped() == (x.clone(), y.clone());
                checks.push((format!("witness for {x} {y} rescores"), ok));
            }
        }
        Command::Fixpoint(args) => {
            if let Some(cert) = original.results.get("certificate").filter(|c| !c.is_null()) {
                let cert: FixedPointCertificate = serde_json::from_value(cert.clone())?;
                let space = build_space(&args.space)?;
                let map = SelfMap::parse(&args.map)?;
                checks.push(("certificate replays".to_owned(), cert.replay(&space, &map)?));
            }
        }
        _ => {}
    }
    Ok(checks)
}

fn run_replay(config: &RunConfig, args: &ReplayArgs) -> Result<Report> {
    let text = fs::read_to_string(&args.report)?;
    let original = Report::parse(&text)?;
    let checks = replay_report(&original)?;
    let pass = checks.iter().all(|(_, ok)| *ok);
    let results = json!({
        "original_command": original.command,
        "original_verdict": original.verdict,
        "checks": checks.iter().map(|(name, ok)| json!({ "check": name, "pass": ok })).collect::<Vec<_>>(),
    });
    let mut report = Report::new(
        "replay",
        RunVerdict::from_pass(pass),
        config.echo(),
        results,
    );
    report.line("original_command", &original.command);
    for (name, ok) in &checks {
        report.line(
            "check",
            format!("{} {name}", if *ok { "PASS" } else { "FAIL" }),
        );
    }
    Ok(report)
}

/// Parses `args`, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = run(&config);
    if let Some(message) = &outcome.message {
        eprintln!("{message}");
    }
    if let Some(report) = &outcome.report {
        let text = report.render();
        let written = match &config.out {
            Some(path) => fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write report: {e}");
            return 2;
        }
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> RunOutcome {
        let config =
            RunConfig::try_parse_from(std::iter::once("pmetric").chain(args.iter().copied()))
                .unwrap();
        run(&config)
    }

    #[test]
    fn align_example() {
        let out = run_args(&[
            "align", "--alpha", "1", "--beta", "-1", "--gamma", "-2", "CGATC", "CAGA",
        ]);
        assert_eq!(out.exit_code, 0);
        let report = out.report.unwrap();
        assert_eq!(report.get("score"), Some("-2"));
        assert_eq!(report.get("pmetric"), Some("2"));
        assert!(report.get("witness").is_some());
    }

    #[test]
    fn rational_and_negative_flags() {
        let out = run_args(&[
            "align", "--alpha", "2/1", "--beta", "-1/2", "--gamma", "-1/1", "--oracle", "acg", "AG",
        ]);
        assert_eq!(out.exit_code, 0, "{:?}", out.message);
        assert_eq!(out.report.unwrap().get("oracle"), Some("agrees"));
    }

    #[test]
    fn constraint_violation_is_a_usage_error() {
        let out = run_args(&["align", "--beta", "-3", "--gamma", "-1", "A", "C"]);
        assert_eq!(out.exit_code, 2);
        assert!(out.message.unwrap().contains("beta >= 2*gamma"));
    }

    #[test]
    fn punctured_line_sssd_fails_with_witness() {
        let out = run_args(&[
            "check-axioms",
            "--space",
            "punctured-line",
            "--axiom",
            "sssd",
            "--seed",
            "7",
        ]);
        assert_eq!(out.exit_code, 1);
        let report = out.report.unwrap();
        assert_eq!(
            report.get("sssd"),
            Some("FAIL witness (a, 0) p(x,x)=0 p(x,y)=0")
        );
    }

    #[test]
    fn unknown_names() {
        assert_eq!(
            run_args(&["check-axioms", "--space", "hyperbolic"]).exit_code,
            2
        );
        assert_eq!(
            run_args(&["orbit", "--map", "tent", "--x0", "1"]).exit_code,
            2
        );
        assert_eq!(run_args(&["check-axioms", "--axiom", "tri"]).exit_code, 2);
    }

    #[test]
    fn records() {
        let alphabet = Alphabet::dna();
        let recs = parse_records(">one\nacg\nT\n\n> two\nGG\n", &alphabet).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].0, "one");
        assert_eq!(recs[0].1.as_str(), "ACGT");
        assert_eq!(recs[1].1.as_str(), "GG");
        let err = parse_records(">x\nACXT\n", &alphabet)
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("position 2") && err.contains("record `x`"),
            "{err}"
        );
        assert!(parse_records("ACGT\n", &alphabet).is_err());
    }

    #[test]
    fn orbit_report() {
        let out = run_args(&[
            "orbit",
            "--space",
            "punctured-line",
            "--x0",
            "1",
            "--limit",
            "0",
            "--limit",
            "a",
        ]);
        assert_eq!(out.exit_code, 0);
        let report = out.report.unwrap();
        assert_eq!(
            report.get("cauchy_verdict"),
            Some("cauchy_within_tolerance")
        );
        let limits: Vec<&str> = report
            .summary
            .iter()
            .filter(|(k, _)| k == "limit")
            .map(|(_, v)| v.as_str())
            .collect();
        assert!(limits[0].starts_with("0 special_limit"));
        assert!(limits[1].starts_with("a limit_only"));
    }

    #[test]
    fn fixpoint_reports() {
        let ok = run_args(&[
            "fixpoint",
            "--map",
            "linear:a=1/2,b=1",
            "--x0",
            "0",
            "--variant",
            "T1.9-1",
        ]);
        assert_eq!(ok.exit_code, 0);
        let bad = run_args(&[
            "fixpoint",
            "--map",
            "translate:b=1",
            "--x0",
            "0",
            "--variant",
            "T1.9-1",
            "--max-steps",
            "1000",
        ]);
        assert_eq!(bad.exit_code, 1);
        assert!(bad
            .report
            .unwrap()
            .get("error")
            .unwrap()
            .contains("not Cauchy"));
        assert_eq!(
            run_args(&["fixpoint", "--x0", "1", "--variant", "T9"]).exit_code,
            2
        );
    }

    #[test]
    fn replay_round_trip() {
        for args in [
            &[
                "check-axioms",
                "--space",
                "punctured-line",
                "--samples",
                "200",
            ][..],
            &["align", "CGATC", "CAGA", "GATTACA"][..],
            &[
                "fixpoint",
                "--map",
                "linear:a=1/2,b=1",
                "--x0",
                "0",
                "--variant",
                "T6.4",
                "--r",
                "0",
                "--c",
                "1/2",
            ][..],
            &["min-check", "--lo", "0", "--hi", "10"][..],
        ] {
            let report = run_args(args).report.unwrap();
            let parsed = Report::parse(&report.render()).unwrap();
            let checks = replay_report(&parsed).unwrap();
            assert!(checks.iter().all(|(_, ok)| *ok), "{args:?}: {checks:?}");
        }
    }
}
