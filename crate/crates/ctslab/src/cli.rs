//! The `ctslab` command line.
//!
//! Exit codes: 0 accepted or success, 1 rejected (or a crosscheck
//! disagreement), 2 usage, parse or validation error, 3 inconclusive.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use ctslab_core::counter::{build_state_diagram, counter_member};
use ctslab_core::format::LAMBDA;
use ctslab_core::onestate::{
    classify_psi, detect_case, fast_member, p8_sequence_check, segment_profile,
    terminal_partition, SegmentKind,
};
use ctslab_core::oracle::{
    oracle_member, words_up_to, LimitPolicy, OracleLimits, OracleStatus, DEFAULT_MAX_FRONTIER,
};
use ctslab_core::parikh::recognize_rt_0s;
use ctslab_core::petri::{cts_to_pn, pn_member, render_pn, PnLimits, Semantics};
use ctslab_core::{CompiledSystem, Error, Family, Verdict};
use thiserror::Error;

use crate::dot::{diagram_json, diagram_to_dot};
use crate::io::{load_compiled, load_net, load_system, read_word_tokens, write_text, IoError};
use crate::report::{
    ClassifyReport, EnumerationReport, Partition, RewriteInfo, RunReport, SegmentInfo,
    SegmentReport,
};

pub const MAX_FRONTIER_VAR: &str = "CTSLAB_MAX_FRONTIER";

#[derive(Parser, Debug)]
#[command(name = "ctslab", version, about = "Two-component cts systems: membership, enumeration, diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct WordArgs {
    /// Word as concatenated single-character terminals, or tokens separated
    /// by spaces; `~` or "" is the empty word
    #[arg(long, allow_hyphen_values = true, conflicts_with = "word_file")]
    word: Option<String>,
    /// File holding the word as whitespace-separated terminal tokens
    #[arg(long)]
    word_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a system against the well-formedness rules
    Validate { file: PathBuf },
    /// Print family, ψ-profile, case, terminal partition and segments as JSON
    Classify {
        file: PathBuf,
        #[command(flatten)]
        word: WordArgs,
    },
    /// Decide membership of one word
    Member {
        file: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        /// Print the rewrite ids of an accepting derivation
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        json: bool,
        /// Counter cap for the counter recognizer
        #[arg(long)]
        cap: Option<u64>,
    },
    /// List the accepted words up to a length, in length-lexicographic order
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, value_enum, default_value_t = Algo::Oracle)]
        algo: Algo,
        #[arg(long)]
        json: bool,
    },
    /// Export the state diagram of a counter system with a bottom marker
    Diagram {
        file: PathBuf,
        /// DOT output path; stdout when neither --dot nor --json is given
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Translate an rl-0s system into a Petri net
    ToPn {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decide membership in the language of a Petri net
    PnMember {
        file: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, value_enum)]
        semantics: SemanticsArg,
    },
    /// Run every applicable recognizer on every word up to a length
    Crosscheck {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Auto,
    Oracle,
    Parikh,
    Counter,
    Fast,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Auto => "auto",
            Algo::Oracle => "oracle",
            Algo::Parikh => "parikh",
            Algo::Counter => "counter",
            Algo::Fast => "fast",
        }
    }

    /// Fast path for one-state shapes, Parikh layers for real-time rl-0s,
    /// the counter search for counter shapes, the oracle otherwise.
    pub fn resolve(self, sys: &CompiledSystem) -> Algo {
        if self != Algo::Auto {
            return self;
        }
        let family = sys.family();
        if family.is_one_state() {
            Algo::Fast
        } else if family == Family::ZeroSequential && sys.is_real_time() {
            Algo::Parikh
        } else if family.is_counter() {
            Algo::Counter
        } else {
            Algo::Oracle
        }
    }

    /// Algorithms with a defined result on `sys`, oracle first.
    pub fn applicable(sys: &CompiledSystem) -> Vec<Algo> {
        let family = sys.family();
        let mut v = vec![Algo::Oracle];
        if family == Family::ZeroSequential && sys.is_real_time() {
            v.push(Algo::Parikh);
        }
        if family.is_counter() {
            v.push(Algo::Counter);
        }
        if family.is_one_state() {
            v.push(Algo::Fast);
        }
        v
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SemanticsArg {
    Any,
    Final,
}

#[derive(Error, Debug)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

/// Result of one membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Decided(Verdict),
    Inconclusive(&'static str),
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Decided(Verdict::Accepted) => "accepted",
            Outcome::Decided(Verdict::Rejected) => "rejected",
            Outcome::Inconclusive(_) => "inconclusive",
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Outcome::Decided(Verdict::Accepted) => 0,
            Outcome::Decided(Verdict::Rejected) => 1,
            Outcome::Inconclusive(_) => 3,
        }
    }
}

/// Oracle limits, with the frontier cap taken from `CTSLAB_MAX_FRONTIER`.
pub fn limit_policy() -> Result<LimitPolicy, CliError> {
    match std::env::var(MAX_FRONTIER_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(LimitPolicy::DefaultWithFrontier)
            .map_err(|_| CliError::Usage(format!("{MAX_FRONTIER_VAR}: `{v}` is not a number"))),
        Err(_) => Ok(LimitPolicy::DefaultWithFrontier(DEFAULT_MAX_FRONTIER)),
    }
}

/// Runs `algo` (already resolved) on `word`. The fast path reports its case
/// in the returned label.
pub fn decide(
    sys: &CompiledSystem,
    word: &[usize],
    algo: Algo,
    lim: &OracleLimits,
    cap: Option<u64>,
) -> Result<(Outcome, String), CliError> {
    Ok(match algo {
        Algo::Auto => return decide(sys, word, algo.resolve(sys), lim, cap),
        Algo::Oracle => {
            let v = oracle_member(sys, word, lim);
            let o = match v.status {
                OracleStatus::Accepted => Outcome::Decided(Verdict::Accepted),
                OracleStatus::Rejected => Outcome::Decided(Verdict::Rejected),
                OracleStatus::Inconclusive(hit) => Outcome::Inconclusive(hit.as_str()),
            };
            (o, "oracle".to_string())
        }
        Algo::Parikh => (Outcome::Decided(recognize_rt_0s(sys, word)?), "parikh".into()),
        Algo::Counter => (Outcome::Decided(counter_member(sys, word, cap)?), "counter".into()),
        Algo::Fast => {
            let r = fast_member(sys, word)?;
            let label = if r.is_delegated() {
                format!("fast:{}:delegated", r.case.label())
            } else {
                format!("fast:{}", r.case.label())
            };
            (Outcome::Decided(r.verdict()), label)
        }
    })
}

fn read_word(sys: &CompiledSystem, w: &WordArgs) -> Result<Vec<usize>, CliError> {
    match (&w.word, &w.word_file) {
        (_, Some(p)) => {
            let toks = read_word_tokens(p)?;
            Ok(sys.word_from_tokens(toks.iter().map(String::as_str))?)
        }
        (Some(text), None) if text.split_whitespace().count() > 1 => {
            Ok(sys.word_from_tokens(text.split_whitespace())?)
        }
        (Some(text), None) => Ok(sys.parse_word(text.trim())?),
        (None, None) => Err(CliError::Usage("one of --word or --word-file is required".into())),
    }
}

fn shown(sys: &CompiledSystem, w: &[usize]) -> String {
    if w.is_empty() {
        LAMBDA.to_string()
    } else {
        sys.render_word(w)
    }
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (program name first) and runs the subcommand.
pub fn run_cli<S: AsRef<str>>(args: &[S], out: Out, err: Out) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', " "));
            2
        }
    }
}

fn dispatch(cmd: Command, out: Out) -> Result<i32, CliError> {
    match cmd {
        Command::Validate { file } => validate(&file, out),
        Command::Classify { file, word } => classify(&file, &word, out),
        Command::Member {
            file,
            word,
            algo,
            witness,
            json,
            cap,
        } => member(&file, &word, algo, witness, json, cap, out),
        Command::Enumerate {
            file,
            max_len,
            algo,
            json,
        } => enumerate(&file, max_len, algo, json, out),
        Command::Diagram { file, dot, json } => diagram(&file, dot, json, out),
        Command::ToPn { file, output } => to_pn(&file, &output, out),
        Command::PnMember {
            file,
            word,
            semantics,
        } => pn_membership(&file, &word, semantics, out),
        Command::Crosscheck { file, max_len } => crosscheck(&file, max_len, out),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Usage(format!("cannot write output: {e}"))
}

fn validate(file: &Path, out: Out) -> Result<i32, CliError> {
    let sys = load_system(file)?;
    let report = sys.validate();
    if !report.is_valid() {
        return Err(Error::InvalidSystem(report).into());
    }
    let shape = sys.classify_shape()?;
    writeln!(
        out,
        "valid: {} {} ({}real-time, {} rewrites)",
        sys.name,
        shape.family,
        if shape.real_time { "" } else { "not " },
        sys.rewrites.len()
    )
    .map_err(io_err)?;
    Ok(0)
}

fn classify(file: &Path, w: &WordArgs, out: Out) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let word = match (&w.word, &w.word_file) {
        (None, None) => None,
        _ => Some(read_word(&sys, w)?),
    };
    let name = |t: usize| sys.terminals()[t].to_string();
    let profile = if sys.family().is_one_state() {
        Some(classify_psi(&sys)?)
    } else {
        None
    };
    let rewrites = sys
        .rules()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let g1 = match (r.emit, r.next) {
                (None, None) => LAMBDA.to_string(),
                (e, n) => e
                    .map(name)
                    .into_iter()
                    .chain(n.map(|n| sys.g1_nonterminals()[n].to_string()))
                    .collect::<Vec<_>>()
                    .join(" "),
            };
            let g2 = if r.g2_rhs.is_empty() {
                LAMBDA.to_string()
            } else {
                r.g2_rhs
                    .iter()
                    .map(|&b| sys.g2_nonterminals()[b].to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            RewriteInfo {
                id: r.id.to_string(),
                g1: format!("{} -> {g1}", sys.g1_nonterminals()[r.lhs]),
                g2: format!("{} -> {g2}", sys.g2_nonterminals()[r.g2_lhs]),
                net_effect: r.effect.as_slice().to_vec(),
                psi: profile.as_ref().map(|p| p.per_rewrite[i].1.label().to_string()),
            }
        })
        .collect();
    let names = |set: &std::collections::BTreeSet<usize>| set.iter().map(|&t| name(t)).collect();
    let mut report = ClassifyReport {
        system: sys.name().to_string(),
        kind: sys.kind().as_str().to_string(),
        family: sys.family().label().to_string(),
        real_time: sys.is_real_time(),
        g1_nonterminals: sys.g1_nonterminals().len(),
        g2_nonterminals: sys.g2_nonterminals().len(),
        rewrites,
        producers: None,
        partition: None,
        word: word.as_ref().map(|w| shown(&sys, w)),
        case: None,
        segments: None,
    };
    if let Some(p) = &profile {
        report.producers = Some(
            p.producers
                .iter()
                .enumerate()
                .map(|(t, ks)| (name(t), ks.iter().map(|k| k.label().to_string()).collect()))
                .collect(),
        );
        let part = terminal_partition(p);
        report.partition = Some(Partition {
            i: names(&part.i),
            h: names(&part.h),
            l: names(&part.l),
        });
        if let Some(w) = &word {
            report.case = Some(detect_case(p, w).label().to_string());
            report.segments = segment_profile(p, w).ok().map(|sp| SegmentReport {
                segments: sp
                    .decomposition
                    .iter()
                    .map(|s| SegmentInfo {
                        kind: match s.kind {
                            SegmentKind::Alpha => "alpha",
                            SegmentKind::Beta => "beta",
                        }
                        .to_string(),
                        start: s.start,
                        len: s.len,
                        text: sys.render_word(&w[s.start..s.start + s.len]),
                    })
                    .collect(),
                eta3: sp.eta3.clone(),
                eta5: sp.eta5.clone(),
                sequence_check: p8_sequence_check(&sp),
            });
        }
    }
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    writeln!(out, "{text}").map_err(io_err)?;
    Ok(0)
}

fn member(
    file: &Path,
    w: &WordArgs,
    algo: Algo,
    want_witness: bool,
    json: bool,
    cap: Option<u64>,
    out: Out,
) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let word = read_word(&sys, w)?;
    let lim = limit_policy()?.resolve(word.len());
    let algo = algo.resolve(&sys);
    let start = Instant::now();
    let (outcome, label) = decide(&sys, &word, algo, &lim, cap)?;
    let mut witness = None;
    if want_witness && outcome == Outcome::Decided(Verdict::Accepted) {
        witness = oracle_member(&sys, &word, &lim).witness;
    }
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    let witness: Option<Vec<String>> =
        witness.map(|ids| ids.iter().map(|s| s.to_string()).collect());
    if json {
        let report = RunReport {
            command: "member".into(),
            system: sys.name().to_string(),
            word: shown(&sys, &word),
            verdict: outcome.as_str().into(),
            algorithm: label,
            witness,
            timing_ms,
            limits_hit: match outcome {
                Outcome::Inconclusive(hit) => Some(hit.to_string()),
                _ => None,
            },
        };
        let text = serde_json::to_string(&report).expect("serializable");
        writeln!(out, "{text}").map_err(io_err)?;
    } else {
        match &outcome {
            Outcome::Inconclusive(hit) => writeln!(out, "inconclusive ({hit} limit) [{label}]"),
            o => writeln!(out, "{} [{label}]", o.as_str()),
        }
        .map_err(io_err)?;
        if let Some(ids) = &witness {
            writeln!(out, "witness: {}", ids.join(" ")).map_err(io_err)?;
        } else if want_witness && outcome == Outcome::Decided(Verdict::Accepted) {
            writeln!(out, "witness: not found within the oracle limits").map_err(io_err)?;
        }
    }
    Ok(outcome.exit_code())
}

fn enumerate(file: &Path, max_len: usize, algo: Algo, json: bool, out: Out) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let policy = limit_policy()?;
    let algo = algo.resolve(&sys);
    let mut words = Vec::new();
    let mut inconclusive = Vec::new();
    for w in words_up_to(sys.terminals().len(), max_len) {
        match decide(&sys, &w, algo, &policy.resolve(w.len()), None)?.0 {
            Outcome::Decided(Verdict::Accepted) => words.push(shown(&sys, &w)),
            Outcome::Decided(Verdict::Rejected) => {}
            Outcome::Inconclusive(_) => inconclusive.push(shown(&sys, &w)),
        }
    }
    if json {
        let report = EnumerationReport {
            system: sys.name().to_string(),
            max_len,
            algorithm: algo.as_str().to_string(),
            words,
            inconclusive: inconclusive.clone(),
        };
        let text = serde_json::to_string(&report).expect("serializable");
        writeln!(out, "{text}").map_err(io_err)?;
    } else {
        for w in &words {
            writeln!(out, "{w}").map_err(io_err)?;
        }
        for w in &inconclusive {
            writeln!(out, "? {w}").map_err(io_err)?;
        }
    }
    Ok(if inconclusive.is_empty() { 0 } else { 3 })
}

fn diagram(file: &Path, dot: Option<PathBuf>, json: Option<PathBuf>, out: Out) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let d = build_state_diagram(&sys)?;
    let text = diagram_to_dot(&d);
    match &dot {
        Some(p) => write_text(p, &text)?,
        None if json.is_none() => write!(out, "{text}").map_err(io_err)?,
        None => {}
    }
    if let Some(p) = &json {
        let j = serde_json::to_string_pretty(&diagram_json(&d)).expect("serializable");
        write_text(p, &(j + "\n"))?;
    }
    Ok(0)
}

fn to_pn(file: &Path, output: &Path, out: Out) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let net = cts_to_pn(&sys)?;
    write_text(output, &render_pn(&net))?;
    writeln!(
        out,
        "wrote {} ({} places, {} transitions)",
        output.display(),
        net.places.len(),
        net.transitions.len()
    )
    .map_err(io_err)?;
    Ok(0)
}

fn pn_membership(file: &Path, w: &WordArgs, semantics: SemanticsArg, out: Out) -> Result<i32, CliError> {
    let net = load_net(file)?;
    let word = match (&w.word, &w.word_file) {
        (_, Some(p)) => {
            let toks = read_word_tokens(p)?;
            net.word_from_tokens(toks.iter().map(String::as_str))?
        }
        (Some(text), None) if text.split_whitespace().count() > 1 => {
            net.word_from_tokens(text.split_whitespace())?
        }
        (Some(text), None) => net.parse_word(text.trim())?,
        (None, None) => {
            return Err(CliError::Usage("one of --word or --word-file is required".into()))
        }
    };
    let semantics = match semantics {
        SemanticsArg::Any => Semantics::AnyMarking,
        SemanticsArg::Final => Semantics::FinalMarkings,
    };
    let outcome = match pn_member(&net, &word, semantics, &PnLimits::default()) {
        Ok(v) => Outcome::Decided(v),
        Err(Error::LambdaClosureLimit) => Outcome::Inconclusive("marking-size"),
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "{}", outcome.as_str()).map_err(io_err)?;
    Ok(outcome.exit_code())
}

fn crosscheck(file: &Path, max_len: usize, out: Out) -> Result<i32, CliError> {
    let sys = load_compiled(file)?;
    let policy = limit_policy()?;
    let algos = Algo::applicable(&sys);
    let mut checked = 0usize;
    let mut skipped = 0usize;
    for w in words_up_to(sys.terminals().len(), max_len) {
        let lim = policy.resolve(w.len());
        let mut results = Vec::with_capacity(algos.len());
        for &a in &algos {
            results.push(decide(&sys, &w, a, &lim, None)?);
        }
        let decided: Vec<_> = results
            .iter()
            .filter_map(|(o, label)| match o {
                Outcome::Decided(v) => Some((*v, label)),
                Outcome::Inconclusive(_) => None,
            })
            .collect();
        if decided.len() < results.len() {
            skipped += 1;
        }
        if decided.windows(2).any(|p| p[0].0 != p[1].0) {
            let detail: Vec<String> = results
                .iter()
                .map(|(o, label)| format!("{label}={}", o.as_str()))
                .collect();
            writeln!(out, "DISAGREE word={} {}", shown(&sys, &w), detail.join(" "))
                .map_err(io_err)?;
            return Ok(1);
        }
        checked += 1;
    }
    let names: Vec<&str> = algos.iter().map(|a| a.as_str()).collect();
    writeln!(out, "ALL-AGREE").map_err(io_err)?;
    writeln!(
        out,
        "words={checked} algorithms={} oracle-inconclusive={skipped}",
        names.join(",")
    )
    .map_err(io_err)?;
    Ok(0)
}
