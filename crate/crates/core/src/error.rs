use alloc::string::String;

use thiserror::Error;

use crate::system::{Family, ValidationReport};

/// Errors from the `.cts` and `.pn` text codecs. Line numbers are 1-based.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown symbol `{name}` ({context})")]
    UnknownSymbol {
        line: usize,
        name: String,
        context: &'static str,
    },
    #[error("line {line}: duplicate rewrite id `{id}`")]
    DuplicateRewriteId { line: usize, id: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
}

/// Why a single derivation step cannot fire.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("the RL component has no nonterminal left to rewrite")]
    G1Blocked,
    #[error("rewrite `{0}` does not rewrite the active RL nonterminal")]
    G1LhsMismatch(String),
    #[error("the second sentential form is empty")]
    G2Empty,
    #[error("left-hand side of rewrite `{0}` does not occur in the second sentential form")]
    G2SymbolAbsent(String),
    #[error("left-hand side of rewrite `{0}` is not the rightmost symbol")]
    G2RightmostMismatch(String),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(ValidationReport),
    #[error("unknown rewrite `{0}`")]
    UnknownRewrite(String),
    #[error("wrong system family: expected {expected}, found {found}")]
    WrongFamily {
        expected: &'static str,
        found: Family,
    },
    #[error("system is not real-time (it has chain rules)")]
    NotRealTime,
    #[error("system is not 0-sequential")]
    NotZeroSequential,
    #[error("symbol `{0}` is not in the terminal alphabet")]
    WordAlphabet(String),
    #[error("word must be given as tokens: terminal `{0}` is longer than one character")]
    NeedsTokens(String),
    #[error("step failed: {0}")]
    Step(#[from] StepError),
    #[error("rewrite `{0}` emits no terminal")]
    NonEmittingRule(String),
    #[error("symbol `{0}` names both an RL nonterminal and a second-grammar nonterminal")]
    PlaceNameClash(String),
    #[error("transition `{0}` does not have exactly one input place of multiplicity 1")]
    MultiInputTransition(String),
    #[error("initial marking is not a single token")]
    MultiTokenStart,
    #[error("final markings must be exactly the zero marking")]
    NonZeroFinal,
    #[error("transition `{0}` is labeled λ")]
    LambdaTransition(String),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("semantics mismatch: {0}")]
    SemanticsMismatch(&'static str),
    #[error("λ-closure exceeded the marking-size cap before a verdict was reached")]
    LambdaClosureLimit,
    #[error("rewrite `{0}` matches no ψ-type")]
    UnclassifiableRewrite(String),
    #[error("terminal `{0}` has no producing rewrite")]
    UnproducibleTerminal(String),
}
