//! Labeled marked Petri nets with arc multiplicities, their languages under
//! any-marking and final-marking acceptance, and the structural encodings
//! between `rl-0s` systems and nets.
//!
//! The `.pn` text format:
//!
//! ```text
//! pn counter
//! places S1 Z2
//! alphabet a b                       # optional, else labels in order
//! transition t1 label a in S1:1 Z2:1 out S1:1 Z2:2
//! transition t2 label b in S1:1 Z2:1 out S1:1
//! marking S1:1 Z2:1
//! final                              # repeatable; omitted places are 0
//! ```

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::ParseError;
use crate::format::{symbol, LAMBDA};
use crate::system::{
    CompiledSystem, CtsSystem, Family, Production, Rewrite, RlGrammar, SecondGrammar, Symbol,
    SystemKind, Verdict,
};
use crate::Error;

pub type Marking = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: Symbol,
    /// `None` is λ.
    pub label: Option<usize>,
    /// Multiplicities indexed by place.
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    pub name: String,
    pub places: Vec<Symbol>,
    pub alphabet: Vec<Symbol>,
    pub transitions: Vec<Transition>,
    pub initial: Marking,
    /// `None` means any-marking acceptance is intended.
    pub finals: Option<Vec<Marking>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    AnyMarking,
    FinalMarkings,
}

/// Bound for λ-closures: markings whose token sum exceeds it abort the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PnLimits {
    pub max_marking_sum: u64,
}

impl Default for PnLimits {
    fn default() -> Self {
        PnLimits {
            max_marking_sum: 256,
        }
    }
}

impl PetriNet {
    pub fn is_lambda_free(&self) -> bool {
        self.transitions.iter().all(|t| t.label.is_some())
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.id == *id)
    }

    pub fn enabled(&self, marking: &[u32], t: usize) -> bool {
        marking
            .iter()
            .zip(&self.transitions[t].inputs)
            .all(|(m, i)| m >= i)
    }

    /// `marking - inputs + outputs` for transition index `t`.
    pub fn fire_index(&self, marking: &[u32], t: usize) -> Option<Marking> {
        if !self.enabled(marking, t) {
            return None;
        }
        let tr = &self.transitions[t];
        Some(
            marking
                .iter()
                .zip(&tr.inputs)
                .zip(&tr.outputs)
                .map(|((m, i), o)| m - i + o)
                .collect(),
        )
    }

    /// Reads a word of single-character labels (`""`/`"~"` is λ).
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, Error> {
        if text.is_empty() || text == LAMBDA {
            return Ok(Vec::new());
        }
        if let Some(long) = self.alphabet.iter().find(|a| a.as_str().chars().count() != 1) {
            return Err(Error::NeedsTokens(long.to_string()));
        }
        let mut buf = [0u8; 4];
        text.chars()
            .map(|c| {
                let s: &str = c.encode_utf8(&mut buf);
                self.alphabet
                    .iter()
                    .position(|a| a == s)
                    .ok_or_else(|| Error::WordAlphabet(s.to_string()))
            })
            .collect()
    }

    pub fn word_from_tokens<'a, I>(&self, toks: I) -> Result<Vec<usize>, Error>
    where
        I: IntoIterator<Item = &'a str>,
    {
        toks.into_iter()
            .filter(|t| *t != LAMBDA)
            .map(|t| {
                self.alphabet
                    .iter()
                    .position(|a| a == t)
                    .ok_or_else(|| Error::WordAlphabet(t.to_string()))
            })
            .collect()
    }
}

pub fn fire(net: &PetriNet, marking: &[u32], transition: &str) -> Result<Marking, Error> {
    let t = net
        .transition_index(transition)
        .ok_or_else(|| Error::NotEnabled(transition.to_string()))?;
    net.fire_index(marking, t)
        .ok_or_else(|| Error::NotEnabled(transition.to_string()))
}

fn lambda_closure(
    net: &PetriNet,
    set: BTreeSet<Marking>,
    lim: &PnLimits,
) -> Result<BTreeSet<Marking>, Error> {
    let silent: Vec<usize> = (0..net.transitions.len())
        .filter(|&t| net.transitions[t].label.is_none())
        .collect();
    if silent.is_empty() {
        return Ok(set);
    }
    let mut seen = set.clone();
    let mut stack: Vec<Marking> = set.into_iter().collect();
    while let Some(m) = stack.pop() {
        for &t in &silent {
            if let Some(next) = net.fire_index(&m, t) {
                if next.iter().map(|&k| u64::from(k)).sum::<u64>() > lim.max_marking_sum {
                    return Err(Error::LambdaClosureLimit);
                }
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
    }
    Ok(seen)
}

/// Reachable marking sets after each prefix of `word`.
pub fn marking_layers(
    net: &PetriNet,
    word: &[usize],
    semantics: Semantics,
    lim: &PnLimits,
) -> Result<Vec<BTreeSet<Marking>>, Error> {
    match semantics {
        Semantics::FinalMarkings if net.finals.is_none() => {
            return Err(Error::SemanticsMismatch(
                "final-marking semantics needs final markings",
            ))
        }
        Semantics::AnyMarking if !net.is_lambda_free() => {
            return Err(Error::SemanticsMismatch(
                "λ-transitions are only supported under final-marking semantics",
            ))
        }
        _ => {}
    }
    if let Some(&x) = word.iter().find(|&&x| x >= net.alphabet.len()) {
        return Err(Error::WordAlphabet(x.to_string()));
    }
    let mut layers = vec![lambda_closure(net, BTreeSet::from([net.initial.clone()]), lim)?];
    for &x in word {
        let prev = layers.last().expect("nonempty");
        let mut next = BTreeSet::new();
        for m in prev {
            for (t, tr) in net.transitions.iter().enumerate() {
                if tr.label == Some(x) {
                    next.extend(net.fire_index(m, t));
                }
            }
        }
        layers.push(lambda_closure(net, next, lim)?);
    }
    Ok(layers)
}

pub fn pn_member(
    net: &PetriNet,
    word: &[usize],
    semantics: Semantics,
    lim: &PnLimits,
) -> Result<Verdict, Error> {
    let layers = marking_layers(net, word, semantics, lim)?;
    let last = layers.last().expect("nonempty");
    Ok(Verdict::from_bool(match semantics {
        Semantics::AnyMarking => !last.is_empty(),
        Semantics::FinalMarkings => {
            let finals = net.finals.as_deref().unwrap_or(&[]);
            last.iter().any(|m| finals.contains(m))
        }
    }))
}

/// Encodes a `rl-0s` system whose rewrites all emit a terminal: places are
/// the RL nonterminals followed by the second-grammar nonterminals, one
/// transition per rewrite, one token on each axiom, final marking zero.
pub fn cts_to_pn(sys: &CompiledSystem) -> Result<PetriNet, Error> {
    if sys.family() != Family::ZeroSequential {
        return Err(Error::WrongFamily {
            expected: "RL_0S",
            found: sys.family(),
        });
    }
    if let Some(r) = sys.rules().iter().find(|r| r.emit.is_none()) {
        return Err(Error::NonEmittingRule(r.id.to_string()));
    }
    if let Some(clash) = sys
        .g1_nonterminals()
        .iter()
        .find(|x| sys.g2_nonterminals().contains(x))
    {
        return Err(Error::PlaceNameClash(clash.to_string()));
    }
    let l1 = sys.g1_nonterminals().len();
    let places: Vec<Symbol> = sys
        .g1_nonterminals()
        .iter()
        .chain(sys.g2_nonterminals())
        .cloned()
        .collect();
    let np = places.len();
    let transitions = sys
        .rules()
        .iter()
        .map(|r| {
            let mut inputs = vec![0u32; np];
            let mut outputs = vec![0u32; np];
            inputs[r.lhs] += 1;
            inputs[l1 + r.g2_lhs] += 1;
            if let Some(y) = r.next {
                outputs[y] += 1;
            }
            for &b in &r.g2_rhs {
                outputs[l1 + b] += 1;
            }
            Transition {
                id: r.id.clone(),
                label: r.emit,
                inputs,
                outputs,
            }
        })
        .collect();
    let mut initial = vec![0u32; np];
    initial[sys.axiom1()] = 1;
    initial[l1 + sys.axiom2()] = 1;
    Ok(PetriNet {
        name: sys.name().to_string(),
        places,
        alphabet: sys.terminals().to_vec(),
        transitions,
        initial,
        finals: Some(vec![vec![0; np]]),
    })
}

fn fresh(taken: &BTreeSet<String>, base: &str) -> Symbol {
    let mut name = base.to_string();
    let mut k = 0;
    while taken.contains(&name) {
        k += 1;
        name = format!("{base}_{k}");
    }
    Symbol::new(&name).expect("identifier")
}

/// Inverse encoding for nets with a single initial token, one unit input per
/// transition and the zero marking as the only final marking.
pub fn pn_to_cts(net: &PetriNet) -> Result<CtsSystem, Error> {
    if net.initial.iter().sum::<u32>() != 1 {
        return Err(Error::MultiTokenStart);
    }
    if let Some(t) = net.transitions.iter().find(|t| t.label.is_none()) {
        return Err(Error::LambdaTransition(t.id.to_string()));
    }
    if let Some(t) = net.transitions.iter().find(|t| t.inputs.iter().sum::<u32>() != 1) {
        return Err(Error::MultiInputTransition(t.id.to_string()));
    }
    match &net.finals {
        Some(f) if !f.is_empty() && f.iter().all(|m| m.iter().all(|&k| k == 0)) => {}
        _ => return Err(Error::NonZeroFinal),
    }

    let mut taken: BTreeSet<String> = net
        .alphabet
        .iter()
        .chain(&net.places)
        .map(|s| s.to_string())
        .collect();
    let s1 = fresh(&taken, "S1");
    taken.insert(s1.to_string());
    let marked = net.initial.iter().position(|&k| k == 1).expect("one token");

    let mut p1: Vec<Production> = Vec::new();
    let mut p2: Vec<Production> = Vec::new();
    let intern = |list: &mut Vec<Production>, p: Production| match list.iter().position(|q| *q == p) {
        Some(i) => i,
        None => {
            list.push(p);
            list.len() - 1
        }
    };
    let mut ids: BTreeSet<String> = BTreeSet::new();
    let mut rewrites = Vec::new();
    for t in &net.transitions {
        let a = net.alphabet[t.label.expect("λ-free")].clone();
        let input = t.inputs.iter().position(|&k| k == 1).expect("one input");
        let beta: Vec<Symbol> = t
            .outputs
            .iter()
            .enumerate()
            .flat_map(|(p, &k)| core::iter::repeat(net.places[p].clone()).take(k as usize))
            .collect();
        let g2 = intern(
            &mut p2,
            Production {
                lhs: net.places[input].clone(),
                rhs: beta,
            },
        );
        for (suffix, rhs) in [
            ("more", vec![a.clone(), s1.clone()]),
            ("last", vec![a.clone()]),
        ] {
            let g1 = intern(
                &mut p1,
                Production {
                    lhs: s1.clone(),
                    rhs,
                },
            );
            let id = fresh(&ids, &format!("{}_{suffix}", t.id));
            ids.insert(id.to_string());
            rewrites.push(Rewrite { id, g1, g2 });
        }
    }

    Ok(CtsSystem {
        name: net.name.clone(),
        g1: RlGrammar {
            terminals: net.alphabet.clone(),
            nonterminals: vec![s1.clone()],
            axiom: s1,
            productions: p1,
        },
        g2: SecondGrammar {
            kind: SystemKind::ZeroSequential,
            nonterminals: net.places.clone(),
            axiom: net.places[marked].clone(),
            productions: p2,
        },
        rewrites,
    })
}

fn syntax(line: usize, message: &str) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.to_string(),
    }
}

fn weighted(line: usize, toks: &[String], places: &[Symbol]) -> Result<Marking, ParseError> {
    let mut m = vec![0u32; places.len()];
    let mut seen = BTreeSet::new();
    for tok in toks {
        let (name, k) = tok
            .split_once(':')
            .ok_or_else(|| syntax(line, "expected `place:count`"))?;
        let p = places
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ParseError::UnknownSymbol {
                line,
                name: name.to_string(),
                context: "place",
            })?;
        if !seen.insert(p) {
            return Err(syntax(line, "place listed twice"));
        }
        m[p] = k
            .parse()
            .map_err(|_| syntax(line, "count must be a natural number"))?;
    }
    Ok(m)
}

struct RawTransition {
    line: usize,
    id: Symbol,
    label: Option<Symbol>,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

pub fn parse_pn(text: &str) -> Result<PetriNet, ParseError> {
    let mut name: Option<String> = None;
    let mut places: Option<Vec<Symbol>> = None;
    let mut alphabet: Option<Vec<Symbol>> = None;
    let mut raws: Vec<RawTransition> = Vec::new();
    let mut marking: Option<(usize, Vec<String>)> = None;
    let mut finals: Vec<(usize, Vec<String>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        // `:` is part of `place:count` here, so split on whitespace only
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        let Some((head, rest)) = toks.split_first() else {
            continue;
        };
        if name.is_none() && head != "pn" {
            return Err(syntax(line, "the first directive must be `pn <name>`"));
        }
        match head.as_str() {
            "pn" => match rest {
                [n] if name.is_none() => name = Some(n.clone()),
                _ => return Err(syntax(line, "expected a single `pn <name>`")),
            },
            "places" | "alphabet" => {
                let list = rest
                    .iter()
                    .map(|t| symbol(line, t))
                    .collect::<Result<Vec<_>, _>>()?;
                let slot = if head == "places" {
                    &mut places
                } else {
                    &mut alphabet
                };
                if slot.replace(list).is_some() {
                    return Err(syntax(line, "directive given twice"));
                }
            }
            "transition" => {
                let bad = || syntax(line, "expected `transition <id> label <sym|~> in ... out ...`");
                let [id, kw_label, label, kw_in, tail @ ..] = rest else {
                    return Err(bad());
                };
                if kw_label != "label" || kw_in != "in" {
                    return Err(bad());
                }
                let out_at = tail.iter().position(|t| t == "out").ok_or_else(bad)?;
                let label = if label == LAMBDA {
                    None
                } else {
                    Some(symbol(line, label)?)
                };
                raws.push(RawTransition {
                    line,
                    id: symbol(line, id)?,
                    label,
                    inputs: tail[..out_at].to_vec(),
                    outputs: tail[out_at + 1..].to_vec(),
                });
            }
            "marking" => {
                if marking.replace((line, rest.to_vec())).is_some() {
                    return Err(syntax(line, "`marking` given twice"));
                }
            }
            "final" => finals.push((line, rest.to_vec())),
            other => return Err(syntax(line, &format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or(ParseError::MissingSection("pn"))?;
    let places = places.ok_or(ParseError::MissingSection("places"))?;
    let (mline, mtoks) = marking.ok_or(ParseError::MissingSection("marking"))?;
    let initial = weighted(mline, &mtoks, &places)?;
    let declared = alphabet.is_some();
    let mut alphabet = alphabet.unwrap_or_default();
    let mut transitions: Vec<Transition> = Vec::new();
    for r in raws {
        if transitions.iter().any(|t| t.id == r.id) {
            return Err(syntax(r.line, "duplicate transition id"));
        }
        let label = match r.label {
            None => None,
            Some(l) => Some(match alphabet.iter().position(|a| *a == l) {
                Some(i) => i,
                None if declared => {
                    return Err(ParseError::UnknownSymbol {
                        line: r.line,
                        name: l.to_string(),
                        context: "label not in alphabet",
                    })
                }
                None => {
                    alphabet.push(l);
                    alphabet.len() - 1
                }
            }),
        };
        transitions.push(Transition {
            id: r.id,
            label,
            inputs: weighted(r.line, &r.inputs, &places)?,
            outputs: weighted(r.line, &r.outputs, &places)?,
        });
    }
    let finals = if finals.is_empty() {
        None
    } else {
        Some(
            finals
                .iter()
                .map(|(line, toks)| weighted(*line, toks, &places))
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    Ok(PetriNet {
        name,
        places,
        alphabet,
        transitions,
        initial,
        finals,
    })
}

fn render_weights(out: &mut String, places: &[Symbol], m: &[u32]) {
    for (p, &k) in places.iter().zip(m) {
        if k > 0 {
            let _ = write!(out, " {p}:{k}");
        }
    }
}

pub fn render_pn(net: &PetriNet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pn {}", net.name);
    out.push_str("places");
    for p in &net.places {
        let _ = write!(out, " {p}");
    }
    out.push_str("\nalphabet");
    for a in &net.alphabet {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for t in &net.transitions {
        let label = t.label.map_or(LAMBDA, |l| net.alphabet[l].as_str());
        let _ = write!(out, "transition {} label {label} in", t.id);
        render_weights(&mut out, &net.places, &t.inputs);
        out.push_str(" out");
        render_weights(&mut out, &net.places, &t.outputs);
        out.push('\n');
    }
    out.push_str("marking");
    render_weights(&mut out, &net.places, &net.initial);
    out.push('\n');
    for f in net.finals.iter().flatten() {
        out.push_str("final");
        render_weights(&mut out, &net.places, f);
        out.push('\n');
    }
    out
}
