//! The `.cts` text format.
//!
//! ```text
//! # comment
//! system ex51
//! type rl-rb
//! g1.terminals a b
//! g1.nonterminals S1 X        # first is the axiom unless g1.axiom is given
//! g2.nonterminals Z2
//! g2.axiom Z2                 # optional, defaults to the first nonterminal
//! rewrite r1 : S1 -> a S1 ; Z2 -> Z2 Z2
//! rewrite r2 : S1 -> X ; Z2 -> ~
//! ```
//!
//! `~` is λ. `:`, `;` and `->` need not be surrounded by spaces.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::ParseError;
use crate::system::{
    CtsSystem, Production, Rewrite, RlGrammar, SecondGrammar, Symbol, SystemKind,
};

pub const LAMBDA: &str = "~";

pub(crate) fn tokens(line: &str) -> Vec<String> {
    let body = line.split('#').next().unwrap_or("");
    let spaced = body
        .replace("->", " -> ")
        .replace(':', " : ")
        .replace(';', " ; ");
    spaced.split_whitespace().map(str::to_string).collect()
}

pub(crate) fn symbol(line: usize, tok: &str) -> Result<Symbol, ParseError> {
    Symbol::new(tok).ok_or_else(|| ParseError::Syntax {
        line,
        message: alloc::format!("`{tok}` is not a valid symbol"),
    })
}

fn syntax(line: usize, message: &str) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.to_string(),
    }
}

fn symbols(line: usize, toks: &[String]) -> Result<Vec<Symbol>, ParseError> {
    toks.iter().map(|t| symbol(line, t)).collect()
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, what: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::Syntax {
            line,
            message: alloc::format!("`{what}` given twice"),
        });
    }
    *slot = Some(value);
    Ok(())
}

struct RawRewrite {
    line: usize,
    id: String,
    lhs1: String,
    rhs1: Vec<String>,
    lhs2: String,
    rhs2: Vec<String>,
}

/// Splits `LHS -> rhs…` into its parts; `~` alone is λ.
fn production_tokens(line: usize, toks: &[String]) -> Result<(String, Vec<String>), ParseError> {
    match toks {
        [lhs, arrow, rhs @ ..] if arrow == "->" => {
            if rhs.is_empty() {
                return Err(syntax(line, "empty right side (write `~` for λ)"));
            }
            if rhs.len() == 1 && rhs[0] == LAMBDA {
                return Ok((lhs.clone(), Vec::new()));
            }
            if rhs.iter().any(|t| t == LAMBDA) {
                return Err(syntax(line, "`~` must stand alone"));
            }
            Ok((lhs.clone(), rhs.to_vec()))
        }
        _ => Err(syntax(line, "expected `LHS -> RHS`")),
    }
}

fn parse_rewrite(line: usize, rest: &[String]) -> Result<RawRewrite, ParseError> {
    let [id, colon, body @ ..] = rest else {
        return Err(syntax(line, "expected `rewrite <id> : ...`"));
    };
    if colon != ":" {
        return Err(syntax(line, "expected `:` after the rewrite id"));
    }
    symbol(line, id)?;
    let semi = body
        .iter()
        .position(|t| t == ";")
        .ok_or_else(|| syntax(line, "expected `;` between the two productions"))?;
    let (lhs1, rhs1) = production_tokens(line, &body[..semi])?;
    let (lhs2, rhs2) = production_tokens(line, &body[semi + 1..])?;
    Ok(RawRewrite {
        line,
        id: id.clone(),
        lhs1,
        rhs1,
        lhs2,
        rhs2,
    })
}

fn intern(list: &mut Vec<Production>, p: Production) -> usize {
    match list.iter().position(|q| *q == p) {
        Some(i) => i,
        None => {
            list.push(p);
            list.len() - 1
        }
    }
}

pub fn parse_system(text: &str) -> Result<CtsSystem, ParseError> {
    let mut name = None;
    let mut kind = None;
    let mut terminals: Option<Vec<Symbol>> = None;
    let mut nts1: Option<Vec<Symbol>> = None;
    let mut axiom1 = None;
    let mut nts2: Option<Vec<Symbol>> = None;
    let mut axiom2 = None;
    let mut raws = Vec::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw_line);
        let Some((head, rest)) = toks.split_first() else {
            continue;
        };
        if name.is_none() && head != "system" {
            return Err(syntax(line, "the first directive must be `system <name>`"));
        }
        match head.as_str() {
            "system" => match rest {
                [n] => set_once(&mut name, n.clone(), line, "system")?,
                _ => return Err(syntax(line, "expected `system <name>`")),
            },
            "type" => {
                let k = match rest {
                    [t] if t == "rl-0s" => SystemKind::ZeroSequential,
                    [t] if t == "rl-rb" => SystemKind::RightBoundary,
                    _ => return Err(syntax(line, "expected `type rl-0s` or `type rl-rb`")),
                };
                set_once(&mut kind, k, line, "type")?;
            }
            "g1.terminals" => set_once(&mut terminals, symbols(line, rest)?, line, head)?,
            "g1.nonterminals" => set_once(&mut nts1, symbols(line, rest)?, line, head)?,
            "g2.nonterminals" => set_once(&mut nts2, symbols(line, rest)?, line, head)?,
            "g1.axiom" | "g2.axiom" => {
                let [a] = rest else {
                    return Err(syntax(line, "expected exactly one axiom"));
                };
                let a = symbol(line, a)?;
                if head == "g1.axiom" {
                    set_once(&mut axiom1, (line, a), line, head)?;
                } else {
                    set_once(&mut axiom2, (line, a), line, head)?;
                }
            }
            "rewrite" => raws.push(parse_rewrite(line, rest)?),
            other => {
                return Err(ParseError::Syntax {
                    line,
                    message: alloc::format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let name = name.ok_or(ParseError::MissingSection("system"))?;
    let kind = kind.ok_or(ParseError::MissingSection("type"))?;
    let terminals = terminals.ok_or(ParseError::MissingSection("g1.terminals"))?;
    let nts1 = nts1.ok_or(ParseError::MissingSection("g1.nonterminals"))?;
    let nts2 = nts2.ok_or(ParseError::MissingSection("g2.nonterminals"))?;
    let resolve_axiom = |given: Option<(usize, Symbol)>, nts: &[Symbol], section| match given {
        Some((line, a)) if !nts.contains(&a) => Err(ParseError::UnknownSymbol {
            line,
            name: a.to_string(),
            context: "axiom",
        }),
        Some((_, a)) => Ok(a),
        None => nts.first().cloned().ok_or(ParseError::MissingSection(section)),
    };
    let axiom1 = resolve_axiom(axiom1, &nts1, "g1.nonterminals")?;
    let axiom2 = resolve_axiom(axiom2, &nts2, "g2.nonterminals")?;
    if raws.is_empty() {
        return Err(ParseError::MissingSection("rewrites"));
    }

    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut rewrites: Vec<Rewrite> = Vec::new();
    for r in raws {
        let line = r.line;
        let unknown = |name: &str, context| ParseError::UnknownSymbol {
            line,
            name: name.to_string(),
            context,
        };
        let id = symbol(line, &r.id)?;
        if rewrites.iter().any(|x| x.id == id) {
            return Err(ParseError::DuplicateRewriteId { line, id: r.id });
        }
        let lhs1 = symbol(line, &r.lhs1)?;
        if !nts1.contains(&lhs1) {
            return Err(unknown(&r.lhs1, "g1 left side must be a g1 nonterminal"));
        }
        let mut rhs1 = Vec::new();
        for t in &r.rhs1 {
            let s = symbol(line, t)?;
            if !terminals.contains(&s) && !nts1.contains(&s) {
                return Err(unknown(t, "g1 right side"));
            }
            rhs1.push(s);
        }
        let lhs2 = symbol(line, &r.lhs2)?;
        if !nts2.contains(&lhs2) {
            return Err(unknown(&r.lhs2, "g2 left side must be a g2 nonterminal"));
        }
        let mut rhs2 = Vec::new();
        for t in &r.rhs2 {
            let s = symbol(line, t)?;
            if !nts2.contains(&s) {
                return Err(unknown(t, "g2 right side must use g2 nonterminals"));
            }
            rhs2.push(s);
        }
        let g1 = intern(&mut p1, Production { lhs: lhs1, rhs: rhs1 });
        let g2 = intern(&mut p2, Production { lhs: lhs2, rhs: rhs2 });
        rewrites.push(Rewrite { id, g1, g2 });
    }

    Ok(CtsSystem {
        name,
        g1: RlGrammar {
            terminals,
            nonterminals: nts1,
            axiom: axiom1,
            productions: p1,
        },
        g2: SecondGrammar {
            kind,
            nonterminals: nts2,
            axiom: axiom2,
            productions: p2,
        },
        rewrites,
    })
}

fn join(out: &mut String, head: &str, list: &[Symbol]) {
    out.push_str(head);
    for s in list {
        out.push(' ');
        out.push_str(s.as_str());
    }
    out.push('\n');
}

/// Canonical text form; [`parse_system`] reads it back to an equal system
/// whenever every production is used by some rewrite.
pub fn render_system(sys: &CtsSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", sys.name);
    let _ = writeln!(out, "type {}", sys.g2.kind.as_str());
    join(&mut out, "g1.terminals", &sys.g1.terminals);
    join(&mut out, "g1.nonterminals", &sys.g1.nonterminals);
    let _ = writeln!(out, "g1.axiom {}", sys.g1.axiom);
    join(&mut out, "g2.nonterminals", &sys.g2.nonterminals);
    let _ = writeln!(out, "g2.axiom {}", sys.g2.axiom);
    for r in &sys.rewrites {
        let g1 = sys.g1.productions.get(r.g1);
        let g2 = sys.g2.productions.get(r.g2);
        if let (Some(g1), Some(g2)) = (g1, g2) {
            let _ = writeln!(out, "rewrite {} : {g1} ; {g2}", r.id);
        }
    }
    out
}
