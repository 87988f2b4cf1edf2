//! Data model for two-component cts systems.
//!
//! [`CtsSystem`] is the declarative, name-based form produced by the `.cts`
//! parser. It may violate the structural invariants; [`CtsSystem::validate`]
//! lists every violation. [`CtsSystem::compile`] turns a valid system into a
//! [`CompiledSystem`] with all symbols resolved to indices, which is what the
//! oracle and the recognizers operate on.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, StepError};

/// A grammar symbol: nonempty, alphanumeric plus `_`. The λ token `~` is
/// never a symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: &str) -> Option<Symbol> {
        Self::is_valid_name(name).then(|| Symbol(name.to_string()))
    }

    pub fn is_valid_name(name: &str) -> bool {
        !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<str> for Symbol {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

/// Selector discipline of the second component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemKind {
    /// Rewrites one arbitrary occurrence (`rl-0s`).
    ZeroSequential,
    /// Rewrites the rightmost symbol (`rl-rb`).
    RightBoundary,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::ZeroSequential => "rl-0s",
            SystemKind::RightBoundary => "rl-rb",
        }
    }
}

/// `lhs -> rhs`; an empty `rhs` is λ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        if self.rhs.is_empty() {
            return f.write_str(" ~");
        }
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Right-linear first component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlGrammar {
    pub terminals: Vec<Symbol>,
    pub nonterminals: Vec<Symbol>,
    pub axiom: Symbol,
    pub productions: Vec<Production>,
}

/// Second component, an alphabet of nonterminals only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondGrammar {
    pub kind: SystemKind,
    pub nonterminals: Vec<Symbol>,
    pub axiom: Symbol,
    pub productions: Vec<Production>,
}

/// A pair of productions applied in lockstep; `g1`/`g2` index the
/// production lists of the two grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub id: Symbol,
    pub g1: usize,
    pub g2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtsSystem {
    pub name: String,
    pub g1: RlGrammar,
    pub g2: SecondGrammar,
    pub rewrites: Vec<Rewrite>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    G1,
    G2,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::G1 => "g1",
            Scope::G2 => "g2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateSymbol { scope: Scope, symbol: Symbol },
    TerminalNonterminalOverlap(Symbol),
    NoNonterminals(Scope),
    AxiomNotDeclared { scope: Scope, axiom: Symbol },
    LhsNotNonterminal { scope: Scope, production: String },
    UndeclaredSymbol {
        scope: Scope,
        production: String,
        symbol: Symbol,
    },
    /// RL right side is not one of: λ, a single symbol, terminal·nonterminal.
    BadRlShape { production: String },
    NoRewrites,
    DuplicateRewriteId(Symbol),
    DanglingProduction {
        rewrite: Symbol,
        scope: Scope,
        index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateSymbol { scope, symbol } => {
                write!(f, "{scope}: symbol `{symbol}` declared twice")
            }
            Violation::TerminalNonterminalOverlap(s) => {
                write!(f, "g1: `{s}` is both a terminal and a nonterminal")
            }
            Violation::NoNonterminals(scope) => write!(f, "{scope}: no nonterminals declared"),
            Violation::AxiomNotDeclared { scope, axiom } => {
                write!(f, "{scope}: axiom `{axiom}` is not a declared nonterminal")
            }
            Violation::LhsNotNonterminal { scope, production } => {
                write!(f, "{scope}: left side of `{production}` is not a nonterminal")
            }
            Violation::UndeclaredSymbol {
                scope,
                production,
                symbol,
            } => write!(f, "{scope}: `{production}` uses undeclared symbol `{symbol}`"),
            Violation::BadRlShape { production } => {
                write!(f, "g1: `{production}` is not right-linear")
            }
            Violation::NoRewrites => f.write_str("no rewrites"),
            Violation::DuplicateRewriteId(id) => write!(f, "duplicate rewrite id `{id}`"),
            Violation::DanglingProduction {
                rewrite,
                scope,
                index,
            } => write!(f, "rewrite `{rewrite}` refers to missing {scope} production #{index}"),
        }
    }
}

/// Every invariant violation of a [`CtsSystem`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Signed change a second-grammar production makes to each nonterminal count,
/// indexed like the second grammar's nonterminal list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetEffect(pub Vec<i64>);

impl NetEffect {
    pub fn of(l2: usize, lhs: usize, rhs: &[usize]) -> NetEffect {
        let mut v = vec![0i64; l2];
        v[lhs] -= 1;
        for &s in rhs {
            v[s] += 1;
        }
        NetEffect(v)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// (RL;0S)
    ZeroSequential,
    /// (RL;RB) outside the counter shapes
    RightBoundary,
    /// (RL;RB_c): second grammar over {S₂, Z₂}
    Counter,
    /// (RL⁰;RB_c): second grammar over {Z₂}
    CounterNet,
    /// (RL₁;RB_c)
    OneStateCounter,
    /// (RL⁰₁;RB_c)
    OneStateCounterNet,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::ZeroSequential => "RL_0S",
            Family::RightBoundary => "RL_RB",
            Family::Counter => "RL_RBc",
            Family::CounterNet => "RL0_RBc",
            Family::OneStateCounter => "RL1_RBc",
            Family::OneStateCounterNet => "RL01_RBc",
        }
    }

    pub fn is_counter(self) -> bool {
        matches!(
            self,
            Family::Counter
                | Family::CounterNet
                | Family::OneStateCounter
                | Family::OneStateCounterNet
        )
    }

    /// Counter families with the S₂ bottom marker (zero tests available).
    pub fn has_bottom(self) -> bool {
        matches!(self, Family::Counter | Family::OneStateCounter)
    }

    pub fn is_one_state(self) -> bool {
        matches!(self, Family::OneStateCounter | Family::OneStateCounterNet)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemShape {
    pub family: Family,
    pub real_time: bool,
    pub g1_nt_count: usize,
    pub g2_nt_count: usize,
}

/// Roles of the second-grammar nonterminals in a counter system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRoles {
    /// S₂, the bottom marker (the axiom); absent for counter nets.
    pub bottom: Option<usize>,
    /// Z₂, the counted symbol.
    pub unit: usize,
}

/// A rewrite with every symbol resolved to an index.
///
/// The first component is `lhs -> emit next`: `emit` is a terminal or λ,
/// `next` the successor nonterminal or none. A rule with `emit == None` and
/// `next == Some(_)` is a chain rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub id: Symbol,
    pub lhs: usize,
    pub emit: Option<usize>,
    pub next: Option<usize>,
    pub g2_lhs: usize,
    pub g2_rhs: Vec<usize>,
    pub effect: NetEffect,
}

impl RewriteRule {
    pub fn is_chain(&self) -> bool {
        self.emit.is_none() && self.next.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Accepted,
    Rejected,
}

impl Verdict {
    pub fn from_bool(accepted: bool) -> Verdict {
        if accepted {
            Verdict::Accepted
        } else {
            Verdict::Rejected
        }
    }

    pub fn is_accepted(self) -> bool {
        self == Verdict::Accepted
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
        })
    }
}

/// Second sentential form: a multiset for 0-sequential systems (rewriting
/// position is immaterial there), a sequence for right-boundary systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Form2 {
    Multiset(Vec<u32>),
    Sequence(Vec<usize>),
}

impl Form2 {
    pub fn len(&self) -> usize {
        match self {
            Form2::Multiset(c) => c.iter().map(|&n| n as usize).sum(),
            Form2::Sequence(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parikh(&self, l2: usize) -> Vec<u32> {
        match self {
            Form2::Multiset(c) => c.clone(),
            Form2::Sequence(s) => {
                let mut v = vec![0u32; l2];
                for &b in s {
                    v[b] += 1;
                }
                v
            }
        }
    }
}

/// One element of a derivation: the RL form is `emitted · active`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Snapshot {
    pub emitted: Vec<usize>,
    pub active: Option<usize>,
    pub form2: Form2,
}

/// A validated system with symbols resolved to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledSystem {
    name: String,
    kind: SystemKind,
    terminals: Vec<Symbol>,
    g1_nonterminals: Vec<Symbol>,
    g2_nonterminals: Vec<Symbol>,
    axiom1: usize,
    axiom2: usize,
    rules: Vec<RewriteRule>,
    shape: SystemShape,
    roles: Option<CounterRoles>,
}

fn position(list: &[Symbol], s: &Symbol) -> Option<usize> {
    list.iter().position(|x| x == s)
}

/// Splits an RL right side into (emit, next) per the grammar's alphabet.
/// `X -> Y` with `Y` a terminal emits it and finishes; with `Y` a
/// nonterminal it is a chain rule.
fn rl_parts(g1: &RlGrammar, rhs: &[Symbol]) -> Option<(Option<usize>, Option<usize>)> {
    let term = |s: &Symbol| position(&g1.terminals, s);
    let nt = |s: &Symbol| position(&g1.nonterminals, s);
    match rhs {
        [] => Some((None, None)),
        [s] => match (term(s), nt(s)) {
            (Some(t), _) => Some((Some(t), None)),
            (None, Some(n)) => Some((None, Some(n))),
            _ => None,
        },
        [a, b] => Some((Some(term(a)?), Some(nt(b)?))),
        _ => None,
    }
}

impl CtsSystem {
    pub fn kind(&self) -> SystemKind {
        self.g2.kind
    }

    pub fn rewrite(&self, id: &str) -> Option<&Rewrite> {
        self.rewrites.iter().find(|r| r.id == *id)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let g1 = &self.g1;
        let g2 = &self.g2;

        for (scope, list) in [
            (Scope::G1, &g1.terminals),
            (Scope::G1, &g1.nonterminals),
            (Scope::G2, &g2.nonterminals),
        ] {
            let mut seen = BTreeSet::new();
            for s in list {
                if !seen.insert(s) {
                    out.push(Violation::DuplicateSymbol {
                        scope,
                        symbol: s.clone(),
                    });
                }
            }
        }
        for t in &g1.terminals {
            if g1.nonterminals.contains(t) {
                out.push(Violation::TerminalNonterminalOverlap(t.clone()));
            }
        }
        for (scope, nts, axiom) in [
            (Scope::G1, &g1.nonterminals, &g1.axiom),
            (Scope::G2, &g2.nonterminals, &g2.axiom),
        ] {
            if nts.is_empty() {
                out.push(Violation::NoNonterminals(scope));
            }
            if !nts.contains(axiom) {
                out.push(Violation::AxiomNotDeclared {
                    scope,
                    axiom: axiom.clone(),
                });
            }
        }

        for p in &g1.productions {
            if !g1.nonterminals.contains(&p.lhs) {
                out.push(Violation::LhsNotNonterminal {
                    scope: Scope::G1,
                    production: p.to_string(),
                });
            }
            let mut declared = true;
            for s in &p.rhs {
                if !g1.terminals.contains(s) && !g1.nonterminals.contains(s) {
                    declared = false;
                    out.push(Violation::UndeclaredSymbol {
                        scope: Scope::G1,
                        production: p.to_string(),
                        symbol: s.clone(),
                    });
                }
            }
            if declared && rl_parts(g1, &p.rhs).is_none() {
                out.push(Violation::BadRlShape {
                    production: p.to_string(),
                });
            }
        }
        for p in &g2.productions {
            if !g2.nonterminals.contains(&p.lhs) {
                out.push(Violation::LhsNotNonterminal {
                    scope: Scope::G2,
                    production: p.to_string(),
                });
            }
            for s in &p.rhs {
                if !g2.nonterminals.contains(s) {
                    out.push(Violation::UndeclaredSymbol {
                        scope: Scope::G2,
                        production: p.to_string(),
                        symbol: s.clone(),
                    });
                }
            }
        }

        if self.rewrites.is_empty() {
            out.push(Violation::NoRewrites);
        }
        let mut ids = BTreeSet::new();
        for r in &self.rewrites {
            if !ids.insert(&r.id) {
                out.push(Violation::DuplicateRewriteId(r.id.clone()));
            }
            if r.g1 >= g1.productions.len() {
                out.push(Violation::DanglingProduction {
                    rewrite: r.id.clone(),
                    scope: Scope::G1,
                    index: r.g1,
                });
            }
            if r.g2 >= g2.productions.len() {
                out.push(Violation::DanglingProduction {
                    rewrite: r.id.clone(),
                    scope: Scope::G2,
                    index: r.g2,
                });
            }
        }
        ValidationReport { violations: out }
    }

    pub fn compile(&self) -> Result<CompiledSystem, Error> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidSystem(report));
        }
        let g1 = &self.g1;
        let g2 = &self.g2;
        let l2 = g2.nonterminals.len();
        let nt2 = |s: &Symbol| position(&g2.nonterminals, s).expect("validated");

        let rules: Vec<RewriteRule> = self
            .rewrites
            .iter()
            .map(|r| {
                let p1 = &g1.productions[r.g1];
                let p2 = &g2.productions[r.g2];
                let (emit, next) = rl_parts(g1, &p1.rhs).expect("validated");
                let g2_lhs = nt2(&p2.lhs);
                let g2_rhs: Vec<usize> = p2.rhs.iter().map(nt2).collect();
                let effect = NetEffect::of(l2, g2_lhs, &g2_rhs);
                RewriteRule {
                    id: r.id.clone(),
                    lhs: position(&g1.nonterminals, &p1.lhs).expect("validated"),
                    emit,
                    next,
                    g2_lhs,
                    g2_rhs,
                    effect,
                }
            })
            .collect();

        let axiom2 = nt2(&g2.axiom);
        let g2_prods: Vec<(usize, Vec<usize>)> = g2
            .productions
            .iter()
            .map(|p| (nt2(&p.lhs), p.rhs.iter().map(nt2).collect()))
            .collect();
        let l1 = g1.nonterminals.len();
        let (family, roles) = classify(g2.kind, l1, l2, axiom2, &g2_prods);
        let real_time = !rules.iter().any(RewriteRule::is_chain);

        Ok(CompiledSystem {
            name: self.name.clone(),
            kind: g2.kind,
            terminals: g1.terminals.clone(),
            g1_nonterminals: g1.nonterminals.clone(),
            g2_nonterminals: g2.nonterminals.clone(),
            axiom1: position(&g1.nonterminals, &g1.axiom).expect("validated"),
            axiom2,
            rules,
            shape: SystemShape {
                family,
                real_time,
                g1_nt_count: l1,
                g2_nt_count: l2,
            },
            roles,
        })
    }

    pub fn classify_shape(&self) -> Result<SystemShape, Error> {
        Ok(self.compile()?.shape())
    }

    pub fn net_effect(&self, rewrite_id: &str) -> Result<NetEffect, Error> {
        let r = self
            .rewrite(rewrite_id)
            .ok_or_else(|| Error::UnknownRewrite(rewrite_id.to_string()))?;
        let p = self.g2.productions.get(r.g2).ok_or_else(|| {
            Error::InvalidSystem(ValidationReport {
                violations: vec![Violation::DanglingProduction {
                    rewrite: r.id.clone(),
                    scope: Scope::G2,
                    index: r.g2,
                }],
            })
        })?;
        let nts = &self.g2.nonterminals;
        let mut v = vec![0i64; nts.len()];
        for (l, b) in nts.iter().enumerate() {
            let rhs = p.rhs.iter().filter(|s| *s == b).count() as i64;
            let lhs = i64::from(p.lhs == *b);
            v[l] = rhs - lhs;
        }
        Ok(NetEffect(v))
    }
}

/// Definition-4.1 shape test. For two second-grammar nonterminals the axiom
/// takes the bottom-marker role S₂ and the other one is Z₂.
fn classify(
    kind: SystemKind,
    l1: usize,
    l2: usize,
    axiom2: usize,
    prods: &[(usize, Vec<usize>)],
) -> (Family, Option<CounterRoles>) {
    if kind == SystemKind::ZeroSequential {
        return (Family::ZeroSequential, None);
    }
    let one = l1 == 1;
    match l2 {
        1 => {
            let z = 0;
            let ok = prods.iter().all(|(lhs, rhs)| {
                *lhs == z && matches!(rhs.as_slice(), [] | [_] | [_, _])
            });
            if ok {
                let family = if one {
                    Family::OneStateCounterNet
                } else {
                    Family::CounterNet
                };
                return (
                    family,
                    Some(CounterRoles {
                        bottom: None,
                        unit: z,
                    }),
                );
            }
        }
        2 => {
            let s = axiom2;
            let z = 1 - axiom2;
            let ok = prods.iter().all(|(lhs, rhs)| {
                let x = *lhs;
                match rhs.as_slice() {
                    [] => true,
                    [y] => *y == x,
                    [y, w] => *y == x && *w == z,
                    _ => false,
                }
            });
            if ok {
                let family = if one {
                    Family::OneStateCounter
                } else {
                    Family::Counter
                };
                return (
                    family,
                    Some(CounterRoles {
                        bottom: Some(s),
                        unit: z,
                    }),
                );
            }
        }
        _ => {}
    }
    (Family::RightBoundary, None)
}

impl CompiledSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn terminals(&self) -> &[Symbol] {
        &self.terminals
    }

    pub fn g1_nonterminals(&self) -> &[Symbol] {
        &self.g1_nonterminals
    }

    pub fn g2_nonterminals(&self) -> &[Symbol] {
        &self.g2_nonterminals
    }

    pub fn axiom1(&self) -> usize {
        self.axiom1
    }

    pub fn axiom2(&self) -> usize {
        self.axiom2
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn shape(&self) -> SystemShape {
        self.shape
    }

    pub fn family(&self) -> Family {
        self.shape.family
    }

    pub fn is_real_time(&self) -> bool {
        self.shape.real_time
    }

    pub fn counter_roles(&self) -> Option<CounterRoles> {
        self.roles
    }

    pub fn rule_index(&self, id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.id == *id)
    }

    pub fn net_effect(&self, id: &str) -> Result<&NetEffect, Error> {
        self.rule_index(id)
            .map(|i| &self.rules[i].effect)
            .ok_or_else(|| Error::UnknownRewrite(id.to_string()))
    }

    /// Largest positive net-effect entry over all rewrites (0 if none grows).
    pub fn g_max(&self) -> u64 {
        self.rules
            .iter()
            .flat_map(|r| r.effect.0.iter().copied())
            .max()
            .unwrap_or(0)
            .max(0) as u64
    }

    pub fn initial_form2(&self) -> Form2 {
        match self.kind {
            SystemKind::ZeroSequential => {
                let mut v = vec![0u32; self.g2_nonterminals.len()];
                v[self.axiom2] = 1;
                Form2::Multiset(v)
            }
            SystemKind::RightBoundary => Form2::Sequence(vec![self.axiom2]),
        }
    }

    pub fn initial_snapshot(&self) -> Snapshot {
        Snapshot {
            emitted: Vec::new(),
            active: Some(self.axiom1),
            form2: self.initial_form2(),
        }
    }

    /// Applies the second-component half of rule `r` to `form`.
    pub fn apply_g2(&self, r: usize, form: &Form2) -> Result<Form2, StepError> {
        let rule = &self.rules[r];
        if form.is_empty() {
            return Err(StepError::G2Empty);
        }
        match form {
            Form2::Multiset(counts) => {
                if counts[rule.g2_lhs] == 0 {
                    return Err(StepError::G2SymbolAbsent(rule.id.to_string()));
                }
                let mut next = counts.clone();
                next[rule.g2_lhs] -= 1;
                for &s in &rule.g2_rhs {
                    next[s] += 1;
                }
                Ok(Form2::Multiset(next))
            }
            Form2::Sequence(seq) => {
                if seq.last() != Some(&rule.g2_lhs) {
                    return Err(StepError::G2RightmostMismatch(rule.id.to_string()));
                }
                let mut next = seq.clone();
                next.pop();
                next.extend_from_slice(&rule.g2_rhs);
                Ok(Form2::Sequence(next))
            }
        }
    }

    /// One direct derivation step by rule index `r`.
    pub fn derive_step(&self, snap: &Snapshot, r: usize) -> Result<Snapshot, StepError> {
        let rule = &self.rules[r];
        let active = snap.active.ok_or(StepError::G1Blocked)?;
        if active != rule.lhs {
            return Err(StepError::G1LhsMismatch(rule.id.to_string()));
        }
        let form2 = self.apply_g2(r, &snap.form2)?;
        let mut emitted = snap.emitted.clone();
        emitted.extend(rule.emit);
        Ok(Snapshot {
            emitted,
            active: rule.next,
            form2,
        })
    }

    /// Same as [`derive_step`](Self::derive_step) with the rewrite named by id.
    pub fn derive_step_by_id(&self, snap: &Snapshot, id: &str) -> Result<Snapshot, Error> {
        let r = self
            .rule_index(id)
            .ok_or_else(|| Error::UnknownRewrite(id.to_string()))?;
        Ok(self.derive_step(snap, r)?)
    }

    pub fn is_successful(&self, snap: &Snapshot) -> bool {
        snap.active.is_none() && snap.form2.is_empty()
    }

    pub fn terminal_index(&self, name: &str) -> Option<usize> {
        self.terminals.iter().position(|t| t == name)
    }

    /// Reads a word written as concatenated single-character terminals.
    /// `""` and `"~"` are λ.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, Error> {
        if text.is_empty() || text == "~" {
            return Ok(Vec::new());
        }
        if let Some(long) = self.terminals.iter().find(|t| t.as_str().chars().count() != 1) {
            return Err(Error::NeedsTokens(long.to_string()));
        }
        let mut buf = [0u8; 4];
        text.chars()
            .map(|c| {
                let s: &str = c.encode_utf8(&mut buf);
                self.terminal_index(s)
                    .ok_or_else(|| Error::WordAlphabet(s.to_string()))
            })
            .collect()
    }

    /// Reads a word given as terminal tokens.
    pub fn word_from_tokens<'a, I>(&self, tokens: I) -> Result<Vec<usize>, Error>
    where
        I: IntoIterator<Item = &'a str>,
    {
        tokens
            .into_iter()
            .filter(|t| *t != "~")
            .map(|t| {
                self.terminal_index(t)
                    .ok_or_else(|| Error::WordAlphabet(t.to_string()))
            })
            .collect()
    }

    /// Concatenates single-character terminals, otherwise joins with spaces.
    pub fn render_word(&self, word: &[usize]) -> String {
        let single = self.terminals.iter().all(|t| t.as_str().chars().count() == 1);
        let sep = if single { "" } else { " " };
        let parts: Vec<&str> = word.iter().map(|&t| self.terminals[t].as_str()).collect();
        parts.join(sep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;

    pub(crate) const EX51: &str = "\
system ex51
type rl-rb
g1.terminals a b
g1.nonterminals S1 X
g2.nonterminals Z2
g2.axiom Z2
rewrite r1 : S1 -> a S1 ; Z2 -> Z2 Z2
rewrite r2 : S1 -> X ; Z2 -> ~
rewrite r3 : X -> b X ; Z2 -> ~
rewrite r4 : X -> b ; Z2 -> ~
";

    const EX52: &str = "\
system ex52
type rl-rb
g1.terminals a b
g1.nonterminals S1 X
g2.nonterminals S2 Z2
g2.axiom S2
rewrite r1 : S1 -> S1 ; S2 -> S2 Z2
rewrite r2 : S1 -> a S1 ; Z2 -> Z2 Z2
rewrite r3 : S1 -> X ; Z2 -> ~
rewrite r4 : X -> b X ; Z2 -> ~
rewrite r5 : X -> ~ ; S2 -> ~
";

    const EX53: &str = "\
system ex53
type rl-rb
g1.terminals a b
g1.nonterminals S1
g2.nonterminals Z2
rewrite r1 : S1 -> a S1 ; Z2 -> Z2 Z2
rewrite r2 : S1 -> b S1 ; Z2 -> ~
rewrite r3 : S1 -> ~ ; Z2 -> ~
";

    fn compiled(text: &str) -> CompiledSystem {
        parse_system(text).unwrap().compile().unwrap()
    }

    #[test]
    fn net_effects_follow_the_difference_formula() {
        let s51 = parse_system(EX51).unwrap();
        assert_eq!(s51.net_effect("r1").unwrap(), NetEffect(vec![1]));
        assert_eq!(s51.net_effect("r2").unwrap(), NetEffect(vec![-1]));
        let s52 = parse_system(EX52).unwrap();
        assert_eq!(s52.net_effect("r1").unwrap(), NetEffect(vec![0, 1]));
        assert_eq!(s52.net_effect("r5").unwrap(), NetEffect(vec![-1, 0]));
        assert_eq!(
            s52.net_effect("nope"),
            Err(Error::UnknownRewrite("nope".into()))
        );
        // compiled and declarative routes agree
        let c = s52.compile().unwrap();
        for r in &s52.rewrites {
            assert_eq!(*c.net_effect(r.id.as_str()).unwrap(), s52.net_effect(r.id.as_str()).unwrap());
        }
    }

    #[test]
    fn shapes_of_the_worked_examples() {
        let s = compiled(EX51).shape();
        assert_eq!((s.family, s.real_time), (Family::CounterNet, false));
        let s = compiled(EX52).shape();
        assert_eq!((s.family, s.real_time), (Family::Counter, false));
        let s = compiled(EX53).shape();
        assert_eq!((s.family, s.real_time), (Family::OneStateCounterNet, true));
        let zs = EX53.replace("type rl-rb", "type rl-0s");
        assert_eq!(compiled(&zs).family(), Family::ZeroSequential);
    }

    #[test]
    fn shape_of_invalid_system_is_an_error() {
        let mut sys = parse_system(EX51).unwrap();
        sys.g2.axiom = Symbol::new("Q").unwrap();
        assert!(matches!(sys.classify_shape(), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn adding_a_chain_rule_flips_real_time() {
        let base = compiled(EX53);
        assert!(base.is_real_time());
        let chained = format!("{EX53}rewrite r9 : S1 -> S1 ; Z2 -> Z2\n");
        assert!(!compiled(&chained).is_real_time());
        // X -> λ and X -> a are not chain rules
        let closing = format!("{EX53}rewrite r9 : S1 -> a ; Z2 -> ~\n");
        assert!(compiled(&closing).is_real_time());
    }

    #[test]
    fn non_counter_rb_systems() {
        let text = EX52.replace("rewrite r5 : X -> ~ ; S2 -> ~", "rewrite r5 : X -> ~ ; S2 -> Z2");
        assert_eq!(compiled(&text).family(), Family::RightBoundary);
        // Z₂ as axiom: roles would put Z₂ below, which is not a counter
        let text = EX52.replace("g2.axiom S2", "g2.axiom Z2");
        assert_eq!(compiled(&text).family(), Family::RightBoundary);
    }

    #[test]
    fn validation_reports() {
        assert!(parse_system(EX52).unwrap().validate().is_valid());

        let mut sys = parse_system(EX52).unwrap();
        sys.g2.axiom = Symbol::new("B9").unwrap();
        assert_eq!(
            sys.validate().violations,
            vec![Violation::AxiomNotDeclared {
                scope: Scope::G2,
                axiom: Symbol::new("B9").unwrap()
            }]
        );

        let mut sys = parse_system(EX52).unwrap();
        let a = Symbol::new("a").unwrap();
        let b = Symbol::new("b").unwrap();
        sys.g1.productions[0].rhs = vec![a, b];
        let v = sys.validate().violations;
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::BadRlShape { .. }));

        let mut sys = parse_system(EX52).unwrap();
        sys.rewrites.push(sys.rewrites[0].clone());
        sys.rewrites.push(Rewrite {
            id: Symbol::new("zz").unwrap(),
            g1: 99,
            g2: 0,
        });
        let v = sys.validate().violations;
        assert!(v.contains(&Violation::DuplicateRewriteId(Symbol::new("r1").unwrap())));
        assert!(v.iter().any(|x| matches!(x, Violation::DanglingProduction { index: 99, .. })));

        let mut sys = parse_system(EX52).unwrap();
        sys.g1.terminals.push(Symbol::new("X").unwrap());
        assert!(sys
            .validate()
            .violations
            .contains(&Violation::TerminalNonterminalOverlap(Symbol::new("X").unwrap())));
    }

    #[test]
    fn derive_step_examples() {
        let c = compiled(EX51);
        let s0 = c.initial_snapshot();
        let s1 = c.derive_step_by_id(&s0, "r1").unwrap();
        assert_eq!(s1.emitted, vec![0]);
        assert_eq!(s1.active, Some(0));
        assert_eq!(s1.form2, Form2::Sequence(vec![0, 0]));

        let snap = Snapshot {
            emitted: vec![0],
            active: Some(1),
            form2: Form2::Sequence(vec![0]),
        };
        let done = c.derive_step_by_id(&snap, "r4").unwrap();
        assert_eq!(done.emitted, vec![0, 1]);
        assert_eq!(done.active, None);
        assert!(done.form2.is_empty());
        assert!(c.is_successful(&done));
        assert_eq!(
            c.derive_step_by_id(&done, "r1"),
            Err(Error::Step(StepError::G1Blocked))
        );

        let c = compiled(EX52);
        let s0 = c.initial_snapshot();
        assert_eq!(
            c.derive_step_by_id(&s0, "r3"),
            Err(Error::Step(StepError::G2RightmostMismatch("r3".into())))
        );
        assert_eq!(
            c.derive_step_by_id(&s0, "r4"),
            Err(Error::Step(StepError::G1LhsMismatch("r4".into())))
        );
        let emptied = Snapshot {
            emitted: vec![],
            active: Some(0),
            form2: Form2::Sequence(vec![]),
        };
        assert_eq!(
            c.derive_step_by_id(&emptied, "r1"),
            Err(Error::Step(StepError::G2Empty))
        );
    }

    #[test]
    fn zero_sequential_steps_use_any_occurrence() {
        let text = "\
system ex6
type rl-0s
g1.terminals a b c
g1.nonterminals S1
g2.nonterminals B1 B2
rewrite r1 : S1 -> a S1 ; B1 -> B1 B2
rewrite r2 : S1 -> b S1 ; B2 -> ~
rewrite r3 : S1 -> c ; B1 -> ~
";
        let c = compiled(text);
        let s0 = c.initial_snapshot();
        assert_eq!(
            c.derive_step_by_id(&s0, "r2"),
            Err(Error::Step(StepError::G2SymbolAbsent("r2".into())))
        );
        let s1 = c.derive_step_by_id(&s0, "r1").unwrap();
        // B₂ sits left of nothing in particular: a multiset
        assert_eq!(s1.form2, Form2::Multiset(vec![1, 1]));
        let s2 = c.derive_step_by_id(&s1, "r2").unwrap();
        assert_eq!(s2.form2, Form2::Multiset(vec![1, 0]));
    }

    #[test]
    fn words() {
        let c = compiled(EX51);
        assert_eq!(c.parse_word("aabb").unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(c.parse_word("~").unwrap(), Vec::<usize>::new());
        assert_eq!(c.parse_word("abc"), Err(Error::WordAlphabet("c".into())));
        assert_eq!(c.render_word(&[0, 1]), "ab");
        assert_eq!(c.word_from_tokens(["a", "b"]).unwrap(), vec![0, 1]);
    }
}
