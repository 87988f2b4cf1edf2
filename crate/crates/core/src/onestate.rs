//! One-nonterminal counter systems: rewrite types, case detection and the
//! case-specific membership procedures, with the counter search as the
//! exact fallback.
//!
//! With a single RL nonterminal `S1` every rewrite has one of ten shapes
//! (`Psi1`..`Psi10`, see [`PsiKind`]). Systems built from particular shape
//! sets admit direct characterizations of their language, which
//! [`fast_member`] applies; any other system is delegated to
//! [`counter_member`](crate::counter::counter_member).

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::counter::counter_member;
use crate::system::{CompiledSystem, CounterRoles, Family, RewriteRule, Symbol, Verdict};
use crate::Error;

/// Rewrite shapes over `S1` and `{S2, Z2}`; `x` is a terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PsiKind {
    /// `(S1 -> x S1, S2 -> S2)`
    Psi1,
    /// `(S1 -> x S1, S2 -> S2 Z2)`
    Psi2,
    /// `(S1 -> x S1, Z2 -> Z2 Z2)`
    Psi3,
    /// `(S1 -> x S1, Z2 -> Z2)`
    Psi4,
    /// `(S1 -> x S1, Z2 -> λ)`
    Psi5,
    /// `(S1 -> x, S2 -> λ)`
    Psi6,
    /// `(S1 -> S1, S2 -> S2 Z2)`
    Psi7,
    /// `(S1 -> S1, Z2 -> Z2 Z2)`
    Psi8,
    /// `(S1 -> S1, Z2 -> λ)`
    Psi9,
    /// `(S1 -> λ, S2 -> λ)`
    Psi10,
    /// `(S1 -> x | λ, Z2 -> λ)` in a system without `S2`: the final deletion.
    ZeroFinal,
    /// A rewrite that can never take part in a successful derivation or
    /// changes nothing, e.g. `(S1 -> x, S2 -> S2)` or `(S1 -> S1, Z2 -> Z2)`.
    Inert,
}

impl PsiKind {
    pub fn label(self) -> &'static str {
        match self {
            PsiKind::Psi1 => "psi1",
            PsiKind::Psi2 => "psi2",
            PsiKind::Psi3 => "psi3",
            PsiKind::Psi4 => "psi4",
            PsiKind::Psi5 => "psi5",
            PsiKind::Psi6 => "psi6",
            PsiKind::Psi7 => "psi7",
            PsiKind::Psi8 => "psi8",
            PsiKind::Psi9 => "psi9",
            PsiKind::Psi10 => "psi10",
            PsiKind::ZeroFinal => "zero-final",
            PsiKind::Inert => "inert",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiProfile {
    pub family: Family,
    pub terminals: Vec<Symbol>,
    /// Per rewrite, in declaration order: id, kind, emitted terminal.
    pub per_rewrite: Vec<(Symbol, PsiKind, Option<usize>)>,
    /// Per terminal, the kinds of the rewrites emitting it.
    pub producers: Vec<BTreeSet<PsiKind>>,
}

impl PsiProfile {
    /// Kinds present, without [`PsiKind::Inert`].
    pub fn kinds(&self) -> BTreeSet<PsiKind> {
        self.per_rewrite
            .iter()
            .map(|r| r.1)
            .filter(|k| *k != PsiKind::Inert)
            .collect()
    }

    /// Terminals emitted by some rewrite of kind `k`.
    pub fn produced_by(&self, k: PsiKind) -> BTreeSet<usize> {
        (0..self.producers.len())
            .filter(|&t| self.producers[t].contains(&k))
            .collect()
    }

    fn has(&self, t: usize, k: PsiKind) -> bool {
        self.producers[t].contains(&k)
    }
}

fn kind_of(r: &RewriteRule, roles: CounterRoles) -> PsiKind {
    use PsiKind::*;
    let z = roles.unit;
    let lhs = r.g2_lhs;
    let rhs = r.g2_rhs.as_slice();
    let on_s = Some(lhs) == roles.bottom;
    let (keep, push, pop) = (rhs == [lhs], rhs == [lhs, z], rhs.is_empty());
    match (r.emit, r.next) {
        (Some(_), Some(_)) => match (on_s, keep, push, pop) {
            (true, true, _, _) => Psi1,
            (true, _, true, _) => Psi2,
            (false, _, true, _) => Psi3,
            (false, true, _, _) => Psi4,
            (false, _, _, true) => Psi5,
            _ => Inert,
        },
        (None, Some(_)) => match (on_s, push, pop) {
            (true, true, _) => Psi7,
            (false, true, _) => Psi8,
            (false, _, true) => Psi9,
            _ => Inert,
        },
        (emit, None) => match (on_s, pop, roles.bottom.is_some()) {
            (true, true, _) if emit.is_some() => Psi6,
            (true, true, _) => Psi10,
            (false, true, false) => ZeroFinal,
            _ => Inert,
        },
    }
}

pub fn classify_psi(sys: &CompiledSystem) -> Result<PsiProfile, Error> {
    let family = sys.family();
    let roles = match sys.counter_roles() {
        Some(r) if family.is_one_state() => r,
        _ => {
            return Err(Error::WrongFamily {
                expected: "RL1_RBc or RL01_RBc",
                found: family,
            })
        }
    };
    let mut producers = vec![BTreeSet::new(); sys.terminals().len()];
    let mut per_rewrite = Vec::new();
    for r in sys.rules() {
        let k = kind_of(r, roles);
        if r.lhs != sys.axiom1() {
            return Err(Error::UnclassifiableRewrite(r.id.to_string()));
        }
        if let (Some(t), false) = (r.emit, k == PsiKind::Inert) {
            producers[t].insert(k);
        }
        per_rewrite.push((r.id.clone(), k, r.emit));
    }
    Ok(PsiProfile {
        family,
        terminals: sys.terminals().to_vec(),
        per_rewrite,
        producers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseId {
    P1,
    P2,
    P3,
    P4,
    P5I,
    P5II,
    P5III,
    P6,
    P7,
    P8I,
    P8II,
    P9,
    P10,
    P11I,
    P11II,
    Fallback,
}

impl CaseId {
    pub fn label(self) -> &'static str {
        match self {
            CaseId::P1 => "P1",
            CaseId::P2 => "P2",
            CaseId::P3 => "P3",
            CaseId::P4 => "P4",
            CaseId::P5I => "P5_I",
            CaseId::P5II => "P5_II",
            CaseId::P5III => "P5_III",
            CaseId::P6 => "P6",
            CaseId::P7 => "P7",
            CaseId::P8I => "P8_I",
            CaseId::P8II => "P8_II",
            CaseId::P9 => "P9",
            CaseId::P10 => "P10",
            CaseId::P11I => "P11_I",
            CaseId::P11II => "P11_II",
            CaseId::Fallback => "Fallback",
        }
    }
}

fn set(kinds: &[PsiKind]) -> BTreeSet<PsiKind> {
    kinds.iter().copied().collect()
}

pub fn detect_case(profile: &PsiProfile, word: &[usize]) -> CaseId {
    use PsiKind::*;
    if profile.family != Family::OneStateCounter {
        return CaseId::Fallback;
    }
    let kinds = profile.kinds();
    let known = |t: &usize| *t < profile.producers.len();
    let all = |f: &dyn Fn(usize) -> bool| word.iter().filter(|t| known(t)).all(|&t| f(t));
    let both = |t: usize, a, b| profile.has(t, a) && profile.has(t, b);
    let only = |t: usize, a, b| profile.has(t, a) != profile.has(t, b);

    if kinds == set(&[Psi1, Psi6]) {
        return CaseId::P1;
    }
    if kinds == set(&[Psi1, Psi10]) {
        return CaseId::P2;
    }
    if kinds == set(&[Psi7, Psi3, Psi5, Psi10]) {
        if all(&|t| both(t, Psi3, Psi5)) {
            return CaseId::P3;
        }
        if all(&|t| only(t, Psi3, Psi5)) {
            return CaseId::P9;
        }
        return CaseId::P10;
    }
    for shape in [
        &[Psi7, Psi5, Psi10][..],
        &[Psi7, Psi2, Psi5, Psi10],
        &[Psi7, Psi5, Psi8, Psi10],
        &[Psi7, Psi3, Psi10],
        &[Psi2, Psi3, Psi10],
    ] {
        if kinds == set(shape) {
            return CaseId::P4;
        }
    }
    if kinds == set(&[Psi2, Psi5, Psi10]) {
        if all(&|t| both(t, Psi2, Psi5)) {
            return CaseId::P5I;
        }
        if all(&|t| only(t, Psi2, Psi5)) {
            return CaseId::P5II;
        }
        return CaseId::P5III;
    }
    if kinds == set(&[Psi7, Psi3, Psi9, Psi10]) {
        return CaseId::P6;
    }
    if kinds == set(&[Psi7, Psi3, Psi5, Psi6, Psi9]) && all(&|t| both(t, Psi3, Psi5)) {
        return CaseId::P7;
    }
    if kinds == set(&[Psi7, Psi3, Psi4, Psi5, Psi10]) {
        let t3 = profile.produced_by(Psi3);
        let t4 = profile.produced_by(Psi4);
        let t5 = profile.produced_by(Psi5);
        if t3 == t5 && (t4.is_disjoint(&t3) || t4 == t3) {
            return CaseId::P8I;
        }
        if all(&|t| profile.producers[t].len() == 1) {
            return CaseId::P8II;
        }
        return CaseId::Fallback;
    }
    if kinds == set(&[Psi2, Psi3, Psi5, Psi10]) {
        let t35: BTreeSet<usize> = profile
            .produced_by(Psi3)
            .union(&profile.produced_by(Psi5))
            .copied()
            .collect();
        return if profile.produced_by(Psi2).is_subset(&t35) {
            CaseId::P11I
        } else {
            CaseId::P11II
        };
    }
    CaseId::Fallback
}

/// Terminals produced only by `Psi3` (I), only by `Psi5` (H), or by both (L).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TerminalPartition {
    pub i: BTreeSet<usize>,
    pub h: BTreeSet<usize>,
    pub l: BTreeSet<usize>,
}

pub fn terminal_partition(profile: &PsiProfile) -> TerminalPartition {
    let t3 = profile.produced_by(PsiKind::Psi3);
    let t5 = profile.produced_by(PsiKind::Psi5);
    TerminalPartition {
        i: t3.difference(&t5).copied().collect(),
        h: t5.difference(&t3).copied().collect(),
        l: t3.intersection(&t5).copied().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Deleting run (`α`).
    Alpha,
    /// Incrementing run (`β`).
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub len: usize,
}

/// `w = α1 β1 … αk βk αk+1` with `eta3[i]` incrementing symbols in `βi`
/// and `eta5[i]` deleting symbols in `αi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentProfile {
    pub decomposition: Vec<Segment>,
    pub eta3: Vec<u64>,
    pub eta5: Vec<u64>,
}

/// Splits `word` into maximal runs. Symbols produced by `Psi5` but not `Psi3`
/// are deleting, `Psi3` but not `Psi5` incrementing; every other producible
/// symbol stays in the current run without being counted.
pub fn segment_profile(profile: &PsiProfile, word: &[usize]) -> Result<SegmentProfile, Error> {
    if word.is_empty() {
        return Ok(SegmentProfile {
            decomposition: Vec::new(),
            eta3: Vec::new(),
            eta5: vec![0],
        });
    }
    let part = terminal_partition(profile);
    let mut segs = vec![Segment {
        kind: SegmentKind::Alpha,
        start: 0,
        len: 0,
    }];
    let mut eta3 = Vec::new();
    let mut eta5 = vec![0u64];
    for (pos, &t) in word.iter().enumerate() {
        if profile.producers.get(t).map_or(true, BTreeSet::is_empty) {
            let name = profile
                .terminals
                .get(t)
                .map_or_else(|| t.to_string(), |s| s.to_string());
            return Err(Error::UnproducibleTerminal(name));
        }
        let cls = if part.h.contains(&t) {
            Some(SegmentKind::Alpha)
        } else if part.i.contains(&t) {
            Some(SegmentKind::Beta)
        } else {
            None
        };
        let current = segs.last().expect("nonempty").kind;
        if let Some(k) = cls {
            if k != current {
                segs.push(Segment {
                    kind: k,
                    start: pos,
                    len: 0,
                });
                match k {
                    SegmentKind::Alpha => eta5.push(0),
                    SegmentKind::Beta => eta3.push(0),
                }
            }
            match k {
                SegmentKind::Alpha => *eta5.last_mut().expect("nonempty") += 1,
                SegmentKind::Beta => *eta3.last_mut().expect("nonempty") += 1,
            }
        }
        segs.last_mut().expect("nonempty").len += 1;
    }
    if segs.last().expect("nonempty").kind == SegmentKind::Beta {
        segs.push(Segment {
            kind: SegmentKind::Alpha,
            start: word.len(),
            len: 0,
        });
        eta5.push(0);
    }
    Ok(SegmentProfile {
        decomposition: segs,
        eta3,
        eta5,
    })
}

/// The sequential segment procedure; the word is derivable iff the result
/// is 0.
///
/// `S + 1` counter symbols are present after each `β` run. When the last
/// deleting run cannot empty the counter the result is the number of
/// symbols left over, `S + 1 - η5`, which is positive.
pub fn p8_sequence_check(sp: &SegmentProfile) -> u64 {
    let k = sp.eta3.len();
    let eta3 = |i: usize| if i <= k { sp.eta3[i - 1] } else { 0 };
    let eta5 = |i: usize| sp.eta5.get(i - 1).copied().unwrap_or(0);
    let mut s = eta3(1);
    for i in 2..=k + 1 {
        if s + 1 <= eta5(i) {
            s = eta3(i);
        } else if i == k + 1 {
            s = s + 1 - eta5(i);
        } else {
            s = s - eta5(i) + eta3(i);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastOutcome {
    Accepted,
    Rejected,
    /// Decided by the counter search.
    Delegated(Verdict),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastResult {
    pub case: CaseId,
    pub outcome: FastOutcome,
}

impl FastResult {
    pub fn verdict(&self) -> Verdict {
        match self.outcome {
            FastOutcome::Accepted => Verdict::Accepted,
            FastOutcome::Rejected => Verdict::Rejected,
            FastOutcome::Delegated(v) => v,
        }
    }

    pub fn is_delegated(&self) -> bool {
        matches!(self.outcome, FastOutcome::Delegated(_))
    }
}

/// Runs `S2 Z2^n` through the forced moves: a symbol needing `Z2` on top of
/// an empty counter is preceded by `Psi7`.
fn forced_walk(profile: &PsiProfile, word: &[usize]) -> bool {
    let mut n: u64 = 0;
    for &t in word {
        let kind = *profile.producers[t].iter().next().expect("producible");
        if n == 0 {
            n = 1;
        }
        match kind {
            PsiKind::Psi3 => n += 1,
            PsiKind::Psi5 => n -= 1,
            _ => {}
        }
    }
    n == 0
}

/// Small NFA for `{Psi7, Psi2, Psi5, Psi10}`: states are the counter
/// values 0 and 1, and `Psi7 Psi5` reads a `Psi5` symbol at 0.
fn push_pop_walk(profile: &PsiProfile, word: &[usize]) -> bool {
    let (mut at0, mut at1) = (true, false);
    for &t in word {
        let p2 = profile.has(t, PsiKind::Psi2);
        let p5 = profile.has(t, PsiKind::Psi5);
        let n0 = (at0 && p5) || (at1 && p5);
        let n1 = at0 && p2;
        at0 = n0;
        at1 = n1;
    }
    at0
}

pub fn fast_member(sys: &CompiledSystem, word: &[usize]) -> Result<FastResult, Error> {
    use PsiKind::*;
    let profile = classify_psi(sys)?;
    if let Some(&t) = word.iter().find(|&&t| t >= sys.terminals().len()) {
        return Err(Error::WordAlphabet(t.to_string()));
    }
    let case = detect_case(&profile, word);
    let decided = |accepted: bool| {
        Ok(FastResult {
            case,
            outcome: if accepted {
                FastOutcome::Accepted
            } else {
                FastOutcome::Rejected
            },
        })
    };
    let delegate = || -> Result<FastResult, Error> {
        Ok(FastResult {
            case,
            outcome: FastOutcome::Delegated(counter_member(sys, word, None)?),
        })
    };
    if case == CaseId::Fallback || matches!(case, CaseId::P10 | CaseId::P11I | CaseId::P11II) {
        return delegate();
    }
    if word.iter().any(|&t| profile.producers[t].is_empty()) {
        return decided(false);
    }
    let has = |t: usize, k| profile.has(t, k);
    let last = word.last().copied();
    let kinds = profile.kinds();
    match case {
        CaseId::P1 => {
            let Some((&x, init)) = word.split_last() else {
                return decided(false);
            };
            decided(has(x, Psi6) && init.iter().all(|&t| has(t, Psi1)))
        }
        CaseId::P2 => decided(word.iter().all(|&t| has(t, Psi1))),
        CaseId::P3 | CaseId::P6 => decided(true),
        CaseId::P4 => {
            if kinds == set(&[Psi7, Psi3, Psi10]) || kinds == set(&[Psi2, Psi3, Psi10]) {
                decided(word.is_empty())
            } else if kinds.contains(&Psi2) {
                decided(push_pop_walk(&profile, word))
            } else {
                decided(true)
            }
        }
        CaseId::P5I | CaseId::P5II | CaseId::P5III => {
            let ok = word.len() % 2 == 0
                && word.iter().enumerate().all(|(i, &t)| {
                    if i % 2 == 0 {
                        has(t, Psi2)
                    } else {
                        has(t, Psi5)
                    }
                });
            decided(ok)
        }
        CaseId::P7 => decided(last.is_some_and(|x| has(x, Psi6))),
        CaseId::P8I => decided(last.map_or(true, |x| has(x, Psi3) && has(x, Psi5))),
        CaseId::P8II => decided(forced_walk(&profile, word)),
        CaseId::P9 => {
            let sp = segment_profile(&profile, word)?;
            decided(p8_sequence_check(&sp) == 0)
        }
        CaseId::P10 | CaseId::P11I | CaseId::P11II | CaseId::Fallback => delegate(),
    }
}
