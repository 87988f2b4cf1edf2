//! Exhaustive breadth-first derivation search: the reference membership test
//! every other recognizer is checked against.
//!
//! States are `(emitted length, active nonterminal, form2)`; the emitted
//! prefix itself is implied because successors that emit a symbol other than
//! the next input symbol are never generated. A global visited set makes the
//! first visit of a state the shallowest one, so witnesses are shortest.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::system::{CompiledSystem, Form2, Snapshot, Symbol};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_form2_size: usize,
    pub max_steps: usize,
    pub max_frontier: usize,
}

pub const DEFAULT_MAX_FRONTIER: usize = 1_000_000;

impl OracleLimits {
    /// Defaults for a word of length `n`: `4(n+2)`, `64(n+2)`, `10^6`.
    pub fn for_word_len(n: usize) -> OracleLimits {
        OracleLimits {
            max_form2_size: 4 * (n + 2),
            max_steps: 64 * (n + 2),
            max_frontier: DEFAULT_MAX_FRONTIER,
        }
    }
}

/// How limits are chosen for each word of an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitPolicy {
    #[default]
    Default,
    DefaultWithFrontier(usize),
    Fixed(OracleLimits),
}

impl LimitPolicy {
    pub fn resolve(self, n: usize) -> OracleLimits {
        match self {
            LimitPolicy::Default => OracleLimits::for_word_len(n),
            LimitPolicy::DefaultWithFrontier(f) => OracleLimits {
                max_frontier: f,
                ..OracleLimits::for_word_len(n)
            },
            LimitPolicy::Fixed(l) => l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LimitHit {
    Form2Size,
    Steps,
    Frontier,
}

impl LimitHit {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitHit::Form2Size => "max-form2-size",
            LimitHit::Steps => "max-steps",
            LimitHit::Frontier => "max-frontier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Accepted,
    Rejected,
    Inconclusive(LimitHit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub status: OracleStatus,
    /// Rewrite ids of a successful derivation, present iff accepted.
    pub witness: Option<Vec<Symbol>>,
}

impl OracleVerdict {
    pub fn is_accepted(&self) -> bool {
        self.status == OracleStatus::Accepted
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self.status, OracleStatus::Inconclusive(_))
    }
}

type Key = (usize, Option<usize>, Form2);

/// Longest path in the graph of chain rules, or `None` if it has a cycle.
fn chain_depth(sys: &CompiledSystem) -> Option<usize> {
    let l1 = sys.g1_nonterminals().len();
    let mut succ = vec![Vec::new(); l1];
    for r in sys.rules().iter().filter(|r| r.is_chain()) {
        succ[r.lhs].extend(r.next);
    }
    // 0 unvisited, 1 on stack, 2 done
    fn visit(v: usize, succ: &[Vec<usize>], mark: &mut [u8], depth: &mut [usize]) -> bool {
        mark[v] = 1;
        let mut best = 0;
        for &w in &succ[v] {
            let m = mark[w];
            if m == 1 || (m == 0 && !visit(w, succ, mark, depth)) {
                return false;
            }
            best = best.max(depth[w] + 1);
        }
        depth[v] = best;
        mark[v] = 2;
        true
    }
    let mut mark = vec![0u8; l1];
    let mut depth = vec![0usize; l1];
    for v in 0..l1 {
        if mark[v] == 0 && !visit(v, &succ, &mut mark, &mut depth) {
            return None;
        }
    }
    Some(depth.into_iter().max().unwrap_or(0))
}

/// Decides `word ∈ L(sys)` by exhaustive search within `lim`.
pub fn oracle_member(sys: &CompiledSystem, word: &[usize], lim: &OracleLimits) -> OracleVerdict {
    let n = word.len();
    let chain = chain_depth(sys);
    // With an acyclic chain graph of depth L at most (n-pos)(L+1)+L+1 steps
    // remain and each step deletes at most one form2 symbol.
    let hopeless = |pos: usize, size: usize| match chain {
        Some(l) => size > (n - pos) * (l + 1) + l + 1,
        None => false,
    };

    // arena of (parent, rule) for witness reconstruction
    let mut arena: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let witness = |arena: &[(usize, usize)], mut at: usize, last: usize| {
        let mut rules = vec![last];
        while arena[at].0 != usize::MAX {
            rules.push(arena[at].1);
            at = arena[at].0;
        }
        rules.reverse();
        rules
            .into_iter()
            .map(|r| sys.rules()[r].id.clone())
            .collect::<Vec<_>>()
    };

    let start: Key = (0, Some(sys.axiom1()), sys.initial_form2());
    let mut visited: BTreeSet<Key> = BTreeSet::new();
    visited.insert(start.clone());
    let mut frontier: Vec<(Key, usize)> = vec![(start, 0)];
    let mut hit: Option<LimitHit> = None;
    let mut depth = 0usize;

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for ((pos, active, form2), at) in &frontier {
            let Some(x) = *active else { continue };
            for (ri, rule) in sys.rules().iter().enumerate() {
                if rule.lhs != x {
                    continue;
                }
                let npos = match rule.emit {
                    Some(t) if *pos < n && word[*pos] == t => pos + 1,
                    Some(_) => continue,
                    None => *pos,
                };
                let Ok(f2) = sys.apply_g2(ri, form2) else {
                    continue;
                };
                if npos == n && rule.next.is_none() && f2.is_empty() {
                    return OracleVerdict {
                        status: OracleStatus::Accepted,
                        witness: Some(witness(&arena, *at, ri)),
                    };
                }
                // dead ends: finished RL component, or nothing left to rewrite
                if rule.next.is_none() || f2.is_empty() {
                    continue;
                }
                let size = f2.len();
                if hopeless(npos, size) {
                    continue;
                }
                if size > lim.max_form2_size {
                    hit.get_or_insert(LimitHit::Form2Size);
                    continue;
                }
                if depth + 2 > lim.max_steps {
                    hit.get_or_insert(LimitHit::Steps);
                    continue;
                }
                let key = (npos, rule.next, f2);
                if visited.contains(&key) {
                    continue;
                }
                visited.insert(key.clone());
                arena.push((*at, ri));
                next.push((key, arena.len() - 1));
            }
        }
        if next.len() > lim.max_frontier {
            return OracleVerdict {
                status: OracleStatus::Inconclusive(LimitHit::Frontier),
                witness: None,
            };
        }
        frontier = next;
        depth += 1;
    }

    OracleVerdict {
        status: match hit {
            Some(h) => OracleStatus::Inconclusive(h),
            None => OracleStatus::Rejected,
        },
        witness: None,
    }
}

/// Replays rewrite ids from the initial snapshot.
pub fn replay(sys: &CompiledSystem, ids: &[Symbol]) -> Result<Vec<Snapshot>, Error> {
    let mut snaps = vec![sys.initial_snapshot()];
    for id in ids {
        let next = sys.derive_step_by_id(snaps.last().expect("nonempty"), id.as_str())?;
        snaps.push(next);
    }
    Ok(snaps)
}

/// All words over `0..alphabet` of length at most `max_len`, in
/// length-lexicographic order.
pub fn words_up_to(alphabet: usize, max_len: usize) -> Words {
    Words {
        alphabet,
        max_len,
        current: Some(Vec::new()),
    }
}

#[derive(Debug, Clone)]
pub struct Words {
    alphabet: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut succ = out.clone();
        // increment as a base-`alphabet` counter; overflow grows the length
        let mut i = succ.len();
        loop {
            if i == 0 {
                if succ.len() < self.max_len && self.alphabet > 0 {
                    succ = vec![0; succ.len() + 1];
                    self.current = Some(succ);
                }
                break;
            }
            i -= 1;
            if succ[i] + 1 < self.alphabet {
                succ[i] += 1;
                self.current = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Accepted words in length-lexicographic order.
    pub words: Vec<Vec<usize>>,
    /// Words whose search hit a limit.
    pub inconclusive: Vec<Vec<usize>>,
}

impl Enumeration {
    pub fn is_complete(&self) -> bool {
        self.inconclusive.is_empty()
    }
}

/// `{ w : |w| ≤ max_len, oracle_member(w) accepted }`.
pub fn enumerate_language(sys: &CompiledSystem, max_len: usize, policy: LimitPolicy) -> Enumeration {
    let mut out = Enumeration {
        words: Vec::new(),
        inconclusive: Vec::new(),
    };
    for w in words_up_to(sys.terminals().len(), max_len) {
        let v = oracle_member(sys, &w, &policy.resolve(w.len()));
        match v.status {
            OracleStatus::Accepted => out.words.push(w),
            OracleStatus::Rejected => {}
            OracleStatus::Inconclusive(_) => out.inconclusive.push(w),
        }
    }
    out
}
