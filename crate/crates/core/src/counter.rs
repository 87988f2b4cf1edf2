//! Counter systems: the state diagram of an `rl-rb` counter system and a
//! one-counter membership search.
//!
//! A right-boundary second component over `{S2, Z2}` restricted to the six
//! counter productions always has the shape `S2 Z2^k` (or is empty), so it is
//! a counter `k` with a zero test. Diagram nodes pair an RL nonterminal with
//! the symbol on top of the second form; walking the diagram while keeping
//! `k` simulates the system. Systems over `{Z2}` alone have no zero test and
//! are simulated directly on `(nonterminal, k)`.

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::system::{CompiledSystem, CounterRoles, Symbol, Verdict};
use crate::Error;

/// Symbol on top of the second sentential form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    S2,
    Z2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagramNode {
    Pair { nt: usize, mode: Mode },
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CounterOp {
    Plus,
    Minus,
    Zero,
    /// Edge into the final node.
    Finish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiagramEdge {
    pub from: DiagramNode,
    pub to: DiagramNode,
    /// Terminal read, `None` for λ.
    pub read: Option<usize>,
    pub op: CounterOp,
    /// Index of the rewrite the edge comes from.
    pub rewrite: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDiagram {
    pub nodes: Vec<DiagramNode>,
    pub edges: Vec<DiagramEdge>,
    pub initial: DiagramNode,
    pub nonterminals: Vec<Symbol>,
    pub terminals: Vec<Symbol>,
    pub rewrite_ids: Vec<Symbol>,
}

impl StateDiagram {
    pub fn node_name(&self, node: DiagramNode) -> alloc::string::String {
        match node {
            DiagramNode::Pair { nt, mode } => {
                let m = match mode {
                    Mode::S2 => "S2",
                    Mode::Z2 => "Z2",
                };
                alloc::format!("({},{m})", self.nonterminals[nt])
            }
            DiagramNode::Final => "F".to_string(),
        }
    }

    /// Edge label: `x/+`, `x/-`, `x/0`, or `x` into the final node; λ is `~`.
    pub fn edge_label(&self, e: &DiagramEdge) -> alloc::string::String {
        let x = e.read.map_or("~", |t| self.terminals[t].as_str());
        match e.op {
            CounterOp::Plus => alloc::format!("{x}/+"),
            CounterOp::Minus => alloc::format!("{x}/-"),
            CounterOp::Zero => alloc::format!("{x}/0"),
            CounterOp::Finish => x.to_string(),
        }
    }
}

fn bottom_roles(sys: &CompiledSystem) -> Result<(usize, usize), Error> {
    match sys.counter_roles() {
        Some(CounterRoles {
            bottom: Some(s),
            unit,
        }) if sys.family().has_bottom() => Ok((s, unit)),
        _ => Err(Error::WrongFamily {
            expected: "RL_RBc or RL1_RBc",
            found: sys.family(),
        }),
    }
}

pub fn build_state_diagram(sys: &CompiledSystem) -> Result<StateDiagram, Error> {
    let (s, z) = bottom_roles(sys)?;
    let mode = |b: usize| if b == s { Mode::S2 } else { Mode::Z2 };
    let l1 = sys.g1_nonterminals().len();
    let mut nodes: Vec<DiagramNode> = (0..l1)
        .flat_map(|nt| {
            [Mode::S2, Mode::Z2]
                .into_iter()
                .map(move |mode| DiagramNode::Pair { nt, mode })
        })
        .collect();
    nodes.push(DiagramNode::Final);

    let mut edges = Vec::new();
    for (ri, r) in sys.rules().iter().enumerate() {
        let pair = |nt, m| DiagramNode::Pair { nt, mode: m };
        let edge = |from, to, op| DiagramEdge {
            from,
            to,
            read: r.emit,
            op,
            rewrite: ri,
        };
        let lhs = r.g2_lhs;
        match (r.next, r.g2_rhs.as_slice()) {
            (Some(y), [b]) if *b == lhs => {
                edges.push(edge(pair(r.lhs, mode(lhs)), pair(y, mode(lhs)), CounterOp::Zero));
            }
            (Some(y), [b, w]) if *b == lhs && *w == z => {
                edges.push(edge(pair(r.lhs, mode(lhs)), pair(y, Mode::Z2), CounterOp::Plus));
            }
            (Some(y), []) if lhs == z => {
                edges.push(edge(pair(r.lhs, Mode::Z2), pair(y, Mode::Z2), CounterOp::Minus));
                edges.push(edge(pair(r.lhs, Mode::Z2), pair(y, Mode::S2), CounterOp::Minus));
            }
            (None, []) if lhs == s => {
                edges.push(edge(pair(r.lhs, Mode::S2), DiagramNode::Final, CounterOp::Finish));
            }
            // finishing the RL side while the second form is nonempty, or
            // erasing the bottom marker with the RL side still running,
            // blocks every derivation
            _ => {}
        }
    }

    Ok(StateDiagram {
        nodes,
        edges,
        initial: DiagramNode::Pair {
            nt: sys.axiom1(),
            mode: Mode::S2,
        },
        nonterminals: sys.g1_nonterminals().to_vec(),
        terminals: sys.terminals().to_vec(),
        rewrite_ids: sys.rules().iter().map(|r| r.id.clone()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CounterState {
    /// A diagram node (systems with the bottom marker).
    Diagram(DiagramNode),
    /// Active RL nonterminal, `None` once finished (systems without it).
    Net(Option<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CounterConfig {
    pub state: CounterState,
    pub n_z: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterSearch {
    pub verdict: Verdict,
    /// Configurations stored after reading `i` symbols (λ-closed).
    pub layers: Vec<BTreeSet<CounterConfig>>,
    pub cap: u64,
}

impl CounterSearch {
    pub fn max_counter(&self) -> u64 {
        self.layers
            .iter()
            .flatten()
            .map(|c| c.n_z)
            .max()
            .unwrap_or(0)
    }
}

/// Default counter cap `(n+1)(2 l1 + 1) + 1`.
pub fn default_cap(n: usize, l1: usize) -> u64 {
    (n as u64 + 1) * (2 * l1 as u64 + 1) + 1
}

pub fn counter_member(sys: &CompiledSystem, word: &[usize], cap: Option<u64>) -> Result<Verdict, Error> {
    Ok(counter_search(sys, word, cap)?.verdict)
}

pub fn counter_search(
    sys: &CompiledSystem,
    word: &[usize],
    cap: Option<u64>,
) -> Result<CounterSearch, Error> {
    if !sys.family().is_counter() {
        return Err(Error::WrongFamily {
            expected: "a counter family",
            found: sys.family(),
        });
    }
    if let Some(&t) = word.iter().find(|&&t| t >= sys.terminals().len()) {
        return Err(Error::WordAlphabet(t.to_string()));
    }
    let cap = cap.unwrap_or_else(|| default_cap(word.len(), sys.g1_nonterminals().len()));
    if sys.family().has_bottom() {
        let d = build_state_diagram(sys)?;
        Ok(diagram_search(&d, word, cap))
    } else {
        Ok(net_search(sys, word, cap))
    }
}

/// Applies `e` to `(node, k)`; `None` if it blocks. A node in S2 mode is
/// admissible only with an empty counter and a node in Z2 mode only with a
/// nonempty one.
fn traverse(e: &DiagramEdge, k: u64, cap: u64) -> Option<CounterConfig> {
    let k2 = match e.op {
        CounterOp::Plus => k + 1,
        CounterOp::Minus => k.checked_sub(1)?,
        CounterOp::Zero | CounterOp::Finish => k,
    };
    if k2 > cap {
        return None;
    }
    match e.to {
        DiagramNode::Pair { mode: Mode::S2, .. } | DiagramNode::Final if k2 != 0 => None,
        DiagramNode::Pair { mode: Mode::Z2, .. } if k2 == 0 => None,
        _ => Some(CounterConfig {
            state: CounterState::Diagram(e.to),
            n_z: k2,
        }),
    }
}

fn node_of(c: &CounterConfig) -> DiagramNode {
    match c.state {
        CounterState::Diagram(n) => n,
        CounterState::Net(_) => unreachable!("diagram search only"),
    }
}

fn closure<F>(seed: BTreeSet<CounterConfig>, mut step: F) -> BTreeSet<CounterConfig>
where
    F: FnMut(&CounterConfig, &mut Vec<CounterConfig>),
{
    let mut seen = seed.clone();
    let mut stack: Vec<CounterConfig> = seed.into_iter().collect();
    let mut out = Vec::new();
    while let Some(c) = stack.pop() {
        out.clear();
        step(&c, &mut out);
        for &n in &out {
            if seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen
}

fn diagram_search(d: &StateDiagram, word: &[usize], cap: u64) -> CounterSearch {
    let lambda: Vec<&DiagramEdge> = d.edges.iter().filter(|e| e.read.is_none()).collect();
    let lambda_step = |c: &CounterConfig, out: &mut Vec<CounterConfig>| {
        let from = node_of(c);
        out.extend(
            lambda
                .iter()
                .filter(|e| e.from == from)
                .filter_map(|e| traverse(e, c.n_z, cap)),
        );
    };
    let start = CounterConfig {
        state: CounterState::Diagram(d.initial),
        n_z: 0,
    };
    let mut layers = vec![closure(BTreeSet::from([start]), lambda_step)];
    for &x in word {
        let prev = layers.last().expect("nonempty");
        let mut next = BTreeSet::new();
        for c in prev {
            let from = node_of(c);
            next.extend(
                d.edges
                    .iter()
                    .filter(|e| e.from == from && e.read == Some(x))
                    .filter_map(|e| traverse(e, c.n_z, cap)),
            );
        }
        layers.push(closure(next, lambda_step));
    }
    let accepted = layers
        .last()
        .expect("nonempty")
        .iter()
        .any(|c| c.state == CounterState::Diagram(DiagramNode::Final));
    CounterSearch {
        verdict: Verdict::from_bool(accepted),
        layers,
        cap,
    }
}

fn net_search(sys: &CompiledSystem, word: &[usize], cap: u64) -> CounterSearch {
    let apply = |c: &CounterConfig, emit: Option<usize>, out: &mut Vec<CounterConfig>| {
        let CounterState::Net(Some(x)) = c.state else {
            return;
        };
        if c.n_z == 0 {
            return;
        }
        for r in sys.rules() {
            if r.lhs != x || r.emit != emit {
                continue;
            }
            let k = c.n_z - 1 + r.g2_rhs.len() as u64;
            // a finished RL side with Z2's left over can never be accepted
            if k > cap || (r.next.is_none() && k != 0) {
                continue;
            }
            out.push(CounterConfig {
                state: CounterState::Net(r.next),
                n_z: k,
            });
        }
    };
    let lambda_step = |c: &CounterConfig, out: &mut Vec<CounterConfig>| apply(c, None, out);
    let start = CounterConfig {
        state: CounterState::Net(Some(sys.axiom1())),
        n_z: 1,
    };
    let mut layers = vec![closure(BTreeSet::from([start]), lambda_step)];
    let mut buf = Vec::new();
    for &x in word {
        let prev = layers.last().expect("nonempty");
        buf.clear();
        for c in prev {
            apply(c, Some(x), &mut buf);
        }
        layers.push(closure(buf.iter().copied().collect(), lambda_step));
    }
    let done = CounterConfig {
        state: CounterState::Net(None),
        n_z: 0,
    };
    let accepted = layers.last().expect("nonempty").contains(&done);
    CounterSearch {
        verdict: Verdict::from_bool(accepted),
        layers,
        cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_system;
    use crate::system::Family;

    pub(crate) const EX51: &str = "system ex51\ntype rl-rb\ng1.terminals a b\ng1.nonterminals S1 X\n\
        g2.nonterminals Z2\nrewrite r1 : S1 -> a S1 ; Z2 -> Z2 Z2\nrewrite r2 : S1 -> X ; Z2 -> ~\n\
        rewrite r3 : X -> b X ; Z2 -> ~\nrewrite r4 : X -> b ; Z2 -> ~\n";
    pub(crate) const EX52: &str = "system ex52\ntype rl-rb\ng1.terminals a b\ng1.nonterminals S1 X\n\
        g2.nonterminals S2 Z2\nrewrite r1 : S1 -> S1 ; S2 -> S2 Z2\nrewrite r2 : S1 -> a S1 ; Z2 -> Z2 Z2\n\
        rewrite r3 : S1 -> X ; Z2 -> ~\nrewrite r4 : X -> b X ; Z2 -> ~\nrewrite r5 : X -> ~ ; S2 -> ~\n";

    fn sys(text: &str) -> CompiledSystem {
        parse_system(text).unwrap().compile().unwrap()
    }

    fn member(s: &CompiledSystem, w: &str) -> Verdict {
        counter_member(s, &s.parse_word(w).unwrap(), None).unwrap()
    }

    #[test]
    fn diagram_of_the_counter_example() {
        let s = sys(EX52);
        let d = build_state_diagram(&s).unwrap();
        assert_eq!(d.nodes.len(), 5);
        assert!(d.nodes.len() <= 2 * s.g1_nonterminals().len() + 1);
        let mut got: Vec<(String, String, String)> = d
            .edges
            .iter()
            .map(|e| (d.node_name(e.from), d.edge_label(e), d.node_name(e.to)))
            .collect();
        got.sort();
        let mut want: Vec<(String, String, String)> = [
            ("(S1,S2)", "~/+", "(S1,Z2)"),
            ("(S1,Z2)", "a/+", "(S1,Z2)"),
            ("(S1,Z2)", "~/-", "(X,Z2)"),
            ("(S1,Z2)", "~/-", "(X,S2)"),
            ("(X,Z2)", "b/-", "(X,Z2)"),
            ("(X,Z2)", "b/-", "(X,S2)"),
            ("(X,S2)", "~", "F"),
        ]
        .iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(d.initial, DiagramNode::Pair { nt: 0, mode: Mode::S2 });
    }

    #[test]
    fn diagram_needs_the_bottom_marker() {
        assert!(matches!(
            build_state_diagram(&sys(EX51)),
            Err(Error::WrongFamily { .. })
        ));
    }

    #[test]
    fn counter_example_language() {
        let s = sys(EX52);
        assert_eq!(member(&s, ""), Verdict::Accepted);
        assert_eq!(member(&s, "aabb"), Verdict::Accepted);
        assert_eq!(member(&s, "aab"), Verdict::Rejected);
        assert_eq!(member(&s, "abab"), Verdict::Rejected);
    }

    #[test]
    fn counter_net_example_language() {
        let s = sys(EX51);
        assert_eq!(member(&s, "ba"), Verdict::Rejected);
        assert_eq!(member(&s, "ab"), Verdict::Accepted);
        assert_eq!(member(&s, "aaabbb"), Verdict::Accepted);
        assert_eq!(member(&s, ""), Verdict::Rejected);
    }

    #[test]
    fn s2_mode_never_holds_a_positive_counter() {
        let s = sys(EX52);
        let run = counter_search(&s, &s.parse_word("aaabbb").unwrap(), None).unwrap();
        for c in run.layers.iter().flatten() {
            if let CounterState::Diagram(DiagramNode::Pair { mode, .. }) = c.state {
                assert_eq!(mode == Mode::S2, c.n_z == 0);
            }
        }
    }

    #[test]
    fn wrong_family_and_alphabet() {
        let zs = EX51.replace("rl-rb", "rl-0s");
        assert!(matches!(
            counter_member(&sys(&zs), &[], None),
            Err(Error::WrongFamily { .. })
        ));
        assert_eq!(
            counter_member(&sys(EX51), &[9], None),
            Err(Error::WordAlphabet("9".into()))
        );
    }

    #[test]
    fn zero_test_and_recharge() {
        // (ab)* via a zero test after each block: a/+ from the bottom, b/-
        let text = "system z\ntype rl-rb\ng1.terminals a b\ng1.nonterminals S1\n\
            g2.nonterminals S2 Z2\nrewrite p : S1 -> a S1 ; S2 -> S2 Z2\n\
            rewrite m : S1 -> b S1 ; Z2 -> ~\nrewrite f : S1 -> ~ ; S2 -> ~\n";
        let s = sys(text);
        assert_eq!(s.family(), Family::OneStateCounter);
        assert_eq!(member(&s, "abab"), Verdict::Accepted);
        assert_eq!(member(&s, "aabb"), Verdict::Rejected);
    }

    #[test]
    fn finished_runs_with_leftover_counters_are_dropped() {
        let text = "system g\ntype rl-rb\ng1.terminals a\ng1.nonterminals S1\n\
            g2.nonterminals Z2\nrewrite g : S1 -> a ; Z2 -> Z2 Z2\n\
            rewrite e : S1 -> a ; Z2 -> ~\n";
        let s = sys(text);
        let r = counter_search(&s, &[0], None).unwrap();
        assert_eq!(r.verdict, Verdict::Accepted);
        assert_eq!(r.max_counter(), 1);
    }

    use alloc::string::String;
}
