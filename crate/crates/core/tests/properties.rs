use ctslab_core::counter::{counter_member, counter_search};
use ctslab_core::format::{parse_system, render_system};
use ctslab_core::onestate::{
    classify_psi, detect_case, fast_member, p8_sequence_check, segment_profile, CaseId,
};
use ctslab_core::oracle::{oracle_member, replay, OracleLimits, OracleStatus};
use ctslab_core::parikh::recognize_rt_0s;
use ctslab_core::{CompiledSystem, Form2, Verdict};
use proptest::prelude::*;

const G1_NTS: [&str; 3] = ["S1", "X", "Y"];
const TERMS: [&str; 2] = ["a", "b"];

#[derive(Debug, Clone)]
struct Draft {
    kind: &'static str,
    l1: usize,
    bottom: bool,
    rules: Vec<(usize, u8, usize, usize, u8)>,
}

fn g2_forms(bottom: bool) -> &'static [&'static str] {
    if bottom {
        &["S2 -> S2", "S2 -> S2 Z2", "Z2 -> Z2", "Z2 -> Z2 Z2", "Z2 -> ~", "S2 -> ~"]
    } else {
        &["Z2 -> Z2", "Z2 -> Z2 Z2", "Z2 -> ~"]
    }
}

fn render(draft: &Draft) -> String {
    let nts = &G1_NTS[..draft.l1];
    let mut s = format!(
        "system gen\ntype {}\ng1.terminals a b\ng1.nonterminals {}\ng2.nonterminals {}\n",
        draft.kind,
        nts.join(" "),
        if draft.bottom { "S2 Z2" } else { "Z2" }
    );
    let forms = g2_forms(draft.bottom);
    for (i, &(lhs, g1, t, next, g2)) in draft.rules.iter().enumerate() {
        let (x, y) = (TERMS[t], nts[next % draft.l1]);
        let rhs = match g1 % 4 {
            0 => format!("{x} {y}"),
            1 => x.to_string(),
            2 => y.to_string(),
            _ => "~".to_string(),
        };
        s.push_str(&format!(
            "rewrite r{i} : {} -> {rhs} ; {}\n",
            nts[lhs % draft.l1],
            forms[g2 as usize % forms.len()]
        ));
    }
    s
}

fn counter_draft() -> impl Strategy<Value = Draft> {
    (1usize..=3, any::<bool>()).prop_flat_map(|(l1, bottom)| {
        prop::collection::vec((0..l1, 0u8..4, 0usize..2, 0..l1, 0u8..6), 1..=6).prop_map(
            move |rules| Draft {
                kind: "rl-rb",
                l1,
                bottom,
                rules,
            },
        )
    })
}

fn one_state_draft() -> impl Strategy<Value = Draft> {
    (any::<bool>(), prop::collection::vec((0u8..4, 0usize..2, 0u8..6), 1..=6)).prop_map(
        |(bottom, rules)| Draft {
            kind: "rl-rb",
            l1: 1,
            bottom,
            rules: rules.into_iter().map(|(g1, t, g2)| (0, g1, t, 0, g2)).collect(),
        },
    )
}

fn real_time_0s_draft() -> impl Strategy<Value = Draft> {
    (1usize..=3).prop_flat_map(|l1| {
        prop::collection::vec((0..l1, 0u8..2, 0usize..2, 0..l1, 0u8..6), 1..=6).prop_map(
            move |rules| Draft {
                kind: "rl-0s",
                l1,
                bottom: true,
                rules,
            },
        )
    })
}

fn compile(draft: &Draft) -> CompiledSystem {
    let text = render(draft);
    parse_system(&text)
        .unwrap()
        .compile()
        .unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, 0..=6)
}

fn checked_oracle(sys: &CompiledSystem, w: &[usize]) -> Option<bool> {
    let v = oracle_member(sys, w, &OracleLimits::for_word_len(w.len()));
    v.is_conclusive().then(|| v.is_accepted())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_parse_round_trip(draft in counter_draft()) {
        let sys = parse_system(&render(&draft)).unwrap();
        let again = parse_system(&render_system(&sys)).unwrap();
        prop_assert_eq!(&sys, &again);
        prop_assert_eq!(render_system(&sys), render_system(&again));
    }

    #[test]
    fn witnesses_replay_and_conserve_parikh(draft in counter_draft(), w in word()) {
        let sys = compile(&draft);
        let v = oracle_member(&sys, &w, &OracleLimits::for_word_len(w.len()));
        if let Some(ids) = v.witness {
            let snaps = replay(&sys, &ids).unwrap();
            let last = snaps.last().unwrap();
            prop_assert!(sys.is_successful(last));
            prop_assert_eq!(&last.emitted, &w);
            let l2 = sys.g2_nonterminals().len();
            let mut expect: Vec<i64> =
                sys.initial_form2().parikh(l2).iter().map(|&k| k as i64).collect();
            for id in &ids {
                for (e, d) in expect.iter_mut().zip(sys.net_effect(id.as_str()).unwrap().as_slice()) {
                    *e += d;
                }
            }
            let got: Vec<i64> = last.form2.parikh(l2).iter().map(|&k| k as i64).collect();
            prop_assert_eq!(got, expect);
            // every intermediate sentential form keeps a terminal prefix of w
            for s in &snaps {
                prop_assert!(w.starts_with(&s.emitted));
            }
        }
    }

    #[test]
    fn real_time_witness_length(draft in real_time_0s_draft(), w in word()) {
        let sys = compile(&draft);
        prop_assert!(sys.is_real_time());
        let v = oracle_member(&sys, &w, &OracleLimits::for_word_len(w.len()));
        prop_assert!(v.is_conclusive());
        if let Some(ids) = v.witness {
            prop_assert!(ids.len() == w.len() || ids.len() == w.len() + 1);
        }
    }

    #[test]
    fn parikh_recognizer_matches_oracle(draft in real_time_0s_draft(), w in word()) {
        let sys = compile(&draft);
        let expect = checked_oracle(&sys, &w).unwrap();
        prop_assert_eq!(recognize_rt_0s(&sys, &w).unwrap(), Verdict::from_bool(expect));
    }

    #[test]
    fn counter_matches_oracle(draft in counter_draft(), w in word()) {
        let sys = compile(&draft);
        if let Some(expect) = checked_oracle(&sys, &w) {
            prop_assert_eq!(counter_member(&sys, &w, None).unwrap(), Verdict::from_bool(expect));
        }
    }

    #[test]
    fn counter_search_is_deterministic(draft in counter_draft(), w in word()) {
        let sys = compile(&draft);
        let a = counter_search(&sys, &w, None).unwrap();
        let b = counter_search(&sys, &w, None).unwrap();
        prop_assert_eq!(&a, &b);
        let mut rev = draft.clone();
        rev.rules.reverse();
        let c = counter_search(&compile(&rev), &w, None).unwrap();
        prop_assert_eq!(a.layers, c.layers);
    }

    #[test]
    fn bottom_mode_configs_hold_an_empty_counter(draft in counter_draft(), w in word()) {
        use ctslab_core::counter::{CounterState, DiagramNode, Mode};
        let sys = compile(&draft);
        let s = counter_search(&sys, &w, None).unwrap();
        for c in s.layers.iter().flatten() {
            if let CounterState::Diagram(DiagramNode::Pair { mode: Mode::S2, .. }) = c.state {
                prop_assert_eq!(c.n_z, 0);
            }
        }
    }

    #[test]
    fn oracle_is_monotone_in_its_limits(draft in counter_draft(), w in word()) {
        let sys = compile(&draft);
        let small = oracle_member(&sys, &w, &OracleLimits::for_word_len(w.len()));
        let big_lim = OracleLimits {
            max_form2_size: 8 * (w.len() + 2),
            max_steps: 128 * (w.len() + 2),
            max_frontier: 2_000_000,
        };
        let big = oracle_member(&sys, &w, &big_lim);
        if small.is_conclusive() {
            prop_assert_eq!(small.status, big.status);
        }
        if small.status == OracleStatus::Accepted {
            prop_assert!(big.is_accepted());
        }
    }

    #[test]
    fn fast_path_matches_counter_and_oracle(draft in one_state_draft(), w in word()) {
        let sys = compile(&draft);
        let r = fast_member(&sys, &w).unwrap();
        let counter = counter_member(&sys, &w, None).unwrap();
        prop_assert_eq!(r.verdict(), counter, "case {}", r.case.label());
        if let Some(expect) = checked_oracle(&sys, &w) {
            prop_assert_eq!(r.verdict(), Verdict::from_bool(expect));
        }
    }

    #[test]
    fn case_detection_ignores_rewrite_order(draft in one_state_draft(), w in word()) {
        let sys = compile(&draft);
        let mut rev = draft.clone();
        rev.rules.reverse();
        let rsys = compile(&rev);
        let p = classify_psi(&sys).unwrap();
        let q = classify_psi(&rsys).unwrap();
        prop_assert_eq!(detect_case(&p, &w), detect_case(&q, &w));
        prop_assert_eq!(p.kinds(), q.kinds());
    }
}

fn p9() -> CompiledSystem {
    parse_system(
        "system p9\ntype rl-rb\ng1.terminals a b\ng1.nonterminals S1\ng2.nonterminals S2 Z2\n\
         rewrite r7 : S1 -> S1 ; S2 -> S2 Z2\nrewrite r3 : S1 -> a S1 ; Z2 -> Z2 Z2\n\
         rewrite r5 : S1 -> b S1 ; Z2 -> ~\nrewrite r10 : S1 -> ~ ; S2 -> ~\n",
    )
    .unwrap()
    .compile()
    .unwrap()
}

proptest! {
    #[test]
    fn segment_profile_tallies_the_word(w in prop::collection::vec(0usize..2, 0..=14)) {
        let sys = p9();
        let p = classify_psi(&sys).unwrap();
        prop_assert_eq!(detect_case(&p, &w), if w.is_empty() { detect_case(&p, &[]) } else { CaseId::P9 });
        let sp = segment_profile(&p, &w).unwrap();
        prop_assert_eq!(sp.decomposition.iter().map(|s| s.len).sum::<usize>(), w.len());
        prop_assert_eq!(sp.eta3.iter().sum::<u64>() as usize, w.iter().filter(|&&t| t == 0).count());
        prop_assert_eq!(sp.eta5.iter().sum::<u64>() as usize, w.iter().filter(|&&t| t == 1).count());
    }

    #[test]
    fn p9_verdict_matches_the_oracle(w in prop::collection::vec(0usize..2, 0..=10)) {
        let sys = p9();
        let p = classify_psi(&sys).unwrap();
        let s = p8_sequence_check(&segment_profile(&p, &w).unwrap());
        let expect = checked_oracle(&sys, &w).unwrap();
        prop_assert_eq!(s == 0, expect);
    }
}

#[test]
fn within_segment_permutation_keeps_the_verdict() {
    // on the two-terminal p9 system every segment is a run of one letter,
    // so a segment-preserving permutation is the identity; swapping across a
    // boundary must recompute the decomposition
    let sys = p9();
    let p = classify_psi(&sys).unwrap();
    let w = sys.parse_word("aabbab").unwrap();
    let sp = segment_profile(&p, &w).unwrap();
    let swapped = sys.parse_word("ababab").unwrap();
    let sq = segment_profile(&p, &swapped).unwrap();
    assert_ne!(sp.decomposition, sq.decomposition);
    assert_eq!(sp.decomposition.iter().map(|s| s.len).sum::<usize>(), 6);
    for (word, s) in [(&w, &sp), (&swapped, &sq)] {
        let expect = checked_oracle(&sys, word).unwrap();
        assert_eq!(p8_sequence_check(s) == 0, expect);
    }
}

#[test]
fn form2_parikh_of_sequences_and_multisets() {
    assert_eq!(Form2::Sequence(vec![0, 1, 1]).parikh(2), vec![1, 2]);
    assert_eq!(Form2::Multiset(vec![3, 0]).parikh(2), vec![3, 0]);
}
