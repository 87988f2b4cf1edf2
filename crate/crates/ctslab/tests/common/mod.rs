//! Seeded random systems and nets for the integration and acceptance tests.
#![allow(dead_code)]

use std::path::PathBuf;

use ctslab_core::format::parse_system;
use ctslab_core::oracle::{oracle_member, words_up_to, OracleLimits};
use ctslab_core::petri::{parse_pn, PetriNet};
use ctslab_core::{CompiledSystem, Family};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const G1_NTS: [&str; 4] = ["S1", "X", "Y", "W"];
pub const OS_NTS: [&str; 3] = ["B1", "B2", "B3"];
pub const TERMINALS: [&str; 3] = ["a", "b", "c"];

pub fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

pub fn load(name: &str) -> CompiledSystem {
    let text = std::fs::read_to_string(systems_dir().join(name)).unwrap();
    parse_system(&text).unwrap().compile().unwrap()
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub family: Family,
    pub text: String,
    pub sys: CompiledSystem,
}

pub const FAMILIES: [Family; 5] = [
    Family::ZeroSequential,
    Family::Counter,
    Family::CounterNet,
    Family::OneStateCounter,
    Family::OneStateCounterNet,
];

fn g1_rhs(rng: &mut ChaCha8Rng, nts: &[&str], terms: &[&str], emitting: bool, chains: bool) -> String {
    let x = terms.choose(rng).unwrap();
    let y = nts.choose(rng).unwrap();
    loop {
        match rng.gen_range(0..10) {
            0..=5 => return format!("{x} {y}"),
            6 | 7 => return x.to_string(),
            8 if chains => return y.to_string(),
            9 if !emitting => return "~".to_string(),
            _ => {}
        }
    }
}

/// Text of a random system of `family`; may fail to compile or land in
/// another family, which [`generate`] filters out.
fn candidate(rng: &mut ChaCha8Rng, family: Family) -> String {
    let zero_seq = family == Family::ZeroSequential;
    let bottom = family.has_bottom();
    let l1 = match family {
        Family::OneStateCounter | Family::OneStateCounterNet => 1,
        Family::ZeroSequential => rng.gen_range(1..=4),
        _ => rng.gen_range(2..=4),
    };
    let t = if zero_seq && rng.gen_bool(0.2) { 3 } else { 2 };
    let nts = &G1_NTS[..l1];
    let terms = &TERMINALS[..t];
    let g2: Vec<&str> = if zero_seq {
        OS_NTS[..rng.gen_range(1..=3)].to_vec()
    } else if bottom {
        vec!["S2", "Z2"]
    } else {
        vec!["Z2"]
    };
    // real-time 0S systems, half of them without λ rules; counter systems
    // are chain-free half of the time
    let emitting = zero_seq && rng.gen_bool(0.5);
    let chains = !zero_seq && rng.gen_bool(0.5);
    let counter_forms: &[&str] = if bottom {
        &["S2 -> S2", "S2 -> S2 Z2", "Z2 -> Z2", "Z2 -> Z2 Z2", "Z2 -> ~", "S2 -> ~"]
    } else {
        &["Z2 -> Z2", "Z2 -> Z2 Z2", "Z2 -> ~"]
    };
    let mut s = format!(
        "system gen\ntype {}\ng1.terminals {}\ng1.nonterminals {}\ng2.nonterminals {}\n",
        if zero_seq { "rl-0s" } else { "rl-rb" },
        terms.join(" "),
        nts.join(" "),
        g2.join(" ")
    );
    let count = rng.gen_range(2..=8);
    for i in 0..count {
        let lhs = nts.choose(rng).unwrap();
        let rhs1 = g1_rhs(rng, nts, terms, emitting, chains);
        let prod2 = if zero_seq {
            let b = g2.choose(rng).unwrap();
            let k = rng.gen_range(0..=2);
            let rhs: Vec<&str> = (0..k).map(|_| *g2.choose(rng).unwrap()).collect();
            let rhs = if rhs.is_empty() { "~".to_string() } else { rhs.join(" ") };
            format!("{b} -> {rhs}")
        } else {
            counter_forms.choose(rng).unwrap().to_string()
        };
        s.push_str(&format!("rewrite r{i} : {lhs} -> {rhs1} ; {prod2}\n"));
    }
    s
}

/// Some word of length at most 5 is accepted.
fn nonempty(sys: &CompiledSystem) -> bool {
    words_up_to(sys.terminals().len(), 5)
        .any(|w| oracle_member(sys, &w, &OracleLimits::for_word_len(w.len())).is_accepted())
}

/// `per_family` systems of each family in [`FAMILIES`] with a nonempty
/// language; 0S systems are real-time.
pub fn generate(seed: u64, per_family: usize) -> Vec<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for family in FAMILIES {
        let mut made = 0;
        while made < per_family {
            let text = candidate(&mut rng, family);
            let Ok(sys) = parse_system(&text).unwrap().compile() else {
                continue;
            };
            if sys.family() != family || !nonempty(&sys) {
                continue;
            }
            if family == Family::ZeroSequential && !sys.is_real_time() {
                continue;
            }
            let text = text.replacen("system gen", &format!("system gen_{}_{made}", family.label()), 1);
            let sys = parse_system(&text).unwrap().compile().unwrap();
            out.push(Generated { family, text, sys });
            made += 1;
        }
    }
    out
}

/// Nets admissible for the net-to-system translation: one start token,
/// λ-free, one input place of weight 1 per transition, zero final marking.
pub fn admissible_nets(seed: u64, count: usize) -> Vec<PetriNet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let places = rng.gen_range(1..=4);
            let mut s = format!("pn net{k}\nplaces");
            for p in 0..places {
                s.push_str(&format!(" p{p}"));
            }
            s.push_str("\nalphabet a b\n");
            for t in 0..rng.gen_range(1..=6) {
                let x = ["a", "b"].choose(&mut rng).unwrap();
                let input = rng.gen_range(0..places);
                let mut outs = String::new();
                for p in 0..places {
                    let w = [0, 0, 1, 1, 2].choose(&mut rng).copied().unwrap();
                    if w > 0 {
                        outs.push_str(&format!(" p{p}:{w}"));
                    }
                }
                s.push_str(&format!("transition t{t} label {x} in p{input}:1 out{outs}\n"));
            }
            s.push_str(&format!("marking p{}:1\nfinal\n", rng.gen_range(0..places)));
            parse_pn(&s).unwrap_or_else(|e| panic!("{e}\n{s}"))
        })
        .collect()
}
