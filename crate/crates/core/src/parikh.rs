//! Membership for real-time `rl-0s` systems by Parikh-vector simulation.
//!
//! In a 0-sequential system only the multiset of second-component symbols
//! matters, and in a real-time system every step but a closing `X -> λ`
//! reads one input symbol. A configuration is therefore the active
//! nonterminal plus a count vector, and layer `i` holds every configuration
//! reachable after reading `i` symbols.

use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::system::{CompiledSystem, SystemKind, Verdict};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParikhConfig {
    /// Active nonterminal; `None` once the RL component has finished.
    pub state: Option<usize>,
    pub parikh: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParikhLayers {
    /// `n + 1` layers; the last also holds the results of closing
    /// `X -> λ` moves.
    pub layers: Vec<BTreeSet<ParikhConfig>>,
}

impl ParikhLayers {
    pub fn accepts(&self) -> bool {
        let last = self.layers.last().expect("at least layer 0");
        last.iter()
            .any(|c| c.state.is_none() && c.parikh.iter().all(|&k| k == 0))
    }

    /// Largest count stored in any layer.
    pub fn max_entry(&self) -> u32 {
        self.layers
            .iter()
            .flatten()
            .flat_map(|c| c.parikh.iter().copied())
            .max()
            .unwrap_or(0)
    }
}

fn check(sys: &CompiledSystem, word: &[usize]) -> Result<(), Error> {
    if sys.kind() != SystemKind::ZeroSequential {
        return Err(Error::NotZeroSequential);
    }
    if !sys.is_real_time() {
        return Err(Error::NotRealTime);
    }
    if let Some(&t) = word.iter().find(|&&t| t >= sys.terminals().len()) {
        return Err(Error::WordAlphabet(t.to_string()));
    }
    Ok(())
}

/// Successors of `c` by the rules emitting `emit` (`None`: closing moves).
fn successors<'a>(
    sys: &'a CompiledSystem,
    c: &'a ParikhConfig,
    emit: Option<usize>,
) -> impl Iterator<Item = ParikhConfig> + 'a {
    sys.rules()
        .iter()
        .filter(move |r| Some(r.lhs) == c.state && r.emit == emit && c.parikh[r.g2_lhs] > 0)
        .map(move |r| {
            let parikh = c
                .parikh
                .iter()
                .zip(&r.effect.0)
                .map(|(&k, &d)| (i64::from(k) + d) as u32)
                .collect();
            ParikhConfig {
                state: r.next,
                parikh,
            }
        })
}

pub fn parikh_layers(sys: &CompiledSystem, word: &[usize]) -> Result<ParikhLayers, Error> {
    check(sys, word)?;
    let mut axiom = vec![0u32; sys.g2_nonterminals().len()];
    axiom[sys.axiom2()] = 1;
    let mut layers = vec![BTreeSet::from([ParikhConfig {
        state: Some(sys.axiom1()),
        parikh: axiom,
    }])];
    for &x in word {
        let prev = layers.last().expect("nonempty");
        let next: BTreeSet<ParikhConfig> = prev
            .iter()
            .flat_map(|c| successors(sys, c, Some(x)))
            .collect();
        layers.push(next);
    }
    let last = layers.last_mut().expect("nonempty");
    let closed: Vec<ParikhConfig> = last
        .iter()
        .filter(|c| c.state.is_some())
        .flat_map(|c| successors(sys, c, None))
        .collect();
    last.extend(closed);
    Ok(ParikhLayers { layers })
}

pub fn recognize_rt_0s(sys: &CompiledSystem, word: &[usize]) -> Result<Verdict, Error> {
    Ok(Verdict::from_bool(parikh_layers(sys, word)?.accepts()))
}
