//! Two-component coordinated table selective substitution systems.
//!
//! A cts system couples a right-linear grammar (the component that emits the
//! word) with a second grammar over nonterminals only, which is rewritten
//! either at an arbitrary position (0-sequential, `rl-0s`) or at its rightmost
//! symbol (right-boundary, `rl-rb`). Every derivation step applies one rewrite,
//! a pair of productions, to both components at once.
//!
//! The crate provides the data model and text codecs ([`system`], [`format`]),
//! a brute-force derivation oracle ([`oracle`]) and the faster recognizers that
//! are checked against it: Parikh-vector simulation for real-time `rl-0s`
//! systems ([`parikh`]), state-diagram counter simulation for counter systems
//! ([`counter`]), and case-based procedures for one-nonterminal counter systems
//! ([`onestate`]). [`petri`] gives labeled Petri net semantics and structural
//! translations to and from `rl-0s` systems.
//!
//! The crate is `no_std` (it needs `alloc`); enable the `std` feature to get
//! `std::error::Error`-based integration for free through `core::error::Error`.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod counter;
pub mod error;
pub mod format;
pub mod onestate;
pub mod oracle;
pub mod parikh;
pub mod petri;
pub mod system;

pub use error::{Error, ParseError, StepError};
pub use system::{
    CompiledSystem, CtsSystem, Family, Form2, NetEffect, Rewrite, RewriteRule, Snapshot, Symbol,
    SystemKind, SystemShape, ValidationReport, Verdict, Violation,
};
