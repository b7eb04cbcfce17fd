//! Forbidden-subsequence laboratory.
//!
//! The crate has three layers:
//!
//! * [`seq`] — sequences over integer symbols, isomorphic-containment
//!   matching and its brute-force oracle;
//! * [`encoding`] and [`synth`] — the suit-string DSL and the labeled-tree
//!   synthesis that turns legal encodings into forbidden subsequences;
//! * [`compress`], [`ackermann`] and [`extremal`] — composed binary trees,
//!   generalized path compressions and their transcripts, plus desk-scale
//!   checkers (avoidance, minimality, digraph criterion, grammar closure).
//!
//! [`verify`] wires the checkers into the pass/fail suite exposed by the
//! `dslab verify all` subcommand.

pub mod ackermann;
pub mod compress;
pub mod encoding;
pub mod extremal;
pub mod seq;
pub mod synth;
pub mod verify;
