//! Desk-scale extremal checks: brute-force extremal lengths, avoidance and
//! minimality sweeps against transcripts, the strong-connectivity digraph
//! criterion, and the linear-side grammar closure.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::seq::{self, Sequence, Symbol};
use crate::synth;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtremalError {
    #[error("need n >= 1")]
    BadN,
    #[error("cap must be between 1 and 30")]
    BadCap,
    #[error("pattern must be nonempty")]
    EmptyPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExKind {
    Exact,
    AtLeast,
}

/// Result of the exhaustive extremal-length search.
#[derive(Debug, Clone, Serialize)]
pub struct ExResult {
    pub kind: ExKind,
    pub value: usize,
    pub witness: String,
}

/// Maximum length of a sequence over exactly `n` symbols that avoids the
/// pattern and is ||pattern||-regular. Exhaustive over canonical sequences
/// (symbols first appear in increasing order) with regularity and avoidance
/// pruning; an empty search space reports exact 0.
pub fn ex_brute(pattern: &Sequence, n: usize, cap: usize) -> Result<ExResult, ExtremalError> {
    if n == 0 {
        return Err(ExtremalError::BadN);
    }
    if cap == 0 || cap > 30 {
        return Err(ExtremalError::BadCap);
    }
    if pattern.is_empty() {
        return Err(ExtremalError::EmptyPattern);
    }
    let pattern = pattern.normalize();
    let c = pattern.alphabet_size();
    let mut best: Option<Vec<Symbol>> = None;
    let mut cap_hit = false;
    let mut state: Vec<Symbol> = Vec::new();
    let mut last_pos: Vec<Option<usize>> = vec![None; n];
    extend(
        &pattern,
        c,
        n,
        cap,
        &mut state,
        &mut last_pos,
        0,
        &mut best,
        &mut cap_hit,
    );
    match best {
        None => Ok(ExResult {
            kind: ExKind::Exact,
            value: 0,
            witness: String::new(),
        }),
        Some(w) => {
            let witness = Sequence::new(w);
            let kind = if cap_hit && witness.len() == cap {
                ExKind::AtLeast
            } else {
                ExKind::Exact
            };
            Ok(ExResult {
                kind,
                value: witness.len(),
                witness: witness.display_string(),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    pattern: &Sequence,
    c: usize,
    n: usize,
    cap: usize,
    state: &mut Vec<Symbol>,
    last_pos: &mut Vec<Option<usize>>,
    used: usize,
    best: &mut Option<Vec<Symbol>>,
    cap_hit: &mut bool,
) {
    if used == n {
        let better = match best {
            None => true,
            Some(b) => state.len() > b.len(),
        };
        if better {
            *best = Some(state.clone());
        }
    }
    if state.len() == cap {
        if used == n {
            *cap_hit = true;
        }
        return;
    }
    let limit = if used < n { used + 1 } else { used };
    for s in 0..limit as Symbol {
        let pos = state.len();
        if let Some(prev) = last_pos[s as usize] {
            if pos - prev < c {
                continue;
            }
        }
        state.push(s);
        let saved = last_pos[s as usize];
        last_pos[s as usize] = Some(pos);
        // avoidance prune: once the pattern embeds it stays embedded
        if !seq::contains(pattern, &Sequence::new(state.clone())) {
            let new_used = used.max(s as usize + 1);
            extend(pattern, c, n, cap, state, last_pos, new_used, best, cap_hit);
        }
        last_pos[s as usize] = saved;
        state.pop();
    }
}

/// Re-validate an extremal witness independently of the search.
pub fn validate_witness(pattern: &Sequence, n: usize, witness: &Sequence) -> bool {
    let c = pattern.alphabet_size();
    witness.alphabet_size() == n
        && witness.is_c_regular(c).unwrap_or(false)
        && !seq::contains(pattern, witness)
}

/// Identifier of a transcript in a desk grid.
pub type GridPoint = (u32, u64, u32);

/// A text to match against, with its grid label.
pub struct GridText {
    pub point: GridPoint,
    pub text: Sequence,
}

#[derive(Debug, Serialize)]
pub struct AvoidanceOutcome {
    pub pattern: String,
    pub embedded_in: Vec<GridPoint>,
}

/// Assert that none of the patterns embeds in any grid transcript; every
/// embedding found is a hard failure recorded with its grid point.
pub fn avoidance_check(patterns: &[Sequence], texts: &[GridText]) -> Vec<AvoidanceOutcome> {
    patterns
        .iter()
        .map(|p| {
            let mut embedded_in = Vec::new();
            for gt in texts {
                if seq::contains(p, &gt.text) {
                    embedded_in.push(gt.point);
                }
            }
            AvoidanceOutcome {
                pattern: p.display_string(),
                embedded_in,
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct DeletionOutcome {
    pub deleted: String,
    pub found_at: Option<GridPoint>,
}

#[derive(Debug, Serialize)]
pub struct MinimalityReport {
    pub pattern: String,
    pub outcomes: Vec<DeletionOutcome>,
}

/// Every single-occurrence deletion of the pattern, deduplicated after
/// normalization. Deeper deletions follow by transitivity.
pub fn single_deletions(pattern: &Sequence) -> Vec<Sequence> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for k in 0..pattern.len() {
        let mut items = pattern.items().to_vec();
        items.remove(k);
        let s = Sequence::new(items).normalize();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// For each single-occurrence deletion, search the grid for a transcript
/// embedding it; unfound deletions are reported, not failed (the guarantee
/// quantifies over an unbounded grid).
pub fn minimality_check(pattern: &Sequence, texts: &[GridText]) -> MinimalityReport {
    let outcomes = single_deletions(pattern)
        .into_iter()
        .map(|d| {
            let found_at = texts
                .iter()
                .find(|gt| seq::contains(&d, &gt.text))
                .map(|gt| gt.point);
            DeletionOutcome {
                deleted: d.display_string(),
                found_at,
            }
        })
        .collect();
    MinimalityReport {
        pattern: pattern.display_string(),
        outcomes,
    }
}

/// Digraph on the alphabet of a repetition-collapsed sequence: an edge
/// (u, v) when vuvu or uvvu occurs as a plain subsequence.
#[derive(Debug, Clone, Serialize)]
pub struct Digraph {
    pub vertices: usize,
    pub edges: Vec<(Symbol, Symbol)>,
}

pub fn build_digraph(s: &Sequence) -> Digraph {
    let collapsed = s.collapse_runs().normalize();
    let n = collapsed.alphabet_size();
    let mut edges = Vec::new();
    for u in 0..n as Symbol {
        for v in 0..n as Symbol {
            if u == v {
                continue;
            }
            let vuvu = Sequence::new(vec![v, u, v, u]);
            let uvvu = Sequence::new(vec![u, v, v, u]);
            if seq::contains_plain(&vuvu, &collapsed) || seq::contains_plain(&uvvu, &collapsed) {
                edges.push((u, v));
            }
        }
    }
    Digraph { vertices: n, edges }
}

/// Strong connectivity by forward/backward reachability from vertex 0.
/// Trivially true on alphabets of size <= 1.
pub fn is_strongly_connected(g: &Digraph) -> bool {
    if g.vertices <= 1 {
        return true;
    }
    let mut fwd = vec![Vec::new(); g.vertices];
    let mut bwd = vec![Vec::new(); g.vertices];
    for &(u, v) in &g.edges {
        fwd[u as usize].push(v as usize);
        bwd[v as usize].push(u as usize);
    }
    let reach = |adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; g.vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|b| b)
    };
    reach(&fwd) && reach(&bwd)
}

/// A derivation step of the linear-side grammar.
#[derive(Debug, Clone, Serialize)]
pub enum DerivStep {
    /// a^k
    Axiom { k: usize },
    /// host with an adjacent doubled symbol at `at` and a final repeat of
    /// the same symbol: interleave a fresh block of size k after each
    Doubling { host: String, at: usize, k: usize },
    /// splice `insert` (fresh alphabet) between a doubled symbol of `host`
    Splice {
        host: String,
        insert: String,
        at: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct GrammarItem {
    pub sequence: String,
    pub derivation: Vec<DerivStep>,
}

/// Closure of the axioms a^k under the two grammar rules, breadth-first by
/// derivation depth, truncated by the bounds, deduplicated after
/// normalization.
pub fn kv_closure(max_depth: usize, max_k: usize, max_len: usize) -> Vec<GrammarItem> {
    let mut items: Vec<GrammarItem> = Vec::new();
    let mut seen: HashSet<Sequence> = HashSet::new();
    for k in 1..=max_len {
        let s = Sequence::new(vec![0; k]);
        if seen.insert(s.clone()) {
            items.push(GrammarItem {
                sequence: s.display_string(),
                derivation: vec![DerivStep::Axiom { k }],
            });
        }
    }
    let mut frontier: Vec<usize> = (0..items.len()).collect();
    for _depth in 0..max_depth {
        let mut next_frontier = Vec::new();
        // rule 1: w = s1 a a s2 a  =>  s1 a b^k a s2 a b^k
        for &wi in &frontier {
            let w = Sequence::parse(&items[wi].sequence).unwrap();
            let toks = w.items();
            let len = toks.len();
            if len < 3 {
                continue;
            }
            let last = toks[len - 1];
            for at in 0..len.saturating_sub(2) {
                if toks[at] != last || toks[at + 1] != last {
                    continue;
                }
                let fresh: Symbol = w.alphabet_size() as Symbol;
                for k in 1..=max_k {
                    let mut out: Vec<Symbol> = Vec::new();
                    out.extend_from_slice(&toks[..=at]);
                    out.extend(std::iter::repeat(fresh).take(k));
                    out.push(last);
                    out.extend_from_slice(&toks[at + 2..len - 1]);
                    out.push(last);
                    out.extend(std::iter::repeat(fresh).take(k));
                    if out.len() > max_len {
                        continue;
                    }
                    let s = Sequence::new(out).normalize();
                    if seen.insert(s.clone()) {
                        let mut derivation = items[wi].derivation.clone();
                        derivation.push(DerivStep::Doubling {
                            host: items[wi].sequence.clone(),
                            at,
                            k,
                        });
                        items.push(GrammarItem {
                            sequence: s.display_string(),
                            derivation,
                        });
                        next_frontier.push(items.len() - 1);
                    }
                }
            }
        }
        // rule 2: hat and host = s1 a a s2  =>  s1 a hat' a s2, with hat'
        // renamed to a fresh alphabet
        let host_count = items.len();
        for hosti in 0..host_count {
            let host = Sequence::parse(&items[hosti].sequence).unwrap();
            let toks = host.items().to_vec();
            for at in 0..toks.len().saturating_sub(1) {
                if toks[at] != toks[at + 1] {
                    continue;
                }
                for hati in 0..host_count {
                    let hat = Sequence::parse(&items[hati].sequence).unwrap();
                    if hat.is_empty() {
                        continue;
                    }
                    let shift = host.alphabet_size() as Symbol;
                    let mut out: Vec<Symbol> = Vec::new();
                    out.extend_from_slice(&toks[..=at]);
                    out.extend(hat.items().iter().map(|&x| x + shift));
                    out.extend_from_slice(&toks[at + 1..]);
                    if out.len() > max_len {
                        continue;
                    }
                    let s = Sequence::new(out).normalize();
                    if seen.insert(s.clone()) {
                        let mut derivation = items[hosti].derivation.clone();
                        derivation.push(DerivStep::Splice {
                            host: items[hosti].sequence.clone(),
                            insert: items[hati].sequence.clone(),
                            at,
                        });
                        items.push(GrammarItem {
                            sequence: s.display_string(),
                            derivation,
                        });
                        next_frontier.push(items.len() - 1);
                    }
                }
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    items
}

/// Replay a derivation and check it reproduces the recorded sequence.
pub fn replay(item: &GrammarItem) -> bool {
    let mut cur: Option<Sequence> = None;
    for step in &item.derivation {
        cur = match step {
            DerivStep::Axiom { k } => Some(Sequence::new(vec![0; *k])),
            DerivStep::Doubling { host, at, k } => {
                let host = Sequence::parse(host).unwrap();
                let toks = host.items();
                let last = *toks.last().unwrap();
                let fresh = host.alphabet_size() as Symbol;
                let mut out: Vec<Symbol> = Vec::new();
                out.extend_from_slice(&toks[..=*at]);
                out.extend(std::iter::repeat(fresh).take(*k));
                out.push(last);
                out.extend_from_slice(&toks[at + 2..toks.len() - 1]);
                out.push(last);
                out.extend(std::iter::repeat(fresh).take(*k));
                Some(Sequence::new(out).normalize())
            }
            DerivStep::Splice { host, insert, at } => {
                let host = Sequence::parse(host).unwrap();
                let hat = Sequence::parse(insert).unwrap();
                let shift = host.alphabet_size() as Symbol;
                let toks = host.items();
                let mut out: Vec<Symbol> = Vec::new();
                out.extend_from_slice(&toks[..=*at]);
                out.extend(hat.items().iter().map(|&x| x + shift));
                out.extend_from_slice(&toks[at + 1..]);
                Some(Sequence::new(out).normalize())
            }
        };
    }
    cur.map(|s| s.display_string()) == Some(item.sequence.clone())
}

/// The containment table behind the five-element lower bound, evaluated
/// against the class-2 prototype and the regenerated class-8 prototype.
#[derive(Debug, Serialize)]
pub struct Phi5Report {
    pub pi2: String,
    pub pi8: String,
    /// (sigma, in pi2, in pi8)
    pub table: Vec<(String, bool, bool)>,
    pub reversal_pairs_ok: bool,
    pub palindrome_ok: bool,
    pub pi2_row_ok: bool,
    pub pi8_row_ok: bool,
}

pub fn phi5_report() -> Phi5Report {
    let protos = synth::prototypes();
    let pi2 = protos[1].primary_sequence();
    let pi8 = protos[7].primary_sequence();
    let sigmas: Vec<Sequence> = ["ababa", "abcacbc", "abcbcac", "abacabc", "abacacb"]
        .iter()
        .map(|s| Sequence::parse(s).unwrap())
        .collect();
    let table: Vec<(String, bool, bool)> = sigmas
        .iter()
        .map(|s| {
            (
                s.display_string(),
                seq::contains(s, &pi2),
                seq::contains(s, &pi8),
            )
        })
        .collect();
    let in_pi2: Vec<bool> = table.iter().map(|t| t.1).collect();
    let in_pi8: Vec<bool> = table.iter().map(|t| t.2).collect();
    let pi2_row_ok = in_pi2 == [false, true, false, false, false];
    let pi8_row_ok = in_pi8 == [false, false, true, false, false];
    let reversal_pairs_ok = sigmas[1].reverse().normalize() == sigmas[3]
        && sigmas[2].reverse().normalize() == sigmas[4];
    let palindrome_ok = Sequence::parse("abadadbd").unwrap().is_palindrome();
    Phi5Report {
        pi2: pi2.display_string(),
        pi8: pi8.display_string(),
        table,
        reversal_pairs_ok,
        palindrome_ok,
        pi2_row_ok,
        pi8_row_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sequence {
        Sequence::parse(text).unwrap()
    }

    #[test]
    fn ex_anchors() {
        let r = ex_brute(&s("abab"), 2, 20).unwrap();
        assert_eq!((r.kind, r.value), (ExKind::Exact, 3));
        let r = ex_brute(&s("ababa"), 2, 20).unwrap();
        assert_eq!((r.kind, r.value), (ExKind::Exact, 4));
        assert_eq!(r.witness, "abab");
        let r = ex_brute(&s("aa"), 3, 20).unwrap();
        assert_eq!((r.kind, r.value), (ExKind::Exact, 3));
    }

    #[test]
    fn ex_infeasible_alphabet() {
        // every sequence with two distinct symbols contains ab
        let r = ex_brute(&s("ab"), 2, 10).unwrap();
        assert_eq!((r.kind, r.value), (ExKind::Exact, 0));
        assert!(r.witness.is_empty());
    }

    #[test]
    fn ex_witnesses_validate() {
        for (p, n) in [("abab", 2), ("ababa", 2), ("ababa", 3)] {
            let r = ex_brute(&s(p), n, 20).unwrap();
            assert!(validate_witness(&s(p), n, &s(&r.witness)), "{p} n={n}");
        }
    }

    #[test]
    fn ex_monotone_under_pattern_extension() {
        for n in [2usize, 3] {
            let a = ex_brute(&s("abab"), n, 20).unwrap();
            let b = ex_brute(&s("ababa"), n, 20).unwrap();
            assert!(a.value <= b.value, "n={n}");
        }
    }

    #[test]
    fn digraph_examples() {
        assert!(is_strongly_connected(&build_digraph(&s("ababa"))));
        assert!(is_strongly_connected(&build_digraph(&s("abcbadadabcd"))));
        assert!(!is_strongly_connected(&build_digraph(&s("abcdbdadbcd"))));
        // single symbol: trivially strongly connected
        assert!(is_strongly_connected(&build_digraph(&s("aaa"))));
    }

    #[test]
    fn digraph_renaming_equivariant() {
        let a = build_digraph(&s("abcdbdadbcd"));
        let b = build_digraph(&s("badcacdcbad")); // a<->b, c<->d renaming
        assert_eq!(a.vertices, b.vertices);
        let mut ea = a.edges.clone();
        let mut eb: Vec<(Symbol, Symbol)> = b
            .edges
            .iter()
            .map(|&(u, v)| (swap01(swap23(u)), swap01(swap23(v))))
            .collect();
        ea.sort_unstable();
        eb.sort_unstable();
        assert_eq!(ea, eb);
    }

    fn swap01(x: Symbol) -> Symbol {
        match x {
            0 => 1,
            1 => 0,
            other => other,
        }
    }
    fn swap23(x: Symbol) -> Symbol {
        match x {
            2 => 3,
            3 => 2,
            other => other,
        }
    }

    #[test]
    fn grammar_examples() {
        let items = kv_closure(3, 2, 12);
        let seqs: HashSet<String> = items.iter().map(|i| i.sequence.clone()).collect();
        assert!(seqs.contains("aaa"));
        assert!(seqs.contains("abaab"), "doubling aaa with k=1");
        for item in &items {
            assert!(replay(item), "derivation replays: {}", item.sequence);
        }
    }

    #[test]
    fn grammar_members_avoid_alternation() {
        let ababa = s("ababa");
        for item in kv_closure(3, 2, 12) {
            let member = s(&item.sequence);
            assert!(!seq::contains(&ababa, &member), "{}", item.sequence);
        }
    }

    #[test]
    fn deletions_are_proper() {
        let p = s("abcacbc");
        let dels = single_deletions(&p);
        assert_eq!(dels.len(), 7 - duplicates_removed(&p));
        for d in &dels {
            assert_eq!(d.len(), p.len() - 1);
            assert!(seq::contains(d, &p));
        }
    }

    fn duplicates_removed(p: &Sequence) -> usize {
        let mut seen = HashSet::new();
        let mut dup = 0;
        for k in 0..p.len() {
            let mut items = p.items().to_vec();
            items.remove(k);
            if !seen.insert(Sequence::new(items).normalize()) {
                dup += 1;
            }
        }
        dup
    }

    #[test]
    fn phi5_table() {
        let r = phi5_report();
        assert_eq!(r.pi2, "abcacbc");
        assert_eq!(r.pi8, "abcadcdbd");
        assert!(r.pi2_row_ok, "{:?}", r.table);
        assert!(r.pi8_row_ok, "{:?}", r.table);
        assert!(r.reversal_pairs_ok);
        assert!(r.palindrome_ok);
    }
}
