//! Composed binary trees, generalized path compressions, and transcripts.
//!
//! The tree family is parameterized by (i, j, c). Building blocks are full
//! binary trees t_n with 2^n leaves; the composition replaces every leaf of
//! the upper tree with a copy of the lower one. Level tags track the
//! grafting structure: leaves of the (i, j) tree are i-nodes, the graft
//! points of the j composition levels are (i-1)-nodes, and the interior of
//! every t block is 0-tagged.
//!
//! Each leaf originates j compressions; a compression's participants climb
//! from the leaf through one tagged ancestor per level, and its terminus is
//! a block-interior node above the last participant. Executing a compression
//! re-parents all participants directly under the terminus. Compressions run
//! in postorder of their origin leaf, ties broken by increasing level, and
//! are transcribed into a sequence: per vertex, the compressions it
//! participates in, most recent first, interleaved with one-shot vertex
//! separator symbols.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::seq::{Sequence, Symbol};

/// Default cap on leaf count; override with `DSLAB_MAX_LEAVES`.
pub const DEFAULT_MAX_LEAVES: u64 = 1 << 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompressError {
    #[error("parameters out of range: need i >= 1, c >= 1")]
    BadParams,
    #[error("leaf count for ({i},{j},c={c}) exceeds the cap of {cap} leaves")]
    SizeCap { i: u32, j: u64, c: u32, cap: u64 },
    #[error("ancestor level {0} out of range 1..={1}")]
    LevelRange(u64, u64),
    #[error("node is not a leaf")]
    NotLeaf,
    #[error("bad transcript file: {0}")]
    BadFile(String),
}

/// Exact leaf count when it fits under `cap`.
pub fn leaf_count(i: u32, j: u64, c: u32, cap: u64) -> Option<u64> {
    if i == 0 || c == 0 {
        return None;
    }
    if i == 1 {
        return checked_pow2(j, cap);
    }
    if j == 0 {
        return checked_pow2(c as u64, cap);
    }
    let a = leaf_count(i, j - 1, c, cap)?;
    let b = leaf_count(i - 1, a, c, cap)?;
    let prod = a.checked_mul(b)?;
    (prod <= cap).then_some(prod)
}

fn checked_pow2(e: u64, cap: u64) -> Option<u64> {
    if e >= 63 {
        return None;
    }
    let v = 1u64 << e;
    (v <= cap).then_some(v)
}

/// Exact leaf count as a big integer, with a blow-up guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BigCount {
    Exact(BigUint),
    TooLarge,
}

impl BigCount {
    pub fn display(&self) -> String {
        match self {
            BigCount::Exact(v) => v.to_string(),
            BigCount::TooLarge => "too large".into(),
        }
    }
}

/// Largest exponent we are willing to expand (2^e has e+1 bits).
const MAX_EXP: u64 = 1 << 20;

pub fn leaf_count_exact(i: u32, j: u64, c: u32) -> BigCount {
    if i == 0 || c == 0 {
        return BigCount::TooLarge;
    }
    if i == 1 {
        return big_pow2(j);
    }
    // iterate the second parameter upward to avoid deep recursion
    let mut cur = match big_pow2(c as u64) {
        BigCount::Exact(v) => v,
        BigCount::TooLarge => return BigCount::TooLarge,
    };
    for _ in 0..j {
        let param = match u64::try_from(&cur) {
            Ok(p) if p <= MAX_EXP => p,
            _ => return BigCount::TooLarge,
        };
        let lower = match leaf_count_exact(i - 1, param, c) {
            BigCount::Exact(v) => v,
            BigCount::TooLarge => return BigCount::TooLarge,
        };
        cur *= lower;
    }
    BigCount::Exact(cur)
}

fn big_pow2(e: u64) -> BigCount {
    if e > MAX_EXP {
        return BigCount::TooLarge;
    }
    BigCount::Exact(BigUint::from(1u32) << (e as usize))
}

const NIL: u32 = u32::MAX;

#[derive(Clone)]
struct Node {
    parent: u32,
    children: Option<(u32, u32)>,
    tag: u32,
}

/// A built (i, j, c) tree with navigation indexes.
pub struct CompTree {
    pub i: u32,
    pub j: u64,
    pub c: u32,
    nodes: Vec<Node>,
    pub root: u32,
    /// left-to-right leaves (all tagged i)
    pub leaves: Vec<u32>,
    /// reachable vertices in postorder
    pub post: Vec<u32>,
    post_rank: Vec<u32>,
    dfs_in: Vec<u32>,
    dfs_out: Vec<u32>,
    /// per tag, reachable nodes sorted by dfs_in
    tag_nodes: Vec<Vec<u32>>,
}

impl CompTree {
    pub fn build(i: u32, j: u64, c: u32, cap: u64) -> Result<CompTree, CompressError> {
        if i == 0 || c == 0 {
            return Err(CompressError::BadParams);
        }
        let _ = leaf_count(i, j, c, cap).ok_or(CompressError::SizeCap { i, j, c, cap })?;
        let mut nodes: Vec<Node> = Vec::new();
        let root = build_rec(&mut nodes, i, j, c, cap);

        // reconstruct reachable structure
        let mut post = Vec::new();
        let mut leaves = Vec::new();
        let mut dfs_in = vec![0u32; nodes.len()];
        let mut dfs_out = vec![0u32; nodes.len()];
        let mut timer = 0u32;
        // iterative postorder + dfs numbering
        let mut stack: Vec<(u32, bool)> = vec![(root, false)];
        while let Some((n, processed)) = stack.pop() {
            if processed {
                dfs_out[n as usize] = timer;
                post.push(n);
                continue;
            }
            dfs_in[n as usize] = timer;
            timer += 1;
            stack.push((n, true));
            if let Some((a, b)) = nodes[n as usize].children {
                stack.push((b, false));
                stack.push((a, false));
            } else {
                leaves.push(n);
            }
        }
        // leaves got collected in reverse-ish order due to stack; rebuild by dfs_in
        leaves.sort_by_key(|&n| dfs_in[n as usize]);
        let mut post_rank = vec![NIL; nodes.len()];
        for (r, &n) in post.iter().enumerate() {
            post_rank[n as usize] = r as u32;
        }
        let mut tag_nodes: Vec<Vec<u32>> = vec![Vec::new(); (i + 1) as usize];
        let mut reach: Vec<u32> = post.clone();
        reach.sort_by_key(|&n| dfs_in[n as usize]);
        for &n in &reach {
            tag_nodes[nodes[n as usize].tag as usize].push(n);
        }
        Ok(CompTree {
            i,
            j,
            c,
            nodes,
            root,
            leaves,
            post,
            post_rank,
            dfs_in,
            dfs_out,
            tag_nodes,
        })
    }

    pub fn leaf_count(&self) -> u64 {
        self.leaves.len() as u64
    }

    pub fn vertex_count(&self) -> u64 {
        self.post.len() as u64
    }

    pub fn tag(&self, n: u32) -> u32 {
        self.nodes[n as usize].tag
    }

    pub fn parent(&self, n: u32) -> Option<u32> {
        let p = self.nodes[n as usize].parent;
        (p != NIL).then_some(p)
    }

    pub fn is_leaf(&self, n: u32) -> bool {
        self.nodes[n as usize].children.is_none()
    }

    pub fn postorder_rank(&self, n: u32) -> u32 {
        self.post_rank[n as usize]
    }

    /// Is `a` a descendant of `b` (non-strict)?
    pub fn is_descendant(&self, a: u32, b: u32) -> bool {
        self.dfs_in[b as usize] <= self.dfs_in[a as usize]
            && self.dfs_out[a as usize] <= self.dfs_out[b as usize]
    }

    /// k-th ancestor of a leaf carrying the next-lower level tag.
    pub fn nu(&self, leaf: u32, k: u64) -> Result<u32, CompressError> {
        if !self.is_leaf(leaf) {
            return Err(CompressError::NotLeaf);
        }
        if k == 0 || k > self.j {
            return Err(CompressError::LevelRange(k, self.j));
        }
        self.kth_tagged_ancestor(leaf, k, self.i - 1)
            .ok_or(CompressError::LevelRange(k, self.j))
    }

    /// 1-based rank of the leaf among the leaves under its k-th tagged
    /// ancestor.
    pub fn mu(&self, leaf: u32, k: u64) -> Result<u64, CompressError> {
        let anc = self.nu(leaf, k)?;
        Ok(self.rank_among(leaf, self.i, anc))
    }

    fn kth_tagged_ancestor(&self, node: u32, k: u64, tag: u32) -> Option<u32> {
        let mut cur = node;
        let mut left = k;
        while let Some(p) = self.parent(cur) {
            cur = p;
            if self.tag(cur) == tag {
                left -= 1;
                if left == 0 {
                    return Some(cur);
                }
            }
        }
        None
    }

    fn kth_ancestor(&self, node: u32, k: u64) -> Option<u32> {
        let mut cur = node;
        for _ in 0..k {
            cur = self.parent(cur)?;
        }
        Some(cur)
    }

    /// 1-based rank of `node` among nodes of its tag under `anc`.
    fn rank_among(&self, node: u32, tag: u32, anc: u32) -> u64 {
        let list = &self.tag_nodes[tag as usize];
        let lo = list.partition_point(|&x| self.dfs_in[x as usize] < self.dfs_in[anc as usize]);
        let me = list.partition_point(|&x| self.dfs_in[x as usize] < self.dfs_in[node as usize]);
        debug_assert!(self.is_descendant(node, anc));
        (me - lo + 1) as u64
    }
}

fn build_rec(nodes: &mut Vec<Node>, i: u32, j: u64, c: u32, cap: u64) -> u32 {
    if i == 1 {
        return build_block(nodes, j as u32, 1);
    }
    if j == 0 {
        return build_block(nodes, c, i);
    }
    let top_param = leaf_count(i, j - 1, c, cap).expect("checked by caller");
    let top_root = build_rec(nodes, i - 1, top_param, c, cap);
    let mut graft_points = Vec::new();
    collect_leaves(nodes, top_root, &mut graft_points);
    for x in graft_points {
        let copy_root = build_rec(nodes, i, j - 1, c, cap);
        let (a, b) = nodes[copy_root as usize]
            .children
            .expect("composed copies have at least two leaves");
        nodes[x as usize].children = Some((a, b));
        nodes[a as usize].parent = x;
        nodes[b as usize].parent = x;
        // the graft point keeps its (i-1) tag; copy_root is now unreachable
    }
    top_root
}

/// Full binary tree with 2^height leaves; interior 0-tagged.
fn build_block(nodes: &mut Vec<Node>, height: u32, leaf_tag: u32) -> u32 {
    if height == 0 {
        nodes.push(Node {
            parent: NIL,
            children: None,
            tag: leaf_tag,
        });
        return (nodes.len() - 1) as u32;
    }
    let a = build_block(nodes, height - 1, leaf_tag);
    let b = build_block(nodes, height - 1, leaf_tag);
    nodes.push(Node {
        parent: NIL,
        children: Some((a, b)),
        tag: 0,
    });
    let r = (nodes.len() - 1) as u32;
    nodes[a as usize].parent = r;
    nodes[b as usize].parent = r;
    r
}

fn collect_leaves(nodes: &[Node], root: u32, out: &mut Vec<u32>) {
    match nodes[root as usize].children {
        None => out.push(root),
        Some((a, b)) => {
            collect_leaves(nodes, a, out);
            collect_leaves(nodes, b, out);
        }
    }
}

/// One generalized path compression: participants from the origin upward,
/// terminus strictly above them all.
#[derive(Debug, Clone)]
pub struct Compression {
    pub id: u32,
    pub origin: u32,
    pub participants: Vec<u32>,
    pub terminus: u32,
}

/// Order of the per-leaf compressions within one origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginOrder {
    /// nearest tagged ancestor first (the default)
    AscendingLevel,
    /// reversed, kept for the executor comparison
    DescendingLevel,
}

pub struct CompressionSystem {
    pub comps: Vec<Compression>,
    /// per arena node: compression ids it participates in, ascending
    pub participation: Vec<Vec<u32>>,
    pub order: OriginOrder,
}

/// Build the j·L compressions in execution order.
pub fn build_compressions(tree: &CompTree, order: OriginOrder) -> CompressionSystem {
    let mut comps = Vec::with_capacity(tree.leaves.len() * tree.j as usize);
    let mut participation: Vec<Vec<u32>> = vec![Vec::new(); tree.nodes.len()];
    for &leaf in &tree.leaves {
        let ks: Vec<u64> = match order {
            OriginOrder::AscendingLevel => (1..=tree.j).collect(),
            OriginOrder::DescendingLevel => (1..=tree.j).rev().collect(),
        };
        for k in ks {
            let id = comps.len() as u32;
            let (participants, terminus) = chain(tree, leaf, k);
            for &p in &participants {
                participation[p as usize].push(id);
            }
            comps.push(Compression {
                id,
                origin: leaf,
                participants,
                terminus,
            });
        }
    }
    CompressionSystem {
        comps,
        participation,
        order,
    }
}

/// Participant chain of the k-th compression originating at `leaf`: one
/// node per level, then the block-interior terminus.
fn chain(tree: &CompTree, leaf: u32, k: u64) -> (Vec<u32>, u32) {
    let mut parts = vec![leaf];
    let mut cur = leaf;
    let mut kk = k;
    while tree.tag(cur) > 1 {
        let target = tree.tag(cur) - 1;
        let nxt = tree
            .kth_tagged_ancestor(cur, kk, target)
            .expect("composition provides tagged ancestors");
        let rank = tree.rank_among(cur, tree.tag(cur), nxt);
        parts.push(nxt);
        cur = nxt;
        kk = rank;
    }
    let terminus = tree
        .kth_ancestor(cur, kk)
        .expect("block interior provides the terminus");
    (parts, terminus)
}

#[derive(Debug, Serialize)]
pub struct ExecReport {
    pub executed: usize,
    pub failures: Vec<u32>,
    pub valid: bool,
}

/// Execute all compressions on a fresh copy of the tree, validating that at
/// execution time each one's participants form a strictly ascending ancestor
/// chain below its terminus.
pub fn execute(tree: &CompTree, sys: &CompressionSystem) -> ExecReport {
    let mut parent: Vec<u32> = tree.nodes.iter().map(|n| n.parent).collect();
    let mut failures = Vec::new();
    for comp in &sys.comps {
        let mut targets = comp.participants[1..].to_vec();
        targets.push(comp.terminus);
        let mut cur = comp.origin;
        let mut ti = 0usize;
        let ok = loop {
            let p = parent[cur as usize];
            if p == NIL {
                break false;
            }
            cur = p;
            if cur == targets[ti] {
                ti += 1;
                if ti == targets.len() {
                    break true;
                }
            }
        };
        if !ok {
            failures.push(comp.id);
        }
        for &part in &comp.participants {
            parent[part as usize] = comp.terminus;
        }
    }
    ExecReport {
        executed: sys.comps.len(),
        valid: failures.is_empty(),
        failures,
    }
}

/// A transcript symbol refers back to a compression or a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymKind {
    Comp(u32),
    /// 1-based postorder rank of the vertex
    Vertex(u32),
}

/// The transcribed sequence with its symbol provenance.
pub struct Transcript {
    pub i: u32,
    pub j: u64,
    pub c: u32,
    pub leaf_count: u64,
    pub sequence: Sequence,
    pub comp_count: u64,
    /// symbol id -> provenance; vertex symbol for postorder rank k is
    /// comp_count + k - 1 (the first vertex's symbol never occurs)
    pub sym_kinds: Vec<SymKind>,
}

/// Transcribe the compression system: per vertex in postorder, the
/// compressions it participates in (most recent first), prefixed by the
/// vertex's one-shot separator symbol for every vertex except the first.
pub fn transcribe(tree: &CompTree, sys: &CompressionSystem) -> Transcript {
    let ncomp = sys.comps.len() as u32;
    let mut items: Vec<Symbol> = Vec::new();
    let mut sym_kinds: Vec<SymKind> =
        (0..ncomp).map(SymKind::Comp).collect();
    for (rank0, &v) in tree.post.iter().enumerate() {
        let vsym = ncomp + rank0 as u32;
        sym_kinds.push(SymKind::Vertex(rank0 as u32 + 1));
        if rank0 > 0 {
            items.push(vsym);
        }
        for &cid in sys.participation[v as usize].iter().rev() {
            items.push(cid);
        }
    }
    Transcript {
        i: tree.i,
        j: tree.j,
        c: tree.c,
        leaf_count: tree.leaf_count(),
        sequence: Sequence::new(items),
        comp_count: ncomp as u64,
        sym_kinds,
    }
}

impl Transcript {
    /// Expected length: i·j·L + 2L - 2.
    pub fn expected_len(&self) -> u64 {
        self.i as u64 * self.j * self.leaf_count + 2 * self.leaf_count - 2
    }

    /// Expected alphabet: j·L + 2L - 2.
    pub fn expected_alphabet(&self) -> u64 {
        self.j * self.leaf_count + 2 * self.leaf_count - 2
    }

    /// Occurrence positions of each compression symbol.
    pub fn comp_occurrences(&self) -> Vec<Vec<u32>> {
        let mut occ: Vec<Vec<u32>> = vec![Vec::new(); self.comp_count as usize];
        for (pos, &s) in self.sequence.items().iter().enumerate() {
            if (s as u64) < self.comp_count {
                occ[s as usize].push(pos as u32);
            }
        }
        occ
    }

    /// Serialize in the transcript file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# xi i={} j={} c={} L={}",
            self.i, self.j, self.c, self.leaf_count
        );
        for (k, &s) in self.sequence.items().iter().enumerate() {
            if k > 0 {
                out.push(if k % 16 == 0 { '\n' } else { ' ' });
            }
            match self.sym_kinds[s as usize] {
                SymKind::Comp(id) => {
                    let _ = write!(out, "C{id}");
                }
                SymKind::Vertex(rank) => {
                    let _ = write!(out, "V{rank}");
                }
            }
        }
        out.push('\n');
        out
    }
}

/// Parse a transcript file (or any whitespace-separated token stream) into a
/// sequence; `C`/`V` prefixed tokens share one dense namespace.
pub fn parse_transcript_text(text: &str) -> Result<Sequence, CompressError> {
    let mut ids: HashMap<String, Symbol> = HashMap::new();
    let mut items = Vec::new();
    for line in text.lines() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let next = ids.len() as Symbol;
            let id = *ids.entry(tok.to_string()).or_insert(next);
            items.push(id);
        }
    }
    if items.is_empty() {
        return Err(CompressError::BadFile("no symbols".into()));
    }
    Ok(Sequence::new(items))
}

#[derive(Debug, Serialize)]
pub struct PairReport {
    pub pairs_checked: u64,
    pub violations: Vec<(u32, u32)>,
}

/// No two compressions p before q may spell q p q p inside the transcript.
pub fn check_qpqp(x: &Transcript, sample: Option<u64>, seed: u64) -> PairReport {
    let occ = x.comp_occurrences();
    let n = occ.len() as u64;
    let mut violations = Vec::new();
    let mut pairs_checked = 0u64;
    if n < 2 {
        return PairReport {
            pairs_checked,
            violations,
        };
    }
    let total = n * (n - 1) / 2;
    let check = |p: u32, q: u32, violations: &mut Vec<(u32, u32)>| {
        if spells_qpqp(&occ[q as usize], &occ[p as usize]) {
            violations.push((p, q));
        }
    };
    match sample {
        Some(s) if s < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let all: Vec<u32> = (0..n as u32).collect();
            for _ in 0..s {
                let mut pick: Vec<u32> = all.choose_multiple(&mut rng, 2).copied().collect();
                pick.sort_unstable();
                check(pick[0], pick[1], &mut violations);
                pairs_checked += 1;
            }
        }
        _ => {
            for q in 1..n as u32 {
                for p in 0..q {
                    check(p, q, &mut violations);
                    pairs_checked += 1;
                }
            }
        }
    }
    PairReport {
        pairs_checked,
        violations,
    }
}

/// Exists q < p' < q' < p'' with the q-occurrences from `qo` and
/// p-occurrences from `po`?
fn spells_qpqp(qo: &[u32], po: &[u32]) -> bool {
    if qo.len() < 2 || po.len() < 2 {
        return false;
    }
    let q1 = qo[0];
    let p1 = match po.iter().find(|&&p| p > q1) {
        Some(&p) => p,
        None => return false,
    };
    let q2 = match qo.iter().find(|&&q| q > p1) {
        Some(&q) => q,
        None => return false,
    };
    po.iter().any(|&p| p > q2)
}

#[derive(Debug, Serialize)]
pub struct ImpliedReport {
    pub triples_checked: u64,
    pub violations: Vec<(u32, u32, u32)>,
}

/// For vertices u strictly below v, v at or below w, with q recorded at u
/// and w and p recorded at v: if p originates under u then p must also be
/// recorded at u. `participation` is taken as an argument so tests can
/// corrupt it.
pub fn check_implied(
    tree: &CompTree,
    sys: &CompressionSystem,
    participation: &[Vec<u32>],
    sample: Option<u64>,
    seed: u64,
) -> ImpliedReport {
    let mut triples = Vec::new();
    for q in &sys.comps {
        let parts = &q.participants;
        for s in 0..parts.len() {
            for t in (s + 1)..parts.len() {
                triples.push((q.id, parts[s], parts[t]));
            }
        }
    }
    if let Some(cap) = sample {
        if (cap as usize) < triples.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            triples.shuffle(&mut rng);
            triples.truncate(cap as usize);
        }
    }
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for (qid, u, w) in triples {
        let mut v = tree.parent(u);
        while let Some(vv) = v {
            for &p in &participation[vv as usize] {
                let origin = sys.comps[p as usize].origin;
                if tree.is_descendant(origin, u) {
                    checked += 1;
                    if participation[u as usize].binary_search(&p).is_err() {
                        violations.push((p, qid, u));
                    }
                }
            }
            if vv == w {
                break;
            }
            v = tree.parent(vv);
        }
    }
    ImpliedReport {
        triples_checked: checked,
        violations,
    }
}

/// c-regularity of the transcript; `None` when the guarantee's precondition
/// (i > 1 or j >= c) does not hold.
pub fn check_regularity(x: &Transcript) -> Option<bool> {
    if !(x.i > 1 || x.j >= x.c as u64) {
        return None;
    }
    Some(
        x.sequence
            .is_c_regular(x.c as usize)
            .expect("c >= 1 by construction"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(i: u32, j: u64, c: u32) -> CompTree {
        CompTree::build(i, j, c, DEFAULT_MAX_LEAVES).unwrap()
    }

    #[test]
    fn leaf_counts() {
        assert_eq!(leaf_count(1, 3, 1, 1 << 22), Some(8));
        assert_eq!(leaf_count(2, 0, 1, 1 << 22), Some(2));
        assert_eq!(leaf_count(2, 1, 1, 1 << 22), Some(8));
        assert_eq!(leaf_count(2, 2, 1, 1 << 22), Some(2048));
        assert_eq!(leaf_count(3, 1, 1, 1 << 22), Some(4096));
        // the recursion blows up quickly
        assert_eq!(leaf_count(3, 2, 1, 1 << 22), None);
        assert_eq!(leaf_count(2, 2, 2, 1 << 22), None);
    }

    #[test]
    fn exact_counts_beyond_cap() {
        let v = leaf_count_exact(2, 2, 2);
        assert_eq!(
            v,
            BigCount::Exact(BigUint::from(64u32) << 64),
            "64 * 2^64"
        );
        assert_eq!(leaf_count_exact(3, 2, 1), BigCount::TooLarge);
    }

    #[test]
    fn tree_shape_invariants() {
        for (i, j, c) in [(1, 3, 1), (2, 0, 1), (2, 1, 1), (2, 2, 1), (2, 1, 2)] {
            let t = tree(i, j, c);
            assert_eq!(t.leaf_count(), leaf_count(i, j, c, 1 << 22).unwrap() as u64);
            assert_eq!(t.vertex_count(), 2 * t.leaf_count() - 1);
            for &l in &t.leaves {
                assert_eq!(t.tag(l), i);
                // exactly j tagged ancestors
                if i > 1 {
                    let mut count = 0;
                    let mut cur = l;
                    while let Some(p) = t.parent(cur) {
                        cur = p;
                        if t.tag(cur) == i - 1 {
                            count += 1;
                        }
                    }
                    assert_eq!(count, t.j);
                }
            }
        }
    }

    #[test]
    fn mu_stays_within_level_size() {
        let t = tree(2, 2, 1);
        for &l in &t.leaves {
            for k in 1..=t.j {
                let m = t.mu(l, k).unwrap();
                let bound = leaf_count(2, k - 1, 1, 1 << 22).unwrap();
                assert!(m >= 1 && m <= bound, "mu {m} bound {bound}");
            }
        }
    }

    #[test]
    fn compression_counts_and_shape() {
        let t = tree(2, 1, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        assert_eq!(sys.comps.len(), 8);
        for comp in &sys.comps {
            assert_eq!(comp.participants.len(), 2);
            assert_eq!(t.tag(comp.participants[0]), 2);
            assert_eq!(t.tag(comp.participants[1]), 1);
        }
    }

    #[test]
    fn executor_accepts_the_system() {
        for (i, j, c) in [(1, 2, 1), (2, 1, 1), (2, 2, 1), (2, 1, 2)] {
            let t = tree(i, j, c);
            let sys = build_compressions(&t, OriginOrder::AscendingLevel);
            let report = execute(&t, &sys);
            assert!(report.valid, "({i},{j},{c}): {:?}", report.failures);
        }
    }

    #[test]
    fn reversed_origin_order_breaks_on_nontrivial_grid() {
        let t = tree(2, 2, 1);
        let sys = build_compressions(&t, OriginOrder::DescendingLevel);
        let report = execute(&t, &sys);
        assert!(!report.valid);
    }

    #[test]
    fn transcript_t11_worked_example() {
        let t = tree(1, 1, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        let x = transcribe(&t, &sys);
        assert_eq!(x.sequence.len(), 4);
        assert_eq!(x.sequence.alphabet_size(), 4);
        // comp, vertex, comp, vertex
        let kinds: Vec<bool> = x
            .sequence
            .items()
            .iter()
            .map(|&s| matches!(x.sym_kinds[s as usize], SymKind::Comp(_)))
            .collect();
        assert_eq!(kinds, vec![true, false, true, false]);
    }

    #[test]
    fn transcript_counting_identities() {
        for (i, j, c) in [(1, 1, 1), (1, 2, 2), (2, 1, 1), (2, 1, 2), (2, 2, 1)] {
            let t = tree(i, j, c);
            let sys = build_compressions(&t, OriginOrder::AscendingLevel);
            let x = transcribe(&t, &sys);
            assert_eq!(x.sequence.len() as u64, x.expected_len(), "({i},{j},{c})");
            assert_eq!(
                x.sequence.alphabet_size() as u64,
                x.expected_alphabet(),
                "({i},{j},{c})"
            );
            // compression symbols appear i times, vertex symbols once
            let occ = x.comp_occurrences();
            assert!(occ.iter().all(|o| o.len() == i as usize));
        }
    }

    #[test]
    fn xi_blocks_are_id_descending() {
        let t = tree(1, 2, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        // leftmost leaf participates in its two compressions; transcript
        // lists the later one first
        let leaf = t.leaves[0];
        let ids = &sys.participation[leaf as usize];
        assert_eq!(ids.as_slice(), &[0, 1]);
        let x = transcribe(&t, &sys);
        let first_two: Vec<Symbol> = x.sequence.items()[..2].to_vec();
        assert_eq!(first_two, vec![1, 0]);
    }

    #[test]
    fn regularity_examples() {
        let t = tree(2, 1, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        let x = transcribe(&t, &sys);
        assert_eq!(check_regularity(&x), Some(true));

        let t = tree(1, 1, 2);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        let x = transcribe(&t, &sys);
        // i = 1, j < c: guarantee not applicable
        assert_eq!(check_regularity(&x), None);
    }

    #[test]
    fn qpqp_clean_on_small_grid() {
        for (i, j, c) in [(1, 1, 1), (2, 1, 1), (2, 2, 1)] {
            let t = tree(i, j, c);
            let sys = build_compressions(&t, OriginOrder::AscendingLevel);
            let x = transcribe(&t, &sys);
            let r = check_qpqp(&x, None, 0);
            assert!(r.violations.is_empty(), "({i},{j},{c})");
        }
    }

    #[test]
    fn implied_clean_and_mutation_detected() {
        let t = tree(2, 2, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        let r = check_implied(&t, &sys, &sys.participation, None, 0);
        assert!(r.violations.is_empty());
        assert!(r.triples_checked > 0);

        // drop one participant record from a vertex that has any
        let mut corrupted = sys.participation.clone();
        let victim = (0..corrupted.len())
            .find(|&v| corrupted[v].len() >= 2 && !t.is_leaf(v as u32))
            .expect("some internal vertex participates twice");
        corrupted[victim].remove(0);
        let r = check_implied(&t, &sys, &corrupted, None, 0);
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn file_round_trip() {
        let t = tree(2, 1, 1);
        let sys = build_compressions(&t, OriginOrder::AscendingLevel);
        let x = transcribe(&t, &sys);
        let text = x.to_file_string();
        let parsed = parse_transcript_text(&text).unwrap();
        assert_eq!(parsed.normalize(), x.sequence.normalize());
    }
}
