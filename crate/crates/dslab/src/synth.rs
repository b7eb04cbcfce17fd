//! From suit encodings to forbidden subsequences, via labeled trees.
//!
//! An encoding is turned into one or more ordered labeled trees; each tree,
//! read in leaf-ordered postorder, spells a forbidden subsequence. The build
//! goes bottom up:
//!
//! * one leaf per element, labeled with its element index;
//! * an adjacent `cs` pair (the two-trap rows 1 and 7) is merged under a new
//!   node labeled with the trap's index, with a node for the second trap
//!   directly above it; when the second trap immediately follows the pair it
//!   is pulled into the merge instead of staying a separate leaf;
//! * a spine of nodes y_1..y_l, one per star plus one for the binder, each
//!   labeled with its element's index; y_1 parents the first two spine
//!   leaves, y_i parents y_{i-1} and the next spine leaf, and y_l parents
//!   whatever carries the final trap;
//! * non-spine leaves attach by position: strictly inside the first spine
//!   gap they are forced onto y_1; in a later gap they may either append to
//!   the node owning the gap's left spine leaf or join the next spine node,
//!   which is where the multiple tree variants (never more than four for
//!   legal encodings) come from;
//! * apex nodes close the tree. With two traps they are labeled [c2 c1],
//!   [s1], [c2]. With one trap they are labeled [c d], [s2 s1], [c], where
//!   the first apex collapses to [c] without a guard and disappears entirely
//!   when guard, trapped and trap share a `(dsc)` group.
//!
//! The apex rules are pinned by the anchor sequences: `hs(dsc)` must spell
//! exactly `abcacbc` and `hcsc` exactly `abcdbdadbcd`.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::encoding::{Element, Encoding, Group, Rule};
use crate::seq::Sequence;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("encoding is not buildable: {0}")]
    NotBuildable(String),
    #[error("illegal encoding (violated rules: {0:?})")]
    Illegal(Vec<Rule>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeRole {
    Leaf,
    MergedLeaf,
    Spine,
    Apex,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub children: Vec<usize>,
    /// element indices (1-based), emitted in stored order
    pub label: Vec<usize>,
    pub role: NodeRole,
}

/// An ordered rooted tree whose postorder label concatenation is the
/// synthesized forbidden subsequence.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledTree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

impl LabeledTree {
    fn postorder_labels(&self, node: usize, out: &mut Vec<usize>) {
        for &ch in &self.nodes[node].children {
            self.postorder_labels(ch, out);
        }
        out.extend_from_slice(&self.nodes[node].label);
    }

    /// Leaf labels in left-to-right traversal order.
    pub fn leaf_order(&self) -> Vec<usize> {
        fn walk(t: &LabeledTree, n: usize, out: &mut Vec<usize>) {
            let node = &t.nodes[n];
            if node.children.is_empty() {
                out.push(node.label[0]);
            }
            for &ch in &node.children {
                walk(t, ch, out);
            }
        }
        let mut out = Vec::new();
        walk(self, self.root, &mut out);
        out
    }

    /// Canonical structural key for deduplication.
    fn shape_key(&self) -> String {
        fn walk(t: &LabeledTree, n: usize, out: &mut String) {
            let node = &t.nodes[n];
            out.push('(');
            for l in &node.label {
                out.push_str(&l.to_string());
                out.push(',');
            }
            for &ch in &node.children {
                walk(t, ch, out);
            }
            out.push(')');
        }
        let mut s = String::new();
        walk(self, self.root, &mut s);
        s
    }
}

/// Postorder label concatenation, normalized.
pub fn tree_to_sequence(tree: &LabeledTree) -> Sequence {
    let mut labels = Vec::new();
    tree.postorder_labels(tree.root, &mut labels);
    Sequence::new(labels.iter().map(|&l| l as u32).collect()).normalize()
}

/// Element roles of a buildable encoding (all indices 1-based).
struct Roles {
    spine: Vec<usize>,
    kind: FormKind,
}

enum FormKind {
    /// (first trap, its trapped partner, second trap, swallow)
    TwoTrap(usize, usize, usize, bool),
    /// (s1, s2, trap, guard, trap is a (dsc) group)
    OneTrap(usize, usize, usize, Option<usize>, bool),
}

fn indices(elems: &[Element], pred: impl Fn(&Element) -> bool) -> Vec<usize> {
    elems
        .iter()
        .enumerate()
        .filter(|(_, x)| pred(x))
        .map(|(p, _)| p + 1)
        .collect()
}

fn analyze(e: &Encoding) -> Result<Roles, SynthError> {
    let elems = e.elements();
    let m = elems.len();
    let hearts = indices(elems, |x| matches!(x, Element::Binder));
    let stars = indices(elems, |x| matches!(x, Element::Star));
    let traps = indices(elems, |x| {
        matches!(x, Element::Trap | Element::Group(Group::GuardTrappedTrap))
    });
    let spades = indices(elems, |x| x.bears_trapped());
    let guards = indices(elems, |x| matches!(x, Element::Guard | Element::Group(_)));
    if hearts.len() != 1 {
        return Err(SynthError::NotBuildable("need exactly one binder".into()));
    }
    let heart = hearts[0];
    if stars.iter().any(|&s| s > heart) {
        return Err(SynthError::NotBuildable(
            "padding must precede the binder".into(),
        ));
    }
    let mut spine = stars;
    spine.push(heart);

    let kind = match traps.len() {
        2 => {
            let (c1, c2) = (traps[0], traps[1]);
            if elems[c1 - 1] != Element::Trap || elems[c2 - 1] != Element::Trap {
                return Err(SynthError::NotBuildable(
                    "two-trap form takes bare traps only".into(),
                ));
            }
            if spades.len() != 1 || !guards.is_empty() {
                return Err(SynthError::NotBuildable(
                    "two-trap form needs one trapped symbol and no guard".into(),
                ));
            }
            let s1 = spades[0];
            if s1 != c1 + 1 {
                return Err(SynthError::NotBuildable(
                    "two-trap form needs an adjacent trap-trapped pair".into(),
                ));
            }
            if c2 != m {
                return Err(SynthError::NotBuildable(
                    "second trap must be the final element".into(),
                ));
            }
            FormKind::TwoTrap(c1, s1, c2, c2 == s1 + 1)
        }
        1 => {
            if spades.len() != 2 {
                return Err(SynthError::NotBuildable(
                    "need exactly two trapped symbols".into(),
                ));
            }
            if guards.len() > 1 {
                return Err(SynthError::NotBuildable("at most one guard".into()));
            }
            let trap = traps[0];
            if trap != m {
                return Err(SynthError::NotBuildable(
                    "trap must be the final element".into(),
                ));
            }
            let group_c = matches!(elems[trap - 1], Element::Group(Group::GuardTrappedTrap));
            FormKind::OneTrap(spades[0], spades[1], trap, guards.first().copied(), group_c)
        }
        n => {
            return Err(SynthError::NotBuildable(format!(
                "need one or two traps, found {n}"
            )))
        }
    };
    Ok(Roles { spine, kind })
}

/// A non-spine attachment unit: a plain leaf or the merged trap pair.
#[derive(Clone, Copy, PartialEq)]
enum Unit {
    Plain(usize),
    Pair,
}

struct Builder {
    nodes: Vec<TreeNode>,
}

impl Builder {
    fn add(&mut self, children: Vec<usize>, label: Vec<usize>, role: NodeRole) -> usize {
        self.nodes.push(TreeNode {
            children,
            label,
            role,
        });
        self.nodes.len() - 1
    }

    fn leaf(&mut self, idx: usize) -> usize {
        self.add(vec![], vec![idx], NodeRole::Leaf)
    }
}

/// Build every labeled-tree variant of an encoding. Works for any
/// structurally buildable encoding, legal or not; [`generate`] adds the
/// legality gate.
pub fn build_trees(e: &Encoding) -> Result<Vec<LabeledTree>, SynthError> {
    let roles = analyze(e)?;
    let m = e.len();
    let spine = &roles.spine;
    let l = spine.len();

    let mut units: Vec<(usize, Unit)> = Vec::new();
    let (final_is_pair, pair_spec) = match roles.kind {
        FormKind::TwoTrap(c1, s1, c2, swallow) => {
            if !swallow {
                units.push((c1, Unit::Pair));
            }
            for idx in 1..=m {
                if spine.contains(&idx) || idx == c1 || idx == s1 || idx == c2 {
                    continue;
                }
                units.push((idx, Unit::Plain(idx)));
            }
            (swallow, Some((c1, s1, c2, swallow)))
        }
        FormKind::OneTrap(..) => {
            for idx in 1..=m {
                if spine.contains(&idx) || idx == m {
                    continue;
                }
                units.push((idx, Unit::Plain(idx)));
            }
            (false, None)
        }
    };
    units.sort_by_key(|&(p, _)| p);

    // leading units sit before the first spine leaf; gap i holds units
    // strictly after spine leaf i (and before the next one, or the final
    // carrier for the last gap)
    let mut leading: Vec<Unit> = Vec::new();
    let mut gaps: Vec<Vec<Unit>> = vec![Vec::new(); l];
    for &(pos, u) in &units {
        match (0..l).rev().find(|&i| pos > spine[i]) {
            Some(gi) => gaps[gi].push(u),
            None => leading.push(u),
        }
    }

    // Units in gap i >= 1 split between the node owning spine leaf i and the
    // next spine node; the split point runs over all monotone prefixes.
    let mut assignments: Vec<Vec<usize>> = vec![vec![]];
    for q in (1..l).map(|i| gaps[i].len()) {
        assignments = assignments
            .iter()
            .flat_map(|a| {
                (0..=q).map(move |cut| {
                    let mut b = a.clone();
                    b.push(cut);
                    b
                })
            })
            .collect();
    }

    let z_labels: Vec<Vec<usize>> = match roles.kind {
        FormKind::TwoTrap(c1, s1, c2, _) => vec![vec![c2, c1], vec![s1], vec![c2]],
        FormKind::OneTrap(s1, s2, trap, guard, group_c) => {
            let mut z = Vec::new();
            if !group_c {
                match guard {
                    Some(g) if g != trap => z.push(vec![trap, g]),
                    _ => z.push(vec![trap]),
                }
            }
            z.push(vec![s2, s1]);
            z.push(vec![trap]);
            z
        }
    };

    let mut out: Vec<LabeledTree> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for assign in &assignments {
        let mut b = Builder { nodes: Vec::new() };

        let pair_unit = pair_spec.map(|(c1, s1, c2, swallow)| {
            let lc1 = b.leaf(c1);
            let ls1 = b.leaf(s1);
            let mut kids = vec![lc1, ls1];
            if swallow {
                kids.push(b.leaf(c2));
            }
            let merged = b.add(kids, vec![c1], NodeRole::MergedLeaf);
            b.add(vec![merged], vec![c2], NodeRole::Apex)
        });
        let unit_node = |u: Unit, b: &mut Builder| match u {
            Unit::Plain(idx) => b.leaf(idx),
            Unit::Pair => pair_unit.expect("pair unit exists"),
        };

        let spine_leaves: Vec<usize> = spine.iter().map(|&s| b.leaf(s)).collect();
        let final_node = if final_is_pair {
            pair_unit.expect("swallowed pair is the final carrier")
        } else {
            b.leaf(m)
        };

        let mut prev_y: Option<usize> = None;
        for i in 0..l {
            let mut children: Vec<usize> = Vec::new();
            if i == 0 {
                for &u in &leading {
                    children.push(unit_node(u, &mut b));
                }
                children.push(spine_leaves[0]);
                for &u in &gaps[0] {
                    children.push(unit_node(u, &mut b));
                }
                if l >= 2 {
                    children.push(spine_leaves[1]);
                }
            } else {
                children.push(prev_y.expect("previous spine node"));
                for &u in gaps[i].iter().skip(assign[i - 1]) {
                    children.push(unit_node(u, &mut b));
                }
                if i + 1 < l {
                    children.push(spine_leaves[i + 1]);
                }
            }
            // the next gap's downward-assigned prefix joins this node right
            // after its spine leaf
            if i + 1 < l {
                for &u in gaps[i + 1].iter().take(assign[i]) {
                    children.push(unit_node(u, &mut b));
                }
            }
            if i == l - 1 {
                children.push(final_node);
            }
            prev_y = Some(b.add(children, vec![spine[i]], NodeRole::Spine));
        }

        let mut top = prev_y.expect("spine exists");
        for zl in &z_labels {
            top = b.add(vec![top], zl.clone(), NodeRole::Apex);
        }

        let tree = LabeledTree {
            nodes: b.nodes,
            root: top,
        };
        if seen.insert(tree.shape_key()) {
            out.push(tree);
        }
    }
    Ok(out)
}

/// Synthesized sequences of a legal encoding, deduplicated after
/// normalization.
pub fn generate(e: &Encoding) -> Result<Vec<Sequence>, SynthError> {
    let report = e.legality();
    if !report.legal {
        return Err(SynthError::Illegal(report.violations));
    }
    let trees = build_trees(e)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for t in &trees {
        let s = tree_to_sequence(t);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

/// One row of the prototype catalog.
#[derive(Debug, Clone, Serialize)]
pub struct PrototypeEntry {
    pub class: u8,
    pub encoding: String,
    #[serde(skip)]
    pub trees: Vec<LabeledTree>,
    pub sequences: Vec<String>,
    /// transcription of the same row from the hardcopy figure, when one is
    /// quotable; `suspect` marks rows with known corrupt renderings
    pub figure_string: Option<&'static str>,
    pub figure_suspect: bool,
    pub matches_figure: Option<bool>,
}

impl PrototypeEntry {
    pub fn primary_sequence(&self) -> Sequence {
        Sequence::parse(&self.sequences[0]).unwrap()
    }
}

/// Rows of the hardcopy figure that are quotable from the text. Row 8's
/// rendering drops an occurrence (one of its symbols appears only once,
/// which the multiplicity rule forbids), so it is flagged suspect and the
/// regenerated sequence is authoritative.
const FIGURE_STRINGS: [(u8, &str, bool); 4] = [
    (1, "abcdbdadbcd", false),
    (2, "abcacbc", false),
    (3, "abcdadccbd", false),
    (8, "abcadadbd", true),
];

/// The 17-row prototype catalog.
pub fn prototypes() -> Vec<PrototypeEntry> {
    (1..=17u8)
        .map(|class| {
            let encoding = Encoding::class_prototype(class);
            let trees = build_trees(&encoding).expect("prototypes are buildable");
            let sequences: Vec<String> = {
                let mut seen = HashSet::new();
                trees
                    .iter()
                    .map(tree_to_sequence)
                    .filter(|s| seen.insert(s.clone()))
                    .map(|s| s.display_string())
                    .collect()
            };
            let fig = FIGURE_STRINGS.iter().find(|&&(c, _, _)| c == class);
            let matches_figure = fig.map(|&(_, s, _)| sequences.iter().any(|x| x == s));
            PrototypeEntry {
                class,
                encoding: encoding.to_string(),
                trees,
                sequences,
                figure_string: fig.map(|&(_, s, _)| s),
                figure_suspect: fig.map(|&(_, _, sus)| sus).unwrap_or(false),
                matches_figure,
            }
        })
        .collect()
}

/// `ababa` plus everything generated from legal encodings with at most
/// `max_stars` padding elements.
pub fn psi_members(max_stars: usize) -> Vec<Sequence> {
    let mut out = vec![Sequence::parse("ababa").unwrap()];
    let mut seen: HashSet<Sequence> = out.iter().cloned().collect();
    for e in Encoding::enumerate_legal(max_stars) {
        for s in generate(&e).expect("enumerated encodings are legal") {
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq;

    fn enc(s: &str) -> Encoding {
        Encoding::parse(s).unwrap()
    }

    fn seqs(s: &str) -> Vec<String> {
        generate(&enc(s))
            .unwrap()
            .iter()
            .map(|x| x.display_string())
            .collect()
    }

    #[test]
    fn anchor_sequences() {
        assert_eq!(seqs("hs(dsc)"), vec!["abcacbc"]);
        assert_eq!(seqs("hcsc"), vec!["abcdbdadbcd"]);
        assert_eq!(seqs("hs(ds)c"), vec!["abcdadccbd"]);
    }

    #[test]
    fn regenerated_row8() {
        // the quotable rendering of this row is corrupt; the regenerated
        // sequence differs from it in exactly one position
        assert_eq!(seqs("*sh(dsc)"), vec!["abcadcdbd"]);
    }

    #[test]
    fn attachment_freedom_two_variants() {
        let trees = build_trees(&enc("*shsc")).unwrap();
        assert_eq!(trees.len(), 2);
    }

    #[test]
    fn single_variant_for_group_row() {
        let trees = build_trees(&enc("hs(dsc)")).unwrap();
        assert_eq!(trees.len(), 1);
    }

    #[test]
    fn tree_invariants_hold() {
        for class in 1..=17u8 {
            let e = Encoding::class_prototype(class);
            let trees = build_trees(&e).unwrap();
            assert!(!trees.is_empty() && trees.len() <= 4, "class {class}");
            for t in &trees {
                let lo = t.leaf_order();
                let mut sorted = lo.clone();
                sorted.sort_unstable();
                assert_eq!(lo, sorted, "class {class}: leaves out of order");
                let mut covered = vec![false; e.len() + 1];
                for n in &t.nodes {
                    for &l in &n.label {
                        covered[l] = true;
                    }
                }
                assert!(covered[1..].iter().all(|&b| b), "class {class}");
                assert!(matches!(t.nodes[t.root].role, NodeRole::Apex));
            }
        }
    }

    #[test]
    fn degenerate_single_node() {
        let t = LabeledTree {
            nodes: vec![TreeNode {
                children: vec![],
                label: vec![1],
                role: NodeRole::Leaf,
            }],
            root: 0,
        };
        assert_eq!(tree_to_sequence(&t).display_string(), "a");
    }

    #[test]
    fn multiplicity_rule() {
        for p in prototypes() {
            for s in &p.sequences {
                let s = Sequence::parse(s).unwrap();
                check_multiplicities(&enc(&p.encoding), &s);
            }
        }
    }

    fn check_multiplicities(e: &Encoding, s: &Sequence) {
        let mut counts = std::collections::HashMap::new();
        for &x in s.items() {
            *counts.entry(x).or_insert(0usize) += 1;
        }
        let two_trap = e
            .elements()
            .iter()
            .filter(|x| matches!(x, Element::Trap))
            .count()
            == 2;
        let mut cs: Vec<usize> = counts.values().copied().collect();
        cs.sort_unstable();
        if two_trap {
            // one symbol x4 (final trap), one x3 (paired trap), rest x2
            let mut want = vec![2; cs.len() - 2];
            want.extend_from_slice(&[3, 4]);
            assert_eq!(cs, want, "{e}");
        } else {
            // trap (or group) symbol x3, rest x2
            let mut want = vec![2; cs.len() - 1];
            want.push(3);
            assert_eq!(cs, want, "{e}");
        }
    }

    #[test]
    fn psi_contains_ababa_and_grows() {
        let p0 = psi_members(0);
        let p1 = psi_members(1);
        assert!(p0.contains(&Sequence::parse("ababa").unwrap()));
        assert!(p1.len() > p0.len());
        assert!(p1.len() >= 18);
    }

    #[test]
    fn no_member_contains_ababa() {
        let ababa = Sequence::parse("ababa").unwrap();
        for s in psi_members(1) {
            if s == ababa {
                continue;
            }
            assert!(!seq::contains(&ababa, &s), "{s}");
        }
    }
}
