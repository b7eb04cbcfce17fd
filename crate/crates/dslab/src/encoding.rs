//! The compact suit-string encoding of forbidden subsequences.
//!
//! An encoding is a word over five suits plus optional parenthesized groups.
//! ASCII aliases are used everywhere: `h` = ♥ binder, `d` = ♦ guard,
//! `c` = ♣ trap, `s` = ♠ trapped, `*` = ★ padding, and the two groups
//! `(ds)` and `(dsc)`. Unicode suit characters are accepted on input.
//!
//! Legality has two independent implementations that must agree: a rule
//! checker ([`Encoding::legality`]) and a 17-row class table
//! ([`Encoding::classify`]). The class table rows, in the canonical order
//! used throughout:
//!
//! ```text
//!  1  hcsc              8  *s*^k h(dsc)      13  *ds*^p hsc
//!  2  hs(dsc)           9  *s*^k h(ds)c      14  d*s*^p hsc
//!  3  hs(ds)c          10  *s*^k hdsc        15  *s*^p (ds)*^q hc
//!  4  hsdsc            11  *ds*^p s*^q hc    16  *s*^p d*^q s*^r hc
//!  5  hdssc            12  d*s*^p s*^q hc    17  *s*^p d*^q hsc
//!  6  dhssc
//!  7  *^a cs*^b hc  (a >= 1)
//! ```
//!
//! Rows 1 and 7 are the two-trap special forms (two `c`s, one `s`, no `d`);
//! every other row has exactly one `h`, `d`, `c` and two `s`s.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// The two admissible parenthesized groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    /// `(ds)` — a symbol acting as guard and trapped.
    GuardTrapped,
    /// `(dsc)` — a symbol acting as guard, trapped and trap.
    GuardTrappedTrap,
}

/// One element of an encoding: a single suit or a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Element {
    Binder,
    Guard,
    Trap,
    Trapped,
    Star,
    Group(Group),
}

impl Element {
    pub fn ascii(&self) -> &'static str {
        match self {
            Element::Binder => "h",
            Element::Guard => "d",
            Element::Trap => "c",
            Element::Trapped => "s",
            Element::Star => "*",
            Element::Group(Group::GuardTrapped) => "(ds)",
            Element::Group(Group::GuardTrappedTrap) => "(dsc)",
        }
    }

    /// Flattened suit letters of the element.
    pub fn symbols(&self) -> &'static [u8] {
        match self {
            Element::Binder => b"h",
            Element::Guard => b"d",
            Element::Trap => b"c",
            Element::Trapped => b"s",
            Element::Star => b"*",
            Element::Group(Group::GuardTrapped) => b"ds",
            Element::Group(Group::GuardTrappedTrap) => b"dsc",
        }
    }

    pub fn bears_trapped(&self) -> bool {
        matches!(self, Element::Trapped | Element::Group(_))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("empty encoding")]
    Empty,
    #[error("unknown character {0:?}")]
    UnknownChar(char),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("nested parentheses")]
    Nested,
    #[error("group must be (ds) or (dsc), got ({0})")]
    BadGroup(String),
}

/// A parsed compact encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Encoding {
    elements: Vec<Element>,
}

/// Rule identifiers for legality violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// exactly one binder
    CountBinder,
    /// exactly one guard
    CountGuard,
    /// exactly one trap
    CountTrap,
    /// exactly two trapped symbols
    CountTrapped,
    /// at most one group
    CountGroup,
    /// (i) the final symbol must be the trap
    FinalTrap,
    /// (ii) the guard must precede at least one trapped symbol
    GuardBeforeTrapped,
    /// (iii) all padding must precede the binder
    StarsBeforeBinder,
    /// (iv) padding or the binder must precede both trapped symbols
    SpineBeforeTrapped,
    /// (v) a (ds) group cannot precede the bare trapped symbol
    GroupAfterTrapped,
    /// (vi) the first two padding/binder elements need a trapped between them
    TrappedBetweenSpine,
}

impl Rule {
    pub fn label(&self) -> &'static str {
        match self {
            Rule::CountBinder => "count:h",
            Rule::CountGuard => "count:d",
            Rule::CountTrap => "count:c",
            Rule::CountTrapped => "count:s",
            Rule::CountGroup => "count:group",
            Rule::FinalTrap => "i",
            Rule::GuardBeforeTrapped => "ii",
            Rule::StarsBeforeBinder => "iii",
            Rule::SpineBeforeTrapped => "iv",
            Rule::GroupAfterTrapped => "v",
            Rule::TrappedBetweenSpine => "vi",
        }
    }
}

/// Outcome of the legality checks on one encoding.
#[derive(Debug, Clone, Serialize)]
pub struct LegalityReport {
    pub legal: bool,
    pub violations: Vec<Rule>,
    pub class: Option<u8>,
}

impl Encoding {
    pub fn new(elements: Vec<Element>) -> Self {
        Encoding { elements }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn star_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Star))
            .count()
    }

    /// Parse the ASCII (or Unicode-suit) concrete syntax.
    pub fn parse(text: &str) -> Result<Self, EncodingError> {
        let mut elements = Vec::new();
        let mut group: Option<String> = None;
        for ch in text.chars() {
            if ch.is_whitespace() {
                continue;
            }
            let letter = match ch {
                'h' | '♥' => Some('h'),
                'd' | '♦' => Some('d'),
                'c' | '♣' => Some('c'),
                's' | '♠' => Some('s'),
                '*' | '★' => Some('*'),
                '(' => None,
                ')' => None,
                other => return Err(EncodingError::UnknownChar(other)),
            };
            match ch {
                '(' => {
                    if group.is_some() {
                        return Err(EncodingError::Nested);
                    }
                    group = Some(String::new());
                }
                ')' => match group.take() {
                    None => return Err(EncodingError::Unbalanced),
                    Some(body) => match body.as_str() {
                        "ds" => elements.push(Element::Group(Group::GuardTrapped)),
                        "dsc" => elements.push(Element::Group(Group::GuardTrappedTrap)),
                        other => return Err(EncodingError::BadGroup(other.to_string())),
                    },
                },
                _ => {
                    let l = letter.unwrap();
                    match group.as_mut() {
                        Some(body) => body.push(l),
                        None => elements.push(match l {
                            'h' => Element::Binder,
                            'd' => Element::Guard,
                            'c' => Element::Trap,
                            's' => Element::Trapped,
                            _ => Element::Star,
                        }),
                    }
                }
            }
        }
        if group.is_some() {
            return Err(EncodingError::Unbalanced);
        }
        if elements.is_empty() {
            return Err(EncodingError::Empty);
        }
        Ok(Encoding { elements })
    }

    /// Flattened suit letters with the element index (1-based) of each.
    fn flat(&self) -> Vec<(u8, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            for &b in e.symbols() {
                out.push((b, i + 1));
            }
        }
        out
    }

    fn count(&self, letter: u8) -> usize {
        self.flat().iter().filter(|&&(b, _)| b == letter).count()
    }

    /// The two-trap special form `hcsc`.
    fn is_two_trap_base(&self) -> bool {
        self.elements
            == [
                Element::Binder,
                Element::Trap,
                Element::Trapped,
                Element::Trap,
            ]
    }

    /// The padded two-trap family `*^a cs *^b hc`, a >= 1.
    fn is_two_trap_padded(&self) -> bool {
        let e = &self.elements;
        let a = e.iter().take_while(|x| matches!(x, Element::Star)).count();
        if a == 0 || e.len() < a + 4 {
            return false;
        }
        if e[a] != Element::Trap || e[a + 1] != Element::Trapped {
            return false;
        }
        let b = e[a + 2..]
            .iter()
            .take_while(|x| matches!(x, Element::Star))
            .count();
        e.len() == a + 2 + b + 2
            && e[a + 2 + b] == Element::Binder
            && e[a + 3 + b] == Element::Trap
    }

    /// Rule-based legality check. Returns the full report including the
    /// class-table classification.
    pub fn legality(&self) -> LegalityReport {
        let class = self.classify();
        if self.is_two_trap_base() || self.is_two_trap_padded() {
            return LegalityReport {
                legal: true,
                violations: vec![],
                class,
            };
        }
        let mut violations = Vec::new();
        if self.count(b'h') != 1 {
            violations.push(Rule::CountBinder);
        }
        if self.count(b'd') != 1 {
            violations.push(Rule::CountGuard);
        }
        if self.count(b'c') != 1 {
            violations.push(Rule::CountTrap);
        }
        if self.count(b's') != 2 {
            violations.push(Rule::CountTrapped);
        }
        if self
            .elements
            .iter()
            .filter(|e| matches!(e, Element::Group(_)))
            .count()
            > 1
        {
            violations.push(Rule::CountGroup);
        }

        let flat = self.flat();
        // (i) final symbol is the trap
        if flat.last().map(|&(b, _)| b) != Some(b'c') {
            violations.push(Rule::FinalTrap);
        }
        // (ii) guard precedes at least one trapped
        let guard_pos = flat.iter().position(|&(b, _)| b == b'd');
        let spade_pos: Vec<usize> = flat
            .iter()
            .enumerate()
            .filter(|(_, &(b, _))| b == b's')
            .map(|(p, _)| p)
            .collect();
        if let Some(g) = guard_pos {
            if !spade_pos.iter().any(|&p| p > g) {
                violations.push(Rule::GuardBeforeTrapped);
            }
        }
        // (iii) all stars precede the binder
        let binder_pos = flat.iter().position(|&(b, _)| b == b'h');
        if let Some(h) = binder_pos {
            if flat
                .iter()
                .enumerate()
                .any(|(p, &(b, _))| b == b'*' && p > h)
            {
                violations.push(Rule::StarsBeforeBinder);
            }
        }
        // (iv) a star or the binder precedes both trapped symbols
        if let Some(&first_spade) = spade_pos.first() {
            let spine_first = flat
                .iter()
                .position(|&(b, _)| b == b'*' || b == b'h');
            match spine_first {
                Some(p) if p < first_spade => {}
                _ => violations.push(Rule::SpineBeforeTrapped),
            }
        }
        // (v) a (ds) group cannot precede the bare trapped symbol
        let group_idx = self
            .elements
            .iter()
            .position(|e| matches!(e, Element::Group(Group::GuardTrapped)));
        if let Some(g) = group_idx {
            if self.elements[g + 1..]
                .iter()
                .any(|e| matches!(e, Element::Trapped))
            {
                violations.push(Rule::GroupAfterTrapped);
            }
        }
        // (vi) first two spine elements (stars or the binder) must have a
        // trapped-bearing element between them
        let spine_elems: Vec<usize> = self
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::Star | Element::Binder))
            .map(|(p, _)| p)
            .collect();
        if spine_elems.len() >= 2 {
            let (s1, s2) = (spine_elems[0], spine_elems[1]);
            if !self.elements[s1 + 1..s2]
                .iter()
                .any(|e| e.bears_trapped())
            {
                violations.push(Rule::TrappedBetweenSpine);
            }
        }

        LegalityReport {
            legal: violations.is_empty(),
            violations,
            class,
        }
    }

    /// The class-table classification: which of the 17 rows matches, if any.
    pub fn classify(&self) -> Option<u8> {
        for class in 1..=17 {
            if self.matches_class(class) {
                return Some(class);
            }
        }
        None
    }

    /// All rows matching this encoding (used to test disjointness).
    pub fn matching_classes(&self) -> Vec<u8> {
        (1..=17).filter(|&c| self.matches_class(c)).collect()
    }

    fn matches_class(&self, class: u8) -> bool {
        use Element::*;
        let e = &self.elements;
        let gds = Group(self::Group::GuardTrapped);
        let gdsc = Group(self::Group::GuardTrappedTrap);
        match class {
            1 => e == &[Binder, Trap, Trapped, Trap],
            2 => e == &[Binder, Trapped, gdsc],
            3 => e == &[Binder, Trapped, gds, Trap],
            4 => e == &[Binder, Trapped, Guard, Trapped, Trap],
            5 => e == &[Binder, Guard, Trapped, Trapped, Trap],
            6 => e == &[Guard, Binder, Trapped, Trapped, Trap],
            7 => self.is_two_trap_padded(),
            8 => match_row(e, &[One(Star), One(Trapped)], &[One(Binder), One(gdsc)]),
            9 => match_row(
                e,
                &[One(Star), One(Trapped)],
                &[One(Binder), One(gds), One(Trap)],
            ),
            10 => match_row(
                e,
                &[One(Star), One(Trapped)],
                &[One(Binder), One(Guard), One(Trapped), One(Trap)],
            ),
            11 => match_row2(
                e,
                &[One(Star), One(Guard), One(Trapped)],
                &[One(Trapped)],
                &[One(Binder), One(Trap)],
            ),
            12 => match_row2(
                e,
                &[One(Guard), One(Star), One(Trapped)],
                &[One(Trapped)],
                &[One(Binder), One(Trap)],
            ),
            13 => match_row(
                e,
                &[One(Star), One(Guard), One(Trapped)],
                &[One(Binder), One(Trapped), One(Trap)],
            ),
            14 => match_row(
                e,
                &[One(Guard), One(Star), One(Trapped)],
                &[One(Binder), One(Trapped), One(Trap)],
            ),
            15 => match_row2(
                e,
                &[One(Star), One(Trapped)],
                &[One(gds)],
                &[One(Binder), One(Trap)],
            ),
            16 => match_row3(
                e,
                &[One(Star), One(Trapped)],
                &[One(Guard)],
                &[One(Trapped)],
                &[One(Binder), One(Trap)],
            ),
            17 => match_row2(
                e,
                &[One(Star), One(Trapped)],
                &[One(Guard)],
                &[One(Binder), One(Trapped), One(Trap)],
            ),
            _ => false,
        }
    }

    /// Every legal encoding with at most `max_stars` padding elements, in
    /// length-then-lexicographic (printed form) order.
    pub fn enumerate_legal(max_stars: usize) -> Vec<Encoding> {
        let mut out: Vec<Encoding> = Vec::new();
        for class in 1..=17u8 {
            out.extend(Self::class_members(class, max_stars));
        }
        out.sort_by(|a, b| {
            (a.len(), a.to_string())
                .cmp(&(b.len(), b.to_string()))
        });
        out.dedup();
        out
    }

    /// Members of one class-table row with at most `max_stars` stars.
    pub fn class_members(class: u8, max_stars: usize) -> Vec<Encoding> {
        use Element::*;
        let gds = Group(self::Group::GuardTrapped);
        let gdsc = Group(self::Group::GuardTrappedTrap);
        let mut out = Vec::new();
        let fixed: Option<Vec<Element>> = match class {
            1 => Some(vec![Binder, Trap, Trapped, Trap]),
            2 => Some(vec![Binder, Trapped, gdsc]),
            3 => Some(vec![Binder, Trapped, gds, Trap]),
            4 => Some(vec![Binder, Trapped, Guard, Trapped, Trap]),
            5 => Some(vec![Binder, Guard, Trapped, Trapped, Trap]),
            6 => Some(vec![Guard, Binder, Trapped, Trapped, Trap]),
            _ => None,
        };
        if let Some(f) = fixed {
            out.push(Encoding::new(f));
            return out;
        }
        let push = |out: &mut Vec<Encoding>, parts: Vec<Vec<Element>>| {
            out.push(Encoding::new(parts.concat()));
        };
        let stars = |n: usize| vec![Star; n];
        match class {
            7 => {
                for a in 1..=max_stars {
                    for b in 0..=(max_stars - a) {
                        push(
                            &mut out,
                            vec![stars(a), vec![Trap, Trapped], stars(b), vec![Binder, Trap]],
                        );
                    }
                }
            }
            8 | 9 | 10 => {
                if max_stars == 0 {
                    return out;
                }
                let tail: Vec<Element> = match class {
                    8 => vec![Binder, gdsc],
                    9 => vec![Binder, gds, Trap],
                    _ => vec![Binder, Guard, Trapped, Trap],
                };
                for k in 0..=(max_stars - 1) {
                    push(
                        &mut out,
                        vec![vec![Star, Trapped], stars(k), tail.clone()],
                    );
                }
            }
            11 | 12 => {
                if max_stars == 0 {
                    return out;
                }
                let head: Vec<Element> = if class == 11 {
                    vec![Star, Guard, Trapped]
                } else {
                    vec![Guard, Star, Trapped]
                };
                for p in 0..=(max_stars - 1) {
                    for q in 0..=(max_stars - 1 - p) {
                        push(
                            &mut out,
                            vec![
                                head.clone(),
                                stars(p),
                                vec![Trapped],
                                stars(q),
                                vec![Binder, Trap],
                            ],
                        );
                    }
                }
            }
            13 | 14 => {
                if max_stars == 0 {
                    return out;
                }
                let head: Vec<Element> = if class == 13 {
                    vec![Star, Guard, Trapped]
                } else {
                    vec![Guard, Star, Trapped]
                };
                for p in 0..=(max_stars - 1) {
                    push(
                        &mut out,
                        vec![head.clone(), stars(p), vec![Binder, Trapped, Trap]],
                    );
                }
            }
            15 => {
                if max_stars == 0 {
                    return out;
                }
                for p in 0..=(max_stars - 1) {
                    for q in 0..=(max_stars - 1 - p) {
                        push(
                            &mut out,
                            vec![
                                vec![Star, Trapped],
                                stars(p),
                                vec![gds],
                                stars(q),
                                vec![Binder, Trap],
                            ],
                        );
                    }
                }
            }
            16 => {
                if max_stars == 0 {
                    return out;
                }
                for p in 0..=(max_stars - 1) {
                    for q in 0..=(max_stars - 1 - p) {
                        for r in 0..=(max_stars - 1 - p - q) {
                            push(
                                &mut out,
                                vec![
                                    vec![Star, Trapped],
                                    stars(p),
                                    vec![Guard],
                                    stars(q),
                                    vec![Trapped],
                                    stars(r),
                                    vec![Binder, Trap],
                                ],
                            );
                        }
                    }
                }
            }
            17 => {
                if max_stars == 0 {
                    return out;
                }
                for p in 0..=(max_stars - 1) {
                    for q in 0..=(max_stars - 1 - p) {
                        push(
                            &mut out,
                            vec![
                                vec![Star, Trapped],
                                stars(p),
                                vec![Guard],
                                stars(q),
                                vec![Binder, Trapped, Trap],
                            ],
                        );
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// The canonical minimum-star member of a class row.
    pub fn class_prototype(class: u8) -> Encoding {
        let mut members = Self::class_members(class, 1);
        debug_assert!(!members.is_empty());
        members.sort_by_key(|e| (e.len(), e.to_string()));
        members.remove(0)
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.elements {
            f.write_str(e.ascii())?;
        }
        Ok(())
    }
}

/// A row pattern piece: exactly one element. Star-runs between pieces are
/// implicit in the matchers below.
#[derive(Clone, Copy)]
struct One(Element);

/// head pieces, then stars, then tail pieces (head pieces adjacent).
fn match_row(e: &[Element], head: &[One], tail: &[One]) -> bool {
    match_segments(e, &[head, tail])
}

/// head, stars, mid, stars, tail.
fn match_row2(e: &[Element], head: &[One], mid: &[One], tail: &[One]) -> bool {
    match_segments(e, &[head, mid, tail])
}

fn match_row3(e: &[Element], a: &[One], b: &[One], c: &[One], d: &[One]) -> bool {
    match_segments(e, &[a, b, c, d])
}

/// The encoding must be segment0, *^k, segment1, *^k, ... with arbitrary
/// star runs between segments (and none before the first or after the last).
fn match_segments(e: &[Element], segments: &[&[One]]) -> bool {
    let mut pos = 0usize;
    for (si, seg) in segments.iter().enumerate() {
        if si > 0 {
            while pos < e.len() && e[pos] == Element::Star {
                pos += 1;
            }
        }
        for One(want) in seg.iter() {
            if pos >= e.len() || e[pos] != *want {
                return false;
            }
            pos += 1;
        }
    }
    pos == e.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(s: &str) -> Encoding {
        Encoding::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            enc("hcsc").elements(),
            &[
                Element::Binder,
                Element::Trap,
                Element::Trapped,
                Element::Trap
            ]
        );
        assert_eq!(
            enc("hs(dsc)").elements(),
            &[
                Element::Binder,
                Element::Trapped,
                Element::Group(Group::GuardTrappedTrap)
            ]
        );
        assert_eq!(
            Encoding::parse("h((d)"),
            Err(EncodingError::Nested)
        );
        assert_eq!(Encoding::parse("h(d"), Err(EncodingError::Unbalanced));
        assert_eq!(Encoding::parse("  "), Err(EncodingError::Empty));
        assert_eq!(Encoding::parse("hx"), Err(EncodingError::UnknownChar('x')));
        assert_eq!(
            Encoding::parse("h(dd)"),
            Err(EncodingError::BadGroup("dd".into()))
        );
        // unicode suits accepted
        assert_eq!(enc("♥♠(♦♠♣)"), enc("hs(dsc)"));
    }

    #[test]
    fn print_parse_round_trip() {
        for e in Encoding::enumerate_legal(2) {
            let printed = e.to_string();
            assert_eq!(Encoding::parse(&printed).unwrap(), e, "{printed}");
        }
    }

    #[test]
    fn legality_examples() {
        assert!(enc("hs(dsc)").legality().legal);
        let r = enc("hssd").legality();
        assert!(!r.legal);
        assert!(r.violations.contains(&Rule::FinalTrap));
        let r = enc("hssc").legality();
        assert!(!r.legal);
        assert!(r.violations.contains(&Rule::CountGuard));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(enc("hcsc").classify(), Some(1));
        assert_eq!(enc("hs(ds)c").classify(), Some(3));
        assert_eq!(enc("ssss").classify(), None);
        assert_eq!(enc("*cshc").classify(), Some(7));
        assert_eq!(enc("*cs*hc").classify(), Some(7));
    }

    #[test]
    fn seventeen_prototypes() {
        for class in 1..=17u8 {
            let p = Encoding::class_prototype(class);
            assert_eq!(p.classify(), Some(class), "prototype of {class}: {p}");
            assert!(p.legality().legal, "prototype of {class}: {p}");
        }
    }

    #[test]
    fn enumeration_monotone_and_legal() {
        let e0 = Encoding::enumerate_legal(0);
        let e1 = Encoding::enumerate_legal(1);
        let e2 = Encoding::enumerate_legal(2);
        assert!(e0.len() < e1.len() && e1.len() < e2.len());
        for e in &e2 {
            assert!(e.legality().legal, "{e}");
        }
        // star-free legality: exactly the six fixed rows
        assert_eq!(e0.len(), 6);
        // one star unlocks the remaining eleven rows
        assert_eq!(e1.len(), 18);
    }
}
