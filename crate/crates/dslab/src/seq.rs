//! Sequences over integer symbols and the order-isomorphic containment test.
//!
//! A [`Sequence`] is a finite word over dense nonnegative symbol ids. Two
//! sequences are isomorphic when one is obtained from the other by a
//! bijective renaming of symbols; `contains` decides whether a pattern is
//! isomorphic to a subsequence of a text. The matcher is complete (no false
//! negatives), which is what lets the verification suites assert
//! *non*-containment.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// A symbol is a dense nonnegative id. Letters `a..z` are an I/O convenience
/// only; transcripts routinely have thousands of symbols.
pub type Symbol = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("regularity parameter c must be >= 1")]
    ZeroRegularity,
    #[error("oracle cap exceeded: |text| <= {max_len} and ||text|| <= {max_alpha} required")]
    OracleCap { max_len: usize, max_alpha: usize },
    #[error("cannot render {0} distinct symbols in letter form")]
    TooManyLetters(usize),
    #[error("empty token in sequence text")]
    EmptyToken,
    #[error("bad symbol token {0:?}")]
    BadToken(String),
}

/// A finite sequence of symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    items: Vec<Symbol>,
}

impl Sequence {
    pub fn new(items: Vec<Symbol>) -> Self {
        Sequence { items }
    }

    pub fn empty() -> Self {
        Sequence { items: Vec::new() }
    }

    /// Parse either letter form (`abcacbc`) or token form (`0 1 2 0 2 1 2`).
    pub fn parse(text: &str) -> Result<Self, SeqError> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(Sequence::empty());
        }
        if t.chars().all(|ch| ch.is_ascii_lowercase()) {
            Ok(Sequence::new(
                t.chars().map(|ch| (ch as u32) - ('a' as u32)).collect(),
            ))
        } else {
            let mut items = Vec::new();
            for tok in t.split_whitespace() {
                let id: u32 = tok
                    .parse()
                    .map_err(|_| SeqError::BadToken(tok.to_string()))?;
                items.push(id);
            }
            Ok(Sequence::new(items))
        }
    }

    pub fn items(&self) -> &[Symbol] {
        &self.items
    }

    /// Occurrence count |s|.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of distinct symbols ||s||.
    pub fn alphabet_size(&self) -> usize {
        let mut seen: Vec<Symbol> = self.items.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Rename symbols to 0,1,2,... in order of first occurrence. The result
    /// is the canonical representative of the isomorphism class.
    pub fn normalize(&self) -> Sequence {
        let mut map: HashMap<Symbol, Symbol> = HashMap::new();
        let mut next: Symbol = 0;
        let items = self
            .items
            .iter()
            .map(|&s| {
                *map.entry(s).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        Sequence::new(items)
    }

    pub fn reverse(&self) -> Sequence {
        Sequence::new(self.items.iter().rev().copied().collect())
    }

    /// A palindrome is a sequence isomorphic to its own reversal.
    pub fn is_palindrome(&self) -> bool {
        self.normalize() == self.reverse().normalize()
    }

    /// Equal symbols at distance >= c everywhere.
    pub fn is_c_regular(&self, c: usize) -> Result<bool, SeqError> {
        if c == 0 {
            return Err(SeqError::ZeroRegularity);
        }
        let mut last: HashMap<Symbol, usize> = HashMap::new();
        for (j, &s) in self.items.iter().enumerate() {
            if let Some(&i) = last.get(&s) {
                if j - i < c {
                    return Ok(false);
                }
            }
            last.insert(s, j);
        }
        Ok(true)
    }

    /// Letter form when the alphabet fits in a..z.
    pub fn to_letters(&self) -> Result<String, SeqError> {
        let n = self.normalize();
        if n.alphabet_size() > 26 {
            return Err(SeqError::TooManyLetters(n.alphabet_size()));
        }
        Ok(n.items
            .iter()
            .map(|&s| char::from(b'a' + s as u8))
            .collect())
    }

    /// Letter form when possible, token form otherwise.
    pub fn display_string(&self) -> String {
        match self.to_letters() {
            Ok(s) => s,
            Err(_) => self
                .items
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    /// Collapse maximal runs of equal symbols to single occurrences.
    pub fn collapse_runs(&self) -> Sequence {
        let mut items: Vec<Symbol> = Vec::with_capacity(self.items.len());
        for &s in &self.items {
            if items.last() != Some(&s) {
                items.push(s);
            }
        }
        Sequence::new(items)
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({})", self.display_string())
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_string())
    }
}

/// Plain subsequence test (no renaming): `sub` occurs in `text` at strictly
/// increasing indices. Greedy scan.
pub fn contains_plain(sub: &Sequence, text: &Sequence) -> bool {
    let mut it = sub.items.iter();
    let mut want = it.next();
    for &s in &text.items {
        match want {
            None => return true,
            Some(&w) if w == s => want = it.next(),
            _ => {}
        }
    }
    want.is_none()
}

/// A witness embedding: text positions (increasing) plus the symbol map
/// pattern-symbol -> text-symbol.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub positions: Vec<usize>,
    pub binding: Vec<(Symbol, Symbol)>,
}

/// Is the pattern isomorphic to a subsequence of the text?
pub fn contains(pattern: &Sequence, text: &Sequence) -> bool {
    find_embedding(pattern, text).is_some()
}

/// Complete search for an embedding. Returns the witness when one exists.
pub fn find_embedding(pattern: &Sequence, text: &Sequence) -> Option<Embedding> {
    Matcher::new(text).find(pattern)
}

/// Exhaustive ground-truth containment over all injective symbol maps
/// combined with greedy subsequence tests. Capped to keep it honest as an
/// oracle rather than an algorithm.
pub fn contains_oracle(pattern: &Sequence, text: &Sequence) -> Result<bool, SeqError> {
    const MAX_LEN: usize = 14;
    const MAX_ALPHA: usize = 5;
    if text.len() > MAX_LEN || text.alphabet_size() > MAX_ALPHA {
        return Err(SeqError::OracleCap {
            max_len: MAX_LEN,
            max_alpha: MAX_ALPHA,
        });
    }
    let p = pattern.normalize();
    let t = text.normalize();
    if p.is_empty() {
        return Ok(true);
    }
    let pk = p.alphabet_size();
    let tk = t.alphabet_size();
    if pk > tk {
        return Ok(false);
    }
    let tsyms: Vec<Symbol> = (0..tk as Symbol).collect();
    let mut map: Vec<Symbol> = Vec::with_capacity(pk);
    Ok(try_maps(&p, &t, &tsyms, &mut map))
}

fn try_maps(p: &Sequence, t: &Sequence, tsyms: &[Symbol], map: &mut Vec<Symbol>) -> bool {
    if map.len() == p.alphabet_size() {
        let image = Sequence::new(p.items.iter().map(|&s| map[s as usize]).collect());
        return contains_plain(&image, t);
    }
    for &cand in tsyms {
        if map.contains(&cand) {
            continue;
        }
        map.push(cand);
        if try_maps(p, t, tsyms, map) {
            map.pop();
            return true;
        }
        map.pop();
    }
    false
}

/// Backtracking matcher over text positions with on-the-fly symbol binding.
///
/// Scans the pattern left to right. A pattern symbol already bound to a text
/// symbol jumps greedily to that symbol's next occurrence (dominant, since
/// the binding is fixed). An unbound pattern symbol branches over candidate
/// text symbols, each tried at its first occurrence past the cursor.
///
/// Pruning, all sound (necessary conditions only):
/// * remaining-count — a candidate must have at least as many occurrences
///   left as the pattern symbol still needs;
/// * suffix availability — for each multiplicity m, the number of text
///   symbols with >= m occurrences left must cover the unbound pattern
///   symbols still needing >= m;
/// * pairwise projection — for every already-bound pattern symbol r, the
///   two-symbol projection of the pattern onto {s, r} must embed into the
///   merged occurrence lists of the candidate and r's image;
/// * a capped memo of failed (pattern index, cursor, binding) states.
pub struct Matcher {
    text: Sequence,
    /// occurrence positions per text symbol
    occ: Vec<Vec<u32>>,
    /// avail[m-1][t] = number of symbols with >= m occurrences in text[t..]
    avail: Vec<Vec<u32>>,
    max_mult: usize,
    memo: std::collections::HashSet<(u16, u32, Vec<Symbol>)>,
    memo_cap: usize,
    pub nodes: u64,
}

struct PatternInfo {
    items: Vec<Symbol>,
    nsyms: usize,
    /// total occurrences per pattern symbol
    total: Vec<u32>,
    /// remaining occurrences (incl. current) per symbol from each position
    remaining: Vec<Vec<u32>>,
    /// projection of the pattern onto each unordered symbol pair, as the
    /// interleaving word over {0,1} (0 = smaller symbol id)
    proj: HashMap<(Symbol, Symbol), Vec<u8>>,
}

impl Matcher {
    pub fn new(text: &Sequence) -> Matcher {
        let text = text.normalize();
        let nsyms = text.alphabet_size();
        let mut occ: Vec<Vec<u32>> = vec![Vec::new(); nsyms];
        for (i, &s) in text.items().iter().enumerate() {
            occ[s as usize].push(i as u32);
        }
        let max_mult = occ.iter().map(|o| o.len()).max().unwrap_or(0);
        // Build suffix availability tables by scanning right to left.
        let n = text.len();
        let mut avail = vec![vec![0u32; n + 1]; max_mult];
        let mut count = vec![0u32; nsyms];
        let mut running = vec![0u32; max_mult];
        for t in (0..n).rev() {
            let s = text.items()[t] as usize;
            count[s] += 1;
            let m = count[s] as usize;
            if m <= max_mult {
                running[m - 1] += 1;
            }
            for (k, r) in running.iter().enumerate() {
                avail[k][t] = *r;
            }
        }
        Matcher {
            text,
            occ,
            avail,
            max_mult,
            memo: std::collections::HashSet::new(),
            memo_cap: 1 << 20,
            nodes: 0,
        }
    }

    pub fn find(&mut self, pattern: &Sequence) -> Option<Embedding> {
        let p = pattern.normalize();
        if p.is_empty() {
            return Some(Embedding {
                positions: vec![],
                binding: vec![],
            });
        }
        if p.len() > self.text.len() || p.alphabet_size() > self.occ.len() {
            return None;
        }
        let info = Self::pattern_info(&p);
        // Quick multiset feasibility: the pattern's multiplicity profile must
        // be coverable by the text's at position 0.
        if !self.multiset_feasible(&info) {
            return None;
        }
        let mut binding: Vec<Option<Symbol>> = vec![None; info.nsyms];
        let mut used: Vec<bool> = vec![false; self.occ.len()];
        let mut positions: Vec<u32> = Vec::with_capacity(p.len());
        self.memo.clear();
        if self.step(&info, 0, 0, &mut binding, &mut used, &mut positions) {
            let bind_pairs = binding
                .iter()
                .enumerate()
                .filter_map(|(s, b)| b.map(|t| (s as Symbol, t)))
                .collect();
            Some(Embedding {
                positions: positions.iter().map(|&x| x as usize).collect(),
                binding: bind_pairs,
            })
        } else {
            None
        }
    }

    fn pattern_info(p: &Sequence) -> PatternInfo {
        let nsyms = p.alphabet_size();
        let len = p.len();
        let mut total = vec![0u32; nsyms];
        for &s in p.items() {
            total[s as usize] += 1;
        }
        let mut remaining = vec![vec![0u32; nsyms]; len + 1];
        for i in (0..len).rev() {
            let row = remaining[i + 1].clone();
            remaining[i] = row;
            remaining[i][p.items()[i] as usize] += 1;
        }
        let mut proj: HashMap<(Symbol, Symbol), Vec<u8>> = HashMap::new();
        for a in 0..nsyms as Symbol {
            for b in (a + 1)..nsyms as Symbol {
                let word = p
                    .items()
                    .iter()
                    .filter(|&&s| s == a || s == b)
                    .map(|&s| if s == a { 0 } else { 1 })
                    .collect();
                proj.insert((a, b), word);
            }
        }
        PatternInfo {
            items: p.items().to_vec(),
            nsyms,
            total,
            remaining,
            proj,
        }
    }

    fn multiset_feasible(&self, info: &PatternInfo) -> bool {
        for m in 1..=self.max_mult {
            let need = info.total.iter().filter(|&&c| c as usize >= m).count() as u32;
            if need > self.avail[m - 1][0] {
                return false;
            }
        }
        // pattern symbols needing more than the text's densest symbol
        info.total
            .iter()
            .all(|&c| (c as usize) <= self.max_mult)
    }

    /// Does the suffix of the text starting at `t` still offer enough
    /// distinct symbols per multiplicity class for the unbound pattern
    /// symbols at pattern position `p`?
    fn availability_ok(
        &self,
        info: &PatternInfo,
        p: usize,
        t: u32,
        binding: &[Option<Symbol>],
    ) -> bool {
        if t as usize >= self.avail.first().map_or(0, |a| a.len()) {
            // cursor at end: fine only if pattern exhausted (checked by caller)
            return true;
        }
        for m in 1..=self.max_mult {
            let mut need = 0u32;
            for s in 0..info.nsyms {
                if binding[s].is_none() && info.remaining[p][s] as usize >= m {
                    need += 1;
                }
            }
            if need > self.avail[m - 1][t as usize] {
                return false;
            }
        }
        true
    }

    /// Pairwise-projection consistency of binding pattern symbol `s` to text
    /// symbol `cand`, against every established (r -> tau).
    fn pairwise_ok(
        &self,
        info: &PatternInfo,
        s: Symbol,
        cand: Symbol,
        binding: &[Option<Symbol>],
    ) -> bool {
        for (r, b) in binding.iter().enumerate() {
            let r = r as Symbol;
            let Some(tau) = *b else { continue };
            if r == s {
                continue;
            }
            let (key, s_is_low) = if s < r { ((s, r), true) } else { ((r, s), false) };
            let word = &info.proj[&key];
            let (lo_occ, hi_occ) = if s_is_low {
                (&self.occ[cand as usize], &self.occ[tau as usize])
            } else {
                (&self.occ[tau as usize], &self.occ[cand as usize])
            };
            if !word_embeds(word, lo_occ, hi_occ) {
                return false;
            }
        }
        true
    }

    fn step(
        &mut self,
        info: &PatternInfo,
        p: usize,
        t: u32,
        binding: &mut Vec<Option<Symbol>>,
        used: &mut Vec<bool>,
        positions: &mut Vec<u32>,
    ) -> bool {
        if p == info.items.len() {
            return true;
        }
        self.nodes += 1;
        if !self.availability_ok(info, p, t, binding) {
            return false;
        }
        let s = info.items[p];
        let need = info.remaining[p][s as usize];
        if let Some(tau) = binding[s as usize] {
            // Greedy jump to tau's next occurrence.
            let occ = &self.occ[tau as usize];
            let idx = occ.partition_point(|&x| x < t);
            if occ.len() - idx < need as usize {
                return false;
            }
            let pos = occ[idx];
            positions.push(pos);
            if self.step(info, p + 1, pos + 1, binding, used, positions) {
                return true;
            }
            positions.pop();
            return false;
        }
        // Unbound: consult the failure memo.
        let key = (
            p as u16,
            t,
            binding.iter().map(|b| b.map_or(u32::MAX, |x| x)).collect::<Vec<_>>(),
        );
        if self.memo.contains(&key) {
            return false;
        }
        // Walk positions from t; each first-seen, unused, feasible symbol is
        // a candidate, tried at that position.
        let n = self.text.len() as u32;
        let mut cursor = t;
        let mut stamp: Vec<bool> = vec![false; self.occ.len()];
        while cursor < n {
            let sym = self.text.items()[cursor as usize];
            if !stamp[sym as usize] {
                stamp[sym as usize] = true;
                if !used[sym as usize] {
                    let occ = &self.occ[sym as usize];
                    let idx = occ.partition_point(|&x| x < cursor);
                    if (occ.len() - idx) as u32 >= need
                        && self.pairwise_ok(info, s, sym, binding)
                    {
                        binding[s as usize] = Some(sym);
                        used[sym as usize] = true;
                        positions.push(cursor);
                        if self.step(info, p + 1, cursor + 1, binding, used, positions) {
                            return true;
                        }
                        positions.pop();
                        binding[s as usize] = None;
                        used[sym as usize] = false;
                    }
                }
            }
            cursor += 1;
            // Availability can only degrade as the cursor moves right.
            if cursor < n && !self.availability_ok(info, p, cursor, binding) {
                break;
            }
        }
        if self.memo.len() >= self.memo_cap {
            self.memo.clear();
        }
        self.memo.insert(key);
        false
    }
}

/// Can `word` over {0,1} be realized as a merge-respecting subsequence of the
/// two occurrence lists? Greedy on the merged position order.
fn word_embeds(word: &[u8], lo_occ: &[u32], hi_occ: &[u32]) -> bool {
    let mut li = 0usize;
    let mut hi = 0usize;
    for &w in word {
        if w == 0 {
            // need a lo occurrence after max consumed position
            if li >= lo_occ.len() {
                return false;
            }
            let pos = lo_occ[li];
            li += 1;
            // advance hi past nothing; hi entries before pos stay usable? No:
            // positions must increase globally, so drop hi occurrences <= pos.
            while hi < hi_occ.len() && hi_occ[hi] <= pos {
                hi += 1;
            }
        } else {
            if hi >= hi_occ.len() {
                return false;
            }
            let pos = hi_occ[hi];
            hi += 1;
            while li < lo_occ.len() && lo_occ[li] <= pos {
                li += 1;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sequence {
        Sequence::parse(text).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(s("bab").normalize(), s("aba"));
        assert_eq!(s("abcacbc").normalize(), s("abcacbc"));
        assert_eq!(s("dcdc").normalize(), s("abab"));
    }

    #[test]
    fn regularity_examples() {
        assert!(s("abab").is_c_regular(2).unwrap());
        assert!(!s("aa").is_c_regular(2).unwrap());
        assert!(s("abcabc").is_c_regular(3).unwrap());
        assert_eq!(s("aa").is_c_regular(0), Err(SeqError::ZeroRegularity));
    }

    #[test]
    fn palindrome_examples() {
        assert!(s("ababa").is_palindrome());
        assert!(s("abadadbd").is_palindrome());
        assert!(s("ab").is_palindrome()); // ba normalizes back to ab
        assert!(!s("aab").is_palindrome()); // baa normalizes to abb
    }

    #[test]
    fn plain_containment() {
        assert!(contains_plain(&s("1 0 1 0"), &s("1 0 2 1 0")));
        assert!(!contains_plain(&s("aa"), &s("ab")));
        assert!(contains_plain(&s("abc"), &s("aabbcc")));
    }

    #[test]
    fn iso_containment_examples() {
        assert!(contains(&s("abcacbc"), &s("abcacbc")));
        assert!(!contains(&s("abcbcac"), &s("abcacbc")));
        assert!(contains(&s("abab"), &s("abcacbc")));
        assert!(!contains(&s("ababa"), &s("abcacbc")));
        assert!(contains(&s(""), &s("abc")));
        assert!(contains(&s(""), &s("")));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(contains_oracle(&s("abab"), &s("abba")).unwrap(), false);
        assert_eq!(contains_oracle(&s("ab"), &s("ab")).unwrap(), true);
        assert_eq!(contains_oracle(&s("aba"), &s("abab")).unwrap(), true);
        assert!(contains_oracle(&s("a"), &s("abcdefabcdefabc")).is_err());
    }

    #[test]
    fn embedding_witness_is_valid() {
        let p = s("abab");
        let t = s("abcacbc");
        let e = find_embedding(&p, &t).unwrap();
        assert_eq!(e.positions.len(), p.len());
        for w in e.positions.windows(2) {
            assert!(w[0] < w[1]);
        }
        let pn = p.normalize();
        let tn = t.normalize();
        let map: HashMap<Symbol, Symbol> = e.binding.iter().copied().collect();
        for (k, &pos) in e.positions.iter().enumerate() {
            assert_eq!(map[&pn.items()[k]], tn.items()[pos]);
        }
    }
}
