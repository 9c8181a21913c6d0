//! Sequences over a group: finite unordered multisets of elements.
//!
//! A [`Sequence`] is stored canonically as a sorted map from element to
//! multiplicity, so two sequences are equal exactly when they are equal as
//! multisets. This module also provides the text form used for I/O and the
//! visitor-based multiset enumerator that drives the exhaustive searches.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::{ElemSet, Element};
use crate::group::Group;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("not a subsequence")]
    NotASubsequence,
    #[error("cannot parse sequence {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Sequence {
    counts: BTreeMap<Element, u32>,
    len: usize,
}

impl Sequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// `g^[k]`.
    pub fn power(g: Element, k: u32) -> Self {
        let mut s = Self::new();
        s.push_n(g, k);
        s
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(elems: I) -> Self {
        let mut s = Self::new();
        for g in elems {
            s.push_n(g, 1);
        }
        s
    }

    pub fn push_n(&mut self, g: Element, k: u32) {
        if k > 0 {
            *self.counts.entry(g).or_insert(0) += k;
            self.len += k as usize;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `v_g(S)`.
    pub fn multiplicity(&self, g: Element) -> u32 {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    /// `(element, multiplicity)` pairs in increasing element order.
    pub fn counts(&self) -> impl Iterator<Item = (Element, u32)> + '_ {
        self.counts.iter().map(|(&g, &k)| (g, k))
    }

    pub fn support(&self) -> ElemSet {
        self.counts.keys().copied().collect()
    }

    /// The terms in nondecreasing order, repeated by multiplicity.
    pub fn elements(&self) -> Vec<Element> {
        self.counts
            .iter()
            .flat_map(|(&g, &k)| std::iter::repeat_n(g, k as usize))
            .collect()
    }

    /// `S·T`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut s = self.clone();
        for (g, k) in other.counts() {
            s.push_n(g, k);
        }
        s
    }

    /// `T | S`.
    pub fn divides(&self, other: &Sequence) -> bool {
        self.counts().all(|(g, k)| other.multiplicity(g) >= k)
    }

    /// `S·T^[-1]`.
    pub fn remove(&self, other: &Sequence) -> Result<Sequence, SequenceError> {
        if !other.divides(self) {
            return Err(SequenceError::NotASubsequence);
        }
        let mut s = self.clone();
        for (g, k) in other.counts() {
            let e = s.counts.get_mut(&g).unwrap();
            *e -= k;
            if *e == 0 {
                s.counts.remove(&g);
            }
            s.len -= k as usize;
        }
        Ok(s)
    }

    /// `S_A`, the terms lying in `A`.
    pub fn restrict(&self, a: ElemSet) -> Sequence {
        let mut s = Sequence::new();
        for (g, k) in self.counts().filter(|&(g, _)| a.contains(g)) {
            s.push_n(g, k);
        }
        s
    }

    /// `h(S)`, the largest multiplicity (0 for the empty sequence).
    pub fn max_multiplicity(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// Text form, e.g. `x.x*y.x*y^2.1^5` or `(y^2)^6`.
    pub fn render(&self, group: &Group) -> String {
        self.counts()
            .map(|(g, k)| {
                let name = group.element_name(g);
                match k {
                    1 => name,
                    _ if g.is_identity() => format!("1^{k}"),
                    _ => format!("({name})^{k}"),
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Parses the text form.
    ///
    /// Grammar: `term ('.' term)*` where a term is `1`, `1^k`, an element
    /// name, or `(name)^k`. Metacyclic element names are `x`, `x^a`, `y`,
    /// `y^b`, `x^a*y^b`; Cayley-kind names are `e<i>`. The empty string is
    /// the empty sequence.
    pub fn parse(group: &Group, text: &str) -> Result<Sequence, SequenceError> {
        let err = |reason: String| SequenceError::Parse { text: text.to_string(), reason };
        let mut s = Sequence::new();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(s);
        }
        for tok in trimmed.split('.') {
            let tok = tok.trim();
            let (name, k) = if let Some(rest) = tok.strip_prefix('(') {
                let (inner, tail) = rest
                    .split_once(')')
                    .ok_or_else(|| err(format!("unbalanced parenthesis in {tok:?}")))?;
                let k = match tail {
                    "" => 1,
                    t => parse_exponent(t.strip_prefix('^').unwrap_or("?"))
                        .ok_or_else(|| err(format!("bad multiplicity in {tok:?}")))?,
                };
                (inner, k)
            } else if let Some(t) = tok.strip_prefix("1^") {
                let k = parse_exponent(t).ok_or_else(|| err(format!("bad multiplicity in {tok:?}")))?;
                ("1", k)
            } else {
                (tok, 1)
            };
            let g = parse_element(group, name).ok_or_else(|| err(format!("unknown element {name:?}")))?;
            s.push_n(g, k);
        }
        Ok(s)
    }
}

fn parse_exponent(s: &str) -> Option<u32> {
    s.parse().ok()
}

/// Parses a single element name for `group`.
pub fn parse_element(group: &Group, name: &str) -> Option<Element> {
    let name = name.trim();
    if name == "1" {
        return Some(Element::IDENTITY);
    }
    if group.metacyclic_spec().is_none() {
        let i: usize = name.strip_prefix('e')?.parse().ok()?;
        return (i < group.size()).then(|| Element::new(i));
    }
    let (mut a, mut b) = (None, None);
    for part in name.split('*') {
        let (sym, exp) = match part.split_once('^') {
            Some((sym, e)) => (sym, e.parse::<u32>().ok()?),
            None => (part, 1),
        };
        let slot = match sym {
            "x" if a.is_none() && b.is_none() => &mut a,
            "y" if b.is_none() => &mut b,
            _ => return None,
        };
        *slot = Some(exp);
    }
    group.from_pair(a.unwrap_or(0), b.unwrap_or(0))
}

/// What a [`MultisetVisitor`] wants after seeing a node.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Visit {
    Descend,
    /// Skip every extension of the current multiset.
    Prune,
    /// Abandon the whole traversal.
    Stop,
}

/// Receives the push/pop events of [`enumerate_multisets`].
///
/// Every `push` is matched by exactly one `pop`, whatever it returned, so a
/// visitor can keep incremental state in lockstep with the path.
pub trait MultisetVisitor {
    /// `g` has just been appended; `path` ends with `g`.
    fn push(&mut self, g: Element, path: &[Element]) -> Visit;
    fn pop(&mut self, g: Element);
    /// A multiset of the requested length that was not pruned.
    fn leaf(&mut self, _path: &[Element]) -> Visit {
        Visit::Descend
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalStats {
    pub nodes: u64,
    pub pruned: u64,
    pub leaves: u64,
    pub stopped: bool,
}

/// Depth-first traversal of all multisets of `length` elements drawn from
/// `0..group_size`, each visited once with elements in nondecreasing index
/// order.
pub fn enumerate_multisets<V: MultisetVisitor>(group_size: usize, length: usize, visitor: &mut V) -> TraversalStats {
    enumerate_below(group_size, length, &[], visitor)
}

/// As [`enumerate_multisets`], restricted to multisets whose smallest
/// elements are `prefix` (which must be nondecreasing). The prefix nodes are
/// pushed through the visitor like any other node.
pub fn enumerate_below<V: MultisetVisitor>(
    group_size: usize,
    length: usize,
    prefix: &[Element],
    visitor: &mut V,
) -> TraversalStats {
    assert!(prefix.windows(2).all(|w| w[0] <= w[1]), "prefix must be nondecreasing");
    assert!(prefix.iter().all(|g| g.index() < group_size));
    let mut stats = TraversalStats::default();
    let mut path = Vec::with_capacity(length);
    let mut pushed = 0;
    let mut alive = true;
    for &g in prefix.iter().take(length) {
        path.push(g);
        pushed += 1;
        stats.nodes += 1;
        match visitor.push(g, &path) {
            Visit::Descend => {}
            Visit::Prune => {
                stats.pruned += 1;
                alive = false;
                break;
            }
            Visit::Stop => {
                stats.stopped = true;
                alive = false;
                break;
            }
        }
    }
    if alive {
        if path.len() == length {
            stats.leaves += 1;
            if visitor.leaf(&path) == Visit::Stop {
                stats.stopped = true;
            }
        } else {
            dfs(group_size, length, &mut path, visitor, &mut stats);
        }
    }
    for _ in 0..pushed {
        let g = path.pop().unwrap();
        visitor.pop(g);
    }
    stats
}

fn dfs<V: MultisetVisitor>(
    group_size: usize,
    length: usize,
    path: &mut Vec<Element>,
    visitor: &mut V,
    stats: &mut TraversalStats,
) {
    let start = path.last().map_or(0, |g| g.index());
    for i in start..group_size {
        let g = Element::new(i);
        path.push(g);
        stats.nodes += 1;
        match visitor.push(g, path) {
            Visit::Descend => {
                if path.len() == length {
                    stats.leaves += 1;
                    if visitor.leaf(path) == Visit::Stop {
                        stats.stopped = true;
                    }
                } else {
                    dfs(group_size, length, path, visitor, stats);
                }
            }
            Visit::Prune => stats.pruned += 1,
            Visit::Stop => stats.stopped = true,
        }
        path.pop();
        visitor.pop(g);
        if stats.stopped {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        Group::metacyclic(2, 3, 2).unwrap()
    }

    fn seq(g: &Group, t: &str) -> Sequence {
        Sequence::parse(g, t).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let g = s3();
        let x = g.from_pair(1, 0).unwrap();
        assert_eq!(seq(&g, "x.x*y.x*y^2").multiplicity(x), 1);
        assert_eq!(seq(&g, "x.x*y.x*y^2.1^5").multiplicity(g.identity()), 5);
        assert_eq!(Sequence::new().multiplicity(g.from_pair(0, 1).unwrap()), 0);
    }

    #[test]
    fn concat_and_remove_examples() {
        let g = s3();
        assert_eq!(seq(&g, "(y)^2").concat(&seq(&g, "y")), seq(&g, "(y)^3"));
        assert_eq!(seq(&g, "x.x*y.x*y^2").remove(&seq(&g, "x*y")).unwrap(), seq(&g, "x.x*y^2"));
        assert_eq!(seq(&g, "(y)^2").remove(&seq(&g, "(y)^3")), Err(SequenceError::NotASubsequence));
    }

    #[test]
    fn restrict_examples() {
        let g = s3();
        let s = seq(&g, "x.x*y.y.y^2");
        assert_eq!(s.restrict(g.coset(0).unwrap()), seq(&g, "y.y^2"));
        assert_eq!(s.restrict(g.coset(1).unwrap()), seq(&g, "x.x*y"));
        assert_eq!(s.restrict(ElemSet::EMPTY), Sequence::new());
    }

    #[test]
    fn max_multiplicity_examples() {
        let g = s3();
        assert_eq!(seq(&g, "x.x*y.x*y^2").max_multiplicity(), 1);
        assert_eq!(seq(&g, "(y)^4.x").max_multiplicity(), 4);
        assert_eq!(Sequence::new().max_multiplicity(), 0);
    }

    #[test]
    fn text_form_round_trip() {
        let g = Group::metacyclic(3, 7, 2).unwrap();
        let s = seq(&g, "x*y^3.x*y^5.(y^2)^6.1^2.x^2");
        assert_eq!(s.len(), 11);
        assert_eq!(Sequence::parse(&g, &s.render(&g)).unwrap(), s);
        assert_eq!(s.render(&g), "1^2.(y^2)^6.x*y^3.x*y^5.x^2");
        assert_eq!(seq(&g, ""), Sequence::new());
        assert_eq!(seq(&g, "x^1*y^0"), seq(&g, "x"));
        for bad in ["z", "x*x", "y*x", "(x", "(x)^", "(x)3", "1^q", "x^"] {
            assert!(Sequence::parse(&g, bad).is_err(), "{bad}");
        }
        let c = Group::cyclic(5).unwrap();
        assert_eq!(seq(&c, "(e2)^3.1").render(&c), "1.(e2)^3");
        assert!(Sequence::parse(&c, "e5").is_err());
        assert!(Sequence::parse(&c, "x").is_err());
    }

    struct Counter {
        prune_identity_root: bool,
    }

    impl MultisetVisitor for Counter {
        fn push(&mut self, g: Element, path: &[Element]) -> Visit {
            if self.prune_identity_root && path.len() == 1 && g.is_identity() {
                Visit::Prune
            } else {
                Visit::Descend
            }
        }
        fn pop(&mut self, _g: Element) {}
    }

    #[test]
    fn enumerator_counts() {
        let mut v = Counter { prune_identity_root: false };
        assert_eq!(enumerate_multisets(2, 2, &mut v).leaves, 3);
        assert_eq!(enumerate_multisets(6, 3, &mut v).leaves, 56);
        let mut v = Counter { prune_identity_root: true };
        assert_eq!(enumerate_multisets(6, 3, &mut v).leaves, 35);
        let mut v = Counter { prune_identity_root: false };
        assert_eq!(enumerate_multisets(6, 0, &mut v).leaves, 1);
    }

    struct Recorder(Vec<Vec<Element>>, usize);

    impl MultisetVisitor for Recorder {
        fn push(&mut self, _g: Element, _path: &[Element]) -> Visit {
            self.1 += 1;
            Visit::Descend
        }
        fn pop(&mut self, _g: Element) {
            self.1 -= 1;
        }
        fn leaf(&mut self, path: &[Element]) -> Visit {
            self.0.push(path.to_vec());
            Visit::Descend
        }
    }

    #[test]
    fn prefixes_partition_the_leaves() {
        let mut whole = Recorder(vec![], 0);
        enumerate_multisets(4, 3, &mut whole);
        let mut parts = Recorder(vec![], 0);
        for a in 0..4 {
            enumerate_below(4, 3, &[Element::new(a)], &mut parts);
            assert_eq!(parts.1, 0, "push/pop out of balance");
        }
        assert_eq!(whole.0, parts.0);
        assert!(whole.0.windows(2).all(|w| w[0] < w[1]));
    }
}
