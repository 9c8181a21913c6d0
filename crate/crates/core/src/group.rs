//! Finite groups of order at most 64 with dense element indexing.
//!
//! Two kinds are supported: the metacyclic groups `C_p ⋉ C_m` given by
//! `<x, y | x^p = y^m = 1, x^-1 y x = y^r>`, and arbitrary groups loaded from a
//! Cayley table. Metacyclic elements `x^a y^b` are stored at index `a*m + b`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::{ElemSet, Element};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("group of order {0} exceeds the supported maximum of 64")]
    TooLarge(usize),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("stabilizer of the empty set")]
    EmptySet,
    #[error("cannot read group file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed group file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parameters `(p, m, r)` of a metacyclic group `C_p ⋉ C_m`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetacyclicSpec {
    pub p: u32,
    pub m: u32,
    pub r: u32,
}

impl MetacyclicSpec {
    /// Checks every defining condition on `(p, m, r)`.
    pub fn validate(&self) -> Result<(), GroupError> {
        let MetacyclicSpec { p, m, r } = *self;
        let bad = |s: String| Err(GroupError::InvalidSpec(s));
        if !is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        if m == 0 {
            return bad("m must be positive".into());
        }
        if let Some(q) = prime_divisors(m).into_iter().find(|&q| q <= p) {
            return bad(format!(
                "prime divisor {q} of m = {m} is not larger than p = {p}"
            ));
        }
        if m == 1 {
            // G is just C_p; the only residue mod 1 is 0.
            if r != 0 {
                return bad("for m = 1 the exponent r must be 0".into());
            }
            return Ok(());
        }
        if r == 0 || r >= m {
            return bad(format!("r = {r} must lie in [1, m-1]"));
        }
        let t = (p as u64 * (r as u64 + m as u64 - 1)) % m as u64;
        if gcd(t, m as u64) != 1 {
            return bad(format!("gcd(p(r-1), m) = gcd({}, {m}) != 1", p as i64 * (r as i64 - 1)));
        }
        if pow_mod(r as u64, p as u64, m as u64) != 1 % m as u64 {
            return bad(format!("r^p = {r}^{p} is not 1 mod {m}"));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.p as usize * self.m as usize
    }

    pub fn is_s3(&self) -> bool {
        (self.p, self.m, self.r) == (2, 3, 2)
    }
}

impl fmt::Display for MetacyclicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "metacyclic:{},{},{}", self.p, self.m, self.r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Metacyclic(MetacyclicSpec),
    Cayley,
}

#[derive(Deserialize, Serialize)]
struct CayleyFile {
    size: usize,
    table: Vec<Vec<usize>>,
}

/// An immutable finite group with precomputed multiplication and inverse tables.
#[derive(Clone)]
pub struct Group {
    size: usize,
    kind: GroupKind,
    name: String,
    table: Vec<u8>,
    inv: Vec<u8>,
    /// `rmul[(h * chunks + c) * 256 + byte]` is the image under right
    /// multiplication by `h` of the elements encoded by `byte` in chunk `c`.
    rmul: Vec<u64>,
    chunks: usize,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("size", &self.size)
            .finish()
    }
}

impl Group {
    /// Builds `C_p ⋉ C_m` after validating `(p, m, r)`.
    pub fn metacyclic(p: u32, m: u32, r: u32) -> Result<Group, GroupError> {
        let spec = MetacyclicSpec { p, m, r };
        spec.validate()?;
        let n = spec.order();
        if n > ElemSet::CAPACITY {
            return Err(GroupError::TooLarge(n));
        }
        check_metacyclic_arithmetic(&spec)?;
        let (pu, mu) = (p as usize, m as usize);
        let rpow: Vec<usize> = (0..pu)
            .map(|a| pow_mod(r as u64, a as u64, m as u64) as usize)
            .collect();
        let mut table = vec![0u8; n * n];
        for g in 0..n {
            let (a1, b1) = (g / mu, g % mu);
            for h in 0..n {
                let (a2, b2) = (h / mu, h % mu);
                let a = (a1 + a2) % pu;
                let b = (b1 * rpow[a2] + b2) % mu;
                table[g * n + h] = (a * mu + b) as u8;
            }
        }
        Ok(Self::from_parts(n, GroupKind::Metacyclic(spec), spec.to_string(), table))
    }

    /// The cyclic group `Z/n` as a Cayley-kind group.
    pub fn cyclic(n: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidSpec("cyclic group of order 0".into()));
        }
        if n > ElemSet::CAPACITY {
            return Err(GroupError::TooLarge(n));
        }
        let table = (0..n * n).map(|k| ((k / n + k % n) % n) as u8).collect();
        Ok(Self::from_parts(n, GroupKind::Cayley, format!("cyclic:{n}"), table))
    }

    /// Builds a group from a row-major Cayley table with index 0 as identity.
    ///
    /// The table is checked to be a Latin square with identity 0, and
    /// associativity is verified exhaustively.
    pub fn from_cayley_table(name: impl Into<String>, rows: &[Vec<usize>]) -> Result<Group, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        if n > ElemSet::CAPACITY {
            return Err(GroupError::TooLarge(n));
        }
        let bad = |s: String| Err(GroupError::InvalidTable(s));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= n) {
                return bad(format!("entry {v} in row {i} out of range"));
            }
        }
        for i in 0..n {
            if rows[0][i] != i || rows[i][0] != i {
                return bad("index 0 is not the identity".into());
            }
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                if std::mem::replace(&mut row_seen[rows[i][j]], true) {
                    return bad(format!("row {i} repeats an element"));
                }
                if std::mem::replace(&mut col_seen[rows[j][i]], true) {
                    return bad(format!("column {i} repeats an element"));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = rows[a][b];
                for c in 0..n {
                    if rows[ab][c] != rows[a][rows[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let table = rows.iter().flatten().map(|&v| v as u8).collect();
        Ok(Self::from_parts(n, GroupKind::Cayley, name.into(), table))
    }

    /// Loads `{ "size": n, "table": [[...]] }` from a JSON file.
    pub fn from_cayley_file(path: &Path) -> Result<Group, GroupError> {
        let text = std::fs::read_to_string(path)?;
        let file: CayleyFile = serde_json::from_str(&text)?;
        if file.size != file.table.len() {
            return Err(GroupError::InvalidTable(format!(
                "size {} does not match {} rows",
                file.size,
                file.table.len()
            )));
        }
        Self::from_cayley_table(format!("cayley:{}", path.display()), &file.table)
    }

    /// Parses `metacyclic:p,m,r`, `cyclic:n` or `cayley:<path>`.
    pub fn from_spec_str(spec: &str) -> Result<Group, GroupError> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| GroupError::InvalidSpec(format!("missing kind prefix in {spec:?}")))?;
        match kind {
            "metacyclic" => {
                let nums: Vec<u32> = rest
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| GroupError::InvalidSpec(format!("bad parameters {rest:?}")))?;
                match nums[..] {
                    [p, m, r] => Group::metacyclic(p, m, r),
                    _ => Err(GroupError::InvalidSpec("expected metacyclic:p,m,r".into())),
                }
            }
            "cyclic" => {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| GroupError::InvalidSpec(format!("bad order {rest:?}")))?;
                Group::cyclic(n)
            }
            "cayley" => Group::from_cayley_file(Path::new(rest)),
            other => Err(GroupError::InvalidSpec(format!("unknown group kind {other:?}"))),
        }
    }

    fn from_parts(size: usize, kind: GroupKind, name: String, table: Vec<u8>) -> Group {
        let mut inv = vec![0u8; size];
        for g in 0..size {
            inv[g] = (0..size).find(|&h| table[g * size + h] == 0).unwrap() as u8;
        }
        let chunks = size.div_ceil(8);
        let mut rmul = vec![0u64; size * chunks * 256];
        for h in 0..size {
            for c in 0..chunks {
                let base = (h * chunks + c) * 256;
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let g = c * 8 + low;
                    let prev = rmul[base + (byte & (byte - 1))];
                    rmul[base + byte] = if g < size {
                        prev | 1u64 << table[g * size + h]
                    } else {
                        prev
                    };
                }
            }
        }
        Group { size, kind, name, table, inv, rmul, chunks }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// The spec string this group was built from.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn metacyclic_spec(&self) -> Option<MetacyclicSpec> {
        match self.kind {
            GroupKind::Metacyclic(s) => Some(s),
            GroupKind::Cayley => None,
        }
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size).map(Element::new)
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    #[inline]
    pub fn mul(&self, g: Element, h: Element) -> Element {
        Element(self.table[g.index() * self.size + h.index()])
    }

    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        Element(self.inv[g.index()])
    }

    pub fn pow(&self, g: Element, k: u64) -> Element {
        let mut acc = Element::IDENTITY;
        for _ in 0..k % self.order(g) as u64 {
            acc = self.mul(acc, g);
        }
        acc
    }

    /// Product of a word, left to right.
    pub fn product<I: IntoIterator<Item = Element>>(&self, word: I) -> Element {
        word.into_iter().fold(Element::IDENTITY, |acc, g| self.mul(acc, g))
    }

    pub fn order(&self, g: Element) -> usize {
        let mut k = 1;
        let mut acc = g;
        while !acc.is_identity() {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// `A·h`, via the precomputed byte lookup tables.
    #[inline]
    pub fn right_translate(&self, a: ElemSet, h: Element) -> ElemSet {
        let base = h.index() * self.chunks * 256;
        let mut out = 0u64;
        let mut bits = a.0;
        let mut c = 0;
        while bits != 0 {
            out |= self.rmul[base + c * 256 + (bits & 0xff) as usize];
            bits >>= 8;
            c += 1;
        }
        ElemSet(out)
    }

    /// `g·A`.
    pub fn left_translate(&self, g: Element, a: ElemSet) -> ElemSet {
        a.iter().map(|h| self.mul(g, h)).collect()
    }

    /// The product set `AB = {ab : a ∈ A, b ∈ B}`.
    pub fn set_product(&self, a: ElemSet, b: ElemSet) -> ElemSet {
        b.iter().fold(ElemSet::EMPTY, |acc, h| acc | self.right_translate(a, h))
    }

    pub fn inverse_set(&self, a: ElemSet) -> ElemSet {
        a.iter().map(|g| self.inv(g)).collect()
    }

    /// The smallest subgroup containing `a`; `<∅> = {1}`.
    pub fn subgroup_generated(&self, a: ElemSet) -> ElemSet {
        let mut h = ElemSet::singleton(Element::IDENTITY) | a;
        loop {
            let next = self.set_product(h, h);
            if next == h {
                return h;
            }
            h = next;
        }
    }

    pub fn is_subgroup(&self, h: ElemSet) -> bool {
        h.contains_identity() && self.set_product(h, h) == h
    }

    /// `{h ∈ H : hA = A}`, for a subgroup `H` supplied by the caller.
    pub fn stabilizer(&self, a: ElemSet, h: ElemSet) -> Result<ElemSet, GroupError> {
        if a.is_empty() {
            return Err(GroupError::EmptySet);
        }
        Ok(h.iter().filter(|&g| self.left_translate(g, a) == a).collect())
    }

    pub fn centralizer(&self, h: Element) -> ElemSet {
        self.elements()
            .filter(|&g| self.mul(g, h) == self.mul(h, g))
            .collect()
    }

    /// The left cosets `gH` of a subgroup, each listed once, ordered by
    /// smallest element.
    pub fn left_cosets(&self, h: ElemSet, within: ElemSet) -> Vec<ElemSet> {
        let mut remaining = within;
        let mut out = Vec::new();
        while let Some(g) = remaining.first() {
            let coset = self.left_translate(g, h);
            remaining = remaining.difference(coset);
            out.push(coset);
        }
        out
    }

    /// The normal subgroup `N = <y>` of a metacyclic group.
    pub fn normal_subgroup(&self) -> Option<ElemSet> {
        self.metacyclic_spec()
            .map(|s| ElemSet::full(s.m as usize))
    }

    /// The coset `N_a = x^a N`.
    pub fn coset(&self, a: u32) -> Option<ElemSet> {
        let s = self.metacyclic_spec()?;
        let m = s.m as usize;
        let a = (a % s.p) as usize;
        Some(ElemSet(ElemSet::full(m).0 << (a * m)))
    }

    /// `φ(g)` for the quotient map `G -> G/N ≅ C_p`: the exponent of `x`.
    pub fn quotient_class(&self, g: Element) -> Result<u32, GroupError> {
        self.pair(g)
            .map(|(a, _)| a)
            .ok_or(GroupError::Unsupported("quotient map needs a metacyclic group"))
    }

    /// `(a, b)` with `g = x^a y^b`.
    pub fn pair(&self, g: Element) -> Option<(u32, u32)> {
        let s = self.metacyclic_spec()?;
        let i = g.index() as u32;
        Some((i / s.m, i % s.m))
    }

    /// The element `x^a y^b` (exponents reduced).
    pub fn from_pair(&self, a: u32, b: u32) -> Option<Element> {
        let s = self.metacyclic_spec()?;
        Some(Element::new(((a % s.p) * s.m + b % s.m) as usize))
    }

    /// `y^b`, the `b`-th element of `N`.
    pub fn y_pow(&self, b: u32) -> Option<Element> {
        self.from_pair(0, b)
    }

    /// Conjugation orbit `{u, u^r, ..., u^(r^(p-1))}` of `u ∈ N`, in order of
    /// the exponent `s`, duplicates included.
    pub fn r_orbit(&self, u: Element) -> Option<Vec<Element>> {
        let s = self.metacyclic_spec()?;
        let (a, b) = self.pair(u)?;
        if a != 0 {
            return None;
        }
        let mut out = Vec::with_capacity(s.p as usize);
        let mut e = b as u64;
        for _ in 0..s.p {
            out.push(self.y_pow(e as u32).unwrap());
            e = e * s.r as u64 % s.m as u64;
        }
        Some(out)
    }

    /// Rebuilds a subgroup as a standalone Cayley-kind group; returns the
    /// group together with the embedding (new index -> old element).
    pub fn induced_subgroup(&self, h: ElemSet, name: impl Into<String>) -> Result<(Group, Vec<Element>), GroupError> {
        if !self.is_subgroup(h) {
            return Err(GroupError::InvalidSpec("not a subgroup".into()));
        }
        let elems = h.to_vec();
        let mut back = vec![usize::MAX; self.size];
        for (i, g) in elems.iter().enumerate() {
            back[g.index()] = i;
        }
        let rows: Vec<Vec<usize>> = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| back[self.mul(a, b).index()]).collect())
            .collect();
        let g = Group::from_cayley_table(name, &rows)?;
        Ok((g, elems))
    }

    /// Human-readable element name: `x^a*y^b` for metacyclic groups, `e<i>`
    /// otherwise; the identity is always `1`.
    pub fn element_name(&self, g: Element) -> String {
        if g.is_identity() {
            return "1".into();
        }
        match self.pair(g) {
            Some((a, b)) => {
                let part = |sym: &str, e: u32| match e {
                    0 => None,
                    1 => Some(sym.to_string()),
                    e => Some(format!("{sym}^{e}")),
                };
                [part("x", a), part("y", b)]
                    .into_iter()
                    .flatten()
                    .collect::<Vec<_>>()
                    .join("*")
            }
            None => format!("e{}", g.index()),
        }
    }
}

/// Arithmetic consequences of the defining conditions:
/// `m ≡ 1 (mod p)` and `gcd(r^a - 1, m) = 1` for `a ∈ [1, p-1]`.
fn check_metacyclic_arithmetic(spec: &MetacyclicSpec) -> Result<(), GroupError> {
    let (p, m, r) = (spec.p as u64, spec.m as u64, spec.r as u64);
    if m % p != 1 % p && m != 1 {
        return Err(GroupError::InvalidSpec(format!("m = {m} is not 1 mod p = {p}")));
    }
    if m > 1 {
        for a in 1..p {
            let ra = pow_mod(r, a, m);
            if gcd((ra + m - 1) % m, m) != 1 {
                return Err(GroupError::InvalidSpec(format!("gcd(r^{a} - 1, m) != 1")));
            }
        }
    }
    Ok(())
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        Group::metacyclic(2, 3, 2).unwrap()
    }

    fn el(g: &Group, a: u32, b: u32) -> Element {
        g.from_pair(a, b).unwrap()
    }

    #[test]
    fn make_metacyclic_examples() {
        assert_eq!(s3().size(), 6);
        assert!(matches!(Group::metacyclic(2, 3, 1), Err(GroupError::InvalidSpec(_))));
        assert_eq!(Group::metacyclic(3, 7, 2).unwrap().size(), 21);
    }

    #[test]
    fn rejects_each_violated_condition() {
        // p not prime
        assert!(matches!(Group::metacyclic(4, 5, 4), Err(GroupError::InvalidSpec(_))));
        // 3 | 15 but 3 is not larger than p = 3
        assert!(matches!(Group::metacyclic(3, 15, 4), Err(GroupError::InvalidSpec(_))));
        // r^p != 1 mod m
        assert!(matches!(Group::metacyclic(2, 5, 2), Err(GroupError::InvalidSpec(_))));
        // r out of range
        assert!(matches!(Group::metacyclic(2, 5, 9), Err(GroupError::InvalidSpec(_))));
        assert!(matches!(Group::metacyclic(2, 11, 10), Ok(_)));
        assert!(matches!(Group::metacyclic(3, 13, 3), Ok(_)));
        assert!(Group::metacyclic(5, 11, 3).is_ok());
        assert!(matches!(Group::metacyclic(2, 33, 32), Err(GroupError::TooLarge(66))));
    }

    #[test]
    fn trivial_normal_part_is_cyclic() {
        let g = Group::metacyclic(3, 1, 0).unwrap();
        assert_eq!(g.size(), 3);
        assert!(g.is_abelian());
        assert!(Group::metacyclic(3, 1, 1).is_err());
    }

    #[test]
    fn mul_examples_in_s3() {
        let g = s3();
        let (x, y) = (el(&g, 1, 0), el(&g, 0, 1));
        assert_eq!(g.mul(x, x), g.identity());
        assert_eq!(g.mul(x, y), el(&g, 1, 1));
        assert_eq!(g.mul(y, x), el(&g, 1, 2));
        let xy = el(&g, 1, 1);
        assert_eq!(g.mul(xy, xy), g.identity());
        for h in g.elements() {
            assert_eq!(g.mul(h, g.inv(h)), g.identity());
        }
    }

    #[test]
    fn order_examples() {
        let g = s3();
        assert_eq!(g.order(g.identity()), 1);
        assert_eq!(g.order(el(&g, 1, 1)), 2);
        let h = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(h.order(el(&h, 0, 1)), 7);
    }

    #[test]
    fn subgroup_generated_examples() {
        let g = s3();
        let (x, y) = (el(&g, 1, 0), el(&g, 0, 1));
        assert_eq!(g.subgroup_generated(ElemSet::singleton(x)), [g.identity(), x].into_iter().collect());
        assert_eq!(g.subgroup_generated(ElemSet::singleton(y)), g.normal_subgroup().unwrap());
        assert_eq!(g.subgroup_generated([x, y].into_iter().collect()), g.all());
        assert_eq!(g.subgroup_generated(ElemSet::EMPTY), ElemSet::singleton(g.identity()));
    }

    #[test]
    fn stabilizer_examples() {
        let g = s3();
        let n = g.normal_subgroup().unwrap();
        let (y, y2) = (el(&g, 0, 1), el(&g, 0, 2));
        let one = ElemSet::singleton(g.identity());
        assert_eq!(g.stabilizer([y, y2].into_iter().collect(), n).unwrap(), one);
        assert_eq!(g.stabilizer(n, n).unwrap(), n);
        assert_eq!(g.stabilizer(ElemSet::singleton(y), n).unwrap(), one);
        assert!(matches!(g.stabilizer(ElemSet::EMPTY, n), Err(GroupError::EmptySet)));
    }

    #[test]
    fn centralizer_examples() {
        let g = s3();
        assert_eq!(g.centralizer(g.identity()), g.all());
        assert_eq!(g.centralizer(el(&g, 0, 1)), g.normal_subgroup().unwrap());
        let h = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(h.centralizer(el(&h, 0, 3)), h.normal_subgroup().unwrap());
    }

    #[test]
    fn quotient_class_examples() {
        let g = s3();
        assert_eq!(g.quotient_class(el(&g, 0, 2)).unwrap(), 0);
        assert_eq!(g.quotient_class(el(&g, 1, 2)).unwrap(), 1);
        let h = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(h.quotient_class(el(&h, 2, 5)).unwrap(), 2);
        let c = Group::cyclic(5).unwrap();
        assert!(matches!(c.quotient_class(Element::new(1)), Err(GroupError::Unsupported(_))));
    }

    #[test]
    fn cayley_validation() {
        let ok = vec![vec![0, 1], vec![1, 0]];
        assert!(Group::from_cayley_table("c2", &ok).is_ok());
        let not_latin = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(Group::from_cayley_table("bad", &not_latin), Err(GroupError::InvalidTable(_))));
        let bad_identity = vec![vec![1, 0], vec![0, 1]];
        assert!(Group::from_cayley_table("bad", &bad_identity).is_err());
        // A Latin square with identity 0 that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(Group::from_cayley_table("loop", &loop5), Err(GroupError::InvalidTable(_))));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(Group::from_spec_str("metacyclic:2,5,4").unwrap().size(), 10);
        assert_eq!(Group::from_spec_str("cyclic:7").unwrap().size(), 7);
        assert!(Group::from_spec_str("metacyclic:2,5").is_err());
        assert!(Group::from_spec_str("dihedral:5").is_err());
        assert!(Group::from_spec_str("nocolon").is_err());
    }

    #[test]
    fn right_translate_matches_table() {
        for g in [s3(), Group::metacyclic(3, 7, 2).unwrap(), Group::metacyclic(2, 31, 30).unwrap()] {
            let set = ElemSet(0x5a5a_a5a5_1234_5678 & g.all().0);
            for h in g.elements() {
                let slow: ElemSet = set.iter().map(|a| g.mul(a, h)).collect();
                assert_eq!(g.right_translate(set, h), slow);
            }
        }
    }

    #[test]
    fn element_names() {
        let g = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(g.element_name(el(&g, 0, 0)), "1");
        assert_eq!(g.element_name(el(&g, 1, 0)), "x");
        assert_eq!(g.element_name(el(&g, 0, 1)), "y");
        assert_eq!(g.element_name(el(&g, 2, 5)), "x^2*y^5");
        assert_eq!(g.element_name(el(&g, 1, 1)), "x*y");
    }

    #[test]
    fn r_orbit_of_y_in_c3_c7() {
        let g = Group::metacyclic(3, 7, 2).unwrap();
        let orb = g.r_orbit(el(&g, 0, 1)).unwrap();
        assert_eq!(orb, vec![el(&g, 0, 1), el(&g, 0, 2), el(&g, 0, 4)]);
        assert!(g.r_orbit(el(&g, 1, 0)).is_none());
    }
}
