//! Exact product-set engines.
//!
//! For a sequence `S` the engine tabulates, for every sub-multiset `U | S`,
//! the set `π(U)` of all products of `U` in every order. It uses the recurrence
//!
//! ```text
//! π(U) = ∪_{g ∈ supp(U)} π(U·g^[-1])·g,      π(empty) = {1}
//! ```
//!
//! (every ordering ends in some last term). Sub-multisets are addressed by
//! their multiplicity vector over `supp(S)` in mixed radix, with the most
//! recently added support element as the most significant digit. Appending a
//! term therefore only appends one block to the table, which is what lets the
//! exhaustive searches maintain the table incrementally along a DFS path.

use thiserror::Error;

use crate::elemset::{ElemSet, Element};
use crate::group::Group;
use crate::sequence::Sequence;

/// Default cap on the number of sub-multiset signatures held by one table.
pub const DEFAULT_STATE_CAP: usize = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("product table would need {needed} sub-multiset states (cap {cap})")]
    StateBudgetExceeded { needed: usize, cap: usize },
    #[error("terms must be appended grouped by element in increasing order")]
    NotCanonicalOrder,
    #[error("sub-multiset length {n} exceeds sequence length {len}")]
    LengthOutOfRange { n: usize, len: usize },
    #[error("set sequence index k = {k} outside [1, {len}]")]
    BadIndex { k: usize, len: usize },
    #[error("empty set in set sequence")]
    EmptyFactor,
}

/// Which sub-multisets count as a product-one "hit".
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum HitRule {
    /// Any nonempty sub-multiset (product-one freeness).
    Nonempty,
    /// Sub-multisets of exactly this length (`|G|`-product-one freeness).
    Length(usize),
}

impl HitRule {
    #[inline]
    fn is_hit(self, weight: usize, set: ElemSet) -> bool {
        set.contains_identity()
            && match self {
                HitRule::Nonempty => weight >= 1,
                HitRule::Length(n) => weight == n,
            }
    }
}

#[derive(Copy, Clone, Debug)]
struct Dim {
    elem: Element,
    count: u32,
    stride: usize,
}

/// The sub-multiset product table of a sequence that grows and shrinks one
/// term at a time.
///
/// Terms must be appended grouped by element in increasing element order
/// (the order produced by the multiset enumerator).
#[derive(Clone)]
pub struct ProductTable<'g> {
    group: &'g Group,
    sets: Vec<ElemSet>,
    weights: Vec<u16>,
    dims: Vec<Dim>,
    len: usize,
    rule: HitRule,
    max_weight: usize,
    cap: usize,
    hits: usize,
    digits: Vec<u32>,
}

impl<'g> ProductTable<'g> {
    pub fn new(group: &'g Group, rule: HitRule) -> Self {
        ProductTable {
            group,
            sets: vec![ElemSet::singleton(Element::IDENTITY)],
            weights: vec![0],
            dims: Vec::new(),
            len: 0,
            rule,
            max_weight: usize::MAX,
            cap: DEFAULT_STATE_CAP,
            hits: 0,
            digits: Vec::new(),
        }
    }

    /// Leaves sub-multisets longer than `w` uncomputed (empty). Sound whenever
    /// no query looks above length `w`, since `π(U)` only depends on shorter
    /// sub-multisets.
    pub fn with_max_weight(mut self, w: usize) -> Self {
        self.max_weight = w;
        self
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn group(&self) -> &'g Group {
        self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn states(&self) -> usize {
        self.sets.len()
    }

    /// True once some sub-multiset selected by the hit rule has 1 among its
    /// products.
    pub fn has_hit(&self) -> bool {
        self.hits > 0
    }

    /// Appends one term; returns whether the new sub-multisets (those using
    /// every copy of `g` so far) contain a hit.
    pub fn push(&mut self, g: Element) -> Result<bool, ProductError> {
        let (stride, count) = match self.dims.last() {
            Some(d) if d.elem == g => (d.stride, d.count + 1),
            Some(d) if d.elem > g => return Err(ProductError::NotCanonicalOrder),
            _ => (self.sets.len(), 1),
        };
        let base = self.sets.len();
        let needed = base + stride;
        if needed > self.cap {
            return Err(ProductError::StateBudgetExceeded { needed, cap: self.cap });
        }
        if count == 1 {
            self.dims.push(Dim { elem: g, count: 1, stride });
        } else {
            self.dims.last_mut().unwrap().count = count;
        }
        self.len += 1;

        // Digits of the lower dimensions for the base index j, advanced as a
        // mixed-radix counter.
        let lower = self.dims.len() - 1;
        self.digits.clear();
        self.digits.resize(lower, 0);
        let mut hit = false;
        self.sets.reserve(stride);
        self.weights.reserve(stride);
        for j in 0..stride {
            let idx = base + j;
            let w = self.weights[j] as usize + count as usize;
            let set = if w > self.max_weight {
                ElemSet::EMPTY
            } else {
                let mut acc = self.group.right_translate(self.sets[idx - stride], g);
                for (i, d) in self.dims[..lower].iter().enumerate() {
                    if self.digits[i] > 0 {
                        acc |= self.group.right_translate(self.sets[idx - d.stride], d.elem);
                    }
                }
                acc
            };
            hit |= self.rule.is_hit(w, set);
            self.sets.push(set);
            self.weights.push(w as u16);
            for (i, d) in self.dims[..lower].iter().enumerate() {
                self.digits[i] += 1;
                if self.digits[i] <= d.count {
                    break;
                }
                self.digits[i] = 0;
            }
        }
        self.hits += hit as usize;
        Ok(hit)
    }

    /// Removes the most recently appended term. `hit` must be what the
    /// matching `push` returned.
    pub fn pop(&mut self, hit: bool) {
        let d = self.dims.last_mut().expect("pop on empty table");
        let base = self.sets.len() - d.stride;
        d.count -= 1;
        if d.count == 0 {
            self.dims.pop();
        }
        self.sets.truncate(base);
        self.weights.truncate(base);
        self.len -= 1;
        self.hits -= hit as usize;
    }

    /// `π` of the whole sequence.
    pub fn pi(&self) -> ElemSet {
        *self.sets.last().unwrap()
    }

    /// `Π_n`: union of `π(U)` over sub-multisets of length `n`.
    pub fn pi_n(&self, n: usize) -> Result<ElemSet, ProductError> {
        if n > self.len {
            return Err(ProductError::LengthOutOfRange { n, len: self.len });
        }
        Ok(self.union_where(|w| w == n))
    }

    /// `Π`: union over all nonempty sub-multisets.
    pub fn pi_all(&self) -> ElemSet {
        self.union_where(|w| w >= 1)
    }

    fn union_where(&self, keep: impl Fn(usize) -> bool) -> ElemSet {
        self.sets
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| keep(w as usize))
            .fold(ElemSet::EMPTY, |acc, (&s, _)| acc | s)
    }

    /// `π(U)` for a sub-multiset `U` of the current sequence.
    pub fn pi_of(&self, sub: &Sequence) -> Option<ElemSet> {
        let mut idx = 0;
        let mut used = 0;
        for d in &self.dims {
            let c = sub.multiplicity(d.elem);
            if c > d.count {
                return None;
            }
            idx += c as usize * d.stride;
            used += c as usize;
        }
        (used == sub.len()).then(|| self.sets[idx])
    }

    /// Every sub-multiset with its product set, as multiplicity vectors over
    /// the support (in support order).
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u32>, ElemSet)> + '_ {
        (0..self.sets.len()).map(move |idx| {
            let digits = self
                .dims
                .iter()
                .map(|d| (idx / d.stride) as u32 % (d.count + 1))
                .collect();
            (digits, self.sets[idx])
        })
    }

    /// Support elements in table order.
    pub fn support(&self) -> Vec<Element> {
        self.dims.iter().map(|d| d.elem).collect()
    }
}

/// Builds the full table for `seq`.
pub fn table_for<'g>(group: &'g Group, seq: &Sequence) -> Result<ProductTable<'g>, ProductError> {
    let mut t = ProductTable::new(group, HitRule::Nonempty);
    for g in seq.elements() {
        t.push(g)?;
    }
    Ok(t)
}

/// `π(S)`; `π(empty) = {1}`.
pub fn pi(group: &Group, seq: &Sequence) -> Result<ElemSet, ProductError> {
    Ok(table_for(group, seq)?.pi())
}

/// `Π_n(S)`; `Π_0(S) = {1}`.
pub fn pi_n(group: &Group, seq: &Sequence, n: usize) -> Result<ElemSet, ProductError> {
    if n > seq.len() {
        return Err(ProductError::LengthOutOfRange { n, len: seq.len() });
    }
    let mut t = ProductTable::new(group, HitRule::Nonempty).with_max_weight(n);
    for g in seq.elements() {
        t.push(g)?;
    }
    t.pi_n(n)
}

/// `Π(S)`, over nonempty sub-multisets only.
pub fn pi_all(group: &Group, seq: &Sequence) -> Result<ElemSet, ProductError> {
    Ok(table_for(group, seq)?.pi_all())
}

/// `1 ∉ Π(S)`. Stops at the first product-one sub-multiset found.
pub fn is_product_one_free(group: &Group, seq: &Sequence) -> Result<bool, ProductError> {
    let mut t = ProductTable::new(group, HitRule::Nonempty);
    for g in seq.elements() {
        if t.push(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `1 ∉ Π_{|G|}(S)`; vacuously true when `|S| < |G|`.
pub fn is_big_product_one_free(group: &Group, seq: &Sequence) -> Result<bool, ProductError> {
    is_n_product_one_free(group, seq, group.size())
}

/// `1 ∉ Π_n(S)`.
pub fn is_n_product_one_free(group: &Group, seq: &Sequence, n: usize) -> Result<bool, ProductError> {
    if seq.len() < n {
        return Ok(true);
    }
    let mut t = ProductTable::new(group, HitRule::Length(n)).with_max_weight(n);
    for g in seq.elements() {
        if t.push(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Π^k(A)`: products `a_{i_1}⋯a_{i_k}` with `i_1 < ⋯ < i_k` and
/// `a_{i_j} ∈ A_{i_j}`, multiplied in index order.
pub fn setseq_products(group: &Group, sets: &[ElemSet], k: usize) -> Result<ElemSet, ProductError> {
    if k == 0 || k > sets.len() {
        return Err(ProductError::BadIndex { k, len: sets.len() });
    }
    Ok(setseq_layers(group, sets)?[k])
}

/// `Π(A)`: union of `Π^k(A)` for `k ∈ [1, ℓ]`.
pub fn setseq_products_all(group: &Group, sets: &[ElemSet]) -> Result<ElemSet, ProductError> {
    Ok(setseq_layers(group, sets)?
        .into_iter()
        .skip(1)
        .fold(ElemSet::EMPTY, |a, b| a | b))
}

/// `layers[k] = Π^k(A)` for `k ∈ [0, ℓ]`, with `layers[0] = {1}`.
pub fn setseq_layers(group: &Group, sets: &[ElemSet]) -> Result<Vec<ElemSet>, ProductError> {
    if sets.iter().any(|a| a.is_empty()) {
        return Err(ProductError::EmptyFactor);
    }
    let mut layers = vec![ElemSet::EMPTY; sets.len() + 1];
    layers[0] = ElemSet::singleton(Element::IDENTITY);
    for (i, &a) in sets.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let ext = group.set_product(layers[k - 1], a);
            layers[k] |= ext;
        }
    }
    Ok(layers)
}
