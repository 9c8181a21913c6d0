//! Independent brute-force oracles and a catalogue of small groups. Nothing
//! here uses the product tables or the search engine of the crate.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use zerosum::{ElemSet, Element, Group, Sequence};

/// Closes a set of permutations under composition; index 0 is the identity.
pub fn permutation_group(name: &str, gens: &[Vec<usize>]) -> Group {
    let deg = gens[0].len();
    let id: Vec<usize> = (0..deg).collect();
    let mut elems = vec![id.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let h: Vec<usize> = (0..deg).map(|k| g[elems[i][k]]).collect();
            if !index.contains_key(&h) {
                index.insert(h.clone(), elems.len());
                elems.push(h);
            }
        }
        i += 1;
    }
    // (a*b)(k) = a(b(k)): apply b first.
    let rows: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[&(0..deg).map(|k| a[b[k]]).collect::<Vec<_>>()]).collect())
        .collect();
    Group::from_cayley_table(name, &rows).unwrap()
}

/// `Q_8` from the unit quaternion rule.
pub fn quaternion() -> Group {
    // (sign, unit) with unit 0=1, 1=i, 2=j, 3=k; index = 4*sign + unit.
    let unit_mul = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, u) | (u, 0) => (0, u),
            (a, b) if a == b => (1, 0),
            (1, 2) => (0, 3),
            (2, 1) => (1, 3),
            (2, 3) => (0, 1),
            (3, 2) => (1, 1),
            (3, 1) => (0, 2),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    let rows: Vec<Vec<usize>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (s, u) = unit_mul(x % 4, y % 4);
                    ((x / 4 + y / 4 + s) % 2) * 4 + u
                })
                .collect()
        })
        .collect();
    Group::from_cayley_table("Q8", &rows).unwrap()
}

/// Every group of order at most 12 used by the oracle comparisons.
pub fn small_groups() -> Vec<Group> {
    let mut out: Vec<Group> = (1..=12).map(|n| Group::cyclic(n).unwrap()).collect();
    out.push(Group::metacyclic(2, 3, 2).unwrap());
    out.push(Group::metacyclic(2, 5, 4).unwrap());
    out.push(permutation_group("C2xC2", &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]));
    out.push(permutation_group("C2xC2xC2", &[vec![1, 0, 2, 3, 4, 5], vec![0, 1, 3, 2, 4, 5], vec![0, 1, 2, 3, 5, 4]]));
    out.push(permutation_group("D4", &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]));
    out.push(quaternion());
    out.push(permutation_group("C3xC3", &[vec![1, 2, 0, 3, 4, 5], vec![0, 1, 2, 4, 5, 3]]));
    out.push(permutation_group("A4", &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]));
    out.push(permutation_group("D6", &[vec![1, 2, 3, 4, 5, 0], vec![0, 5, 4, 3, 2, 1]]));
    out.push(permutation_group("C2xC6", &[vec![1, 0, 2, 3, 4, 5, 6, 7], vec![0, 1, 3, 4, 5, 6, 7, 2]]));
    out
}

fn permute(group: &Group, items: &mut Vec<Element>, k: usize, out: &mut ElemSet) {
    if k == items.len() {
        out.insert(group.product(items.iter().copied()));
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(group, items, k + 1, out);
        items.swap(k, i);
    }
}

/// `π(S)` over all `|S|!` orderings.
pub fn pi_by_permutations(group: &Group, terms: &[Element]) -> ElemSet {
    let mut out = ElemSet::EMPTY;
    permute(group, &mut terms.to_vec(), 0, &mut out);
    out
}

/// `π` of every subset of positions, by peeling off the last factor.
/// `table[mask]` covers the positions set in `mask`.
pub fn pi_by_positions(group: &Group, terms: &[Element]) -> Vec<ElemSet> {
    let n = terms.len();
    let mut table = vec![ElemSet::EMPTY; 1 << n];
    table[0] = ElemSet::singleton(group.identity());
    for mask in 1usize..1 << n {
        let mut acc = ElemSet::EMPTY;
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for h in table[mask & !(1 << i)].iter() {
                acc.insert(group.mul(h, terms[i]));
            }
        }
        table[mask] = acc;
    }
    table
}

/// `Π_n(S)` (or `Π(S)` over nonempty subsets when `n` is `None`).
pub fn big_pi_by_positions(group: &Group, terms: &[Element], n: Option<usize>) -> ElemSet {
    let table = pi_by_positions(group, terms);
    (1usize..table.len())
        .filter(|m| n.map_or(true, |n| m.count_ones() as usize == n))
        .fold(ElemSet::EMPTY, |acc, m| acc | table[m])
}

/// Whether a hit exists: `1 ∈ π(U)` for some nonempty `U` (`n = None`) or
/// for some `U` of length `n`.
pub fn has_product_one(group: &Group, terms: &[Element], n: Option<usize>) -> bool {
    big_pi_by_positions(group, terms, n).contains_identity()
}

/// Every multiset of `len` elements, as nondecreasing index vectors, whose
/// every prefix satisfies `keep`. `keep` must be inherited by sub-multisets
/// for the result to be the full census.
pub fn brute_census(group: &Group, len: usize, keep: &dyn Fn(&[Element]) -> bool) -> BTreeSet<Sequence> {
    fn go(
        group: &Group,
        len: usize,
        cur: &mut Vec<Element>,
        keep: &dyn Fn(&[Element]) -> bool,
        out: &mut BTreeSet<Sequence>,
    ) {
        if cur.len() == len {
            out.insert(Sequence::from_elements(cur.iter().copied()));
            return;
        }
        let start = cur.last().map_or(0, |g| g.index());
        for i in start..group.size() {
            cur.push(Element::new(i));
            if keep(cur) {
                go(group, len, cur, keep, out);
            }
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(group, len, &mut Vec::new(), keep, &mut out);
    out
}

/// Product-one free sequences of length `len`.
pub fn brute_free_census(group: &Group, len: usize) -> BTreeSet<Sequence> {
    brute_census(group, len, &|s| !has_product_one(group, s, None))
}

/// Largest length of a product-one free sequence.
pub fn brute_davenport(group: &Group) -> usize {
    (1..).find(|&l| brute_free_census(group, l).is_empty()).unwrap() - 1
}

/// `|G|`-product-one free sequences of length `len`. Pruning is sound since a
/// hit of length `|G|` persists in every extension.
pub fn brute_big_free_census(group: &Group, len: usize) -> BTreeSet<Sequence> {
    let n = group.size();
    brute_census(group, len, &|s| s.len() < n || !has_product_one(group, s, Some(n)))
}
