//! Sumset bounds in abelian groups and inverse results in cyclic groups.

use rand::Rng;

use super::{drive, for_each_multiset, for_each_set_tuple, random_subset, random_subset_of_size, CheckOutcome, LabConfig, LabError};
use crate::elemset::{ElemSet, Element};
use crate::group::{gcd, Group};
use crate::invariants::multiset_count;
use crate::products::{self, HitRule, ProductTable};
use crate::sequence::{enumerate_multisets, MultisetVisitor, Sequence, Visit};

fn require_abelian(group: &Group, what: &str) -> Result<(), LabError> {
    if group.is_abelian() {
        Ok(())
    } else {
        Err(LabError::NonAbelianGroup(what.into()))
    }
}

fn tuple_space(n: usize, lens: std::ops::RangeInclusive<u32>) -> u128 {
    let base = (1u128 << n.min(100)) - 1;
    lens.map(|l| base.saturating_pow(l)).fold(0u128, u128::saturating_add)
}

/// `|A_1 ⋯ A_r| ≥ Σ |A_i H| − (r − 1)|H|` with `H` the stabilizer of the
/// product set.
pub fn kneser_holds(group: &Group, sets: &[ElemSet]) -> Result<bool, LabError> {
    let prod = sets.iter().skip(1).fold(sets[0], |acc, &a| group.set_product(acc, a));
    let h = group.stabilizer(prod, group.all())?;
    let rhs: i64 = sets.iter().map(|&a| group.set_product(a, h).len() as i64).sum::<i64>()
        - (sets.len() as i64 - 1) * h.len() as i64;
    Ok(prod.len() as i64 >= rhs)
}

/// Pairs and triples of nonempty subsets, or random tuples of 2 to 4.
pub fn check_kneser(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    require_abelian(group, "kneser")?;
    let n = group.size();
    let elems: Vec<Element> = group.elements().collect();
    let mut out = CheckOutcome::new("kneser", group.name());
    drive(
        &mut out,
        cfg,
        tuple_space(n, 2..=3),
        |f| {
            for r in 2..=3 {
                let mut go = true;
                for_each_set_tuple(n, r, &mut |sets| {
                    go = f(sets.to_vec());
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| {
            let r = rng.gen_range(2..=4);
            (0..r).map(|_| random_subset(rng, &elems)).collect::<Vec<_>>()
        },
        |sets| kneser_holds(group, sets),
    )?;
    Ok(out)
}

/// The set-sequence form: for every `k ≤ ℓ`, with `H = stab(Π^k(A))`,
/// `|Π^k(A)| ≥ |H|(1 − k + Σ_{Q ∈ G/H} min(k, |{i : A_i ∩ Q ≠ ∅}|))`.
/// Returns the first failing `k`.
pub fn dgm_first_failure(group: &Group, sets: &[ElemSet]) -> Result<Option<usize>, LabError> {
    for k in 1..=sets.len() {
        let pk = products::setseq_products(group, sets, k)?;
        if pk.is_empty() {
            continue;
        }
        let h = group.stabilizer(pk, group.all())?;
        let cover: i64 = group
            .left_cosets(h, group.all())
            .into_iter()
            .map(|q| (sets.iter().filter(|&&a| !(a & q).is_empty()).count()).min(k) as i64)
            .sum();
        if (pk.len() as i64) < h.len() as i64 * (1 - k as i64 + cover) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Families of up to three nonempty subsets, or random families of up to five
/// sets of size at most three; every `k` is tested.
pub fn check_dgm(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    require_abelian(group, "kneser-set-sequence")?;
    let n = group.size();
    let elems: Vec<Element> = group.elements().collect();
    let mut out = CheckOutcome::new("kneser-set-sequence", group.name());
    drive(
        &mut out,
        cfg,
        tuple_space(n, 1..=3),
        |f| {
            for r in 1..=3 {
                let mut go = true;
                for_each_set_tuple(n, r, &mut |sets| {
                    go = f(sets.to_vec());
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| {
            let l = rng.gen_range(1..=5);
            (0..l)
                .map(|_| {
                    let k = rng.gen_range(1..=3.min(n));
                    random_subset_of_size(rng, &elems, k)
                })
                .collect::<Vec<_>>()
        },
        |sets| Ok(dgm_first_failure(group, sets)?.is_none()),
    )?;
    Ok(out)
}

/// Over `C_n`, a product-one free sequence of length `n − 1` is `(g^k)^{[n−1]}`
/// with `gcd(k, n) = 1`; checked over all multisets of that length.
pub fn check_cyclic_inverse(n: usize) -> Result<CheckOutcome, LabError> {
    if n < 3 {
        return Err(LabError::Precondition(format!("cyclic inverse check needs n >= 3, got {n}")));
    }
    let group = Group::cyclic(n)?;
    let elems: Vec<Element> = group.elements().collect();
    let mut out = CheckOutcome::new("cyclic-inverse", group.name());
    let mut free = 0u64;
    let mut err = None;
    for_each_multiset(&elems, n - 1, &mut |s| {
        let seq = Sequence::from_elements(s.iter().copied());
        match products::is_product_one_free(&group, &seq) {
            Ok(is_free) => {
                let constant_generator = s.iter().all(|&g| g == s[0]) && gcd(s[0].index() as u64, n as u64) == 1;
                free += u64::from(is_free);
                out.record(is_free == constant_generator, &s.iter().map(|g| g.index()).collect::<Vec<_>>());
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    out.observe("free_count", free);
    Ok(out)
}

/// Whether the exhaustive cyclic `kn` check stays within a desk-scale budget.
pub fn cyclic_kn_feasible(n: usize, k: usize, cfg: &LabConfig) -> bool {
    multiset_count(n, k * n + n - 2) <= cfg.exhaustive_bound.saturating_mul(5)
}

struct KnSearch<'g> {
    group: &'g Group,
    n: usize,
    k: usize,
    top: usize,
    table: ProductTable<'g>,
    hits: Vec<bool>,
    part_i: CheckOutcome,
    shape: CheckOutcome,
    products: CheckOutcome,
    err: Option<LabError>,
}

impl KnSearch<'_> {
    /// `(g^a)^{[k1·n−1]} · (g^b)^{[k2·n−1]}` with `k1 + k2 = k + 1`, `k_i ≥ 1`
    /// and `gcd(a − b, n) = 1`.
    fn two_block(&self, s: &[Element]) -> bool {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for g in s {
            match runs.last_mut() {
                Some((e, c)) if *e == g.index() => *c += 1,
                _ => runs.push((g.index(), 1)),
            }
        }
        let [(a, ca), (b, cb)] = runs[..] else { return false };
        let n = self.n;
        (ca + 1) % n == 0
            && (cb + 1) % n == 0
            && (ca + 1) / n + (cb + 1) / n == self.k + 1
            && gcd(((a + n - b) % n) as u64, n as u64) == 1
    }

    fn examine(&mut self, path: &[Element]) {
        let names: Vec<usize> = path.iter().map(|g| g.index()).collect();
        self.shape.record(self.two_block(path), &names);
        let seq = Sequence::from_elements(path.iter().copied());
        match products::pi_n(self.group, &seq, self.k * self.n - 2) {
            Ok(set) => self.products.record(set == self.group.all(), &names),
            Err(e) => self.err = Some(e.into()),
        }
    }
}

impl MultisetVisitor for KnSearch<'_> {
    fn push(&mut self, g: Element, path: &[Element]) -> Visit {
        if self.err.is_some() {
            self.hits.push(false);
            return Visit::Stop;
        }
        let hit = match self.table.push(g) {
            Ok(hit) => hit,
            Err(e) => {
                self.err = Some(e.into());
                self.hits.push(false);
                return Visit::Stop;
            }
        };
        self.hits.push(hit);
        if hit {
            return Visit::Prune;
        }
        if path.len() == self.top {
            self.part_i.failures += 1;
            if self.part_i.counterexample.is_none() {
                self.part_i.counterexample = Some(serde_json::json!(path.iter().map(|g| g.index()).collect::<Vec<_>>()));
            }
        } else if path.len() == self.top - 1 {
            self.examine(path);
        }
        Visit::Descend
    }

    fn pop(&mut self, _g: Element) {
        let hit = self.hits.pop().expect("balanced");
        if self.table.len() > self.hits.len() {
            self.table.pop(hit);
        }
    }
}

/// Over `C_n`: (i) every sequence of length `kn + n − 1` has a product-one
/// sub-multiset of length `kn`; (ii) a sequence of length `kn + n − 2`
/// without one is two constant blocks `(g^a)^{[k1·n−1]}·(g^b)^{[k2·n−1]}`
/// with `k1 + k2 = k + 1` and `gcd(a − b, n) = 1`, and its
/// `(kn − 2)`-products cover `C_n`.
///
/// The search prunes every prefix that already has a product-one
/// sub-multiset of length `kn`, which is sound because that property passes
/// to all extensions. Both lengths are therefore covered exhaustively.
pub fn check_cyclic_kn(n: usize, k: usize) -> Result<CheckOutcome, LabError> {
    if n < 3 || k == 0 {
        return Err(LabError::Precondition(format!("cyclic kn check needs n >= 3 and k >= 1, got n = {n}, k = {k}")));
    }
    let group = Group::cyclic(n)?;
    let kn = k * n;
    let top = kn + n - 1;
    let name = format!("{}, k={k}", group.name());
    let mut v = KnSearch {
        group: &group,
        n,
        k,
        top,
        table: ProductTable::new(&group, HitRule::Length(kn)).with_max_weight(kn),
        hits: Vec::with_capacity(top),
        part_i: CheckOutcome::new("cyclic-kn/long-has-kn-product-one", name.clone()),
        shape: CheckOutcome::new("cyclic-kn/short-free-is-two-blocks", name.clone()),
        products: CheckOutcome::new("cyclic-kn/short-free-covers-by-kn-minus-2", name.clone()),
        err: None,
    };
    enumerate_multisets(n, top, &mut v);
    if let Some(e) = v.err {
        return Err(e);
    }
    let free_short = v.shape.instances;
    v.part_i.instances = multiset_count(n, top).min(u64::MAX as u128) as u64;
    let mut out = CheckOutcome::new("cyclic-kn", name);
    out.add_part(v.part_i);
    out.add_part(v.shape);
    out.add_part(v.products);
    out.observe("free_short_sequences", free_short);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &[usize]) -> ElemSet {
        g.iter().map(|&i| Element::new(i)).collect()
    }

    #[test]
    fn kneser_examples() {
        let c5 = Group::cyclic(5).unwrap();
        assert!(kneser_holds(&c5, &[set(&[0, 1]), set(&[0, 1])]).unwrap());
        assert_eq!(c5.set_product(set(&[0, 1]), set(&[0, 1])).len(), 3);
        let c6 = Group::cyclic(6).unwrap();
        let a = set(&[0, 3]);
        assert_eq!(c6.stabilizer(c6.set_product(a, a), c6.all()).unwrap(), a);
        assert!(kneser_holds(&c6, &[a, a]).unwrap());
    }

    #[test]
    fn dgm_examples() {
        let c3 = Group::cyclic(3).unwrap();
        assert_eq!(dgm_first_failure(&c3, &[set(&[1]), set(&[2])]).unwrap(), None);
        assert_eq!(products::setseq_products(&c3, &[set(&[1]), set(&[2])], 2).unwrap(), set(&[0]));
    }

    #[test]
    fn nonabelian_rejected() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        assert!(matches!(check_kneser(&s3, &LabConfig::default()), Err(LabError::NonAbelianGroup(_))));
    }

    #[test]
    fn cyclic_inverse_counts() {
        for (n, free) in [(3, 2), (4, 2), (5, 4)] {
            let out = check_cyclic_inverse(n).unwrap();
            assert!(out.passed());
            assert_eq!(out.observations["free_count"], serde_json::json!(free));
        }
        assert!(check_cyclic_inverse(2).is_err());
    }

    #[test]
    fn cyclic_kn_shapes() {
        let out = check_cyclic_kn(3, 2).unwrap();
        assert!(out.passed(), "{out:?}");
        let out = check_cyclic_kn(3, 1).unwrap();
        assert_eq!(out.parts[0].failures, 0);
        assert_eq!(out.parts[1].failures, 0);
        // Two blocks of n − 1 terms have only n − 1 distinct (n − 2)-products.
        assert_eq!(out.parts[2].failures, out.parts[2].instances);
        assert!(check_cyclic_kn(2, 2).is_err());
    }
}
