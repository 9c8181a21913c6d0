//! Lower bounds on product sets and the structure left over by a maximal
//! product-one subsequence.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{abelian_part, drive, for_each_multiset, for_each_set_tuple, CheckOutcome, LabConfig, LabError};
use crate::elemset::{ElemSet, Element};
use crate::group::Group;
use crate::invariants::{self, multiset_count, SearchOptions};
use crate::products;
use crate::sequence::Sequence;

fn davenport(group: &Group) -> Result<usize, LabError> {
    match invariants::davenport_closed_form(group) {
        Some(d) => Ok(d),
        None => Ok(invariants::small_davenport(group, &SearchOptions::default())?.value),
    }
}

fn seq_of(s: &[Element]) -> Sequence {
    Sequence::from_elements(s.iter().copied())
}

/// All five checks, one outcome each.
pub fn check_pi_bounds(group: &Group, cfg: &LabConfig) -> Result<Vec<CheckOutcome>, LabError> {
    let d = davenport(group)?;
    Ok(vec![
        check_maximal_remainder(group, d, cfg)?,
        check_large_sumset(&abelian_part(group)?, cfg)?,
        check_kemperman(group, cfg)?,
        check_setseq_free_bound(group, cfg)?,
        check_free_sequence_products(group, d, cfg)?,
    ])
}

/// If a maximal product-one `T | S` has `|T| = |S| − d(G)`, every
/// non-identity element of `supp(S)` survives in `S·T^{[−1]}`. Checked for
/// every maximal `T`.
pub fn maximal_remainder_holds(group: &Group, s: &[Element], d: usize) -> Result<(bool, bool), LabError> {
    let seq = seq_of(s);
    let table = products::table_for(group, &seq)?;
    let support = table.support();
    let weight = |digits: &[u32]| digits.iter().sum::<u32>() as usize;
    let max_len = table
        .entries()
        .filter(|(dg, set)| weight(dg) >= 1 && set.contains_identity())
        .map(|(dg, _)| weight(&dg))
        .max()
        .unwrap_or(0);
    if max_len + d != s.len() {
        return Ok((false, true));
    }
    let ok = table
        .entries()
        .filter(|(dg, set)| weight(dg) == max_len && (max_len == 0 || set.contains_identity()))
        .all(|(dg, _)| {
            support
                .iter()
                .zip(&dg)
                .all(|(&g, &used)| g.is_identity() || used < seq.multiplicity(g))
        });
    Ok((true, ok))
}

fn check_maximal_remainder(group: &Group, d: usize, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.size();
    let elems: Vec<Element> = group.elements().collect();
    let extremal = crate::classify::generate_t11(group).unwrap_or_default();
    let mut out = CheckOutcome::new("max-product-one-remainder", group.name());
    let mut premise = 0u64;
    let space = (d..=d + 2).map(|l| multiset_count(n, l)).sum();
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for l in d..=d + 2 {
                let mut go = true;
                for_each_multiset(&elems, l, &mut |s| {
                    go = f(s.to_vec());
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| {
            // Half the samples extend an extremal free sequence, where the
            // premise is most likely to hold.
            let mut s: Vec<Element> = match extremal.choose(rng) {
                Some(w) if rng.gen_bool(0.5) => w.elements(),
                _ => (0..d).map(|_| *elems.choose(rng).unwrap()).collect(),
            };
            let extra = rng.gen_range(0..=3);
            s.extend((0..extra).map(|_| *elems.choose(rng).unwrap()));
            s.sort();
            s
        },
        |s| {
            let (held, ok) = maximal_remainder_holds(group, s, d)?;
            premise += u64::from(held);
            Ok(ok)
        },
    )?;
    out.observe("premise_held", premise);
    Ok(out)
}

/// In an abelian group, `|A| + |B| > |G|` forces `AB = G`.
fn check_large_sumset(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.size();
    let elems: Vec<Element> = group.elements().collect();
    let mut out = CheckOutcome::new("large-sumset-covers", group.name());
    let space = 1u128.checked_shl(2 * n as u32).unwrap_or(u128::MAX);
    let all = group.all();
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for a in 1..(1u64 << n) {
                for b in 1..(1u64 << n) {
                    let (a, b) = (ElemSet(a), ElemSet(b));
                    if a.len() + b.len() > n && !f((a, b)) {
                        return;
                    }
                }
            }
        },
        |rng| {
            let ka = rng.gen_range(1..=n);
            let kb = rng.gen_range(n - ka + 1..=n);
            (super::random_subset_of_size(rng, &elems, ka), super::random_subset_of_size(rng, &elems, kb))
        },
        |&(a, b)| Ok(group.set_product(a, b) == all),
    )?;
    Ok(out)
}

/// With `1 ∈ A ∩ B` and `ab = 1` only for `a = b = 1`: `|AB| ≥ |A| + |B| − 1`.
fn check_kemperman(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.size();
    let nonid: Vec<Element> = group.elements().skip(1).collect();
    let one = ElemSet::singleton(Element::IDENTITY);
    let mut out = CheckOutcome::new("kemperman", group.name());
    let mut premise = 0u64;
    let space = 1u128.checked_shl(2 * (n as u32 - 1)).unwrap_or(u128::MAX);
    let sample = |rng: &mut ChaCha8Rng| -> (ElemSet, ElemSet) {
        let a = one | nonid.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let allowed: Vec<Element> = if rng.gen_bool(0.75) {
            nonid.iter().copied().filter(|&g| !a.contains(group.inv(g))).collect()
        } else {
            nonid.clone()
        };
        let b = one | allowed.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        (a, b)
    };
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for a in 0..(1u64 << (n - 1)) {
                for b in 0..(1u64 << (n - 1)) {
                    if !f((ElemSet(a << 1 | 1), ElemSet(b << 1 | 1))) {
                        return;
                    }
                }
            }
        },
        sample,
        |&(a, b)| {
            let trivial_only = a.iter().filter(|g| !g.is_identity()).all(|g| !b.contains(group.inv(g)));
            if !trivial_only {
                return Ok(true);
            }
            premise += 1;
            Ok(group.set_product(a, b).len() + 1 >= a.len() + b.len())
        },
    )?;
    out.observe("premise_held", premise);
    Ok(out)
}

/// A family of subsets with `1 ∉ Π(A)` has `|Π(A)| ≥ Σ |A_i|`.
fn check_setseq_free_bound(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.size();
    let nonid: Vec<Element> = group.elements().skip(1).collect();
    let mut out = CheckOutcome::new("set-sequence-free-bound", group.name());
    let mut premise = 0u64;
    let base = (1u128 << n.min(100)) - 1;
    let space = (1..=3).map(|l| base.saturating_pow(l)).fold(0u128, u128::saturating_add);
    drive(
        &mut out,
        cfg,
        space,
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
            let l = rng.gen_range(1..=4);
            (0..l)
                .map(|_| {
                    let k = rng.gen_range(1..=3.min(nonid.len().max(1)));
                    if nonid.is_empty() {
                        ElemSet::singleton(Element::IDENTITY)
                    } else {
                        super::random_subset_of_size(rng, &nonid, k)
                    }
                })
                .collect::<Vec<_>>()
        },
        |sets| {
            let all = products::setseq_products_all(group, sets)?;
            if all.contains_identity() {
                return Ok(true);
            }
            premise += 1;
            Ok(all.len() >= sets.iter().map(|a| a.len()).sum())
        },
    )?;
    out.observe("premise_held", premise);
    Ok(out)
}

/// A product-one free `S` has `|Π(S)| ≥ |S|`.
fn check_free_sequence_products(group: &Group, d: usize, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.size();
    let elems: Vec<Element> = group.elements().collect();
    let mut out = CheckOutcome::new("free-sequence-products", group.name());
    let mut premise = 0u64;
    let space = (1..=d).map(|l| multiset_count(n, l)).sum();
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for l in 1..=d {
                let mut go = true;
                for_each_multiset(&elems, l, &mut |s| {
                    go = f(s.to_vec());
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| random_free_sequence(group, rng, d),
        |s| {
            let seq = seq_of(s);
            if !products::is_product_one_free(group, &seq)? {
                return Ok(true);
            }
            premise += 1;
            Ok(products::pi_all(group, &seq)?.len() >= s.len())
        },
    )?;
    out.observe("premise_held", premise);
    Ok(out)
}

/// A product-one free sequence grown by random accepted terms, aiming for a
/// random length in `[1, d]`. Sorted.
pub(crate) fn random_free_sequence(group: &Group, rng: &mut ChaCha8Rng, d: usize) -> Vec<Element> {
    let target = rng.gen_range(1..=d.max(1));
    let nonid: Vec<Element> = group.elements().skip(1).collect();
    let mut s: Vec<Element> = Vec::with_capacity(target);
    let mut tries = 0;
    while s.len() < target && tries < 64 && !nonid.is_empty() {
        tries += 1;
        let g = *nonid.choose(rng).unwrap();
        let mut cand = s.clone();
        cand.push(g);
        cand.sort();
        if products::is_product_one_free(group, &seq_of(&cand)).unwrap_or(false) {
            s = cand;
        }
    }
    s
}
