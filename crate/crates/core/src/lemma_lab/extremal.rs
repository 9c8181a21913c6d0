//! Checks on the two facts that organize extremal `|G|`-product-one free
//! sequences: a product-one block can always be assembled from a long
//! sequence over `N` together with `p` terms of one coset, and long coset
//! parts force the `S₃` exception.

use rand::Rng;
use serde::Serialize;

use super::{drive, for_each_multiset, CheckOutcome, LabConfig, LabError};
use crate::elemset::Element;
use crate::group::{Group, MetacyclicSpec};
use crate::invariants::{self, multiset_count, Predicate, SearchOptions, Status};
use crate::products;
use crate::sequence::Sequence;

fn spec_of(group: &Group) -> Result<MetacyclicSpec, LabError> {
    group.metacyclic_spec().ok_or_else(|| LabError::NotMetacyclic(group.name().to_string()))
}

#[derive(Clone, Debug, Serialize)]
struct Pair {
    s: Vec<Element>,
    t: Vec<Element>,
}

/// Searches for a nonempty `U | S` with `p | |U|` such that `1 ∈ π(U)` or
/// `1 ∈ π(T·U)`. `S` lies in `N`, so `π(U)` is a single product.
pub fn find_kernel_cover(group: &Group, s: &[Element], t: &[Element], p: usize) -> Result<Option<Vec<Element>>, LabError> {
    let seq = Sequence::from_elements(s.iter().copied());
    let counts: Vec<(Element, u32)> = seq.counts().collect();
    // Odometer over sub-multisets of S.
    let mut digits = vec![0u32; counts.len()];
    let sub = |digits: &[u32]| -> Vec<Element> {
        counts.iter().zip(digits).flat_map(|(&(g, _), &k)| std::iter::repeat(g).take(k as usize)).collect()
    };
    let mut candidates = Vec::new();
    loop {
        let mut i = 0;
        while i < digits.len() && digits[i] == counts[i].1 {
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            break;
        }
        digits[i] += 1;
        let w: u32 = digits.iter().sum();
        if w as usize % p != 0 {
            continue;
        }
        let u = sub(&digits);
        if group.product(u.iter().copied()).is_identity() {
            return Ok(Some(u));
        }
        candidates.push(digits.clone());
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    let whole = Sequence::from_elements(t.iter().chain(s).copied());
    let table = products::table_for(group, &whole)?;
    let tseq = Sequence::from_elements(t.iter().copied());
    for digits in candidates {
        let u = sub(&digits);
        let tu = tseq.concat(&Sequence::from_elements(u.iter().copied()));
        if table.pi_of(&tu).is_some_and(|set| set.contains_identity()) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Every `S` over `N` of length `m + p − 2` and every `T` of `p` terms from a
/// single coset `N_i` (`i ≠ 0`) admit a nonempty `U | S`, `p | |U|`, with
/// `1 ∈ π(U)` or `1 ∈ π(T·U)`.
pub fn check_lemma53(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let spec = spec_of(group)?;
    if spec.m < 2 {
        return Err(LabError::Precondition("N is trivial".into()));
    }
    let (p, m) = (spec.p as usize, spec.m as usize);
    let n: Vec<Element> = group.normal_subgroup().unwrap().to_vec();
    let len = m + p - 2;
    let s_count = multiset_count(m, len);
    let t_count = multiset_count(m, p);
    let space = s_count.saturating_mul(t_count).saturating_mul(p as u128 - 1);
    let mut out = CheckOutcome::new("kernel-cover", group.name());
    let mut via_t = 0u64;
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            let mut ss = Vec::new();
            for_each_multiset(&n, len, &mut |s| {
                ss.push(s.to_vec());
                true
            });
            for i in 1..spec.p {
                let coset = group.coset(i).unwrap().to_vec();
                let mut go = true;
                for_each_multiset(&coset, p, &mut |t| {
                    for s in &ss {
                        go = f(Pair { s: s.clone(), t: t.to_vec() });
                        if !go {
                            break;
                        }
                    }
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| {
            let i = rng.gen_range(1..spec.p);
            let mut s: Vec<Element> = (0..len).map(|_| group.y_pow(rng.gen_range(0..spec.m)).unwrap()).collect();
            let mut t: Vec<Element> = (0..p).map(|_| group.from_pair(i, rng.gen_range(0..spec.m)).unwrap()).collect();
            s.sort();
            t.sort();
            Pair { s, t }
        },
        |pair| {
            let found = find_kernel_cover(group, &pair.s, &pair.t, p)?;
            if let Some(u) = &found {
                via_t += u64::from(!group.product(u.iter().copied()).is_identity());
            }
            Ok(found.is_some())
        },
    )?;
    out.observe("covered_only_with_t", via_t);
    Ok(out)
}

/// Over the census of `|G|`-product-one free sequences of length
/// `E(G) − 1`: a coset part `S_{N_i}` with at least `p` terms happens only
/// for `x·xy·xy²·1^{[5]}` in `S₃`; otherwise the image of the off-`N` part
/// in `G/N` is product-one free.
pub fn check_lemma54_55(group: &Group, opts: &SearchOptions) -> Result<CheckOutcome, LabError> {
    let spec = spec_of(group)?;
    let p = spec.p;
    let e = invariants::gao_closed_form(group).ok_or_else(|| LabError::NotMetacyclic(group.name().to_string()))?;
    let census = invariants::census(group, Predicate::GroupOrderProductOneFree, e - 1, opts)?;
    if census.status != Status::Complete {
        return Err(LabError::Precondition("census did not finish within the budget".into()));
    }
    let exception = if spec.is_s3() { Some(Sequence::parse(group, "x.x*y.x*y^2.1^5").unwrap()) } else { None };
    let mut out = CheckOutcome::new("extremal-coset-split", group.name());
    let mut long_parts = 0u64;
    for s in &census.sequences {
        let mut per_coset = vec![0u32; p as usize];
        let mut classes = Vec::new();
        for g in s.elements() {
            let a = group.quotient_class(g)?;
            per_coset[a as usize] += 1;
            if a != 0 {
                classes.push(a);
            }
        }
        let ok = if per_coset[1..].iter().any(|&k| k >= p) {
            long_parts += 1;
            exception.as_ref() == Some(s)
        } else {
            zero_sum_free_mod(&classes, p)
        };
        out.record(ok, &s.render(group));
    }
    out.observe("census_size", census.sequences.len());
    out.observe("long_coset_part", long_parts);
    Ok(out)
}

/// No nonempty subfamily sums to 0 mod `p`. Subset sums are tracked as a
/// bitmask over `Z_p`.
fn zero_sum_free_mod(classes: &[u32], p: u32) -> bool {
    let mut reach: u128 = 0;
    for &a in classes {
        let shifted = (0..p).filter(|&x| reach >> x & 1 == 1).fold(0u128, |acc, x| acc | 1 << ((x + a) % p));
        reach |= shifted | 1 << (a % p);
        if reach & 1 == 1 {
            return false;
        }
    }
    true
}
