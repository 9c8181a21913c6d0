//! Conjugation orbits `{u, u^r, .., u^(r^(p-1))}` of `u ∈ N` and how they
//! surface inside product sets of sequences whose image in `G/N` is
//! product-one.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{drive, for_each_multiset, CheckOutcome, LabConfig, LabError, Mode};
use crate::elemset::{ElemSet, Element};
use crate::group::{gcd, pow_mod, Group, MetacyclicSpec};
use crate::invariants::multiset_count;
use crate::products;
use crate::sequence::Sequence;

fn spec_of(group: &Group) -> Result<MetacyclicSpec, LabError> {
    group.metacyclic_spec().ok_or_else(|| LabError::NotMetacyclic(group.name().to_string()))
}

fn orbit_set(group: &Group, u: Element) -> ElemSet {
    group.r_orbit(u).unwrap_or_default().into_iter().collect()
}

/// `u^(r^s)` for `u ∈ N`.
fn conj(group: &Group, spec: &MetacyclicSpec, u: Element, s: u32) -> Element {
    group.pow(u, pow_mod(spec.r as u64, s as u64, spec.m as u64))
}

/// Whether the classes sum to zero mod `p` with no proper nonempty zero-sum
/// subfamily.
fn is_minimal_zero_sum(classes: &[u32], p: u32) -> bool {
    let t = classes.len();
    if t == 0 || classes.iter().sum::<u32>() % p != 0 {
        return false;
    }
    (1..(1u64 << t) - 1).all(|mask| {
        let s: u32 = (0..t).filter(|i| mask >> i & 1 == 1).map(|i| classes[i]).sum();
        s % p != 0
    })
}

/// The subgroup check, the two orbit-in-product-set checks, the arithmetic
/// facts about `(p, m, r)` and the constant minimal sequence check.
pub fn check_orbit_lemmas(group: &Group, cfg: &LabConfig) -> Result<Vec<CheckOutcome>, LabError> {
    let spec = spec_of(group)?;
    Ok(vec![
        check_orbit_subgroup(group, &spec),
        check_orbit_conjugates(group, &spec, cfg)?,
        check_orbit_product_sets(group, &spec, cfg)?,
        check_coset_arithmetic(group, &spec),
        check_constant_minimal(group, &spec, cfg)?,
    ])
}

/// All subgroups of the cyclic group `N`.
fn subgroups_of_n(group: &Group, spec: &MetacyclicSpec) -> Vec<ElemSet> {
    let mut out: Vec<ElemSet> = (0..spec.m)
        .filter(|&d| d == 0 || spec.m % d == 0)
        .map(|d| group.subgroup_generated(ElemSet::singleton(group.y_pow(d).unwrap())))
        .collect();
    out.sort_by_key(|h| (h.len(), h.0));
    out.dedup();
    out
}

fn check_orbit_subgroup(group: &Group, spec: &MetacyclicSpec) -> CheckOutcome {
    #[derive(Serialize)]
    struct Inst {
        subgroup: Vec<String>,
        u: String,
        s: u32,
        s_prime: u32,
        part: &'static str,
    }
    let mut out = CheckOutcome::new("orbit-subgroup", group.name());
    for m in subgroups_of_n(group, spec) {
        for b in 0..spec.m {
            let u = group.y_pow(b).unwrap();
            let orbit = orbit_set(group, u);
            let inst = |s, s_prime, part| Inst { subgroup: super::names(group, m), u: group.element_name(u), s, s_prime, part };
            for s in 0..spec.p {
                let us = conj(group, spec, u, s);
                out.record(!m.contains(us) || orbit.is_subset(m), &inst(s, s, "member"));
                for s2 in s + 1..spec.p {
                    let us2 = conj(group, spec, u, s2);
                    let same_coset = m.contains(group.mul(us, group.inv(us2)));
                    out.record(!same_coset || orbit.is_subset(m), &inst(s, s2, "same-coset"));
                    out.record(u.is_identity() || us != us2, &inst(s, s2, "distinct"));
                }
            }
        }
    }
    out
}

/// `T` with `φ(T)` a minimal product-one sequence over `G/N`: `π(T) ⊆ N`
/// and each `u ≠ 1` in `π(T)` has at least `|T|` conjugates in `π(T)`.
pub fn orbit_conjugates_hold(group: &Group, t: &[Element]) -> Result<bool, LabError> {
    let pi = products::pi(group, &Sequence::from_elements(t.iter().copied()))?;
    let n = group.normal_subgroup().unwrap_or_default();
    Ok(pi.is_subset(n)
        && pi.iter().filter(|u| !u.is_identity()).all(|u| (orbit_set(group, u) & pi).len() >= t.len()))
}

fn check_orbit_conjugates(group: &Group, spec: &MetacyclicSpec, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let p = spec.p;
    let elems: Vec<Element> = group.elements().collect();
    let classes = |t: &[Element]| -> Vec<u32> { t.iter().map(|&g| group.pair(g).unwrap().0).collect() };
    let mut out = CheckOutcome::new("orbit-conjugates", group.name());
    let space = (1..=p as usize).map(|l| multiset_count(elems.len(), l)).sum();
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for l in 1..=p as usize {
                let mut go = true;
                for_each_multiset(&elems, l, &mut |t| {
                    if is_minimal_zero_sum(&classes(t), p) {
                        go = f(t.to_vec());
                    }
                    go
                });
                if !go {
                    return;
                }
            }
        },
        |rng| loop {
            // Draw quotient classes until they form a minimal zero-sum
            // family, then lift each class to a random coset element.
            let l = rng.gen_range(1..=p);
            let mut cls: Vec<u32> = (1..l).map(|_| rng.gen_range(1..p.max(2))).collect();
            cls.push((p - cls.iter().sum::<u32>() % p) % p);
            if !is_minimal_zero_sum(&cls, p) {
                continue;
            }
            let mut t: Vec<Element> =
                cls.iter().map(|&a| group.from_pair(a, rng.gen_range(0..spec.m)).unwrap()).collect();
            t.sort();
            return t;
        },
        |t| orbit_conjugates_hold(group, t),
    )?;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
struct ProductSetInstance {
    t0: Vec<Element>,
    blocks: Vec<Vec<Element>>,
    us: Vec<Element>,
}

fn sample_product_set_instance(group: &Group, spec: &MetacyclicSpec, rng: &mut ChaCha8Rng) -> ProductSetInstance {
    let n = group.normal_subgroup().unwrap();
    let elems: Vec<Element> = group.elements().collect();
    let i = rng.gen_range(1..spec.p);
    let t0: Vec<Element> = (0..spec.p).map(|_| group.from_pair(i, rng.gen_range(0..spec.m)).unwrap()).collect();
    let l = rng.gen_range(1..=3);
    let mut blocks = Vec::with_capacity(l);
    let mut us = Vec::with_capacity(l);
    while blocks.len() < l {
        let len = rng.gen_range(1..=spec.p as usize + 1);
        let tj: Vec<Element> = (0..len).map(|_| *elems.choose(rng).unwrap()).collect();
        let hits = products::pi(group, &Sequence::from_elements(tj.iter().copied())).unwrap() & n;
        if let Some(&u) = hits.to_vec().choose(rng) {
            blocks.push(tj);
            us.push(u);
        }
    }
    ProductSetInstance { t0, blocks, us }
}

fn check_orbit_product_sets(group: &Group, spec: &MetacyclicSpec, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let mut out = CheckOutcome::new("orbit-product-sets", group.name());
    // The quantification is over arbitrary families of sequences, so this
    // check is always sampled.
    drive(
        &mut out,
        &LabConfig { mode: Some(Mode::Randomized), ..cfg.clone() },
        u128::MAX,
        |_| {},
        |rng| sample_product_set_instance(group, spec, rng),
        |inst| {
            let mut seq = Sequence::from_elements(inst.t0.iter().copied());
            let mut target = products::pi(group, &seq)?;
            for (tj, &u) in inst.blocks.iter().zip(&inst.us) {
                seq = seq.concat(&Sequence::from_elements(tj.iter().copied()));
                target = group.set_product(target, orbit_set(group, u));
                if !target.is_subset(products::pi(group, &seq)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    )?;
    Ok(out)
}

/// `m ≡ 1 (mod p)`, `gcd(r^a − 1, m) = 1` for `p ∤ a`, centralizers of
/// nontrivial `h ∈ N` stay in `N`, and every element off `N` has order `p`.
fn check_coset_arithmetic(group: &Group, spec: &MetacyclicSpec) -> CheckOutcome {
    let (p, m) = (spec.p as u64, spec.m as u64);
    let n = group.normal_subgroup().unwrap();
    let mut out = CheckOutcome::new("coset-arithmetic", group.name());
    out.record(m % p == 1 || m == 1, &serde_json::json!({ "m_mod_p": m % p }));
    for a in (1..2 * p).filter(|a| a % p != 0) {
        let ra = pow_mod(spec.r as u64, a, m);
        out.record(gcd((ra + m - 1) % m, m) == 1 || m == 1, &serde_json::json!({ "a": a }));
    }
    for h in n.iter().filter(|h| !h.is_identity()) {
        out.record(group.centralizer(h).is_subset(n), &group.element_name(h));
    }
    for g in group.all().difference(n).iter() {
        out.record(group.order(g) == spec.p as usize, &group.element_name(g));
    }
    out
}

/// Returns `(premise, conclusion)`: whether `t` is a minimal product-one
/// sequence with `π(t) = {1}`, and whether it is then constant.
pub fn constant_minimal_holds(group: &Group, t: &[Element]) -> Result<(bool, bool), LabError> {
    let seq = Sequence::from_elements(t.iter().copied());
    let table = products::table_for(group, &seq)?;
    let one = ElemSet::singleton(Element::IDENTITY);
    let full = t.len() as u32;
    let mut minimal = true;
    let mut pi_is_one = false;
    for (digits, set) in table.entries() {
        let w: u32 = digits.iter().sum();
        if w == full {
            pi_is_one = set == one;
        } else if w > 0 && set.contains_identity() {
            minimal = false;
        }
    }
    if !(minimal && pi_is_one) {
        return Ok((false, true));
    }
    Ok((true, seq.support().len() == 1))
}

fn check_constant_minimal(group: &Group, spec: &MetacyclicSpec, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let n = group.normal_subgroup().unwrap();
    let off: Vec<Element> = group.all().difference(n).to_vec();
    let p = spec.p as usize;
    let mut out = CheckOutcome::new("constant-minimal", group.name());
    let mut premise = 0u64;
    drive(
        &mut out,
        cfg,
        multiset_count(off.len(), p),
        |f| {
            for_each_multiset(&off, p, &mut |t| f(t.to_vec()));
        },
        |rng| {
            // Half the draws stay inside one coset of N, where products of
            // commuting terms are likeliest.
            let mut t: Vec<Element> = if rng.gen_bool(0.5) {
                let a = rng.gen_range(1..spec.p);
                (0..p).map(|_| group.from_pair(a, rng.gen_range(0..spec.m)).unwrap()).collect()
            } else {
                (0..p).map(|_| *off.choose(rng).unwrap()).collect()
            };
            t.sort();
            t
        },
        |t| {
            let (held, ok) = constant_minimal_holds(group, t)?;
            premise += u64::from(held);
            Ok(ok)
        },
    )?;
    out.observe("premise_held", premise);
    Ok(out)
}

/// For every coset `N_a` (`a ≠ 0`) and every `T` of length `2p − 1` over
/// it: `|Π_p(T)| = p` forces `p = 2` and `Π_p(T) ∪ {1}` to be a subgroup of
/// `N` of order 3.
pub fn check_lemma41(group: &Group) -> Result<CheckOutcome, LabError> {
    let spec = spec_of(group)?;
    let p = spec.p as usize;
    let n = group.normal_subgroup().unwrap();
    let mut out = CheckOutcome::new("coset-p-products", group.name());
    let mut hits = Vec::new();
    let mut per_coset = Vec::new();
    let mut err = None;
    for a in 1..spec.p {
        let coset = group.coset(a).unwrap().to_vec();
        let mut count = 0u64;
        let mut coset_hits = 0u64;
        for_each_multiset(&coset, 2 * p - 1, &mut |t| {
            count += 1;
            let pi = match products::pi_n(group, &Sequence::from_elements(t.iter().copied()), p) {
                Ok(pi) => pi,
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            };
            if pi.len() != p {
                out.record(true, &());
                return true;
            }
            coset_hits += 1;
            let h = pi | ElemSet::singleton(Element::IDENTITY);
            let ok = p == 2 && h.len() == 3 && h.is_subset(n) && group.is_subgroup(h);
            out.record(ok, &super::seq_names(group, t));
            if hits.len() < 8 {
                hits.push(super::seq_names(group, t));
            }
            true
        });
        if let Some(e) = err.take() {
            return Err(e.into());
        }
        per_coset.push(serde_json::json!({ "coset": a, "instances": count, "hits": coset_hits }));
    }
    out.mode = Mode::Exhaustive;
    out.observe("per_coset", per_coset);
    out.observe("hit_examples", hits);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        Group::metacyclic(2, 3, 2).unwrap()
    }

    fn c3c7() -> Group {
        Group::metacyclic(3, 7, 2).unwrap()
    }

    #[test]
    fn minimal_zero_sums() {
        assert!(is_minimal_zero_sum(&[0], 3));
        assert!(is_minimal_zero_sum(&[1, 2], 3));
        assert!(is_minimal_zero_sum(&[1, 1, 1], 3));
        assert!(!is_minimal_zero_sum(&[0, 1, 2], 3));
        assert!(!is_minimal_zero_sum(&[1, 1], 3));
    }

    #[test]
    fn distinct_conjugates_of_y() {
        let g = c3c7();
        let spec = g.metacyclic_spec().unwrap();
        let y = g.y_pow(1).unwrap();
        let orbit: Vec<Element> = (0..3).map(|s| conj(&g, &spec, y, s)).collect();
        assert_eq!(orbit, [1, 2, 4].map(|b| g.y_pow(b).unwrap()));
    }

    #[test]
    fn x_times_xy_has_both_conjugates() {
        let g = s3();
        let t = Sequence::parse(&g, "x.x*y").unwrap().elements();
        let pi = products::pi(&g, &Sequence::from_elements(t.iter().copied())).unwrap();
        assert_eq!(pi, [1, 2].map(|b| g.y_pow(b).unwrap()).into_iter().collect());
        assert!(orbit_conjugates_hold(&g, &t).unwrap());
    }

    #[test]
    fn s3_constant_minimal_are_squares() {
        let g = s3();
        let off = g.all().difference(g.normal_subgroup().unwrap()).to_vec();
        let mut found = Vec::new();
        for_each_multiset(&off, 2, &mut |t| {
            if constant_minimal_holds(&g, t).unwrap().0 {
                found.push(t.to_vec());
            }
            true
        });
        assert_eq!(found, off.iter().map(|&g| vec![g, g]).collect::<Vec<_>>());
    }

    #[test]
    fn orbit_checks_pass() {
        let cfg = LabConfig::default();
        for g in [s3(), c3c7(), Group::metacyclic(2, 5, 4).unwrap()] {
            for o in check_orbit_lemmas(&g, &cfg).unwrap() {
                assert!(o.passed(), "{}", o.summary());
                assert!(o.instances > 0, "{}", o.summary());
            }
        }
    }

    #[test]
    fn coset_p_products_counts() {
        let o = check_lemma41(&s3()).unwrap();
        assert!(o.passed());
        assert_eq!(o.instances, 10);
        let o = check_lemma41(&c3c7()).unwrap();
        assert!(o.passed());
        assert_eq!(o.instances, 2 * 462);
        assert_eq!(o.observations["per_coset"][0]["hits"], 0);
    }
}
