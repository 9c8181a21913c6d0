//! Extremal forms of length `d(G)` and `E(G) − 1` over `C_p ⋉ C_m`.
//!
//! Recognition is purely syntactic: multiset shape plus the arithmetic side
//! conditions. No freeness test happens here, so comparing the generated
//! forms against an exhaustive census checks both directions independently.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::group::{gcd, Group, MetacyclicSpec};
use crate::invariants::{self, InvariantError, Predicate, SearchOptions, Status};
use crate::products::ProductError;
use crate::sequence::Sequence;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("expected a sequence of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("extremal forms are defined only for metacyclic groups")]
    NotMetacyclic,
    #[error("extremal forms need m > 1")]
    TrivialKernel,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Product-one free sequences of length `d(G)`.
    T11,
    /// `|G|`-product-one free sequences of length `E(G) − 1`.
    T12,
}

impl Theorem {
    pub fn predicate(self) -> Predicate {
        match self {
            Theorem::T11 => Predicate::ProductOneFree,
            Theorem::T12 => Predicate::GroupOrderProductOneFree,
        }
    }

    pub fn length(self, spec: &MetacyclicSpec) -> usize {
        let (p, m) = (spec.p as usize, spec.m as usize);
        match self {
            Theorem::T11 => m + p - 2,
            Theorem::T12 => m * p + m + p - 3,
        }
    }
}

/// Parameters of one extremal form. Exponents are reduced mod `m` (for `b`,
/// `c`) or mod `p` (for `a`); `b` is sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum FormDescriptor {
    /// `x^a y^{b_1} ⋯ x^a y^{b_{p−1}} · (y^c)^{[m−1]}`, `gcd(c, m) = 1`.
    T11i { a: u32, b: Vec<u32>, c: u32 },
    /// `x · xy · xy²` in `S₃`.
    T11iiTriple,
    /// `xy^b · (y^c)^{[2]}` in `S₃`.
    T11iiPair { b: u32, c: u32 },
    /// `x^a y^{b_1} ⋯ x^a y^{b_{p−1}} · (y^{c1})^{[k1·m−1]} · (y^{c2})^{[k2·m−1]}`
    /// with `k1 + k2 = p + 1`, `gcd(c1 − c2, m) = 1` and `(k1, c1) < (k2, c2)`.
    T12i { a: u32, b: Vec<u32>, c1: u32, k1: u32, c2: u32, k2: u32 },
    /// `x · xy · xy² · 1^{[5]}` in `S₃`.
    T12iiTriple,
    /// `xy^b · (y^{c1})^{[5]} · (y^{c2})^{[2]}` in `S₃`, `c1 ≠ c2`.
    T12iiPair { b: u32, c1: u32, c2: u32 },
}

impl FormDescriptor {
    pub fn tag(&self) -> &'static str {
        match self {
            FormDescriptor::T11i { .. } => "T11i",
            FormDescriptor::T11iiTriple | FormDescriptor::T11iiPair { .. } => "T11ii",
            FormDescriptor::T12i { .. } => "T12i",
            FormDescriptor::T12iiTriple | FormDescriptor::T12iiPair { .. } => "T12ii",
        }
    }

    pub fn theorem(&self) -> Theorem {
        if self.tag().starts_with("T11") {
            Theorem::T11
        } else {
            Theorem::T12
        }
    }

    /// Builds the sequence the descriptor names.
    pub fn to_sequence(&self, group: &Group) -> Sequence {
        let el = |a: u32, b: u32| group.from_pair(a, b).expect("metacyclic exponents in range");
        let mut s = Sequence::new();
        let triple = |s: &mut Sequence| {
            for b in 0..3 {
                s.push_n(el(1, b), 1);
            }
        };
        match self {
            FormDescriptor::T11i { a, b, c } => {
                let m = group.metacyclic_spec().expect("metacyclic").m;
                b.iter().for_each(|&bi| s.push_n(el(*a, bi), 1));
                s.push_n(el(0, *c), m - 1);
            }
            FormDescriptor::T11iiTriple => triple(&mut s),
            FormDescriptor::T11iiPair { b, c } => {
                s.push_n(el(1, *b), 1);
                s.push_n(el(0, *c), 2);
            }
            FormDescriptor::T12i { a, b, c1, k1, c2, k2 } => {
                let m = group.metacyclic_spec().expect("metacyclic").m;
                b.iter().for_each(|&bi| s.push_n(el(*a, bi), 1));
                s.push_n(el(0, *c1), k1 * m - 1);
                s.push_n(el(0, *c2), k2 * m - 1);
            }
            FormDescriptor::T12iiTriple => {
                triple(&mut s);
                s.push_n(el(0, 0), 5);
            }
            FormDescriptor::T12iiPair { b, c1, c2 } => {
                s.push_n(el(1, *b), 1);
                s.push_n(el(0, *c1), 5);
                s.push_n(el(0, *c2), 2);
            }
        }
        s
    }
}

fn spec_of(group: &Group) -> Result<MetacyclicSpec, ClassifyError> {
    let spec = group.metacyclic_spec().ok_or(ClassifyError::NotMetacyclic)?;
    if spec.m < 2 {
        return Err(ClassifyError::TrivialKernel);
    }
    Ok(spec)
}

fn coprime(x: u32, m: u32) -> bool {
    gcd(u64::from(x), u64::from(m)) == 1
}

/// Splits `S` into `(a, x^a-coset exponents)` and the `N`-part as
/// `(exponent, multiplicity)` pairs. Fails unless every non-`N` term lies in
/// one coset and there are exactly `p − 1` of them.
fn split(group: &Group, spec: &MetacyclicSpec, s: &Sequence) -> Option<(u32, Vec<u32>, Vec<(u32, u32)>)> {
    let mut coset = None;
    let mut b = Vec::new();
    let mut n_part = Vec::new();
    for (g, k) in s.counts() {
        let (a, e) = group.pair(g)?;
        if a == 0 {
            n_part.push((e, k));
        } else {
            if *coset.get_or_insert(a) != a {
                return None;
            }
            b.extend(std::iter::repeat(e).take(k as usize));
        }
    }
    if b.len() != spec.p as usize - 1 {
        return None;
    }
    b.sort_unstable();
    Some((coset?, b, n_part))
}

fn check_length(theorem: Theorem, spec: &MetacyclicSpec, s: &Sequence) -> Result<(), ClassifyError> {
    let expected = theorem.length(spec);
    if s.len() != expected {
        return Err(ClassifyError::WrongLength { expected, got: s.len() });
    }
    Ok(())
}

pub fn recognize_t11(group: &Group, s: &Sequence) -> Result<Option<FormDescriptor>, ClassifyError> {
    let spec = spec_of(group)?;
    check_length(Theorem::T11, &spec, s)?;
    if spec.is_s3() {
        if *s == FormDescriptor::T11iiTriple.to_sequence(group) {
            return Ok(Some(FormDescriptor::T11iiTriple));
        }
        return Ok(match split(group, &spec, s) {
            Some((1, b, n)) if n.len() == 1 && n[0].0 != 0 => Some(FormDescriptor::T11iiPair { b: b[0], c: n[0].0 }),
            _ => None,
        });
    }
    let Some((a, b, n)) = split(group, &spec, s) else { return Ok(None) };
    Ok(match n[..] {
        [(c, k)] if k == spec.m - 1 && c != 0 && coprime(c, spec.m) => Some(FormDescriptor::T11i { a, b, c }),
        _ => None,
    })
}

pub fn recognize_t12(group: &Group, s: &Sequence) -> Result<Option<FormDescriptor>, ClassifyError> {
    let spec = spec_of(group)?;
    check_length(Theorem::T12, &spec, s)?;
    if spec.is_s3() {
        if *s == FormDescriptor::T12iiTriple.to_sequence(group) {
            return Ok(Some(FormDescriptor::T12iiTriple));
        }
        let Some((1, b, n)) = split(group, &spec, s) else { return Ok(None) };
        let (c1, c2) = match n[..] {
            [(u, 5), (v, 2)] => (u, v),
            [(u, 2), (v, 5)] => (v, u),
            _ => return Ok(None),
        };
        return Ok(coprime(c1.abs_diff(c2), 3).then_some(FormDescriptor::T12iiPair { b: b[0], c1, c2 }));
    }
    let Some((a, b, n)) = split(group, &spec, s) else { return Ok(None) };
    let [(c1, n1), (c2, n2)] = n[..] else { return Ok(None) };
    let m = spec.m;
    if (n1 + 1) % m != 0 || (n2 + 1) % m != 0 {
        return Ok(None);
    }
    let (k1, k2) = ((n1 + 1) / m, (n2 + 1) / m);
    // c1 and c2 are distinct residues in [0, m), so |c1 − c2| has the same gcd
    // with m as c1 − c2 mod m.
    if k1 + k2 != spec.p + 1 || !coprime(c1.abs_diff(c2), m) {
        return Ok(None);
    }
    Ok(Some(canonical_t12i(a, b, (k1, c1), (k2, c2))))
}

fn canonical_t12i(a: u32, b: Vec<u32>, x: (u32, u32), y: (u32, u32)) -> FormDescriptor {
    let ((k1, c1), (k2, c2)) = if x <= y { (x, y) } else { (y, x) };
    FormDescriptor::T12i { a, b, c1, k1, c2, k2 }
}

/// All nondecreasing vectors of length `len` over `[0, m)`.
fn multisets(m: u32, len: usize) -> Vec<Vec<u32>> {
    fn go(m: u32, len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in cur.last().copied().unwrap_or(0)..m {
            cur.push(v);
            go(m, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Every descriptor of the clause that applies to `G`, one per multiset.
pub fn forms(group: &Group, theorem: Theorem) -> Result<Vec<FormDescriptor>, ClassifyError> {
    let spec = spec_of(group)?;
    let mut out = BTreeSet::new();
    if spec.is_s3() {
        match theorem {
            Theorem::T11 => {
                out.insert(FormDescriptor::T11iiTriple);
                for b in 0..3 {
                    for c in 1..3 {
                        out.insert(FormDescriptor::T11iiPair { b, c });
                    }
                }
            }
            Theorem::T12 => {
                out.insert(FormDescriptor::T12iiTriple);
                for b in 0..3 {
                    for c1 in 0..3 {
                        for c2 in (0..3).filter(|&c2| c2 != c1) {
                            out.insert(FormDescriptor::T12iiPair { b, c1, c2 });
                        }
                    }
                }
            }
        }
        return Ok(out.into_iter().collect());
    }
    let (p, m) = (spec.p, spec.m);
    for a in 1..p {
        for b in multisets(m, p as usize - 1) {
            match theorem {
                Theorem::T11 => {
                    for c in (1..m).filter(|&c| coprime(c, m)) {
                        out.insert(FormDescriptor::T11i { a, b: b.clone(), c });
                    }
                }
                Theorem::T12 => {
                    for k1 in 1..=p {
                        for c1 in 0..m {
                            for c2 in (0..m).filter(|&c2| c2 != c1 && coprime(c1.abs_diff(c2), m)) {
                                out.insert(canonical_t12i(a, b.clone(), (k1, c1), (p + 1 - k1, c2)));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn generate(group: &Group, theorem: Theorem) -> Result<Vec<Sequence>, ClassifyError> {
    let set: BTreeSet<Sequence> = forms(group, theorem)?.iter().map(|f| f.to_sequence(group)).collect();
    Ok(set.into_iter().collect())
}

/// Sorted and deduplicated.
pub fn generate_t11(group: &Group) -> Result<Vec<Sequence>, ClassifyError> {
    generate(group, Theorem::T11)
}

pub fn generate_t12(group: &Group) -> Result<Vec<Sequence>, ClassifyError> {
    generate(group, Theorem::T12)
}

pub fn recognize(group: &Group, theorem: Theorem, s: &Sequence) -> Result<Option<FormDescriptor>, ClassifyError> {
    match theorem {
        Theorem::T11 => recognize_t11(group, s),
        Theorem::T12 => recognize_t12(group, s),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::True => s.serialize_bool(true),
            Verdict::False => s.serialize_bool(false),
            Verdict::Unknown => s.serialize_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Progress {
    pub units_done: usize,
    pub units_total: usize,
    /// Why the census could not finish.
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub group: String,
    pub theorem: Theorem,
    pub forms_count: usize,
    pub census_count: Option<usize>,
    /// Every generated form passes the freeness predicate.
    pub forms_are_free: bool,
    /// The exhaustive census equals the generated set.
    pub census_matches_forms: Verdict,
    pub nodes: u64,
    pub seconds: f64,
    /// Present when the census did not complete.
    pub progress: Option<Progress>,
}

pub fn verify_theorem(group: &Group, theorem: Theorem, opts: &SearchOptions) -> Result<VerificationReport, ClassifyError> {
    let start = Instant::now();
    let spec = spec_of(group)?;
    let generated = generate(group, theorem)?;
    let mut forms_are_free = true;
    for s in &generated {
        if !theorem.predicate().holds(group, s)? {
            forms_are_free = false;
            break;
        }
    }
    let length = theorem.length(&spec);
    let census = match invariants::census(group, theorem.predicate(), length, opts) {
        Ok(c) => Ok(c),
        Err(e @ InvariantError::Infeasible { .. }) => Err(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    let (census_count, verdict, nodes, progress) = match census {
        Ok(c) if c.status == Status::Complete => {
            (Some(c.sequences.len()), Verdict::from(c.sequences == generated), c.stats.nodes, None)
        }
        Ok(c) => {
            let progress = Progress {
                units_done: c.stats.units_done,
                units_total: c.stats.units_total,
                reason: "budget exhausted".into(),
            };
            (None, Verdict::Unknown, c.stats.nodes, Some(progress))
        }
        Err(reason) => (None, Verdict::Unknown, 0, Some(Progress { units_done: 0, units_total: 0, reason })),
    };
    Ok(VerificationReport {
        group: group.name().to_string(),
        theorem,
        forms_count: generated.len(),
        census_count,
        forms_are_free,
        census_matches_forms: verdict,
        nodes,
        seconds: start.elapsed().as_secs_f64(),
        progress,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(g: &Group, text: &str) -> Sequence {
        Sequence::parse(g, text).unwrap()
    }

    #[test]
    fn recognizers_on_examples() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        assert_eq!(recognize_t11(&s3, &seq(&s3, "x.x*y.x*y^2")).unwrap(), Some(FormDescriptor::T11iiTriple));
        assert_eq!(recognize_t11(&s3, &seq(&s3, "x.x.y")).unwrap(), None);
        assert_eq!(recognize_t12(&s3, &seq(&s3, "x.x*y.x*y^2.1^5")).unwrap(), Some(FormDescriptor::T12iiTriple));
        assert_eq!(
            recognize_t12(&s3, &seq(&s3, "x*y.(y)^5.(y^2)^2")).unwrap(),
            Some(FormDescriptor::T12iiPair { b: 1, c1: 1, c2: 2 })
        );
        assert!(matches!(
            recognize_t11(&s3, &seq(&s3, "x")),
            Err(ClassifyError::WrongLength { expected: 3, got: 1 })
        ));

        let g = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(
            recognize_t11(&g, &seq(&g, "x*y^3.x*y^5.(y^2)^6")).unwrap(),
            Some(FormDescriptor::T11i { a: 1, b: vec![3, 5], c: 2 })
        );

        let d5 = Group::metacyclic(2, 5, 4).unwrap();
        assert_eq!(recognize_t12(&d5, &seq(&d5, "x.(y)^13")).unwrap(), None);
    }

    #[test]
    fn generator_counts() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        assert_eq!(generate_t11(&s3).unwrap().len(), 7);
        assert_eq!(generate_t12(&s3).unwrap().len(), 19);
        let d5 = Group::metacyclic(2, 5, 4).unwrap();
        assert_eq!(generate_t12(&d5).unwrap().len(), 100);
        let g = Group::metacyclic(3, 7, 2).unwrap();
        assert_eq!(generate_t11(&g).unwrap().len(), 2 * 28 * 6);
        assert_eq!(generate_t12(&g).unwrap().len(), 2 * 28 * 63);
    }

    #[test]
    fn descriptors_round_trip() {
        for (p, m, r) in [(2, 3, 2), (2, 5, 4), (3, 7, 2)] {
            let g = Group::metacyclic(p, m, r).unwrap();
            for theorem in [Theorem::T11, Theorem::T12] {
                for f in forms(&g, theorem).unwrap() {
                    let back = recognize(&g, theorem, &f.to_sequence(&g)).unwrap();
                    assert_eq!(back.as_ref(), Some(&f));
                }
            }
        }
    }

    #[test]
    fn verdict_serialization() {
        assert_eq!(serde_json::to_string(&Verdict::Unknown).unwrap(), "\"unknown\"");
        assert_eq!(serde_json::to_string(&Verdict::True).unwrap(), "true");
    }

    #[test]
    fn verify_s3_t11() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        let r = verify_theorem(&s3, Theorem::T11, &SearchOptions::default()).unwrap();
        assert!(r.forms_are_free);
        assert_eq!(r.census_matches_forms, Verdict::True);
        assert_eq!((r.forms_count, r.census_count), (7, Some(7)));
    }
}
