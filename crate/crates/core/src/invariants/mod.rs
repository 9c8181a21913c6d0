//! Small Davenport constant, Gao constant and censuses of extremal sequences.
//!
//! Everything here is a thin layer over [`search::run_search`]. A run that
//! hits its budget still returns a result, with `status: Partial` and the
//! value read as a lower bound.

pub mod checkpoint;
pub mod search;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::Element;
use crate::group::{Group, GroupKind};
use crate::products::{self, ProductError};
use crate::sequence::Sequence;
pub use search::{multiset_count, Budget, Predicate, SearchJob, SearchOptions, SearchOutcome, SequenceFilter};

/// Exhaustive `|G|`-product-one free runs whose unprunable part alone
/// exceeds this many nodes are refused unless a larger node cap is given.
pub const FEASIBLE_NODE_LIMIT: u128 = 1_000_000;

const WITNESS_SAMPLE: usize = 5;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("search job does not belong to this group")]
    JobMismatch,
    #[error("incompatible checkpoint: {0}")]
    IncompatibleCheckpoint(String),
    #[error("checkpoint i/o: {0}")]
    Checkpoint(String),
    #[error("length {length} is below |G| = {order}; every sequence qualifies")]
    DegenerateLength { length: usize, order: usize },
    #[error("search needs at least {estimated} nodes, limit is {limit}")]
    Infeasible { estimated: u128, limit: u128 },
    #[error("search reached its depth cap {0}")]
    DepthCapReached(usize),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invariant {
    #[serde(rename = "d")]
    SmallDavenport,
    #[serde(rename = "E")]
    Gao,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    /// Only a verified witness; the value is a lower bound.
    LowerBoundOnly,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    Partial,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaoMode {
    /// Exhaustive when feasible, otherwise lower bound only.
    #[default]
    Auto,
    Exhaustive,
    LowerBoundOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub pruned: u64,
    pub units_done: usize,
    pub units_total: usize,
    pub seconds: f64,
}

impl SearchStats {
    fn from_outcome(out: &SearchOutcome, start: Instant) -> Self {
        SearchStats {
            nodes: out.nodes,
            pruned: out.pruned,
            units_done: out.units_done,
            units_total: out.units_total,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub group: String,
    pub invariant: Invariant,
    /// The exact value when `exact`, otherwise a lower bound.
    pub value: usize,
    pub exact: bool,
    pub method: Method,
    pub status: Status,
    /// The closed form for metacyclic specs, for comparison.
    pub closed_form: Option<usize>,
    /// Number of extremal sequences seen (all of them when complete).
    pub extremal_count: usize,
    /// Up to a few extremal sequences in text form.
    pub witnesses: Vec<String>,
    pub stats: SearchStats,
}

/// `m + p − 2`.
pub fn davenport_closed_form(group: &Group) -> Option<usize> {
    group.metacyclic_spec().map(|s| (s.m + s.p - 2) as usize)
}

/// `mp + m + p − 2`.
pub fn gao_closed_form(group: &Group) -> Option<usize> {
    group.metacyclic_spec().map(|s| (s.m * s.p + s.m + s.p - 2) as usize)
}

/// Exhaustive search depth cap: Olson-type bounds keep both extremal lengths
/// below `2|G| − 1`.
fn depth_cap(group: &Group) -> usize {
    2 * group.size() - 1
}

fn sample(group: &Group, seqs: &[Sequence]) -> Vec<String> {
    seqs.iter().take(WITNESS_SAMPLE).map(|s| s.render(group)).collect()
}

pub fn small_davenport(group: &Group, opts: &SearchOptions) -> Result<InvariantResult, InvariantError> {
    let start = Instant::now();
    let cap = depth_cap(group);
    let job = SearchJob::new(group, Predicate::ProductOneFree, cap);
    let out = search::run_search(group, &job, opts)?;
    if out.deepest == cap {
        return Err(InvariantError::DepthCapReached(cap));
    }
    Ok(InvariantResult {
        group: group.name().to_string(),
        invariant: Invariant::SmallDavenport,
        value: out.deepest,
        exact: out.complete,
        method: Method::Exhaustive,
        status: if out.complete { Status::Complete } else { Status::Partial },
        closed_form: davenport_closed_form(group),
        extremal_count: out.sequences.len(),
        witnesses: sample(group, &out.sequences),
        stats: SearchStats::from_outcome(&out, start),
    })
}

/// Lower bound on the nodes of an exhaustive `|G|`-product-one free search:
/// nothing shorter than `|G|` is ever pruned.
pub fn unprunable_nodes(group: &Group) -> u128 {
    let n = group.size();
    multiset_count(n + 1, n - 1)
}

fn node_limit(opts: &SearchOptions) -> u128 {
    opts.budget.node_cap.map_or(FEASIBLE_NODE_LIMIT, |cap| FEASIBLE_NODE_LIMIT.max(u128::from(cap)))
}

pub fn gao_exhaustive_feasible(group: &Group, opts: &SearchOptions) -> bool {
    unprunable_nodes(group) <= node_limit(opts)
}

/// The sequence `x^{[p−1]} · 1^{[m−1]} · y^{[pm−1]}`, of length `mp + m + p − 3`.
pub fn gao_witness(group: &Group) -> Option<Sequence> {
    let s = group.metacyclic_spec()?;
    let x = group.from_pair(1, 0)?;
    let y = group.from_pair(0, 1 % s.m)?;
    let mut seq = Sequence::power(x, s.p - 1);
    seq.push_n(Element::IDENTITY, s.m - 1);
    seq.push_n(y, s.p * s.m - 1);
    Some(seq)
}

pub fn gao_constant(group: &Group, mode: GaoMode, opts: &SearchOptions) -> Result<InvariantResult, InvariantError> {
    let exhaustive = match mode {
        GaoMode::Exhaustive => true,
        GaoMode::LowerBoundOnly => false,
        GaoMode::Auto => gao_exhaustive_feasible(group, opts) || group.metacyclic_spec().is_none(),
    };
    if !exhaustive {
        return gao_lower_bound(group);
    }
    if !gao_exhaustive_feasible(group, opts) {
        return Err(InvariantError::Infeasible { estimated: unprunable_nodes(group), limit: node_limit(opts) });
    }
    let start = Instant::now();
    let cap = depth_cap(group);
    let job = SearchJob::new(group, Predicate::GroupOrderProductOneFree, cap);
    let out = search::run_search(group, &job, opts)?;
    if out.deepest == cap {
        return Err(InvariantError::DepthCapReached(cap));
    }
    Ok(InvariantResult {
        group: group.name().to_string(),
        invariant: Invariant::Gao,
        value: out.deepest + 1,
        exact: out.complete,
        method: Method::Exhaustive,
        status: if out.complete { Status::Complete } else { Status::Partial },
        closed_form: gao_closed_form(group),
        extremal_count: out.sequences.len(),
        witnesses: sample(group, &out.sequences),
        stats: SearchStats::from_outcome(&out, start),
    })
}

fn gao_lower_bound(group: &Group) -> Result<InvariantResult, InvariantError> {
    let start = Instant::now();
    let Some(w) = gao_witness(group) else {
        return Err(InvariantError::Infeasible { estimated: unprunable_nodes(group), limit: FEASIBLE_NODE_LIMIT });
    };
    let free = products::is_big_product_one_free(group, &w)?;
    // A failing witness proves nothing beyond the trivial bound |G|.
    let value = if free { w.len() + 1 } else { group.size() };
    Ok(InvariantResult {
        group: group.name().to_string(),
        invariant: Invariant::Gao,
        value,
        exact: false,
        method: Method::LowerBoundOnly,
        status: Status::Complete,
        closed_form: gao_closed_form(group),
        extremal_count: usize::from(free),
        witnesses: if free { vec![w.render(group)] } else { vec![] },
        stats: SearchStats { seconds: start.elapsed().as_secs_f64(), ..SearchStats::default() },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub group: String,
    pub predicate: Predicate,
    pub length: usize,
    /// Sorted, one entry per multiset.
    pub sequences: Vec<Sequence>,
    pub status: Status,
    pub stats: SearchStats,
}

/// All sequences of exactly `length` terms satisfying `predicate`.
pub fn census(
    group: &Group,
    predicate: Predicate,
    length: usize,
    opts: &SearchOptions,
) -> Result<Census, InvariantError> {
    if predicate == Predicate::GroupOrderProductOneFree {
        if length < group.size() {
            return Err(InvariantError::DegenerateLength { length, order: group.size() });
        }
        if !gao_exhaustive_feasible(group, opts) {
            return Err(InvariantError::Infeasible { estimated: unprunable_nodes(group), limit: node_limit(opts) });
        }
    }
    let start = Instant::now();
    let job = SearchJob::new(group, predicate, length);
    let out = search::run_search(group, &job, opts)?;
    let stats = SearchStats::from_outcome(&out, start);
    let sequences = if out.deepest == length { out.sequences } else { Vec::new() };
    Ok(Census {
        group: group.name().to_string(),
        predicate,
        length,
        sequences,
        status: if out.complete { Status::Complete } else { Status::Partial },
        stats,
    })
}

fn known_davenport(group: &Group, opts: &SearchOptions) -> Result<usize, InvariantError> {
    match group.kind() {
        GroupKind::Metacyclic(_) => Ok(davenport_closed_form(group).expect("metacyclic")),
        GroupKind::Cayley => {
            let r = small_davenport(group, &SearchOptions { checkpoint: None, ..opts.clone() })?;
            if r.exact {
                Ok(r.value)
            } else {
                Err(InvariantError::Infeasible { estimated: u128::from(r.stats.nodes), limit: node_limit(opts) })
            }
        }
    }
}

/// Product-one free sequences of length `d(G)`.
pub fn census_extremal_pof(group: &Group, opts: &SearchOptions) -> Result<Census, InvariantError> {
    let d = known_davenport(group, opts)?;
    census(group, Predicate::ProductOneFree, d, opts)
}

/// `|G|`-product-one free sequences of length `E(G) − 1`.
pub fn census_extremal_bigpof(group: &Group, opts: &SearchOptions) -> Result<Census, InvariantError> {
    let e = match gao_closed_form(group) {
        Some(e) => e,
        None => {
            let r = gao_constant(group, GaoMode::Exhaustive, &SearchOptions { checkpoint: None, ..opts.clone() })?;
            if !r.exact {
                return Err(InvariantError::Infeasible { estimated: unprunable_nodes(group), limit: node_limit(opts) });
            }
            r.value
        }
    };
    census(group, Predicate::GroupOrderProductOneFree, e - 1, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SearchOptions {
        SearchOptions::default().with_workers(2)
    }

    #[test]
    fn davenport_small_groups() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        let r = small_davenport(&s3, &opts()).unwrap();
        assert_eq!((r.value, r.exact, r.closed_form), (3, true, Some(3)));
        let d5 = Group::metacyclic(2, 5, 4).unwrap();
        assert_eq!(small_davenport(&d5, &opts()).unwrap().value, 5);
    }

    #[test]
    fn gao_s3_is_nine() {
        let s3 = Group::metacyclic(2, 3, 2).unwrap();
        let r = gao_constant(&s3, GaoMode::Exhaustive, &opts()).unwrap();
        assert_eq!((r.value, r.exact), (9, true));
        assert_eq!(gao_closed_form(&s3), Some(9));
    }

    #[test]
    fn gao_lower_bound_mode() {
        let g = Group::metacyclic(3, 7, 2).unwrap();
        let r = gao_constant(&g, GaoMode::Auto, &opts()).unwrap();
        assert_eq!(r.method, Method::LowerBoundOnly);
        assert_eq!(r.value, 29);
        assert!(!r.exact);
    }

    #[test]
    fn cyclic_census() {
        for n in 2..=9usize {
            let g = Group::cyclic(n).unwrap();
            let c = census_extremal_pof(&g, &opts()).unwrap();
            assert_eq!(c.length, n - 1);
            let expected: Vec<Sequence> = (1..n)
                .filter(|&k| crate::group::gcd(k as u64, n as u64) == 1)
                .map(|k| Sequence::power(Element::new(k), (n - 1) as u32))
                .collect();
            let mut expected = expected;
            expected.sort();
            assert_eq!(c.sequences, expected, "n = {n}");
        }
    }

    #[test]
    fn degenerate_bigpof_census_rejected() {
        let g = Group::metacyclic(2, 3, 2).unwrap();
        assert!(matches!(
            census(&g, Predicate::GroupOrderProductOneFree, 5, &opts()),
            Err(InvariantError::DegenerateLength { .. })
        ));
    }

    #[test]
    fn census_counts_s3() {
        let g = Group::metacyclic(2, 3, 2).unwrap();
        assert_eq!(census_extremal_pof(&g, &opts()).unwrap().sequences.len(), 7);
        assert_eq!(census_extremal_bigpof(&g, &opts()).unwrap().sequences.len(), 19);
    }
}
