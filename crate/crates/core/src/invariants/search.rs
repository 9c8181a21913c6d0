//! Pruned multiset search with an incremental product table.
//!
//! The search explores multisets in nondecreasing element order and prunes a
//! node as soon as its newest sub-multisets contain a product-one hit. Both
//! predicates are antitone along the tree, so the pruning is sound:
//!
//! * product-one free: if `1 ∈ Π(T)` then `1 ∈ Π(S)` for every `S` with `T | S`;
//! * `|G|`-product-one free: a length-`|G|` sub-multiset of `T` is also one of
//!   `S`, so `1 ∈ Π_{|G|}(T)` implies `1 ∈ Π_{|G|}(S)`. Sequences shorter than
//!   `|G|` have no such sub-multiset and are never pruned.
//!
//! The root frontier is cut into units (all nondecreasing prefixes of a fixed
//! length) that workers claim independently. A unit's result depends only on
//! its prefix, so merged results are independent of scheduling.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::InvariantError;
use crate::elemset::Element;
use crate::group::Group;
use crate::products::{HitRule, ProductError, ProductTable};
use crate::sequence::{enumerate_below, MultisetVisitor, Sequence, Visit};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    ProductOneFree,
    /// No product-one sub-multiset of length exactly `|G|`.
    GroupOrderProductOneFree,
}

impl Predicate {
    pub fn hit_rule(self, group: &Group) -> HitRule {
        match self {
            Predicate::ProductOneFree => HitRule::Nonempty,
            Predicate::GroupOrderProductOneFree => HitRule::Length(group.size()),
        }
    }

    fn table(self, group: &Group) -> ProductTable<'_> {
        let t = ProductTable::new(group, self.hit_rule(group));
        match self {
            Predicate::ProductOneFree => t,
            Predicate::GroupOrderProductOneFree => t.with_max_weight(group.size()),
        }
    }

    /// Evaluates the predicate from scratch.
    pub fn holds(self, group: &Group, seq: &Sequence) -> Result<bool, ProductError> {
        match self {
            Predicate::ProductOneFree => crate::products::is_product_one_free(group, seq),
            Predicate::GroupOrderProductOneFree => crate::products::is_big_product_one_free(group, seq),
        }
    }
}

/// What to search for. Two jobs with equal fields produce identical results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchJob {
    pub group: String,
    pub predicate: Predicate,
    /// Nodes deeper than this are not generated.
    pub max_depth: usize,
    /// Length of the prefixes that define work units.
    pub split_depth: usize,
}

impl SearchJob {
    pub fn new(group: &Group, predicate: Predicate, max_depth: usize) -> Self {
        SearchJob {
            group: group.name().to_string(),
            predicate,
            max_depth,
            split_depth: 2.min(max_depth),
        }
    }

    /// All unit prefixes in canonical order.
    pub fn units(&self, group_size: usize) -> Vec<Vec<Element>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.split_depth);
        prefixes(group_size, self.split_depth, &mut cur, &mut out);
        out
    }
}

fn prefixes(n: usize, len: usize, cur: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let start = cur.last().map_or(0, |g| g.index());
    for i in start..n {
        cur.push(Element::new(i));
        prefixes(n, len, cur, out);
        cur.pop();
    }
}

/// The outcome of one completed unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitResult {
    /// Largest depth of a surviving node in the unit.
    pub deepest: usize,
    /// Every surviving node at that depth, as element indices.
    pub sequences: Vec<Vec<u8>>,
    pub nodes: u64,
    pub pruned: u64,
}

#[derive(Clone, Debug, Default)]
pub struct Budget {
    /// No unit starts once this many nodes have been visited; a started unit
    /// runs to completion, so every resumed run makes progress.
    pub node_cap: Option<u64>,
    /// Checked inside units as well.
    pub time_limit: Option<Duration>,
}

/// Accepts or rejects a recorded sequence; the hook for isomorph rejection.
/// Off unless set.
pub type SequenceFilter = Arc<dyn Fn(&Group, &[Element]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct SearchOptions {
    pub workers: usize,
    pub budget: Budget,
    /// Checkpoint file, created or resumed.
    pub checkpoint: Option<PathBuf>,
    /// Opaque data stored alongside the checkpoint (the CLI keeps its
    /// configuration there).
    pub checkpoint_context: serde_json::Value,
    pub isomorph_filter: Option<SequenceFilter>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            workers: 1,
            budget: Budget::default(),
            checkpoint: None,
            checkpoint_context: serde_json::Value::Null,
            isomorph_filter: None,
        }
    }
}

impl SearchOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub complete: bool,
    /// Deepest surviving node over the completed units.
    pub deepest: usize,
    /// All surviving nodes at `deepest`, sorted and deduplicated.
    pub sequences: Vec<Sequence>,
    pub nodes: u64,
    pub pruned: u64,
    pub units_done: usize,
    pub units_total: usize,
}

struct Shared {
    stop: AtomicBool,
    nodes: AtomicU64,
    node_cap: Option<u64>,
    deadline: Option<Instant>,
    error: Mutex<Option<ProductError>>,
}

impl Shared {
    /// `between_units` also applies the node cap.
    fn over_budget(&self, between_units: bool) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        let capped = between_units && self.node_cap.is_some_and(|cap| self.nodes.load(Ordering::Relaxed) >= cap);
        let out = capped || self.deadline.is_some_and(|d| Instant::now() >= d);
        if out {
            self.stop.store(true, Ordering::Relaxed);
        }
        out
    }
}

const FLUSH_EVERY: u64 = 256;

struct SearchVisitor<'a> {
    group: &'a Group,
    table: ProductTable<'a>,
    hits: Vec<Option<bool>>,
    result: UnitResult,
    unflushed: u64,
    shared: &'a Shared,
    filter: Option<&'a SequenceFilter>,
}

impl SearchVisitor<'_> {
    fn record(&mut self, path: &[Element]) {
        let depth = path.len();
        if depth < self.result.deepest {
            return;
        }
        if let Some(f) = self.filter {
            if !f(self.group, path) {
                return;
            }
        }
        if depth > self.result.deepest {
            self.result.deepest = depth;
            self.result.sequences.clear();
        }
        self.result.sequences.push(path.iter().map(|g| g.index() as u8).collect());
    }
}

impl MultisetVisitor for SearchVisitor<'_> {
    fn push(&mut self, g: Element, path: &[Element]) -> Visit {
        self.result.nodes += 1;
        self.unflushed += 1;
        let stop = if self.unflushed >= FLUSH_EVERY {
            self.shared.nodes.fetch_add(self.unflushed, Ordering::Relaxed);
            self.unflushed = 0;
            self.shared.over_budget(false)
        } else {
            self.shared.stop.load(Ordering::Relaxed)
        };
        if stop {
            self.hits.push(None);
            return Visit::Stop;
        }
        match self.table.push(g) {
            Ok(hit) => {
                self.hits.push(Some(hit));
                if hit {
                    self.result.pruned += 1;
                    Visit::Prune
                } else {
                    self.record(path);
                    Visit::Descend
                }
            }
            Err(e) => {
                self.shared.error.lock().unwrap().get_or_insert(e);
                self.shared.stop.store(true, Ordering::Relaxed);
                self.hits.push(None);
                Visit::Stop
            }
        }
    }

    fn pop(&mut self, _g: Element) {
        // `None` marks a push that never reached the table.
        if let Some(hit) = self.hits.pop().expect("unbalanced pop") {
            self.table.pop(hit);
        }
    }
}

fn run_unit(
    group: &Group,
    job: &SearchJob,
    prefix: &[Element],
    shared: &Shared,
    filter: Option<&SequenceFilter>,
) -> Option<UnitResult> {
    let mut v = SearchVisitor {
        group,
        table: job.predicate.table(group),
        hits: Vec::with_capacity(job.max_depth),
        result: UnitResult { deepest: 0, sequences: vec![vec![]], nodes: 0, pruned: 0 },
        unflushed: 0,
        shared,
        filter,
    };
    if let Some(f) = filter {
        if !f(group, &[]) {
            v.result.sequences.clear();
        }
    }
    let stats = enumerate_below(group.size(), job.max_depth, prefix, &mut v);
    shared.nodes.fetch_add(v.unflushed, Ordering::Relaxed);
    debug_assert!(v.hits.is_empty() && v.table.is_empty());
    (!stats.stopped).then_some(v.result)
}

/// Runs (or resumes) a search job.
pub fn run_search(group: &Group, job: &SearchJob, opts: &SearchOptions) -> Result<SearchOutcome, InvariantError> {
    if job.group != group.name() {
        return Err(InvariantError::JobMismatch);
    }
    let units = job.units(group.size());
    let checkpoint = match &opts.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            if cp.job != *job || cp.units_total != units.len() {
                return Err(InvariantError::IncompatibleCheckpoint(format!(
                    "{} was written for a different search",
                    path.display()
                )));
            }
            cp
        }
        _ => Checkpoint::new(job.clone(), units.len(), opts.checkpoint_context.clone()),
    };
    if let Some(path) = &opts.checkpoint {
        checkpoint.save(path).map_err(|e| InvariantError::Checkpoint(format!("{}: {e}", path.display())))?;
    }

    let shared = Shared {
        stop: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        node_cap: opts.budget.node_cap,
        deadline: opts.budget.time_limit.map(|t| Instant::now() + t),
        error: Mutex::new(None),
    };
    let pending: Vec<usize> = (0..units.len()).filter(|i| !checkpoint.done.contains_key(i)).collect();
    let state = Mutex::new((checkpoint, None::<std::io::Error>));
    let next = AtomicUsize::new(0);
    let filter = opts.isomorph_filter.as_ref();
    let workers = opts.workers.clamp(1, pending.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if shared.over_budget(true) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&unit) = pending.get(k) else { break };
                let Some(res) = run_unit(group, job, &units[unit], &shared, filter) else { break };
                let mut guard = state.lock().unwrap();
                guard.0.done.insert(unit, res);
                if let Some(path) = &opts.checkpoint {
                    if let Err(e) = guard.0.save(path) {
                        guard.1.get_or_insert(e);
                        shared.stop.store(true, Ordering::Relaxed);
                    }
                }
            });
        }
    });

    if let Some(e) = shared.error.into_inner().unwrap() {
        return Err(InvariantError::Product(e));
    }
    let (checkpoint, io_err) = state.into_inner().unwrap();
    if let Some(e) = io_err {
        return Err(InvariantError::Checkpoint(e.to_string()));
    }
    Ok(merge(&checkpoint.done, units.len()))
}

fn merge(done: &BTreeMap<usize, UnitResult>, units_total: usize) -> SearchOutcome {
    let deepest = done.values().map(|r| r.deepest).max().unwrap_or(0);
    let mut seqs: Vec<Sequence> = done
        .values()
        .filter(|r| r.deepest == deepest)
        .flat_map(|r| r.sequences.iter())
        .map(|idx| Sequence::from_elements(idx.iter().map(|&i| Element::new(i as usize))))
        .collect();
    seqs.sort();
    seqs.dedup();
    SearchOutcome {
        complete: done.len() == units_total,
        deepest,
        sequences: seqs,
        nodes: done.values().map(|r| r.nodes).sum(),
        pruned: done.values().map(|r| r.pruned).sum(),
        units_done: done.len(),
        units_total,
    }
}

/// Number of multisets of length `k` over `n` elements, saturating.
pub fn multiset_count(n: usize, k: usize) -> u128 {
    // C(n + k - 1, k)
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(n as u128 + i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_prefixes() {
        let g = Group::metacyclic(2, 3, 2).unwrap();
        let job = SearchJob::new(&g, Predicate::ProductOneFree, 5);
        let units = job.units(6);
        assert_eq!(units.len(), 21);
        assert_eq!(SearchJob::new(&g, Predicate::ProductOneFree, 1).units(6).len(), 6);
        assert_eq!(SearchJob::new(&g, Predicate::ProductOneFree, 0).units(6), vec![Vec::<Element>::new()]);
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(6, 3), 56);
        assert_eq!(multiset_count(10, 14), 817_190);
        assert_eq!(multiset_count(5, 0), 1);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let g = Group::metacyclic(2, 5, 4).unwrap();
        let job = SearchJob::new(&g, Predicate::ProductOneFree, 9);
        let a = run_search(&g, &job, &SearchOptions::default()).unwrap();
        let b = run_search(&g, &job, &SearchOptions::default().with_workers(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.complete);
        assert_eq!(a.deepest, 5);
    }

    #[test]
    fn node_cap_yields_partial_outcome() {
        let g = Group::metacyclic(2, 5, 4).unwrap();
        let job = SearchJob::new(&g, Predicate::GroupOrderProductOneFree, 14);
        let budget = Budget { node_cap: Some(1000), time_limit: None };
        let out = run_search(&g, &job, &SearchOptions::default().with_budget(budget)).unwrap();
        assert!(!out.complete);
        assert!(out.units_done >= 1 && out.units_done < out.units_total);
    }
}
