//! Executable checks of the supporting facts behind the extremal-sequence
//! results: sumset bounds, cyclic inverse results, conjugation orbits in
//! `C_p ⋉ C_m`, and the bookkeeping over orbit-set families.
//!
//! Every check runs either exhaustively, when its instance space has at most
//! `exhaustive_bound` members, or on `trials` instances drawn from a seeded
//! generator. Instance `i` of a randomized run depends only on `(seed, i)`.

mod abelian;
mod bounds;
mod extremal;
mod orbits;
mod setseq;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elemset::{ElemSet, Element};
use crate::group::{Group, GroupError};
use crate::invariants::{InvariantError, SearchOptions};
use crate::products::ProductError;
use crate::sequence::{enumerate_multisets, MultisetVisitor, Visit};

pub use abelian::{check_cyclic_inverse, check_cyclic_kn, check_dgm, check_kneser};
pub use bounds::check_pi_bounds;
pub use extremal::{check_lemma53, check_lemma54_55, find_kernel_cover};
pub use orbits::{check_lemma41, check_orbit_lemmas};
pub use setseq::{analyze_setseq, check_mu_bounds, CosetIncidence, MuCase, SetSequenceAnalysis};

pub const DEFAULT_SEED: u64 = 0x2f6b_d1c3_9a4e_0571;
pub const DEFAULT_TRIALS: u64 = 1_000;
pub const DEFAULT_EXHAUSTIVE_BOUND: u128 = 1_000_000;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0} needs an abelian group")]
    NonAbelianGroup(String),
    #[error("{0} needs a metacyclic group")]
    NotMetacyclic(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("set {index} is not a truncated conjugation orbit of common size {t}")]
    MalformedOrbitFamily { index: usize, t: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Randomized,
    /// Parts ran in different modes.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub seed: u64,
    pub trials: u64,
    pub exhaustive_bound: u128,
    /// Forces a mode instead of choosing by instance-space size.
    pub mode: Option<Mode>,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { seed: DEFAULT_SEED, trials: DEFAULT_TRIALS, exhaustive_bound: DEFAULT_EXHAUSTIVE_BOUND, mode: None }
    }
}

impl LabConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = Some(mode);
        self
    }

    fn exhaustive(&self, space: u128) -> bool {
        match self.mode {
            Some(Mode::Exhaustive) => true,
            Some(Mode::Randomized) => false,
            _ => space <= self.exhaustive_bound,
        }
    }

    /// The generator for randomized instance `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// The result of one check. `failures == 0` exactly when `counterexample`
/// is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub lemma: String,
    pub group: String,
    pub mode: Mode,
    /// Present for randomized runs.
    pub seed: Option<u64>,
    pub instances: u64,
    pub failures: u64,
    /// The first failing instance.
    pub counterexample: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, serde_json::Value>,
    /// Sub-checks; their counts are included in the totals above.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckOutcome>,
}

impl CheckOutcome {
    pub fn new(lemma: impl Into<String>, group: impl Into<String>) -> Self {
        CheckOutcome {
            lemma: lemma.into(),
            group: group.into(),
            mode: Mode::Exhaustive,
            seed: None,
            instances: 0,
            failures: 0,
            counterexample: None,
            observations: BTreeMap::new(),
            parts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record<T: Serialize + ?Sized>(&mut self, ok: bool, instance: &T) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(serde_json::to_value(instance).expect("instances serialize"));
            }
        }
    }

    pub fn observe(&mut self, key: &str, value: impl Serialize) {
        self.observations.insert(key.to_string(), serde_json::to_value(value).expect("observations serialize"));
    }

    /// Folds a sub-check into this outcome.
    pub fn add_part(&mut self, part: CheckOutcome) {
        if self.parts.is_empty() && self.instances == 0 {
            self.mode = part.mode;
            self.seed = part.seed;
        } else if self.mode != part.mode {
            self.mode = Mode::Mixed;
        }
        self.seed = self.seed.or(part.seed);
        self.instances += part.instances;
        self.failures += part.failures;
        if self.counterexample.is_none() {
            self.counterexample = part.counterexample.clone().map(|c| serde_json::json!({ "part": part.lemma, "instance": c }));
        }
        self.parts.push(part);
    }

    /// One summary line.
    pub fn summary(&self) -> String {
        format!(
            "{} {} on {}: {} instances, {} failures ({})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.lemma,
            self.group,
            self.instances,
            self.failures,
            match self.mode {
                Mode::Exhaustive => "exhaustive",
                Mode::Randomized => "randomized",
                Mode::Mixed => "mixed",
            }
        )
    }
}

/// Runs `check` over every instance (exhaustive mode) or over `cfg.trials`
/// seeded samples, recording results in `out`.
pub(crate) fn drive<I: Serialize>(
    out: &mut CheckOutcome,
    cfg: &LabConfig,
    space: u128,
    exhaustive: impl FnOnce(&mut dyn FnMut(I) -> bool),
    sample: impl Fn(&mut ChaCha8Rng) -> I,
    mut check: impl FnMut(&I) -> Result<bool, LabError>,
) -> Result<(), LabError> {
    let mut err = None;
    if cfg.exhaustive(space) {
        out.mode = Mode::Exhaustive;
        out.seed = None;
        exhaustive(&mut |inst| match check(&inst) {
            Ok(ok) => {
                out.record(ok, &inst);
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        });
    } else {
        out.mode = Mode::Randomized;
        out.seed = Some(cfg.seed);
        for i in 0..cfg.trials {
            let inst = sample(&mut cfg.rng(i));
            match check(&inst) {
                Ok(ok) => out.record(ok, &inst),
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
    }
    err.map_or(Ok(()), Err)
}

/// Calls `f` on every nondecreasing length-`len` sequence over `elems` until
/// it returns `false`.
pub(crate) fn for_each_multiset(elems: &[Element], len: usize, f: &mut dyn FnMut(&[Element]) -> bool) {
    struct Leaves<'a> {
        elems: &'a [Element],
        buf: Vec<Element>,
        f: &'a mut dyn FnMut(&[Element]) -> bool,
    }
    impl MultisetVisitor for Leaves<'_> {
        fn push(&mut self, _g: Element, _path: &[Element]) -> Visit {
            Visit::Descend
        }
        fn pop(&mut self, _g: Element) {}
        fn leaf(&mut self, path: &[Element]) -> Visit {
            self.buf.clear();
            self.buf.extend(path.iter().map(|g| self.elems[g.index()]));
            if (self.f)(&self.buf) {
                Visit::Descend
            } else {
                Visit::Stop
            }
        }
    }
    if len == 0 {
        f(&[]);
        return;
    }
    let mut v = Leaves { elems, buf: Vec::with_capacity(len), f };
    enumerate_multisets(elems.len(), len, &mut v);
}

/// Calls `f` on every `r`-tuple of nonempty subsets of `{0, .., n-1}`.
pub(crate) fn for_each_set_tuple(n: usize, r: usize, f: &mut dyn FnMut(&[ElemSet]) -> bool) {
    let top = (1u64 << n) - 1;
    let mut masks = vec![1u64; r];
    loop {
        let sets: Vec<ElemSet> = masks.iter().map(|&m| ElemSet(m)).collect();
        if !f(&sets) {
            return;
        }
        let mut i = 0;
        loop {
            if i == r {
                return;
            }
            if masks[i] < top {
                masks[i] += 1;
                break;
            }
            masks[i] = 1;
            i += 1;
        }
    }
}

/// A uniformly random nonempty subset of `elems`.
pub(crate) fn random_subset(rng: &mut ChaCha8Rng, elems: &[Element]) -> ElemSet {
    use rand::Rng;
    loop {
        let s: ElemSet = elems.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random subset of `elems` of exactly `k` elements.
pub(crate) fn random_subset_of_size(rng: &mut ChaCha8Rng, elems: &[Element], k: usize) -> ElemSet {
    use rand::seq::SliceRandom;
    elems.choose_multiple(rng, k).copied().collect()
}

pub(crate) fn names(group: &Group, set: ElemSet) -> Vec<String> {
    set.iter().map(|g| group.element_name(g)).collect()
}

pub(crate) fn seq_names(group: &Group, seq: &[Element]) -> Vec<String> {
    seq.iter().map(|&g| group.element_name(g)).collect()
}

/// The abelian group the sumset checks run on: `N` for metacyclic groups,
/// the group itself when abelian.
pub fn abelian_part(group: &Group) -> Result<Group, LabError> {
    match group.normal_subgroup() {
        Some(n) => Ok(group.induced_subgroup(n, format!("N<{}>", group.name()))?.0),
        None if group.is_abelian() => Ok(group.clone()),
        None => Err(LabError::NonAbelianGroup("the sumset checks".into())),
    }
}

/// Every check that applies to `group`, in a fixed order.
pub fn run_suite(group: &Group, cfg: &LabConfig, opts: &SearchOptions) -> Result<Vec<CheckOutcome>, LabError> {
    let mut out = Vec::new();
    let ab = abelian_part(group)?;
    out.push(check_kneser(&ab, cfg)?);
    out.push(check_dgm(&ab, cfg)?);
    let n = ab.size();
    if (3..=12).contains(&n) {
        out.push(check_cyclic_inverse(n)?);
    }
    if let Some(spec) = group.metacyclic_spec() {
        for n in [spec.p as usize, spec.m as usize] {
            if n >= 3 && abelian::cyclic_kn_feasible(n, 2, cfg) {
                out.push(check_cyclic_kn(n, 2)?);
            }
        }
    }
    out.extend(check_pi_bounds(group, cfg)?);
    if group.metacyclic_spec().is_some() {
        out.extend(check_orbit_lemmas(group, cfg)?);
        out.push(check_lemma41(group)?);
        out.push(check_mu_bounds(group, cfg)?);
        if group.metacyclic_spec().is_some_and(|s| s.m > 1) {
            out.push(check_lemma53(group, cfg)?);
            if crate::invariants::gao_exhaustive_feasible(group, opts) {
                out.push(check_lemma54_55(group, opts)?);
            }
        }
    }
    Ok(out)
}
