//! Families `A = (A_1, .., A_ℓ)` of truncated conjugation orbits inside `N`,
//! the stabilizer `M` of `Π^{v−1}(A)`, and the coset incidences that drive
//! the lower bounds on `|Π^{v−1}(A)|`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{drive, for_each_multiset, CheckOutcome, LabConfig, LabError};
use crate::elemset::{ElemSet, Element};
use crate::group::Group;
use crate::invariants::multiset_count;
use crate::products;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetIncidence {
    pub coset: ElemSet,
    /// `V_Q`: indices `i` (from 0) with `A_i ∩ Q ≠ ∅`.
    pub v_q: Vec<usize>,
}

/// Which of the four lower bounds applies. Exactly one case holds for every
/// analysis.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuCase {
    Mu0,
    MuAtLeast2,
    Mu1RIsM,
    Mu1RNotM,
}

/// Everything derived from `(A, v)`. Indices into `A` start at 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSequenceAnalysis {
    pub v: usize,
    pub t: usize,
    pub ell: usize,
    /// `M = stab(Π^{v−1}(A))`, a subgroup of `N`.
    pub m_subgroup: ElemSet,
    /// `I_M = {i : A_i ⊆ M}`.
    pub i_m: Vec<usize>,
    /// One entry per coset of `M` in `N`; `M` itself comes first.
    pub cosets: Vec<CosetIncidence>,
    /// Number of cosets `Q` with `|V_Q| ≥ v`.
    pub mu: usize,
    /// The unique such coset when `mu = 1`.
    pub r: Option<ElemSet>,
    pub pi_size: usize,
    pub case: MuCase,
}

impl SetSequenceAnalysis {
    /// The lower bound on `|Π^{v−1}(A)|` for this case.
    pub fn bound(&self) -> i64 {
        let (m, v, t, l, im) =
            (self.m_subgroup.len() as i64, self.v as i64, self.t as i64, self.ell as i64, self.i_m.len() as i64);
        match self.case {
            MuCase::Mu0 => m * (2 - v + l * t - (t - 1) * im),
            MuCase::MuAtLeast2 => v * m,
            MuCase::Mu1RIsM => m * (1 + t * (l - im)),
            MuCase::Mu1RNotM => m * (1 + (t - 1) * l - (t - 2) * im),
        }
    }

    fn v_m(&self) -> &[usize] {
        &self.cosets[0].v_q
    }
}

/// Whether `a` is `{1}` or a `t`-element subset of one conjugation orbit.
fn is_orbit_truncation(group: &Group, n: ElemSet, a: ElemSet, t: usize) -> bool {
    let one = ElemSet::singleton(Element::IDENTITY);
    if a == one {
        return true;
    }
    let Some(u) = a.first() else { return false };
    if !a.is_subset(n) || a.len() != t {
        return false;
    }
    let orbit: ElemSet = group.r_orbit(u).unwrap_or_default().into_iter().collect();
    a.is_subset(orbit)
}

pub fn analyze_setseq(group: &Group, sets: &[ElemSet], t: usize, v: usize) -> Result<SetSequenceAnalysis, LabError> {
    let spec = group.metacyclic_spec().ok_or_else(|| LabError::NotMetacyclic(group.name().to_string()))?;
    let ell = sets.len();
    if !(1..=spec.p as usize).contains(&t) {
        return Err(LabError::Precondition(format!("orbit size t = {t} outside [1, {}]", spec.p)));
    }
    if !(2..=ell + 1).contains(&v) {
        return Err(LabError::Precondition(format!("threshold v = {v} outside [2, {}]", ell + 1)));
    }
    let n = group.normal_subgroup().unwrap();
    if let Some(index) = sets.iter().position(|&a| !is_orbit_truncation(group, n, a, t)) {
        return Err(LabError::MalformedOrbitFamily { index, t });
    }
    let pi = products::setseq_products(group, sets, v - 1)?;
    let m_subgroup = group.stabilizer(pi, n)?;
    let i_m: Vec<usize> = (0..ell).filter(|&i| sets[i].is_subset(m_subgroup)).collect();
    let cosets: Vec<CosetIncidence> = group
        .left_cosets(m_subgroup, n)
        .into_iter()
        .map(|q| CosetIncidence { coset: q, v_q: (0..ell).filter(|&i| !(sets[i] & q).is_empty()).collect() })
        .collect();
    let big: Vec<ElemSet> = cosets.iter().filter(|c| c.v_q.len() >= v).map(|c| c.coset).collect();
    let mu = big.len();
    let r = (mu == 1).then(|| big[0]);
    let case = match (mu, r) {
        (0, _) => MuCase::Mu0,
        (1, Some(q)) if q == m_subgroup => MuCase::Mu1RIsM,
        (1, _) => MuCase::Mu1RNotM,
        _ => MuCase::MuAtLeast2,
    };
    Ok(SetSequenceAnalysis { v, t, ell, m_subgroup, i_m, cosets, mu, r, pi_size: pi.len(), case })
}

/// The structural facts about `V_Q` and the lower bound for the case.
/// `p` is the size of every nontrivial conjugation orbit.
pub fn analysis_holds(group: &Group, sets: &[ElemSet], a: &SetSequenceAnalysis, p: usize) -> bool {
    let m = a.m_subgroup;
    let v_m_is_i_m = a.v_m() == a.i_m.as_slice();
    let disjoint = a.cosets[1..].iter().all(|c| c.v_q.iter().all(|i| !a.i_m.contains(i)));
    let spread = a.cosets[1..].iter().all(|c| {
        c.v_q.iter().all(|&i| {
            let hit: ElemSet = sets[i].iter().map(|u| group.left_translate(u, m).first().unwrap()).collect();
            sets[i].len() == a.t && hit.len() == a.t
        })
    });
    let r_is_m = !(a.t == p && a.mu == 1) || a.r == Some(m);
    v_m_is_i_m && disjoint && spread && r_is_m && a.pi_size as i64 >= a.bound()
}

/// Every orbit truncation of size `t`, plus `{1}`.
fn truncations(group: &Group, t: usize) -> Vec<ElemSet> {
    let n = group.normal_subgroup().unwrap();
    let mut orbits: Vec<ElemSet> =
        n.iter().map(|u| group.r_orbit(u).unwrap().into_iter().collect::<ElemSet>()).collect();
    orbits.sort_by_key(|o| o.0);
    orbits.dedup();
    let mut out = Vec::new();
    for o in orbits {
        if o.contains_identity() {
            out.push(o);
            continue;
        }
        let elems = o.to_vec();
        for mask in 1u64..(1 << elems.len()) {
            if mask.count_ones() as usize == t {
                out.push((0..elems.len()).filter(|i| mask >> i & 1 == 1).map(|i| elems[i]).collect());
            }
        }
    }
    out
}

const MAX_EXHAUSTIVE_LEN: usize = 5;
const MAX_SAMPLED_LEN: usize = 8;

#[derive(Clone, Debug, Serialize)]
struct Instance {
    t: usize,
    v: usize,
    sets: Vec<ElemSet>,
}

pub fn check_mu_bounds(group: &Group, cfg: &LabConfig) -> Result<CheckOutcome, LabError> {
    let spec = group.metacyclic_spec().ok_or_else(|| LabError::NotMetacyclic(group.name().to_string()))?;
    let p = spec.p as usize;
    let cands: Vec<Vec<ElemSet>> = (1..=p).map(|t| truncations(group, t)).collect();
    let fits = cands.iter().all(|c| c.len() <= 64);
    let space = if fits {
        cands
            .iter()
            .flat_map(|c| (1..=MAX_EXHAUSTIVE_LEN).map(move |l| multiset_count(c.len(), l) * l as u128))
            .sum()
    } else {
        u128::MAX
    };
    let mut out = CheckOutcome::new("mu-bounds", group.name());
    let mut cases: BTreeMap<MuCase, u64> = BTreeMap::new();
    drive(
        &mut out,
        cfg,
        space,
        |f| {
            for (ti, c) in cands.iter().enumerate() {
                let idx: Vec<Element> = (0..c.len()).map(Element::new).collect();
                for l in 1..=MAX_EXHAUSTIVE_LEN {
                    let mut go = true;
                    for_each_multiset(&idx, l, &mut |pick| {
                        let sets: Vec<ElemSet> = pick.iter().map(|e| c[e.index()]).collect();
                        for v in 2..=l + 1 {
                            go = f(Instance { t: ti + 1, v, sets: sets.clone() });
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
            }
        },
        |rng| {
            let t = rng.gen_range(1..=p);
            let l = rng.gen_range(1..=MAX_SAMPLED_LEN);
            let sets: Vec<ElemSet> = (0..l).map(|_| *cands[t - 1].choose(rng).unwrap()).collect();
            Instance { t, v: rng.gen_range(2..=l + 1), sets }
        },
        |inst| {
            let a = analyze_setseq(group, &inst.sets, inst.t, inst.v)?;
            *cases.entry(a.case).or_default() += 1;
            let again = analyze_setseq(group, &inst.sets, inst.t, inst.v)?;
            Ok(a == again && analysis_holds(group, &inst.sets, &a, p))
        },
    )?;
    out.observe("cases", cases.into_iter().map(|(k, v)| (serde_json::to_value(k).unwrap().as_str().unwrap().to_string(), v)).collect::<BTreeMap<_, _>>());
    Ok(out)
}
