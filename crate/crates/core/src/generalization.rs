//! Interdigitation generalizations and specializations, LGGs and k-covers.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::formula::{AmaFormula, KBound, State, Timeline};
use crate::subsumption::{enumerate_interdigitations, ma_subsumes, Interdigitations};

/// Which end of the subsumption order a [`TimelineSet`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retain {
    /// Drop any timeline subsumed by another member.
    MostGeneral,
    /// Drop any timeline that subsumes another member.
    MostSpecific,
}

/// An antichain of timelines under MA subsumption.
///
/// Among equivalent timelines the one with the least printed form is kept,
/// so the final contents do not depend on insertion order.
#[derive(Clone, Debug)]
pub struct TimelineSet {
    retain: Retain,
    members: Vec<(String, Timeline)>,
}

impl TimelineSet {
    pub fn new(retain: Retain) -> Self {
        TimelineSet {
            retain,
            members: Vec::new(),
        }
    }

    /// `a` is dominated by `b` when `b` makes `a` redundant.
    fn dominated(&self, a: &Timeline, b: &Timeline) -> bool {
        match self.retain {
            Retain::MostGeneral => ma_subsumes(a, b),
            Retain::MostSpecific => ma_subsumes(b, a),
        }
    }

    /// Inserts `t` unless an existing member dominates it, evicting members it
    /// dominates. Returns whether `t` was kept.
    pub fn insert(&mut self, t: Timeline) -> bool {
        let key = t.to_string();
        let rejected = self.members.iter().any(|(k, m)| {
            *k == key || (self.dominated(&t, m) && !(self.dominated(m, &t) && key < *k))
        });
        if rejected {
            return false;
        }
        let retain = self.retain;
        self.members.retain(|(_, m)| {
            !match retain {
                Retain::MostGeneral => ma_subsumes(m, &t),
                Retain::MostSpecific => ma_subsumes(&t, m),
            }
        });
        self.members.push((key, t));
        true
    }

    pub fn extend(&mut self, ts: impl IntoIterator<Item = Timeline>) {
        for t in ts {
            self.insert(t);
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Timeline> {
        self.members.iter().map(|(_, t)| t)
    }

    pub fn into_timelines(self) -> Vec<Timeline> {
        self.members.into_iter().map(|(_, t)| t).collect()
    }

    /// The conjunction of the members; `None` when empty.
    pub fn into_formula(self) -> Option<AmaFormula> {
        if self.members.is_empty() {
            None
        } else {
            Some(AmaFormula::from_nonempty(self.into_timelines()))
        }
    }
}

/// Calls `visit` with the tuple-wise merge of every interdigitation of `ts`.
fn for_each_merge(
    ts: &[Timeline],
    merge: fn(&State, &State) -> State,
    visit: &mut dyn FnMut(Vec<State>),
) {
    fn tuple_state(ts: &[Timeline], pos: &[usize], merge: fn(&State, &State) -> State) -> State {
        let mut s = ts[0].states()[pos[0]].clone();
        for (t, &p) in ts.iter().zip(pos).skip(1) {
            s = merge(&s, &t.states()[p]);
        }
        s
    }

    fn go(
        ts: &[Timeline],
        pos: &mut Vec<usize>,
        acc: &mut Vec<State>,
        merge: fn(&State, &State) -> State,
        visit: &mut dyn FnMut(Vec<State>),
    ) {
        let avail: u64 = pos
            .iter()
            .zip(ts)
            .enumerate()
            .filter(|(_, (&p, t))| p + 1 < t.len())
            .fold(0, |a, (i, _)| a | 1 << i);
        if avail == 0 {
            visit(acc.clone());
            return;
        }
        let mut mask = avail & avail.wrapping_neg();
        while mask != 0 {
            for i in 0..ts.len() {
                if mask >> i & 1 == 1 {
                    pos[i] += 1;
                }
            }
            acc.push(tuple_state(ts, pos, merge));
            go(ts, pos, acc, merge, visit);
            acc.pop();
            for i in 0..ts.len() {
                if mask >> i & 1 == 1 {
                    pos[i] -= 1;
                }
            }
            mask = mask.wrapping_sub(avail) & avail;
        }
    }

    assert!(!ts.is_empty() && ts.len() <= 64);
    let mut pos = vec![0; ts.len()];
    let mut acc = vec![tuple_state(ts, &pos, merge)];
    go(ts, &mut pos, &mut acc, merge, visit);
}

/// The interdigitation generalizations of `ts`, without structural duplicates,
/// in enumeration order.
pub fn ig(ts: &[Timeline]) -> Vec<Timeline> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for_each_merge(ts, State::intersection, &mut |states| {
        let t = Timeline::from_nonempty(states);
        if seen.insert(t.clone()) {
            out.push(t);
        }
    });
    out
}

/// Lazy stream of the interdigitation specializations of a timeline set.
pub struct IsStream {
    timelines: Vec<Timeline>,
    inner: Interdigitations,
    seen: HashSet<Timeline>,
}

impl Iterator for IsStream {
    type Item = Timeline;

    fn next(&mut self) -> Option<Timeline> {
        for i in self.inner.by_ref() {
            let states = i
                .tuples()
                .iter()
                .map(|tuple| {
                    tuple
                        .iter()
                        .enumerate()
                        .fold(State::top(), |s, (k, &p)| s.union(&self.timelines[k].states()[p]))
                })
                .collect();
            let t = Timeline::from_nonempty(states).normalize();
            if self.seen.insert(t.clone()) {
                return Some(t);
            }
        }
        None
    }
}

/// The interdigitation specializations of `ts`, normalized and streamed
/// without duplicates.
pub fn is_(ts: &[Timeline]) -> IsStream {
    IsStream {
        timelines: ts.to_vec(),
        inner: enumerate_interdigitations(ts),
        seen: HashSet::new(),
    }
}

/// The semantic LGG of a set of AMA formulas.
pub fn semantic_lgg(fs: &[AmaFormula]) -> AmaFormula {
    assert!(!fs.is_empty(), "semantic LGG of an empty set");
    let mut s = TimelineSet::new(Retain::MostGeneral);
    for f in fs {
        s.extend(is_(f.timelines()));
    }
    let s = s.into_timelines();
    semantic_lgg_of_timelines(&s)
}

/// Pruned IG of a set of MA timelines.
fn semantic_lgg_of_timelines(ts: &[Timeline]) -> AmaFormula {
    let mut g = TimelineSet::new(Retain::MostSpecific);
    g.extend(ig(ts));
    g.into_formula().expect("IG is never empty")
}

/// The syntactic LGG of a set of AMA formulas.
pub fn syntactic_lgg(fs: &[AmaFormula]) -> AmaFormula {
    assert!(!fs.is_empty(), "syntactic LGG of an empty set");
    let tuples = cartesian(fs);
    let parts: Vec<AmaFormula> = tuples
        .par_iter()
        .map(|tuple| {
            // A timeline's IS is itself, so the S stage reduces to pruning.
            let mut s = TimelineSet::new(Retain::MostGeneral);
            s.extend(tuple.iter().map(|t| (*t).clone()));
            semantic_lgg_of_timelines(&s.into_timelines())
        })
        .collect();
    let mut g = TimelineSet::new(Retain::MostSpecific);
    for p in parts {
        g.extend(p.timelines().iter().cloned());
    }
    g.into_formula().expect("product of non-empty formulas")
}

fn cartesian(fs: &[AmaFormula]) -> Vec<Vec<&Timeline>> {
    let mut out: Vec<Vec<&Timeline>> = vec![Vec::new()];
    for f in fs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                f.timelines().iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    out
}

/// Syntactic LGG of two formulas, skipping timelines that already subsume
/// a timeline of the other side.
pub fn pairwise_lgg(psi1: &AmaFormula, psi2: &AmaFormula) -> AmaFormula {
    let subsumer = |t: &Timeline, other: &AmaFormula| other.timelines().iter().any(|o| ma_subsumes(o, t));
    let (s1, rest1): (Vec<Timeline>, Vec<Timeline>) =
        psi1.timelines().iter().cloned().partition(|t| subsumer(t, psi2));
    let (s2, rest2): (Vec<Timeline>, Vec<Timeline>) =
        psi2.timelines().iter().cloned().partition(|t| subsumer(t, psi1));

    let core: Vec<Timeline> = if rest1.is_empty() || rest2.is_empty() {
        Vec::new()
    } else {
        syntactic_lgg(&[
            AmaFormula::from_nonempty(rest1),
            AmaFormula::from_nonempty(rest2),
        ])
        .timelines()
        .to_vec()
    };
    let kept = s1
        .into_iter()
        .chain(s2)
        .filter(|s| !core.iter().any(|c| ma_subsumes(c, s)));

    let mut g = TimelineSet::new(Retain::MostSpecific);
    g.extend(core.iter().cloned().chain(kept));
    g.into_formula()
        .expect("a pair of formulas always has a generalization")
}

/// Left fold of [`pairwise_lgg`].
pub fn incremental_lgg(fs: &[AmaFormula]) -> AmaFormula {
    let (first, rest) = fs.split_first().expect("LGG of an empty set");
    rest.iter().fold(first.clone(), |acc, f| pairwise_lgg(&acc, f))
}

/// All partitions of `states` into `min(len, k)` consecutive blocks, block
/// sizes chosen in ascending order, each block intersected to one state.
fn k_partitions(k: usize, states: &[State], prefix: &mut Vec<State>, out: &mut Vec<Timeline>) {
    let j = states.len();
    if j <= k {
        let mut t = prefix.clone();
        t.extend_from_slice(states);
        out.push(Timeline::from_nonempty(t));
        return;
    }
    if k == 1 {
        let block = states[1..]
            .iter()
            .fold(states[0].clone(), |acc, s| acc.intersection(s));
        let mut t = prefix.clone();
        t.push(block);
        out.push(Timeline::from_nonempty(t));
        return;
    }
    let mut block = states[0].clone();
    for l in 1..=j - k + 1 {
        if l > 1 {
            block = block.intersection(&states[l - 1]);
        }
        prefix.push(block.clone());
        k_partitions(k - 1, &states[l..], prefix, out);
        prefix.pop();
    }
}

/// The k-cover: the least general k-AMA formula syntactically subsuming `f`.
pub fn k_cover(k: KBound, f: &AmaFormula) -> AmaFormula {
    let mut g = TimelineSet::new(Retain::MostSpecific);
    let mut seen = HashSet::new();
    for t in f.timelines() {
        let mut parts = Vec::new();
        k_partitions(k.get(), t.states(), &mut Vec::new(), &mut parts);
        for p in parts {
            if seen.insert(p.clone()) {
                g.insert(p);
            }
        }
    }
    g.into_formula().expect("every timeline has a partition")
}
