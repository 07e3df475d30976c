//! Object correspondences, propositionalization and lifting.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{AmaFormula, Atom, Term};
use crate::model::TemporalModel;

/// Default cap on the number of objects per model.
pub const DEFAULT_MAX_OBJECTS: usize = 6;

/// Name of the canonical constant for role `i`.
pub fn role_constant(i: usize) -> String {
    format!("r{i}")
}

/// A bijection from a model's objects to role indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectCorrespondence {
    roles: BTreeMap<String, usize>,
}

impl ObjectCorrespondence {
    /// Fails unless `roles` maps its objects onto `0..len` bijectively.
    pub fn new(roles: BTreeMap<String, usize>) -> Result<Self> {
        let used: BTreeSet<usize> = roles.values().copied().collect();
        if used.len() != roles.len() || used.iter().any(|&r| r >= roles.len()) {
            return Err(Error::Correspondence(format!(
                "roles {roles:?} are not a bijection onto 0..{}",
                roles.len()
            )));
        }
        Ok(ObjectCorrespondence { roles })
    }

    pub fn role_of(&self, object: &str) -> Option<usize> {
        self.roles.get(object).copied()
    }

    /// Objects ordered by role index.
    pub fn objects_by_role(&self) -> Vec<String> {
        let mut v: Vec<(&usize, &String)> = self.roles.iter().map(|(o, r)| (r, o)).collect();
        v.sort();
        v.into_iter().map(|(_, o)| o.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.roles.iter().map(|(o, &r)| (o.as_str(), r))
    }
}

/// Atoms gained and lost between a model's first and last points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AddDeleteSignature {
    pub add: BTreeSet<Atom>,
    pub delete: BTreeSet<Atom>,
}

impl AddDeleteSignature {
    pub fn of(m: &TemporalModel) -> Self {
        let iv = m.interval();
        let first = m.atoms_at(iv.lo);
        let last = m.atoms_at(iv.hi);
        AddDeleteSignature {
            add: last.difference(&first).cloned().collect(),
            delete: first.difference(&last).cloned().collect(),
        }
    }
}

/// `|ADD₁ ∩ ADD₂| + |DEL₁ ∩ DEL₂|` for two propositionalized models.
pub fn correspondence_score(m1: &TemporalModel, m2: &TemporalModel) -> usize {
    let (a, b) = (AddDeleteSignature::of(m1), AddDeleteSignature::of(m2));
    a.add.intersection(&b.add).count() + a.delete.intersection(&b.delete).count()
}

/// Renames every object of `m` to its role constant.
pub fn propositionalize(m: &TemporalModel, c: &ObjectCorrespondence) -> Result<TemporalModel> {
    if let Some(missing) = m.objects().into_iter().find(|o| c.role_of(o).is_none()) {
        return Err(Error::Correspondence(format!(
            "object `{missing}` of model `{}` has no role",
            m.name()
        )));
    }
    Ok(m.map_atoms(|a| {
        a.map_terms(|t| Term::constant(&role_constant(c.role_of(t.name()).unwrap())))
    }))
}

/// Replaces each constant with a fresh variable `?x0, ?x1, ...` in order of
/// first appearance, returning the variable assigned to each constant.
pub fn lift_with_map(f: &AmaFormula) -> Result<(AmaFormula, Vec<(String, String)>)> {
    if f.literals().any(|l| !l.atom.is_ground()) {
        return Err(Error::AlreadyLifted(f.to_string()));
    }
    let mut order: Vec<String> = Vec::new();
    for l in f.literals() {
        for t in l.atom.args() {
            if !order.iter().any(|c| c == t.name()) {
                order.push(t.name().to_string());
            }
        }
    }
    let var = |c: &str| format!("x{}", order.iter().position(|o| o == c).unwrap());
    let lifted = f.map_terms(|t| Term::variable(&var(t.name())));
    let map = order.iter().map(|c| (var(c), c.clone())).collect();
    Ok((lifted, map))
}

/// Replaces each constant with a distinct variable.
pub fn lift(f: &AmaFormula) -> Result<AmaFormula> {
    lift_with_map(f).map(|(l, _)| l)
}

/// Rearranges `p` into the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Signature atoms in role space: predicate plus role-index arguments.
type RoleAtom = (String, Vec<usize>);

struct Candidates {
    objects: Vec<String>,
    /// Role assignments (indexed like `objects`) in lexicographic order.
    perms: Vec<Vec<usize>>,
    full: bool,
    add: Vec<(String, Vec<usize>)>,
    delete: Vec<(String, Vec<usize>)>,
}

impl Candidates {
    fn signature(&self, perm: &[usize]) -> (Vec<RoleAtom>, Vec<RoleAtom>) {
        let map = |atoms: &[(String, Vec<usize>)]| {
            let mut v: Vec<RoleAtom> = atoms
                .iter()
                .map(|(p, args)| (p.clone(), args.iter().map(|&k| perm[k]).collect()))
                .collect();
            v.sort();
            v
        };
        (map(&self.add), map(&self.delete))
    }
}

fn sorted_overlap(a: &[RoleAtom], b: &[RoleAtom]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn candidates(m: &TemporalModel, b: usize) -> Result<Candidates> {
    let objects: Vec<String> = m.objects().into_iter().collect();
    let index = |o: &str| objects.iter().position(|x| x == o).unwrap();
    for (o, &r) in m.roles() {
        if r >= b {
            return Err(Error::Correspondence(format!(
                "model `{}` assigns role {r} to `{o}` but has only {b} objects",
                m.name()
            )));
        }
    }
    let fixed: Vec<Option<usize>> = objects.iter().map(|o| m.roles().get(o).copied()).collect();
    let mut perm: Vec<usize> = (0..b).collect();
    let mut perms = Vec::new();
    loop {
        if fixed.iter().zip(&perm).all(|(f, p)| f.is_none_or(|f| f == *p)) {
            perms.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    if perms.is_empty() {
        return Err(Error::Correspondence(format!(
            "partial roles of model `{}` admit no bijection",
            m.name()
        )));
    }
    let sig = AddDeleteSignature::of(m);
    let encode = |atoms: &BTreeSet<Atom>| {
        atoms
            .iter()
            .map(|a| {
                (
                    a.predicate().to_string(),
                    a.args().iter().map(|t| index(t.name())).collect(),
                )
            })
            .collect()
    };
    Ok(Candidates {
        full: m.roles().is_empty(),
        add: encode(&sig.add),
        delete: encode(&sig.delete),
        objects,
        perms,
    })
}

/// Greedy search for object correspondences across training models.
///
/// The best-scoring pair seeds the chosen set; remaining models join one at
/// a time, each with the correspondence of highest average score against the
/// chosen set. Ties go to the lexicographically least choice. `role` lines in
/// the models restrict the search.
pub fn find_correspondences(
    models: &[TemporalModel],
    max_objects: usize,
) -> Result<Vec<ObjectCorrespondence>> {
    let Some(first) = models.first() else {
        return Err(Error::Correspondence("no models".into()));
    };
    let b = first.objects().len();
    for m in models {
        let n = m.objects().len();
        if n != b {
            return Err(Error::Correspondence(format!(
                "model `{}` has {n} objects but `{}` has {b}",
                m.name(),
                first.name()
            )));
        }
    }
    if b > max_objects {
        return Err(Error::Correspondence(format!(
            "{b} objects per model exceeds the limit of {max_objects}"
        )));
    }
    let cands: Vec<Candidates> = models.iter().map(|m| candidates(m, b)).collect::<Result<_>>()?;
    let sigs: Vec<Vec<(Vec<RoleAtom>, Vec<RoleAtom>)>> = cands
        .iter()
        .map(|c| c.perms.iter().map(|p| c.signature(p)).collect())
        .collect();
    let score = |i: usize, ci: usize, j: usize, cj: usize| {
        let (a, b) = (&sigs[i][ci], &sigs[j][cj]);
        sorted_overlap(&a.0, &b.0) + sorted_overlap(&a.1, &b.1)
    };

    let mut chosen: Vec<Option<usize>> = vec![None; models.len()];
    if models.len() == 1 || cands.iter().all(|c| c.perms.len() == 1) {
        chosen.iter_mut().for_each(|c| *c = Some(0));
    } else {
        // Seed pair. Scores are invariant under a common role permutation,
        // so when `j` is unconstrained `i` may be fixed to its least choice.
        let mut best: Option<(usize, (usize, usize, usize, usize))> = None;
        for i in 0..models.len() {
            for j in i + 1..models.len() {
                let ci_range = if cands[j].full { 0..1 } else { 0..cands[i].perms.len() };
                for ci in ci_range {
                    for cj in 0..cands[j].perms.len() {
                        let s = score(i, ci, j, cj);
                        if best.is_none_or(|(bs, _)| s > bs) {
                            best = Some((s, (i, ci, j, cj)));
                        }
                    }
                }
            }
        }
        let (_, (i, ci, j, cj)) = best.expect("at least two models");
        chosen[i] = Some(ci);
        chosen[j] = Some(cj);

        let mut cache: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
        while chosen.iter().any(Option::is_none) {
            let placed: Vec<(usize, usize)> = chosen
                .iter()
                .enumerate()
                .filter_map(|(k, c)| c.map(|c| (k, c)))
                .collect();
            let mut best: Option<(usize, (usize, usize))> = None;
            for u in (0..models.len()).filter(|&u| chosen[u].is_none()) {
                for cu in 0..cands[u].perms.len() {
                    // Averages share the denominator |P|, so sums compare alike.
                    let total: usize = placed
                        .iter()
                        .map(|&(p, cp)| *cache.entry((u, cu, p, cp)).or_insert_with(|| score(u, cu, p, cp)))
                        .sum();
                    if best.is_none_or(|(bs, _)| total > bs) {
                        best = Some((total, (u, cu)));
                    }
                }
            }
            let (_, (u, cu)) = best.unwrap();
            chosen[u] = Some(cu);
        }
    }

    Ok(chosen
        .into_iter()
        .zip(&cands)
        .map(|(c, cand)| {
            let perm = &cand.perms[c.unwrap()];
            ObjectCorrespondence {
                roles: cand.objects.iter().cloned().zip(perm.iter().copied()).collect(),
            }
        })
        .collect())
}
