//! Discrete temporal models, the model file format, LGCF and satisfaction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::parse::Cursor;
use crate::formula::{AmaFormula, Atom, Literal, State, Term, Timeline};

/// A closed integer interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo},{hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, t: i64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A total truth assignment over the integer points of an interval.
///
/// Atoms absent from the assignment are false everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalModel {
    name: String,
    interval: Interval,
    truth: BTreeMap<Atom, Vec<bool>>,
    declared: BTreeSet<Atom>,
    roles: BTreeMap<String, usize>,
}

impl TemporalModel {
    /// Builds a model from facts; overlapping facts for one atom union.
    pub fn new(
        name: &str,
        interval: Interval,
        facts: impl IntoIterator<Item = (Atom, Interval)>,
    ) -> Result<Self> {
        let mut m = TemporalModel {
            name: name.to_string(),
            interval,
            truth: BTreeMap::new(),
            declared: BTreeSet::new(),
            roles: BTreeMap::new(),
        };
        for (atom, iv) in facts {
            m.add_fact(atom, iv)?;
        }
        Ok(m)
    }

    /// Builds a model from per-point atom sets starting at `lo`.
    pub fn from_points(name: &str, lo: i64, points: &[BTreeSet<Atom>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::model(name, "model has no time points"));
        }
        let interval = Interval::new(lo, lo + points.len() as i64 - 1)?;
        let mut m = TemporalModel::new(name, interval, [])?;
        for (i, atoms) in points.iter().enumerate() {
            for a in atoms {
                m.check_ground(a)?;
                m.truth
                    .entry(a.clone())
                    .or_insert_with(|| vec![false; points.len()])[i] = true;
            }
        }
        Ok(m)
    }

    fn check_ground(&self, atom: &Atom) -> Result<()> {
        if atom.is_ground() {
            Ok(())
        } else {
            Err(Error::model(&self.name, format!("atom `{atom}` is not ground")))
        }
    }

    fn add_fact(&mut self, atom: Atom, iv: Interval) -> Result<()> {
        self.check_ground(&atom)?;
        if iv.lo > iv.hi {
            return Err(Error::model(&self.name, format!("fact `{atom}@{iv}` has an empty interval")));
        }
        if !self.interval.contains_interval(iv) {
            return Err(Error::model(
                &self.name,
                format!("fact `{atom}@{iv}` lies outside the model interval {}", self.interval),
            ));
        }
        let len = self.interval.len();
        let row = self.truth.entry(atom).or_insert_with(|| vec![false; len]);
        let lo = (iv.lo - self.interval.lo) as usize;
        let hi = (iv.hi - self.interval.lo) as usize;
        row[lo..=hi].iter_mut().for_each(|b| *b = true);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.interval.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Truth of `atom` at absolute time `t`.
    pub fn holds(&self, atom: &Atom, t: i64) -> bool {
        self.interval.contains(t)
            && self
                .truth
                .get(atom)
                .is_some_and(|row| row[(t - self.interval.lo) as usize])
    }

    /// Truth row of `atom`, indexed from the interval's start.
    pub fn row(&self, atom: &Atom) -> Option<&[bool]> {
        self.truth.get(atom).map(Vec::as_slice)
    }

    /// Atoms true at absolute time `t`.
    pub fn atoms_at(&self, t: i64) -> BTreeSet<Atom> {
        let i = (t - self.interval.lo) as usize;
        self.truth
            .iter()
            .filter(|(_, row)| row[i])
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Atoms true at one or more points.
    pub fn true_atoms(&self) -> BTreeSet<Atom> {
        self.truth
            .iter()
            .filter(|(_, row)| row.iter().any(|&b| b))
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Atoms declared by a `vocab` line, whether or not they are ever true.
    pub fn declared_atoms(&self) -> &BTreeSet<Atom> {
        &self.declared
    }

    pub fn declare(&mut self, atoms: impl IntoIterator<Item = Atom>) -> Result<()> {
        for a in atoms {
            self.check_ground(&a)?;
            self.declared.insert(a);
        }
        Ok(())
    }

    /// Constants appearing as atom arguments, in sorted order.
    pub fn objects(&self) -> BTreeSet<String> {
        self.truth
            .keys()
            .chain(&self.declared)
            .flat_map(|a| a.args().iter().map(|t| t.name().to_string()))
            .chain(self.roles.keys().cloned())
            .collect()
    }

    /// Partial object-to-role assignment from `role` lines.
    pub fn roles(&self) -> &BTreeMap<String, usize> {
        &self.roles
    }

    pub fn set_role(&mut self, object: &str, role: usize) -> Result<()> {
        if let Some((other, _)) = self.roles.iter().find(|(o, &r)| r == role && *o != object) {
            return Err(Error::model(
                &self.name,
                format!("objects `{other}` and `{object}` both claim role {role}"),
            ));
        }
        self.roles.insert(object.to_string(), role);
        Ok(())
    }

    pub fn clear_roles(&mut self) {
        self.roles.clear();
    }

    pub fn rename(&mut self, name: &str) {
        self.name = name.to_string();
    }

    /// Rewrites every atom; rows of atoms that collide are OR-ed together.
    pub fn map_atoms(&self, mut f: impl FnMut(&Atom) -> Atom) -> TemporalModel {
        let mut truth: BTreeMap<Atom, Vec<bool>> = BTreeMap::new();
        for (a, row) in &self.truth {
            let entry = truth.entry(f(a)).or_insert_with(|| vec![false; row.len()]);
            for (dst, &src) in entry.iter_mut().zip(row) {
                *dst |= src;
            }
        }
        TemporalModel {
            name: self.name.clone(),
            interval: self.interval,
            truth,
            declared: self.declared.iter().map(&mut f).collect(),
            roles: BTreeMap::new(),
        }
    }

    /// Replaces the truth row of `atom`; rows must match the model length.
    pub(crate) fn set_row(&mut self, atom: Atom, row: Vec<bool>) {
        debug_assert_eq!(row.len(), self.len());
        self.truth.insert(atom, row);
    }

    /// Repeats the point at absolute time `t`, shifting later points right.
    pub fn stretch_at(&self, t: i64) -> TemporalModel {
        let i = (t - self.interval.lo) as usize;
        let mut out = self.clone();
        out.interval.hi += 1;
        for row in out.truth.values_mut() {
            let v = row[i];
            row.insert(i, v);
        }
        out
    }

    fn state_at_index(&self, i: usize) -> State {
        State::new(
            self.truth
                .iter()
                .filter(|(_, row)| row[i])
                .map(|(a, _)| Literal::pos(a.clone())),
        )
    }

    /// Point truth of a state: positives true and `~` atoms false at index `i`.
    #[cfg(test)]
    fn state_holds_index(&self, s: &State, i: usize) -> bool {
        s.literals().iter().all(|l| {
            let v = self.truth.get(&l.atom).is_some_and(|row| row[i]);
            if l.is_positive() { v } else { !v }
        })
    }

    /// Table `hold[i][t]` of whether state `i` of `t` holds at point index `t`.
    fn hold_table(&self, tl: &Timeline) -> Vec<Vec<bool>> {
        let n = self.len();
        tl.states()
            .iter()
            .map(|s| {
                if s.is_contradictory() {
                    return vec![false; n];
                }
                let rows: Vec<(Option<&Vec<bool>>, bool)> = s
                    .literals()
                    .iter()
                    .map(|l| (self.truth.get(&l.atom), l.is_positive()))
                    .collect();
                (0..n)
                    .map(|t| {
                        rows.iter().all(|(row, pos)| {
                            let v = row.is_some_and(|r| r[t]);
                            v == *pos
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Ends `t` such that the timeline with hold table `hold` is satisfied on
/// `[start, t]` (point indices).
fn reachable_ends(hold: &[Vec<bool>], start: usize) -> Vec<bool> {
    let len = hold[0].len();
    let mut prev = vec![false; len];
    let mut cur = vec![false; len];
    for (i, row) in hold.iter().enumerate() {
        for t in start..len {
            let begins = if i == 0 {
                t == start
            } else {
                prev[t] || (t > start && prev[t - 1])
            };
            cur[t] = row[t] && (begins || (t > start && cur[t - 1]));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

fn require_ground(f: &AmaFormula) -> Result<()> {
    if f.is_ground() {
        Ok(())
    } else {
        Err(Error::NotGround(f.to_string()))
    }
}

/// The MA projection: one state per time point.
pub fn ma_projection(m: &TemporalModel) -> Timeline {
    Timeline::from_nonempty((0..m.len()).map(|i| m.state_at_index(i)).collect())
}

/// The least general covering formula of `m`: its normalized MA projection.
pub fn lgcf(m: &TemporalModel) -> Timeline {
    let mut states: Vec<State> = Vec::new();
    for i in 0..m.len() {
        let s = m.state_at_index(i);
        if states.last() != Some(&s) {
            states.push(s);
        }
    }
    Timeline::from_nonempty(states)
}

/// Whether `m` satisfies `f` over its full interval.
pub fn satisfies(m: &TemporalModel, f: &AmaFormula) -> Result<bool> {
    satisfies_on(m, f, m.interval())
}

/// Whether `m` restricted to `iv` satisfies `f`.
pub fn satisfies_on(m: &TemporalModel, f: &AmaFormula, iv: Interval) -> Result<bool> {
    require_ground(f)?;
    if !m.interval().contains_interval(iv) {
        return Err(Error::model(
            m.name(),
            format!("interval {iv} lies outside {}", m.interval()),
        ));
    }
    let start = (iv.lo - m.interval().lo) as usize;
    let end = (iv.hi - m.interval().lo) as usize;
    Ok(f
        .timelines()
        .iter()
        .all(|tl| reachable_ends(&m.hold_table(tl), start)[end]))
}

/// Whether a single timeline holds on `m`'s full interval.
pub fn timeline_satisfied(m: &TemporalModel, tl: &Timeline) -> bool {
    reachable_ends(&m.hold_table(tl), 0)[m.len() - 1]
}

/// All sub-intervals of `m` on which `f` holds, in `(lo, hi)` order.
pub fn scan_all(m: &TemporalModel, f: &AmaFormula) -> Result<Vec<Interval>> {
    require_ground(f)?;
    let tables: Vec<_> = f.timelines().iter().map(|t| m.hold_table(t)).collect();
    let lo = m.interval().lo;
    let mut out = Vec::new();
    for start in 0..m.len() {
        let mut ends = vec![true; m.len()];
        for table in &tables {
            let r = reachable_ends(table, start);
            ends.iter_mut().zip(r).for_each(|(e, x)| *e &= x);
        }
        for (t, ok) in ends.into_iter().enumerate() {
            if ok {
                out.push(Interval {
                    lo: lo + start as i64,
                    hi: lo + t as i64,
                });
            }
        }
    }
    Ok(out)
}

/// Maximal sub-intervals of `m` on which `f` holds.
pub fn scan_occurrences(m: &TemporalModel, f: &AmaFormula) -> Result<Vec<Interval>> {
    let all = scan_all(m, f)?;
    Ok(maximal(&all))
}

/// Drops every interval strictly contained in another.
pub fn maximal(intervals: &[Interval]) -> Vec<Interval> {
    let mut out: Vec<Interval> = intervals
        .iter()
        .filter(|a| {
            !intervals
                .iter()
                .any(|b| b != *a && b.contains_interval(**a))
        })
        .copied()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Parses every `model` block of a model file.
pub fn parse_models(text: &str) -> Result<Vec<TemporalModel>> {
    let mut models: Vec<TemporalModel> = Vec::new();
    let mut pending: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let col = line.len() - trimmed.len() + 1;
        let (keyword, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed.trim_end(), ""));
        let rest_col = col + keyword.len() + 1;
        let mut c = Cursor::new(rest, lineno, rest_col);

        match keyword {
            "model" => {
                if let Some(name) = pending.take() {
                    return Err(Error::model(&name, "missing `interval` line"));
                }
                let name = c.ident()?;
                c.finish()?;
                pending = Some(name);
            }
            "interval" => {
                let Some(name) = pending.take() else {
                    return Err(Error::syntax(lineno, col, "`interval` without a preceding `model` line"));
                };
                let lo = c.int()?;
                let hi = c.int()?;
                c.finish()?;
                if lo > hi {
                    return Err(Error::model(&name, format!("line {lineno}: empty interval [{lo},{hi}]")));
                }
                models.push(TemporalModel::new(&name, Interval { lo, hi }, [])?);
            }
            "fact" | "role" | "vocab" => {
                let Some(m) = models.last_mut().filter(|_| pending.is_none()) else {
                    return Err(Error::syntax(
                        lineno,
                        col,
                        format!("`{keyword}` before a complete model header"),
                    ));
                };
                match keyword {
                    "fact" => {
                        let atom = c.atom()?;
                        c.expect('@')?;
                        c.expect('[')?;
                        let lo = c.int()?;
                        c.expect(',')?;
                        let hi = c.int()?;
                        c.expect(']')?;
                        c.finish()?;
                        m.add_fact(atom, Interval { lo, hi }).map_err(|e| at_line(e, lineno))?;
                    }
                    "role" => {
                        let object = c.ident()?;
                        let role = c.int()?;
                        c.finish()?;
                        let role = usize::try_from(role)
                            .map_err(|_| Error::syntax(lineno, col, "role index must be non-negative"))?;
                        m.set_role(&object, role).map_err(|e| at_line(e, lineno))?;
                    }
                    _ => {
                        let mut atoms = Vec::new();
                        while !c.at_end() {
                            atoms.push(c.atom()?);
                        }
                        m.declare(atoms).map_err(|e| at_line(e, lineno))?;
                    }
                }
            }
            other => {
                return Err(Error::syntax(lineno, col, format!("unknown directive `{other}`")));
            }
        }
    }
    if let Some(name) = pending {
        return Err(Error::model(&name, "missing `interval` line"));
    }
    Ok(models)
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Model { model, message } => Error::Model {
            model,
            message: format!("line {line}: {message}"),
        },
        other => other,
    }
}

/// Reads a model file from disk.
pub fn load_models(path: impl AsRef<Path>) -> Result<Vec<TemporalModel>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_models(&text)
}

/// Prints models in the file format read by [`parse_models`].
pub fn write_models(models: &[TemporalModel]) -> String {
    let mut out = String::new();
    for (i, m) in models.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let iv = m.interval();
        let _ = writeln!(out, "model {}", m.name());
        let _ = writeln!(out, "interval {} {}", iv.lo, iv.hi);
        for (object, role) in &m.roles {
            let _ = writeln!(out, "role {object} {role}");
        }
        if !m.declared.is_empty() {
            let atoms: Vec<String> = m.declared.iter().map(Atom::to_string).collect();
            let _ = writeln!(out, "vocab {}", atoms.join(" "));
        }
        for (atom, row) in &m.truth {
            let mut t = 0;
            while t < row.len() {
                if row[t] {
                    let s = t;
                    while t + 1 < row.len() && row[t + 1] {
                        t += 1;
                    }
                    let _ = writeln!(
                        out,
                        "fact {atom}@[{},{}]",
                        iv.lo + s as i64,
                        iv.lo + t as i64
                    );
                }
                t += 1;
            }
        }
    }
    out
}

/// Substitutes constants in `f` by looking up each variable in `binding`.
pub fn ground(f: &AmaFormula, binding: &BTreeMap<String, String>) -> AmaFormula {
    f.map_terms(|t| match t {
        Term::Variable(v) => match binding.get(&**v) {
            Some(c) => Term::constant(c),
            None => t.clone(),
        },
        Term::Constant(_) => t.clone(),
    })
}
