//! Atoms, literals, states, MA timelines and AMA formulas.
//!
//! States are canonical sorted sets of literals, timelines are positional
//! (duplicate states are significant until [`Timeline::normalize`] is called)
//! and formulas are canonically ordered, duplicate-free sets of timelines.

pub(crate) mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{parse_atom, parse_formula, parse_timeline};

/// Identifiers starting with this prefix are reserved for generated atoms.
pub const RESERVED_PREFIX: &str = "__";

/// A constant or a variable argument of a relational atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(Arc<str>),
    Variable(Arc<str>),
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::Constant(Arc::from(name))
    }

    pub fn variable(name: &str) -> Self {
        Term::Variable(Arc::from(name))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(n) => f.write_str(n),
            Term::Variable(n) => write!(f, "?{n}"),
        }
    }
}

/// A primitive proposition, optionally applied to arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    predicate: Arc<str>,
    args: Arc<[Term]>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        assert!(!predicate.is_empty(), "atom predicate must be non-empty");
        Atom {
            predicate: Arc::from(predicate),
            args: Arc::from(args),
        }
    }

    pub fn prop(predicate: &str) -> Self {
        Atom::new(predicate, Vec::new())
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    /// Rebuilds the atom with every argument passed through `f`.
    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        if self.args.is_empty() {
            return self.clone();
        }
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(&mut f).collect(),
        }
    }

    pub(crate) fn with_predicate(&self, predicate: &str) -> Atom {
        Atom {
            predicate: Arc::from(predicate),
            args: self.args.clone(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_atom(s)
    }
}

/// `Positive` sorts before `NegatedDiamond`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    /// ¬◇p: the atom is false at every point of the interval.
    NegatedDiamond,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            polarity: Polarity::Positive,
        }
    }

    pub fn never(atom: Atom) -> Self {
        Literal {
            atom,
            polarity: Polarity::NegatedDiamond,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::NegatedDiamond {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A conjunction of literals held over an interval. The empty state is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    literals: Vec<Literal>,
}

impl State {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort_unstable();
        literals.dedup();
        State { literals }
    }

    /// The state `true`.
    pub fn top() -> Self {
        State::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        State::new(atoms.into_iter().map(Literal::pos))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.literals.binary_search(lit).is_ok()
    }

    /// Set containment over literals.
    pub fn is_subset_of(&self, other: &State) -> bool {
        if self.literals.len() > other.literals.len() {
            return false;
        }
        let mut rest = other.literals.iter();
        'outer: for lit in &self.literals {
            for candidate in rest.by_ref() {
                match candidate.cmp(lit) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn intersection(&self, other: &State) -> State {
        let mut out = Vec::with_capacity(self.literals.len().min(other.literals.len()));
        let (mut i, mut j) = (0, 0);
        while i < self.literals.len() && j < other.literals.len() {
            match self.literals[i].cmp(&other.literals[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.literals[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        State { literals: out }
    }

    pub fn union(&self, other: &State) -> State {
        let mut out = Vec::with_capacity(self.literals.len() + other.literals.len());
        let (mut i, mut j) = (0, 0);
        while i < self.literals.len() && j < other.literals.len() {
            match self.literals[i].cmp(&other.literals[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.literals[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.literals[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.literals[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.literals[i..]);
        out.extend_from_slice(&other.literals[j..]);
        State { literals: out }
    }

    /// True when the state holds both `p` and `~p` for some atom.
    pub fn is_contradictory(&self) -> bool {
        self.literals.windows(2).any(|w| {
            w[0].atom == w[1].atom
                && w[0].polarity == Polarity::Positive
                && w[1].polarity == Polarity::NegatedDiamond
        })
    }

    pub fn map_literals(&self, f: impl FnMut(&Literal) -> Literal) -> State {
        State::new(self.literals.iter().map(f))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.literals.as_slice() {
            [] => f.write_str("true"),
            [single] => write!(f, "{single}"),
            lits => {
                f.write_str("{")?;
                for (i, l) in lits.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// `s1` subsumes `s2` (`s2 ≤ s1`) iff the literals of `s1` are a subset of those of `s2`.
pub fn state_subsumes(s1: &State, s2: &State) -> bool {
    s1.is_subset_of(s2)
}

/// An MA timeline: a non-empty sequence of states joined by "meets".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timeline {
    states: Vec<State>,
}

impl Timeline {
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyTimeline);
        }
        Ok(Timeline { states })
    }

    /// Caller guarantees `states` is non-empty.
    pub(crate) fn from_nonempty(states: Vec<State>) -> Self {
        debug_assert!(!states.is_empty());
        Timeline { states }
    }

    /// The single-state timeline `true`.
    pub fn top() -> Self {
        Timeline {
            states: vec![State::top()],
        }
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; timelines have at least one state.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Collapses maximal runs of identical adjacent states.
    pub fn normalize(&self) -> Timeline {
        let mut states = self.states.clone();
        states.dedup();
        Timeline { states }
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.states.iter().flat_map(|s| s.literals.iter())
    }

    pub fn map_states(&self, f: impl FnMut(&State) -> State) -> Timeline {
        Timeline {
            states: self.states.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for Timeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Timeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_timeline(s)
    }
}

/// `timeline1 ≤ normalize(timeline1)` and back; see [`Timeline::normalize`].
pub fn normalize_timeline(t: &Timeline) -> Timeline {
    t.normalize()
}

/// A conjunction of MA timelines, stored in canonical order without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmaFormula {
    timelines: Vec<Timeline>,
}

impl AmaFormula {
    pub fn new(timelines: Vec<Timeline>) -> Result<Self> {
        if timelines.is_empty() {
            return Err(Error::EmptyFormula);
        }
        Ok(Self::from_nonempty(timelines))
    }

    pub(crate) fn from_nonempty(mut timelines: Vec<Timeline>) -> Self {
        debug_assert!(!timelines.is_empty());
        timelines.sort_by_cached_key(|t| t.to_string());
        timelines.dedup();
        AmaFormula { timelines }
    }

    /// The formula `true`.
    pub fn top() -> Self {
        AmaFormula {
            timelines: vec![Timeline::top()],
        }
    }

    pub fn timelines(&self) -> &[Timeline] {
        &self.timelines
    }

    pub fn len(&self) -> usize {
        self.timelines.len()
    }

    /// Always false; formulas have at least one timeline.
    pub fn is_empty(&self) -> bool {
        self.timelines.is_empty()
    }

    /// Length of the longest timeline.
    pub fn max_timeline_len(&self) -> usize {
        self.timelines.iter().map(Timeline::len).max().unwrap_or(0)
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.timelines.iter().flat_map(|t| t.literals())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.literals().map(|l| l.atom.clone()).collect()
    }

    pub fn is_ground(&self) -> bool {
        self.literals().all(|l| l.atom.is_ground())
    }

    pub fn has_negation(&self) -> bool {
        self.literals().any(|l| !l.is_positive())
    }

    pub fn map_literals(&self, mut f: impl FnMut(&Literal) -> Literal) -> AmaFormula {
        AmaFormula::from_nonempty(
            self.timelines
                .iter()
                .map(|t| t.map_states(|s| s.map_literals(&mut f)))
                .collect(),
        )
    }

    /// Conjunction of two formulas.
    pub fn and(&self, other: &AmaFormula) -> AmaFormula {
        let mut all = self.timelines.clone();
        all.extend(other.timelines.iter().cloned());
        AmaFormula::from_nonempty(all)
    }

    /// Substitutes terms in every atom.
    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> AmaFormula {
        self.map_literals(|l| Literal {
            atom: l.atom.map_terms(&mut f),
            polarity: l.polarity,
        })
    }
}

impl From<Timeline> for AmaFormula {
    fn from(t: Timeline) -> Self {
        AmaFormula { timelines: vec![t] }
    }
}

impl fmt::Display for AmaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.timelines.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for AmaFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

/// Upper bound on the number of states per timeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct KBound(usize);

impl TryFrom<usize> for KBound {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        KBound::new(k)
    }
}

impl From<KBound> for usize {
    fn from(k: KBound) -> usize {
        k.0
    }
}

impl KBound {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        Ok(KBound(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
