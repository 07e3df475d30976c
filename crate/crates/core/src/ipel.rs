//! Internal positive event logic: Allen relations, a brute-force evaluator
//! and generators for the worst-case formula families.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{AmaFormula, Atom, State, Timeline};
use crate::model::{Interval, TemporalModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AllenRelation {
    Starts,
    Finishes,
    During,
    Before,
    Meets,
    Overlaps,
    Equals,
    StartedBy,
    FinishedBy,
    Contains,
    After,
    MetBy,
    OverlappedBy,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Starts,
        AllenRelation::Finishes,
        AllenRelation::During,
        AllenRelation::Before,
        AllenRelation::Meets,
        AllenRelation::Overlaps,
        AllenRelation::Equals,
        AllenRelation::StartedBy,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::After,
        AllenRelation::MetBy,
        AllenRelation::OverlappedBy,
    ];

    /// Relations allowed under a diamond.
    pub const INTERNAL: [AllenRelation; 4] = [
        AllenRelation::Starts,
        AllenRelation::Finishes,
        AllenRelation::During,
        AllenRelation::Equals,
    ];

    pub fn inverse(self) -> AllenRelation {
        use AllenRelation::*;
        match self {
            Starts => StartedBy,
            Finishes => FinishedBy,
            During => Contains,
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Equals => Equals,
            StartedBy => Starts,
            FinishedBy => Finishes,
            Contains => During,
            After => Before,
            MetBy => Meets,
            OverlappedBy => Overlaps,
        }
    }

    pub fn symbol(self) -> &'static str {
        use AllenRelation::*;
        match self {
            Starts => "s",
            Finishes => "f",
            During => "d",
            Before => "b",
            Meets => "m",
            Overlaps => "o",
            Equals => "=",
            StartedBy => "si",
            FinishedBy => "fi",
            Contains => "di",
            After => "bi",
            MetBy => "mi",
            OverlappedBy => "oi",
        }
    }
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Whether `i1 r i2` holds.
pub fn allen_holds(r: AllenRelation, i1: Interval, i2: Interval) -> bool {
    use AllenRelation::*;
    let (m1, m2, n1, n2) = (i1.lo, i1.hi, i2.lo, i2.hi);
    match r {
        Starts => m1 == n1 && m2 <= n2,
        Finishes => m1 <= n1 && m2 == n2,
        During => m1 >= n1 && m2 <= n2,
        Before => m2 <= n1,
        Meets => m2 == n1 || m2 + 1 == n1,
        Overlaps => m1 <= n1 && n1 <= m2 && m2 <= n2,
        Equals => m1 == n1 && m2 == n2,
        StartedBy | FinishedBy | Contains | After | MetBy | OverlappedBy => {
            allen_holds(r.inverse(), i2, i1)
        }
    }
}

/// The least interval containing both arguments.
pub fn span(i1: Interval, i2: Interval) -> Interval {
    Interval {
        lo: i1.lo.min(i2.lo),
        hi: i1.hi.max(i2.hi),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IpelFormula {
    True,
    Prop(Atom),
    Or(Box<IpelFormula>, Box<IpelFormula>),
    Diamond(BTreeSet<AllenRelation>, Box<IpelFormula>),
    AndR(BTreeSet<AllenRelation>, Box<IpelFormula>, Box<IpelFormula>),
}

impl IpelFormula {
    pub fn or(a: IpelFormula, b: IpelFormula) -> Self {
        IpelFormula::Or(Box::new(a), Box::new(b))
    }

    /// `◇R e`; `R` must be drawn from the internal relations `{s, f, d, =}`.
    pub fn diamond(rels: impl IntoIterator<Item = AllenRelation>, e: IpelFormula) -> Result<Self> {
        let rels: BTreeSet<AllenRelation> = rels.into_iter().collect();
        if let Some(bad) = rels.iter().find(|r| !AllenRelation::INTERNAL.contains(r)) {
            return Err(Error::Domain(format!("relation `{bad}` is not allowed under a diamond")));
        }
        Ok(IpelFormula::Diamond(rels, Box::new(e)))
    }

    pub fn and_r(rels: impl IntoIterator<Item = AllenRelation>, a: IpelFormula, b: IpelFormula) -> Self {
        IpelFormula::AndR(rels.into_iter().collect(), Box::new(a), Box::new(b))
    }

    fn equals_and(a: IpelFormula, b: IpelFormula) -> Self {
        IpelFormula::and_r([AllenRelation::Equals], a, b)
    }
}

fn state_to_ipel(s: &State) -> Result<IpelFormula> {
    let mut parts = s.literals().iter().map(|l| {
        if l.is_positive() {
            Ok(IpelFormula::Prop(l.atom.clone()))
        } else {
            Err(Error::NegationUnsupported(s.to_string()))
        }
    });
    let Some(first) = parts.next() else {
        return Ok(IpelFormula::True);
    };
    parts.try_fold(first?, |acc, p| Ok(IpelFormula::equals_and(acc, p?)))
}

fn timeline_to_ipel(t: &Timeline) -> Result<IpelFormula> {
    let mut states = t.states().iter().rev();
    let last = state_to_ipel(states.next().unwrap())?;
    states.try_fold(last, |acc, s| {
        Ok(IpelFormula::and_r([AllenRelation::Meets], state_to_ipel(s)?, acc))
    })
}

/// Encodes an AMA formula with `;` as `∧{m}` and conjunction as `∧{=}`.
pub fn ama_to_ipel(f: &AmaFormula) -> Result<IpelFormula> {
    let mut ts = f.timelines().iter();
    let first = timeline_to_ipel(ts.next().unwrap())?;
    ts.try_fold(first, |acc, t| Ok(IpelFormula::equals_and(acc, timeline_to_ipel(t)?)))
}

struct Evaluator<'a> {
    model: &'a TemporalModel,
    memo: HashMap<(usize, i64, i64), bool>,
}

impl Evaluator<'_> {
    fn subintervals(iv: Interval) -> impl Iterator<Item = Interval> {
        (iv.lo..=iv.hi).flat_map(move |lo| (lo..=iv.hi).map(move |hi| Interval { lo, hi }))
    }

    fn eval(&mut self, e: &IpelFormula, iv: Interval) -> bool {
        let key = (e as *const IpelFormula as usize, iv.lo, iv.hi);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = match e {
            IpelFormula::True => true,
            IpelFormula::Prop(a) => (iv.lo..=iv.hi).all(|t| self.model.holds(a, t)),
            IpelFormula::Or(a, b) => self.eval(a, iv) || self.eval(b, iv),
            IpelFormula::Diamond(rels, inner) => Self::subintervals(iv).any(|sub| {
                rels.iter().any(|&r| allen_holds(r, sub, iv)) && self.eval(inner, sub)
            }),
            IpelFormula::AndR(rels, a, b) => {
                let subs: Vec<Interval> = Self::subintervals(iv).collect();
                subs.iter().any(|&i1| {
                    subs.iter().any(|&i2| {
                        span(i1, i2) == iv
                            && rels.iter().any(|&r| allen_holds(r, i1, i2))
                            && self.eval(a, i1)
                            && self.eval(b, i2)
                    })
                })
            }
        };
        self.memo.insert(key, v);
        v
    }
}

/// Brute-force evaluation of `e` on `m` restricted to `iv`.
pub fn ipel_satisfies(m: &TemporalModel, iv: Interval, e: &IpelFormula) -> Result<bool> {
    if !m.interval().contains_interval(iv) || iv.lo > iv.hi {
        return Err(Error::Domain(format!(
            "interval {iv} is not within {} of model `{}`",
            m.interval(),
            m.name()
        )));
    }
    let mut ev = Evaluator {
        model: m,
        memo: HashMap::new(),
    };
    Ok(ev.eval(e, iv))
}

/// Formula families from the lower-bound constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardInstance {
    /// Two `n`-state timelines over the grid atoms `p{i}_{j}`; their LGG is
    /// exponentially large.
    Theorem17Grid(usize),
    /// The formula whose IS members encode truth assignments to `n` variables.
    Lemma10Clauses(usize),
}

fn grid_atom(i: usize, j: usize) -> Atom {
    Atom::prop(&format!("p{i}_{j}"))
}

/// The state holding every `True{k}` and `False{k}` for `k` in `1..=n`.
fn prop_state(n: usize) -> State {
    State::from_atoms((1..=n).flat_map(|k| [true_atom(k), false_atom(k)]))
}

fn true_atom(k: usize) -> Atom {
    Atom::prop(&format!("True{k}"))
}

fn false_atom(k: usize) -> Atom {
    Atom::prop(&format!("False{k}"))
}

pub fn gen_hard_instances(kind: HardInstance) -> Result<Vec<AmaFormula>> {
    match kind {
        HardInstance::Theorem17Grid(n) => {
            if n < 2 {
                return Err(Error::Domain("grid size must be at least 2".into()));
            }
            let rows = (1..=n)
                .map(|i| State::from_atoms((1..=n).map(|j| grid_atom(i, j))))
                .collect();
            let cols = (1..=n)
                .map(|j| State::from_atoms((1..=n).map(|i| grid_atom(i, j))))
                .collect();
            Ok(vec![
                Timeline::from_nonempty(rows).into(),
                Timeline::from_nonempty(cols).into(),
            ])
        }
        HardInstance::Lemma10Clauses(n) => {
            if n < 1 {
                return Err(Error::Domain("clause family needs at least one variable".into()));
            }
            let prop = prop_state(n);
            let single = |a: Atom| State::from_atoms([a]);
            let timelines = (1..=n)
                .flat_map(|i| {
                    [
                        vec![prop.clone(), single(true_atom(i)), single(false_atom(i)), prop.clone()],
                        vec![prop.clone(), single(false_atom(i)), single(true_atom(i)), prop.clone()],
                    ]
                })
                .map(Timeline::from_nonempty)
                .collect();
            Ok(vec![AmaFormula::from_nonempty(timelines)])
        }
    }
}

/// The timeline asserting "not `C_i`" per clause, for clauses over variables
/// `1..=n` given as signed indices (`-k` is the negation of variable `k`).
pub fn clause_timeline(n: usize, clauses: &[Vec<i64>]) -> Result<Timeline> {
    let states = clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| {
                    let k = l.unsigned_abs() as usize;
                    if l == 0 || k > n {
                        return Err(Error::Domain(format!("literal {l} out of range 1..={n}")));
                    }
                    Ok(if l > 0 { false_atom(k) } else { true_atom(k) })
                })
                .collect::<Result<Vec<_>>>()
                .map(State::from_atoms)
        })
        .collect::<Result<Vec<_>>>()?;
    Timeline::new(states)
}

/// Whether a grid-family timeline is square: every state is one grid atom and
/// consecutive atoms differ in exactly one index.
pub fn is_square(t: &Timeline) -> bool {
    let coords: Option<Vec<(usize, usize)>> = t
        .states()
        .iter()
        .map(|s| match s.literals() {
            [l] if l.is_positive() => {
                let name = l.atom.predicate().strip_prefix('p')?;
                let (i, j) = name.split_once('_')?;
                Some((i.parse().ok()?, j.parse().ok()?))
            }
            _ => None,
        })
        .collect();
    let Some(coords) = coords else {
        return false;
    };
    coords.windows(2).all(|w| {
        let ((i, j), (a, b)) = (w[0], w[1]);
        (a == i && b == j + 1) || (a == i + 1 && b == j)
    })
}
