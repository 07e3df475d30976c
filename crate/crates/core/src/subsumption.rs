//! Interdigitations, MA subsumption and AMA subsumption.

use crate::error::{Error, Result};
use crate::formula::{AmaFormula, Timeline};
use crate::generalization::is_;

/// A co-occurrence alignment of the states of several timelines.
///
/// Each tuple holds one 0-based state position per input timeline.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interdigitation {
    tuples: Vec<Vec<usize>>,
}

impl Interdigitation {
    /// Validates piecewise totality and simultaneous consistency against
    /// timelines of the given lengths.
    pub fn new(tuples: Vec<Vec<usize>>, lens: &[usize]) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Domain(format!("malformed interdigitation: {msg}")));
        let Some(first) = tuples.first() else {
            return bad("no tuples");
        };
        if tuples.iter().any(|t| t.len() != lens.len()) {
            return bad("tuple width differs from the number of timelines");
        }
        if first.iter().any(|&p| p != 0) {
            return bad("first tuple must hold the first positions");
        }
        let last = tuples.last().unwrap();
        if last.iter().zip(lens).any(|(&p, &n)| p + 1 != n) {
            return bad("last tuple must hold the last positions");
        }
        for w in tuples.windows(2) {
            let steps: Vec<usize> = w[0]
                .iter()
                .zip(&w[1])
                .map(|(a, b)| b.wrapping_sub(*a))
                .collect();
            if steps.iter().any(|&d| d > 1) || steps.iter().all(|&d| d == 0) {
                return bad("consecutive tuples must advance a non-empty subset by one");
            }
        }
        Ok(Interdigitation { tuples })
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Lazy, exhaustive enumeration of the interdigitations of a set of timelines.
///
/// At every step the advancing subset is chosen in ascending bitmask order.
pub struct Interdigitations {
    lens: Vec<usize>,
    path: Vec<Vec<usize>>,
    masks: Vec<u64>,
    started: bool,
    done: bool,
}

impl Interdigitations {
    fn advanceable(&self, tuple: &[usize]) -> u64 {
        tuple
            .iter()
            .zip(&self.lens)
            .enumerate()
            .filter(|(_, (&p, &n))| p + 1 < n)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    fn step(tuple: &[usize], mask: u64) -> Vec<usize> {
        tuple
            .iter()
            .enumerate()
            .map(|(i, &p)| if mask >> i & 1 == 1 { p + 1 } else { p })
            .collect()
    }

    /// Extends the path with the least choices until every timeline is exhausted.
    fn descend(&mut self) {
        loop {
            let cur = self.path.last().unwrap();
            let avail = self.advanceable(cur);
            if avail == 0 {
                return;
            }
            // Least non-empty subset of `avail` is its lowest bit.
            let mask = avail & avail.wrapping_neg();
            let next = Self::step(cur, mask);
            self.path.push(next);
            self.masks.push(mask);
        }
    }

    /// Replaces the deepest choice that has a successor; false when exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(mask) = self.masks.pop() {
            self.path.pop();
            let cur = self.path.last().unwrap();
            let avail = self.advanceable(cur);
            let next = mask.wrapping_sub(avail) & avail;
            if next != 0 {
                let t = Self::step(cur, next);
                self.path.push(t);
                self.masks.push(next);
                return true;
            }
        }
        false
    }
}

impl Iterator for Interdigitations {
    type Item = Interdigitation;

    fn next(&mut self) -> Option<Interdigitation> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.backtrack() {
            self.done = true;
            return None;
        }
        self.descend();
        Some(Interdigitation {
            tuples: self.path.clone(),
        })
    }
}

/// Enumerates every interdigitation of `ts` lazily and without duplicates.
pub fn enumerate_interdigitations(ts: &[Timeline]) -> Interdigitations {
    assert!(!ts.is_empty(), "interdigitations need at least one timeline");
    assert!(ts.len() <= 64, "at most 64 timelines can be interdigitated");
    Interdigitations {
        lens: ts.iter().map(Timeline::len).collect(),
        path: vec![vec![0; ts.len()]],
        masks: Vec::new(),
        started: false,
        done: false,
    }
}

/// Whether `i` witnesses `phi1 ≤ phi2`: every co-occurring `phi2` state is a
/// subset of its `phi1` partner.
pub fn is_witness(i: &Interdigitation, phi1: &Timeline, phi2: &Timeline) -> Result<bool> {
    let i = Interdigitation::new(i.tuples.clone(), &[phi1.len(), phi2.len()])?;
    Ok(i.tuples
        .iter()
        .all(|t| phi2.states()[t[1]].is_subset_of(&phi1.states()[t[0]])))
}

/// Reachability table over the subsumption graph of two timelines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsumptionGraph {
    rows: usize,
    cols: usize,
    reachable: Vec<bool>,
}

impl SubsumptionGraph {
    /// Node `(i, j)` is present when state `j` of `phi2` is a subset of state
    /// `i` of `phi1`; a node is reachable when a monotone path of present
    /// nodes leads to it from `(0, 0)`.
    pub fn new(phi1: &Timeline, phi2: &Timeline) -> Self {
        let (m, n) = (phi1.len(), phi2.len());
        let mut reachable = vec![false; m * n];
        for i in 0..m {
            for j in 0..n {
                let from = if i == 0 && j == 0 {
                    true
                } else {
                    (i > 0 && reachable[(i - 1) * n + j])
                        || (j > 0 && reachable[i * n + j - 1])
                        || (i > 0 && j > 0 && reachable[(i - 1) * n + j - 1])
                };
                reachable[i * n + j] =
                    from && phi2.states()[j].is_subset_of(&phi1.states()[i]);
            }
        }
        SubsumptionGraph {
            rows: m,
            cols: n,
            reachable,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn reachable(&self, i: usize, j: usize) -> bool {
        self.reachable[i * self.cols + j]
    }

    /// Whether the final node is reachable.
    pub fn has_path(&self) -> bool {
        self.reachable(self.rows - 1, self.cols - 1)
    }
}

/// `phi1 ≤ phi2` for MA timelines, in `O(|phi1|·|phi2|)` state comparisons.
pub fn ma_subsumes(phi1: &Timeline, phi2: &Timeline) -> bool {
    // Cheap necessary conditions first: the endpoints always co-occur.
    let (s, t) = (phi1.states(), phi2.states());
    if !t[0].is_subset_of(&s[0]) || !t[t.len() - 1].is_subset_of(&s[s.len() - 1]) {
        return false;
    }
    SubsumptionGraph::new(phi1, phi2).has_path()
}

/// Exhaustive witness search over all interdigitations of the pair.
pub fn ma_subsumes_oracle(phi1: &Timeline, phi2: &Timeline) -> bool {
    let pair = [phi1.clone(), phi2.clone()];
    enumerate_interdigitations(&pair).any(|i| {
        i.tuples
            .iter()
            .all(|t| phi2.states()[t[1]].is_subset_of(&phi1.states()[t[0]]))
    })
}

/// `psi1 ≤syn psi2`: every timeline of `psi2` subsumes some timeline of `psi1`.
pub fn syntactic_subsumes(psi1: &AmaFormula, psi2: &AmaFormula) -> bool {
    psi2.timelines()
        .iter()
        .all(|t2| psi1.timelines().iter().any(|t1| ma_subsumes(t1, t2)))
}

/// Syntactic subsumption for formulas with `~` literals: a witnessing
/// interdigitation under literal-set containment for each required pair.
pub fn syntactic_subsumes_neg(psi1: &AmaFormula, psi2: &AmaFormula) -> bool {
    psi2.timelines().iter().all(|t2| {
        psi1.timelines()
            .iter()
            .any(|t1| SubsumptionGraph::new(t1, t2).has_path())
    })
}

fn require_positive(f: &AmaFormula) -> Result<()> {
    if f.has_negation() {
        Err(Error::NegationUnsupported(f.to_string()))
    } else {
        Ok(())
    }
}

/// An IS member of `psi1` together with a timeline of `psi2` it fails to
/// be subsumed by, or `None` when `psi1 ≤ psi2`.
pub fn semantic_counterexample(
    psi1: &AmaFormula,
    psi2: &AmaFormula,
) -> Result<Option<(Timeline, Timeline)>> {
    require_positive(psi1)?;
    require_positive(psi2)?;
    for member in is_(psi1.timelines()) {
        if let Some(t2) = psi2.timelines().iter().find(|t2| !ma_subsumes(&member, t2)) {
            return Ok(Some((member, t2.clone())));
        }
    }
    Ok(None)
}

/// Semantic subsumption `psi1 ≤ psi2` for AMA formulas without negation.
pub fn semantic_subsumes(psi1: &AmaFormula, psi2: &AmaFormula) -> Result<bool> {
    semantic_counterexample(psi1, psi2).map(|c| c.is_none())
}

/// Mutual semantic subsumption.
pub fn semantically_equivalent(psi1: &AmaFormula, psi2: &AmaFormula) -> Result<bool> {
    Ok(semantic_subsumes(psi1, psi2)? && semantic_subsumes(psi2, psi1)?)
}

/// Mutual syntactic subsumption.
pub fn syntactically_equivalent(psi1: &AmaFormula, psi2: &AmaFormula) -> bool {
    syntactic_subsumes_neg(psi1, psi2) && syntactic_subsumes_neg(psi2, psi1)
}
