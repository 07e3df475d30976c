//! Negation support: dual atoms, the model transform and the formula maps
//! between `~p` literals and positive dual atoms.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{AmaFormula, Atom, Literal, Polarity, RESERVED_PREFIX};
use crate::model::TemporalModel;

/// How much negative information the learner sees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegationMode {
    /// Positive atoms only.
    #[default]
    None,
    /// Duals true only at a model's first and last points.
    Boundary,
    /// Duals true wherever the base atom is false.
    Full,
}

impl FromStr for NegationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NegationMode::None),
            "boundary" => Ok(NegationMode::Boundary),
            "full" => Ok(NegationMode::Full),
            other => Err(Error::Domain(format!(
                "unknown negation mode `{other}` (expected none, boundary or full)"
            ))),
        }
    }
}

impl fmt::Display for NegationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NegationMode::None => "none",
            NegationMode::Boundary => "boundary",
            NegationMode::Full => "full",
        })
    }
}

/// Prefix of dual atom predicates. User input cannot produce it.
pub const DUAL_PREFIX: &str = "__not_";

/// The bijection between base atoms and their duals.
#[derive(Clone, Copy, Debug, Default)]
pub struct DualAtomMap;

impl DualAtomMap {
    pub fn dual(&self, atom: &Atom) -> Atom {
        debug_assert!(!atom.predicate().starts_with(RESERVED_PREFIX));
        atom.with_predicate(&format!("{DUAL_PREFIX}{}", atom.predicate()))
    }

    /// The base atom of a dual, or `None` for ordinary atoms.
    pub fn base(&self, atom: &Atom) -> Option<Atom> {
        atom.predicate()
            .strip_prefix(DUAL_PREFIX)
            .map(|p| atom.with_predicate(p))
    }

    pub fn is_dual(&self, atom: &Atom) -> bool {
        atom.predicate().starts_with(DUAL_PREFIX)
    }
}

/// Adds dual atoms for every member of `vocab` according to `mode`.
pub fn transform_model(
    m: &TemporalModel,
    mode: NegationMode,
    vocab: &BTreeSet<Atom>,
) -> Result<TemporalModel> {
    if mode == NegationMode::None {
        return Ok(m.clone());
    }
    if let Some(missing) = m.true_atoms().into_iter().find(|a| !vocab.contains(a)) {
        return Err(Error::VocabularyMismatch {
            model: m.name().to_string(),
            atom: missing.to_string(),
        });
    }
    let duals = DualAtomMap;
    let n = m.len();
    let mut out = m.clone();
    for p in vocab {
        let row: Vec<bool> = match m.row(p) {
            Some(r) => r.to_vec(),
            None => vec![false; n],
        };
        let dual_row = (0..n)
            .map(|i| match mode {
                NegationMode::Full => !row[i],
                NegationMode::Boundary => !row[i] && (i == 0 || i + 1 == n),
                NegationMode::None => unreachable!(),
            })
            .collect();
        out.set_row(duals.dual(p), dual_row);
    }
    Ok(out)
}

/// Rewrites each dual atom `p̄` as the literal `~p`.
pub fn fold_negation(f: &AmaFormula) -> Result<AmaFormula> {
    if f.has_negation() {
        return Err(Error::NegationUnsupported(f.to_string()));
    }
    let duals = DualAtomMap;
    Ok(f.map_literals(|l| match duals.base(&l.atom) {
        Some(base) => Literal::never(base),
        None => l.clone(),
    }))
}

/// Rewrites each `~p` literal as the positive dual atom `p̄`.
pub fn unfold_negation(f: &AmaFormula) -> AmaFormula {
    let duals = DualAtomMap;
    f.map_literals(|l| match l.polarity {
        Polarity::Positive => l.clone(),
        Polarity::NegatedDiamond => Literal::pos(duals.dual(&l.atom)),
    })
}

/// Atoms true at some point of some model.
pub fn learning_vocab(models: &[TemporalModel]) -> BTreeSet<Atom> {
    models.iter().flat_map(TemporalModel::true_atoms).collect()
}
