//! The k-AMA learning pipeline, classification and leave-one-out evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formula::parse::Cursor;
use crate::formula::{AmaFormula, KBound};
use crate::generalization::{k_cover, pairwise_lgg};
use crate::model::{ground, lgcf, satisfies, scan_occurrences, write_models, Interval, TemporalModel};
use crate::negation::{fold_negation, learning_vocab, transform_model, NegationMode};
use crate::relational::{
    find_correspondences, lift_with_map, propositionalize, role_constant, ObjectCorrespondence,
    DEFAULT_MAX_OBJECTS,
};

/// Where object correspondences come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrespondenceMode {
    /// Every model carries a complete set of `role` lines.
    Given,
    /// Search for correspondences, honoring any partial `role` lines.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub k: KBound,
    pub negation: NegationMode,
    pub max_objects: usize,
    pub correspondence: CorrespondenceMode,
}

impl LearnerConfig {
    pub fn new(k: KBound, negation: NegationMode) -> Self {
        LearnerConfig {
            k,
            negation,
            max_objects: DEFAULT_MAX_OBJECTS,
            correspondence: CorrespondenceMode::Auto,
        }
    }
}

/// How a definition was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub k: usize,
    pub negation: NegationMode,
    pub models: usize,
    /// SHA-256 of the propositionalized training models.
    pub digest: String,
}

/// A learned, lifted event definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDefinition {
    pub name: String,
    /// Head variables (without `?`); position `i` is role `i`.
    pub head: Vec<String>,
    pub formula: AmaFormula,
    pub provenance: Option<Provenance>,
}

impl EventDefinition {
    pub fn arity(&self) -> usize {
        self.head.len()
    }

    /// Reorders the head so position `i` holds the variable formerly at `perm[i]`.
    pub fn permute_head(&mut self, perm: &[usize]) {
        self.head = perm.iter().map(|&i| self.head[i].clone()).collect();
    }

    fn head_text(&self) -> String {
        let vars: Vec<String> = self.head.iter().map(|v| format!("?{v}")).collect();
        format!("{}({})", self.name, vars.join(","))
    }
}

impl fmt::Display for EventDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.provenance {
            writeln!(
                f,
                "# provenance k={} negation={} models={} digest={}",
                p.k, p.negation, p.models, p.digest
            )?;
        }
        write!(f, "define {} := {}", self.head_text(), self.formula)
    }
}

fn parse_provenance(text: &str) -> Option<Provenance> {
    let fields: BTreeMap<&str, &str> = text
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    Some(Provenance {
        k: fields.get("k")?.parse().ok()?,
        negation: fields.get("negation")?.parse().ok()?,
        models: fields.get("models")?.parse().ok()?,
        digest: fields.get("digest")?.to_string(),
    })
}

/// Reads `define NAME(?v, ...) := formula` lines; a `# provenance` comment
/// directly above a definition is attached to it.
pub fn parse_definitions(text: &str) -> Result<Vec<EventDefinition>> {
    let mut out = Vec::new();
    let mut provenance = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            provenance = comment
                .trim()
                .strip_prefix("provenance")
                .and_then(parse_provenance);
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let Some(rest) = trimmed.strip_prefix("define") else {
            return Err(Error::syntax(lineno, 1, "expected `define`"));
        };
        let Some((head, body)) = rest.split_once(":=") else {
            return Err(Error::syntax(lineno, 1, "expected `:=`"));
        };
        let col = line.len() - line.trim_start().len() + 7;
        let mut c = Cursor::new(head, lineno, col);
        let atom = c.atom()?;
        c.finish()?;
        let mut head_vars = Vec::new();
        for t in atom.args() {
            if !t.is_variable() || head_vars.iter().any(|v: &String| v == t.name()) {
                return Err(Error::syntax(lineno, col, "head arguments must be distinct variables"));
            }
            head_vars.push(t.name().to_string());
        }
        let body_col = line.find(":=").map_or(1, |p| p + 3);
        let mut c = Cursor::new(body, lineno, body_col);
        let formula = c.formula()?;
        c.finish()?;
        if let Some(stray) = formula
            .literals()
            .flat_map(|l| l.atom.args())
            .find(|t| t.is_variable() && !head_vars.iter().any(|v| v == t.name()))
        {
            return Err(Error::syntax(lineno, body_col, format!("variable `{stray}` is not in the head")));
        }
        out.push(EventDefinition {
            name: atom.predicate().to_string(),
            head: head_vars,
            formula,
            provenance: provenance.take(),
        });
    }
    Ok(out)
}

pub fn load_definitions(path: impl AsRef<Path>) -> Result<Vec<EventDefinition>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_definitions(&text)
}

/// A learned definition together with the intermediate products.
#[derive(Clone, Debug)]
pub struct Learned {
    pub definition: EventDefinition,
    pub correspondences: Vec<ObjectCorrespondence>,
    /// The folded formula over role constants, before lifting.
    pub ground: AmaFormula,
}

fn given_correspondence(m: &TemporalModel) -> Result<ObjectCorrespondence> {
    let objects = m.objects();
    if let Some(o) = objects.iter().find(|o| !m.roles().contains_key(*o)) {
        return Err(Error::Correspondence(format!(
            "object `{o}` of model `{}` has no role line",
            m.name()
        )));
    }
    ObjectCorrespondence::new(m.roles().clone())
}

/// Learns a definition named `name` from positive training models.
pub fn learn(name: &str, models: &[TemporalModel], cfg: &LearnerConfig) -> Result<EventDefinition> {
    learn_detailed(name, models, cfg).map(|l| l.definition)
}

pub fn learn_detailed(name: &str, models: &[TemporalModel], cfg: &LearnerConfig) -> Result<Learned> {
    if models.is_empty() {
        return Err(Error::Domain("cannot learn from an empty training set".into()));
    }
    let correspondences = match cfg.correspondence {
        CorrespondenceMode::Given => models.iter().map(given_correspondence).collect::<Result<Vec<_>>>()?,
        CorrespondenceMode::Auto => find_correspondences(models, cfg.max_objects)?,
    };
    let props: Vec<TemporalModel> = models
        .iter()
        .zip(&correspondences)
        .map(|(m, c)| propositionalize(m, c))
        .collect::<Result<_>>()?;
    let vocab = learning_vocab(&props);
    let covers: Vec<AmaFormula> = props
        .par_iter()
        .map(|m| {
            let t = transform_model(m, cfg.negation, &vocab)?;
            Ok(k_cover(cfg.k, &lgcf(&t).into()))
        })
        .collect::<Result<_>>()?;

    let (first, rest) = covers.split_first().unwrap();
    let lgg = rest
        .iter()
        .fold(first.clone(), |acc, f| k_cover(cfg.k, &pairwise_lgg(&acc, f)));
    let folded = fold_negation(&k_cover(cfg.k, &lgg))?;

    for (m, p) in models.iter().zip(&props) {
        if !satisfies(p, &folded)? {
            return Err(Error::Domain(format!(
                "learned formula fails to cover training model `{}`",
                m.name()
            )));
        }
    }

    let (lifted, map) = lift_with_map(&folded)?;
    let roles = correspondences.first().map_or(0, ObjectCorrespondence::len);
    let mut next = map.len();
    let head = (0..roles)
        .map(|r| {
            let c = role_constant(r);
            match map.iter().find(|(_, k)| *k == c) {
                Some((v, _)) => v.clone(),
                None => {
                    next += 1;
                    format!("x{}", next - 1)
                }
            }
        })
        .collect();

    let mut hasher = Sha256::new();
    hasher.update(write_models(&props).as_bytes());
    let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();

    Ok(Learned {
        definition: EventDefinition {
            name: name.to_string(),
            head,
            formula: lifted,
            provenance: Some(Provenance {
                k: cfg.k.get(),
                negation: cfg.negation,
                models: models.len(),
                digest,
            }),
        },
        correspondences,
        ground: folded,
    })
}

/// One recognized occurrence: head arguments and a maximal interval.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Detection {
    pub binding: Vec<String>,
    pub interval: Interval,
}

/// Calls `visit` with every injective assignment of `k` items from `objects`.
fn injective(objects: &[String], k: usize, visit: &mut dyn FnMut(&[String])) {
    fn go(objects: &[String], k: usize, used: &mut Vec<bool>, acc: &mut Vec<String>, visit: &mut dyn FnMut(&[String])) {
        if acc.len() == k {
            visit(acc);
            return;
        }
        for i in 0..objects.len() {
            if !used[i] {
                used[i] = true;
                acc.push(objects[i].clone());
                go(objects, k, used, acc, visit);
                acc.pop();
                used[i] = false;
            }
        }
    }
    go(objects, k, &mut vec![false; objects.len()], &mut Vec::new(), visit);
}

/// Every binding of the head to distinct objects of `m`, with the maximal
/// intervals on which the grounded definition holds.
pub fn classify(def: &EventDefinition, m: &TemporalModel) -> Result<Vec<Detection>> {
    let objects: Vec<String> = m.objects().into_iter().collect();
    if def.arity() > objects.len() {
        return Err(Error::Domain(format!(
            "{} takes {} arguments but model `{}` has {} objects",
            def.name,
            def.arity(),
            m.name(),
            objects.len()
        )));
    }
    let mut out = Vec::new();
    let mut failure = None;
    injective(&objects, def.arity(), &mut |binding| {
        if failure.is_some() {
            return;
        }
        let map: BTreeMap<String, String> = def.head.iter().cloned().zip(binding.iter().cloned()).collect();
        match scan_occurrences(m, &ground(&def.formula, &map)) {
            Ok(ivs) => out.extend(ivs.into_iter().map(|interval| Detection {
                binding: binding.to_vec(),
                interval,
            })),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// An event occurrence named in a labels file.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub model: String,
    pub event: String,
    pub args: Vec<String>,
}

/// Intended events per model, plus which models are training examples.
///
/// Lines: `intends <model> EVENT(args)`, `intends <model>` (nothing
/// intended) and `example <model> EVENT(args)`, where the example arguments
/// list the model's objects in role order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Labels {
    pub intends: BTreeSet<Occurrence>,
    pub examples: Vec<Occurrence>,
    pub annotated: BTreeSet<String>,
}

impl Labels {
    pub fn event_names(&self) -> BTreeSet<String> {
        self.examples.iter().map(|o| o.event.clone()).collect()
    }

    pub fn intended_for(&self, model: &str, event: &str) -> BTreeSet<Vec<String>> {
        self.intends
            .iter()
            .filter(|o| o.model == model && o.event == event)
            .map(|o| o.args.clone())
            .collect()
    }
}

impl fmt::Display for Labels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let occ = |o: &Occurrence| {
            if o.args.is_empty() {
                format!("{} {}", o.model, o.event)
            } else {
                format!("{} {}({})", o.model, o.event, o.args.join(","))
            }
        };
        for o in &self.examples {
            writeln!(f, "example {}", occ(o))?;
        }
        for o in &self.intends {
            writeln!(f, "intends {}", occ(o))?;
        }
        let named: BTreeSet<&String> = self.intends.iter().map(|o| &o.model).collect();
        for m in self.annotated.iter().filter(|m| !named.contains(m)) {
            writeln!(f, "intends {m}")?;
        }
        Ok(())
    }
}

pub fn parse_labels(text: &str) -> Result<Labels> {
    let mut labels = Labels::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let col = line.len() - trimmed.len() + 1;
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed.trim_end(), ""));
        let mut c = Cursor::new(rest, lineno, col + keyword.len() + 1);
        let model = c.ident()?;
        labels.annotated.insert(model.clone());
        let occurrence = if c.at_end() {
            None
        } else {
            let atom = c.atom()?;
            c.finish()?;
            if !atom.is_ground() {
                return Err(Error::Labels(format!("line {lineno}: event arguments must be objects")));
            }
            Some(Occurrence {
                model,
                event: atom.predicate().to_string(),
                args: atom.args().iter().map(|t| t.name().to_string()).collect(),
            })
        };
        match (keyword, occurrence) {
            ("intends", Some(o)) => {
                labels.intends.insert(o);
            }
            ("intends", None) => {}
            ("example", Some(o)) => labels.examples.push(o),
            ("example", None) => {
                return Err(Error::Labels(format!("line {lineno}: `example` needs an event")));
            }
            (other, _) => {
                return Err(Error::syntax(lineno, col, format!("unknown directive `{other}`")));
            }
        }
    }
    Ok(labels)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Labels> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_labels(&text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub learner: LearnerConfig,
    /// Training-set size per fold.
    pub n: usize,
    pub repeats: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventMetrics {
    pub event: String,
    /// Mean false positives per repeat.
    pub false_positives: f64,
    /// Mean false negatives per repeat.
    pub false_negatives: f64,
    /// Mean detections per repeat.
    pub detections: f64,
    /// Intended occurrences in the labels.
    pub intended: usize,
    /// False positives over detections; 0 when nothing was detected.
    pub fp_rate: f64,
    /// False negatives over intended occurrences.
    pub fn_rate: f64,
    /// Set when the detection count was zero and `fp_rate` is a placeholder.
    pub no_detections: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub events: Vec<EventMetrics>,
}

/// Deterministic per-fold seed; independent of the learner settings so that
/// runs differing only in `k` or negation see the same training samples.
fn fold_seed(seed: u64, repeat: usize, held_out: usize, event: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((repeat as u64).to_le_bytes());
    h.update((held_out as u64).to_le_bytes());
    h.update(event.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// Copies `m` with role lines taken from an `example` occurrence.
fn with_example_roles(m: &TemporalModel, ex: &Occurrence) -> Result<TemporalModel> {
    let mut out = m.clone();
    out.clear_roles();
    for (i, o) in ex.args.iter().enumerate() {
        out.set_role(o, i)?;
    }
    Ok(out)
}

/// Normalizes summed `(FP, FN, detections)` over `repeats` runs.
fn metrics(event: &str, results: &[(usize, usize, usize)], repeats: usize, intended: usize) -> EventMetrics {
    let (fp, fn_, det) = results
        .iter()
        .fold((0, 0, 0), |a, r| (a.0 + r.0, a.1 + r.1, a.2 + r.2));
    let per = |x: usize| x as f64 / repeats as f64;
    let (fp_mean, fn_mean, det_mean) = (per(fp), per(fn_), per(det));
    EventMetrics {
        event: event.to_string(),
        false_positives: fp_mean,
        false_negatives: fn_mean,
        detections: det_mean,
        intended,
        fp_rate: if det == 0 { 0.0 } else { fp_mean / det_mean },
        fn_rate: if intended == 0 { 0.0 } else { fn_mean / intended as f64 },
        no_detections: det == 0,
    }
}

/// `(FP, FN, detections)` of `def` on one model.
fn score_model(def: &EventDefinition, m: &TemporalModel, labels: &Labels) -> Result<(usize, usize, usize)> {
    let intended = labels.intended_for(m.name(), &def.name);
    if def.arity() > m.objects().len() {
        return Ok((0, intended.len(), 0));
    }
    let detected: BTreeSet<Vec<String>> = classify(def, m)?.into_iter().map(|d| d.binding).collect();
    Ok((
        detected.difference(&intended).count(),
        intended.difference(&detected).count(),
        detected.len(),
    ))
}

fn check_annotated(models: &[TemporalModel], labels: &Labels) -> Result<()> {
    match models.iter().find(|m| !labels.annotated.contains(m.name())) {
        Some(m) => Err(Error::Labels(format!("model `{}` has no intended-event annotation", m.name()))),
        None => Ok(()),
    }
}

/// Scores fixed definitions against the labels on every model.
pub fn score_definitions(
    defs: &[EventDefinition],
    models: &[TemporalModel],
    labels: &Labels,
) -> Result<Vec<EventMetrics>> {
    check_annotated(models, labels)?;
    defs.iter()
        .map(|d| {
            let results = models
                .iter()
                .map(|m| score_model(d, m, labels))
                .collect::<Result<Vec<_>>>()?;
            let intended = labels.intends.iter().filter(|o| o.event == d.name).count();
            Ok(metrics(&d.name, &results, 1, intended))
        })
        .collect()
}

/// Leave-one-out evaluation: for each held-out model and event, learn from a
/// seeded sample of the other examples and compare the detections on the
/// held-out model with its intended occurrences.
pub fn evaluate(models: &[TemporalModel], labels: &Labels, cfg: &EvalConfig) -> Result<EvalReport> {
    check_annotated(models, labels)?;
    let by_name: BTreeMap<&str, usize> = models.iter().enumerate().map(|(i, m)| (m.name(), i)).collect();
    for o in labels.intends.iter().chain(&labels.examples) {
        if !by_name.contains_key(o.model.as_str()) {
            return Err(Error::Labels(format!("unknown model `{}`", o.model)));
        }
    }
    let repeats = cfg.repeats.max(1);
    let mut events = Vec::new();
    for event in labels.event_names() {
        let pool: Vec<(usize, &Occurrence)> = labels
            .examples
            .iter()
            .filter(|o| o.event == event)
            .map(|o| (by_name[o.model.as_str()], o))
            .collect();
        let arity = pool[0].1.args.len();
        if pool.iter().any(|(_, o)| o.args.len() != arity) {
            return Err(Error::Labels(format!("examples of `{event}` disagree on arity")));
        }

        let folds: Vec<(usize, usize)> = (0..repeats).flat_map(|r| (0..models.len()).map(move |h| (r, h))).collect();
        let results: Vec<(usize, usize, usize)> = folds
            .par_iter()
            .map(|&(r, h)| {
                let candidates: Vec<&(usize, &Occurrence)> = pool.iter().filter(|(i, _)| *i != h).collect();
                let take = cfg.n.min(candidates.len());
                let mut rng = ChaCha8Rng::seed_from_u64(fold_seed(cfg.seed, r, h, &event));
                let mut picked = rand::seq::index::sample(&mut rng, candidates.len(), take).into_vec();
                picked.sort_unstable();
                if picked.is_empty() {
                    return Ok((0, labels.intended_for(models[h].name(), &event).len(), 0));
                }
                let training: Vec<TemporalModel> = picked
                    .iter()
                    .map(|&p| {
                        let (i, ex) = candidates[p];
                        match cfg.learner.correspondence {
                            CorrespondenceMode::Given => with_example_roles(&models[*i], ex),
                            CorrespondenceMode::Auto => {
                                let mut m = models[*i].clone();
                                m.clear_roles();
                                Ok(m)
                            }
                        }
                    })
                    .collect::<Result<_>>()?;
                let learned = learn_detailed(&event, &training, &cfg.learner)?;
                let mut def = learned.definition;
                if cfg.learner.correspondence == CorrespondenceMode::Auto && arity > 0 {
                    // Align head positions with the argument order of the
                    // first training example.
                    let ex = candidates[picked[0]].1;
                    let c = &learned.correspondences[0];
                    let perm: Vec<usize> = ex
                        .args
                        .iter()
                        .map(|o| c.role_of(o).ok_or_else(|| Error::Labels(format!("`{o}` is not an object of `{}`", ex.model))))
                        .collect::<Result<_>>()?;
                    def.permute_head(&perm);
                }
                score_model(&def, &models[h], labels)
            })
            .collect::<Result<_>>()?;

        let intended = labels.intends.iter().filter(|o| o.event == event).count();
        events.push(metrics(&event, &results, repeats, intended));
    }
    Ok(EvalReport {
        config: *cfg,
        events,
    })
}
