//! Seeded synthetic data: random formulas, models realizing a ground truth,
//! a small blocks-world suite and correspondence-recovery instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::{AmaFormula, Atom, Literal, State, Term, Timeline};
use crate::learner::{parse_definitions, EventDefinition, Labels, Occurrence};
use crate::model::{ground, TemporalModel};

/// Shape of a random formula.
#[derive(Clone, Debug)]
pub struct FormulaShape {
    pub atoms: Vec<Atom>,
    pub max_timelines: usize,
    pub max_states: usize,
    /// Chance that an atom appears positively in a state.
    pub positive_rate: f64,
    /// Chance that an atom appears as `~p` in a state (drawn after the positive roll).
    pub negative_rate: f64,
}

impl FormulaShape {
    /// Propositional atoms `a`, `b`, ... (at most 26).
    pub fn props(n: usize, max_timelines: usize, max_states: usize) -> Self {
        FormulaShape {
            atoms: (0..n.min(26))
                .map(|i| Atom::prop(&((b'a' + i as u8) as char).to_string()))
                .collect(),
            max_timelines,
            max_states,
            positive_rate: 0.4,
            negative_rate: 0.0,
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape) -> State {
    let mut lits = Vec::new();
    for a in &shape.atoms {
        if rng.random_bool(shape.positive_rate) {
            lits.push(Literal::pos(a.clone()));
        } else if shape.negative_rate > 0.0 && rng.random_bool(shape.negative_rate) {
            lits.push(Literal::never(a.clone()));
        }
    }
    State::new(lits)
}

pub fn random_timeline<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape) -> Timeline {
    let n = rng.random_range(1..=shape.max_states.max(1));
    Timeline::from_nonempty((0..n).map(|_| random_state(rng, shape)).collect())
}

pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, shape: &FormulaShape) -> AmaFormula {
    let n = rng.random_range(1..=shape.max_timelines.max(1));
    AmaFormula::from_nonempty((0..n).map(|_| random_timeline(rng, shape)).collect())
}

/// Settings for realizing a ground truth as models.
#[derive(Clone, Debug)]
pub struct RealizeConfig {
    /// Each state holds for a duration drawn from `1..=max_duration`.
    pub max_duration: usize,
    /// Chance that each distractor atom is added to a segment.
    pub noise: f64,
    /// Atoms eligible as noise.
    pub distractors: Vec<Atom>,
    pub start: i64,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        RealizeConfig {
            max_duration: 3,
            noise: 0.0,
            distractors: Vec::new(),
            start: 0,
        }
    }
}

/// A random interdigitation of `ts`, as rows of state indices.
pub fn random_interdigitation<R: Rng + ?Sized>(rng: &mut R, ts: &[Timeline]) -> Vec<Vec<usize>> {
    let mut pos = vec![0usize; ts.len()];
    let mut rows = vec![pos.clone()];
    loop {
        let open: Vec<usize> = (0..ts.len()).filter(|&i| pos[i] + 1 < ts[i].len()).collect();
        if open.is_empty() {
            return rows;
        }
        let mut moved = false;
        for &i in &open {
            if rng.random_bool(0.5) {
                pos[i] += 1;
                moved = true;
            }
        }
        if !moved {
            pos[*open.choose(rng).unwrap()] += 1;
        }
        rows.push(pos.clone());
    }
}

const REALIZE_ATTEMPTS: usize = 64;

/// A model satisfying the ground formula `f`: a random IS member of `f`'s
/// timelines, each state held for a random duration with exactly its
/// positive atoms true, plus distractor atoms that avoid every `~p` in
/// force.
pub fn realize<R: Rng + ?Sized>(
    rng: &mut R,
    f: &AmaFormula,
    name: &str,
    cfg: &RealizeConfig,
) -> Result<TemporalModel> {
    if !f.is_ground() {
        return Err(Error::NotGround(f.to_string()));
    }
    let noise_atoms: BTreeSet<Atom> = cfg.distractors.iter().cloned().collect();
    let vocab: BTreeSet<Atom> = f.atoms().into_iter().chain(noise_atoms.iter().cloned()).collect();
    for _ in 0..REALIZE_ATTEMPTS {
        let rows = random_interdigitation(rng, f.timelines());
        let mut segments = Vec::with_capacity(rows.len());
        let mut ok = true;
        for row in &rows {
            let (mut pos, mut neg) = (BTreeSet::new(), BTreeSet::new());
            for (t, &i) in f.timelines().iter().zip(row) {
                for l in t.states()[i].literals() {
                    if l.is_positive() {
                        pos.insert(l.atom.clone());
                    } else {
                        neg.insert(l.atom.clone());
                    }
                }
            }
            if !pos.is_disjoint(&neg) {
                ok = false;
                break;
            }
            for a in &noise_atoms {
                if !neg.contains(a) && cfg.noise > 0.0 && rng.random_bool(cfg.noise) {
                    pos.insert(a.clone());
                }
            }
            segments.push(pos);
        }
        if !ok {
            continue;
        }
        let mut points = Vec::new();
        for seg in segments {
            let d = rng.random_range(1..=cfg.max_duration.max(1));
            points.extend(std::iter::repeat_n(seg, d));
        }
        let mut m = TemporalModel::from_points(name, cfg.start, &points)?;
        m.declare(vocab)?;
        return Ok(m);
    }
    Err(Error::Domain(format!(
        "could not realize `{f}`: its timelines force an atom both true and never true"
    )))
}

/// `n` distinct object names `{prefix}{number}` drawn at random.
pub fn fresh_objects<R: Rng + ?Sized>(rng: &mut R, prefix: &str, n: usize) -> Vec<String> {
    let mut pool: Vec<u32> = (0..(n as u32 * 10).max(10)).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool.into_iter().map(|i| format!("{prefix}{i}")).collect()
}

/// A model of `def` with the head bound to fresh objects; returns the model
/// and the head arguments.
pub fn realize_event<R: Rng + ?Sized>(
    rng: &mut R,
    def: &EventDefinition,
    name: &str,
    cfg: &RealizeConfig,
) -> Result<(TemporalModel, Vec<String>)> {
    let objects = fresh_objects(rng, "o", def.arity());
    let binding: BTreeMap<String, String> = def.head.iter().cloned().zip(objects.iter().cloned()).collect();
    let mut cfg = cfg.clone();
    cfg.distractors = cfg.distractors.iter().map(|a| a.map_terms(|t| bind(t, &binding))).collect();
    let m = realize(rng, &ground(&def.formula, &binding), name, &cfg)?;
    Ok((m, objects))
}

fn bind(t: &Term, binding: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Variable(v) => binding.get(&**v).map_or_else(|| t.clone(), |c| Term::constant(c)),
        Term::Constant(_) => t.clone(),
    }
}

/// `n` positives of `def` named `{prefix}{i}`, with labels marking each as
/// an example and an intended occurrence.
pub fn generate_positives<R: Rng + ?Sized>(
    rng: &mut R,
    def: &EventDefinition,
    n: usize,
    prefix: &str,
    cfg: &RealizeConfig,
) -> Result<(Vec<TemporalModel>, Labels)> {
    let mut models = Vec::with_capacity(n);
    let mut labels = Labels::default();
    for i in 0..n {
        let name = format!("{prefix}{i}");
        let (m, args) = realize_event(rng, def, &name, cfg)?;
        let occ = Occurrence {
            model: name.clone(),
            event: def.name.clone(),
            args,
        };
        labels.examples.push(occ.clone());
        labels.intends.insert(occ);
        labels.annotated.insert(name);
        models.push(m);
    }
    Ok((models, labels))
}

/// Ground truths of the blocks-world suite.
pub const BLOCKS_DEFINITIONS: &str = "\
define PICKUP(?h,?b,?t) := {contacts(?t,?b),supports(?t,?b)};{attached(?h,?b),contacts(?t,?b),supports(?t,?b)};{attached(?h,?b),supports(?h,?b)}
define PUTDOWN(?h,?b,?t) := {attached(?h,?b),supports(?h,?b)};{attached(?h,?b),contacts(?t,?b),supports(?t,?b)};{contacts(?t,?b),supports(?t,?b)}
define MOVE(?h,?b,?f,?t) := {contacts(?f,?b),supports(?f,?b)};{attached(?h,?b),contacts(?f,?b),supports(?f,?b)};{attached(?h,?b),supports(?h,?b)};{attached(?h,?b),contacts(?t,?b),supports(?t,?b)};{contacts(?t,?b),supports(?t,?b)}
";

pub fn blocks_definitions() -> Vec<EventDefinition> {
    parse_definitions(BLOCKS_DEFINITIONS).expect("built-in definitions parse")
}

/// Models of every blocks event (`per_event` each) with intended-event
/// labels, including the pick-up and put-down inside each move.
pub fn blocks_suite<R: Rng + ?Sized>(
    rng: &mut R,
    per_event: usize,
    cfg: &RealizeConfig,
) -> Result<(Vec<TemporalModel>, Labels)> {
    let defs = blocks_definitions();
    let mut models = Vec::new();
    let mut labels = Labels::default();
    for def in &defs {
        let mut cfg = cfg.clone();
        // Contact between the hand and the other objects is incidental.
        cfg.distractors = def.head[1..]
            .iter()
            .map(|o| Atom::new("contacts", vec![Term::variable(&def.head[0]), Term::variable(o)]))
            .collect();
        let prefix = format!("{}-", def.name.to_lowercase());
        let (ms, ls) = generate_positives(rng, def, per_event, &prefix, &cfg)?;
        for o in &ls.examples {
            if def.name == "MOVE" {
                let a = &o.args;
                for (event, args) in [("PICKUP", [&a[0], &a[1], &a[2]]), ("PUTDOWN", [&a[0], &a[1], &a[3]])] {
                    labels.intends.insert(Occurrence {
                        model: o.model.clone(),
                        event: event.into(),
                        args: args.iter().map(|s| s.to_string()).collect(),
                    });
                }
            }
        }
        labels.examples.extend(ls.examples);
        labels.intends.extend(ls.intends);
        labels.annotated.extend(ls.annotated);
        models.extend(ms);
    }
    Ok((models, labels))
}

/// A correspondence-recovery instance: models of one relational event over
/// fresh object names, with the planted object-to-role maps.
#[derive(Clone, Debug)]
pub struct CorrespondenceInstance {
    pub models: Vec<TemporalModel>,
    pub planted: Vec<BTreeMap<String, usize>>,
}

/// `count` models of `def`, each with its head bound to fresh objects.
pub fn correspondence_instance<R: Rng + ?Sized>(
    rng: &mut R,
    def: &EventDefinition,
    count: usize,
    cfg: &RealizeConfig,
) -> Result<CorrespondenceInstance> {
    let mut models = Vec::with_capacity(count);
    let mut planted = Vec::with_capacity(count);
    for i in 0..count {
        let (m, args) = realize_event(rng, def, &format!("m{i}"), cfg)?;
        planted.push(args.into_iter().enumerate().map(|(r, o)| (o, r)).collect());
        models.push(m);
    }
    Ok(CorrespondenceInstance { models, planted })
}

/// True when `found` equals `planted` up to one role permutation shared by
/// every model.
pub fn recovers_planted(
    found: &[crate::relational::ObjectCorrespondence],
    planted: &[BTreeMap<String, usize>],
) -> bool {
    let mut perm: BTreeMap<usize, usize> = BTreeMap::new();
    found.len() == planted.len()
        && found.iter().zip(planted).all(|(c, p)| {
            c.len() == p.len()
                && p.iter().all(|(o, &r)| match c.role_of(o) {
                    Some(f) => *perm.entry(r).or_insert(f) == f,
                    None => false,
                })
        })
        && perm.values().collect::<BTreeSet<_>>().len() == perm.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::LearnerConfig;
    use crate::model::{lgcf, satisfies};
    use crate::negation::NegationMode;
    use crate::{find_correspondences, learn, KBound};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn realized_models_satisfy_their_formula() {
        let mut r = rng(1);
        let mut shape = FormulaShape::props(3, 3, 3);
        shape.negative_rate = 0.2;
        for i in 0..200 {
            let f = random_formula(&mut r, &shape);
            let cfg = RealizeConfig { noise: 0.3, distractors: f.atoms().into_iter().collect(), ..Default::default() };
            match realize(&mut r, &f, "m", &cfg) {
                Ok(m) => assert!(satisfies(&m, &f).unwrap(), "{i}: {f}"),
                Err(e) => assert!(matches!(e, Error::Domain(_))),
            }
        }
    }

    #[test]
    fn noise_free_single_timeline_is_its_own_lgcf() {
        let f: AmaFormula = "a;b;{a,c}".parse().unwrap();
        let mut r = rng(2);
        for _ in 0..20 {
            let m = realize(&mut r, &f, "m", &RealizeConfig::default()).unwrap();
            assert_eq!(AmaFormula::from(lgcf(&m)), f);
        }
    }

    #[test]
    fn contradictory_ground_truth_is_rejected() {
        let f: AmaFormula = "{p,~p}".parse().unwrap();
        assert!(realize(&mut rng(3), &f, "m", &RealizeConfig::default()).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let defs = blocks_definitions();
        let a = generate_positives(&mut rng(4), &defs[0], 5, "p", &RealizeConfig::default()).unwrap();
        let b = generate_positives(&mut rng(4), &defs[0], 5, "p", &RealizeConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn blocks_suite_labels_subevents() {
        let (models, labels) = blocks_suite(&mut rng(5), 2, &RealizeConfig::default()).unwrap();
        assert_eq!(models.len(), 6);
        let moves: Vec<_> = labels.intends.iter().filter(|o| o.model.starts_with("move")).collect();
        assert_eq!(moves.len(), 6);
        for (m, def) in models.iter().zip(blocks_definitions().iter().flat_map(|d| [d, d])) {
            let ex = labels.examples.iter().find(|o| o.model == m.name()).unwrap();
            let b: BTreeMap<String, String> = def.head.iter().cloned().zip(ex.args.iter().cloned()).collect();
            assert!(satisfies(m, &ground(&def.formula, &b)).unwrap());
        }
    }

    #[test]
    fn planted_correspondences_are_recovered() {
        let def = &blocks_definitions()[0];
        let inst = correspondence_instance(&mut rng(6), def, 5, &RealizeConfig::default()).unwrap();
        let found = find_correspondences(&inst.models, 6).unwrap();
        assert!(recovers_planted(&found, &inst.planted));
        let mut wrong = inst.planted.clone();
        let (o0, o1) = {
            let mut keys = wrong[1].keys().cloned();
            (keys.next().unwrap(), keys.next().unwrap())
        };
        let (r0, r1) = (wrong[1][&o0], wrong[1][&o1]);
        wrong[1].insert(o0, r1);
        wrong[1].insert(o1, r0);
        assert!(!recovers_planted(&found, &wrong));
    }

    #[test]
    fn learning_from_generated_positives_covers_them() {
        let def = &blocks_definitions()[1];
        let (models, _) = generate_positives(&mut rng(7), def, 6, "p", &RealizeConfig { noise: 0.3, ..Default::default() }).unwrap();
        let cfg = LearnerConfig::new(KBound::new(3).unwrap(), NegationMode::None);
        assert!(learn("PUTDOWN", &models, &cfg).is_ok());
    }
}
