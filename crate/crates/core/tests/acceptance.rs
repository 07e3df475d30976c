//! Acceptance suite: every criterion runs under its time limit and prints
//! PASS or FAIL. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use amalearn::subsumption::semantically_equivalent;
use amalearn::synth::{
    blocks_definitions, blocks_suite, correspondence_instance, generate_positives, random_formula,
    realize, recovers_planted, FormulaShape, RealizeConfig,
};
use amalearn::{
    ama_to_ipel, find_correspondences, gen_hard_instances, ipel_satisfies, is_square, k_cover,
    learn_detailed, lgcf, ma_subsumes, ma_subsumes_oracle, parse_formula, parse_models,
    satisfies, semantic_lgg, semantic_subsumes, syntactic_lgg, syntactic_subsumes,
    syntactic_subsumes_neg, transform_model, unfold_negation, AmaFormula, Atom, CorrespondenceMode,
    EvalConfig, HardInstance, Interval, KBound, LearnerConfig, Literal, NegationMode, State,
    TemporalModel, Timeline,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn f(text: &str) -> AmaFormula {
    parse_formula(text).unwrap()
}

fn k(n: usize) -> KBound {
    KBound::new(n).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// All subsets of `atoms`, as states.
fn power_states(atoms: &[Literal]) -> Vec<State> {
    (0..1u32 << atoms.len())
        .map(|mask| {
            State::new(
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, l)| l.clone()),
            )
        })
        .collect()
}

/// Every sequence of 1..=max_len items from `alphabet`.
fn sequences<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|p| {
                alphabet.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s.clone());
                    q
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn timelines(states: &[State], max_len: usize) -> Vec<Timeline> {
    sequences(states, max_len)
        .into_iter()
        .map(|s| Timeline::new(s).unwrap())
        .collect()
}

/// Every model of 1..=max_len points over `atoms`.
fn model_grid(atoms: &[Atom], max_len: usize) -> Vec<TemporalModel> {
    let subsets: Vec<BTreeSet<Atom>> = (0..1u32 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect();
    sequences(&subsets, max_len)
        .iter()
        .map(|pts| TemporalModel::from_points("grid", 0, pts).unwrap())
        .collect()
}

fn pos(names: &[&str]) -> Vec<Literal> {
    names.iter().map(|n| Literal::pos(Atom::prop(n))).collect()
}

fn ac1() -> Outcome {
    let sem = semantic_lgg(&[f("A;B & B;A"), f("A;B;A")]);
    check(
        semantically_equivalent(&sem, &f("A;B;A")).map_err(|e| e.to_string())?,
        || format!("semantic LGG was {sem}"),
    )?;
    let syn = syntactic_lgg(&[f("A;B & B;A"), f("A;B;A")]);
    check(syn.to_string() == "A;B;true & true;B;A", || format!("syntactic LGG was {syn}"))?;
    let want = "{a,b};a;d;e & {a,b};b;e;true;e";
    let pair = [f("{a,b,c};{b,c,d};e"), f("{a,b,e};a;{e,d}")];
    for (label, got) in [("semantic", semantic_lgg(&pair)), ("syntactic", syntactic_lgg(&pair))] {
        check(got.to_string() == want, || format!("{label} LGG of the MA pair was {got}"))?;
    }
    Ok("three worked LGGs exact".into())
}

fn ac2() -> Outcome {
    let m = parse_models(
        "model fig3\ninterval 1 6\nfact a@[1,4]\nfact b@[3,6]\nfact c@[6,6]\nfact d@[1,3]\nfact d@[5,6]\n",
    )
    .map_err(|e| e.to_string())?;
    let got = lgcf(&m[0]).to_string();
    check(got == "{a,d};{a,b,d};{a,b};{b,d};{b,c,d}", || format!("LGCF was {got}"))?;
    Ok(got)
}

fn ac3() -> Outcome {
    // Timelines of up to four states over the subsets of {a,b}; a superset of
    // the three-state grid.
    let ts = timelines(&power_states(&pos(&["a", "b"])), 4);
    let mut pairs = 0usize;
    for t1 in &ts {
        for t2 in &ts {
            pairs += 1;
            let (fast, slow) = (ma_subsumes(t1, t2), ma_subsumes_oracle(t1, t2));
            check(fast == slow, || format!("disagree on {t1} vs {t2}: {fast} vs {slow}"))?;
        }
    }
    Ok(format!("{pairs} ordered pairs agree"))
}

/// Independent IS enumeration: every interdigitation of `ts`, each tuple
/// replaced by the union of its states.
fn is_members(ts: &[Timeline]) -> Vec<Vec<BTreeSet<Literal>>> {
    fn go(ts: &[Timeline], pos: &mut Vec<usize>, acc: &mut Vec<BTreeSet<Literal>>, out: &mut Vec<Vec<BTreeSet<Literal>>>) {
        let here: BTreeSet<Literal> = ts
            .iter()
            .zip(pos.iter())
            .flat_map(|(t, &i)| t.states()[i].literals().iter().cloned())
            .collect();
        acc.push(here);
        let open: Vec<usize> = (0..ts.len()).filter(|&i| pos[i] + 1 < ts[i].len()).collect();
        if open.is_empty() {
            out.push(acc.clone());
        } else {
            for mask in 1u32..1 << open.len() {
                for (b, &i) in open.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        pos[i] += 1;
                    }
                }
                go(ts, pos, acc, out);
                for (b, &i) in open.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        pos[i] -= 1;
                    }
                }
            }
        }
        acc.pop();
    }
    let mut out = Vec::new();
    go(ts, &mut vec![0; ts.len()], &mut Vec::new(), &mut out);
    out
}

/// Brute-force witness search: can `general` be laid over `specific` with
/// each specific state covering the general state it meets?
fn witness(general: &[BTreeSet<Literal>], specific: &[BTreeSet<Literal>]) -> bool {
    fn go(g: &[BTreeSet<Literal>], s: &[BTreeSet<Literal>], i: usize, j: usize) -> bool {
        if !g[i].is_subset(&s[j]) {
            return false;
        }
        if i + 1 == g.len() && j + 1 == s.len() {
            return true;
        }
        (i + 1 < g.len() && go(g, s, i + 1, j))
            || (j + 1 < s.len() && go(g, s, i, j + 1))
            || (i + 1 < g.len() && j + 1 < s.len() && go(g, s, i + 1, j + 1))
    }
    go(general, specific, 0, 0)
}

fn set_of(t: &Timeline) -> Vec<BTreeSet<Literal>> {
    t.states().iter().map(|s| s.literals().iter().cloned().collect()).collect()
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let shape = FormulaShape::props(3, 2, 3);
    let (mut yes, mut total) = (0, 0);
    while total < 1000 {
        let (p1, p2) = (random_formula(&mut rng, &shape), random_formula(&mut rng, &shape));
        let got = semantic_subsumes(&p1, &p2).map_err(|e| e.to_string())?;
        let want = is_members(p1.timelines())
            .iter()
            .all(|m| p2.timelines().iter().all(|t| witness(&set_of(t), m)));
        check(got == want, || format!("{p1} <= {p2}: got {got}, oracle {want}"))?;
        yes += usize::from(got);
        total += 1;
    }
    Ok(format!("{total} pairs agree ({yes} subsumed)"))
}

fn ac5() -> Outcome {
    let ab = f("{A,B}");
    let chain = [f("A;B"), f("A;B;A;B"), f("A;B;A;B;A;B")];
    for c in &chain {
        check(semantic_subsumes(&ab, c).map_err(|e| e.to_string())?, || format!("{{A,B}} not below {c}"))?;
    }
    // Spot set: each answer must match a bounded model search, which is
    // complete here because any counterexample has at most three points.
    let spots = ["{A,B,C}", "{A,B};{A,B,C}", "{A,B,C};C", "A", "B;A", "{A,B};A", "A;B", "C"];
    let grid = model_grid(&[Atom::prop("A"), Atom::prop("B"), Atom::prop("C")], 3);
    let mut checked = 0;
    for s in spots {
        let s = f(s);
        for c in &chain {
            let got = semantic_subsumes(&s, c).map_err(|e| e.to_string())?;
            let want = grid
                .iter()
                .all(|m| !satisfies(m, &s).unwrap() || satisfies(m, c).unwrap());
            check(got == want, || format!("{s} <= {c}: got {got}, models say {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("chain holds; {checked} spot checks agree"))
}

fn ac6() -> Outcome {
    let mut counts = Vec::new();
    for (n, want) in [(2, 2), (3, 6), (4, 20)] {
        let g = gen_hard_instances(HardInstance::Theorem17Grid(n)).map_err(|e| e.to_string())?;
        let lgg = semantic_lgg(&g);
        let squares = lgg.timelines().iter().filter(|t| is_square(t)).count();
        check(squares == want, || format!("n={n}: {squares} squares, expected {want}"))?;
        counts.push(format!("n={n}:{squares}/{}", lgg.len()));
    }
    Ok(counts.join(" "))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = FormulaShape::props(4, 3, 5);
    for i in 0..500 {
        let phi = random_formula(&mut rng, &shape);
        let kk = rng.random_range(1..=4);
        let (lo, hi) = (k_cover(k(kk), &phi), k_cover(k(kk + 1), &phi));
        check(syntactic_subsumes(&phi, &lo), || format!("#{i}: {phi} not below its {kk}-cover {lo}"))?;
        check(lo.max_timeline_len() <= kk, || format!("#{i}: {lo} longer than {kk}"))?;
        check(syntactic_subsumes(&hi, &lo), || format!("#{i}: {}-cover {hi} not below {kk}-cover {lo}", kk + 1))?;
    }
    Ok("500 formulas".into())
}

fn ac8() -> Outcome {
    let (p, q) = (Atom::prop("p"), Atom::prop("q"));
    let lits = vec![
        Literal::pos(p.clone()),
        Literal::pos(q.clone()),
        Literal::never(p.clone()),
        Literal::never(q.clone()),
    ];
    let ts = timelines(&power_states(&lits), 2);
    let mut formulas = Vec::new();
    for i in 0..ts.len() {
        for j in i..ts.len() {
            formulas.push(AmaFormula::new(vec![ts[i].clone(), ts[j].clone()]).unwrap());
        }
    }
    let vocab: BTreeSet<Atom> = [p.clone(), q.clone()].into();
    let models = model_grid(&[p, q], 3);
    let unfolded: Vec<AmaFormula> = formulas.iter().map(unfold_negation).collect();
    let mut checks = 0usize;
    for m in &models {
        let t = transform_model(m, NegationMode::Full, &vocab).map_err(|e| e.to_string())?;
        for (phi, u) in formulas.iter().zip(&unfolded) {
            let (a, b) = (satisfies(m, phi).unwrap(), satisfies(&t, u).unwrap());
            check(a == b, || format!("{phi} on {}: {a} vs {b}", amalearn::write_models(&[m.clone()])))?;
            checks += 1;
        }
    }
    Ok(format!("{} models x {} formulas = {checks} checks", models.len(), formulas.len()))
}

fn ac9() -> Outcome {
    let phi1 = f("{a,b,c};b;a;b;{a,b,~c}");
    let phi2 = f("b;a;c;a;b;a;~c;a;b");
    check(!syntactic_subsumes_neg(&phi1, &phi2), || "a witness was found".into())?;
    Ok("no witnessing interdigitation".into())
}

fn ac10() -> Outcome {
    let pickup = &blocks_definitions()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cfg = RealizeConfig::default();
    let mut recovered = 0;
    for i in 0..50 {
        let inst = correspondence_instance(&mut rng, pickup, 6, &cfg).map_err(|e| e.to_string())?;
        let found = find_correspondences(&inst.models, 6).map_err(|e| e.to_string())?;
        check(recovers_planted(&found, &inst.planted), || format!("instance {i} not recovered"))?;
        recovered += 1;
    }
    Ok(format!("{recovered}/50 recovered"))
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Two timelines of up to three states over four atoms. With three
    // timelines, twenty positives often miss interdigitations that held-out
    // positives use.
    let shape = FormulaShape::props(4, 2, 3);
    let cfg = LearnerConfig::new(k(3), NegationMode::None);
    let realize_cfg = RealizeConfig::default();
    for g in 0..20 {
        let truth = random_formula(&mut rng, &shape);
        let def = amalearn::EventDefinition {
            name: "G".into(),
            head: vec![],
            formula: truth.clone(),
            provenance: None,
        };
        let (train, _) = generate_positives(&mut rng, &def, 20, "t", &realize_cfg).map_err(|e| e.to_string())?;
        let learned = learn_detailed("G", &train, &cfg).map_err(|e| format!("{truth}: {e}"))?;
        let l = learned.definition.formula;
        for m in &train {
            check(satisfies(m, &l).unwrap(), || format!("#{g}: {l} misses training model"))?;
        }
        check(syntactic_subsumes_neg(&l, &truth), || format!("#{g}: {l} not below {truth}"))?;
        for i in 0..50 {
            let m = realize(&mut rng, &truth, &format!("h{i}"), &realize_cfg).map_err(|e| e.to_string())?;
            check(satisfies(&m, &l).unwrap(), || {
                format!("#{g}: {l} (from {truth}) misses held-out {}", lgcf(&m))
            })?;
        }
    }
    Ok("20 ground truths: training, sandwich and held-out coverage hold".into())
}

fn ac12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let realize_cfg = RealizeConfig { noise: 0.3, ..Default::default() };
    let (models, labels) = blocks_suite(&mut rng, 10, &realize_cfg).map_err(|e| e.to_string())?;
    let mut per_k: Vec<BTreeMap<String, (f64, f64)>> = Vec::new();
    for kk in [2, 3, 4] {
        let mut learner = LearnerConfig::new(k(kk), NegationMode::None);
        learner.correspondence = CorrespondenceMode::Given;
        let report = amalearn::evaluate(
            &models,
            &labels,
            &EvalConfig { learner, n: 9, repeats: 2, seed: 12 },
        )
        .map_err(|e| e.to_string())?;
        per_k.push(report.events.iter().map(|e| (e.event.clone(), (e.fp_rate, e.fn_rate))).collect());
    }
    let mut trail = Vec::new();
    for event in per_k[0].keys() {
        let series: Vec<(f64, f64)> = per_k.iter().map(|m| m[event]).collect();
        for w in series.windows(2) {
            check(w[1].0 <= w[0].0, || format!("{event}: FP rose {series:?}"))?;
            check(w[1].1 >= w[0].1, || format!("{event}: FN fell {series:?}"))?;
        }
        trail.push(format!(
            "{event} FP {} FN {}",
            series.iter().map(|s| format!("{:.2}", s.0)).collect::<Vec<_>>().join(">="),
            series.iter().map(|s| format!("{:.2}", s.1)).collect::<Vec<_>>().join("<=")
        ));
    }

    for def in blocks_definitions() {
        let train: Vec<TemporalModel> = labels
            .examples
            .iter()
            .filter(|o| o.event == def.name)
            .map(|o| {
                let mut m = models.iter().find(|m| m.name() == o.model).unwrap().clone();
                for (r, obj) in o.args.iter().enumerate() {
                    m.set_role(obj, r).unwrap();
                }
                m
            })
            .collect();
        let learned: Vec<AmaFormula> = [NegationMode::Full, NegationMode::Boundary, NegationMode::None]
            .into_iter()
            .map(|mode| {
                let mut c = LearnerConfig::new(k(3), mode);
                c.correspondence = CorrespondenceMode::Given;
                learn_detailed(&def.name, &train, &c).map(|l| l.ground)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        check(syntactic_subsumes_neg(&learned[0], &learned[1]), || {
            format!("{}: full {} not below boundary {}", def.name, learned[0], learned[1])
        })?;
        check(syntactic_subsumes_neg(&learned[1], &learned[2]), || {
            format!("{}: boundary {} not below none {}", def.name, learned[1], learned[2])
        })?;
    }
    trail.push("full <= boundary <= none for every event".into());
    Ok(trail.join("; "))
}

fn ac13() -> Outcome {
    let states = power_states(&pos(&["a", "b"]));
    let ts = timelines(&states, 2);
    let mut formulas = Vec::new();
    for i in 0..ts.len() {
        for j in i..ts.len() {
            formulas.push(AmaFormula::new(vec![ts[i].clone(), ts[j].clone()]).unwrap());
        }
    }
    let encoded: Vec<_> = formulas.iter().map(|f| ama_to_ipel(f).unwrap()).collect();
    let models = model_grid(&[Atom::prop("a"), Atom::prop("b")], 4);
    let mut checks = 0usize;
    for m in &models {
        let iv = m.interval();
        for (phi, e) in formulas.iter().zip(&encoded) {
            for lo in iv.lo..=iv.hi {
                for hi in lo..=iv.hi {
                    let sub = Interval { lo, hi };
                    let a = amalearn::model::satisfies_on(m, phi, sub).unwrap();
                    let b = ipel_satisfies(m, sub, e).unwrap();
                    check(a == b, || format!("{phi} on {sub}: AMA {a}, IPEL {b}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} interval checks agree"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 13] = [
        ("worked-example LGGs", 1, ac1),
        ("LGCF of the example model", 1, ac2),
        ("MA subsumption vs witness search", 60, ac3),
        ("AMA subsumption vs IS enumeration", 120, ac4),
        ("descending chain", 1, ac5),
        ("square timeline counts", 300, ac6),
        ("k-cover laws", 60, ac7),
        ("negation round trip", 120, ac8),
        ("negated pair without witness", 1, ac9),
        ("correspondence recovery", 30, ac10),
        ("learner soundness and recovery", 300, ac11),
        ("k and negation trends", 300, ac12),
        ("IPEL agreement", 60, ac13),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let id = format!("AC{:02}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let verdict = match &outcome {
            Ok(_) if took < limit => "PASS",
            _ => "FAIL",
        };
        let detail = match outcome {
            Ok(d) if took < limit => d,
            Ok(d) => format!("{d}; exceeded {}s limit", limit.as_secs()),
            Err(e) => e,
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{verdict} {id} {name} ({:.2}s): {detail}", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
