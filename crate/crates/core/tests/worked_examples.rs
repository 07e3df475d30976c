//! Small hand-checked examples exercised through the public API.

use std::collections::{BTreeMap, BTreeSet};

use amalearn::{
    allen_holds, correspondence_score, enumerate_interdigitations, fold_negation, gen_hard_instances, ig, is_,
    k_cover, learn, learning_vocab, lgcf, lift, ma_subsumes, pairwise_lgg, parse_definitions, parse_formula,
    parse_labels, parse_models, parse_timeline, propositionalize, satisfies, scan_occurrences, score_definitions,
    semantic_lgg, semantic_subsumes, span, syntactic_lgg, syntactic_subsumes, syntactic_subsumes_neg,
    transform_model, AllenRelation, AmaFormula, Atom, HardInstance, Interval, KBound, LearnerConfig, NegationMode,
    ObjectCorrespondence, Timeline,
};

fn f(s: &str) -> AmaFormula {
    parse_formula(s).unwrap()
}

fn t(s: &str) -> Timeline {
    parse_timeline(s).unwrap()
}

fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn k(n: usize) -> KBound {
    KBound::new(n).unwrap()
}

const FIG3: &str = "model fig3\ninterval 1 6\nfact a@[1,4]\nfact b@[3,6]\nfact c@[6,6]\nfact d@[1,3]\nfact d@[5,6]\n";

#[test]
fn printing_is_canonical() {
    assert_eq!(f("{b,a}").to_string(), "{a,b}");
    assert_eq!(f("true").to_string(), "true");
    assert_eq!(f("a;b & b;a").len(), 2);
    assert_eq!(t("a;a;b;b;b").normalize(), t("a;b"));
}

#[test]
fn figure_three_model() {
    let m = &parse_models(FIG3).unwrap()[0];
    let points: Vec<String> = (1..=6)
        .map(|p| m.atoms_at(p).iter().map(Atom::to_string).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(points, ["a,d", "a,d", "a,b,d", "a,b", "b,d", "b,c,d"]);
    assert_eq!(lgcf(m).to_string(), "{a,d};{a,b,d};{a,b};{b,d};{b,c,d}");
    assert!(scan_occurrences(m, &lgcf(m).into()).unwrap().contains(&iv(1, 6)));
}

#[test]
fn satisfaction_and_occurrences() {
    let ab = &parse_models("model m\ninterval 1 1\nfact A@[1,1]\nfact B@[1,1]\n").unwrap()[0];
    assert!(satisfies(ab, &f("A;B")).unwrap());
    let m = &parse_models("model m\ninterval 1 2\nfact a@[1,1]\nfact b@[2,2]\n").unwrap()[0];
    assert!(satisfies(m, &f("a;b")).unwrap());
    assert!(!satisfies(m, &f("b;a")).unwrap());
    let m = &parse_models("model m\ninterval 1 3\nfact a@[1,1]\nfact b@[2,2]\nfact a@[3,3]\n").unwrap()[0];
    assert_eq!(scan_occurrences(m, &f("a;b")).unwrap(), [iv(1, 2)]);
    assert_eq!(scan_occurrences(m, &f("true")).unwrap(), [iv(1, 3)]);
}

#[test]
fn interdigitation_counts() {
    assert_eq!(enumerate_interdigitations(&[t("a"), t("b")]).count(), 1);
    assert_eq!(enumerate_interdigitations(&[t("A;B"), t("B;A")]).count(), 3);
    assert_eq!(enumerate_interdigitations(&[t("a;b;c"), t("d;e;g")]).count(), 13);
}

#[test]
fn interdigitation_generalizations_of_the_running_pair() {
    let got: BTreeSet<Timeline> = ig(&[t("{a,b,c};{b,c,d};e"), t("{a,b,e};a;{e,d}")]).into_iter().collect();
    let listed = [
        "{a,b};b;e;true;e",
        "{a,b};b;true;e",
        "{a,b};b;true;true;e",
        "{a,b};b;true;d;e",
        "{a,b};true;true;e",
        "{a,b};true;e",
        "{a,b};true;d;e",
        "{a,b};a;true;true;e",
        "{a,b};a;true;e",
        "{a,b};a;true;d;e",
        "{a,b};a;d;e",
    ];
    let want: BTreeSet<Timeline> = listed.iter().map(|s| t(s)).collect();
    assert_eq!(got, want);
}

#[test]
fn interdigitation_specializations() {
    let got: BTreeSet<Timeline> = is_(&[t("A;B"), t("B;A")]).collect();
    let want: BTreeSet<Timeline> = ["{A,B};B;{A,B}", "{A,B}", "{A,B};A;{A,B}"].iter().map(|s| t(s)).collect();
    assert_eq!(got, want);
    assert_eq!(is_(&[t("a;b")]).collect::<Vec<_>>(), [t("a;b")]);
    assert_eq!(is_(&[t("a"), t("b")]).collect::<Vec<_>>(), [t("{a,b}")]);
}

#[test]
fn subsumption_examples() {
    assert!(ma_subsumes(&t("{A,B}"), &t("A;B")));
    assert!(!ma_subsumes(&t("A;B"), &t("B;A")));
    let conj = f("A;B & B;A");
    assert!(semantic_subsumes(&conj, &f("A;B;A")).unwrap());
    assert!(!semantic_subsumes(&f("A;B;A"), &conj).unwrap());
    assert!(!syntactic_subsumes(&conj, &f("A;B;A")));
    assert!(syntactic_subsumes(&conj, &f("A;B;true & true;B;A")));
    for chain in ["A;B", "A;B;A;B", "A;B;A;B;A;B"] {
        assert!(semantic_subsumes(&f("{A,B}"), &f(chain)).unwrap(), "{chain}");
    }
    let phi1 = f("{a,b,c};b;a;b;{a,b,~c}");
    let phi2 = f("b;a;c;a;b;a;~c;a;b");
    assert!(!syntactic_subsumes_neg(&phi1, &phi2));
}

#[test]
fn generalization_examples() {
    let (p1, p2) = (f("{a,b,c};{b,c,d};e"), f("{a,b,e};a;{e,d}"));
    let want = "{a,b};a;d;e & {a,b};b;e;true;e";
    assert_eq!(semantic_lgg(&[p1.clone(), p2.clone()]).to_string(), want);
    assert_eq!(syntactic_lgg(&[p1, p2]).to_string(), want);
    let (conj, seq) = (f("A;B & B;A"), f("A;B;A"));
    assert_eq!(semantic_lgg(&[conj.clone(), seq.clone()]).to_string(), "A;B;A");
    assert_eq!(syntactic_lgg(&[conj.clone(), seq.clone()]).to_string(), "A;B;true & true;B;A");
    assert_eq!(pairwise_lgg(&conj, &seq).to_string(), "A;B;true & true;B;A");
    assert_eq!(pairwise_lgg(&f("{a,b};c"), &f("a;c")).to_string(), "a;c");
}

#[test]
fn k_cover_examples() {
    assert_eq!(k_cover(k(1), &f("a;b;c")).to_string(), "true");
    assert_eq!(k_cover(k(2), &f("a;b;c")).to_string(), "a;true & true;c");
    assert_eq!(k_cover(k(3), &f("a;b;c")).to_string(), "a;b;c");
}

#[test]
fn negation_examples() {
    let m = &parse_models("model m\ninterval 1 3\nfact p@[2,2]\n").unwrap()[0];
    let vocab = learning_vocab(std::slice::from_ref(m));
    let full = transform_model(m, NegationMode::Full, &vocab).unwrap();
    let boundary = transform_model(m, NegationMode::Boundary, &vocab).unwrap();
    let folded = |m| fold_negation(&lgcf(m).into()).unwrap().to_string();
    assert_eq!(folded(&full), "~p;p;~p");
    assert_eq!(folded(&boundary), "~p;p;~p");

    let always = &parse_models("model m\ninterval 1 3\nfact p@[1,3]\n").unwrap()[0];
    assert_eq!(folded(&transform_model(always, NegationMode::Boundary, &vocab).unwrap()), "p");
    let declared = &parse_models("model m\ninterval 1 1\nvocab q\nfact a@[1,1]\n").unwrap()[0];
    assert_eq!(learning_vocab(std::slice::from_ref(declared)), BTreeSet::from([Atom::prop("a")]));
}

#[test]
fn allen_relations_and_span() {
    assert!(allen_holds(AllenRelation::Meets, iv(1, 2), iv(3, 4)));
    assert!(allen_holds(AllenRelation::Equals, iv(2, 5), iv(2, 5)));
    assert!(allen_holds(AllenRelation::During, iv(2, 3), iv(1, 4)));
    assert!(!allen_holds(AllenRelation::During, iv(1, 4), iv(2, 3)));
    assert_eq!(span(iv(1, 2), iv(4, 6)), iv(1, 6));
    assert_eq!(span(iv(3, 5), iv(1, 2)), iv(1, 5));
    assert_eq!(span(iv(2, 2), iv(2, 2)), iv(2, 2));
}

#[test]
fn hard_instances() {
    let grid = gen_hard_instances(HardInstance::Theorem17Grid(2)).unwrap();
    let printed: Vec<String> = grid.iter().map(ToString::to_string).collect();
    assert_eq!(printed, ["{p1_1,p1_2};{p2_1,p2_2}", "{p1_1,p2_1};{p1_2,p2_2}"]);
    let clauses = gen_hard_instances(HardInstance::Lemma10Clauses(1)).unwrap();
    assert_eq!(clauses[0].len(), 2);
    assert!(clauses[0].timelines().iter().all(|t| t.len() == 4));
}

#[test]
fn relational_examples() {
    let adds = |add: &str, del: &str| {
        parse_models(&format!("model m\ninterval 0 1\nfact clear(r1)@[0,0]\n{del}\nfact on(r0,r1)@[1,1]\n{add}\n"))
            .unwrap()
            .remove(0)
    };
    let m1 = adds("", "");
    let m2 = adds("fact wet(r0)@[1,1]", "");
    assert_eq!(correspondence_score(&m1, &m2), 2);

    let pick = &parse_models(
        "model p\ninterval 0 1\nfact supports(table,block)@[0,1]\nfact attached(hand,block)@[1,1]\n",
    )
    .unwrap()[0];
    let roles = BTreeMap::from([("hand".to_string(), 0), ("block".to_string(), 1), ("table".to_string(), 2)]);
    let prop = propositionalize(pick, &ObjectCorrespondence::new(roles).unwrap()).unwrap();
    assert!(lgcf(&prop).to_string().contains("supports(r2,r1)"));
    assert_eq!(
        lift(&f("supports(r2,r1);attached(r0,r1)")).unwrap().to_string(),
        "supports(?x0,?x1);attached(?x2,?x1)"
    );
}

#[test]
fn learning_the_running_pair() {
    let ms = parse_models(
        "model one\ninterval 1 3\nfact a@[1,1]\nfact b@[1,2]\nfact c@[1,2]\nfact d@[2,2]\nfact e@[3,3]\n\
         model two\ninterval 1 3\nfact a@[1,2]\nfact b@[1,1]\nfact e@[1,1]\nfact e@[3,3]\nfact d@[3,3]\n",
    )
    .unwrap();
    let def = learn("E", &ms, &LearnerConfig::new(k(5), NegationMode::None)).unwrap();
    assert_eq!(def.formula.to_string(), "{a,b};a;d;e & {a,b};b;e;true;e");
}

#[test]
fn scoring_a_perfect_and_a_silent_detector() {
    let ms = parse_models("model m1\ninterval 0 1\nfact on(x,y)@[0,0]\nfact off(x,y)@[1,1]\n").unwrap();
    let labels = parse_labels("intends m1 E(x,y)\n").unwrap();
    let perfect = parse_definitions("define E(?a,?b) := on(?a,?b);off(?a,?b)").unwrap();
    let m = &score_definitions(&perfect, &ms, &labels).unwrap()[0];
    assert_eq!((m.fp_rate, m.fn_rate), (0.0, 0.0));
    let silent = parse_definitions("define E(?a,?b) := off(?a,?b);on(?a,?b)").unwrap();
    let m = &score_definitions(&silent, &ms, &labels).unwrap()[0];
    assert_eq!((m.fp_rate, m.fn_rate, m.no_detections), (0.0, 1.0, true));
}
