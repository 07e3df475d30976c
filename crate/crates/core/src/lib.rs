//! Specific-to-general learning of AMA temporal event definitions.
//!
//! The crate covers formula syntax, discrete temporal models, subsumption,
//! least-general generalization, negation, relational lifting and the
//! end-to-end learner.

pub mod error;
pub mod formula;
pub mod generalization;
pub mod ipel;
pub mod learner;
pub mod model;
pub mod negation;
pub mod relational;
pub mod subsumption;
pub mod synth;

pub use error::{Error, Position, Result};
pub use formula::{
    normalize_timeline, parse_atom, parse_formula, parse_timeline, state_subsumes, AmaFormula,
    Atom, KBound, Literal, Polarity, State, Term, Timeline,
};
pub use generalization::{
    ig, incremental_lgg, is_, k_cover, pairwise_lgg, semantic_lgg, syntactic_lgg, Retain,
    TimelineSet,
};
pub use model::{
    ground, lgcf, load_models, ma_projection, parse_models, satisfies, satisfies_on, scan_all,
    scan_occurrences, timeline_satisfied, write_models, Interval, TemporalModel,
};
pub use negation::{
    fold_negation, learning_vocab, transform_model, unfold_negation, DualAtomMap, NegationMode,
};
pub use subsumption::{
    enumerate_interdigitations, is_witness, ma_subsumes, ma_subsumes_oracle, semantic_subsumes,
    syntactic_subsumes, syntactic_subsumes_neg, Interdigitation, SubsumptionGraph,
};
pub use relational::{
    correspondence_score, find_correspondences, lift, lift_with_map, propositionalize,
    AddDeleteSignature, ObjectCorrespondence, DEFAULT_MAX_OBJECTS,
};
pub use ipel::{
    allen_holds, ama_to_ipel, clause_timeline, gen_hard_instances, ipel_satisfies, is_square,
    span, AllenRelation, HardInstance, IpelFormula,
};
pub use learner::{
    classify, evaluate, learn, learn_detailed, load_definitions, load_labels, parse_definitions,
    parse_labels, score_definitions, CorrespondenceMode, Detection, EvalConfig, EvalReport, EventDefinition,
    EventMetrics, Labels, Learned, LearnerConfig, Occurrence, Provenance,
};
