//! `amalearn` command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use amalearn::synth::{self, RealizeConfig};
use amalearn::{
    classify, evaluate, gen_hard_instances, incremental_lgg, k_cover, learn, lgcf, load_definitions,
    load_labels, load_models, ma_subsumes, parse_definitions, parse_formula, semantic_lgg,
    semantic_subsumes, syntactic_lgg, syntactic_subsumes_neg, write_models, AmaFormula,
    CorrespondenceMode, Error, EvalConfig, EventDefinition, HardInstance, KBound, Labels,
    LearnerConfig, NegationMode, DEFAULT_MAX_OBJECTS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "amalearn", version, about = "Learn and apply AMA temporal event definitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a JSON report.
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone, Copy)]
struct LearnArgs {
    /// Maximum number of states per timeline.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_enum, default_value_t = NegationArg::None)]
    negation: NegationArg,
    #[arg(long, default_value_t = DEFAULT_MAX_OBJECTS)]
    max_objects: usize,
    /// Take object roles from the models (`given`) or search for them (`auto`).
    #[arg(long, value_enum, default_value_t = CorrespondenceArg::Auto)]
    correspondence: CorrespondenceArg,
}

impl LearnArgs {
    fn config(self) -> Result<LearnerConfig, Error> {
        Ok(LearnerConfig {
            k: KBound::new(self.k)?,
            negation: self.negation.into(),
            max_objects: self.max_objects,
            correspondence: match self.correspondence {
                CorrespondenceArg::Given => CorrespondenceMode::Given,
                CorrespondenceArg::Auto => CorrespondenceMode::Auto,
            },
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NegationArg {
    None,
    Boundary,
    Full,
}

impl From<NegationArg> for NegationMode {
    fn from(n: NegationArg) -> Self {
        match n {
            NegationArg::None => NegationMode::None,
            NegationArg::Boundary => NegationMode::Boundary,
            NegationArg::Full => NegationMode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrespondenceArg {
    Given,
    Auto,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SubsumeMode {
    Semantic,
    Syntactic,
    Ma,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LggMode {
    Semantic,
    Syntactic,
    /// Pairwise syntactic LGG folded over the inputs.
    Incremental,
}

#[derive(Subcommand)]
enum Command {
    /// Print the least-general covering formula of each model.
    Lgcf {
        models: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Decide whether SPECIFIC is subsumed by GENERAL.
    Subsumes {
        #[arg(long, value_enum, default_value_t = SubsumeMode::Semantic)]
        mode: SubsumeMode,
        /// Print nothing; exit 0 when subsumed and 1 otherwise.
        #[arg(long)]
        quiet: bool,
        /// Formula text, or `@path` to read it from a file.
        specific: String,
        general: String,
        #[command(flatten)]
        output: Output,
    },
    /// Least-general generalization of the given formulas.
    Lgg {
        #[arg(long, value_enum, default_value_t = LggMode::Semantic)]
        mode: LggMode,
        #[arg(required = true)]
        formulas: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Least-general k-bounded formula subsuming the input.
    Kcover {
        #[arg(long)]
        k: usize,
        formula: String,
        #[command(flatten)]
        output: Output,
    },
    /// Learn an event definition from positive training models.
    Learn {
        /// Event name for the learned definition.
        #[arg(long, default_value = "EVENT")]
        name: String,
        #[command(flatten)]
        learner: LearnArgs,
        models: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Report where learned definitions hold in each model.
    Classify {
        definitions: PathBuf,
        models: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Leave-one-out evaluation against an intended-events labels file.
    Eval {
        #[command(flatten)]
        learner: LearnArgs,
        /// Training-set size per fold.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        models: PathBuf,
        labels: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Generate synthetic models, labels or hard formula instances.
    Gen {
        /// Ground truth: definitions or a formula, as text or `@path`.
        #[arg(long, conflicts_with_all = ["suite", "hard"])]
        truth: Option<String>,
        /// Built-in suite (`blocks`).
        #[arg(long, conflicts_with = "hard")]
        suite: Option<String>,
        /// Hard instance family: `grid:N` or `clauses:N`.
        #[arg(long)]
        hard: Option<String>,
        /// Event name when the ground truth is a bare formula.
        #[arg(long, default_value = "EVENT")]
        name: String,
        /// Models per event.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chance of each extra atom per segment.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 3)]
        max_duration: usize,
        /// Where to write the labels file.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

/// Machine-readable summary of one run.
#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    events: Vec<amalearn::EventMetrics>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    definitions: Vec<String>,
    result: Value,
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type CmdResult = Result<Outcome, Failure>;

/// What a command produced: text for humans, a report for `--json`.
struct Outcome {
    text: String,
    report: RunReport,
    exit: u8,
}

fn read_arg(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn formula_arg(arg: &str) -> Result<AmaFormula, Failure> {
    Ok(parse_formula(&read_arg(arg)?)?)
}

fn report(config: Value, result: Value) -> RunReport {
    RunReport {
        command: std::env::args().collect(),
        config,
        seed: None,
        timings: None,
        events: Vec::new(),
        definitions: Vec::new(),
        result,
    }
}

fn cmd_lgcf(models: &PathBuf) -> CmdResult {
    let ms = load_models(models)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for m in &ms {
        let t = lgcf(m);
        writeln!(text, "{}: {t}", m.name()).unwrap();
        rows.push(json!({"model": m.name(), "lgcf": t.to_string()}));
    }
    Ok(Outcome { text, report: report(json!({}), Value::Array(rows)), exit: 0 })
}

fn cmd_subsumes(mode: SubsumeMode, quiet: bool, specific: &str, general: &str) -> CmdResult {
    let (s, g) = (formula_arg(specific)?, formula_arg(general)?);
    let holds = match mode {
        SubsumeMode::Semantic => semantic_subsumes(&s, &g)?,
        SubsumeMode::Syntactic => syntactic_subsumes_neg(&s, &g),
        SubsumeMode::Ma => {
            let (Some(a), Some(b)) = (single(&s), single(&g)) else {
                return Err(Error::Domain("--mode=ma takes single timelines".into()).into());
            };
            ma_subsumes(a, b)
        }
    };
    let text = if quiet { String::new() } else { format!("{holds}\n") };
    Ok(Outcome {
        text,
        report: report(json!({"mode": mode}), json!(holds)),
        exit: if quiet && !holds { 1 } else { 0 },
    })
}

fn single(f: &AmaFormula) -> Option<&amalearn::Timeline> {
    match f.timelines() {
        [t] => Some(t),
        _ => None,
    }
}

fn cmd_lgg(mode: LggMode, formulas: &[String]) -> CmdResult {
    let fs = formulas.iter().map(|a| formula_arg(a)).collect::<Result<Vec<_>, _>>()?;
    if fs.iter().any(AmaFormula::has_negation) {
        return Err(Error::NegationUnsupported("lgg inputs must be negation-free".into()).into());
    }
    let out = match mode {
        LggMode::Semantic => semantic_lgg(&fs),
        LggMode::Syntactic => syntactic_lgg(&fs),
        LggMode::Incremental => incremental_lgg(&fs),
    };
    Ok(Outcome {
        text: format!("{out}\n"),
        report: report(json!({"mode": mode}), json!(out.to_string())),
        exit: 0,
    })
}

fn cmd_kcover(k: usize, formula: &str) -> CmdResult {
    let f = formula_arg(formula)?;
    let out = k_cover(KBound::new(k)?, &f);
    Ok(Outcome {
        text: format!("{out}\n"),
        report: report(json!({"k": k}), json!(out.to_string())),
        exit: 0,
    })
}

fn cmd_learn(name: &str, args: LearnArgs, models: &PathBuf) -> CmdResult {
    let cfg = args.config()?;
    let ms = load_models(models)?;
    let def = learn(name, &ms, &cfg)?;
    let mut r = report(json!(cfg), json!(def.to_string()));
    r.definitions.push(def.to_string());
    Ok(Outcome { text: format!("{def}\n"), report: r, exit: 0 })
}

fn cmd_classify(defs: &PathBuf, models: &PathBuf) -> CmdResult {
    let defs = load_definitions(defs)?;
    let ms = load_models(models)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for m in &ms {
        for d in &defs {
            if d.arity() > m.objects().len() {
                continue;
            }
            for det in classify(d, m)? {
                writeln!(text, "{} {}({})@{}", m.name(), d.name, det.binding.join(","), det.interval).unwrap();
                rows.push(json!({"model": m.name(), "event": d.name, "binding": det.binding, "interval": det.interval}));
            }
        }
    }
    let mut r = report(json!({}), Value::Array(rows));
    r.definitions = defs.iter().map(ToString::to_string).collect();
    Ok(Outcome { text, report: r, exit: 0 })
}

fn cmd_eval(args: LearnArgs, n: usize, repeats: usize, seed: u64, models: &PathBuf, labels: &PathBuf) -> CmdResult {
    let cfg = EvalConfig { learner: args.config()?, n, repeats, seed };
    let ms = load_models(models)?;
    let labels = load_labels(labels)?;
    let rep = evaluate(&ms, &labels, &cfg)?;
    let mut text = format!(
        "# seed {seed}\n# k={} negation={} n={n} repeats={repeats}\nevent\tFP\tFN\tdetections\tintended\n",
        cfg.learner.k, cfg.learner.negation
    );
    for e in &rep.events {
        let flag = if e.no_detections { " (no detections)" } else { "" };
        writeln!(
            text,
            "{}\t{:.4}{flag}\t{:.4}\t{:.2}\t{}",
            e.event, e.fp_rate, e.fn_rate, e.detections, e.intended
        )
        .unwrap();
    }
    let mut r = report(json!(cfg), Value::Null);
    r.seed = Some(seed);
    r.events = rep.events;
    Ok(Outcome { text, report: r, exit: 0 })
}

fn parse_hard(spec: &str) -> Result<HardInstance, Failure> {
    let bad = || Failure::Usage(format!("--hard expects grid:N or clauses:N, got `{spec}`"));
    let (kind, n) = spec.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match kind {
        "grid" => Ok(HardInstance::Theorem17Grid(n)),
        "clauses" => Ok(HardInstance::Lemma10Clauses(n)),
        _ => Err(bad()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    truth: Option<&str>,
    suite: Option<&str>,
    hard: Option<&str>,
    name: &str,
    n: usize,
    seed: u64,
    noise: f64,
    max_duration: usize,
    labels_path: Option<&PathBuf>,
) -> CmdResult {
    if let Some(spec) = hard {
        let fs = gen_hard_instances(parse_hard(spec)?)?;
        let text: String = fs.iter().map(|f| format!("{f}\n")).collect();
        let r = report(json!({"hard": spec}), json!(fs.iter().map(ToString::to_string).collect::<Vec<_>>()));
        return Ok(Outcome { text, report: r, exit: 0 });
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::Domain(format!("--noise must lie in [0, 1], got {noise}")).into());
    }
    if max_duration == 0 {
        return Err(Error::Domain("--max-duration must be at least 1".into()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RealizeConfig { max_duration, noise, ..Default::default() };
    let (models, labels, defs) = match (truth, suite) {
        (Some(t), _) => {
            let text = read_arg(t)?;
            let defs = if text.lines().any(|l| l.trim_start().starts_with("define")) {
                parse_definitions(&text)?
            } else {
                vec![EventDefinition {
                    name: name.to_string(),
                    head: Vec::new(),
                    formula: parse_formula(&text)?,
                    provenance: None,
                }]
            };
            let mut models = Vec::new();
            let mut labels = Labels::default();
            for d in &defs {
                let mut cfg = cfg.clone();
                cfg.distractors = d.formula.atoms().into_iter().collect();
                let prefix = format!("{}-", d.name.to_lowercase());
                let (ms, ls) = synth::generate_positives(&mut rng, d, n, &prefix, &cfg)?;
                models.extend(ms);
                merge(&mut labels, ls);
            }
            (models, labels, defs)
        }
        (None, Some("blocks")) => {
            let (ms, ls) = synth::blocks_suite(&mut rng, n, &cfg)?;
            (ms, ls, synth::blocks_definitions())
        }
        (None, Some(other)) => return Err(Failure::Usage(format!("unknown suite `{other}`"))),
        (None, None) => return Err(Failure::Usage("gen needs --truth, --suite or --hard".into())),
    };
    let labels_text = labels.to_string();
    if let Some(p) = labels_path {
        std::fs::write(p, &labels_text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", p.display())))?;
    }
    let mut r = report(
        json!({"n": n, "noise": noise, "max_duration": max_duration}),
        json!({"models": models.len(), "labels": labels_text}),
    );
    r.seed = Some(seed);
    r.definitions = defs.iter().map(ToString::to_string).collect();
    Ok(Outcome { text: format!("# seed {seed}\n{}", write_models(&models)), report: r, exit: 0 })
}

fn merge(into: &mut Labels, from: Labels) {
    into.examples.extend(from.examples);
    into.intends.extend(from.intends);
    into.annotated.extend(from.annotated);
}

fn run(cli: Cli) -> Result<(Outcome, Output), Failure> {
    let start = Instant::now();
    let (mut outcome, output) = match cli.command {
        Command::Lgcf { models, output } => (cmd_lgcf(&models)?, output),
        Command::Subsumes { mode, quiet, specific, general, output } => {
            (cmd_subsumes(mode, quiet, &specific, &general)?, output)
        }
        Command::Lgg { mode, formulas, output } => (cmd_lgg(mode, &formulas)?, output),
        Command::Kcover { k, formula, output } => (cmd_kcover(k, &formula)?, output),
        Command::Learn { name, learner, models, output } => (cmd_learn(&name, learner, &models)?, output),
        Command::Classify { definitions, models, output } => (cmd_classify(&definitions, &models)?, output),
        Command::Eval { learner, n, repeats, seed, models, labels, output } => {
            (cmd_eval(learner, n, repeats, seed, &models, &labels)?, output)
        }
        Command::Gen { truth, suite, hard, name, n, seed, noise, max_duration, labels, output } => (
            cmd_gen(
                truth.as_deref(),
                suite.as_deref(),
                hard.as_deref(),
                &name,
                n,
                seed,
                noise,
                max_duration,
                labels.as_ref(),
            )?,
            output,
        ),
    };
    if output.timings {
        let secs = start.elapsed().as_secs_f64();
        outcome.report.timings = Some([("total_seconds".to_string(), secs)].into());
        if !output.json {
            writeln!(outcome.text, "# time {secs:.3}s").unwrap();
        }
    }
    Ok((outcome, output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, output)) => {
            let body = if output.json {
                serde_json::to_string_pretty(&outcome.report).unwrap() + "\n"
            } else {
                outcome.text
            };
            let written = match &output.out {
                Some(p) => std::fs::write(p, body).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(4);
            }
            ExitCode::from(outcome.exit)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parse_error() { 3 } else { 4 })
        }
    }
}
