//! Shared fixtures for the benchmarks.

use amalearn::synth::{blocks_suite, random_formula, FormulaShape, RealizeConfig};
use amalearn::{gen_hard_instances, lgcf, AmaFormula, HardInstance, Labels, TemporalModel, Timeline};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The two timelines of the `n`-by-`n` grid instance.
pub fn grid(n: usize) -> (Timeline, Timeline) {
    let fs = gen_hard_instances(HardInstance::Theorem17Grid(n)).expect("n >= 2");
    (fs[0].timelines()[0].clone(), fs[1].timelines()[0].clone())
}

/// `count` random formulas over `atoms` propositions.
pub fn formulas(seed: u64, count: usize, atoms: usize, timelines: usize, states: usize) -> Vec<AmaFormula> {
    let mut r = rng(seed);
    let shape = FormulaShape::props(atoms, timelines, states);
    (0..count).map(|_| random_formula(&mut r, &shape)).collect()
}

/// Random single timelines of exactly `len` states.
pub fn timelines(seed: u64, count: usize, atoms: usize, len: usize) -> Vec<Timeline> {
    let mut r = rng(seed);
    let shape = FormulaShape::props(atoms, 1, len);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = random_formula(&mut r, &shape).timelines()[0].clone();
        if t.len() == len {
            out.push(t);
        }
    }
    out
}

pub fn blocks(per_event: usize, noise: f64) -> (Vec<TemporalModel>, Labels) {
    let cfg = RealizeConfig {
        noise,
        ..RealizeConfig::default()
    };
    blocks_suite(&mut rng(7), per_event, &cfg).expect("blocks suite realizes")
}

/// LGCFs of noise-free realizations of random formulas.
pub fn lgcfs(seed: u64, count: usize) -> Vec<AmaFormula> {
    let mut r = rng(seed);
    let truth = random_formula(&mut r, &FormulaShape::props(4, 2, 4));
    (0..count)
        .map(|i| {
            let m = amalearn::synth::realize(&mut r, &truth, &format!("m{i}"), &RealizeConfig::default())
                .expect("consistent truth");
            lgcf(&m).into()
        })
        .collect()
}
