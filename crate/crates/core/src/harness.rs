//! Evaluation of one agent over many worlds.
//!
//! Every random choice is drawn from a seed derived from the master seed and
//! the task's coordinates, never from a shared generator, so results do not
//! depend on how the tasks are scheduled. World `i` is sampled with
//! `derive_seed(master, i, SAMPLE_STREAM)`; life `l` in world `i` seeds its
//! agent with `derive_seed(master, i, 2 * l + 1)` and the world's choices
//! with `derive_seed(master, i, 2 * l + 2)`.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentSpec;
use crate::game::{play_life, success, Caps, GameError};
use crate::machine::text::world_hash;
use crate::machine::{WorldMachine, WorldRules};
use crate::tree::{build_multigame_tree, strategy_expected_success, Strategy, TreeError};
use crate::worldspace::{sample_world, Determinism, WorldSpaceSpec};

pub const REPORT_FORMAT: &str = "aieval-report v1";

/// Stream index reserved for world sampling.
pub const SAMPLE_STREAM: u64 = 0;

/// Defaults of the full-scale definition: game cap 1000 big steps, 800 small
/// steps per world step, 100 games per life, machines of size 20, and the
/// 70% success threshold.
pub mod defaults {
    pub const GAME_BIG_STEP_CAP: u32 = 1000;
    pub const WORLD_SMALL_STEP_CAP: u32 = 800;
    pub const LIFE_GAMES: u32 = 100;
    pub const MAX_WORLD_SIZE: usize = 20;
    pub const THRESHOLD: (i64, i64) = (7, 10);
    pub const LIVES_PER_WORLD: u32 = 1;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("lives per world must be at least 1")]
    NoLives,
    #[error("no worlds given")]
    NoWorlds,
    #[error(transparent)]
    Caps(#[from] GameError),
    #[error("every entry aborted; first error: {0}")]
    AllAborted(String),
}

/// Where the evaluated worlds come from.
#[derive(Clone, Debug)]
pub enum WorldSource {
    /// `count` machines drawn uniformly from a world space.
    Sample { spec: WorldSpaceSpec, count: usize },
    /// A fixed list, evaluated in order.
    Explicit(Vec<WorldMachine>),
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub worlds: WorldSource,
    pub lives_per_world: u32,
    pub caps: Caps,
    pub seed: u64,
    pub threshold: BigRational,
    /// Worker threads; 0 or 1 runs sequentially. Does not affect results.
    pub workers: usize,
}

impl EvalConfig {
    pub fn new(worlds: WorldSource, caps: Caps, seed: u64) -> Self {
        let (n, d) = defaults::THRESHOLD;
        EvalConfig {
            worlds,
            lives_per_world: defaults::LIVES_PER_WORLD,
            caps,
            seed,
            threshold: BigRational::new(n.into(), d.into()),
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        match &self.worlds {
            WorldSource::Sample { count: 0, .. } => return Err(HarnessError::NoSamples),
            WorldSource::Explicit(w) if w.is_empty() => return Err(HarnessError::NoWorlds),
            _ => {}
        }
        if self.lives_per_world == 0 {
            return Err(HarnessError::NoLives);
        }
        self.caps.validate()?;
        Ok(())
    }

    fn n_worlds(&self) -> usize {
        match &self.worlds {
            WorldSource::Sample { count, .. } => *count,
            WorldSource::Explicit(w) => w.len(),
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `stream` of world `world` under `master`.
pub fn derive_seed(master: u64, world: u64, stream: u64) -> u64 {
    mix(mix(mix(master) ^ world) ^ stream)
}

/// Applies `f` to every item, in parallel when `workers > 1` and the
/// `parallel` feature is on. Output order follows input order.
pub fn par_map<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| items.into_par_iter().map(&f).collect());
        }
    }
    let _ = workers;
    items.into_iter().map(f).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifeEntry {
    pub agent_seed: u64,
    pub world_seed: u64,
    pub victories: u64,
    pub losses: u64,
    pub draws: u64,
    /// Exact success as `n/d`.
    pub success: String,
    pub success_f64: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldEntry {
    pub index: usize,
    pub hash: String,
    pub states: usize,
    pub size: usize,
    pub deterministic: bool,
    pub lives: Vec<LifeEntry>,
    pub mean: String,
    pub mean_f64: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortedEntry {
    pub index: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_worlds: usize,
    /// Mean of the per-world means, exact.
    pub mean: String,
    pub mean_f64: f64,
    /// Sample standard deviation of the per-world means over `sqrt(n)`.
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub threshold: String,
    /// `mean > threshold`, compared exactly.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub agent: String,
    pub worlds: String,
    pub sigma: Vec<String>,
    pub omega: Vec<String>,
    pub sample_count: usize,
    pub lives_per_world: u32,
    pub caps: String,
    pub seed: u64,
    pub seed_derivation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format: String,
    pub version: String,
    pub config: ConfigRecord,
    pub worlds: Vec<WorldEntry>,
    pub aborted: Vec<AbortedEntry>,
    pub aggregate: Aggregate,
    pub annotations: Vec<String>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let a = &self.aggregate;
        let mut s = format!(
            "agent {}\nworlds evaluated: {} (aborted: {})\nmean success: {:.4} ({})\nstd error: {:.4}, 95% CI [{:.4}, {:.4}]\nthreshold {}: {}\n",
            self.config.agent,
            a.n_worlds,
            self.aborted.len(),
            a.mean_f64,
            a.mean,
            a.std_error,
            a.ci95[0],
            a.ci95[1],
            a.threshold,
            if a.pass { "above" } else { "not above" },
        );
        for note in &self.annotations {
            s.push_str("note: ");
            s.push_str(note);
            s.push('\n');
        }
        s
    }
}

fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Runs `agent` on every world of `config`. Entries whose world or agent
/// cannot be built are listed as aborted; the rest are aggregated.
pub fn evaluate(agent: &AgentSpec, config: &EvalConfig) -> Result<EvalReport, HarnessError> {
    config.validate()?;
    let master = config.seed;
    let n = config.n_worlds();
    let worlds: Vec<Result<WorldMachine, String>> = match &config.worlds {
        WorldSource::Explicit(list) => list.iter().cloned().map(Ok).collect(),
        WorldSource::Sample { spec, .. } => par_map((0..n).collect(), config.workers, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, i as u64, SAMPLE_STREAM));
            sample_world(spec, &mut rng).map_err(|e| e.to_string())
        }),
    };

    let alphabet = match &config.worlds {
        WorldSource::Sample { spec, .. } => spec.alphabet.clone(),
        WorldSource::Explicit(list) => list[0].alphabet().clone(),
    };
    let lives = config.lives_per_world as usize;
    let tasks: Vec<(usize, usize)> =
        (0..n).filter(|&i| worlds[i].is_ok()).flat_map(|i| (0..lives).map(move |l| (i, l))).collect();
    let results = par_map(tasks, config.workers, |(i, l)| {
        let world = worlds[i].as_ref().expect("sampled");
        let agent_seed = derive_seed(master, i as u64, 2 * l as u64 + 1);
        let world_seed = derive_seed(master, i as u64, 2 * l as u64 + 2);
        let mut policy = agent.build(world.alphabet(), &config.caps, agent_seed).map_err(|e| (i, e.to_string()))?;
        let life = play_life(policy.as_mut(), world, &config.caps, world_seed);
        let s = success(&life.counts).map_err(|e| (i, e.to_string()))?;
        Ok::<_, (usize, String)>((
            i,
            LifeEntry {
                agent_seed,
                world_seed,
                victories: life.counts.n_victory,
                losses: life.counts.n_loss,
                draws: life.counts.n_draw,
                success_f64: to_f64(&s),
                success: ratio_string(&s),
            },
            s,
        ))
    });

    let mut aborted = vec![];
    let mut per_world: Vec<Vec<(LifeEntry, BigRational)>> = vec![vec![]; n];
    let mut failed = vec![false; n];
    for (i, w) in worlds.iter().enumerate() {
        if let Err(e) = w {
            aborted.push(AbortedEntry { index: i, error: e.clone() });
            failed[i] = true;
        }
    }
    for r in results {
        match r {
            Ok((i, entry, s)) => per_world[i].push((entry, s)),
            // One failed life aborts its world.
            Err((i, e)) => {
                if !failed[i] {
                    aborted.push(AbortedEntry { index: i, error: e });
                    failed[i] = true;
                }
            }
        }
    }
    aborted.sort_by_key(|a| a.index);

    let mut entries = vec![];
    for (i, lives_i) in per_world.into_iter().enumerate() {
        if failed[i] {
            continue;
        }
        let world = worlds[i].as_ref().expect("not failed");
        let sum = lives_i.iter().fold(BigRational::zero(), |acc, (_, s)| acc + s);
        let mean = sum / BigRational::from_integer(lives_i.len().into());
        entries.push((
            WorldEntry {
                index: i,
                hash: world_hash(world),
                states: world.n_states(),
                size: world.size(),
                deterministic: world.is_deterministic(),
                lives: lives_i.into_iter().map(|(e, _)| e).collect(),
                mean_f64: to_f64(&mean),
                mean: ratio_string(&mean),
            },
            mean,
        ));
    }
    if entries.is_empty() {
        return Err(HarnessError::AllAborted(aborted.first().map(|a| a.error.clone()).unwrap_or_default()));
    }

    let k = entries.len();
    let mean = entries.iter().fold(BigRational::zero(), |acc, (_, m)| acc + m) / BigRational::from_integer(k.into());
    let mean_f64 = to_f64(&mean);
    let std_error = if k > 1 {
        let var = entries.iter().map(|(e, _)| (e.mean_f64 - mean_f64).powi(2)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    } else {
        0.0
    };
    let aggregate = Aggregate {
        n_worlds: k,
        mean: ratio_string(&mean),
        mean_f64,
        std_error,
        ci95: [mean_f64 - 1.96 * std_error, mean_f64 + 1.96 * std_error],
        threshold: ratio_string(&config.threshold),
        pass: mean > config.threshold,
    };

    let mut annotations = vec![
        "The threshold line is descriptive: a 70% bar and an expected best-strategy success of about 80% belong to \
         full-scale parameters (machines of size 20, five percepts) and are not claims about smaller settings."
            .to_string(),
    ];
    if k < 30 {
        annotations.push(format!(
            "Only {k} worlds: the normal-approximation confidence interval is rough at this sample size."
        ));
    }
    let (worlds_desc, sample_count) = match &config.worlds {
        WorldSource::Sample { spec, count } => {
            if spec.determinism == Determinism::All {
                annotations.push(
                    "Deterministic and nondeterministic machines are sampled uniformly together; no correction \
                     weights them against each other."
                        .to_string(),
                );
            }
            (format!("sample max_size={} determinism={:?}", spec.max_size, spec.determinism), *count)
        }
        WorldSource::Explicit(list) => ("explicit".to_string(), list.len()),
    };

    Ok(EvalReport {
        format: REPORT_FORMAT.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigRecord {
            agent: agent.to_string(),
            worlds: worlds_desc,
            sigma: alphabet.sigma_names().map(str::to_string).collect(),
            omega: alphabet.omega_names().map(str::to_string).collect(),
            sample_count,
            lives_per_world: config.lives_per_world,
            caps: config.caps.to_string(),
            seed: master,
            seed_derivation: "splitmix64: world i uses stream 0; life l uses streams 2l+1 (agent) and 2l+2 (world)"
                .to_string(),
        },
        worlds: entries.into_iter().map(|(e, _)| e).collect(),
        aborted,
        aggregate,
        annotations,
    })
}

/// Exact mean over `worlds` of the expected success of `strategy` in lives
/// of `n_games` games.
pub fn exact_evaluate(
    strategy: &Strategy,
    worlds: &[WorldMachine],
    n_games: u32,
    caps: &Caps,
) -> Result<BigRational, TreeError> {
    if worlds.is_empty() {
        return Err(TreeError::NoWorlds);
    }
    let mut sum = BigRational::zero();
    for w in worlds {
        let tree = build_multigame_tree(w, n_games, caps)?;
        sum += strategy_expected_success(strategy, &tree)?;
    }
    Ok(sum / BigRational::from_integer(worlds.len().into()))
}
