use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aieval::agents::{td5_best_strategy, AgentSpec};
use aieval::alphabet::AlphabetConfig;
use aieval::game::{play_life, success, Caps};
use aieval::harness::{derive_seed, evaluate, EvalConfig, WorldSource, SAMPLE_STREAM};
use aieval::machine::text::{parse, parse_agent, parse_world, world_hash, write_world, MachineText};
use aieval::machine::{WorldMachine, WorldRules};
use aieval::transcript::write_life;
use aieval::tree::{build_multigame_tree, max_sum};
use aieval::worldspace::{count_worlds, enumerate_worlds, sample_world, Determinism, WorldSpaceSpec};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "aieval", version, about = "Agent and world Turing machines: play, solve and evaluate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Caps as `key=value` pairs: game, world, life, agent, reset.
    #[arg(long, default_value = "")]
    caps: String,
}

#[derive(Args, Clone)]
struct Space {
    /// Alphabet as `sigma V L D P... omega A... [blank B]`; the first three
    /// sigma letters are victory, loss and draw.
    #[arg(long, default_value = "sigma victory loss draw x y omega a b")]
    alphabet: String,
    /// Largest machine size (states plus indefiniteness).
    #[arg(long, default_value_t = 2)]
    max_size: usize,
    #[arg(long, value_enum, default_value_t = Det::All)]
    determinism: Det,
}

#[derive(Clone, Copy, ValueEnum)]
enum Det {
    Deterministic,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check machine files.
    Validate { files: Vec<PathBuf> },
    /// Count a world space and write its first machines in canonical order.
    Enumerate {
        #[command(flatten)]
        space: Space,
        /// Stop after this many machines.
        #[arg(long, default_value_t = 1000)]
        limit: u64,
        /// Directory for the machine files; without it only the count is shown.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw machines uniformly from a world space.
    Sample {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play one life and write its transcript.
    Play {
        #[arg(long)]
        world: PathBuf,
        /// Agent spec, for example `kind=td4,courage=1/20`.
        #[arg(long, default_value = "kind=random")]
        agent: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the game tree of a world, solve it and print it.
    Tree {
        #[arg(long)]
        world: PathBuf,
        #[arg(long, default_value_t = 1)]
        games: u32,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best strategy for the mean success over a set of worlds.
    BestStrategy {
        worlds: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        games: u32,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an agent over sampled or given worlds.
    Evaluate {
        #[arg(long, default_value = "kind=random")]
        agent: String,
        /// World files; without them worlds are sampled.
        #[arg(long = "world")]
        worlds: Vec<PathBuf>,
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        lives: u32,
        #[command(flatten)]
        common: Common,
        /// Success threshold as a rational.
        #[arg(long, default_value = "7/10")]
        threshold: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Where to write the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_alphabet(s: &str) -> Result<AlphabetConfig> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let pos = |k: &str| toks.iter().position(|t| *t == k);
    let (Some(0), Some(o)) = (pos("sigma"), pos("omega")) else {
        bail!("alphabet must look like `sigma V L D P... omega A... [blank B]`");
    };
    let b = pos("blank").unwrap_or(toks.len());
    if o >= b || (b < toks.len() && b + 2 != toks.len()) {
        bail!("alphabet must look like `sigma V L D P... omega A... [blank B]`");
    }
    let sigma = &toks[1..o];
    if sigma.len() < 3 {
        bail!("sigma needs the three final letters first");
    }
    let blank = toks.get(b + 1).copied().unwrap_or("_");
    Ok(AlphabetConfig::new(sigma, [sigma[0], sigma[1], sigma[2]], &toks[o + 1..b], blank)?)
}

fn world_space(space: &Space) -> Result<WorldSpaceSpec> {
    let det = match space.determinism {
        Det::Deterministic => Determinism::DeterministicOnly,
        Det::All => Determinism::All,
    };
    Ok(WorldSpaceSpec::new(parse_alphabet(&space.alphabet)?, space.max_size, det))
}

fn caps(common: &Common) -> Result<Caps> {
    common.caps.parse().map_err(|e| anyhow::anyhow!("--caps: {e}"))
}

fn read_world(path: &Path) -> Result<WorldMachine> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_world(&text).with_context(|| format!("{}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_worlds<'a>(dir: &Path, worlds: impl Iterator<Item = (usize, &'a WorldMachine)>) -> Result<usize> {
    fs::create_dir_all(dir)?;
    let mut n = 0;
    for (i, w) in worlds {
        fs::write(dir.join(format!("world_{i:06}.txt")), write_world(w))?;
        n += 1;
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { files } => {
            let mut ok = true;
            for f in &files {
                let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
                let result = match parse(&text) {
                    Err(e) => Err(e.to_string()),
                    Ok(MachineText::World(_)) => parse_world(&text)
                        .map_err(|e| e.to_string())
                        .map(|w| format!("world states={} size={} hash={}", w.n_states(), w.size(), world_hash(&w))),
                    Ok(MachineText::Agent(_)) => parse_agent(&text)
                        .map_err(|e| e.to_string())
                        .map(|a| format!("agent states={} service={}", a.n_states(), a.service().len())),
                };
                match result {
                    Ok(s) => println!("{}: ok {s}", f.display()),
                    Err(e) => {
                        ok = false;
                        println!("{}: error: {e}", f.display());
                    }
                }
            }
            Ok(ok)
        }
        Command::Enumerate { space, limit, out } => {
            let mut spec = world_space(&space)?;
            println!("machines in space: {}", count_worlds(&spec));
            if let Some(dir) = out {
                spec.yield_cap = Some(limit);
                let worlds: Vec<WorldMachine> =
                    enumerate_worlds(&spec).take(limit as usize).collect::<Result<_, _>>()?;
                let n = write_worlds(&dir, worlds.iter().enumerate())?;
                println!("wrote {n} machines to {}", dir.display());
            }
            Ok(true)
        }
        Command::Sample { space, count, seed, out } => {
            let spec = world_space(&space)?;
            let mut worlds = vec![];
            for i in 0..count {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64, SAMPLE_STREAM));
                worlds.push(sample_world(&spec, &mut rng)?);
            }
            let n = write_worlds(&out, worlds.iter().enumerate())?;
            println!("wrote {n} machines to {}", out.display());
            Ok(true)
        }
        Command::Play { world, agent, common, out } => {
            let w = read_world(&world)?;
            let caps = caps(&common)?;
            let spec = AgentSpec::parse(&agent)?;
            let mut policy = spec.build(w.alphabet(), &caps, derive_seed(common.seed, 0, 1))?;
            let life = play_life(policy.as_mut(), &w, &caps, derive_seed(common.seed, 0, 2));
            let s = success(&life.counts)?;
            let c = &life.counts;
            eprintln!(
                "{} games: {} victories, {} losses, {} draws, success {}",
                c.n_games, c.n_victory, c.n_loss, c.n_draw, s
            );
            emit(&out, &write_life(&life, w.alphabet()))?;
            Ok(true)
        }
        Command::Tree { world, games, common, out } => {
            let w = read_world(&world)?;
            let tree = build_multigame_tree(&w, games, &caps(&common)?)?;
            let valued = max_sum(&tree);
            eprintln!("{} nodes, best possible success {}", tree.len(), valued.root_value());
            emit(&out, &tree.dump(Some(&valued)))?;
            Ok(true)
        }
        Command::BestStrategy { worlds, games, common, out } => {
            if worlds.is_empty() {
                bail!("give at least one world file");
            }
            let ws = worlds.iter().map(|p| read_world(p)).collect::<Result<Vec<_>>>()?;
            let (strategy, value) = td5_best_strategy(&ws, games, &caps(&common)?)?;
            eprintln!("mean success of the best strategy: {value}");
            emit(&out, &strategy.to_text(ws[0].alphabet()))?;
            Ok(true)
        }
        Command::Evaluate { agent, worlds, space, samples, lives, common, threshold, workers, out } => {
            let source = if worlds.is_empty() {
                WorldSource::Sample { spec: world_space(&space)?, count: samples }
            } else {
                WorldSource::Explicit(worlds.iter().map(|p| read_world(p)).collect::<Result<_>>()?)
            };
            let mut config = EvalConfig::new(source, caps(&common)?, common.seed);
            config.lives_per_world = lives;
            config.workers = workers;
            config.threshold = threshold
                .parse::<BigRational>()
                .map_err(|_| anyhow::anyhow!("--threshold: bad rational `{threshold}`"))?;
            let report = evaluate(&AgentSpec::parse(&agent)?, &config)?;
            print!("{}", report.summary());
            if let Some(p) = out {
                fs::write(&p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
