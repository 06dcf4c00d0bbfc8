//! Games, lives and the success metric.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::Policy;
use crate::alphabet::{Letter, Outcome};
use crate::machine::text::world_hash;
use crate::machine::{MachineRun, WorldMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("success is undefined for a life without games")]
    EmptyLife,
    #[error("cap `{0}` must be positive")]
    ZeroCap(&'static str),
    #[error("bad caps specification: {0}")]
    BadCaps(String),
}

/// Numeric parameters of games and lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    /// The percept of this big step is forced to `draw` if it is not final.
    pub game_big_step_cap: u32,
    /// A world making more small steps than this within one big step is
    /// interrupted with `draw`.
    pub world_small_step_cap: u32,
    pub life_games: u32,
    /// Default small-step cap for agent machines that do not carry their own.
    pub agent_small_step_cap: u64,
    /// Restart the world from its start configuration after every game.
    pub reset_world_each_game: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            game_big_step_cap: 1000,
            world_small_step_cap: 800,
            life_games: 100,
            agent_small_step_cap: 100_000,
            reset_world_each_game: false,
        }
    }
}

impl Caps {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.game_big_step_cap == 0 {
            return Err(GameError::ZeroCap("game"));
        }
        if self.world_small_step_cap == 0 {
            return Err(GameError::ZeroCap("world"));
        }
        if self.agent_small_step_cap == 0 {
            return Err(GameError::ZeroCap("agent"));
        }
        Ok(())
    }

    pub fn with_game_cap(mut self, cap: u32) -> Self {
        self.game_big_step_cap = cap;
        self
    }

    pub fn with_life_games(mut self, n: u32) -> Self {
        self.life_games = n;
        self
    }

    pub fn with_reset(mut self, reset: bool) -> Self {
        self.reset_world_each_game = reset;
        self
    }
}

impl fmt::Display for Caps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "game={} world={} life={} agent={} reset={}",
            self.game_big_step_cap,
            self.world_small_step_cap,
            self.life_games,
            self.agent_small_step_cap,
            self.reset_world_each_game
        )
    }
}

/// Parses `key=value` pairs separated by commas or spaces, starting from the
/// defaults. Keys: `game`, `world`, `life`, `agent`, `reset`.
impl FromStr for Caps {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut caps = Caps::default();
        for item in s.split([',', ' ']).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| GameError::BadCaps(item.to_string()))?;
            let bad = || GameError::BadCaps(item.to_string());
            match k {
                "game" => caps.game_big_step_cap = v.parse().map_err(|_| bad())?,
                "world" => caps.world_small_step_cap = v.parse().map_err(|_| bad())?,
                "life" => caps.life_games = v.parse().map_err(|_| bad())?,
                "agent" => caps.agent_small_step_cap = v.parse().map_err(|_| bad())?,
                "reset" => caps.reset_world_each_game = v.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        caps.validate()?;
        Ok(caps)
    }
}

/// Why a game ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FinalLetter,
    BigStepCap,
    WorldSmallStepCap,
    AgentError,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::FinalLetter => "final_letter",
            Termination::BigStepCap => "big_step_cap",
            Termination::WorldSmallStepCap => "world_small_step_cap",
            Termination::AgentError => "agent_error",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Termination::FinalLetter, Termination::BigStepCap, Termination::WorldSmallStepCap, Termination::AgentError]
            .into_iter()
            .find(|t| t.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    /// (action, percept) per big step; the last percept is the final letter
    /// unless the agent failed.
    pub moves: Vec<(Letter, Letter)>,
    pub outcome: Outcome,
    pub big_steps: u32,
    pub termination: Termination,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub n_victory: u64,
    pub n_loss: u64,
    pub n_draw: u64,
    pub n_games: u64,
}

impl OutcomeCounts {
    pub fn new(n_victory: u64, n_loss: u64, n_draw: u64) -> Self {
        OutcomeCounts { n_victory, n_loss, n_draw, n_games: n_victory + n_loss + n_draw }
    }

    pub fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Victory => self.n_victory += 1,
            Outcome::Loss => self.n_loss += 1,
            Outcome::Draw => self.n_draw += 1,
        }
        self.n_games += 1;
    }

    pub fn tally<'a>(outcomes: impl IntoIterator<Item = &'a Outcome>) -> Self {
        let mut c = OutcomeCounts::default();
        for &o in outcomes {
            c.add(o);
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifeRecord {
    pub games: Vec<GameRecord>,
    pub counts: OutcomeCounts,
    pub seed: u64,
    pub caps: Caps,
    pub world_hash: String,
}

/// `(2·victories + draws) / (2·games)`.
pub fn success(counts: &OutcomeCounts) -> Result<BigRational, GameError> {
    if counts.n_games == 0 {
        return Err(GameError::EmptyLife);
    }
    Ok(BigRational::new(BigInt::from(2 * counts.n_victory + counts.n_draw), BigInt::from(2 * counts.n_games)))
}

/// Success over the first k games, for k = 1..=n.
pub fn success_prefix_series(life: &LifeRecord) -> Result<Vec<BigRational>, GameError> {
    if life.games.is_empty() {
        return Err(GameError::EmptyLife);
    }
    let mut c = OutcomeCounts::default();
    Ok(life
        .games
        .iter()
        .map(|g| {
            c.add(g.outcome);
            success(&c).expect("non-empty prefix")
        })
        .collect())
}

/// Midpoint of the smallest and largest values over the last `tail` entries
/// of the series (default: the last half), a finite stand-in for the average
/// of lim inf and lim sup.
pub fn limit_estimate(series: &[BigRational], tail: Option<usize>) -> Result<BigRational, GameError> {
    if series.is_empty() {
        return Err(GameError::EmptyLife);
    }
    let tail = tail.unwrap_or(series.len() - series.len() / 2).clamp(1, series.len());
    let window = &series[series.len() - tail..];
    let lo = window.iter().min().expect("non-empty");
    let hi = window.iter().max().expect("non-empty");
    Ok((lo + hi) / BigRational::from_integer(2.into()))
}

/// Plays one game: the agent acts, the world responds, the agent observes,
/// until a final percept arrives. A non-final percept on the capped big step
/// is replaced by `draw`, and the agent sees that draw.
pub fn play_game(
    agent: &mut dyn Policy,
    world: &WorldMachine,
    run: &mut MachineRun,
    caps: &Caps,
    rng: &mut ChaCha8Rng,
) -> GameRecord {
    let alphabet = crate::machine::WorldRules::alphabet(world);
    let mut moves = Vec::new();
    loop {
        let action = match agent.act() {
            Ok(a) => a,
            Err(_) => {
                let big_steps = moves.len() as u32;
                return GameRecord { moves, outcome: Outcome::Loss, big_steps, termination: Termination::AgentError };
            }
        };
        let response = world.respond(run, action, caps.world_small_step_cap, rng);
        let step = moves.len() as u32 + 1;
        let (percept, termination) = if response.forced_draw {
            (Letter::DRAW, Some(Termination::WorldSmallStepCap))
        } else if alphabet.is_final(response.percept) {
            (response.percept, Some(Termination::FinalLetter))
        } else if step >= caps.game_big_step_cap {
            (Letter::DRAW, Some(Termination::BigStepCap))
        } else {
            (response.percept, None)
        };
        moves.push((action, percept));
        agent.observe(percept);
        if let Some(termination) = termination {
            let outcome = alphabet.outcome_of(percept).expect("final percept");
            return GameRecord { moves, outcome, big_steps: step, termination };
        }
    }
}

/// Plays `caps.life_games` consecutive games against one world instance. The
/// world's randomness comes from `seed`.
pub fn play_life(agent: &mut dyn Policy, world: &WorldMachine, caps: &Caps, seed: u64) -> LifeRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = world.fresh_run();
    let mut games = Vec::with_capacity(caps.life_games as usize);
    for g in 0..caps.life_games {
        if caps.reset_world_each_game && g > 0 {
            run = world.fresh_run();
        }
        games.push(play_game(agent, world, &mut run, caps, &mut rng));
    }
    let counts = OutcomeCounts::tally(games.iter().map(|g| &g.outcome));
    LifeRecord { games, counts, seed, caps: *caps, world_hash: world_hash(world) }
}
