//! TD5: the strategy with the best mean success over a set of worlds, and a
//! policy that plays a precomputed strategy.

use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{uniform_action, Policy};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::game::Caps;
use crate::machine::{AgentError, WorldMachine};
use crate::tree::{build_tree, max_sum, Strategy, TreeError, TreeOptions, TreeWorld};

/// Best strategy for lives of `n_games` games, maximizing the arithmetic
/// mean of expected success over `worlds`. Returns the strategy and its mean.
pub fn td5_best_strategy(
    worlds: &[WorldMachine],
    n_games: u32,
    caps: &Caps,
) -> Result<(Strategy, BigRational), TreeError> {
    let entries: Vec<TreeWorld<'_>> =
        worlds.iter().map(|w| TreeWorld { rules: w, run: w.fresh_run(), weight: BigRational::one() }).collect();
    td5_best_strategy_weighted(&entries, n_games, caps, TreeOptions::default())
}

/// [`td5_best_strategy`] with a weighted mean.
pub fn td5_best_strategy_weighted(
    worlds: &[TreeWorld<'_>],
    n_games: u32,
    caps: &Caps,
    opts: TreeOptions,
) -> Result<(Strategy, BigRational), TreeError> {
    let tree = build_tree(worlds, n_games, caps, opts)?;
    let (value, strategy) = max_sum(&tree).into_parts();
    Ok((strategy, value))
}

/// Follows a strategy keyed by life history; plays at random wherever the
/// strategy has no entry (for example after its last game).
#[derive(Clone, Debug)]
pub struct StrategyPlayer {
    strategy: Strategy,
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
    history: Vec<Letter>,
    off_strategy: bool,
}

impl StrategyPlayer {
    pub fn new(strategy: Strategy, alphabet: &AlphabetConfig, seed: u64) -> Self {
        StrategyPlayer {
            strategy,
            omega: alphabet.omega().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            history: vec![],
            off_strategy: false,
        }
    }
}

impl Policy for StrategyPlayer {
    fn act(&mut self) -> Result<Letter, AgentError> {
        let planned = if self.off_strategy { None } else { self.strategy.get(&self.history) };
        let a = match planned {
            Some(a) => a,
            None => {
                // Once off the strategy the history key is never needed again.
                self.off_strategy = true;
                self.history.clear();
                uniform_action(&self.omega, &mut self.rng)
            }
        };
        if !self.off_strategy {
            self.history.push(a);
        }
        Ok(a)
    }

    fn observe(&mut self, percept: Letter) {
        if !self.off_strategy {
            self.history.push(percept);
        }
    }
}
