//! Agent policies: a random baseline, a wrapper for agent machines and the
//! reference agents TD1 to TD6.
//!
//! Every policy segments games only by final-letter percepts, which include
//! the draws the runtime forces at its caps.

mod empirical;
mod replay;
mod spec;
mod td5;
mod td6;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{AlphabetConfig, Letter};
use crate::machine::{AgentError, AgentMachine, MachineRun};

pub use empirical::{EmpiricalAgent, EmpiricalStats, Td4Config};
pub use replay::{Td1, Td2, Td2Phase};
pub use spec::{AgentKind, AgentSpec, SpecError};
pub use td5::{td5_best_strategy, td5_best_strategy_weighted, StrategyPlayer};
pub use td6::{Td6, Td6Config, Td6Stats};

/// An agent as seen by the game runtime.
pub trait Policy: Send {
    /// The next action. An error forfeits the current game.
    fn act(&mut self) -> Result<Letter, AgentError>;
    /// Delivers the percept that answered the last action.
    fn observe(&mut self, percept: Letter);
}

/// Uniform random actions.
#[derive(Clone, Debug)]
pub struct RandomAgent {
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(alphabet: &AlphabetConfig, seed: u64) -> Self {
        RandomAgent { omega: alphabet.omega().collect(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

/// The one place random actions are drawn, so that agents which fall back to
/// random play consume their stream exactly like [`RandomAgent`].
pub(crate) fn uniform_action(omega: &[Letter], rng: &mut ChaCha8Rng) -> Letter {
    omega[rng.gen_range(0..omega.len())]
}

impl Policy for RandomAgent {
    fn act(&mut self) -> Result<Letter, AgentError> {
        Ok(uniform_action(&self.omega, &mut self.rng))
    }

    fn observe(&mut self, _percept: Letter) {}
}

/// Runs an [`AgentMachine`]. After its first failure the machine is stuck and
/// forfeits every later game.
#[derive(Clone, Debug)]
pub struct MachineAgent {
    machine: Arc<AgentMachine>,
    run: MachineRun,
    cap: u64,
    failed: bool,
}

impl MachineAgent {
    pub fn new(machine: Arc<AgentMachine>, default_cap: u64) -> Self {
        let run = machine.fresh_run();
        MachineAgent { machine, run, cap: default_cap, failed: false }
    }

    pub fn failed(&self) -> bool {
        self.failed
    }
}

impl Policy for MachineAgent {
    fn act(&mut self) -> Result<Letter, AgentError> {
        if self.failed {
            return Err(AgentError::Failed);
        }
        self.machine.emit(&mut self.run, Some(self.cap)).inspect_err(|_| self.failed = true)
    }

    fn observe(&mut self, percept: Letter) {
        if !self.failed {
            self.machine.absorb(&mut self.run, percept);
        }
    }
}

/// Within-game history `a1 v1 a2 v2 ...` plus a game counter.
#[derive(Clone, Debug, Default)]
pub(crate) struct GameTracker {
    pub current: Vec<Letter>,
    /// Completed games so far.
    pub games: u64,
}

impl GameTracker {
    pub fn act(&mut self, a: Letter) {
        self.current.push(a);
    }

    /// Records the percept; returns the finished game's history when the
    /// percept is final.
    pub fn observe(&mut self, alphabet: &AlphabetConfig, v: Letter) -> Option<Vec<Letter>> {
        self.current.push(v);
        if alphabet.is_final(v) {
            self.games += 1;
            Some(std::mem::take(&mut self.current))
        } else {
            None
        }
    }

    /// Index of the big step about to be played in the current game, from 0.
    pub fn step(&self) -> usize {
        self.current.len() / 2
    }
}
