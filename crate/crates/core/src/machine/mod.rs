//! Agent and world Turing machines.
//!
//! Both kinds run on a [`MachineRun`]: a tape, a control state and step
//! counters. A *small step* is one transition; a *big step* ends when a
//! transition returns the control to the start state, at which moment one
//! letter leaves the machine and one letter is fed back in at the head.

mod agent;
pub mod text;
mod world;

pub use agent::{AgentError, AgentMachine, AgentMachineSpec, AgentRule};
pub use world::{
    outcomes_with, respond_with, MissingRow, Response, StepError, Tuple5, WorldMachine, WorldMachineSpec, WorldOutcome,
    WorldRules, WorldTuple, DEFAULT_BRANCH_LIMIT,
};

use thiserror::Error;

use crate::alphabet::Letter;
use crate::tape::Tape;

/// Execution state of a machine between (or during) big steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineRun {
    pub tape: Tape,
    pub state: usize,
    /// Small steps taken in the current big step.
    pub small_steps: u64,
    pub big_steps: u64,
}

impl MachineRun {
    pub fn new(start: usize) -> Self {
        MachineRun { tape: Tape::new(), state: start, small_steps: 0, big_steps: 0 }
    }
}

/// Static validation failures for machine descriptions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("start state {0} is not a state of the machine")]
    MissingStart(usize),
    #[error("transition references unknown state {0}")]
    UnknownState(usize),
    #[error("letter {0:?} is outside the machine alphabet")]
    BadLetter(Letter),
    #[error("agent rule for (state {state}, letter {letter:?}) is defined twice")]
    DuplicateRule { state: usize, letter: Letter },
    #[error("no transition for (state {state}, letter {letter:?})")]
    NotTotal { state: usize, letter: Letter },
    #[error("output transition from (state {state}, letter {letter:?}) writes non-percept {write:?}")]
    NonSigmaOutput { state: usize, letter: Letter, write: Letter },
    #[error("non-output transitions share (state {state}, letter {letter:?})")]
    IllegalNondeterminism { state: usize, letter: Letter },
    #[error("transitions from (state {state}, letter {letter:?}) differ only in direction")]
    DirectionOnlyDuplicate { state: usize, letter: Letter },
    #[error("a machine needs at least one state")]
    NoStates,
}
