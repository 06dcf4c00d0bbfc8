use thiserror::Error;

use super::{MachineError, MachineRun};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::tape::Direction;

/// One entry `F(state, read) = (next, write, dir)` of an agent's partial
/// transition function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentRule {
    pub state: usize,
    pub read: Letter,
    pub next: usize,
    pub write: Letter,
    pub dir: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentMachineSpec {
    pub alphabet: AlphabetConfig,
    /// Extra tape letters private to the agent, indexed after Ω.
    pub service: Vec<String>,
    pub n_states: usize,
    pub start: usize,
    pub rules: Vec<AgentRule>,
    pub small_step_cap: Option<u64>,
}

/// Runtime failures of an agent machine. Any of them ends the current game.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgentError {
    #[error("agent halted: no rule for (state {state}, letter {letter:?})")]
    AgentHalted { state: usize, letter: Letter },
    #[error("agent exceeded {cap} small steps without a big step")]
    SmallStepCapExceeded { cap: u64 },
    #[error("agent emitted {0:?}, which is not an action")]
    NonActionOutput(Letter),
    #[error("agent already failed earlier in this life")]
    Failed,
}

/// A deterministic transducer machine: reads percepts, writes actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentMachine {
    alphabet: AlphabetConfig,
    service: Vec<String>,
    n_states: usize,
    start: usize,
    table: Vec<Option<(usize, Letter, Direction)>>,
    small_step_cap: Option<u64>,
}

impl AgentMachine {
    pub fn new(spec: AgentMachineSpec) -> Result<Self, MachineError> {
        let AgentMachineSpec { alphabet, service, n_states, start, rules, small_step_cap } = spec;
        if n_states == 0 {
            return Err(MachineError::NoStates);
        }
        if start >= n_states {
            return Err(MachineError::MissingStart(start));
        }
        let width = alphabet.tape_size() + service.len();
        let mut table = vec![None; n_states * width];
        for r in &rules {
            for s in [r.state, r.next] {
                if s >= n_states {
                    return Err(MachineError::UnknownState(s));
                }
            }
            for l in [r.read, r.write] {
                if l.index() >= width {
                    return Err(MachineError::BadLetter(l));
                }
            }
            let slot = &mut table[r.state * width + r.read.index()];
            match slot {
                Some(prev) if *prev != (r.next, r.write, r.dir) => {
                    return Err(MachineError::DuplicateRule { state: r.state, letter: r.read })
                }
                _ => *slot = Some((r.next, r.write, r.dir)),
            }
        }
        Ok(AgentMachine { alphabet, service, n_states, start, table, small_step_cap })
    }

    pub fn alphabet(&self) -> &AlphabetConfig {
        &self.alphabet
    }

    pub fn service(&self) -> &[String] {
        &self.service
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn small_step_cap(&self) -> Option<u64> {
        self.small_step_cap
    }

    fn width(&self) -> usize {
        self.alphabet.tape_size() + self.service.len()
    }

    /// Name of a tape letter, including service letters.
    pub fn letter_name(&self, l: Letter) -> &str {
        let n = self.alphabet.tape_size();
        if l.index() < n {
            self.alphabet.name(l)
        } else {
            &self.service[l.index() - n]
        }
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.alphabet.letter(name).or_else(|| {
            let n = self.alphabet.tape_size();
            self.service.iter().position(|s| s == name).map(|i| Letter((n + i) as u16))
        })
    }

    pub fn rules(&self) -> impl Iterator<Item = AgentRule> + '_ {
        let w = self.width();
        self.table.iter().enumerate().filter_map(move |(i, e)| {
            e.map(|(next, write, dir)| AgentRule { state: i / w, read: Letter((i % w) as u16), next, write, dir })
        })
    }

    pub fn spec(&self) -> AgentMachineSpec {
        AgentMachineSpec {
            alphabet: self.alphabet.clone(),
            service: self.service.clone(),
            n_states: self.n_states,
            start: self.start,
            rules: self.rules().collect(),
            small_step_cap: self.small_step_cap,
        }
    }

    pub fn fresh_run(&self) -> MachineRun {
        MachineRun::new(self.start)
    }

    /// Runs small steps until a transition re-enters the start state and
    /// returns the letter that transition wrote. `cap` overrides the
    /// machine's own cap when the machine has none.
    pub fn emit(&self, run: &mut MachineRun, cap: Option<u64>) -> Result<Letter, AgentError> {
        let cap = self.small_step_cap.or(cap);
        let w = self.width();
        run.small_steps = 0;
        loop {
            if let Some(cap) = cap {
                if run.small_steps >= cap {
                    return Err(AgentError::SmallStepCapExceeded { cap });
                }
            }
            let letter = run.tape.read();
            let (next, write, dir) = self.table[run.state * w + letter.index()]
                .ok_or(AgentError::AgentHalted { state: run.state, letter })?;
            run.tape.write(write);
            run.tape.shift(dir);
            run.state = next;
            run.small_steps += 1;
            if next == self.start {
                run.big_steps += 1;
                if !self.alphabet.is_omega(write) {
                    return Err(AgentError::NonActionOutput(write));
                }
                return Ok(write);
            }
        }
    }

    /// Places the percept under the head, replacing whatever was there.
    pub fn absorb(&self, run: &mut MachineRun, percept: Letter) {
        run.tape.write(percept);
    }
}
