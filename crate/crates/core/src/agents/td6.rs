//! TD6: adopt the smallest deterministic world machine that reproduces the
//! life so far, and plan a few steps ahead on it.
//!
//! Candidate machines are searched depth-first over partially specified
//! tables: a row gets fixed only when replaying the transcript reads it, and
//! its options are tried in canonical order. Smaller state counts come
//! first, so the adopted model is never larger than a consistent machine
//! that was skipped. Because a machine that contradicts a prefix of the life
//! contradicts every extension, the search resumes where it stopped when
//! the current model is contradicted. Each level of the search keeps the
//! replay state at the moment its row was first read, so trying the next
//! option replays only the rest of the transcript.
//!
//! Backtracking is conflict-directed: a contradiction only depends on some
//! of the rows fixed so far, so the search jumps straight back to the
//! deepest level that fixed one of them. Levels in between would fail the
//! same way. Every big step starts in the start state reading the action
//! just written, so a step that answers at once depends on that row alone;
//! otherwise the blame goes to every row read since the world last started
//! afresh. Without this, rows read on unrelated branches of the life get
//! retried in every combination.

use std::cell::RefCell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{uniform_action, GameTracker, Policy};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::game::Caps;
use crate::machine::{respond_with, AgentError, MachineRun, MissingRow, WorldRules, WorldTuple};
use crate::worldspace::{row_options, Determinism, PartialWorld, TapeSignature};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Td6Config {
    /// Largest model considered, in states.
    pub model_size_cap: usize,
    /// Big steps of look-ahead.
    pub search_depth: u32,
    /// Replays allowed over the whole life before giving up.
    pub search_budget: u64,
    /// Game and small-step caps used when replaying candidate models; they
    /// should match the runtime's.
    pub caps: Caps,
}

impl Td6Config {
    pub fn new(model_size_cap: usize, search_depth: u32, caps: Caps) -> Self {
        Td6Config { model_size_cap, search_depth, search_budget: 200_000, caps }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Td6Stats {
    /// Replays performed so far.
    pub search_nodes: u64,
    /// The search budget ran out; the agent plays at random from then on.
    pub budget_exhausted: bool,
    /// No machine within the size cap reproduces the life.
    pub no_model: bool,
    /// Number of times the adopted model was contradicted.
    pub model_changes: u64,
    /// Completed games at the last time a model was adopted after a search.
    pub last_adoption_game: Option<u64>,
}

/// Set of row indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn insert(&mut self, row: usize) {
        let (w, b) = (row / 64, row % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << b;
    }

    fn remove(&mut self, row: usize) {
        if let Some(w) = self.0.get_mut(row / 64) {
            *w &= !(1 << (row % 64));
        }
    }

    fn contains(&self, row: usize) -> bool {
        self.0.get(row / 64).is_some_and(|w| w >> (row % 64) & 1 == 1)
    }

    fn union(&mut self, other: &RowSet) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

#[derive(Clone, Debug)]
struct Replay {
    run: MachineRun,
    /// Next transcript index to replay.
    pos: usize,
    /// 1-based big step within the current game.
    step: u32,
    /// Rows read since the world last started afresh.
    reads: RowSet,
}

#[derive(Clone, Debug)]
struct Level {
    row: usize,
    option: usize,
    at: Replay,
    /// Rows whose values made options of this level fail.
    conflict: RowSet,
}

enum Verdict {
    Consistent(Replay),
    Missing(MissingRow, Replay),
    /// The rows the failing replay read.
    Contradiction(RowSet),
}

#[derive(Clone, Debug)]
pub struct Td6 {
    config: Td6Config,
    alphabet: AlphabetConfig,
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
    tracker: GameTracker,
    transcript: Vec<(Letter, Letter)>,
    last_action: Option<Letter>,
    n_states: usize,
    options: Vec<Vec<WorldTuple>>,
    model: PartialWorld,
    levels: Vec<Level>,
    /// Replay state at the end of the transcript when a model is adopted,
    /// otherwise where the next replay starts.
    cursor: Replay,
    adopted: bool,
    stats: Td6Stats,
}

fn fresh_replay() -> Replay {
    Replay { run: MachineRun::new(0), pos: 0, step: 1, reads: RowSet::default() }
}

/// A partial model that notes which rows get read.
struct Recording<'a> {
    model: &'a PartialWorld,
    reads: RefCell<&'a mut RowSet>,
}

impl WorldRules for Recording<'_> {
    fn alphabet(&self) -> &AlphabetConfig {
        self.model.alphabet()
    }

    fn start(&self) -> usize {
        0
    }

    fn row(&self, state: usize, letter: Letter) -> Result<&[WorldTuple], MissingRow> {
        let r = self.model.row(state, letter)?;
        self.reads.borrow_mut().insert(self.model.row_index(state, letter));
        Ok(r)
    }
}

/// A partial model whose free rows read as a fixed optimistic option.
struct Completed<'a> {
    model: &'a PartialWorld,
    fill: &'a [WorldTuple],
}

impl WorldRules for Completed<'_> {
    fn alphabet(&self) -> &AlphabetConfig {
        self.model.alphabet()
    }

    fn start(&self) -> usize {
        0
    }

    fn row(&self, state: usize, letter: Letter) -> Result<&[WorldTuple], MissingRow> {
        Ok(self.model.row(state, letter).unwrap_or(self.fill))
    }
}

impl Td6 {
    pub fn new(alphabet: &AlphabetConfig, config: Td6Config, seed: u64) -> Self {
        let mut agent = Td6 {
            config,
            alphabet: alphabet.clone(),
            omega: alphabet.omega().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            tracker: GameTracker::default(),
            transcript: vec![],
            last_action: None,
            n_states: 0,
            options: vec![],
            model: PartialWorld::new(alphabet.clone(), 1),
            levels: vec![],
            cursor: fresh_replay(),
            adopted: false,
            stats: Td6Stats::default(),
        };
        agent.start_size(1);
        agent.search();
        agent
    }

    pub fn stats(&self) -> &Td6Stats {
        &self.stats
    }

    /// States of the adopted model, if any.
    pub fn model_size(&self) -> Option<usize> {
        self.adopted.then_some(self.n_states)
    }

    pub fn model(&self) -> Option<&PartialWorld> {
        self.adopted.then_some(&self.model)
    }

    fn start_size(&mut self, n: usize) {
        self.n_states = n;
        let sig = TapeSignature::from_alphabet(&self.alphabet);
        self.options = row_options(&sig, n, Determinism::DeterministicOnly, 0);
        self.model = PartialWorld::new(self.alphabet.clone(), n);
        self.levels.clear();
        self.cursor = fresh_replay();
    }

    fn replay(&mut self, mut at: Replay) -> Verdict {
        let caps = self.config.caps;
        while at.pos < self.transcript.len() {
            let (a, v) = self.transcript[at.pos];
            let mut run = at.run.clone();
            let mut step_reads = RowSet::default();
            let view = Recording { model: &self.model, reads: RefCell::new(&mut step_reads) };
            let resp = respond_with(&view, &mut run, a, caps.world_small_step_cap, &mut self.rng);
            let resp = match resp {
                Ok(r) => r,
                Err(m) => return Verdict::Missing(m, at),
            };
            let is_final = self.alphabet.is_final(resp.percept);
            let percept = if resp.forced_draw || (!is_final && at.step >= caps.game_big_step_cap) {
                Letter::DRAW
            } else {
                resp.percept
            };
            let first = self.model.row_index(0, a);
            if percept != v {
                let mut alone = RowSet::default();
                alone.insert(first);
                if step_reads == alone && run.small_steps == 1 {
                    return Verdict::Contradiction(alone);
                }
                at.reads.union(&step_reads);
                return Verdict::Contradiction(at.reads);
            }
            at.reads.union(&step_reads);
            if self.alphabet.is_final(percept) {
                at.step = 1;
                if caps.reset_world_each_game {
                    at.run = MachineRun::new(0);
                    at.reads = RowSet::default();
                } else {
                    at.run = run;
                }
            } else {
                at.step += 1;
                at.run = run;
            }
            at.pos += 1;
        }
        Verdict::Consistent(at)
    }

    /// Moves to the next candidate after a contradiction that depends on the
    /// rows in `conflict`. Returns false when no candidate within the size
    /// cap remains.
    fn backtrack(&mut self, mut conflict: RowSet) -> bool {
        loop {
            // Levels whose rows the conflict never read would fail alike.
            while let Some(top) = self.levels.last() {
                if conflict.contains(top.row) {
                    break;
                }
                self.model.unset(top.row);
                self.levels.pop();
            }
            let Some(top) = self.levels.last_mut() else { break };
            conflict.remove(top.row);
            top.conflict.union(&conflict);
            top.option += 1;
            if top.option < self.options.len() {
                let (row, at) = (top.row, top.at.clone());
                self.model.set(row, self.options[top.option].clone());
                self.cursor = at;
                return true;
            }
            // Every option failed: the blame moves to the rows behind them.
            conflict = std::mem::take(&mut top.conflict);
            let row = top.row;
            self.model.unset(row);
            self.levels.pop();
        }
        if self.n_states >= self.config.model_size_cap {
            return false;
        }
        self.start_size(self.n_states + 1);
        true
    }

    fn search(&mut self) {
        if self.stats.budget_exhausted || self.stats.no_model {
            return;
        }
        loop {
            if self.stats.search_nodes >= self.config.search_budget {
                self.stats.budget_exhausted = true;
                self.adopted = false;
                return;
            }
            self.stats.search_nodes += 1;
            match self.replay(self.cursor.clone()) {
                Verdict::Consistent(end) => {
                    self.cursor = end;
                    if !self.adopted {
                        self.stats.last_adoption_game = Some(self.tracker.games);
                    }
                    self.adopted = true;
                    return;
                }
                Verdict::Missing(m, at) => {
                    let row = self.model.row_index(m.state, m.letter);
                    self.model.set(row, self.options[0].clone());
                    self.levels.push(Level { row, option: 0, at: at.clone(), conflict: RowSet::default() });
                    self.cursor = at;
                }
                Verdict::Contradiction(reads) => {
                    if self.adopted {
                        self.adopted = false;
                        self.stats.model_changes += 1;
                    }
                    if !self.backtrack(reads) {
                        self.stats.no_model = true;
                        return;
                    }
                }
            }
        }
    }

    /// Best action and its value by depth-limited search on the model.
    fn plan(&mut self, run: &MachineRun, step: u32, depth: u32) -> (usize, f64) {
        let caps = self.config.caps;
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..self.omega.len() {
            let mut r = run.clone();
            let view = Completed { model: &self.model, fill: &self.options[0] };
            let resp = respond_with(&view, &mut r, self.omega[i], caps.world_small_step_cap, &mut self.rng)
                .expect("completed model is total");
            let is_final = self.alphabet.is_final(resp.percept);
            let percept = if resp.forced_draw || (!is_final && step >= caps.game_big_step_cap) {
                Letter::DRAW
            } else {
                resp.percept
            };
            let value = match self.alphabet.outcome_of(percept) {
                Some(o) => o.doubled_payoff() as f64 / 2.0,
                None if depth <= 1 => 0.5,
                None => self.plan(&r, step + 1, depth - 1).1,
            };
            if value > best.1 {
                best = (i, value);
            }
        }
        best
    }
}

impl Policy for Td6 {
    fn act(&mut self) -> Result<Letter, AgentError> {
        let a = if self.adopted {
            let (run, step) = (self.cursor.run.clone(), self.cursor.step);
            let depth = self.config.search_depth.max(1);
            let i = self.plan(&run, step, depth).0;
            self.omega[i]
        } else {
            uniform_action(&self.omega, &mut self.rng)
        };
        self.last_action = Some(a);
        self.tracker.act(a);
        Ok(a)
    }

    fn observe(&mut self, percept: Letter) {
        let a = self.last_action.take().expect("observe follows act");
        self.transcript.push((a, percept));
        self.tracker.observe(&self.alphabet, percept);
        self.search();
    }
}
