use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MachineError, MachineRun};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::tape::Direction;

/// Upper bound on branches produced by one big step in [`outcomes_with`].
/// A group is bounded by |Σ|, so this only trips on malformed rule sources.
pub const DEFAULT_BRANCH_LIMIT: usize = 64;

/// Right-hand side of a world transition: target state, written letter, move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WorldTuple {
    pub next: usize,
    pub write: Letter,
    pub dir: Direction,
}

/// A full 5-tuple `(state, read, next, write, dir)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tuple5 {
    pub state: usize,
    pub read: Letter,
    pub next: usize,
    pub write: Letter,
    pub dir: Direction,
}

impl Tuple5 {
    pub fn rhs(&self) -> WorldTuple {
        WorldTuple { next: self.next, write: self.write, dir: self.dir }
    }
}

/// Unvalidated description of a world machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldMachineSpec {
    pub alphabet: AlphabetConfig,
    pub n_states: usize,
    pub start: usize,
    pub tuples: Vec<Tuple5>,
}

/// A validated world machine: a total transition relation over Σ ∪ Ω ∪ {λ}
/// that is nondeterministic only on output tuples.
///
/// Rows are stored densely (`state * tape_size + letter`); tuples within a row
/// are kept sorted, so a nondeterminism group is ordered by output letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldMachine {
    alphabet: AlphabetConfig,
    n_states: usize,
    start: usize,
    rows: Vec<Vec<WorldTuple>>,
}

/// Read access to transition rows. Implemented by complete machines and by
/// partially specified ones used during model search.
pub trait WorldRules {
    fn alphabet(&self) -> &AlphabetConfig;
    fn start(&self) -> usize;
    fn row(&self, state: usize, letter: Letter) -> Result<&[WorldTuple], MissingRow>;
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash)]
#[error("row (state {state}, letter {letter:?}) is not specified")]
pub struct MissingRow {
    pub state: usize,
    pub letter: Letter,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error(transparent)]
    Missing(#[from] MissingRow),
    #[error("{branches} branches in one big step exceed the limit of {limit}")]
    BranchExplosion { branches: usize, limit: usize },
}

/// Result of one world big step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Response {
    pub percept: Letter,
    /// The small-step cap interrupted the machine and injected a draw.
    pub forced_draw: bool,
}

/// One possible result of a world big step, with its exact probability.
#[derive(Clone, Debug)]
pub struct WorldOutcome {
    pub percept: Letter,
    pub probability: BigRational,
    pub forced_draw: bool,
    pub run: MachineRun,
}

impl WorldMachine {
    pub fn new(spec: WorldMachineSpec) -> Result<Self, MachineError> {
        let WorldMachineSpec { alphabet, n_states, start, tuples } = spec;
        if n_states == 0 {
            return Err(MachineError::NoStates);
        }
        if start >= n_states {
            return Err(MachineError::MissingStart(start));
        }
        let width = alphabet.tape_size();
        let mut sets: Vec<BTreeSet<WorldTuple>> = vec![BTreeSet::new(); n_states * width];
        for t in &tuples {
            for s in [t.state, t.next] {
                if s >= n_states {
                    return Err(MachineError::UnknownState(s));
                }
            }
            for l in [t.read, t.write] {
                if l.index() >= width {
                    return Err(MachineError::BadLetter(l));
                }
            }
            sets[t.state * width + t.read.index()].insert(t.rhs());
        }
        for (i, set) in sets.iter().enumerate() {
            let (state, letter) = (i / width, Letter((i % width) as u16));
            for t in set {
                if t.next == start && !alphabet.is_sigma(t.write) {
                    return Err(MachineError::NonSigmaOutput { state, letter, write: t.write });
                }
            }
            if set.len() > 1 {
                let v: Vec<_> = set.iter().collect();
                for (j, a) in v.iter().enumerate() {
                    if v[j + 1..].iter().any(|b| a.next == b.next && a.write == b.write) {
                        return Err(MachineError::DirectionOnlyDuplicate { state, letter });
                    }
                }
                if v.iter().any(|t| t.next != start) {
                    return Err(MachineError::IllegalNondeterminism { state, letter });
                }
            }
        }
        if let Some(i) = sets.iter().position(|s| s.is_empty()) {
            return Err(MachineError::NotTotal { state: i / width, letter: Letter((i % width) as u16) });
        }
        let rows = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(WorldMachine { alphabet, n_states, start, rows })
    }

    /// Builds a machine from dense rows, validating it.
    pub fn from_rows(
        alphabet: AlphabetConfig,
        n_states: usize,
        rows: Vec<Vec<WorldTuple>>,
    ) -> Result<Self, MachineError> {
        let width = alphabet.tape_size();
        let tuples = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().map(move |t| Tuple5 {
                    state: i / width,
                    read: Letter((i % width) as u16),
                    next: t.next,
                    write: t.write,
                    dir: t.dir,
                })
            })
            .collect();
        WorldMachine::new(WorldMachineSpec { alphabet, n_states, start: 0, tuples })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn rows(&self) -> &[Vec<WorldTuple>] {
        &self.rows
    }

    pub fn tuples(&self) -> impl Iterator<Item = Tuple5> + '_ {
        let width = self.alphabet.tape_size();
        self.rows.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().map(move |t| Tuple5 {
                state: i / width,
                read: Letter((i % width) as u16),
                next: t.next,
                write: t.write,
                dir: t.dir,
            })
        })
    }

    pub fn spec(&self) -> WorldMachineSpec {
        WorldMachineSpec {
            alphabet: self.alphabet.clone(),
            n_states: self.n_states,
            start: self.start,
            tuples: self.tuples().collect(),
        }
    }

    /// Sizes of the nondeterminism groups (rows with two or more tuples).
    pub fn group_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(Vec::len).filter(|&n| n > 1)
    }

    pub fn is_deterministic(&self) -> bool {
        self.group_sizes().next().is_none()
    }

    /// Number of states plus the level of indefiniteness (nondeterministic
    /// tuples minus nondeterminism groups).
    pub fn size(&self) -> usize {
        self.n_states + self.group_sizes().map(|n| n - 1).sum::<usize>()
    }

    pub fn fresh_run(&self) -> MachineRun {
        MachineRun::new(self.start)
    }

    /// One big step with uniform choice inside nondeterminism groups.
    pub fn respond<R: Rng + ?Sized>(
        &self,
        run: &mut MachineRun,
        action: Letter,
        small_cap: u32,
        rng: &mut R,
    ) -> Response {
        respond_with(self, run, action, small_cap, rng).expect("validated machines are total")
    }

    /// Every possible result of one big step with its exact probability.
    pub fn outcomes(&self, run: &MachineRun, action: Letter, small_cap: u32) -> Result<Vec<WorldOutcome>, StepError> {
        outcomes_with(self, run, action, small_cap, DEFAULT_BRANCH_LIMIT)
    }
}

impl WorldRules for WorldMachine {
    fn alphabet(&self) -> &AlphabetConfig {
        &self.alphabet
    }

    fn start(&self) -> usize {
        self.start
    }

    #[inline]
    fn row(&self, state: usize, letter: Letter) -> Result<&[WorldTuple], MissingRow> {
        Ok(&self.rows[state * self.alphabet.tape_size() + letter.index()])
    }
}

#[inline]
fn apply(run: &mut MachineRun, t: &WorldTuple) {
    run.tape.write(t.write);
    run.tape.shift(t.dir);
    run.state = t.next;
}

/// Runs deterministic small steps until the big step ends or a group is hit.
/// Returns `Ok(Some(response))` when finished, `Ok(None)` with the run
/// positioned in front of a nondeterministic row otherwise.
fn advance<W: WorldRules + ?Sized>(
    world: &W,
    run: &mut MachineRun,
    small_cap: u32,
) -> Result<Option<Response>, MissingRow> {
    let start = world.start();
    loop {
        let row = world.row(run.state, run.tape.read())?;
        if run.small_steps >= small_cap as u64 {
            // Interrupted: the step completes as an output of `draw`.
            let t = WorldTuple { next: start, write: Letter::DRAW, dir: row[0].dir };
            run.small_steps += 1;
            apply(run, &t);
            run.big_steps += 1;
            return Ok(Some(Response { percept: Letter::DRAW, forced_draw: true }));
        }
        if row.len() > 1 {
            return Ok(None);
        }
        let t = row[0];
        run.small_steps += 1;
        apply(run, &t);
        if t.next == start {
            run.big_steps += 1;
            return Ok(Some(Response { percept: t.write, forced_draw: false }));
        }
    }
}

/// [`WorldMachine::respond`] over any rule source.
pub fn respond_with<W: WorldRules + ?Sized, R: Rng + ?Sized>(
    world: &W,
    run: &mut MachineRun,
    action: Letter,
    small_cap: u32,
    rng: &mut R,
) -> Result<Response, MissingRow> {
    run.tape.write(action);
    run.small_steps = 0;
    if let Some(r) = advance(world, run, small_cap)? {
        return Ok(r);
    }
    let row = world.row(run.state, run.tape.read())?;
    let t = row[rng.gen_range(0..row.len())];
    run.small_steps += 1;
    apply(run, &t);
    run.big_steps += 1;
    Ok(Response { percept: t.write, forced_draw: false })
}

/// [`WorldMachine::outcomes`] over any rule source.
pub fn outcomes_with<W: WorldRules + ?Sized>(
    world: &W,
    run: &MachineRun,
    action: Letter,
    small_cap: u32,
    branch_limit: usize,
) -> Result<Vec<WorldOutcome>, StepError> {
    let mut run = run.clone();
    run.tape.write(action);
    run.small_steps = 0;
    if let Some(r) = advance(world, &mut run, small_cap)? {
        return Ok(vec![WorldOutcome {
            percept: r.percept,
            probability: BigRational::from_integer(1.into()),
            forced_draw: r.forced_draw,
            run,
        }]);
    }
    let row = world.row(run.state, run.tape.read())?;
    if row.len() > branch_limit {
        return Err(StepError::BranchExplosion { branches: row.len(), limit: branch_limit });
    }
    let p = BigRational::new(BigInt::from(1), BigInt::from(row.len()));
    Ok(row
        .iter()
        .map(|t| {
            let mut r = run.clone();
            r.small_steps += 1;
            apply(&mut r, t);
            r.big_steps += 1;
            WorldOutcome { percept: t.write, probability: p.clone(), forced_draw: false, run: r }
        })
        .collect())
}
