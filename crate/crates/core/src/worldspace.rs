//! Counting, enumerating and sampling world machines of bounded size.
//!
//! A machine with `p` states over a tape alphabet of `a` letters has `p·a`
//! rows. Every row independently takes one *row option*:
//!
//! * a single tuple: an output `(p0, σ, D)` with σ ∈ Σ, or a move to another
//!   state `(q, δ, D)` with q ≠ p0 and any letter δ;
//! * a nondeterminism group of `k ≥ 2` outputs with pairwise distinct
//!   letters, which costs `k - 1` size units.
//!
//! Row options are listed in a fixed canonical order, and machines are
//! ordered by state count, then lexicographically by their rows' option
//! indices in row-major order. The start state is always state 0.
//!
//! Because validity is a per-row property, valid machines can be counted
//! exactly, sampled uniformly by decoding a uniform index, and enumerated
//! lazily by *behavior class*: only the rows a probe actually touches get
//! fixed, and the remaining rows are counted as a multiplicity.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::alphabet::{AlphabetConfig, Letter};
use crate::machine::{MissingRow, WorldMachine, WorldRules, WorldTuple};
use crate::tape::Direction;

const DIRS: [Direction; 2] = [Direction::Left, Direction::Right];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldSpaceError {
    #[error("enumeration stopped after the configured cap of {0} items")]
    BudgetExceeded(u64),
    #[error("max_size must be at least 1")]
    ZeroSize,
    #[error("the world space is empty")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Determinism {
    DeterministicOnly,
    All,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldSpaceSpec {
    pub alphabet: AlphabetConfig,
    pub max_size: usize,
    pub determinism: Determinism,
    /// Enumeration stops with an error after this many machines.
    pub yield_cap: Option<u64>,
}

impl WorldSpaceSpec {
    pub fn new(alphabet: AlphabetConfig, max_size: usize, determinism: Determinism) -> Self {
        WorldSpaceSpec { alphabet, max_size, determinism, yield_cap: None }
    }

    fn signature(&self) -> TapeSignature {
        TapeSignature::from_alphabet(&self.alphabet)
    }
}

/// The part of an alphabet that matters for counting: how many tape letters
/// there are and which of them may be output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TapeSignature {
    outputs: Vec<bool>,
}

impl TapeSignature {
    /// `outputs[i]` says whether letter `i` is a percept.
    pub fn new(outputs: Vec<bool>) -> Self {
        TapeSignature { outputs }
    }

    pub fn from_alphabet(a: &AlphabetConfig) -> Self {
        TapeSignature { outputs: a.tape_letters().map(|l| a.is_sigma(l)).collect() }
    }

    pub fn width(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_output(&self, l: Letter) -> bool {
        self.outputs.get(l.index()).copied().unwrap_or(false)
    }

    fn output_letters(&self) -> Vec<Letter> {
        (0..self.width()).filter(|&i| self.outputs[i]).map(|i| Letter(i as u16)).collect()
    }
}

/// `(2·p·a)^(p·a)`: transition tables with one tuple per row, before any
/// validity constraint.
pub fn count_raw_deterministic(p: u64, a: u64) -> BigUint {
    let rows = p * a;
    BigUint::from(2 * rows).pow(u32::try_from(rows).expect("row count fits u32"))
}

/// Row options in canonical order, cheapest first. Groups are only listed
/// up to `max_cost`.
pub fn row_options(sig: &TapeSignature, n_states: usize, det: Determinism, max_cost: usize) -> Vec<Vec<WorldTuple>> {
    let outs = sig.output_letters();
    let mut opts = vec![];
    for &v in &outs {
        for dir in DIRS {
            opts.push(vec![WorldTuple { next: 0, write: v, dir }]);
        }
    }
    for next in 1..n_states {
        for i in 0..sig.width() {
            for dir in DIRS {
                opts.push(vec![WorldTuple { next, write: Letter(i as u16), dir }]);
            }
        }
    }
    if det == Determinism::All {
        for k in 2..=outs.len().min(max_cost + 1) {
            for subset in combinations(outs.len(), k) {
                for mask in 0..(1u32 << k) {
                    let group = subset
                        .iter()
                        .enumerate()
                        .map(|(j, &s)| WorldTuple {
                            next: 0,
                            write: outs[s],
                            dir: DIRS[((mask >> (k - 1 - j)) & 1) as usize],
                        })
                        .collect();
                    opts.push(group);
                }
            }
        }
    }
    opts
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn cost(option: &[WorldTuple]) -> usize {
    option.len() - 1
}

/// `ways[i][b]`: completions of rows `i..` using at most `b` size units.
fn ways_table(costs: &[usize], rows: usize, budget: usize) -> Vec<Vec<BigUint>> {
    let mut per_cost = vec![BigUint::zero(); budget + 1];
    for &c in costs {
        if c <= budget {
            per_cost[c] += 1u32;
        }
    }
    let mut ways = vec![vec![BigUint::zero(); budget + 1]; rows + 1];
    ways[rows] = vec![BigUint::one(); budget + 1];
    for i in (0..rows).rev() {
        for b in 0..=budget {
            let mut w = BigUint::zero();
            for (c, n) in per_cost.iter().enumerate().take(b + 1) {
                if !n.is_zero() {
                    w += n * &ways[i + 1][b - c];
                }
            }
            ways[i][b] = w;
        }
    }
    ways
}

/// Valid machines with exactly `n_states` states and size at most
/// `max_size`.
pub fn count_valid(sig: &TapeSignature, n_states: usize, det: Determinism, max_size: usize) -> BigUint {
    if n_states == 0 || n_states > max_size {
        return BigUint::zero();
    }
    let budget = max_size - n_states;
    let costs: Vec<usize> = row_options(sig, n_states, det, budget).iter().map(|o| cost(o)).collect();
    ways_table(&costs, n_states * sig.width(), budget)[0][budget].clone()
}

/// Valid machines of size at most `spec.max_size`.
pub fn count_worlds(spec: &WorldSpaceSpec) -> BigUint {
    let sig = spec.signature();
    (1..=spec.max_size).map(|p| count_valid(&sig, p, spec.determinism, spec.max_size)).sum()
}

/// Lazy odometer over the tables of one state count, in canonical order.
#[derive(Clone, Debug)]
pub struct TableIter {
    options: Vec<Vec<WorldTuple>>,
    rows: usize,
    budget: usize,
    digits: Vec<usize>,
    state: IterState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl TableIter {
    pub fn new(sig: &TapeSignature, n_states: usize, det: Determinism, max_size: usize) -> Self {
        let empty = n_states == 0 || n_states > max_size;
        let budget = max_size.saturating_sub(n_states);
        let options = if empty { vec![] } else { row_options(sig, n_states, det, budget) };
        let rows = n_states * sig.width();
        TableIter {
            options,
            rows,
            budget,
            digits: vec![0; rows],
            state: if empty { IterState::Done } else { IterState::Fresh },
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.options.len();
        for i in (0..self.rows).rev() {
            let used: usize = self.digits[..i].iter().map(|&d| cost(&self.options[d])).sum();
            let d = self.digits[i] + 1;
            // Options are sorted by cost, so the first one over budget ends
            // the row.
            if d < n && used + cost(&self.options[d]) <= self.budget {
                self.digits[i] = d;
                for x in &mut self.digits[i + 1..] {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for TableIter {
    type Item = Vec<Vec<WorldTuple>>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => self.state = IterState::Running,
            IterState::Running => {
                if !self.advance() {
                    self.state = IterState::Done;
                    return None;
                }
            }
        }
        Some(self.digits.iter().map(|&d| self.options[d].clone()).collect())
    }
}

/// Every valid machine of the space, once each, in canonical order.
pub fn enumerate_worlds(spec: &WorldSpaceSpec) -> WorldIter {
    WorldIter { spec: spec.clone(), sig: spec.signature(), n_states: 0, tables: None, yielded: 0, failed: false }
}

pub struct WorldIter {
    spec: WorldSpaceSpec,
    sig: TapeSignature,
    n_states: usize,
    tables: Option<TableIter>,
    yielded: u64,
    failed: bool,
}

impl Iterator for WorldIter {
    type Item = Result<WorldMachine, WorldSpaceError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            if let Some(rows) = self.tables.as_mut().and_then(Iterator::next) {
                if let Some(cap) = self.spec.yield_cap {
                    if self.yielded >= cap {
                        self.failed = true;
                        return Some(Err(WorldSpaceError::BudgetExceeded(cap)));
                    }
                }
                self.yielded += 1;
                let m = WorldMachine::from_rows(self.spec.alphabet.clone(), self.n_states, rows)
                    .expect("row options only form valid machines");
                return Some(Ok(m));
            }
            if self.n_states >= self.spec.max_size {
                return None;
            }
            self.n_states += 1;
            self.tables = Some(TableIter::new(&self.sig, self.n_states, self.spec.determinism, self.spec.max_size));
        }
    }
}

/// Rows of the machine with index `index` (in canonical order) among the
/// machines with `n_states` states.
fn decode_rows(
    sig: &TapeSignature,
    n_states: usize,
    det: Determinism,
    max_size: usize,
    mut index: BigUint,
) -> Vec<Vec<WorldTuple>> {
    let budget = max_size - n_states;
    let options = row_options(sig, n_states, det, budget);
    let costs: Vec<usize> = options.iter().map(|o| cost(o)).collect();
    let rows = n_states * sig.width();
    let ways = ways_table(&costs, rows, budget);
    let mut left = budget;
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut chosen = None;
        for (o, &c) in options.iter().zip(&costs) {
            if c > left {
                break;
            }
            let w = &ways[i + 1][left - c];
            if index < *w {
                chosen = Some((o.clone(), c));
                break;
            }
            index -= w;
        }
        let (o, c) = chosen.expect("index below the count");
        left -= c;
        out.push(o);
    }
    out
}

/// Uniformly random valid machine of the space. Draws an index below the
/// exact count and decodes it, so there is no rejection loop.
pub fn sample_world<R: Rng + ?Sized>(spec: &WorldSpaceSpec, rng: &mut R) -> Result<WorldMachine, WorldSpaceError> {
    if spec.max_size == 0 {
        return Err(WorldSpaceError::ZeroSize);
    }
    let sig = spec.signature();
    let counts: Vec<BigUint> =
        (1..=spec.max_size).map(|p| count_valid(&sig, p, spec.determinism, spec.max_size)).collect();
    let total: BigUint = counts.iter().sum();
    if total.is_zero() {
        return Err(WorldSpaceError::Empty);
    }
    let mut index = rng.gen_biguint_below(&total);
    for (i, c) in counts.iter().enumerate() {
        if index < *c {
            let p = i + 1;
            let rows = decode_rows(&sig, p, spec.determinism, spec.max_size, index);
            return Ok(WorldMachine::from_rows(spec.alphabet.clone(), p, rows).expect("decoded machine is valid"));
        }
        index -= c;
    }
    unreachable!("index below total")
}

/// Machine whose rows are only partly fixed. Reading an unfixed row is a
/// [`MissingRow`] error, which is how probes discover the rows they need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialWorld {
    alphabet: AlphabetConfig,
    n_states: usize,
    rows: Vec<Option<Vec<WorldTuple>>>,
}

impl PartialWorld {
    pub fn new(alphabet: AlphabetConfig, n_states: usize) -> Self {
        let rows = vec![None; n_states * alphabet.tape_size()];
        PartialWorld { alphabet, n_states, rows }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn row_index(&self, state: usize, letter: Letter) -> usize {
        state * self.alphabet.tape_size() + letter.index()
    }

    pub fn set(&mut self, index: usize, tuples: Vec<WorldTuple>) {
        self.rows[index] = Some(tuples);
    }

    pub fn unset(&mut self, index: usize) {
        self.rows[index] = None;
    }

    pub fn get(&self, index: usize) -> Option<&[WorldTuple]> {
        self.rows[index].as_deref()
    }

    pub fn defined(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn undefined(&self) -> usize {
        self.rows.len() - self.defined()
    }

    /// Fills every unfixed row with `fill` and validates the result.
    pub fn complete(&self, fill: &[WorldTuple]) -> WorldMachine {
        let rows = self.rows.iter().map(|r| r.clone().unwrap_or_else(|| fill.to_vec())).collect();
        WorldMachine::from_rows(self.alphabet.clone(), self.n_states, rows).expect("row options form valid machines")
    }
}

impl WorldRules for PartialWorld {
    fn alphabet(&self) -> &AlphabetConfig {
        &self.alphabet
    }

    fn start(&self) -> usize {
        0
    }

    fn row(&self, state: usize, letter: Letter) -> Result<&[WorldTuple], MissingRow> {
        self.rows[self.row_index(state, letter)].as_deref().ok_or(MissingRow { state, letter })
    }
}

/// A set of deterministic machines that agree on every row a probe reads.
#[derive(Clone, Debug)]
pub struct BehaviorClass {
    pub partial: PartialWorld,
    /// A member: the class with every free row set to the first option.
    pub world: WorldMachine,
    /// Number of machines in the class.
    pub multiplicity: BigUint,
}

/// Splits all deterministic machines with `n_states` states into classes
/// that `probe` cannot tell apart. The probe must be a deterministic function
/// of the rows it reads. Classes come out in canonical order of the rows in
/// the order the probe first reads them. `budget` caps the number of probe
/// calls.
pub fn behavior_classes<F>(
    alphabet: &AlphabetConfig,
    n_states: usize,
    probe: F,
    budget: u64,
) -> Result<Vec<BehaviorClass>, WorldSpaceError>
where
    F: FnMut(&PartialWorld) -> Result<(), MissingRow>,
{
    let sig = TapeSignature::from_alphabet(alphabet);
    let fill = row_options(&sig, n_states, Determinism::DeterministicOnly, 0).swap_remove(0);
    let mut out = vec![];
    visit_behavior_classes(alphabet, n_states, probe, budget, |pw, m| {
        out.push(BehaviorClass { partial: pw.clone(), world: pw.complete(&fill), multiplicity: m.clone() });
    })?;
    Ok(out)
}

/// Streaming form of [`behavior_classes`]: calls `visit` with each class's
/// partial table and multiplicity instead of collecting them. Returns the
/// number of classes.
pub fn visit_behavior_classes<F, V>(
    alphabet: &AlphabetConfig,
    n_states: usize,
    mut probe: F,
    budget: u64,
    mut visit: V,
) -> Result<u64, WorldSpaceError>
where
    F: FnMut(&PartialWorld) -> Result<(), MissingRow>,
    V: FnMut(&PartialWorld, &BigUint),
{
    let sig = TapeSignature::from_alphabet(alphabet);
    let options = row_options(&sig, n_states, Determinism::DeterministicOnly, 0);
    let powers: Vec<BigUint> = {
        let n = BigUint::from(options.len());
        let rows = n_states * alphabet.tape_size();
        (0..=rows).map(|k| n.pow(k as u32)).collect()
    };
    let mut pw = PartialWorld::new(alphabet.clone(), n_states);
    let mut calls = 0u64;
    let mut classes = 0u64;
    // Explicit stack of (row index, option) levels.
    let mut stack: Vec<(usize, usize)> = vec![];
    loop {
        calls += 1;
        if calls > budget {
            return Err(WorldSpaceError::BudgetExceeded(budget));
        }
        match probe(&pw) {
            Ok(()) => {
                classes += 1;
                visit(&pw, &powers[pw.undefined()]);
            }
            Err(m) => {
                let idx = pw.row_index(m.state, m.letter);
                pw.set(idx, options[0].clone());
                stack.push((idx, 0));
                continue;
            }
        }
        // Advance to the next sibling, unwinding exhausted levels.
        loop {
            let Some(top) = stack.last_mut() else { return Ok(classes) };
            top.1 += 1;
            if top.1 < options.len() {
                pw.set(top.0, options[top.1].clone());
                break;
            }
            pw.unset(top.0);
            stack.pop();
        }
    }
}
