//! TD3 and TD4: explore, record an empirical tree of the game, and play
//! Max-Sum on it.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{uniform_action, Policy};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::machine::AgentError;

/// Scale of the TD4 exploration schedule; see [`Td4Config`].
pub const DEFAULT_TD4_SCALE: f64 = 4.0;

/// TD4 parameters. On game `g` (from 1) each big step is an experiment with
/// probability `min(1, c / sqrt(g))` where `c = scale * ε / (1 - ε)`, so
/// `ε = 1` explores always and smaller courage explores strictly less.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Td4Config {
    pub courage: BigRational,
    pub scale: BigRational,
}

impl Td4Config {
    pub fn new(courage: BigRational) -> Self {
        Td4Config { courage, scale: BigRational::from_integer(4.into()) }
    }

    /// Experiment probability on game `g` (from 1).
    pub fn probability(&self, g: u64) -> f64 {
        if self.courage >= BigRational::one() {
            return 1.0;
        }
        let eps = self.courage.to_f64().unwrap_or(0.0);
        let c = self.scale.to_f64().unwrap_or(DEFAULT_TD4_SCALE) * eps / (1.0 - eps);
        (c / (g.max(1) as f64).sqrt()).min(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Schedule {
    /// Random for this many games, then greedy.
    Budget(u64),
    Courage(Td4Config),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalStats {
    /// Big steps played at random.
    pub experiments: u64,
    pub decisions: u64,
    pub games: u64,
}

impl EmpiricalStats {
    pub fn experiment_rate(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.experiments as f64 / self.decisions as f64
        }
    }
}

#[derive(Clone, Debug, Default)]
struct ActionStats {
    n: u64,
    /// (percept, count, child node for non-final percepts)
    percepts: Vec<(Letter, u64, Option<usize>)>,
}

#[derive(Clone, Debug)]
struct EmpiricalNode {
    actions: Vec<ActionStats>,
    value: f64,
}

/// Agent keeping visit and percept counts per within-game history.
#[derive(Clone, Debug)]
pub struct EmpiricalAgent {
    alphabet: AlphabetConfig,
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
    schedule: Schedule,
    nodes: Vec<EmpiricalNode>,
    /// (node, action index) pairs of the current game.
    path: Vec<(usize, usize)>,
    current: usize,
    stats: EmpiricalStats,
}

const TIE: f64 = 1e-12;

impl EmpiricalAgent {
    fn with_schedule(alphabet: &AlphabetConfig, schedule: Schedule, seed: u64) -> Self {
        let omega: Vec<Letter> = alphabet.omega().collect();
        let root = EmpiricalNode { actions: vec![ActionStats::default(); omega.len()], value: 0.5 };
        EmpiricalAgent {
            alphabet: alphabet.clone(),
            omega,
            rng: ChaCha8Rng::seed_from_u64(seed),
            schedule,
            nodes: vec![root],
            path: vec![],
            current: 0,
            stats: EmpiricalStats::default(),
        }
    }

    /// TD3: random play for `budget` games, Max-Sum on the empirical tree
    /// afterwards.
    pub fn td3(alphabet: &AlphabetConfig, budget: u64, seed: u64) -> Self {
        EmpiricalAgent::with_schedule(alphabet, Schedule::Budget(budget), seed)
    }

    /// TD4: Max-Sum with occasional experiments, see [`Td4Config`].
    pub fn td4(alphabet: &AlphabetConfig, config: Td4Config, seed: u64) -> Self {
        EmpiricalAgent::with_schedule(alphabet, Schedule::Courage(config), seed)
    }

    pub fn stats(&self) -> EmpiricalStats {
        self.stats
    }

    /// Empirical percept frequencies after `action` at the start of a game.
    pub fn root_frequencies(&self, action: Letter) -> Vec<(Letter, f64)> {
        let Some(i) = self.omega.iter().position(|&a| a == action) else { return vec![] };
        let s = &self.nodes[0].actions[i];
        s.percepts.iter().map(|&(v, c, _)| (v, c as f64 / s.n as f64)).collect()
    }

    fn q(&self, node: usize, i: usize) -> f64 {
        let s = &self.nodes[node].actions[i];
        if s.n == 0 {
            return 0.5;
        }
        let mut sum = 0.0;
        for &(v, c, child) in &s.percepts {
            let val = match self.alphabet.outcome_of(v) {
                Some(o) => o.doubled_payoff() as f64 / 2.0,
                None => self.nodes[child.expect("non-final percept has a node")].value,
            };
            sum += c as f64 * val;
        }
        sum / s.n as f64
    }

    fn best(&self, node: usize) -> (usize, f64) {
        let mut best = (0, self.q(node, 0));
        for i in 1..self.omega.len() {
            let q = self.q(node, i);
            if q > best.1 + TIE {
                best = (i, q);
            }
        }
        best
    }

    fn experiment_probability(&self) -> f64 {
        let g = self.stats.games + 1;
        match &self.schedule {
            Schedule::Budget(b) => {
                if self.stats.games < *b {
                    1.0
                } else {
                    0.0
                }
            }
            Schedule::Courage(c) => c.probability(g),
        }
    }
}

impl Policy for EmpiricalAgent {
    fn act(&mut self) -> Result<Letter, AgentError> {
        let p = self.experiment_probability();
        let explore = if p >= 1.0 {
            true
        } else if p <= 0.0 {
            false
        } else {
            self.rng.gen_bool(p)
        };
        self.stats.decisions += 1;
        let i = if explore {
            self.stats.experiments += 1;
            let a = uniform_action(&self.omega, &mut self.rng);
            self.omega.iter().position(|&x| x == a).expect("action in omega")
        } else {
            self.best(self.current).0
        };
        self.path.push((self.current, i));
        Ok(self.omega[i])
    }

    fn observe(&mut self, percept: Letter) {
        let &(node, i) = self.path.last().expect("observe follows act");
        let is_final = self.alphabet.is_final(percept);
        let s = &mut self.nodes[node].actions[i];
        s.n += 1;
        let slot = match s.percepts.iter().position(|(v, _, _)| *v == percept) {
            Some(j) => j,
            None => {
                s.percepts.push((percept, 0, None));
                s.percepts.len() - 1
            }
        };
        s.percepts[slot].1 += 1;
        if is_final {
            for k in (0..self.path.len()).rev() {
                let n = self.path[k].0;
                self.nodes[n].value = self.best(n).1;
            }
            self.path.clear();
            self.current = 0;
            self.stats.games += 1;
            return;
        }
        let child = match self.nodes[node].actions[i].percepts[slot].2 {
            Some(c) => c,
            None => {
                let c = self.nodes.len();
                self.nodes.push(EmpiricalNode { actions: vec![ActionStats::default(); self.omega.len()], value: 0.5 });
                self.nodes[node].actions[i].percepts[slot].2 = Some(c);
                c
            }
        };
        self.current = child;
    }
}

/// Whether `courage` is a valid TD4 parameter.
pub(crate) fn valid_courage(c: &BigRational) -> bool {
    *c > BigRational::zero() && *c <= BigRational::one()
}
