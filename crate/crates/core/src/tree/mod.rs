//! Game trees, strategies and the Max-Sum solver.
//!
//! A tree is an arena of nodes. AI nodes branch on every action, world nodes
//! branch on the percepts that can follow, each with an exact probability,
//! and leaves carry the success of the finished life segment. Children are
//! always allocated after their parent, so a reverse scan of the arena is a
//! valid bottom-up order.
//!
//! Trees can be built over a single world or over a weighted mixture of
//! worlds. In the mixture case every AI node stands for one history and the
//! arc probabilities are the posterior masses of the worlds consistent with
//! it, which makes Max-Sum on the mixture tree maximize the weighted mean
//! success over the worlds.

mod solve;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::alphabet::{AlphabetConfig, Letter, Outcome};
use crate::game::Caps;
use crate::machine::{
    outcomes_with, MachineRun, MissingRow, StepError, WorldMachine, WorldRules, DEFAULT_BRANCH_LIMIT,
};

pub use solve::{
    count_strategies, enumerate_strategies, max_sum, strategy_expected_success, Strategy, StrategyIter, ValuedTree,
};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree would exceed the budget of {budget} {what}")]
    TreeTooLarge { what: &'static str, budget: u128 },
    #[error(transparent)]
    Missing(#[from] MissingRow),
    #[error("{branches} branches in one big step exceed the limit of {limit}")]
    BranchExplosion { branches: usize, limit: usize },
    #[error("strategy does not fit the tree at history of length {depth}")]
    StrategyMismatch { depth: usize },
    #[error("no worlds given")]
    NoWorlds,
    #[error("world weights must be positive")]
    BadWeight,
    #[error("worlds must share one alphabet")]
    AlphabetMismatch,
}

impl From<StepError> for TreeError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::Missing(m) => TreeError::Missing(m),
            StepError::BranchExplosion { branches, limit } => TreeError::BranchExplosion { branches, limit },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// One child per action, in Ω order.
    Ai { children: Vec<(Letter, NodeId)> },
    /// Percept children with their probabilities, in first-seen order.
    World { children: Vec<(Letter, BigRational, NodeId)> },
    /// End of the last game. `payoff` is the success over all games of the
    /// tree; `outcome` is the result of the last one.
    Leaf { outcome: Outcome, payoff: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub depth: u32,
    /// Index of the game this node belongs to, from 0.
    pub game: u32,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    nodes: Vec<Node>,
    alphabet: AlphabetConfig,
    n_games: u32,
}

impl GameTree {
    pub const ROOT: NodeId = 0;

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alphabet(&self) -> &AlphabetConfig {
        &self.alphabet
    }

    pub fn n_games(&self) -> u32 {
        self.n_games
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Indented text, one node per line. With `values`, each node shows its
    /// Max-Sum value.
    pub fn dump(&self, values: Option<&ValuedTree>) -> String {
        let mut out = String::new();
        let mut stack = vec![(GameTree::ROOT, 0usize, "root".to_string())];
        while let Some((id, indent, arc)) = stack.pop() {
            let node = &self.nodes[id];
            let _ = write!(out, "{:indent$}{arc} ", "", indent = indent * 2);
            match &node.kind {
                NodeKind::Ai { .. } => out.push_str("AI"),
                NodeKind::World { .. } => out.push_str("WORLD"),
                NodeKind::Leaf { outcome, payoff } => {
                    let _ = write!(out, "LEAF {} payoff={payoff}", outcome.name());
                }
            }
            let _ = write!(out, " depth={}", node.depth);
            if let Some(v) = values {
                let _ = write!(out, " value={}", v.value(id));
            }
            out.push('\n');
            let a = &self.alphabet;
            match &node.kind {
                NodeKind::Ai { children } => {
                    for (l, c) in children.iter().rev() {
                        stack.push((*c, indent + 1, a.name(*l).to_string()));
                    }
                }
                NodeKind::World { children } => {
                    for (l, p, c) in children.iter().rev() {
                        stack.push((*c, indent + 1, format!("{} p={p}", a.name(*l))));
                    }
                }
                NodeKind::Leaf { .. } => {}
            }
        }
        out
    }
}

/// One member of a world mixture.
pub struct TreeWorld<'a> {
    pub rules: &'a dyn WorldRules,
    pub run: MachineRun,
    pub weight: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeOptions {
    pub node_budget: usize,
    pub branch_limit: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { node_budget: DEFAULT_NODE_BUDGET, branch_limit: DEFAULT_BRANCH_LIMIT }
    }
}

/// The tree of one game played from `root_run`.
pub fn build_tree_of_this_game(
    world: &WorldMachine,
    root_run: &MachineRun,
    caps: &Caps,
) -> Result<GameTree, TreeError> {
    build_tree(
        &[TreeWorld { rules: world, run: root_run.clone(), weight: BigRational::from_integer(1.into()) }],
        1,
        caps,
        TreeOptions::default(),
    )
}

/// The tree of `n_games` consecutive games from the world's start: every
/// game-ending arc leads into the next game, which starts from the world's
/// carried-over configuration (or a fresh one if `caps` resets worlds).
pub fn build_multigame_tree(world: &WorldMachine, n_games: u32, caps: &Caps) -> Result<GameTree, TreeError> {
    build_tree(
        &[TreeWorld { rules: world, run: world.fresh_run(), weight: BigRational::from_integer(1.into()) }],
        n_games,
        caps,
        TreeOptions::default(),
    )
}

/// The tree of `n_games` games over a weighted mixture of worlds.
pub fn build_tree(
    worlds: &[TreeWorld<'_>],
    n_games: u32,
    caps: &Caps,
    opts: TreeOptions,
) -> Result<GameTree, TreeError> {
    let first = worlds.first().ok_or(TreeError::NoWorlds)?;
    let alphabet = first.rules.alphabet().clone();
    if worlds.iter().any(|w| *w.rules.alphabet() != alphabet) {
        return Err(TreeError::AlphabetMismatch);
    }
    if worlds.iter().any(|w| w.weight <= BigRational::zero()) {
        return Err(TreeError::BadWeight);
    }
    let mut b = Builder {
        nodes: vec![Node { depth: 0, game: 0, kind: NodeKind::Ai { children: vec![] } }],
        mass: vec![BigRational::zero()],
        omega: alphabet.omega().collect(),
        alphabet,
        caps: *caps,
        n_games: n_games.max(1),
        opts,
    };
    for w in worlds {
        b.walk(w.rules, GameTree::ROOT, &w.run, &w.weight, 1, 0, 0)?;
    }
    Ok(b.finish())
}

struct Builder {
    nodes: Vec<Node>,
    mass: Vec<BigRational>,
    omega: Vec<Letter>,
    alphabet: AlphabetConfig,
    caps: Caps,
    n_games: u32,
    opts: TreeOptions,
}

impl Builder {
    fn push(&mut self, node: Node) -> Result<NodeId, TreeError> {
        if self.nodes.len() >= self.opts.node_budget {
            return Err(TreeError::TreeTooLarge { what: "nodes", budget: self.opts.node_budget as u128 });
        }
        self.nodes.push(node);
        self.mass.push(BigRational::zero());
        Ok(self.nodes.len() - 1)
    }

    fn ai_child(&mut self, parent: NodeId, a: Letter) -> Result<NodeId, TreeError> {
        let Node { depth, game, kind } = &self.nodes[parent];
        let NodeKind::Ai { children } = kind else { unreachable!("AI parent") };
        if let Some(&(_, c)) = children.iter().find(|(l, _)| *l == a) {
            return Ok(c);
        }
        let node = Node { depth: depth + 1, game: *game, kind: NodeKind::World { children: vec![] } };
        let c = self.push(node)?;
        let NodeKind::Ai { children } = &mut self.nodes[parent].kind else { unreachable!() };
        children.push((a, c));
        Ok(c)
    }

    fn world_child(
        &mut self,
        parent: NodeId,
        v: Letter,
        make: impl FnOnce() -> NodeKind,
        game: u32,
    ) -> Result<NodeId, TreeError> {
        let Node { depth, kind, .. } = &self.nodes[parent];
        let NodeKind::World { children } = kind else { unreachable!("world parent") };
        if let Some((_, _, c)) = children.iter().find(|(l, _, _)| *l == v) {
            return Ok(*c);
        }
        let node = Node { depth: depth + 1, game, kind: make() };
        let c = self.push(node)?;
        let NodeKind::World { children } = &mut self.nodes[parent].kind else { unreachable!() };
        children.push((v, BigRational::zero(), c));
        Ok(c)
    }

    /// Adds the subtree reachable by one world from AI node `node`. `step`
    /// is the 1-based index of the next big step within game `game`, and
    /// `doubled` the doubled payoff collected in earlier games.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        &mut self,
        rules: &dyn WorldRules,
        node: NodeId,
        run: &MachineRun,
        mass: &BigRational,
        step: u32,
        game: u32,
        doubled: u64,
    ) -> Result<(), TreeError> {
        self.mass[node] += mass;
        for i in 0..self.omega.len() {
            let a = self.omega[i];
            let w = self.ai_child(node, a)?;
            self.mass[w] += mass;
            let outs = outcomes_with(rules, run, a, self.caps.world_small_step_cap, self.opts.branch_limit)?;
            for o in outs {
                let percept =
                    if o.forced_draw || (step >= self.caps.game_big_step_cap && !self.alphabet.is_final(o.percept)) {
                        Letter::DRAW
                    } else {
                        o.percept
                    };
                let child_mass = mass * &o.probability;
                match self.alphabet.outcome_of(percept) {
                    Some(outcome) => {
                        let d = doubled + outcome.doubled_payoff() as u64;
                        if game + 1 == self.n_games {
                            let payoff = BigRational::new(BigInt::from(d), BigInt::from(2 * self.n_games as u64));
                            let leaf = self.world_child(w, percept, || NodeKind::Leaf { outcome, payoff }, game)?;
                            self.mass[leaf] += &child_mass;
                        } else {
                            let next = self.world_child(w, percept, || NodeKind::Ai { children: vec![] }, game + 1)?;
                            let next_run =
                                if self.caps.reset_world_each_game { MachineRun::new(rules.start()) } else { o.run };
                            self.walk(rules, next, &next_run, &child_mass, 1, game + 1, d)?;
                        }
                    }
                    None => {
                        let next = self.world_child(w, percept, || NodeKind::Ai { children: vec![] }, game)?;
                        self.walk(rules, next, &o.run, &child_mass, step + 1, game, doubled)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(mut self) -> GameTree {
        for i in 0..self.nodes.len() {
            if let NodeKind::World { children } = &mut self.nodes[i].kind {
                let total = &self.mass[i];
                for (_, p, c) in children.iter_mut() {
                    *p = &self.mass[*c] / total;
                }
            }
        }
        GameTree { nodes: self.nodes, alphabet: self.alphabet, n_games: self.n_games }
    }
}
