use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use super::{GameTree, NodeId, NodeKind, TreeError};
use crate::alphabet::{AlphabetConfig, Letter};

/// A choice of one action per reachable AI node, keyed by the history
/// `a1 v1 a2 v2 ...` that leads to the node (across games for multigame
/// trees). Keys make strategies portable between trees over different
/// worlds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Strategy {
    choices: BTreeMap<Vec<Letter>, Letter>,
}

impl Strategy {
    pub fn new() -> Self {
        Strategy::default()
    }

    pub fn insert(&mut self, history: Vec<Letter>, action: Letter) {
        self.choices.insert(history, action);
    }

    pub fn get(&self, history: &[Letter]) -> Option<Letter> {
        self.choices.get(history).copied()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Letter], Letter)> {
        self.choices.iter().map(|(h, a)| (h.as_slice(), *a))
    }

    /// One line per choice: the history letters, `->`, the action.
    pub fn to_text(&self, alphabet: &AlphabetConfig) -> String {
        let mut out = String::new();
        for (h, a) in &self.choices {
            let hist: Vec<_> = h.iter().map(|l| alphabet.name(*l)).collect();
            let _ = writeln!(out, "[{}] -> {}", hist.join(" "), alphabet.name(*a));
        }
        out
    }
}

/// A tree annotated with best possible success at every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedTree {
    values: Vec<BigRational>,
    /// Best action at each AI node; `None` elsewhere.
    choice: Vec<Option<Letter>>,
    best: Strategy,
}

impl ValuedTree {
    pub fn value(&self, id: NodeId) -> &BigRational {
        &self.values[id]
    }

    pub fn root_value(&self) -> &BigRational {
        &self.values[GameTree::ROOT]
    }

    pub fn choice(&self, id: NodeId) -> Option<Letter> {
        self.choice[id]
    }

    pub fn best_strategy(&self) -> &Strategy {
        &self.best
    }

    pub fn into_parts(self) -> (BigRational, Strategy) {
        (self.values[GameTree::ROOT].clone(), self.best)
    }
}

/// Backward induction: leaves keep their payoff, world nodes take the
/// probability-weighted sum, AI nodes the maximum. Ties go to the action
/// listed first in Ω.
pub fn max_sum(tree: &GameTree) -> ValuedTree {
    let n = tree.len();
    let mut values = vec![BigRational::zero(); n];
    let mut choice = vec![None; n];
    for id in (0..n).rev() {
        values[id] = match &tree.node(id).kind {
            NodeKind::Leaf { payoff, .. } => payoff.clone(),
            NodeKind::World { children } => {
                children.iter().fold(BigRational::zero(), |acc, (_, p, c)| acc + p * &values[*c])
            }
            NodeKind::Ai { children } => {
                let mut best: Option<(Letter, NodeId)> = None;
                for &(a, c) in children {
                    if best.is_none_or(|(_, b)| values[c] > values[b]) {
                        best = Some((a, c));
                    }
                }
                let (a, c) = best.expect("AI nodes have children");
                choice[id] = Some(a);
                values[c].clone()
            }
        };
    }
    let mut best = Strategy::new();
    let mut stack = vec![(GameTree::ROOT, Vec::new())];
    while let Some((id, hist)) = stack.pop() {
        match &tree.node(id).kind {
            NodeKind::Ai { children } => {
                let a = choice[id].expect("chosen");
                let c = children.iter().find(|(l, _)| *l == a).expect("chosen child").1;
                best.insert(hist.clone(), a);
                let mut h = hist;
                h.push(a);
                stack.push((c, h));
            }
            NodeKind::World { children } => {
                for (v, _, c) in children {
                    let mut h = hist.clone();
                    h.push(*v);
                    stack.push((*c, h));
                }
            }
            NodeKind::Leaf { .. } => {}
        }
    }
    ValuedTree { values, choice, best }
}

/// Expected success of following `strategy` in `tree`.
pub fn strategy_expected_success(strategy: &Strategy, tree: &GameTree) -> Result<BigRational, TreeError> {
    fn go(s: &Strategy, tree: &GameTree, id: NodeId, hist: &mut Vec<Letter>) -> Result<BigRational, TreeError> {
        match &tree.node(id).kind {
            NodeKind::Leaf { payoff, .. } => Ok(payoff.clone()),
            NodeKind::Ai { children } => {
                let mismatch = TreeError::StrategyMismatch { depth: hist.len() };
                let a = s.get(hist).ok_or(mismatch.clone())?;
                let &(_, c) = children.iter().find(|(l, _)| *l == a).ok_or(mismatch)?;
                hist.push(a);
                let v = go(s, tree, c, hist);
                hist.pop();
                v
            }
            NodeKind::World { children } => {
                let mut sum = BigRational::zero();
                for (v, p, c) in children {
                    hist.push(*v);
                    let r = go(s, tree, *c, hist);
                    hist.pop();
                    sum += p * r?;
                }
                Ok(sum)
            }
        }
    }
    go(strategy, tree, GameTree::ROOT, &mut Vec::new())
}

/// Per-node strategy counts (AI: sum over children, world: product),
/// saturating at `u128::MAX`.
fn node_counts(tree: &GameTree) -> Vec<u128> {
    let mut counts = vec![0u128; tree.len()];
    for id in (0..tree.len()).rev() {
        counts[id] = match &tree.node(id).kind {
            NodeKind::Leaf { .. } => 1,
            NodeKind::Ai { children } => children.iter().fold(0u128, |acc, (_, c)| acc.saturating_add(counts[*c])),
            NodeKind::World { children } => {
                children.iter().fold(1u128, |acc, (_, _, c)| acc.saturating_mul(counts[*c]))
            }
        };
    }
    counts
}

/// Number of strategies of the tree (saturating at `u128::MAX`).
pub fn count_strategies(tree: &GameTree) -> u128 {
    node_counts(tree)[GameTree::ROOT]
}

/// Every strategy exactly once. Order: the root's choice varies slowest, and
/// below a world node the first percept's sub-strategy varies slowest.
pub fn enumerate_strategies(tree: &GameTree, budget: u128) -> Result<StrategyIter<'_>, TreeError> {
    let counts = node_counts(tree);
    let total = counts[GameTree::ROOT];
    if total > budget {
        return Err(TreeError::TreeTooLarge { what: "strategies", budget });
    }
    Ok(StrategyIter { tree, counts, next: 0, total })
}

pub struct StrategyIter<'t> {
    tree: &'t GameTree,
    counts: Vec<u128>,
    next: u128,
    total: u128,
}

impl StrategyIter<'_> {
    pub fn total(&self) -> u128 {
        self.total
    }

    fn decode(&self, id: NodeId, mut index: u128, hist: &mut Vec<Letter>, out: &mut Strategy) {
        match &self.tree.node(id).kind {
            NodeKind::Leaf { .. } => {}
            NodeKind::Ai { children } => {
                for &(a, c) in children {
                    if index < self.counts[c] {
                        out.insert(hist.clone(), a);
                        hist.push(a);
                        self.decode(c, index, hist, out);
                        hist.pop();
                        return;
                    }
                    index -= self.counts[c];
                }
                unreachable!("index within count");
            }
            NodeKind::World { children } => {
                for (v, _, c) in children.iter().rev() {
                    let k = self.counts[*c];
                    hist.push(*v);
                    self.decode(*c, index % k, hist, out);
                    hist.pop();
                    index /= k;
                }
            }
        }
    }
}

impl Iterator for StrategyIter<'_> {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.next >= self.total {
            return None;
        }
        let mut s = Strategy::new();
        self.decode(GameTree::ROOT, self.next, &mut Vec::new(), &mut s);
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.total - self.next).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// Probabilities at every world node sum to one.
#[cfg(test)]
pub(crate) fn probabilities_conserved(tree: &GameTree) -> bool {
    tree.nodes().iter().all(|n| match &n.kind {
        NodeKind::World { children } => {
            children.iter().fold(BigRational::zero(), |acc, (_, p, _)| acc + p) == BigRational::from_integer(1.into())
        }
        _ => true,
    })
}
