//! TD1 and TD2: agents that find a good game and repeat it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{uniform_action, GameTracker, Policy};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::machine::AgentError;

/// Plays at random until the first victory, then repeats that game's
/// actions. If a replayed game departs from the recorded percepts, which can
/// only happen in nondeterministic worlds or on a dirty tape, it returns to
/// random play until the next victory.
#[derive(Clone, Debug)]
pub struct Td1 {
    alphabet: AlphabetConfig,
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
    tracker: GameTracker,
    /// The victorious game `a1 v1 a2 v2 ...`.
    winner: Option<Vec<Letter>>,
    /// The current game still follows `winner`.
    on_track: bool,
}

impl Td1 {
    pub fn new(alphabet: &AlphabetConfig, seed: u64) -> Self {
        Td1 {
            alphabet: alphabet.clone(),
            omega: alphabet.omega().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            tracker: GameTracker::default(),
            winner: None,
            on_track: true,
        }
    }

    pub fn winner(&self) -> Option<&[Letter]> {
        self.winner.as_deref()
    }
}

impl Policy for Td1 {
    fn act(&mut self) -> Result<Letter, AgentError> {
        let i = self.tracker.current.len();
        let a = match &self.winner {
            Some(w) if self.on_track && i < w.len() => w[i],
            _ => uniform_action(&self.omega, &mut self.rng),
        };
        self.tracker.act(a);
        Ok(a)
    }

    fn observe(&mut self, percept: Letter) {
        let i = self.tracker.current.len();
        if let Some(w) = &self.winner {
            if w.get(i) != Some(&percept) {
                self.on_track = false;
            }
        }
        if let Some(game) = self.tracker.observe(&self.alphabet, percept) {
            if game.last() == Some(&Letter::VICTORY) {
                self.winner = Some(game);
            } else if !self.on_track {
                self.winner = None;
            }
            self.on_track = true;
        }
    }
}

/// Tries open-loop action plans in lexicographic order, one per game. A
/// plan is skipped when a shorter game already covered its prefix. After the
/// first victory that plan is repeated forever; if every plan has been tried
/// without a victory, the last drawn plan is repeated, and without any draw
/// the agent plays at random.
///
/// In a deterministic world that restarts every game, plans are exactly the
/// strategies of one game, so TD2 settles on the best outcome reachable.
#[derive(Clone, Debug)]
pub struct Td2 {
    alphabet: AlphabetConfig,
    omega: Vec<Letter>,
    rng: ChaCha8Rng,
    tracker: GameTracker,
    /// Plan digits, indices into Ω; length is the game cap.
    plan: Vec<usize>,
    phase: Td2Phase,
    last_draw: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Td2Phase {
    Searching,
    Victorious,
    RepeatingDraw,
    Random,
}

impl Td2 {
    pub fn new(alphabet: &AlphabetConfig, game_cap: u32, seed: u64) -> Self {
        Td2 {
            alphabet: alphabet.clone(),
            omega: alphabet.omega().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            tracker: GameTracker::default(),
            plan: vec![0; game_cap.max(1) as usize],
            phase: Td2Phase::Searching,
            last_draw: None,
        }
    }

    pub fn phase(&self) -> Td2Phase {
        self.phase
    }

    /// Advances to the next plan whose first `played` digits differ from the
    /// current plan's. Returns false when the plans are exhausted.
    fn advance(&mut self, played: usize) -> bool {
        let k = self.omega.len();
        for d in &mut self.plan[played..] {
            *d = 0;
        }
        for i in (0..played).rev() {
            self.plan[i] += 1;
            if self.plan[i] < k {
                return true;
            }
            self.plan[i] = 0;
        }
        false
    }
}

impl Policy for Td2 {
    fn act(&mut self) -> Result<Letter, AgentError> {
        let step = self.tracker.step();
        let a = match self.phase {
            Td2Phase::Random => uniform_action(&self.omega, &mut self.rng),
            // The runtime ends games at the cap, so the plan always covers
            // the step; the modulo only guards a world cap above ours.
            _ => self.omega[self.plan[step % self.plan.len()]],
        };
        self.tracker.act(a);
        Ok(a)
    }

    fn observe(&mut self, percept: Letter) {
        let Some(game) = self.tracker.observe(&self.alphabet, percept) else { return };
        if self.phase != Td2Phase::Searching {
            return;
        }
        let played = game.len() / 2;
        match percept {
            Letter::VICTORY => self.phase = Td2Phase::Victorious,
            p => {
                if p == Letter::DRAW {
                    self.last_draw = Some(self.plan.clone());
                }
                if !self.advance(played.min(self.plan.len())) {
                    match self.last_draw.take() {
                        Some(d) => {
                            self.plan = d;
                            self.phase = Td2Phase::RepeatingDraw;
                        }
                        None => self.phase = Td2Phase::Random,
                    }
                }
            }
        }
    }
}
