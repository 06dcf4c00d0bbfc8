//! Letter sets shared by agents and worlds.
//!
//! Letters are small integers. The layout is fixed so that code can reason
//! about a letter without consulting a symbol table:
//!
//! | index              | letter                          |
//! |--------------------|---------------------------------|
//! | `0`                | blank                           |
//! | `1`, `2`, `3`      | victory, loss, draw             |
//! | `4 ..= |Σ|`        | the remaining percepts          |
//! | `|Σ|+1 ..`         | actions (Ω)                     |
//!
//! Agent machines may append service letters after the actions; those are
//! owned by the agent machine, not by the alphabet.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One tape/interaction letter, an index into an [`AlphabetConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub u16);

impl Letter {
    pub const BLANK: Letter = Letter(0);
    pub const VICTORY: Letter = Letter(1);
    pub const LOSS: Letter = Letter(2);
    pub const DRAW: Letter = Letter(3);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Result of a finished game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Victory,
    Loss,
    Draw,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Victory, Outcome::Loss, Outcome::Draw];

    /// Payoff doubled so it stays integral: victory 2, draw 1, loss 0.
    pub fn doubled_payoff(self) -> u32 {
        match self {
            Outcome::Victory => 2,
            Outcome::Loss => 0,
            Outcome::Draw => 1,
        }
    }

    pub fn payoff(self) -> BigRational {
        BigRational::new(self.doubled_payoff().into(), 2.into())
    }

    pub fn letter(self) -> Letter {
        match self {
            Outcome::Victory => Letter::VICTORY,
            Outcome::Loss => Letter::LOSS,
            Outcome::Draw => Letter::DRAW,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Victory => "victory",
            Outcome::Loss => "loss",
            Outcome::Draw => "draw",
        }
    }

    pub fn from_name(s: &str) -> Option<Outcome> {
        Outcome::ALL.into_iter().find(|o| o.name() == s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("final letter `{0}` is not in sigma")]
    FinalNotInSigma(String),
    #[error("final letters must be three distinct letters")]
    FinalsNotDistinct,
    #[error("sigma needs at least two non-final letters, got {0}")]
    TooFewPercepts(usize),
    #[error("omega needs at least two letters, got {0}")]
    TooFewActions(usize),
    #[error("letter `{0}` is declared more than once")]
    DuplicateLetter(String),
    #[error("invalid letter name `{0}`")]
    InvalidName(String),
}

/// The percept alphabet Σ (with its three final letters), the action
/// alphabet Ω and the blank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphabetConfig {
    /// Names indexed by letter; index 0 is the blank.
    names: Vec<String>,
    n_sigma: usize,
    n_omega: usize,
}

impl AlphabetConfig {
    /// Builds an alphabet. `finals` names the victory, loss and draw letters
    /// (in that order) and must be members of `sigma`; they are moved to the
    /// front of Σ, the other percepts keep their relative order.
    pub fn new<S: AsRef<str>>(sigma: &[S], finals: [&str; 3], omega: &[S], blank: &str) -> Result<Self, AlphabetError> {
        if finals[0] == finals[1] || finals[1] == finals[2] || finals[0] == finals[2] {
            return Err(AlphabetError::FinalsNotDistinct);
        }
        let sigma: Vec<&str> = sigma.iter().map(|s| s.as_ref()).collect();
        for f in finals {
            if !sigma.contains(&f) {
                return Err(AlphabetError::FinalNotInSigma(f.to_string()));
            }
        }
        let others: Vec<&str> = sigma.iter().copied().filter(|s| !finals.contains(s)).collect();
        if others.len() < 2 {
            return Err(AlphabetError::TooFewPercepts(others.len()));
        }
        if omega.len() < 2 {
            return Err(AlphabetError::TooFewActions(omega.len()));
        }
        let mut names = vec![blank.to_string()];
        names.extend(finals.iter().map(|s| s.to_string()));
        names.extend(others.iter().map(|s| s.to_string()));
        names.extend(omega.iter().map(|s| s.as_ref().to_string()));
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(AlphabetError::InvalidName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(AlphabetError::DuplicateLetter(n.clone()));
            }
        }
        Ok(AlphabetConfig { names, n_sigma: 3 + others.len(), n_omega: omega.len() })
    }

    /// The smallest admissible alphabet: |Σ| = 5, |Ω| = 2.
    pub fn minimal() -> Self {
        AlphabetConfig::new(&["victory", "loss", "draw", "x", "y"], ["victory", "loss", "draw"], &["a", "b"], "_")
            .expect("minimal alphabet is valid")
    }

    pub fn blank(&self) -> Letter {
        Letter::BLANK
    }

    /// |Σ ∪ Ω ∪ {λ}|, the world tape alphabet size.
    pub fn tape_size(&self) -> usize {
        1 + self.n_sigma + self.n_omega
    }

    pub fn sigma_len(&self) -> usize {
        self.n_sigma
    }

    pub fn omega_len(&self) -> usize {
        self.n_omega
    }

    pub fn sigma(&self) -> impl Iterator<Item = Letter> + Clone {
        (1..=self.n_sigma as u16).map(Letter)
    }

    pub fn omega(&self) -> impl Iterator<Item = Letter> + Clone {
        let lo = 1 + self.n_sigma as u16;
        (lo..lo + self.n_omega as u16).map(Letter)
    }

    /// Every world tape letter in index order.
    pub fn tape_letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..self.tape_size() as u16).map(Letter)
    }

    pub fn is_sigma(&self, l: Letter) -> bool {
        (1..=self.n_sigma).contains(&l.index())
    }

    pub fn is_omega(&self, l: Letter) -> bool {
        let lo = 1 + self.n_sigma;
        (lo..lo + self.n_omega).contains(&l.index())
    }

    pub fn is_final(&self, l: Letter) -> bool {
        (1..=3).contains(&l.0)
    }

    pub fn outcome_of(&self, l: Letter) -> Option<Outcome> {
        match l {
            Letter::VICTORY => Some(Outcome::Victory),
            Letter::LOSS => Some(Outcome::Loss),
            Letter::DRAW => Some(Outcome::Draw),
            _ => None,
        }
    }

    /// Position of an action within Ω.
    pub fn omega_index(&self, l: Letter) -> Option<usize> {
        self.is_omega(l).then(|| l.index() - 1 - self.n_sigma)
    }

    pub fn omega_letter(&self, i: usize) -> Letter {
        assert!(i < self.n_omega);
        Letter((1 + self.n_sigma + i) as u16)
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.index()]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| Letter(i as u16))
    }

    pub fn sigma_names(&self) -> impl Iterator<Item = &str> {
        self.sigma().map(|l| self.name(l))
    }

    pub fn omega_names(&self) -> impl Iterator<Item = &str> {
        self.omega().map(|l| self.name(l))
    }
}

pub(crate) fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == '#' || c == ',' || c == '=')
}
