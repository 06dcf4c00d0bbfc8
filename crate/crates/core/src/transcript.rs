//! Line-oriented life transcripts.
//!
//! ```text
//! aieval-life v1
//! seed 7
//! caps game=1000 world=800 life=2 agent=100000 reset=false
//! world 3f2a9c0d11b2e4f5
//! alphabet sigma victory loss draw x y omega a b blank _
//! game 0 outcome=victory steps=2 end=final_letter
//! a x
//! b victory
//! end
//! game 1 outcome=loss steps=0 end=agent_error
//! end
//! counts victory=1 loss=1 draw=0 games=2
//! ```
//!
//! Each move line is `ACTION PERCEPT`. Letters are written by name, so the
//! alphabet line is required to read a transcript back.

use std::fmt::Write as _;

use thiserror::Error;

use crate::alphabet::{AlphabetConfig, Outcome};
use crate::game::{Caps, GameRecord, LifeRecord, OutcomeCounts, Termination};

pub const TRANSCRIPT_HEADER: &str = "aieval-life v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("transcript line {line}: {message}")]
pub struct TranscriptError {
    pub line: usize,
    pub message: String,
}

fn alphabet_line(a: &AlphabetConfig) -> String {
    let sigma: Vec<&str> = a.sigma_names().collect();
    let omega: Vec<&str> = a.omega_names().collect();
    format!("alphabet sigma {} omega {} blank {}", sigma.join(" "), omega.join(" "), a.name(a.blank()))
}

/// Renders a life in the transcript format.
pub fn write_life(life: &LifeRecord, alphabet: &AlphabetConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{TRANSCRIPT_HEADER}");
    let _ = writeln!(s, "seed {}", life.seed);
    let _ = writeln!(s, "caps {}", life.caps);
    let _ = writeln!(s, "world {}", life.world_hash);
    let _ = writeln!(s, "{}", alphabet_line(alphabet));
    for (i, g) in life.games.iter().enumerate() {
        let _ = writeln!(s, "game {i} outcome={} steps={} end={}", g.outcome.name(), g.big_steps, g.termination.name());
        for &(a, v) in &g.moves {
            let _ = writeln!(s, "{} {}", alphabet.name(a), alphabet.name(v));
        }
        let _ = writeln!(s, "end");
    }
    let c = &life.counts;
    let _ = writeln!(s, "counts victory={} loss={} draw={} games={}", c.n_victory, c.n_loss, c.n_draw, c.n_games);
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, TranscriptError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end())
            }
            None => Err(self.err("unexpected end of transcript")),
        }
    }

    fn err(&self, message: impl Into<String>) -> TranscriptError {
        TranscriptError { line: self.line, message: message.into() }
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, TranscriptError> {
        let l = self.next()?;
        l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')).ok_or_else(|| self.err(format!("expected `{key} ...`")))
    }
}

/// `key=value` fields in order.
fn fields<'a>(items: &[&'a str], keys: &[&str]) -> Option<Vec<&'a str>> {
    if items.len() != keys.len() {
        return None;
    }
    items.iter().zip(keys).map(|(item, k)| item.strip_prefix(k)?.strip_prefix('=')).collect()
}

/// Reads a transcript back. Returns the life and its alphabet.
pub fn parse_life(text: &str) -> Result<(LifeRecord, AlphabetConfig), TranscriptError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    if lines.next()? != TRANSCRIPT_HEADER {
        return Err(lines.err(format!("expected `{TRANSCRIPT_HEADER}`")));
    }
    let seed = lines.keyed("seed")?.parse().map_err(|_| lines.err("bad seed"))?;
    let caps: Caps = lines.keyed("caps")?.parse().map_err(|e| lines.err(format!("{e}")))?;
    let world_hash = lines.keyed("world")?.to_string();
    let alphabet = {
        let toks: Vec<&str> = lines.keyed("alphabet")?.split_whitespace().collect();
        let pos = |k: &str| toks.iter().position(|t| *t == k);
        let (Some(s), Some(o), Some(b)) = (pos("sigma"), pos("omega"), pos("blank")) else {
            return Err(lines.err("alphabet needs sigma, omega and blank"));
        };
        if !(s == 0 && s < o && o < b && b + 2 == toks.len()) {
            return Err(lines.err("expected `alphabet sigma ... omega ... blank B`"));
        }
        let sigma = &toks[1..o];
        if sigma.len() < 3 {
            return Err(lines.err("sigma needs the three final letters"));
        }
        AlphabetConfig::new(sigma, [sigma[0], sigma[1], sigma[2]], &toks[o + 1..b], toks[b + 1])
            .map_err(|e| lines.err(e.to_string()))?
    };
    let mut games = vec![];
    loop {
        let l = lines.next()?;
        let items: Vec<&str> = l.split_whitespace().collect();
        if items.first() == Some(&"counts") {
            let f = fields(&items[1..], &["victory", "loss", "draw", "games"])
                .ok_or_else(|| lines.err("bad counts line"))?;
            let n: Vec<u64> =
                f.iter().map(|v| v.parse()).collect::<Result<_, _>>().map_err(|_| lines.err("bad count"))?;
            let counts = OutcomeCounts { n_victory: n[0], n_loss: n[1], n_draw: n[2], n_games: n[3] };
            if counts != OutcomeCounts::tally(games.iter().map(|g: &GameRecord| &g.outcome)) {
                return Err(lines.err("counts disagree with the games"));
            }
            return Ok((LifeRecord { games, counts, seed, caps, world_hash }, alphabet));
        }
        if items.first() != Some(&"game") || items.len() != 5 || items[1] != games.len().to_string() {
            return Err(lines.err(format!("expected `game {} ...`", games.len())));
        }
        let f = fields(&items[2..], &["outcome", "steps", "end"]).ok_or_else(|| lines.err("bad game line"))?;
        let outcome = Outcome::from_name(f[0]).ok_or_else(|| lines.err(format!("bad outcome `{}`", f[0])))?;
        let big_steps: u32 = f[1].parse().map_err(|_| lines.err("bad step count"))?;
        let termination = Termination::from_name(f[2]).ok_or_else(|| lines.err(format!("bad end `{}`", f[2])))?;
        let mut moves = vec![];
        loop {
            let l = lines.next()?;
            if l == "end" {
                break;
            }
            let [a, v] = l.split_whitespace().collect::<Vec<_>>()[..] else {
                return Err(lines.err("expected `ACTION PERCEPT`"));
            };
            let a = alphabet
                .letter(a)
                .filter(|&x| alphabet.is_omega(x))
                .ok_or_else(|| lines.err(format!("bad action `{a}`")))?;
            let v = alphabet
                .letter(v)
                .filter(|&x| alphabet.is_sigma(x))
                .ok_or_else(|| lines.err(format!("bad percept `{v}`")))?;
            moves.push((a, v));
        }
        if moves.len() != big_steps as usize {
            return Err(lines.err("move count disagrees with `steps`"));
        }
        games.push(GameRecord { moves, outcome, big_steps, termination });
    }
}
