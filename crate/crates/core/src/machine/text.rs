//! Plain-text machine format.
//!
//! ```text
//! # comments run to end of line
//! world states 2 start 0 sigma victory loss draw x y omega a b blank _
//! 0 a -> 0 victory R
//! 0 b -> 1 b L
//! ...
//! ```
//!
//! The first non-comment line is the header:
//!
//! ```text
//! header := [world|agent] states N start S sigma NAME+ omega NAME+
//!           [blank NAME] [finals V L D] [service NAME+] [cap N]
//! ```
//!
//! * `finals` names the victory, loss and draw letters; by default they are the
//!   first three letters listed after `sigma`.
//! * `blank` defaults to `_`.
//! * `service` and `cap` are only accepted for agents.
//!
//! Every following line is one transition `q a -> q' b D` with states given
//! as integers in `0..N` and `D` one of `L`, `R`. Agent files list at most
//! one rule per `(q, a)`; world files may list several to form a
//! nondeterminism group. Errors carry 1-based line numbers.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{AgentMachine, AgentMachineSpec, AgentRule, MachineError, Tuple5, WorldMachine, WorldMachineSpec};
use crate::alphabet::{AlphabetConfig, Letter};
use crate::tape::Direction;

const KEYWORDS: [&str; 10] =
    ["world", "agent", "states", "start", "sigma", "omega", "blank", "finals", "service", "cap"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid machine: {0}")]
    Invalid(#[from] MachineError),
    #[error("expected a {expected} machine, found a {found} machine")]
    WrongKind { expected: &'static str, found: &'static str },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineText {
    World(WorldMachineSpec),
    Agent(AgentMachineSpec),
}

impl MachineText {
    pub fn kind(&self) -> &'static str {
        match self {
            MachineText::World(_) => "world",
            MachineText::Agent(_) => "agent",
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

struct Header {
    agent: bool,
    n_states: usize,
    start: usize,
    alphabet: AlphabetConfig,
    service: Vec<String>,
    cap: Option<u64>,
}

fn parse_header(line: usize, toks: &[&str]) -> Result<Header, ParseError> {
    let mut i = 0;
    let mut agent = false;
    match toks.first() {
        Some(&"agent") => {
            agent = true;
            i = 1;
        }
        Some(&"world") => i = 1,
        _ => {}
    }
    let mut n_states = None;
    let mut start = None;
    let mut sigma: Vec<&str> = vec![];
    let mut omega: Vec<&str> = vec![];
    let mut blank = "_";
    let mut finals: Option<[&str; 3]> = None;
    let mut service: Vec<String> = vec![];
    let mut cap = None;
    let number = |i: usize, what: &str| -> Result<u64, ParseError> {
        toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| err(line, format!("`{what}` needs a number")))
    };
    let list_end =
        |from: usize| toks[from..].iter().position(|t| KEYWORDS.contains(t)).map_or(toks.len(), |p| from + p);
    while i < toks.len() {
        match toks[i] {
            "states" => {
                n_states = Some(number(i + 1, "states")? as usize);
                i += 2;
            }
            "start" => {
                start = Some(number(i + 1, "start")? as usize);
                i += 2;
            }
            "cap" => {
                cap = Some(number(i + 1, "cap")?);
                i += 2;
            }
            "blank" => {
                blank = toks.get(i + 1).ok_or_else(|| err(line, "`blank` needs a letter"))?;
                i += 2;
            }
            kw @ ("sigma" | "omega" | "service" | "finals") => {
                let end = list_end(i + 1);
                let items = &toks[i + 1..end];
                match kw {
                    "sigma" => sigma = items.to_vec(),
                    "omega" => omega = items.to_vec(),
                    "service" => service = items.iter().map(|s| s.to_string()).collect(),
                    _ => {
                        let [v, l, d] = items else {
                            return Err(err(line, "`finals` needs exactly three letters"));
                        };
                        finals = Some([v, l, d]);
                    }
                }
                i = end;
            }
            other => return Err(err(line, format!("unexpected token `{other}` in header"))),
        }
    }
    let n_states = n_states.ok_or_else(|| err(line, "header is missing `states`"))?;
    let start = start.ok_or_else(|| err(line, "header is missing `start`"))?;
    let finals = match finals {
        Some(f) => f,
        None if sigma.len() >= 3 => [sigma[0], sigma[1], sigma[2]],
        None => return Err(err(line, "sigma needs at least the three final letters")),
    };
    if !agent && (!service.is_empty() || cap.is_some()) {
        return Err(err(line, "`service` and `cap` are only allowed for agent machines"));
    }
    let alphabet = AlphabetConfig::new(&sigma, finals, &omega, blank).map_err(|e| err(line, e.to_string()))?;
    for s in &service {
        if alphabet.letter(s).is_some() || service.iter().filter(|t| *t == s).count() > 1 {
            return Err(err(line, format!("service letter `{s}` is declared more than once")));
        }
        if !crate::alphabet::valid_name(s) {
            return Err(err(line, format!("invalid service letter `{s}`")));
        }
    }
    Ok(Header { agent, n_states, start, alphabet, service, cap })
}

/// Parses a machine file without validating the machine itself.
pub fn parse(text: &str) -> Result<MachineText, ParseError> {
    let mut header: Option<Header> = None;
    let mut rules: Vec<(usize, Letter, usize, Letter, Direction)> = vec![];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let Some(h) = &header else {
            header = Some(parse_header(line, &toks)?);
            continue;
        };
        let [q, a, arrow, q2, b, d] = toks[..] else {
            return Err(err(line, "expected `q a -> q' b D`"));
        };
        if arrow != "->" {
            return Err(err(line, "expected `->`"));
        }
        let state = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad state `{s}`")));
        let letter = |s: &str| {
            h.alphabet
                .letter(s)
                .or_else(|| {
                    let n = h.alphabet.tape_size();
                    h.service.iter().position(|x| x == s).map(|i| Letter((n + i) as u16))
                })
                .ok_or_else(|| err(line, format!("unknown letter `{s}`")))
        };
        let dir =
            Direction::from_symbol(d).ok_or_else(|| err(line, format!("bad direction `{d}`, expected L or R")))?;
        rules.push((state(q)?, letter(a)?, state(q2)?, letter(b)?, dir));
    }
    let h = header.ok_or_else(|| err(1, "missing header line"))?;
    Ok(if h.agent {
        MachineText::Agent(AgentMachineSpec {
            alphabet: h.alphabet,
            service: h.service,
            n_states: h.n_states,
            start: h.start,
            rules: rules
                .into_iter()
                .map(|(state, read, next, write, dir)| AgentRule { state, read, next, write, dir })
                .collect(),
            small_step_cap: h.cap,
        })
    } else {
        MachineText::World(WorldMachineSpec {
            alphabet: h.alphabet,
            n_states: h.n_states,
            start: h.start,
            tuples: rules
                .into_iter()
                .map(|(state, read, next, write, dir)| Tuple5 { state, read, next, write, dir })
                .collect(),
        })
    })
}

pub fn parse_world(text: &str) -> Result<WorldMachine, TextError> {
    match parse(text)? {
        MachineText::World(spec) => Ok(WorldMachine::new(spec)?),
        other => Err(TextError::WrongKind { expected: "world", found: other.kind() }),
    }
}

pub fn parse_agent(text: &str) -> Result<AgentMachine, TextError> {
    match parse(text)? {
        MachineText::Agent(spec) => Ok(AgentMachine::new(spec)?),
        other => Err(TextError::WrongKind { expected: "agent", found: other.kind() }),
    }
}

fn header_alphabet(out: &mut String, a: &AlphabetConfig) {
    let sigma: Vec<_> = a.sigma_names().collect();
    let omega: Vec<_> = a.omega_names().collect();
    let _ = write!(out, " sigma {} omega {} blank {}", sigma.join(" "), omega.join(" "), a.name(a.blank()));
}

/// Canonical text of a world machine: header, then tuples in row-major order.
pub fn write_world(m: &WorldMachine) -> String {
    use super::WorldRules;
    let a = m.alphabet();
    let mut out = format!("world states {} start {}", m.n_states(), m.start());
    header_alphabet(&mut out, a);
    out.push('\n');
    for t in m.tuples() {
        let _ = writeln!(out, "{} {} -> {} {} {}", t.state, a.name(t.read), t.next, a.name(t.write), t.dir.symbol());
    }
    out
}

pub fn write_agent(m: &AgentMachine) -> String {
    let mut out = format!("agent states {} start {}", m.n_states(), m.start());
    header_alphabet(&mut out, m.alphabet());
    if !m.service().is_empty() {
        let _ = write!(out, " service {}", m.service().join(" "));
    }
    if let Some(cap) = m.small_step_cap() {
        let _ = write!(out, " cap {cap}");
    }
    out.push('\n');
    for r in m.rules() {
        let _ = writeln!(
            out,
            "{} {} -> {} {} {}",
            r.state,
            m.letter_name(r.read),
            r.next,
            m.letter_name(r.write),
            r.dir.symbol()
        );
    }
    out
}

/// Identity of a world: the first 16 hex digits of the SHA-256 of its
/// canonical text.
pub fn world_hash(m: &WorldMachine) -> String {
    let digest = Sha256::digest(write_world(m).as_bytes());
    hex::encode(&digest[..8])
}
