//! Agent selection by `kind=NAME,key=value,...` strings.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use super::empirical::valid_courage;
use super::{EmpiricalAgent, MachineAgent, Policy, RandomAgent, Td1, Td2, Td4Config, Td6, Td6Config};
use crate::alphabet::AlphabetConfig;
use crate::game::Caps;
use crate::machine::text::{parse_agent, TextError};
use crate::machine::AgentMachine;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("agent spec needs `kind=...`")]
    MissingKind,
    #[error("unknown agent kind `{0}`")]
    UnknownKind(String),
    #[error("bad parameter `{0}`")]
    BadParam(String),
    #[error("parameter `{key}` is not used by agent kind `{kind}`")]
    UnusedParam { kind: String, key: String },
    #[error("cannot read agent machine {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("agent machine {path}: {source}")]
    Machine { path: String, source: TextError },
    #[error("agent machine alphabet differs from the evaluation alphabet")]
    AlphabetMismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AgentKind {
    Random,
    Td1,
    Td2,
    Td3 { budget: u64 },
    Td4 { courage: BigRational, scale: BigRational },
    Td6 { cap: usize, depth: u32, budget: u64 },
    Machine { path: String, machine: Arc<AgentMachine> },
}

/// A parsed agent description, buildable into fresh policies.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec {
    pub kind: AgentKind,
}

impl AgentSpec {
    /// Parses `kind=td4,courage=1/20`. Kinds and their parameters:
    ///
    /// * `random`, `td1`, `td2`
    /// * `td3`: `budget` (games of exploration, default 50)
    /// * `td4`: `courage` (rational in (0, 1], default 1/20), `scale`
    ///   (default 4)
    /// * `td6`: `cap` (model states, default 3), `depth` (default 4),
    ///   `budget` (model replays, default 200000)
    /// * `machine`: `path` to an agent machine file
    pub fn parse(s: &str) -> Result<Self, SpecError> {
        let mut kind = None;
        let mut params = vec![];
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| SpecError::BadParam(item.to_string()))?;
            if k == "kind" {
                kind = Some(v.to_string());
            } else {
                params.push((k.to_string(), v.to_string()));
            }
        }
        let kind = kind.ok_or(SpecError::MissingKind)?;
        let mut take = |key: &str| -> Option<String> {
            let i = params.iter().position(|(k, _)| k == key)?;
            Some(params.remove(i).1)
        };
        fn num<T: std::str::FromStr>(key: &str, v: Option<String>, default: T) -> Result<T, SpecError> {
            match v {
                None => Ok(default),
                Some(v) => v.parse().map_err(|_| SpecError::BadParam(format!("{key}={v}"))),
            }
        }
        let parsed = match kind.as_str() {
            "random" => AgentKind::Random,
            "td1" => AgentKind::Td1,
            "td2" => AgentKind::Td2,
            "td3" => AgentKind::Td3 { budget: num("budget", take("budget"), 50)? },
            "td4" => {
                let courage: BigRational = num("courage", take("courage"), BigRational::new(1.into(), 20.into()))?;
                if !valid_courage(&courage) {
                    return Err(SpecError::BadParam(format!("courage={courage}")));
                }
                let scale = num("scale", take("scale"), BigRational::from_integer(4.into()))?;
                AgentKind::Td4 { courage, scale }
            }
            "td6" => AgentKind::Td6 {
                cap: num("cap", take("cap"), 3)?,
                depth: num("depth", take("depth"), 4)?,
                budget: num("budget", take("budget"), 200_000)?,
            },
            "machine" => {
                let path = take("path").ok_or_else(|| SpecError::BadParam("machine needs path=".into()))?;
                let text =
                    std::fs::read_to_string(&path).map_err(|source| SpecError::Io { path: path.clone(), source })?;
                let machine = parse_agent(&text).map_err(|source| SpecError::Machine { path: path.clone(), source })?;
                AgentKind::Machine { path, machine: Arc::new(machine) }
            }
            other => return Err(SpecError::UnknownKind(other.to_string())),
        };
        if let Some((key, _)) = params.into_iter().next() {
            return Err(SpecError::UnusedParam { kind, key });
        }
        Ok(AgentSpec { kind: parsed })
    }

    /// A fresh policy for one life.
    pub fn build(&self, alphabet: &AlphabetConfig, caps: &Caps, seed: u64) -> Result<Box<dyn Policy>, SpecError> {
        Ok(match &self.kind {
            AgentKind::Random => Box::new(RandomAgent::new(alphabet, seed)),
            AgentKind::Td1 => Box::new(Td1::new(alphabet, seed)),
            AgentKind::Td2 => Box::new(Td2::new(alphabet, caps.game_big_step_cap, seed)),
            AgentKind::Td3 { budget } => Box::new(EmpiricalAgent::td3(alphabet, *budget, seed)),
            AgentKind::Td4 { courage, scale } => {
                let config = Td4Config { courage: courage.clone(), scale: scale.clone() };
                Box::new(EmpiricalAgent::td4(alphabet, config, seed))
            }
            AgentKind::Td6 { cap, depth, budget } => {
                let config =
                    Td6Config { model_size_cap: *cap, search_depth: *depth, search_budget: *budget, caps: *caps };
                Box::new(Td6::new(alphabet, config, seed))
            }
            AgentKind::Machine { machine, .. } => {
                if machine.alphabet() != alphabet {
                    return Err(SpecError::AlphabetMismatch);
                }
                Box::new(MachineAgent::new(machine.clone(), caps.agent_small_step_cap))
            }
        })
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AgentKind::Random => write!(f, "kind=random"),
            AgentKind::Td1 => write!(f, "kind=td1"),
            AgentKind::Td2 => write!(f, "kind=td2"),
            AgentKind::Td3 { budget } => write!(f, "kind=td3,budget={budget}"),
            AgentKind::Td4 { courage, scale } => write!(f, "kind=td4,courage={courage},scale={scale}"),
            AgentKind::Td6 { cap, depth, budget } => write!(f, "kind=td6,cap={cap},depth={depth},budget={budget}"),
            AgentKind::Machine { path, .. } => write!(f, "kind=machine,path={path}"),
        }
    }
}
