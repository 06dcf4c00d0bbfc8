use aieval::agents::AgentSpec;
use aieval::game::Caps;
use aieval::harness::{evaluate, EvalConfig, WorldSource};
use aieval::worldspace::{Determinism, WorldSpaceSpec};

use crate::util::{alpha, ensure};

fn report(agent: &AgentSpec, workers: usize) -> Result<String, String> {
    let spec = WorldSpaceSpec::new(alpha(), 3, Determinism::All);
    let caps = Caps { game_big_step_cap: 6, life_games: 30, ..Caps::default() };
    let mut config = EvalConfig::new(WorldSource::Sample { spec, count: 24 }, caps, 20261016);
    config.lives_per_world = 2;
    config.workers = workers;
    evaluate(agent, &config).map(|r| r.to_json()).map_err(|e| e.to_string())
}

pub fn run() -> Result<String, String> {
    let agents = ["kind=td4,courage=1/20", "kind=td2", "kind=td6,cap=2,depth=3,budget=5000"];
    let mut bytes = 0;
    for a in agents {
        let agent = AgentSpec::parse(a).map_err(|e| e.to_string())?;
        let first = report(&agent, 1)?;
        for workers in [1, 4, 8] {
            let again = report(&agent, workers)?;
            ensure(again == first, || format!("{a}: report at {workers} workers differs"))?;
        }
        bytes += first.len();
    }
    Ok(format!("{} agents, reports byte-identical at 1, 4 and 8 workers and across runs ({bytes} bytes)", agents.len()))
}
