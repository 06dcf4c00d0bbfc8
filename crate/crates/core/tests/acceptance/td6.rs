use aieval::agents::{Td6, Td6Config};
use aieval::game::{play_life, Caps};
use aieval::machine::{MachineRun, MissingRow, WorldMachine, WorldRules};
use aieval::tree::{build_multigame_tree, max_sum};
use aieval::worldspace::{behavior_classes, sample_world, Determinism, PartialWorld, WorldSpaceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classes::{is_final, percept};
use crate::util::{alpha, ensure, world};

const GAME_CAP: u32 = 4;
const LIFE: u32 = 200;
const SAMPLED: usize = 30;

fn caps() -> Caps {
    Caps { game_big_step_cap: GAME_CAP, life_games: LIFE, ..Caps::default() }.with_reset(true)
}

/// Reads every row any single game can reach.
fn all_paths<W: WorldRules + ?Sized>(w: &W, run: &MachineRun, step: u32) -> Result<(), MissingRow> {
    for a in alpha().omega() {
        let mut r = run.clone();
        let v = percept(w, &mut r, a, step, GAME_CAP, caps().world_small_step_cap)?;
        if !is_final(v) {
            all_paths(w, &r, step + 1)?;
        }
    }
    Ok(())
}

/// TD6 settles on a model and scores the optimum in every game after that.
fn recovers(w: &WorldMachine, seed: u64) -> Result<u64, String> {
    let caps = caps();
    let best = max_sum(&build_multigame_tree(w, 1, &caps).map_err(|e| e.to_string())?).root_value().clone();
    let mut agent = Td6::new(&alpha(), Td6Config::new(3, 4, caps), seed);
    let life = play_life(&mut agent, w, &caps, seed);
    let stats = agent.stats().clone();
    ensure(!stats.budget_exhausted && !stats.no_model, || format!("{stats:?}"))?;
    let from = stats.last_adoption_game.ok_or("no model adopted")?;
    for (i, g) in life.games.iter().enumerate().skip(from as usize) {
        let v = g.outcome.payoff();
        ensure(v == best, || format!("game {i} scored {v}, optimum {best}; {stats:?}"))?;
    }
    ensure(from < LIFE as u64 / 2, || format!("last adoption after game {from}"))?;
    Ok(from)
}

const AA: &str = "0 a -> 1 a R\n0 b -> 0 loss R\n0 _ -> 0 x R\n1 _ -> 0 x L\n1 x -> 0 victory R\n";

pub fn run() -> Result<String, String> {
    let probe = |pw: &PartialWorld| all_paths(pw, &MachineRun::new(0), 1);
    let classes = behavior_classes(&alpha(), 1, probe, 1_000_000).map_err(|e| e.to_string())?;
    let mut latest = 0;
    let mut failures = vec![];
    let mut tally = |label: String, r: Result<u64, String>| match r {
        Ok(from) => latest = latest.max(from),
        Err(e) => failures.push(format!("{label}: {e}")),
    };
    for (i, c) in classes.iter().enumerate() {
        tally(format!("one-state class {i}"), recovers(&c.world, i as u64));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for size in [2, 3] {
        let spec = WorldSpaceSpec::new(alpha(), size, Determinism::DeterministicOnly);
        for i in 0..SAMPLED {
            let w = sample_world(&spec, &mut rng).map_err(|e| e.to_string())?;
            tally(format!("size {size} world {i}"), recovers(&w, i as u64));
        }
    }
    tally("two-step lock".into(), recovers(&world(2, AA, "loss R"), 1));
    let checked = classes.len() + 2 * SAMPLED + 1;

    // Six-state generators. With a persistent world the life stays varied
    // and the search runs out of budget for many of them.
    let spec = WorldSpaceSpec::new(alpha(), 6, Determinism::DeterministicOnly);
    let mut exhausted = [0; 2];
    let mut nodes = 0;
    for (k, reset) in [false, true].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let caps = caps().with_reset(reset);
        for _ in 0..SAMPLED {
            let w = sample_world(&spec, &mut rng).map_err(|e| e.to_string())?;
            let mut agent = Td6::new(&alpha(), Td6Config::new(6, 4, caps), 1);
            play_life(&mut agent, &w, &caps, 1);
            if agent.stats().budget_exhausted {
                exhausted[k] += 1;
                nodes = agent.stats().search_nodes;
            }
        }
    }
    ensure(exhausted[0] > 0, || format!("no six-state generator out of {SAMPLED} exhausted the budget"))?;
    // A settled model can be consistent with everything played so far and
    // still wrong about a branch the plan never takes.
    ensure(failures.is_empty(), || {
        format!("{} of {checked} generators not recovered: {}", failures.len(), failures.join("; "))
    })?;

    Ok(format!(
        "{} one-state classes, {SAMPLED} sampled worlds each of size 2 and 3, and a two-step lock: last model change by game {latest}; six states: the budget of {nodes} replays ran out for {} of {SAMPLED} sampled generators with a persistent world, {} with restarts",
        classes.len(),
        exhausted[0],
        exhausted[1]
    ))
}
