use aieval::agents::{Td2, Td2Phase};
use aieval::game::{play_life, Caps};
use aieval::machine::{MachineRun, WorldMachine};
use aieval::tree::{build_multigame_tree, max_sum};
use aieval::worldspace::{behavior_classes, sample_world, Determinism, PartialWorld, WorldSpaceSpec};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classes::{game_sig, single_game, space_size};
use crate::util::{alpha, ensure};

const LIFE: u32 = 500;
/// Games at the end of the life that must all score the optimum.
const TAIL: usize = 100;

fn caps(world_cap: u32) -> Caps {
    Caps { game_big_step_cap: 2, world_small_step_cap: world_cap, life_games: LIFE, ..Caps::default() }.with_reset(true)
}

/// TD2's settled per-game value on `w` against the optimum.
fn check(w: &WorldMachine, caps: &Caps, seed: u64) -> Result<BigRational, String> {
    let best = max_sum(&build_multigame_tree(w, 1, caps).map_err(|e| e.to_string())?).root_value().clone();
    let mut agent = Td2::new(&alpha(), caps.game_big_step_cap, seed);
    let life = play_life(&mut agent, w, caps, seed);
    ensure(agent.phase() != Td2Phase::Searching, || format!("still searching after {LIFE} games"))?;
    for (i, g) in life.games.iter().enumerate().skip(LIFE as usize - TAIL) {
        let v = g.outcome.payoff();
        ensure(v == best, || format!("game {i} scored {v}, optimum {best}"))?;
    }
    Ok(best)
}

pub fn run() -> Result<String, String> {
    let census = single_game();
    ensure(census.total == space_size(), || format!("classes cover {} machines", census.total))?;
    let caps2 = caps(2);
    let mut by_value = [0u128; 3];
    for (sig, (weight, w)) in &census.by_sig {
        let v = check(w, &caps2, 7).map_err(|e| format!("signature {sig:?}: {e}"))?;
        let half = BigRational::new(1.into(), 2.into());
        by_value[if v.numer() == v.denom() {
            0
        } else if v == half {
            1
        } else {
            2
        }] += weight;
    }

    // Sampled members agree with their class and pass on their own.
    let spec = WorldSpaceSpec::new(alpha(), 2, Determinism::DeterministicOnly);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let w = sample_world(&spec, &mut rng).map_err(|e| e.to_string())?;
        let sig = game_sig(&w, &w.fresh_run(), 2, None).map_err(|e| e.to_string())?;
        ensure(census.by_sig.contains_key(&sig), || format!("sampled world {i} has an unseen signature"))?;
        check(&w, &caps2, i).map_err(|e| format!("sampled world {i}: {e}"))?;
    }

    // One-state worlds under the default world cap.
    let probe = |pw: &PartialWorld| game_sig(pw, &MachineRun::new(0), 800, None).map(|_| ());
    let one_state = behavior_classes(&alpha(), 1, probe, 1_000_000).map_err(|e| e.to_string())?;
    for c in &one_state {
        check(&c.world, &caps(800), 3)?;
    }

    Ok(format!(
        "{} machines in {} classes, {} behaviors; optimum 1 / 1/2 / 0 for {:?} machines; {} one-state classes at world cap 800",
        census.total,
        census.classes,
        census.by_sig.len(),
        by_value,
        one_state.len()
    ))
}
