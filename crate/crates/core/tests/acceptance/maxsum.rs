use aieval::game::Caps;
use aieval::machine::WorldMachine;
use aieval::tree::{build_multigame_tree, enumerate_strategies, max_sum, strategy_expected_success};
use aieval::worldspace::{row_options, sample_world, Determinism, TapeSignature, WorldSpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::util::{alpha, ensure};

const WORLDS: usize = 200;
/// Trees with more strategies than this are skipped and drawn again.
const STRATEGY_BUDGET: u128 = 100_000;

pub fn run() -> Result<String, String> {
    let spec = WorldSpaceSpec::new(alpha(), 3, Determinism::All);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut checked, mut skipped, mut strategies, mut nondet) = (0, 0, 0u128, 0);
    let mut per_cap = [0usize; 4];
    let mut attempts = 0;
    while checked < WORLDS {
        // Uniform draws are almost all deterministic three-state machines,
        // so every other world is built row by row instead.
        let w = if attempts % 2 == 0 {
            sample_world(&spec, &mut rng).map_err(|e| e.to_string())?
        } else {
            row_by_row(&mut rng)
        };
        attempts += 1;
        let cap = rng.gen_range(1..=4u32);
        let caps = Caps::default().with_game_cap(cap);
        let tree = match build_multigame_tree(&w, 1, &caps) {
            Ok(t) => t,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let Ok(iter) = enumerate_strategies(&tree, STRATEGY_BUDGET) else {
            skipped += 1;
            continue;
        };
        strategies += iter.total();
        let mut best = None;
        for s in iter {
            let v = strategy_expected_success(&s, &tree).map_err(|e| e.to_string())?;
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        let best = best.expect("at least one strategy");
        let root = max_sum(&tree).root_value().clone();
        ensure(root == best, || format!("world {checked} (cap {cap}): max_sum {root}, brute force {best}"))?;
        checked += 1;
        per_cap[cap as usize - 1] += 1;
        nondet += usize::from(!w.is_deterministic());
    }
    Ok(format!(
        "{checked} worlds ({nondet} nondeterministic; caps 1-4: {per_cap:?}), {strategies} strategies, {skipped} skipped over budget"
    ))
}

/// A valid machine of size at most 3 with rows drawn one at a time from the
/// options that still fit the size budget.
fn row_by_row(rng: &mut ChaCha8Rng) -> WorldMachine {
    let a = alpha();
    let p = rng.gen_range(1..=3usize);
    let mut budget = 3 - p;
    let options = row_options(&TapeSignature::from_alphabet(&a), p, Determinism::All, budget);
    let rows = (0..p * a.tape_size())
        .map(|_| {
            let fitting: Vec<_> = options.iter().filter(|o| o.len() - 1 <= budget).collect();
            let row = fitting[rng.gen_range(0..fitting.len())].clone();
            budget -= row.len() - 1;
            row
        })
        .collect();
    WorldMachine::from_rows(a, p, rows).expect("row options form valid machines")
}
