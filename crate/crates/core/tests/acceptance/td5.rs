use aieval::agents::td5_best_strategy_weighted;
use aieval::alphabet::Letter;
use aieval::game::Caps;
use aieval::tree::{TreeOptions, TreeWorld};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::classes::{census, is_final, life_sig, single_game, space_size, GameSig};
use crate::util::{doubled, ensure, l};

/// Game-1 strategy or game-2 sub-strategy with a two-step cap: the first
/// action, then the second action after `x` and after `y`.
#[derive(Clone, Copy)]
struct Plan(usize);

impl Plan {
    const ALL: [Plan; 8] = [Plan(0), Plan(1), Plan(2), Plan(3), Plan(4), Plan(5), Plan(6), Plan(7)];

    /// The signature slot holding the game's last percept.
    fn play(self, g: &GameSig) -> usize {
        let a1 = (self.0 >> 2) & 1;
        let first = 3 * a1;
        if is_final(g[first]) {
            return first;
        }
        let a2 = if g[first] == l("x") { (self.0 >> 1) & 1 } else { self.0 & 1 };
        first + 1 + a2
    }
}

fn outcome_index(v: Letter) -> usize {
    // victory, loss, draw are letters 1, 2, 3
    v.index() - 1
}

/// Which of the nine first-game histories a slot ends.
fn history(g: &GameSig, slot: usize) -> usize {
    let o = outcome_index(g[slot]);
    match slot % 3 {
        0 => o,
        _ if g[slot - slot % 3] == l("x") => 3 + o,
        _ => 6 + o,
    }
}

/// Best doubled total over every two-game strategy, by walking all 8 x 8^9
/// of them. `worlds` yields each behavior's weight, first game, and the
/// second game that follows each first-game slot.
fn brute_force<'a>(worlds: impl Iterator<Item = (u128, &'a GameSig, [&'a GameSig; 6])>) -> u128 {
    let mut base = [0u128; 8];
    let mut table = [[[0u128; 8]; 9]; 8];
    for (w, g1, g2) in worlds {
        for s1 in Plan::ALL {
            let slot = s1.play(g1);
            base[s1.0] += w * doubled(g1[slot]) as u128;
            let next = g2[slot];
            let h = history(g1, slot);
            for s2 in Plan::ALL {
                table[s1.0][h][s2.0] += w * doubled(next[s2.play(next)]) as u128;
            }
        }
    }
    let mut best = 0;
    for s1 in 0..8 {
        let t = &table[s1];
        // Odometer over the sub-strategy chosen after each history, with
        // running prefix sums.
        let mut digits = [0usize; 9];
        let mut sums = [0u128; 10];
        sums[0] = base[s1];
        for k in 0..9 {
            sums[k + 1] = sums[k] + t[k][0];
        }
        loop {
            best = best.max(sums[9]);
            let mut k = 8;
            loop {
                digits[k] += 1;
                if digits[k] < 8 {
                    break;
                }
                digits[k] = 0;
                if k == 0 {
                    break;
                }
                k -= 1;
            }
            if k == 0 && digits[0] == 0 {
                break;
            }
            for j in k..9 {
                sums[j + 1] = sums[j] + t[j][digits[j]];
            }
        }
    }
    best
}

fn td5_value<'a>(
    worlds: impl Iterator<Item = (u128, &'a aieval::machine::WorldMachine)>,
    caps: &Caps,
) -> Result<BigRational, String> {
    let entries: Vec<TreeWorld<'_>> = worlds
        .map(|(w, m)| TreeWorld { rules: m, run: m.fresh_run(), weight: BigRational::from_integer(BigInt::from(w)) })
        .collect();
    let opts = TreeOptions { node_budget: 10_000_000, ..TreeOptions::default() };
    td5_best_strategy_weighted(&entries, 2, caps, opts).map(|(_, v)| v).map_err(|e| e.to_string())
}

fn ratio(best: u128, total: u128) -> BigRational {
    BigRational::new(BigInt::from(best), BigInt::from(4 * total))
}

pub fn run() -> Result<String, String> {
    let base = Caps { game_big_step_cap: 2, life_games: 2, ..Caps::default() };

    // Worlds restart between games; world cap 2.
    let reset = single_game();
    let caps = Caps { world_small_step_cap: 2, ..base }.with_reset(true);
    let oracle = brute_force(reset.by_sig.iter().map(|(g, (w, _))| (*w, g, [g; 6])));
    let want = ratio(oracle, reset.total);
    let got = td5_value(reset.by_sig.values().map(|(w, m)| (*w, m)), &caps)?;
    ensure(got == want, || format!("restarting worlds: td5 {got}, brute force {want}"))?;

    // Worlds persist between games; world cap 1.
    let persistent = census(|pw| life_sig(pw, 1));
    ensure(persistent.total == space_size(), || format!("classes cover {} machines", persistent.total))?;
    let caps_p = Caps { world_small_step_cap: 1, ..base };
    let oracle_p =
        brute_force(persistent.by_sig.iter().map(|(s, (w, _))| (*w, &s[0], std::array::from_fn(|slot| &s[slot + 1]))));
    let want_p = ratio(oracle_p, persistent.total);
    let got_p = td5_value(persistent.by_sig.values().map(|(w, m)| (*w, m)), &caps_p)?;
    ensure(got_p == want_p, || format!("persistent worlds: td5 {got_p}, brute force {want_p}"))?;

    Ok(format!(
        "restarting worlds (world cap 2): {} behaviors, mean {} = {:.4}; persistent worlds (world cap 1): {} classes, {} behaviors, mean {} = {:.4}",
        reset.by_sig.len(),
        got,
        f(&got),
        persistent.classes,
        persistent.by_sig.len(),
        got_p,
        f(&got_p)
    ))
}

fn f(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
