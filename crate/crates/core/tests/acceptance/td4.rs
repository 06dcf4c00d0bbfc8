use aieval::agents::{EmpiricalAgent, Td4Config};
use aieval::game::{play_life, success, Caps};
use aieval::machine::WorldMachine;
use aieval::tree::{build_multigame_tree, max_sum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::util::{alpha, ensure, world};

const GAMES: u32 = 2000;

/// Name, states, game cap, rows. Unlisted rows answer `draw`.
const SUITE: [(&str, usize, u32, &str); 5] = [
    (
        "biased coin",
        1,
        1,
        "0 a -> 0 victory R\n0 a -> 0 draw R\n0 b -> 0 victory R\n0 b -> 0 loss R\n0 b -> 0 draw L\n",
    ),
    (
        "hidden coin",
        3,
        2,
        "0 a -> 1 a R\n0 b -> 2 b R\n1 _ -> 0 x L\n1 _ -> 0 y L\n2 _ -> 0 loss L\n2 _ -> 0 draw L\n\
         1 x -> 0 victory R\n1 y -> 0 loss R\n2 x -> 0 loss R\n2 y -> 0 victory R\n",
    ),
    (
        "second chance",
        2,
        2,
        "0 a -> 1 a R\n0 b -> 0 draw R\n1 _ -> 0 victory L\n1 _ -> 0 loss L\n1 _ -> 0 x L\n\
         1 x -> 0 victory L\n1 x -> 0 draw L\n",
    ),
    ("patience", 1, 4, "0 a -> 0 x R\n0 a -> 0 victory R\n0 b -> 0 victory R\n0 b -> 0 draw R\n"),
    ("long odds", 1, 3, "0 a -> 0 x R\n0 a -> 0 loss R\n0 b -> 0 victory R\n0 b -> 0 loss R\n0 b -> 0 draw R\n"),
];

fn check(w: &WorldMachine, cap: u32, seed: u64) -> Result<(f64, f64, f64), String> {
    let caps = Caps { game_big_step_cap: cap, life_games: GAMES, ..Caps::default() }.with_reset(true);
    let best = max_sum(&build_multigame_tree(w, 1, &caps).map_err(|e| e.to_string())?).root_value().to_f64().unwrap();
    let courage = BigRational::new(1.into(), 20.into());
    let mut agent = EmpiricalAgent::td4(&alpha(), Td4Config::new(courage), seed);
    let life = play_life(&mut agent, w, &caps, seed ^ 0x5eed);
    let mean = success(&life.counts).map_err(|e| e.to_string())?.to_f64().unwrap();
    let payoffs: Vec<f64> = life.games.iter().map(|g| g.outcome.doubled_payoff() as f64 / 2.0).collect();
    let var = payoffs.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (payoffs.len() - 1) as f64;
    let margin = 3.0 * var.sqrt() / (GAMES as f64).sqrt();
    Ok((mean, best, margin))
}

pub fn run() -> Result<String, String> {
    let mut lines = vec![];
    for (name, states, cap, rows) in SUITE {
        let w = world(states, rows, "draw R");
        ensure(!w.is_deterministic(), || format!("{name} is deterministic"))?;
        let (mean, best, margin) = check(&w, cap, 17)?;
        let bound = best - 0.05 - margin;
        ensure(mean >= bound, || {
            format!("{name}: mean {mean:.4} < {bound:.4} (optimum {best:.4}, 3 sigma {margin:.4})")
        })?;
        lines.push(format!("{name} {mean:.3}/{best:.3}"));
    }
    Ok(format!("mean/optimum over {GAMES} games: {}", lines.join(", ")))
}
