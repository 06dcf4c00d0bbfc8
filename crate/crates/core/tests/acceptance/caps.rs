use aieval::agents::RandomAgent;
use aieval::alphabet::{Letter, Outcome};
use aieval::game::{play_game, Caps, Termination};
use aieval::machine::MachineRun;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::util::{alpha, ensure, l, world};

/// Always answers `x`: never ends a game by itself.
const CHATTY: &str = "\
0 _ -> 0 x R\n0 victory -> 0 x R\n0 loss -> 0 x R\n0 draw -> 0 x R\n0 x -> 0 x R\n0 y -> 0 x R\n0 a -> 0 x R\n0 b -> 0 x R\n";

/// State 1 walks right over blanks until it meets `x`, then wins.
const WALKER: &str = "\
0 a -> 1 a R\n0 b -> 1 b R\n0 _ -> 0 x R\n0 victory -> 0 x R\n0 loss -> 0 x R\n0 draw -> 0 x R\n0 x -> 0 x R\n0 y -> 0 x R\n\
1 _ -> 1 _ R\n1 x -> 0 victory R\n1 a -> 1 a R\n1 b -> 1 b R\n1 victory -> 1 _ R\n1 loss -> 1 _ R\n1 draw -> 1 _ R\n1 y -> 1 _ R\n";

pub fn run() -> Result<String, String> {
    let caps = Caps::default();
    ensure(caps.game_big_step_cap == 1000 && caps.world_small_step_cap == 800, || format!("defaults {caps}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // Never-terminating world: the 1000th percept is a forced draw.
    let chatty = world(1, CHATTY, "x R");
    let mut agent = RandomAgent::new(&alpha(), 3);
    let g = play_game(&mut agent, &chatty, &mut chatty.fresh_run(), &caps, &mut rng);
    ensure(g.big_steps == 1000 && g.moves.len() == 1000, || format!("game lasted {} big steps", g.big_steps))?;
    ensure(g.outcome == Outcome::Draw && g.termination == Termination::BigStepCap, || format!("{g:?}"))?;
    ensure(g.moves[..999].iter().all(|m| m.1 == l("x")) && g.moves[999].1 == Letter::DRAW, || "percepts".into())?;

    // A big step needing `d + 1` small steps: the marker sits `d` cells right
    // of the head. 800 small steps are allowed, the 801st is not.
    let walker = world(2, WALKER, "x R");
    let mut steps = vec![];
    for (d, expect_forced) in [(799i64, false), (800, true)] {
        let mut run = MachineRun::new(0);
        run.tape.write_at(d, l("x"));
        let r = walker.respond(&mut run, l("a"), caps.world_small_step_cap, &mut rng);
        ensure(r.forced_draw == expect_forced, || format!("marker at {d}: {r:?}"))?;
        let want = if expect_forced { Letter::DRAW } else { Letter::VICTORY };
        ensure(r.percept == want, || format!("marker at {d}: percept {:?}", r.percept))?;
        steps.push(run.small_steps);
    }
    ensure(steps == [800, 801], || format!("small steps {steps:?}"))?;

    // Through the game runtime: the forced draw ends the game that step.
    let mut agent = RandomAgent::new(&alpha(), 5);
    let mut run = MachineRun::new(0);
    run.tape.write_at(800, l("x"));
    let g = play_game(&mut agent, &walker, &mut run, &caps, &mut rng);
    ensure(g.big_steps == 1 && g.outcome == Outcome::Draw, || format!("{g:?}"))?;
    ensure(g.termination == Termination::WorldSmallStepCap, || format!("{g:?}"))?;

    Ok("draw on big step 1000 of a never-ending game; 800 small steps answer normally, the 801st forces a draw".into())
}
