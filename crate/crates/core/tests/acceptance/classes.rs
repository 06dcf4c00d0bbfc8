//! Exhaustive coverage of small deterministic world spaces through behavior
//! classes: machines that agree on every row a probe reads are simulated
//! once and counted with their multiplicity.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::OnceLock;

use aieval::alphabet::Letter;
use aieval::machine::{respond_with, MachineRun, MissingRow, WorldMachine, WorldRules};
use aieval::worldspace::{row_options, visit_behavior_classes, Determinism, PartialWorld, TapeSignature};
use num_traits::ToPrimitive;
use rand::rngs::mock::StepRng;

use crate::util::alpha;

/// Percepts of one game with a two-step cap, for every action sequence:
/// `[v(a), v(a a), v(a b), v(b), v(b a), v(b b)]`, blank where the game had
/// already ended.
pub type GameSig = [Letter; 6];

/// Percept seen on big step `step` of a game capped at `game_cap`.
pub fn percept<W: WorldRules + ?Sized>(
    w: &W,
    run: &mut MachineRun,
    action: Letter,
    step: u32,
    game_cap: u32,
    world_cap: u32,
) -> Result<Letter, MissingRow> {
    // Deterministic rows: the rng only ever picks index 0.
    let r = respond_with(w, run, action, world_cap, &mut StepRng::new(0, 0))?;
    let a = w.alphabet();
    Ok(if r.forced_draw || (!a.is_final(r.percept) && step >= game_cap) { Letter::DRAW } else { r.percept })
}

pub fn is_final(v: Letter) -> bool {
    alpha().is_final(v)
}

/// One game with cap 2 from `run`; `ends[k]` is the world state after the
/// sequence behind `sig[k]`.
pub fn game_sig<W: WorldRules + ?Sized>(
    w: &W,
    run: &MachineRun,
    world_cap: u32,
    mut ends: Option<&mut [MachineRun]>,
) -> Result<GameSig, MissingRow> {
    let omega: Vec<Letter> = alpha().omega().collect();
    let mut sig = [Letter::BLANK; 6];
    for (i, &a1) in omega.iter().enumerate() {
        let mut r1 = run.clone();
        sig[3 * i] = percept(w, &mut r1, a1, 1, 2, world_cap)?;
        if is_final(sig[3 * i]) {
            if let Some(e) = ends.as_deref_mut() {
                e[3 * i] = r1;
            }
            continue;
        }
        for (j, &a2) in omega.iter().enumerate() {
            let mut r2 = r1.clone();
            sig[3 * i + 1 + j] = percept(w, &mut r2, a2, 2, 2, world_cap)?;
            if let Some(e) = ends.as_deref_mut() {
                e[3 * i + 1 + j] = r2;
            }
        }
    }
    Ok(sig)
}

/// Two games with cap 2 and a persistent world: the first game's signature,
/// then the second game's signature after each first-game path.
pub type LifeSig = [GameSig; 7];

pub fn life_sig<W: WorldRules + ?Sized>(w: &W, world_cap: u32) -> Result<LifeSig, MissingRow> {
    let mut ends = vec![MachineRun::new(0); 6];
    let g1 = game_sig(w, &MachineRun::new(0), world_cap, Some(&mut ends))?;
    let mut sig = [[Letter::BLANK; 6]; 7];
    sig[0] = g1;
    for k in 0..6 {
        if g1[k] != Letter::BLANK && (k % 3 != 0 || is_final(g1[k])) {
            sig[k + 1] = game_sig(w, &ends[k], world_cap, None)?;
        }
    }
    Ok(sig)
}

/// Distinct signatures over every deterministic world of at most two
/// states, with the number of machines showing each and one member.
pub struct Census<S> {
    pub classes: u64,
    pub total: u128,
    pub by_sig: HashMap<S, (u128, WorldMachine)>,
}

pub fn census<S, P>(probe: P) -> Census<S>
where
    S: std::hash::Hash + Eq + Copy,
    P: Fn(&PartialWorld) -> Result<S, MissingRow>,
{
    let a = alpha();
    let sig_shape = TapeSignature::from_alphabet(&a);
    let mut out = Census { classes: 0, total: 0, by_sig: HashMap::new() };
    for n in 1..=2 {
        let fill = row_options(&sig_shape, n, Determinism::DeterministicOnly, 0).swap_remove(0);
        let last = RefCell::new(None);
        let classes = visit_behavior_classes(
            &a,
            n,
            |pw| {
                *last.borrow_mut() = Some(probe(pw)?);
                Ok(())
            },
            u64::MAX,
            |pw, m| {
                let m = m.to_u128().expect("class sizes fit u128");
                let s = last.borrow().expect("probe succeeded");
                out.total += m;
                out.by_sig.entry(s).or_insert_with(|| (0, pw.complete(&fill))).0 += m;
            },
        )
        .expect("unbounded budget");
        out.classes += classes;
    }
    out
}

/// Single games with cap 2 and a world cap of 2 small steps, shared by the
/// TD2 and TD5 checks.
pub fn single_game() -> &'static Census<GameSig> {
    static CELL: OnceLock<Census<GameSig>> = OnceLock::new();
    CELL.get_or_init(|| census(|pw| game_sig(pw, &MachineRun::new(0), 2, None)))
}

/// `10^8 + 26^16`: deterministic worlds of size at most 2.
pub fn space_size() -> u128 {
    10u128.pow(8) + 26u128.pow(16)
}
