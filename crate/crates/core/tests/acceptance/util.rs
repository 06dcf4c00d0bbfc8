use aieval::alphabet::{AlphabetConfig, Letter, Outcome};
use aieval::machine::text::parse_world;
use aieval::machine::WorldMachine;

pub fn alpha() -> AlphabetConfig {
    AlphabetConfig::minimal()
}

pub fn l(name: &str) -> Letter {
    alpha().letter(name).unwrap_or_else(|| panic!("no letter {name}"))
}

pub fn doubled(v: Letter) -> u32 {
    alpha().outcome_of(v).map(Outcome::doubled_payoff).expect("final letter")
}

/// A world in the text format over the minimal alphabet. Rows that `body`
/// leaves out answer with `filler`, for example `draw R`.
pub fn world(states: usize, body: &str, filler: &str) -> WorldMachine {
    let a = alpha();
    let mut text = format!("world states {states} start 0 sigma victory loss draw x y omega a b\n{body}");
    for s in 0..states {
        for letter in a.tape_letters() {
            let name = a.name(letter);
            let listed = body.lines().any(|line| {
                let t: Vec<&str> = line.split_whitespace().collect();
                t.len() >= 2 && t[0] == s.to_string() && t[1] == name
            });
            if !listed {
                text.push_str(&format!("{s} {name} -> 0 {filler}\n"));
            }
        }
    }
    parse_world(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// Fails the criterion with `msg` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
