use std::collections::BTreeSet;

use aieval::tape::Direction;
use aieval::worldspace::{count_raw_deterministic, count_valid, Determinism, TableIter, TapeSignature};
use num_bigint::BigUint;

use crate::util::ensure;

/// (next, write, right?) with state 0 the start.
type Raw = (usize, usize, bool);
type Table = Vec<Vec<Raw>>;

/// Every non-empty tuple set for one row, kept when it passes the machine
/// rules: transitions back to the start output a percept, a row with several
/// transitions holds outputs only, and no two of them differ in direction
/// alone. Returns the set with its size cost.
fn valid_rows(outputs: &[bool], p: usize, det: bool) -> Vec<(Vec<Raw>, usize)> {
    let mut all: Vec<Raw> = vec![];
    for next in 0..p {
        for write in 0..outputs.len() {
            for right in [false, true] {
                all.push((next, write, right));
            }
        }
    }
    let mut rows = vec![];
    for mask in 1u64..(1 << all.len()) {
        let set: Vec<Raw> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        if det && set.len() > 1 {
            continue;
        }
        if set.iter().any(|&(next, write, _)| next == 0 && !outputs[write]) {
            continue;
        }
        if set.len() > 1 && set.iter().any(|&(next, ..)| next != 0) {
            continue;
        }
        let dup = set.iter().enumerate().any(|(i, a)| set[i + 1..].iter().any(|b| (a.0, a.1) == (b.0, b.1)));
        if dup {
            continue;
        }
        let cost = set.len() - 1;
        rows.push((set, cost));
    }
    rows
}

fn oracle(outputs: &[bool], p: usize, det: bool, max_size: usize) -> BTreeSet<Table> {
    let rows = valid_rows(outputs, p, det);
    let n_rows = p * outputs.len();
    let mut out = BTreeSet::new();
    let mut pick = vec![0usize; n_rows];
    'odometer: loop {
        let cost: usize = pick.iter().map(|&i| rows[i].1).sum();
        if p + cost <= max_size {
            out.insert(pick.iter().map(|&i| rows[i].0.clone()).collect());
        }
        for d in (0..n_rows).rev() {
            pick[d] += 1;
            if pick[d] < rows.len() {
                continue 'odometer;
            }
            pick[d] = 0;
        }
        return out;
    }
}

fn enumerated(outputs: &[bool], p: usize, det: Determinism, max_size: usize) -> Result<BTreeSet<Table>, String> {
    let sig = TapeSignature::new(outputs.to_vec());
    let mut out = BTreeSet::new();
    for table in TableIter::new(&sig, p, det, max_size) {
        let t: Table = table
            .iter()
            .map(|row| {
                let mut r: Vec<Raw> =
                    row.iter().map(|t| (t.next, t.write.index(), t.dir == Direction::Right)).collect();
                r.sort();
                r
            })
            .collect();
        if !out.insert(t) {
            return Err(format!("table listed twice at p={p}"));
        }
    }
    Ok(out)
}

pub fn run() -> Result<String, String> {
    let raw = count_raw_deterministic(20, 5);
    ensure(raw == BigUint::from(200u32).pow(100), || format!("count_raw_deterministic(20, 5) = {raw}"))?;
    ensure(raw.to_string().len() == 231, || "200^100 has 231 digits".into())?;

    // Letter 0 is the blank and never a percept.
    let cases: [(&[bool], usize, bool, usize); 6] = [
        (&[false, true], 1, true, 1),
        (&[false, true], 1, false, 2),
        (&[false, true, true], 1, false, 3),
        (&[false, true], 2, true, 2),
        (&[false, true, true], 2, false, 3),
        (&[false, true, false], 2, true, 2),
    ];
    let mut sizes = vec![];
    for (outputs, p, det, max_size) in cases {
        let d = if det { Determinism::DeterministicOnly } else { Determinism::All };
        let want = oracle(outputs, p, det, max_size);
        let got = enumerated(outputs, p, d, max_size)?;
        let label = format!("p={p} a={} det={det} max_size={max_size}", outputs.len());
        ensure(got == want, || format!("{label}: enumeration {} machines, oracle {}", got.len(), want.len()))?;
        let counted = count_valid(&TapeSignature::new(outputs.to_vec()), p, d, max_size);
        ensure(counted == BigUint::from(want.len()), || format!("{label}: count_valid {counted}"))?;
        sizes.push(format!("{label}: {}", want.len()));
    }
    Ok(format!("200^100 exact; enumeration equals generate-and-validate ({})", sizes.join(", ")))
}
