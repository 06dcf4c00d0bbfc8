use aieval::game::{success, OutcomeCounts};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::util::ensure;

pub fn run() -> Result<String, String> {
    let c = OutcomeCounts::new(1, 0, 1);
    ensure(c.n_games == 2, || format!("{c:?}"))?;
    let s = success(&c).map_err(|e| e.to_string())?;
    ensure(s == BigRational::new(3.into(), 4.into()), || format!("success(1,0,1,2) = {s}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let (v, l, d) = (rng.gen_range(0..500u64), rng.gen_range(0..500u64), rng.gen_range(0..500u64));
        if v + l + d == 0 {
            continue;
        }
        let base = success(&OutcomeCounts::new(v, l, d)).unwrap();
        // Independent evaluation of the formula.
        let direct = BigRational::new(((2 * v + d) as i64).into(), ((2 * (v + l + d)) as i64).into());
        ensure(base == direct, || format!("case {i}: {base} != {direct}"))?;
        let more_v = success(&OutcomeCounts::new(v + 1, l, d)).unwrap();
        let more_l = success(&OutcomeCounts::new(v, l + 1, d)).unwrap();
        ensure(more_v >= base, || format!("case {i}: adding a victory lowered {base} to {more_v}"))?;
        ensure(more_l <= base, || format!("case {i}: adding a loss raised {base} to {more_l}"))?;
    }
    Ok("success(1,0,1,2) = 3/4; 1000 random counts keep both monotone responses".into())
}
