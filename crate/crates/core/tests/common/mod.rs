#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use si_distancing::delay::{regime_of, Regime};
use si_distancing::GameParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// m uniform on [1.1, 50], i0 log-uniform on [1e-5, 0.99], tf uniform on [0.1, 40].
pub fn random_triple(rng: &mut ChaCha8Rng) -> GameParams {
    let m = rng.random_range(1.1..=50.0);
    let i0 = (rng.random_range(1e-5f64.ln()..=0.99f64.ln())).exp();
    let tf = rng.random_range(0.1..=40.0);
    GameParams::new(m, i0, tf).unwrap()
}

pub fn interior_triples(seed: u64, n: usize) -> Vec<GameParams> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_triple(&mut rng);
        if regime_of(&p) == Regime::Interior {
            out.push(p);
        }
    }
    out
}

pub fn baseline() -> GameParams {
    GameParams::new(6.0, 0.02, 6.0).unwrap()
}
