//! Shared fixtures for the criterion benches.

use adelic_core::global_galois::CyclicSubgroup;
use adelic_core::{sample, FieldCtx, Idele, LocalField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ELL: u64 = 7;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A context with `μ_p` already adjoined.
pub fn field(p: u64) -> FieldCtx {
    let ctx = FieldCtx::new(ELL, p).expect("7 is prime and differs from p");
    ctx.zeta();
    ctx
}

/// A parameter idele with `ram` ramified points and a transitive subgroup for it.
pub fn galois_instance(k: &LocalField, ram: usize, seed: u64) -> (Idele, CyclicSubgroup) {
    let mut rng = rng(seed);
    let p = k.p();
    let t = sample::ramified_idele(k, &mut rng, ram, 2);
    let g = sample::transitive_generator(&t, p, &mut rng);
    let g = CyclicSubgroup::new(&g, &t, p).expect("sampled generators are transitive");
    (t, g)
}
