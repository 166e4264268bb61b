#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbc_core::generators::{gen_random, random_partition};
use sbc_core::model::{canonicalize, rationalize, Instance, Partition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with `1..=max_n` items and sizes up to `max_size`.
pub fn instance(rng: &mut ChaCha8Rng, max_n: usize, max_size: u64) -> Instance {
    let n = rng.random_range(1..=max_n);
    let size = rng.random_range(1..=max_size);
    gen_random(n, size, rng.random()).unwrap()
}

pub fn reasonable_start(inst: &Instance, rng: &mut ChaCha8Rng) -> Partition {
    let bins = rng.random_range(1..=inst.len());
    canonicalize(&random_partition(inst.len(), bins, rng), inst)
}

pub fn rational_start(inst: &Instance, rng: &mut ChaCha8Rng) -> Partition {
    rationalize(&reasonable_start(inst, rng), inst)
}
