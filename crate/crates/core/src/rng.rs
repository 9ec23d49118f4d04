//! Counter-derived random streams. Every consumer of randomness asks for the
//! stream of its `(generation, role, index)` triple, so results do not depend
//! on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Who is drawing from a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Init = 1,
    GroupSampling = 2,
    Offspring = 3,
    Probe = 4,
    Rebuild = 5,
    Scenario = 6,
    Misc = 7,
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Master seed from which all per-role streams derive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, generation: u64, role: Role, index: u64) -> Stream {
        let mut h = splitmix(self.master);
        h = splitmix(h ^ generation);
        h = splitmix(h ^ (role as u64));
        h = splitmix(h ^ index);
        ChaCha8Rng::seed_from_u64(h)
    }
}
