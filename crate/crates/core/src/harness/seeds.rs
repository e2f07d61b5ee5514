//! Seed fan-out.
//!
//! `derive_seed(master, stream, index) = mix(mix(master + GOLDEN * tag) + index)`
//! where `mix` is the splitmix64 finalizer and `tag` is the stream's fixed
//! number. Each stream and each index within it gets its own seed, so
//! changing `num_envs` never shifts another stream.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    ActorBasis = 1,
    CriticBasis = 2,
    ActorInit = 3,
    CriticInit = 4,
    EnvDynamics = 5,
    ActionSampling = 6,
    Minibatch = 7,
    Eval = 8,
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    let base = splitmix64(master.wrapping_add(GOLDEN.wrapping_mul(stream as u64)));
    splitmix64(base.wrapping_add(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference generator seeded with 0, where
        // state advances by GOLDEN before mixing.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn streams_do_not_collide() {
        let streams = [
            Stream::ActorBasis,
            Stream::CriticBasis,
            Stream::ActorInit,
            Stream::CriticInit,
            Stream::EnvDynamics,
            Stream::ActionSampling,
            Stream::Minibatch,
            Stream::Eval,
        ];
        let mut seen = HashSet::new();
        for m in 0..4 {
            for s in streams {
                for i in 0..256 {
                    assert!(seen.insert(derive_seed(m, s, i)));
                }
            }
        }
    }
}
