#![allow(dead_code)]

use ioncavity::propagators::case_generator;
use ioncavity::protocols::AmplitudePair;
use ioncavity::{Case, PureState, SystemConfig, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_pair(rng: &mut impl Rng) -> AmplitudePair {
    loop {
        let (a, b) = (random_complex(rng), random_complex(rng));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-3 {
            if let Ok(p) = AmplitudePair::new(a / n, b / n) {
                return p;
            }
        }
    }
}

/// Basis states of `config` that the untruncated case Hamiltonian would
/// couple to a level above the cutoff, found by building the generator on a
/// space one quantum larger in every mode.
pub fn leak_set(case: Case, config: SystemConfig, trap: usize) -> Vec<bool> {
    let big = SystemConfig::new(config.trap_count, config.phonon_cutoff + 1, config.photon_cutoff + 1).unwrap();
    let gen = case_generator(case, big, trap).unwrap();
    let outside = |r: usize| {
        let l = big.label(r).unwrap();
        l.photon > config.photon_cutoff || l.phonon.iter().any(|&n| n > config.phonon_cutoff)
    };
    (0..config.dim())
        .map(|i| {
            let label = config.label(i).unwrap();
            let j = big.basis_index(&label).unwrap();
            (0..big.dim()).any(|r| outside(r) && gen.matrix()[(r, j)].norm() > 0.0)
        })
        .collect()
}

/// Random normalized state with no amplitude on `skip`.
pub fn random_state(config: SystemConfig, skip: &[bool], rng: &mut impl Rng) -> PureState {
    let mut i = 0;
    PureState::from_fn(config, |_| {
        let v = if skip[i] { C64::default() } else { random_complex(rng) };
        i += 1;
        v
    })
    .normalized()
}
