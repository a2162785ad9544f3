//! Seeded random structures for fuzzing and property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mask::{GroundSet, SubsetMask};
use crate::structure::{generate_structure, ConnectivityStructure, GeneratorFamily};

/// Structure of connected subgraphs of a random graph on `n` vertices, each
/// edge present with probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> ConnectivityStructure {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((vertices[i].clone(), vertices[j].clone()));
            }
        }
    }
    ConnectivityStructure::from_graph(&vertices, &edges).expect("edges use declared vertices")
}

/// `count` random nonempty subsets of an `n`-point set.
pub fn random_generators<R: Rng>(rng: &mut R, n: usize, count: usize) -> GeneratorFamily {
    let ground = GroundSet::anonymous(n).expect("n ≤ 64");
    let full = ground.full().bits();
    let generators = (0..count)
        .map(|_| loop {
            let bits = rng.gen::<u64>() & full;
            if bits != 0 {
                break SubsetMask::from_bits(bits);
            }
        })
        .collect();
    GeneratorFamily::new(ground, generators).expect("masks fit the ground set")
}

/// Structure generated by [`random_generators`]. Singletons are not forced,
/// so the result is usually not integral.
pub fn random_generated<R: Rng>(rng: &mut R, n: usize, count: usize) -> ConnectivityStructure {
    generate_structure(&random_generators(rng, n, count))
}

/// A reproducible mix of graph-induced and generated structures on at most
/// `max_points` points, keeping only those with at most `max_family`
/// connected sets so that exhaustive sieve enumeration stays cheap.
pub fn desk_corpus(seed: u64, count: usize, max_points: usize, max_family: usize) -> Vec<ConnectivityStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=max_points);
        let k = if out.len() % 2 == 0 {
            let p = *[0.2, 0.35, 0.5].choose(&mut rng).expect("nonempty");
            random_graph(&mut rng, n, p)
        } else {
            let gens = rng.gen_range(0..=n + 2);
            random_generated(&mut rng, n, gens)
        };
        if k.len() <= max_family {
            out.push(k);
        }
    }
    out
}
