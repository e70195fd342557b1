#![allow(dead_code)]

use rand::Rng;
use tsplab::geometry::{generate, EuclideanInstance, InstanceKind, NormalizedInstance};
use tsplab::seeded_rng;

pub fn corners() -> NormalizedInstance {
    EuclideanInstance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        .unwrap()
        .normalize()
        .unwrap()
}

/// Uniform instance, normalized, fully determined by `seed`.
pub fn random_instance(n: usize, seed: u64) -> NormalizedInstance {
    generate(InstanceKind::Uniform, n, &mut seeded_rng(seed))
        .unwrap()
        .normalize()
        .unwrap()
}

/// `count` instances with `n` drawn uniformly from `lo..=hi`.
pub fn instance_sweep(count: usize, lo: usize, hi: usize, seed: u64) -> Vec<NormalizedInstance> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(lo..=hi);
            random_instance(n, rng.random())
        })
        .collect()
}

/// Plain Euclidean distance from raw coordinates (1-based labels).
pub fn naive_dist(inst: &EuclideanInstance, a: usize, b: usize) -> f64 {
    let (p, q) = (inst.points()[a - 1], inst.points()[b - 1]);
    ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()
}

pub fn naive_cycle(inst: &EuclideanInstance, order: &[usize]) -> f64 {
    (0..order.len())
        .map(|i| naive_dist(inst, order[i], order[(i + 1) % order.len()]))
        .sum()
}

/// Every cyclic tour length by Heap's algorithm over raw permutations,
/// independent of the insertion-code machinery.
pub fn heap_lengths(inst: &EuclideanInstance) -> Vec<f64> {
    let n = inst.len();
    let mut a: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![naive_cycle(inst, &a)];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(naive_cycle(inst, &a));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}
