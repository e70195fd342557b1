use crate::error::{Error, Result};
use crate::geometry::EuclideanInstance;
use crate::permcode::{decode_into, enumerate_codes_with_limit, Permutation};

/// Largest instance [`held_karp`] accepts.
pub const HELD_KARP_LIMIT: usize = 15;

/// Exact optimum by bitmask dynamic programming over subsets of cities
/// `2..=n`, with city 1 as the fixed start.
pub fn held_karp(inst: &EuclideanInstance) -> Result<(f64, Permutation)> {
    let n = inst.len();
    if n > HELD_KARP_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: HELD_KARP_LIMIT,
        });
    }
    let m = n - 1;
    let full = (1usize << m) - 1;
    // dp[mask * m + j]: shortest path 1 -> ... -> (j + 2) visiting exactly `mask`
    let mut dp = vec![f64::INFINITY; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = inst.dist(1, j + 2);
    }
    for mask in 1..=full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * m + j];
            if !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = cur + inst.dist(j + 2, k + 2);
                if cand < dp[next * m + k] {
                    dp[next * m + k] = cand;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }

    let (mut best, mut last) = (f64::INFINITY, 0usize);
    for j in 0..m {
        let total = dp[full * m + j] + inst.dist(j + 2, 1);
        if total < best {
            best = total;
            last = j;
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 2);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(1);
    order.reverse();
    let tour = Permutation::new(order).expect("reconstructed tour visits every city once");
    let length = inst.tour_length(&tour)?;
    Ok((length, tour))
}

/// Exhaustive minimum over all codes; the lowest rank wins ties.
pub fn brute_force(inst: &EuclideanInstance) -> Result<(f64, Permutation)> {
    brute_force_with_limit(inst, crate::DEFAULT_ENUMERATION_LIMIT)
}

pub fn brute_force_with_limit(
    inst: &EuclideanInstance,
    limit: usize,
) -> Result<(f64, Permutation)> {
    let n = inst.len();
    let mut order = Vec::with_capacity(n);
    let mut best = (f64::INFINITY, Vec::new());
    for code in enumerate_codes_with_limit(n, limit)? {
        decode_into(code.entries(), &mut order);
        let l = inst.cyclic_length(&order);
        if l < best.0 {
            best = (l, order.clone());
        }
    }
    Ok((best.0, Permutation::new(best.1)?))
}

/// Greedy nearest-neighbour tour from city 1; lowest label wins ties.
pub fn nearest_neighbor(inst: &EuclideanInstance) -> Permutation {
    let n = inst.len();
    let mut visited = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    let mut cur = 1;
    visited[1] = true;
    order.push(1);
    for _ in 1..n {
        let next = (1..=n)
            .filter(|&c| !visited[c])
            .min_by(|&a, &b| inst.dist(cur, a).total_cmp(&inst.dist(cur, b)))
            .expect("an unvisited city remains");
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    Permutation::new(order).expect("greedy tour visits every city once")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_and_triangle() {
        let sq = EuclideanInstance::from_coords(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)])
            .unwrap();
        let (l, tour) = held_karp(&sq).unwrap();
        assert!((l - 4.0).abs() < 1e-12);
        assert_eq!(tour.order()[0], 1);
        assert!((brute_force(&sq).unwrap().0 - 4.0).abs() < 1e-12);

        let tri = EuclideanInstance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        let expected = 2.0 + std::f64::consts::SQRT_2;
        assert!((held_karp(&tri).unwrap().0 - expected).abs() < 1e-12);
        assert!((brute_force(&tri).unwrap().0 - expected).abs() < 1e-12);
    }

    #[test]
    fn regular_hexagon() {
        let coords: Vec<(f64, f64)> = [0, 3, 1, 4, 2, 5]
            .iter()
            .map(|&k| {
                let a = std::f64::consts::PI / 3.0 * k as f64;
                (a.cos(), a.sin())
            })
            .collect();
        let hex = EuclideanInstance::from_coords(&coords).unwrap();
        assert!((held_karp(&hex).unwrap().0 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn two_cities() {
        let pair = EuclideanInstance::from_coords(&[(0.0, 0.0), (0.0, 1.0)]).unwrap();
        let (l, tour) = held_karp(&pair).unwrap();
        assert_eq!(l, 2.0);
        assert_eq!(tour.order(), &[1, 2]);
    }

    #[test]
    fn size_limits() {
        let pts: Vec<(f64, f64)> = (0..16).map(|i| (i as f64, 0.0)).collect();
        let big = EuclideanInstance::from_coords(&pts).unwrap();
        assert_eq!(
            held_karp(&big).unwrap_err(),
            Error::SizeLimit { n: 16, limit: 15 }
        );
        assert!(matches!(brute_force(&big), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn nearest_neighbor_walks_the_line() {
        let line =
            EuclideanInstance::from_coords(&[(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
                .unwrap();
        assert_eq!(nearest_neighbor(&line).order(), &[1, 3, 4, 2]);
    }
}
