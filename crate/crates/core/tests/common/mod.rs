#![allow(dead_code)]

use rand::Rng;
use stl_qlearn::stl::{Formula, Interval, Predicate, Relation, Signal};
use stl_qlearn::tau_mdp::UNREACHABLE;

/// Either a value on the half grid (to provoke ties and zeros) or a
/// continuous one.
pub fn value<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(-4i32..=4) as f64 * 0.5
    } else {
        rng.gen_range(-2.0..2.0)
    }
}

pub fn random_predicate<R: Rng>(rng: &mut R, dim: usize) -> Predicate<f64> {
    let rel = if rng.gen_bool(0.5) { Relation::Less } else { Relation::Greater };
    if rng.gen_bool(0.7) {
        Predicate::axis(dim, rng.gen_range(0..dim), rel, value(rng))
    } else {
        let coeffs = (0..dim)
            .map(|_| [-2.0, -1.0, -0.5, 1.0, 1.5, 2.0][rng.gen_range(0..6)])
            .collect();
        Predicate::new(coeffs, value(rng), rel, value(rng))
    }
}

pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = rng.gen_range(0..3);
    Interval::new(a, a + rng.gen_range(1..=4)).unwrap()
}

/// Random formula of depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, dim: usize) -> Formula<f64> {
    if depth == 0 || rng.gen_bool(0.2) {
        return Formula::pred(random_predicate(rng, dim));
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => random_formula(rng, d, dim).not(),
        1 => random_formula(rng, d, dim).and(random_formula(rng, d, dim)),
        2 => random_formula(rng, d, dim).or(random_formula(rng, d, dim)),
        3 => Formula::finally(random_interval(rng), random_formula(rng, d, dim)),
        4 => Formula::globally(random_interval(rng), random_formula(rng, d, dim)),
        _ => Formula::until(
            random_interval(rng),
            random_formula(rng, d, dim),
            random_formula(rng, d, dim),
        ),
    }
}

pub fn random_signal<R: Rng>(rng: &mut R, len: usize, dim: usize) -> Signal<f64> {
    Signal::from_samples((0..len).map(|_| (0..dim).map(|_| value(rng)).collect()).collect())
        .unwrap()
}

fn grid_adjacency(nx: usize, ny: usize) -> Vec<Vec<usize>> {
    let n = nx * ny;
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            let (ai, aj) = ((a % nx) as i64, (a / nx) as i64);
            let (bi, bj) = ((b % nx) as i64, (b / nx) as i64);
            if (ai - bi).abs() + (aj - bj).abs() <= 1 {
                adj[a].push(b);
            }
        }
    }
    adj
}

/// Number of tau-states reachable from the given start cells, counted as
/// walks on the grid: `ε`-padded states are walks of `m < tau` cells from
/// a start cell, full states are any walk of `tau` cells.
pub fn reachable_count_oracle(nx: usize, ny: usize, tau: usize, starts: &[usize]) -> usize {
    let adj = grid_adjacency(nx, ny);
    let n = nx * ny;
    // walks[m][c]: walks of m cells ending at c, from any cell / from starts
    let step = |w: &Vec<u64>| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for c in 0..n {
            for &d in &adj[c] {
                out[d] += w[c];
            }
        }
        out
    };
    let mut any = vec![1u64; n];
    let mut from_start = vec![0u64; n];
    for &s in starts {
        from_start[s] = 1;
    }
    let mut padded = 0u64;
    for _ in 1..tau {
        padded += from_start.iter().sum::<u64>();
        from_start = step(&from_start);
        any = step(&any);
    }
    (padded + any.iter().sum::<u64>()) as usize
}

/// Signed distances from an all-pairs shortest path table.
pub fn floyd_warshall_signed(succ: &[Vec<usize>], in_set: &[bool]) -> Vec<i64> {
    let n = succ.len();
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            if i != j {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    (0..n)
        .map(|s| {
            if in_set[s] {
                let m = (0..n).filter(|&j| !in_set[j]).map(|j| d[j][s]).min().unwrap();
                if m >= INF { -UNREACHABLE } else { -(m as i64) }
            } else {
                let m = (0..n).filter(|&j| in_set[j]).map(|j| d[s][j]).min().unwrap();
                if m >= INF { UNREACHABLE } else { m as i64 }
            }
        })
        .collect()
}
