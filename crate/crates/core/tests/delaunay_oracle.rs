mod common;

use common::{brute_force_delaunay, random_points};
use pathclass::delaunay::Triangulation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check(dim: usize, n: usize, grid: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(&mut rng, dim, n, grid);
    let Ok(t) = Triangulation::from_points(&pts) else {
        return;
    };
    assert_eq!(
        t.simplex_sets(),
        brute_force_delaunay(&pts),
        "seed {seed} dim {dim} grid {grid}"
    );
}

#[test]
fn matches_oracle_2d_generic() {
    for s in 0..40 {
        check(2, 5 + s as usize % 30, false, s);
    }
}

#[test]
fn matches_oracle_2d_cocircular() {
    for s in 0..40 {
        check(2, 5 + s as usize % 30, true, 1000 + s);
    }
}

#[test]
fn matches_oracle_3d_generic() {
    for s in 0..15 {
        check(3, 5 + s as usize % 15, false, 2000 + s);
    }
}

#[test]
fn matches_oracle_3d_cospherical() {
    for s in 0..15 {
        check(3, 5 + s as usize % 15, true, 3000 + s);
    }
}

#[test]
fn euler_characteristic_2d() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = random_points(&mut rng, 2, 60, true);
    let t = Triangulation::from_points(&pts).unwrap();
    let v = pts.len() as i64;
    let e = t.edges().len() as i64;
    let f = t.len() as i64;
    assert_eq!(v - e + f, 1);
}

#[test]
fn insertion_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = random_points(&mut rng, 3, 30, true);
    let t = Triangulation::from_points(&pts).unwrap();
    let mut rev = pts.clone();
    rev.reverse();
    let u = Triangulation::from_points(&rev).unwrap();
    let n = pts.len();
    let mut mapped: Vec<Vec<usize>> = u
        .simplex_sets()
        .into_iter()
        .map(|s| {
            let mut m: Vec<usize> = s.into_iter().map(|i| n - 1 - i).collect();
            m.sort();
            m
        })
        .collect();
    mapped.sort();
    assert_eq!(t.simplex_sets(), mapped);
}
