#![allow(dead_code)]

use pathclass::geom::{in_sphere_perturbed, orient_raw, Point, Sign};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every (d+1)-subset that is non-degenerate and has no other point strictly
/// inside its perturbed circumsphere. Sorted vertex sets, sorted.
pub fn brute_force_delaunay(pts: &[Point]) -> Vec<Vec<usize>> {
    let d = pts[0].dim();
    let n = pts.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..=d).collect();
    loop {
        let s: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
        if orient_raw(&s) != Sign::Zero
            && (0..n).all(|q| idx.contains(&q) || !in_sphere_perturbed(&s, &pts[q]))
        {
            out.push(idx.clone());
        }
        // next combination
        let mut k = d as isize;
        while k >= 0 && idx[k as usize] == n - 1 - (d - k as usize) {
            k -= 1;
        }
        if k < 0 {
            break;
        }
        let k = k as usize;
        idx[k] += 1;
        for j in k + 1..=d {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort();
    out
}

/// Random points, optionally snapped to a coarse grid to force ties.
pub fn random_points(rng: &mut ChaCha8Rng, dim: usize, n: usize, grid: bool) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(n);
    while out.len() < n {
        let mut c = [0.0; 3];
        for x in c.iter_mut().take(dim) {
            *x = if grid {
                rng.gen_range(0..10) as f64
            } else {
                rng.gen_range(-10.0..10.0)
            };
        }
        let p = Point::from_slice(&c[..dim]).unwrap();
        if !out.iter().any(|q| q.coords() == p.coords()) {
            out.push(p);
        }
    }
    out
}

/// Uniform free point of a planar scene.
pub fn random_free_point(rng: &mut ChaCha8Rng, scene: &pathclass::scene::Scene) -> Point {
    let (lo, hi) = scene.bounds();
    loop {
        let p = Point::new2(rng.gen_range(lo.x()..hi.x()), rng.gen_range(lo.y()..hi.y()));
        if scene.is_free(&p) {
            return p;
        }
    }
}

/// Random collision-free polyline from `s` to `g` through `hops` random
/// waypoints. `None` when no clear connection was found.
pub fn random_polyline(
    rng: &mut ChaCha8Rng,
    scene: &pathclass::scene::Scene,
    s: Point,
    g: Point,
    hops: usize,
) -> Option<Vec<Point>> {
    use pathclass::robot::segment_blocked;
    let mut path = vec![s];
    let mut tries = 0;
    while path.len() < hops + 1 || segment_blocked(scene, path.last().unwrap(), &g, 0.0) {
        tries += 1;
        if tries > 2000 {
            return None;
        }
        let w = random_free_point(rng, scene);
        if !segment_blocked(scene, path.last().unwrap(), &w, 0.0) {
            path.push(w);
        }
    }
    path.push(g);
    Some(path)
}

/// Jitter the interior waypoints of a polyline while keeping it clear.
pub fn jitter_polyline(
    rng: &mut ChaCha8Rng,
    scene: &pathclass::scene::Scene,
    path: &[Point],
    r: f64,
) -> Vec<Point> {
    use pathclass::robot::segment_blocked;
    let mut out = path.to_vec();
    for i in 1..out.len() - 1 {
        for _ in 0..20 {
            let q = Point::new2(
                out[i].x() + rng.gen_range(-r..r),
                out[i].y() + rng.gen_range(-r..r),
            );
            if scene.is_free(&q)
                && !segment_blocked(scene, &out[i - 1], &q, 0.0)
                && !segment_blocked(scene, &q, &out[i + 1], 0.0)
            {
                out[i] = q;
                break;
            }
        }
    }
    out
}
