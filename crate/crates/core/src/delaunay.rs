//! Incremental Bowyer–Watson Delaunay triangulation in 2D and 3D.
//!
//! The convex hull is closed off with ghost cells that share a single vertex
//! at infinity, so points outside the current hull are inserted with the same
//! cavity procedure as interior points. All decisions use the exact,
//! symbolically perturbed predicates from [`crate::geom`], so the output is the
//! unique Delaunay triangulation of the perturbed input.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    cross, in_circle_coplanar_perturbed, in_sphere_perturbed, orient_raw, strictly_between, Point,
    Polytope, Sign,
};
use crate::scene::{separation_depth, Scene};

const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

/// Where a triangulation vertex came from: the obstacle whose boundary it
/// lies on, and the workspace walls it touches (bit `2k` is the min side of
/// axis `k`, bit `2k + 1` the max side).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<u32>,
    #[serde(skip_serializing_if = "is_zero")]
    pub walls: u8,
}

fn is_zero(w: &u8) -> bool {
    *w == 0
}

impl Provenance {
    pub fn obstacle(id: u32) -> Self {
        Provenance {
            obstacle: Some(id),
            walls: 0,
        }
    }

    pub fn walls(mask: u8) -> Self {
        Provenance {
            obstacle: None,
            walls: mask,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    v: [usize; 4],
    n: [usize; 4],
}

/// Incremental builder. Points may be added at any time; [`Self::finish`]
/// snapshots the current triangulation.
#[derive(Clone, Debug)]
pub struct DelaunayBuilder {
    dim: usize,
    pts: Vec<Point>,
    prov: Vec<Provenance>,
    cells: Vec<Cell>,
    alive: Vec<bool>,
    free: Vec<usize>,
    pending: Vec<usize>,
    last: usize,
    seen: HashSet<[u64; 3]>,
}

fn key_of(p: &Point) -> [u64; 3] {
    let mut k = [0u64; 3];
    for (i, c) in p.coords().iter().enumerate() {
        // +0.0 and -0.0 are the same point
        k[i] = if *c == 0.0 { 0 } else { c.to_bits() };
    }
    k
}

impl DelaunayBuilder {
    pub fn new(dim: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Input(format!("unsupported dimension {dim}")));
        }
        Ok(DelaunayBuilder {
            dim,
            pts: Vec::new(),
            prov: Vec::new(),
            cells: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            pending: Vec::new(),
            last: NONE,
            seen: HashSet::new(),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    pub fn insert(&mut self, p: Point, prov: Provenance) -> Result<usize> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if !self.seen.insert(key_of(&p)) {
            return Err(Error::Degenerate(format!("duplicate point {p:?}")));
        }
        let idx = self.pts.len();
        self.pts.push(p);
        self.prov.push(prov);
        if self.last == NONE {
            self.pending.push(idx);
            self.try_init();
        } else {
            self.insert_vertex(idx);
        }
        Ok(idx)
    }

    fn try_init(&mut self) {
        let d = self.dim;
        let mut pick: Vec<usize> = Vec::new();
        for &i in &self.pending {
            let mut cand: Vec<Point> = pick.iter().map(|&j| self.pts[j]).collect();
            cand.push(self.pts[i]);
            let ok = match cand.len() {
                1 | 2 => true,
                3 if d == 2 => orient_raw(&cand) != Sign::Zero,
                3 => !collinear3(&cand[0], &cand[1], &cand[2]),
                4 => orient_raw(&cand) != Sign::Zero,
                _ => false,
            };
            if ok {
                pick.push(i);
                if pick.len() == d + 1 {
                    break;
                }
            }
        }
        if pick.len() < d + 1 {
            return;
        }
        let pts: Vec<Point> = pick.iter().map(|&j| self.pts[j]).collect();
        if orient_raw(&pts) == Sign::Negative {
            pick.swap(0, 1);
        }
        let mut v = [GHOST; 4];
        v[..=d].copy_from_slice(&pick);
        let mut created = vec![self.new_cell(v)];
        for i in 0..=d {
            created.push(self.new_cell(ghost_for_facet(v, i, d)));
        }
        self.link(&created, &[]);
        self.last = created[0];
        let rest: Vec<usize> = self
            .pending
            .drain(..)
            .filter(|i| !pick.contains(i))
            .collect();
        for i in rest {
            self.insert_vertex(i);
        }
    }

    fn new_cell(&mut self, v: [usize; 4]) -> usize {
        let c = Cell { v, n: [NONE; 4] };
        if let Some(i) = self.free.pop() {
            self.cells[i] = c;
            self.alive[i] = true;
            i
        } else {
            self.cells.push(c);
            self.alive.push(true);
            self.cells.len() - 1
        }
    }

    fn is_ghost(&self, c: usize) -> bool {
        self.cells[c].v[..=self.dim].contains(&GHOST)
    }

    fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].v[..=self.dim]
            .iter()
            .map(|&i| self.pts[i])
            .collect()
    }

    /// Orientation of finite cell `c` with vertex slot `k` replaced by `q`.
    fn orient_with(&self, c: usize, k: usize, q: &Point) -> Sign {
        let mut p: Vec<Point> = Vec::with_capacity(self.dim + 1);
        for (j, &vi) in self.cells[c].v[..=self.dim].iter().enumerate() {
            p.push(if j == k { *q } else { self.pts[vi] });
        }
        orient_raw(&p)
    }

    fn conflicts(&self, c: usize, q: &Point) -> bool {
        let d = self.dim;
        let v = self.cells[c].v;
        match v[..=d].iter().position(|&x| x == GHOST) {
            None => in_sphere_perturbed(&self.cell_points(c), q),
            Some(g) => match self.orient_with(c, g, q) {
                Sign::Positive => true,
                Sign::Negative => false,
                Sign::Zero => {
                    let f: Vec<Point> = v[..=d]
                        .iter()
                        .filter(|&&x| x != GHOST)
                        .map(|&x| self.pts[x])
                        .collect();
                    if d == 2 {
                        strictly_between(&f[0], &f[1], q)
                    } else {
                        in_circle_coplanar_perturbed(&[f[0], f[1], f[2]], q)
                    }
                }
            },
        }
    }

    /// A cell in conflict with `q`: the finite cell containing it, or a ghost
    /// whose hull facet `q` strictly sees.
    fn locate_conflict(&self, q: &Point) -> usize {
        let d = self.dim;
        let mut c = if self.last != NONE && self.alive[self.last] && !self.is_ghost(self.last) {
            self.last
        } else {
            (0..self.cells.len())
                .find(|&i| self.alive[i] && !self.is_ghost(i))
                .expect("no finite cell")
        };
        let live = self.alive.iter().filter(|a| **a).count();
        let mut prev = NONE;
        let mut steps = 0usize;
        'walk: while steps < 4 * live + 16 {
            steps += 1;
            let start = steps % (d + 1);
            for off in 0..=d {
                let k = (start + off) % (d + 1);
                let nb = self.cells[c].n[k];
                if nb == prev {
                    continue;
                }
                if self.orient_with(c, k, q) == Sign::Negative {
                    if self.is_ghost(nb) {
                        return nb;
                    }
                    prev = c;
                    c = nb;
                    continue 'walk;
                }
            }
            // the facet back to `prev` was skipped; re-check it before stopping
            if let Some(k) = (0..=d).find(|&k| self.cells[c].n[k] == prev) {
                if prev != NONE && self.orient_with(c, k, q) == Sign::Negative {
                    std::mem::swap(&mut prev, &mut c);
                    continue;
                }
            }
            return c;
        }
        // walk did not settle; scan
        for i in 0..self.cells.len() {
            if self.alive[i]
                && !self.is_ghost(i)
                && (0..=d).all(|k| self.orient_with(i, k, q) != Sign::Negative)
            {
                return i;
            }
        }
        (0..self.cells.len())
            .find(|&i| self.alive[i] && self.is_ghost(i) && self.conflicts(i, q))
            .expect("point location failed")
    }

    fn insert_vertex(&mut self, qi: usize) {
        let q = self.pts[qi];
        let d = self.dim;
        let seed = self.locate_conflict(&q);
        debug_assert!(self.conflicts(seed, &q));

        let mut in_cavity: HashSet<usize> = HashSet::new();
        let mut rejected: HashSet<usize> = HashSet::new();
        let mut stack = vec![seed];
        in_cavity.insert(seed);
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        let mut order: Vec<usize> = Vec::new();
        while let Some(c) = stack.pop() {
            order.push(c);
            for k in 0..=d {
                let nb = self.cells[c].n[k];
                if in_cavity.contains(&nb) {
                    continue;
                }
                if !rejected.contains(&nb) && self.conflicts(nb, &q) {
                    in_cavity.insert(nb);
                    stack.push(nb);
                } else {
                    rejected.insert(nb);
                    boundary.push((c, k, nb));
                }
            }
        }
        // drop boundary facets whose outside cell later joined the cavity
        boundary.retain(|(_, _, nb)| !in_cavity.contains(nb));

        let mut created = Vec::with_capacity(boundary.len());
        let mut external = Vec::with_capacity(boundary.len());
        for &(c, k, nb) in &boundary {
            let mut v = self.cells[c].v;
            v[k] = qi;
            let nc = self.new_cell(v);
            self.cells[nc].n[k] = nb;
            if let Some(j) = (0..=d).find(|&j| self.cells[nb].n[j] == c) {
                self.cells[nb].n[j] = nc;
            }
            created.push(nc);
            external.push(k);
        }
        for &c in &order {
            self.alive[c] = false;
            self.free.push(c);
        }
        self.link(&created, &external);
        if let Some(&c) = created.iter().find(|&&c| !self.is_ghost(c)) {
            self.last = c;
        }
        debug_assert!(created
            .iter()
            .filter(|&&c| !self.is_ghost(c))
            .all(|&c| orient_raw(&self.cell_points(c)) == Sign::Positive));
    }

    /// Link facets among `cells`; `skip[i]` is a slot of `cells[i]` already linked.
    fn link(&mut self, cells: &[usize], skip: &[usize]) {
        let d = self.dim;
        let mut open: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
        for (ci, &c) in cells.iter().enumerate() {
            for k in 0..=d {
                if skip.get(ci) == Some(&k) {
                    continue;
                }
                let key = facet_key(&self.cells[c].v, k, d);
                if let Some((o, ok)) = open.remove(&key) {
                    self.cells[c].n[k] = o;
                    self.cells[o].n[ok] = c;
                } else {
                    open.insert(key, (c, k));
                }
            }
        }
        debug_assert!(open.is_empty(), "unmatched facets after insertion");
    }

    /// Current finite edges as sorted index pairs.
    pub fn edges(&self) -> HashSet<(usize, usize)> {
        let d = self.dim;
        let mut e = HashSet::new();
        for c in 0..self.cells.len() {
            if !self.alive[c] {
                continue;
            }
            let v = &self.cells[c].v[..=d];
            for i in 0..=d {
                for j in i + 1..=d {
                    if v[i] != GHOST && v[j] != GHOST {
                        e.insert((v[i].min(v[j]), v[i].max(v[j])));
                    }
                }
            }
        }
        e
    }

    pub fn finish(&self) -> Result<Triangulation> {
        if self.last == NONE {
            return Err(Error::Degenerate(format!(
                "fewer than {} affinely independent points",
                self.dim + 1
            )));
        }
        let d = self.dim;
        let mut simplices: Vec<[usize; 4]> = Vec::new();
        for c in 0..self.cells.len() {
            if !self.alive[c] || self.is_ghost(c) {
                continue;
            }
            let mut v = self.cells[c].v;
            v[..=d].sort_unstable();
            let p: Vec<Point> = v[..=d].iter().map(|&i| self.pts[i]).collect();
            if orient_raw(&p) == Sign::Negative {
                v.swap(d - 1, d);
            }
            simplices.push(v);
        }
        simplices.sort_unstable();
        Ok(Triangulation::assemble(
            d,
            self.pts.clone(),
            self.prov.clone(),
            simplices,
        ))
    }
}

fn collinear3(a: &Point, b: &Point, c: &Point) -> bool {
    (0..3).all(|axis| crate::geom::orient_projected(a, b, c, axis) == Sign::Zero)
}

fn facet_key(v: &[usize; 4], k: usize, d: usize) -> [usize; 3] {
    let mut f = [NONE; 3];
    let mut j = 0;
    for (i, &x) in v[..=d].iter().enumerate() {
        if i != k {
            f[j] = x;
            j += 1;
        }
    }
    f[..d].sort_unstable();
    f
}

/// Ghost cell across facet `i` of finite cell `v`: the infinite vertex takes
/// slot `i` and two finite slots swap so that an outside point in the ghost
/// slot yields positive orientation.
fn ghost_for_facet(v: [usize; 4], i: usize, d: usize) -> [usize; 4] {
    let mut g = v;
    g[i] = GHOST;
    let others: Vec<usize> = (0..=d).filter(|&k| k != i).collect();
    g.swap(others[0], others[1]);
    g
}

/// A finished Delaunay triangulation with simplex adjacency.
#[derive(Clone, Debug, Serialize)]
pub struct Triangulation {
    dim: usize,
    points: Vec<Point>,
    provenance: Vec<Provenance>,
    simplices: Vec<[usize; 4]>,
    neighbors: Vec<[Option<usize>; 4]>,
    inside_obstacle: Vec<Option<u32>>,
}

impl Triangulation {
    fn assemble(
        dim: usize,
        points: Vec<Point>,
        provenance: Vec<Provenance>,
        simplices: Vec<[usize; 4]>,
    ) -> Self {
        let mut neighbors = vec![[None; 4]; simplices.len()];
        let mut open: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
        for (s, v) in simplices.iter().enumerate() {
            for k in 0..=dim {
                let key = facet_key(v, k, dim);
                if let Some((o, ok)) = open.remove(&key) {
                    neighbors[s][k] = Some(o);
                    neighbors[o][ok] = Some(s);
                } else {
                    open.insert(key, (s, k));
                }
            }
        }
        let n = simplices.len();
        Triangulation {
            dim,
            points,
            provenance,
            simplices,
            neighbors,
            inside_obstacle: vec![None; n],
        }
    }

    /// Delaunay triangulation of unlabeled points, inserted in the given order.
    pub fn from_points(points: &[Point]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::Degenerate("no points".into()))?;
        let mut b = DelaunayBuilder::new(dim)?;
        for p in points {
            b.insert(*p, Provenance::default())?;
        }
        b.finish()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn provenance(&self, v: usize) -> Provenance {
        self.provenance[v]
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Vertex indices of simplex `s`, positively oriented.
    pub fn simplex(&self, s: usize) -> &[usize] {
        &self.simplices[s][..=self.dim]
    }

    pub fn simplex_points(&self, s: usize) -> Vec<Point> {
        self.simplex(s).iter().map(|&i| self.points[i]).collect()
    }

    /// Neighbor across the facet opposite local vertex `k`.
    pub fn neighbor(&self, s: usize, k: usize) -> Option<usize> {
        self.neighbors[s][k]
    }

    pub fn neighbors(&self, s: usize) -> &[Option<usize>] {
        &self.neighbors[s][..=self.dim]
    }

    pub fn inside_obstacle(&self, s: usize) -> Option<u32> {
        self.inside_obstacle[s]
    }

    pub fn set_inside(&mut self, s: usize, o: Option<u32>) {
        self.inside_obstacle[s] = o;
    }

    pub fn centroid(&self, s: usize) -> Point {
        let p = self.simplex_points(s);
        let mut c = p[0].scale(0.0);
        for q in &p {
            c = c.add(q);
        }
        c.scale(1.0 / p.len() as f64)
    }

    /// Vertices of the facet of `s` opposite local vertex `k`.
    pub fn facet(&self, s: usize, k: usize) -> Vec<usize> {
        self.simplex(s)
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, &v)| v)
            .collect()
    }

    /// Hull facets, each ordered so that the interior sees it with positive
    /// orientation.
    pub fn hull_facets(&self) -> Vec<Vec<usize>> {
        let d = self.dim;
        let mut out = Vec::new();
        for s in 0..self.len() {
            for k in 0..=d {
                if self.neighbors[s][k].is_none() {
                    let mut f = self.facet(s, k);
                    // moving vertex k to the end permutes by (d - k) transpositions
                    if (d - k) % 2 == 1 {
                        f.swap(0, 1);
                    }
                    out.push(f);
                }
            }
        }
        out
    }

    /// Sorted vertex sets of every simplex, for comparisons.
    pub fn simplex_sets(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = (0..self.len())
            .map(|s| {
                let mut x = self.simplex(s).to_vec();
                x.sort_unstable();
                x
            })
            .collect();
        v.sort();
        v
    }

    pub fn edges(&self) -> HashSet<(usize, usize)> {
        let mut e = HashSet::new();
        for s in 0..self.len() {
            let v = self.simplex(s);
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    e.insert((v[i].min(v[j]), v[i].max(v[j])));
                }
            }
        }
        e
    }

    /// Does simplex `s` contain `p` (boundary included)?
    pub fn contains_closed(&self, s: usize, p: &Point) -> bool {
        (0..=self.dim).all(|k| self.orient_with(s, k, p) != Sign::Negative)
    }

    pub(crate) fn orient_with(&self, s: usize, k: usize, q: &Point) -> Sign {
        let p: Vec<Point> = self
            .simplex(s)
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == k { *q } else { self.points[v] })
            .collect();
        orient_raw(&p)
    }

    /// Some simplex containing `p`, by linear scan.
    pub fn locate_closed(&self, p: &Point) -> Option<usize> {
        (0..self.len()).find(|&s| self.contains_closed(s, p))
    }

    /// All simplices whose closure contains `p`.
    pub fn locate_all(&self, p: &Point) -> Vec<usize> {
        (0..self.len())
            .filter(|&s| self.contains_closed(s, p))
            .collect()
    }

    /// Simplex containing `p` (closed), found by a visibility walk from
    /// `hint`; `None` when `p` is outside the hull.
    pub fn locate_walk(&self, p: &Point, hint: usize) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let mut s = hint.min(self.len() - 1);
        let mut steps = 0;
        'walk: while steps < 4 * self.len() + 8 {
            steps += 1;
            for off in 0..=self.dim {
                let k = (off + steps) % (self.dim + 1);
                if self.orient_with(s, k, p) == Sign::Negative {
                    s = self.neighbors[s][k]?;
                    continue 'walk;
                }
            }
            return Some(s);
        }
        self.locate_closed(p)
    }

    /// Every simplex whose closure contains `p`, found from one of them.
    pub fn star_of_point(&self, p: &Point, hint: usize) -> Vec<usize> {
        let Some(s0) = self.locate_walk(p, hint) else {
            return Vec::new();
        };
        let mut out = vec![s0];
        let mut seen: HashSet<usize> = HashSet::from([s0]);
        let mut i = 0;
        while i < out.len() {
            let s = out[i];
            i += 1;
            for k in 0..=self.dim {
                // only facets that contain p can lead to other simplices containing p
                if self.orient_with(s, k, p) != Sign::Zero {
                    continue;
                }
                if let Some(n) = self.neighbors[s][k] {
                    if seen.insert(n) && self.contains_closed(n, p) {
                        out.push(n);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Simplices crossed by the segment `p -> q`, in order. Fails when the
    /// segment leaves the hull, or runs through a vertex or (in 3D) an edge.
    pub fn trace(&self, p: &Point, q: &Point, hint: usize) -> Result<Vec<usize>> {
        let star = self.star_of_point(p, hint);
        if star.is_empty() {
            return Err(Error::OutsideWorkspace(p.to_vec()));
        }
        if p == q {
            return Ok(vec![star[0]]);
        }
        let start = star.iter().copied().find(|&s| {
            (0..=self.dim).all(|k| {
                self.orient_with(s, k, p) != Sign::Zero
                    || self.orient_with(s, k, q) == Sign::Positive
            })
        });
        let Some(mut s) = start else {
            return Err(Error::Degenerate(format!(
                "segment from {p:?} runs along a triangulation face"
            )));
        };
        let mut out = vec![s];
        while !self.contains_closed(s, q) {
            let exit = (0..=self.dim).find(|&k| {
                self.orient_with(s, k, q) == Sign::Negative && self.line_pierces_facet(s, k, p, q)
            });
            let Some(k) = exit else {
                return Err(Error::Degenerate(format!(
                    "segment {p:?} -> {q:?} passes through a lower-dimensional face"
                )));
            };
            match self.neighbors[s][k] {
                Some(n) => {
                    s = n;
                    out.push(s);
                }
                None => return Err(Error::OutsideWorkspace(q.to_vec())),
            }
            if out.len() > 4 * self.len() + 8 {
                return Err(Error::Degenerate("segment trace did not terminate".into()));
            }
        }
        Ok(out)
    }

    fn line_pierces_facet(&self, s: usize, k: usize, p: &Point, q: &Point) -> bool {
        let f: Vec<Point> = self.facet(s, k).iter().map(|&v| self.points[v]).collect();
        if self.dim == 2 {
            let a = orient_raw(&[*p, *q, f[0]]);
            let b = orient_raw(&[*p, *q, f[1]]);
            a != Sign::Zero && b != Sign::Zero && a != b
        } else {
            let s0 = orient_raw(&[*p, *q, f[0], f[1]]);
            let s1 = orient_raw(&[*p, *q, f[1], f[2]]);
            let s2 = orient_raw(&[*p, *q, f[2], f[0]]);
            s0 != Sign::Zero && s0 == s1 && s1 == s2
        }
    }

    /// Debug dump as JSON: points, provenance, simplices, inside flags.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "points": self.points,
            "provenance": self.provenance,
            "simplices": (0..self.len()).map(|s| self.simplex(s).to_vec()).collect::<Vec<_>>(),
            "inside_obstacle": self.inside_obstacle,
        })
    }
}

/// Delaunay triangulation of a scene: obstacle vertices plus workspace
/// corners, refined with Steiner points on obstacle boundaries until every
/// simplex lies either inside one obstacle or in free space.
pub fn triangulate(scene: &Scene) -> Result<Triangulation> {
    let d = scene.dim();
    let mut b = DelaunayBuilder::new(d)?;
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut constraints: Vec<(usize, usize, u32)> = Vec::new();
    for o in scene.obstacles() {
        for piece in &o.pieces {
            let mut ids = Vec::with_capacity(piece.vertices.len());
            for v in &piece.vertices {
                let prov = Provenance {
                    obstacle: Some(o.id),
                    walls: scene.wall_mask(v),
                };
                ids.push(insert_once(&mut b, &mut index, *v, prov)?);
            }
            if d == 2 {
                let n = ids.len();
                constraints.extend((0..n).map(|i| (ids[i], ids[(i + 1) % n], o.id)));
            }
        }
    }
    for c in scene.corners() {
        insert_once(
            &mut b,
            &mut index,
            c,
            Provenance::walls(scene.wall_mask(&c)),
        )?;
    }
    if d == 2 {
        for p in wall_points_2d(scene) {
            let prov = Provenance {
                obstacle: scene.obstacle_at(&p),
                walls: scene.wall_mask(&p),
            };
            insert_once(&mut b, &mut index, p, prov)?;
        }
        recover_edges(scene, &mut b, &mut index, constraints)?;
    } else {
        conform_3d(scene, &mut b, &mut index)?;
    }
    let mut t = b.finish()?;
    for s in 0..t.len() {
        let c = t.centroid(s);
        t.set_inside(s, scene.obstacle_at(&c));
    }
    Ok(t)
}

/// Evenly spaced points on each side of a planar workspace. They depend on
/// the bounds only, so wall-side triangles stay short and do not flip when
/// obstacles move slightly.
fn wall_points_2d(scene: &Scene) -> Vec<Point> {
    const SPLITS: usize = 16;
    let (lo, hi) = scene.bounds();
    let mut out = Vec::with_capacity(4 * (SPLITS - 1));
    for i in 1..SPLITS {
        let t = i as f64 / SPLITS as f64;
        let x = lo.x() + t * (hi.x() - lo.x());
        let y = lo.y() + t * (hi.y() - lo.y());
        out.extend([
            Point::new2(x, lo.y()),
            Point::new2(x, hi.y()),
            Point::new2(lo.x(), y),
            Point::new2(hi.x(), y),
        ]);
    }
    out
}

fn insert_once(
    b: &mut DelaunayBuilder,
    index: &mut HashMap<[u64; 3], usize>,
    p: Point,
    prov: Provenance,
) -> Result<usize> {
    if let Some(&i) = index.get(&key_of(&p)) {
        if prov.obstacle.is_some() {
            b.prov[i].obstacle = prov.obstacle;
        }
        b.prov[i].walls |= prov.walls;
        return Ok(i);
    }
    let i = b.insert(p, prov)?;
    index.insert(key_of(&p), i);
    Ok(i)
}

/// Split obstacle edges at their midpoints until each piece is a union of
/// triangulation edges.
fn recover_edges(
    scene: &Scene,
    b: &mut DelaunayBuilder,
    index: &mut HashMap<[u64; 3], usize>,
    mut pending: Vec<(usize, usize, u32)>,
) -> Result<()> {
    for _round in 0..64 {
        let edges = b.edges();
        let missing: Vec<(usize, usize, u32)> = pending
            .iter()
            .copied()
            .filter(|&(u, v, _)| !edges.contains(&(u.min(v), u.max(v))))
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        pending = missing;
        let mut next = Vec::with_capacity(2 * pending.len());
        for (u, v, id) in pending {
            let m = b.pts[u].lerp(&b.pts[v], 0.5);
            let prov = Provenance {
                obstacle: Some(id),
                walls: scene.wall_mask(&m),
            };
            let w = insert_once(b, index, m, prov)?;
            if w == u || w == v {
                return Err(Error::Degenerate(
                    "obstacle edge too short to recover".into(),
                ));
            }
            next.push((u, w, id));
            next.push((w, v, id));
        }
        pending = next;
    }
    Err(Error::Degenerate(
        "obstacle edges could not be recovered".into(),
    ))
}

const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Insert boundary points where tetrahedra cut into obstacles, until none do.
fn conform_3d(
    scene: &Scene,
    b: &mut DelaunayBuilder,
    index: &mut HashMap<[u64; 3], usize>,
) -> Result<()> {
    let (lo, hi) = scene.bounds();
    let diam = lo.dist(&hi);
    let eps = 1e-9 * diam;
    let boxes: Vec<Vec<(Point, Point)>> = scene
        .obstacles()
        .iter()
        .map(|o| o.pieces.iter().map(|p| p.bbox()).collect())
        .collect();
    for _round in 0..48 {
        let t = b.finish()?;
        let mut found: Vec<(Point, u32)> = Vec::new();
        for s in 0..t.len() {
            let tp = t.simplex_points(s);
            let (tlo, thi) = bbox_of(&tp);
            for (oi, o) in scene.obstacles().iter().enumerate() {
                for (pi, piece) in o.pieces.iter().enumerate() {
                    let (plo, phi) = boxes[oi][pi];
                    if (0..3).any(|k| {
                        thi.coords()[k] <= plo.coords()[k] || phi.coords()[k] <= tlo.coords()[k]
                    }) {
                        continue;
                    }
                    if tp.iter().all(|v| o.contains(v)) {
                        continue;
                    }
                    if separation_depth(&tp, &TET_FACES, &piece.vertices, &piece.faces) <= eps {
                        continue;
                    }
                    let before = found.len();
                    let planes = halfspaces(&piece.vertices, &piece.faces);
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if let Some((t0, t1)) = clip(&tp[i], &tp[j], &planes) {
                                if t1 - t0 > 1e-9 {
                                    for tt in [t0, t1] {
                                        if tt > 1e-9 && tt < 1.0 - 1e-9 {
                                            found.push((
                                                snap_to_faces(tp[i].lerp(&tp[j], tt), piece),
                                                o.id,
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                    let tplanes = halfspaces(&tp, &TET_FACES);
                    for (u, v) in piece.edges() {
                        let (a, c) = (piece.vertices[u], piece.vertices[v]);
                        if let Some((t0, t1)) = clip(&a, &c, &tplanes) {
                            if t1 - t0 > 1e-9 {
                                found.push((
                                    snap_to_edge(a.lerp(&c, 0.5 * (t0 + t1)), &a, &c),
                                    o.id,
                                ));
                            }
                        }
                    }
                    if found.len() == before {
                        // a face pokes through without edge crossings: use the
                        // deepest tetrahedron point projected onto the piece
                        let c = t.centroid(s);
                        found.push((snap_to_faces(project_to_boundary(&c, &planes), piece), o.id));
                    }
                }
            }
        }
        let mut inserted = 0;
        for (p, id) in found {
            if index.contains_key(&key_of(&p)) || b.pts.iter().any(|q| q.dist(&p) < eps) {
                continue;
            }
            insert_once(
                b,
                index,
                p,
                Provenance {
                    obstacle: Some(id),
                    walls: scene.wall_mask(&p),
                },
            )?;
            inserted += 1;
        }
        if inserted == 0 {
            return Ok(());
        }
    }
    Err(Error::Degenerate(
        "3D obstacles could not be made conforming".into(),
    ))
}

fn bbox_of(p: &[Point]) -> (Point, Point) {
    let mut lo = p[0];
    let mut hi = p[0];
    for q in p {
        for k in 0..3 {
            lo.c[k] = lo.c[k].min(q.c[k]);
            hi.c[k] = hi.c[k].max(q.c[k]);
        }
    }
    (lo, hi)
}

/// Outward unit normals and offsets: inside is `n . x <= off`.
fn halfspaces(v: &[Point], faces: &[[usize; 3]]) -> Vec<(Point, f64)> {
    let mut c = v[0].scale(0.0);
    for p in v {
        c = c.add(p);
    }
    let c = c.scale(1.0 / v.len() as f64);
    faces
        .iter()
        .filter_map(|f| {
            let n = cross(&v[f[1]].sub(&v[f[0]]), &v[f[2]].sub(&v[f[0]]));
            let l = n.norm2().sqrt();
            if l == 0.0 {
                return None;
            }
            let mut n = n.scale(1.0 / l);
            if n.dot(&c.sub(&v[f[0]])) > 0.0 {
                n = n.scale(-1.0);
            }
            Some((n, n.dot(&v[f[0]])))
        })
        .collect()
}

fn clip(a: &Point, b: &Point, planes: &[(Point, f64)]) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let dir = b.sub(a);
    for (n, off) in planes {
        let num = off - n.dot(a);
        let den = n.dot(&dir);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else if den > 0.0 {
            t1 = t1.min(num / den);
        } else {
            t0 = t0.max(num / den);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

fn project_to_boundary(p: &Point, planes: &[(Point, f64)]) -> Point {
    // nearest face plane; the point is inside the piece, so this lands on the boundary
    let (n, off) = planes
        .iter()
        .min_by(|x, y| {
            (x.1 - x.0.dot(p))
                .abs()
                .total_cmp(&(y.1 - y.0.dot(p)).abs())
        })
        .expect("piece has faces");
    p.add(&n.scale(off - n.dot(p)))
}

/// Put coordinates exactly on axis-aligned face planes the point lies near.
fn snap_to_faces(mut p: Point, piece: &Polytope) -> Point {
    let scale = piece
        .vertices
        .iter()
        .map(|v| v.norm2().sqrt())
        .fold(1.0, f64::max);
    for f in &piece.faces {
        let (a, b, c) = (
            piece.vertices[f[0]],
            piece.vertices[f[1]],
            piece.vertices[f[2]],
        );
        for k in 0..3 {
            if a.c[k] == b.c[k] && b.c[k] == c.c[k] && (p.c[k] - a.c[k]).abs() < 1e-9 * scale {
                p.c[k] = a.c[k];
            }
        }
    }
    p
}

fn snap_to_edge(mut p: Point, a: &Point, b: &Point) -> Point {
    for k in 0..3 {
        if a.c[k] == b.c[k] {
            p.c[k] = a.c[k];
        }
    }
    p
}

/// Obstacles sharing a vertex with simplex `s`; walls contribute nothing.
pub fn simplex_adjacent_obstacles(t: &Triangulation, s: usize) -> Result<BTreeSet<u32>> {
    if s >= t.len() {
        return Err(Error::Input(format!("no simplex {s}")));
    }
    if let Some(o) = t.inside_obstacle(s) {
        return Err(Error::InsideObstacle(o));
    }
    Ok(t.simplex(s)
        .iter()
        .filter_map(|&v| t.provenance(v).obstacle)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new2(x, y)
    }

    #[test]
    fn unit_square_two_triangles() {
        let t = Triangulation::from_points(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap();
        assert_eq!(t.len(), 2);
        let shared: Vec<usize> = {
            let a = t.simplex_sets();
            a[0].iter().filter(|v| a[1].contains(v)).copied().collect()
        };
        assert_eq!(shared.len(), 2);
        // same diagonal regardless of insertion order
        let u = Triangulation::from_points(&[p(1., 1.), p(0., 1.), p(0., 0.), p(1., 0.)]).unwrap();
        let map = |t: &Triangulation| {
            let mut v: Vec<Vec<Vec<u64>>> = t
                .simplex_sets()
                .iter()
                .map(|s| {
                    let mut q: Vec<Vec<u64>> = s
                        .iter()
                        .map(|&i| t.points()[i].coords().iter().map(|c| c.to_bits()).collect())
                        .collect();
                    q.sort();
                    q
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(map(&t), map(&u));
    }

    #[test]
    fn square_with_center_fans() {
        let t =
            Triangulation::from_points(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.), p(0.5, 0.5)])
                .unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.simplex_sets().iter().all(|s| s.contains(&4)));
    }

    #[test]
    fn neighbors_are_symmetric() {
        let pts: Vec<Point> = (0..30)
            .map(|i| p((i * 7 % 13) as f64 + 0.1 * i as f64, (i * 5 % 11) as f64))
            .collect();
        let t = Triangulation::from_points(&pts).unwrap();
        for s in 0..t.len() {
            for k in 0..3 {
                if let Some(n) = t.neighbor(s, k) {
                    assert!(t.neighbors(n).contains(&Some(s)));
                }
            }
        }
    }

    #[test]
    fn collinear_prefix_is_deferred() {
        let t =
            Triangulation::from_points(&[p(0., 0.), p(1., 0.), p(2., 0.), p(3., 0.), p(1., 1.)])
                .unwrap();
        assert_eq!(t.len(), 3);
        assert!(Triangulation::from_points(&[p(0., 0.), p(1., 0.), p(2., 0.)]).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        assert!(Triangulation::from_points(&[p(0., 0.), p(1., 0.), p(0., 1.), p(1., 0.)]).is_err());
    }

    #[test]
    fn hull_facets_face_inward_positive() {
        let t =
            Triangulation::from_points(&[p(0., 0.), p(2., 0.), p(2., 2.), p(0., 2.), p(1., 0.7)])
                .unwrap();
        let c = p(1.0, 1.0);
        for f in t.hull_facets() {
            assert_eq!(
                orient_raw(&[t.points()[f[0]], t.points()[f[1]], c]),
                Sign::Positive
            );
        }
        assert_eq!(t.hull_facets().len(), 4);
    }

    #[test]
    fn cube_grid_3d() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    pts.push(Point::new3(i as f64, j as f64, k as f64));
                }
            }
        }
        let t = Triangulation::from_points(&pts).unwrap();
        let vol: f64 = (0..t.len())
            .map(|s| {
                let q = t.simplex_points(s);
                let (a, b, c) = (q[1].sub(&q[0]), q[2].sub(&q[0]), q[3].sub(&q[0]));
                crate::geom::cross(&a, &b).dot(&c).abs() / 6.0
            })
            .sum();
        assert!((vol - 8.0).abs() < 1e-9, "volume {vol}");
    }
}
