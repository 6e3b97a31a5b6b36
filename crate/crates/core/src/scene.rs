//! Workspace scenes: an axis-aligned box with polytope obstacles.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    convex_hull, cross, point_in_polytope, point_segment_distance, point_triangle_distance,
    polygon_distance, segments_intersect, Location, Point, Polytope, Sign,
};

pub const SCHEMA_VERSION: u32 = 1;

/// One obstacle. A 2D obstacle is a simple polygon (or several convex
/// pieces); a 3D obstacle is one or more convex polytopes sharing the id.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle {
    pub id: u32,
    pub pieces: Vec<Polytope>,
}

impl Obstacle {
    pub fn polygon(id: u32, vertices: &[(f64, f64)]) -> Result<Self> {
        let v = vertices.iter().map(|&(x, y)| Point::new2(x, y)).collect();
        Ok(Obstacle {
            id,
            pieces: vec![Polytope::polygon(v)?],
        })
    }

    pub fn convex3(id: u32, vertices: &[Point]) -> Result<Self> {
        Ok(Obstacle {
            id,
            pieces: vec![convex_piece3(vertices)?],
        })
    }

    /// Axis-aligned box, 2D or 3D depending on the corner dimension.
    pub fn aabb(id: u32, lo: &[f64], hi: &[f64]) -> Result<Self> {
        match lo.len() {
            2 => Obstacle::polygon(
                id,
                &[
                    (lo[0], lo[1]),
                    (hi[0], lo[1]),
                    (hi[0], hi[1]),
                    (lo[0], hi[1]),
                ],
            ),
            3 => {
                let mut v = Vec::with_capacity(8);
                for &x in &[lo[0], hi[0]] {
                    for &y in &[lo[1], hi[1]] {
                        for &z in &[lo[2], hi[2]] {
                            v.push(Point::new3(x, y, z));
                        }
                    }
                }
                Obstacle::convex3(id, &v)
            }
            n => Err(Error::Input(format!("box corner of dimension {n}"))),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Point> {
        self.pieces.iter().flat_map(|p| p.vertices.iter())
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        self.pieces.iter().any(|q| {
            point_in_polytope(p, q)
                .map(|l| l != Location::Exterior)
                .unwrap_or(false)
        })
    }

    pub fn contains_interior(&self, p: &Point) -> bool {
        self.pieces.iter().any(|q| {
            point_in_polytope(p, q)
                .map(|l| l == Location::Interior)
                .unwrap_or(false)
        })
    }

    pub fn map_vertices(&self, mut f: impl FnMut(&Point) -> Point) -> Result<Obstacle> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let v: Vec<Point> = p.vertices.iter().map(&mut f).collect();
            pieces.push(if p.dim() == 2 {
                Polytope::polygon(v)?
            } else {
                convex_piece3(&v)?
            });
        }
        Ok(Obstacle {
            id: self.id,
            pieces,
        })
    }
}

fn convex_piece3(vertices: &[Point]) -> Result<Polytope> {
    let h = convex_hull(vertices)?;
    for v in vertices {
        if point_in_polytope(v, &h)? == Location::Interior {
            return Err(Error::Validation(
                "3D obstacles must be convex; split concave ones into convex_pieces".into(),
            ));
        }
    }
    Ok(h)
}

/// An axis-aligned workspace with obstacles whose ids are 1..=N.
#[derive(Clone, Debug)]
pub struct Scene {
    dim: usize,
    lo: Point,
    hi: Point,
    obstacles: Vec<Obstacle>,
    pub annotations: serde_json::Value,
}

impl Scene {
    pub fn new(lo: Point, hi: Point, mut obstacles: Vec<Obstacle>) -> Result<Self> {
        let dim = lo.dim();
        if hi.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: hi.dim(),
            });
        }
        obstacles.sort_by_key(|o| o.id);
        let s = Scene {
            dim,
            lo,
            hi,
            obstacles,
            annotations: serde_json::Value::Null,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> (Point, Point) {
        (self.lo, self.hi)
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn obstacle(&self, id: u32) -> Option<&Obstacle> {
        id.checked_sub(1)
            .and_then(|i| self.obstacles.get(i as usize))
    }

    pub fn n_obstacles(&self) -> usize {
        self.obstacles.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for k in 0..d {
            if self.lo.coords()[k].partial_cmp(&self.hi.coords()[k])
                != Some(std::cmp::Ordering::Less)
            {
                return Err(Error::Validation(format!(
                    "empty workspace extent on axis {k}"
                )));
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if o.id as usize != i + 1 {
                return Err(Error::Validation(format!(
                    "obstacle ids must be dense 1..{}; found id {} at position {}",
                    self.obstacles.len(),
                    o.id,
                    i + 1
                )));
            }
            if o.pieces.is_empty() {
                return Err(Error::Validation(format!(
                    "obstacle {} has no geometry",
                    o.id
                )));
            }
            for v in o.vertices() {
                if v.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: v.dim(),
                    });
                }
                if !self.in_bounds(v) {
                    return Err(Error::Validation(format!(
                        "obstacle {} vertex {v:?} outside the workspace",
                        o.id
                    )));
                }
            }
            if d == 2 {
                for p in &o.pieces {
                    check_simple(o.id, p)?;
                }
            }
        }
        for a in 0..self.obstacles.len() {
            for b in a + 1..self.obstacles.len() {
                let (oa, ob) = (&self.obstacles[a], &self.obstacles[b]);
                for pa in &oa.pieces {
                    for pb in &ob.pieces {
                        if piece_distance(pa, pb) <= 0.0 {
                            return Err(Error::Validation(format!(
                                "obstacles {} and {} overlap or touch",
                                oa.id, ob.id
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Closed bounds test.
    pub fn in_bounds(&self, p: &Point) -> bool {
        (0..self.dim)
            .all(|k| p.coords()[k] >= self.lo.coords()[k] && p.coords()[k] <= self.hi.coords()[k])
    }

    /// Obstacle whose closure contains `p`.
    pub fn obstacle_at(&self, p: &Point) -> Option<u32> {
        self.obstacles.iter().find(|o| o.contains(p)).map(|o| o.id)
    }

    /// Inside the workspace and outside every closed obstacle.
    pub fn is_free(&self, p: &Point) -> bool {
        self.in_bounds(p) && self.obstacle_at(p).is_none()
    }

    /// Wall bitmask of `p`: bit `2k` for the min side of axis `k`, `2k + 1` for the max side.
    pub fn wall_mask(&self, p: &Point) -> u8 {
        let mut m = 0u8;
        for k in 0..self.dim {
            if p.coords()[k] == self.lo.coords()[k] {
                m |= 1 << (2 * k);
            }
            if p.coords()[k] == self.hi.coords()[k] {
                m |= 1 << (2 * k + 1);
            }
        }
        m
    }

    /// The 2^d workspace corners.
    pub fn corners(&self) -> Vec<Point> {
        let (lo, hi) = (self.lo.coords(), self.hi.coords());
        (0..1usize << self.dim)
            .map(|m| {
                let c: Vec<f64> = (0..self.dim)
                    .map(|k| if m >> k & 1 == 0 { lo[k] } else { hi[k] })
                    .collect();
                Point::from_slice(&c).expect("2 or 3 coordinates")
            })
            .collect()
    }

    /// Smallest gap between two obstacles; with fewer than two obstacles,
    /// the smallest positive gap between an obstacle and a wall.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..self.obstacles.len() {
            for b in a + 1..self.obstacles.len() {
                for pa in &self.obstacles[a].pieces {
                    for pb in &self.obstacles[b].pieces {
                        best = best.min(piece_distance(pa, pb));
                    }
                }
            }
        }
        if best.is_finite() {
            return best;
        }
        for o in &self.obstacles {
            for k in 0..self.dim {
                let lo = o
                    .vertices()
                    .map(|v| v.coords()[k])
                    .fold(f64::INFINITY, f64::min);
                let hi = o
                    .vertices()
                    .map(|v| v.coords()[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                for g in [lo - self.lo.coords()[k], self.hi.coords()[k] - hi] {
                    if g > 0.0 {
                        best = best.min(g);
                    }
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            1.0
        }
    }

    /// Same scene with every obstacle vertex mapped through `f`.
    pub fn map_vertices(&self, mut f: impl FnMut(&Point) -> Point) -> Result<Scene> {
        let obs = self
            .obstacles
            .iter()
            .map(|o| o.map_vertices(&mut f))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Scene::new(self.lo, self.hi, obs)?;
        s.annotations = self.annotations.clone();
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Scene> {
        let f: SceneFile = serde_json::from_str(text).map_err(|e| {
            Error::Input(format!(
                "scene line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        f.into_scene()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Scene> {
        Scene::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_format(&self) -> SceneFile {
        SceneFile {
            schema_version: Some(SCHEMA_VERSION),
            dimension: self.dim,
            bounds: BoundsFile {
                min: self.lo.to_vec(),
                max: self.hi.to_vec(),
            },
            obstacles: self
                .obstacles
                .iter()
                .map(|o| {
                    if o.pieces.len() == 1 {
                        ObstacleFile {
                            id: o.id,
                            vertices: o.pieces[0].vertices.clone(),
                            faces: o.pieces[0].faces.iter().map(|f| f.to_vec()).collect(),
                            convex_pieces: Vec::new(),
                        }
                    } else {
                        ObstacleFile {
                            id: o.id,
                            vertices: Vec::new(),
                            faces: Vec::new(),
                            convex_pieces: o.pieces.iter().map(|p| p.vertices.clone()).collect(),
                        }
                    }
                })
                .collect(),
            annotations: self.annotations.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("scene serializes")
    }
}

fn check_simple(id: u32, p: &Polytope) -> Result<()> {
    let v = &p.vertices;
    let n = v.len();
    let area2: f64 = (0..n)
        .map(|i| v[i].x() * v[(i + 1) % n].y() - v[(i + 1) % n].x() * v[i].y())
        .sum();
    if area2 == 0.0 {
        return Err(Error::Validation(format!("obstacle {id} has zero area")));
    }
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a.coords() == b.coords() {
            return Err(Error::Validation(format!(
                "obstacle {id} repeats vertex {a:?}"
            )));
        }
        for j in i + 1..n {
            let (c, e) = (v[j], v[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // neighbours share one endpoint; folding back onto each other is not simple
                let shared = if j == i + 1 { b } else { a };
                let (far1, far2) = if j == i + 1 { (a, e) } else { (b, c) };
                if crate::geom::orient_raw(&[far1, shared, far2]) == Sign::Zero
                    && far1.sub(&shared).dot(&far2.sub(&shared)) > 0.0
                {
                    return Err(Error::Validation(format!(
                        "obstacle {id} folds back at {shared:?}"
                    )));
                }
            } else if segments_intersect(&a, &b, &c, &e) {
                return Err(Error::Validation(format!(
                    "obstacle {id} is self-intersecting"
                )));
            }
        }
    }
    Ok(())
}

/// Distance between two closed pieces of the same dimension (0 on contact).
pub fn piece_distance(a: &Polytope, b: &Polytope) -> f64 {
    if a.dim() == 2 {
        return polygon_distance(a, b);
    }
    if convex3_overlap(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in [(a, b), (b, a)] {
        for v in &p.vertices {
            for f in &q.faces {
                best = best.min(point_triangle_distance(
                    v,
                    &q.vertices[f[0]],
                    &q.vertices[f[1]],
                    &q.vertices[f[2]],
                ));
            }
        }
    }
    for (i, j) in a.edges() {
        for (k, l) in b.edges() {
            best = best.min(segment_distance3(
                &a.vertices[i],
                &a.vertices[j],
                &b.vertices[k],
                &b.vertices[l],
            ));
        }
    }
    best
}

/// Closed convex 3D polytopes intersect (touching counts), by separating axes.
pub fn convex3_overlap(a: &Polytope, b: &Polytope) -> bool {
    separation_depth(&a.vertices, &a.faces, &b.vertices, &b.faces) >= 0.0
}

/// Largest gap over candidate separating axes, negated: positive values are
/// the penetration depth along the best axis, negative ones a strict gap.
pub(crate) fn separation_depth(
    va: &[Point],
    fa: &[[usize; 3]],
    vb: &[Point],
    fb: &[[usize; 3]],
) -> f64 {
    let mut axes: Vec<Point> = Vec::new();
    for (v, f) in [(va, fa), (vb, fb)] {
        for t in f {
            axes.push(cross(&v[t[1]].sub(&v[t[0]]), &v[t[2]].sub(&v[t[0]])));
        }
    }
    let ea = edge_dirs(va, fa);
    let eb = edge_dirs(vb, fb);
    for x in &ea {
        for y in &eb {
            axes.push(cross(x, y));
        }
    }
    let mut depth = f64::INFINITY;
    for ax in axes {
        let l = ax.norm2().sqrt();
        if l < 1e-300 {
            continue;
        }
        let ax = ax.scale(1.0 / l);
        let (a0, a1) = project(va, &ax);
        let (b0, b1) = project(vb, &ax);
        depth = depth.min(a1.min(b1) - a0.max(b0));
    }
    depth
}

fn edge_dirs(v: &[Point], f: &[[usize; 3]]) -> Vec<Point> {
    let mut e: Vec<(usize, usize)> = f
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    e.sort_unstable();
    e.dedup();
    e.into_iter().map(|(a, b)| v[b].sub(&v[a])).collect()
}

fn project(v: &[Point], ax: &Point) -> (f64, f64) {
    v.iter()
        .map(|p| p.dot(ax))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

/// Distance between two segments in 3D.
pub fn segment_distance3(p1: &Point, q1: &Point, p2: &Point, q2: &Point) -> f64 {
    let d1 = q1.sub(p1);
    let d2 = q2.sub(p2);
    let r = p1.sub(p2);
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    if a == 0.0 {
        return point_segment_distance(p1, p2, q2);
    }
    if e == 0.0 {
        return point_segment_distance(p2, p1, q1);
    }
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let den = a * e - b * b;
    let mut s = if den > 0.0 {
        ((b * f - c * e) / den).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    p1.add(&d1.scale(s)).dist(&p2.add(&d2.scale(t)))
}

/// On-disk scene format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub dimension: usize,
    pub bounds: BoundsFile,
    #[serde(default)]
    pub obstacles: Vec<ObstacleFile>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub annotations: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleFile {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convex_pieces: Vec<Vec<Point>>,
}

impl SceneFile {
    pub fn into_scene(self) -> Result<Scene> {
        let d = self.dimension;
        if !(2..=3).contains(&d) {
            return Err(Error::Input(format!("dimension must be 2 or 3, got {d}")));
        }
        if let Some(v) = self.schema_version {
            if v > SCHEMA_VERSION {
                return Err(Error::Input(format!("unsupported schema_version {v}")));
            }
        }
        if self.bounds.min.len() != d || self.bounds.max.len() != d {
            return Err(Error::Input(format!("bounds must have {d} coordinates")));
        }
        let lo = Point::from_slice(&self.bounds.min)?;
        let hi = Point::from_slice(&self.bounds.max)?;
        let mut obs = Vec::with_capacity(self.obstacles.len());
        for o in self.obstacles {
            let all = o.vertices.iter().chain(o.convex_pieces.iter().flatten());
            for v in all {
                if v.dim() != d {
                    return Err(Error::Input(format!(
                        "obstacle {} has a vertex of dimension {}",
                        o.id,
                        v.dim()
                    )));
                }
            }
            let pieces = match (o.vertices.is_empty(), o.convex_pieces.is_empty()) {
                (false, true) => {
                    for f in &o.faces {
                        if f.len() != 3 || f.iter().any(|&i| i >= o.vertices.len()) {
                            return Err(Error::Input(format!(
                                "obstacle {} has an invalid face {f:?}",
                                o.id
                            )));
                        }
                    }
                    if d == 2 {
                        vec![Polytope::polygon(o.vertices)?]
                    } else {
                        vec![convex_piece3(&o.vertices)?]
                    }
                }
                (true, false) => o
                    .convex_pieces
                    .into_iter()
                    .map(|v| {
                        let p = if d == 2 {
                            Polytope::polygon(v)?
                        } else {
                            convex_piece3(&v)?
                        };
                        if !p.is_convex() {
                            return Err(Error::Validation(format!(
                                "obstacle {} has a non-convex piece",
                                o.id
                            )));
                        }
                        Ok(p)
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => {
                    return Err(Error::Input(format!(
                        "obstacle {} needs exactly one of vertices or convex_pieces",
                        o.id
                    )))
                }
            };
            obs.push(Obstacle { id: o.id, pieces });
        }
        let mut s = Scene::new(lo, hi, obs)?;
        s.annotations = self.annotations;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_squares() -> Scene {
        Scene::new(
            Point::new2(-1., -1.),
            Point::new2(5., 5.),
            vec![
                Obstacle::aabb(1, &[0., 0.], &[1., 1.]).unwrap(),
                Obstacle::aabb(2, &[3., 0.], &[4., 1.]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip() {
        let s = two_squares();
        let t = Scene::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(t.obstacles(), s.obstacles());
        assert_eq!(t.min_separation(), 2.0);
    }

    #[test]
    fn rejects_overlap_and_sparse_ids() {
        let lo = Point::new2(0., 0.);
        let hi = Point::new2(10., 10.);
        let a = Obstacle::aabb(1, &[1., 1.], &[3., 3.]).unwrap();
        let b = Obstacle::aabb(2, &[2., 2.], &[4., 4.]).unwrap();
        assert!(matches!(
            Scene::new(lo, hi, vec![a.clone(), b]),
            Err(Error::Validation(_))
        ));
        let c = Obstacle::aabb(3, &[6., 6.], &[7., 7.]).unwrap();
        assert!(matches!(
            Scene::new(lo, hi, vec![a, c]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn rejects_nested_polygons() {
        let a = Obstacle::aabb(1, &[1., 1.], &[8., 8.]).unwrap();
        let b = Obstacle::aabb(2, &[3., 3.], &[4., 4.]).unwrap();
        assert!(Scene::new(Point::new2(0., 0.), Point::new2(10., 10.), vec![a, b]).is_err());
    }

    #[test]
    fn malformed_json_is_input_error() {
        let e = Scene::from_json_str("{\"dimension\": 2,\n \"bounds\": }").unwrap_err();
        assert!(
            matches!(e, Error::Input(ref m) if m.contains("line 2")),
            "{e}"
        );
        let e = Scene::from_json_str(r#"{"dimension": 4, "bounds": {"min": [0], "max": [1]}}"#)
            .unwrap_err();
        assert!(matches!(e, Error::Input(_)));
    }

    #[test]
    fn string_coordinates_accepted() {
        let s = Scene::from_json_str(
            r#"{"dimension": 2, "bounds": {"min": [0, 0], "max": [4, 4]},
                "obstacles": [{"id": 1, "vertices": [["1.0", "1"], [2, 1], [2, 2], [1, "2.0"]]}]}"#,
        )
        .unwrap();
        assert!(s.obstacle_at(&Point::new2(1.5, 1.5)).is_some());
        assert!(s.is_free(&Point::new2(3., 3.)));
    }

    #[test]
    fn convex_3d_required() {
        let mut v: Vec<Point> = Obstacle::aabb(1, &[1., 1., 1.], &[2., 2., 2.])
            .unwrap()
            .pieces[0]
            .vertices
            .clone();
        v.push(Point::new3(1.5, 1.5, 1.5));
        assert!(Obstacle::convex3(1, &v).is_err());
    }

    #[test]
    fn boxes_3d_separation() {
        let a = Obstacle::aabb(1, &[0., 0., 0.], &[1., 1., 1.]).unwrap();
        let b = Obstacle::aabb(2, &[1.5, 0., 0.], &[2., 1., 1.]).unwrap();
        let d = piece_distance(&a.pieces[0], &b.pieces[0]);
        assert!((d - 0.5).abs() < 1e-12, "{d}");
        let c = Obstacle::aabb(2, &[0.5, 0.5, 0.5], &[2., 2., 2.]).unwrap();
        assert_eq!(piece_distance(&a.pieces[0], &c.pieces[0]), 0.0);
    }

    #[test]
    fn wall_masks_and_corners() {
        let s = two_squares();
        assert_eq!(s.corners().len(), 4);
        assert_eq!(s.wall_mask(&Point::new2(-1., -1.)), 0b0101);
        assert_eq!(s.wall_mask(&Point::new2(5., 2.)), 0b0010);
        assert_eq!(s.wall_mask(&Point::new2(2., 2.)), 0);
    }
}
