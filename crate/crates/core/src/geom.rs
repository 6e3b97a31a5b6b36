//! Exact geometric predicates and the small amount of geometry built on them.
//!
//! Orientation and in-sphere signs come from adaptive-precision arithmetic, so
//! the sign of every determinant is exact for the `f64` inputs. Everything the
//! triangulation decides combinatorially goes through these functions.
//!
//! Degenerate in-sphere configurations (cocircular / cospherical points) are
//! resolved by symbolic perturbation: point `i` is lifted by an infinitesimal
//! `eps_i`, and `eps` of a lexicographically smaller point dominates every
//! `eps` of a larger one. The resulting triangulation is the unique regular
//! triangulation of the perturbed lift, so it does not depend on insertion
//! order.

use std::cmp::Ordering;
use std::fmt;

use robust::{Coord, Coord3D};
use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point in the plane or in space.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    pub(crate) c: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point {
            c: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point {
            c: [x, y, z],
            dim: 3,
        }
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        let p = match coords.len() {
            2 => Point::new2(coords[0], coords[1]),
            3 => Point::new3(coords[0], coords[1], coords[2]),
            n => {
                return Err(Error::Input(format!(
                    "points need 2 or 3 coordinates, got {n}"
                )))
            }
        };
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    pub fn x(&self) -> f64 {
        self.c[0]
    }

    pub fn y(&self) -> f64 {
        self.c[1]
    }

    pub fn z(&self) -> f64 {
        self.c[2]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords().to_vec()
    }

    pub fn add(&self, o: &Point) -> Point {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Point) -> Point {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Point {
        let mut p = *self;
        for v in p.c.iter_mut() {
            *v *= s;
        }
        p
    }

    pub fn dot(&self, o: &Point) -> f64 {
        self.c.iter().zip(o.c.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn dist(&self, o: &Point) -> f64 {
        self.sub(o).norm2().sqrt()
    }

    pub fn lerp(&self, o: &Point, t: f64) -> Point {
        self.zip(o, |a, b| a + (b - a) * t)
    }

    /// Total lexicographic order on coordinates, used as the perturbation key.
    pub fn lex_cmp(&self, o: &Point) -> Ordering {
        for k in 0..3 {
            match self.c[k].total_cmp(&o.c[k]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    fn zip(&self, o: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        Point {
            c: [
                f(self.c[0], o.c[0]),
                f(self.c[1], o.c[1]),
                f(self.c[2], o.c[2]),
            ],
            dim: self.dim,
        }
    }

    fn c2(&self) -> Coord<f64> {
        Coord {
            x: self.c[0],
            y: self.c[1],
        }
    }

    fn c3(&self) -> Coord3D<f64> {
        Coord3D {
            x: self.c[0],
            y: self.c[1],
            z: self.c[2],
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

/// Accepts `[1.5, 2]` as well as `["1.5", "2"]`.
impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            F(f64),
            S(String),
        }

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 2 or 3 numbers or decimal strings")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Point, A::Error> {
                let mut out = Vec::with_capacity(3);
                while let Some(n) = seq.next_element::<Num>()? {
                    out.push(match n {
                        Num::F(v) => v,
                        Num::S(s) => s
                            .trim()
                            .parse::<f64>()
                            .map_err(|e| de::Error::custom(format!("bad coordinate {s:?}: {e}")))?,
                    });
                }
                Point::from_slice(&out).map_err(de::Error::custom)
            }
        }

        d.deserialize_seq(PointVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpherePosition {
    Inside,
    On,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

fn check_dims(pts: &[Point], count: usize) -> Result<usize> {
    let d = pts.first().map(|p| p.dim()).unwrap_or(0);
    if !(2..=3).contains(&d) {
        return Err(Error::Input(format!("unsupported dimension {d}")));
    }
    if let Some(p) = pts.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    let want = count + d;
    if pts.len() != want {
        return Err(Error::Input(format!(
            "expected {want} points, got {}",
            pts.len()
        )));
    }
    Ok(d)
}

/// Sign of `det[[p_i, 1]]`; positive for a counter-clockwise triangle.
pub fn orient(simplex: &[Point]) -> Result<Sign> {
    check_dims(simplex, 1)?;
    Ok(orient_raw(simplex))
}

/// Orientation without dimension checks; panics on mixed dimensions.
pub fn orient_raw(p: &[Point]) -> Sign {
    match p.len() {
        3 => Sign::of(robust::orient2d(p[0].c2(), p[1].c2(), p[2].c2())),
        4 => Sign::of(robust::orient3d(p[0].c3(), p[1].c3(), p[2].c3(), p[3].c3())),
        n => unreachable!("orientation of {n} points"),
    }
}

/// 2D orientation of three points of any dimension after dropping `axis`.
pub(crate) fn orient_projected(a: &Point, b: &Point, c: &Point, axis: usize) -> Sign {
    let (i, j) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let pr = |p: &Point| Coord {
        x: p.c[i],
        y: p.c[j],
    };
    Sign::of(robust::orient2d(pr(a), pr(b), pr(c)))
}

/// Sign of `det[[p_i, |p_i|^2, 1]]` over `d + 2` points.
pub(crate) fn lifted_raw(p: &[Point]) -> Sign {
    match p.len() {
        4 => Sign::of(robust::incircle(p[0].c2(), p[1].c2(), p[2].c2(), p[3].c2())),
        5 => Sign::of(robust::insphere(
            p[0].c3(),
            p[1].c3(),
            p[2].c3(),
            p[3].c3(),
            p[4].c3(),
        )),
        n => unreachable!("lifted determinant of {n} points"),
    }
}

/// Exact position of `query` relative to the circumsphere of `simplex`.
pub fn in_sphere(simplex: &[Point], query: &Point) -> Result<SpherePosition> {
    let d = check_dims(simplex, 1)?;
    if query.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: query.dim(),
        });
    }
    let o = orient_raw(simplex);
    if o == Sign::Zero {
        return Err(Error::Degenerate("in_sphere on a flat simplex".into()));
    }
    let mut all: Vec<Point> = simplex.to_vec();
    all.push(*query);
    let l = lifted_raw(&all);
    Ok(if l == Sign::Zero {
        SpherePosition::On
    } else if l == o {
        SpherePosition::Inside
    } else {
        SpherePosition::Outside
    })
}

/// Perturbed lifted determinant. A lexicographically smaller point carries
/// the dominant lift perturbation.
pub fn lifted_perturbed(p: &[Point]) -> Sign {
    let s = lifted_raw(p);
    if s != Sign::Zero {
        return s;
    }
    let d = p.len() - 2;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].lex_cmp(&p[b]));
    let mut rest = Vec::with_capacity(p.len() - 1);
    for i in order {
        rest.clear();
        rest.extend(
            p.iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, q)| *q),
        );
        let o = orient_raw(&rest);
        if o != Sign::Zero {
            // cofactor of the lift column: (-1)^(i + d) * orient(rest)
            return if (i + d).is_multiple_of(2) {
                o
            } else {
                o.flip()
            };
        }
    }
    Sign::Zero
}

/// Strict in-sphere test under the symbolic perturbation. `simplex` must be
/// non-degenerate.
pub fn in_sphere_perturbed(simplex: &[Point], query: &Point) -> bool {
    let o = orient_raw(simplex);
    debug_assert!(o != Sign::Zero);
    let mut all: Vec<Point> = simplex.to_vec();
    all.push(*query);
    lifted_perturbed(&all) == o
}

/// Axis to drop so that the triangle `a, b, c` stays non-degenerate in projection.
pub(crate) fn projection_axis(a: &Point, b: &Point, c: &Point) -> Option<usize> {
    (0..3)
        .rev()
        .find(|&k| orient_projected(a, b, c, k) != Sign::Zero)
}

/// For a 3D point `q` coplanar with triangle `tri`: is `q` strictly inside the
/// circumcircle of `tri` within their common plane, under the same lift
/// perturbation as [`in_sphere_perturbed`]?
pub(crate) fn in_circle_coplanar_perturbed(tri: &[Point; 3], q: &Point) -> bool {
    let axis = projection_axis(&tri[0], &tri[1], &tri[2]).expect("flat facet");
    let mut e = tri[0];
    e.c[axis] += 1.0;
    // any sphere through the triangle meets the plane in its circumcircle
    let o = orient_raw(&[tri[0], tri[1], tri[2], e]);
    let l = lifted_raw(&[tri[0], tri[1], tri[2], e, *q]);
    if l != Sign::Zero {
        return l == o;
    }
    let pts = [tri[0], tri[1], tri[2], *q];
    let of = orient_projected(&pts[0], &pts[1], &pts[2], axis);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| pts[a].lex_cmp(&pts[b]));
    for i in order {
        let r: Vec<&Point> = pts
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, p)| p)
            .collect();
        let s = orient_projected(r[0], r[1], r[2], axis);
        if s != Sign::Zero {
            let c = if i % 2 == 0 { s } else { s.flip() };
            return c == of;
        }
    }
    false
}

/// For collinear `a, b, q`: does `q` lie strictly between `a` and `b`?
pub(crate) fn strictly_between(a: &Point, b: &Point, q: &Point) -> bool {
    let k = (0..a.dim()).find(|&k| a.c[k] != b.c[k]).unwrap_or(0);
    let (lo, hi) = if a.c[k] < b.c[k] {
        (a.c[k], b.c[k])
    } else {
        (b.c[k], a.c[k])
    };
    lo < q.c[k] && q.c[k] < hi
}

/// A convex or simple polytope. In 2D `vertices` run counter-clockwise and
/// `faces` is empty; in 3D `faces` are outward-oriented triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<[usize; 3]>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.vertices.first().map(|p| p.dim()).unwrap_or(2)
    }

    /// Polygon from vertices in either winding; stored counter-clockwise.
    pub fn polygon(mut vertices: Vec<Point>) -> Result<Polytope> {
        if vertices.len() < 3 {
            return Err(Error::Input("a polygon needs at least 3 vertices".into()));
        }
        if signed_area2(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(Polytope {
            vertices,
            faces: Vec::new(),
        })
    }

    /// Edges of a 2D polygon or of a 3D face set (each undirected edge once).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        if self.faces.is_empty() {
            let n = self.vertices.len();
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        } else {
            let mut e: Vec<(usize, usize)> = self
                .faces
                .iter()
                .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            e.sort_unstable();
            e.dedup();
            e
        }
    }

    pub fn is_convex(&self) -> bool {
        if self.dim() == 3 {
            return true;
        }
        let n = self.vertices.len();
        (0..n).all(|i| {
            let v = &self.vertices;
            orient_raw(&[v[i], v[(i + 1) % n], v[(i + 2) % n]]) != Sign::Negative
        })
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let mut c = self.vertices[0].scale(0.0);
        for v in &self.vertices {
            c = c.add(v);
        }
        c.scale(1.0 / n)
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for k in 0..3 {
                lo.c[k] = lo.c[k].min(v.c[k]);
                hi.c[k] = hi.c[k].max(v.c[k]);
            }
        }
        (lo, hi)
    }
}

fn signed_area2(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x() * b.y() - b.x() * a.y()
        })
        .sum()
}

/// Smallest convex polytope containing `points`; its vertices are the
/// extreme input points.
pub fn convex_hull(points: &[Point]) -> Result<Polytope> {
    let d = points
        .first()
        .map(|p| p.dim())
        .ok_or_else(|| Error::Degenerate("no points".into()))?;
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    match d {
        2 => hull2(points),
        3 => hull3(points),
        _ => Err(Error::Input(format!("unsupported dimension {d}"))),
    }
}

fn hull2(points: &[Point]) -> Result<Polytope> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than 3 distinct points".into()));
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orient_raw(&[lower[lower.len() - 2], lower[lower.len() - 1], *p]) != Sign::Positive
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient_raw(&[upper[upper.len() - 2], upper[upper.len() - 1], *p]) != Sign::Positive
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    Ok(Polytope {
        vertices: lower,
        faces: Vec::new(),
    })
}

fn hull3(points: &[Point]) -> Result<Polytope> {
    use crate::delaunay::Triangulation;
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    let t = Triangulation::from_points(&pts)?;
    let mut on_hull: Vec<usize> = t.hull_facets().iter().flatten().copied().collect();
    on_hull.sort_unstable();
    on_hull.dedup();
    // drop points lying in the hull of the remaining candidates
    let mut extreme = Vec::new();
    for &v in &on_hull {
        let others: Vec<Point> = on_hull
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| t.points()[u])
            .collect();
        let inside = match Triangulation::from_points(&others) {
            Ok(o) => o.locate_closed(&t.points()[v]).is_some(),
            Err(_) => false,
        };
        if !inside {
            extreme.push(t.points()[v]);
        }
    }
    let h = Triangulation::from_points(&extreme)?;
    let faces = h
        .hull_facets()
        .into_iter()
        .map(|f| [f[0], f[1], f[2]])
        .collect();
    Ok(Polytope {
        vertices: h.points().to_vec(),
        faces,
    })
}

/// Classify `p` against a simple polygon (2D) or a convex polytope (3D).
pub fn point_in_polytope(p: &Point, poly: &Polytope) -> Result<Location> {
    let d = poly.dim();
    if p.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    Ok(if d == 2 {
        in_polygon(p, &poly.vertices)
    } else {
        in_convex3(p, poly)
    })
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    orient_raw(&[*a, *b, *p]) == Sign::Zero
        && p.x() >= a.x().min(b.x())
        && p.x() <= a.x().max(b.x())
        && p.y() >= a.y().min(b.y())
        && p.y() <= a.y().max(b.y())
}

fn in_polygon(p: &Point, v: &[Point]) -> Location {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if on_segment(&a, &b, p) {
            return Location::Boundary;
        }
        // half-open rule on y; the orientation decides the side exactly
        if (a.y() > p.y()) != (b.y() > p.y()) {
            let o = orient_raw(&[a, b, *p]);
            let upward = b.y() > a.y();
            if (upward && o == Sign::Positive) || (!upward && o == Sign::Negative) {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Interior
    } else {
        Location::Exterior
    }
}

fn in_convex3(p: &Point, poly: &Polytope) -> Location {
    let mut boundary = false;
    for f in &poly.faces {
        let (a, b, c) = (
            poly.vertices[f[0]],
            poly.vertices[f[1]],
            poly.vertices[f[2]],
        );
        // outward faces: interior points see the face clockwise
        match orient_raw(&[a, b, c, *p]) {
            Sign::Positive => {}
            Sign::Zero => boundary = true,
            Sign::Negative => return Location::Exterior,
        }
    }
    if boundary {
        Location::Boundary
    } else {
        Location::Interior
    }
}

/// Do the closed segments `ab` and `cd` intersect? (2D, exact)
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient_raw(&[*a, *b, *c]);
    let o2 = orient_raw(&[*a, *b, *d]);
    let o3 = orient_raw(&[*c, *d, *a]);
    let o4 = orient_raw(&[*c, *d, *b]);
    if o1 != o2
        && o3 != o4
        && o1 != Sign::Zero
        && o2 != Sign::Zero
        && o3 != Sign::Zero
        && o4 != Sign::Zero
    {
        return true;
    }
    (o1 == Sign::Zero && on_segment(a, b, c))
        || (o2 == Sign::Zero && on_segment(a, b, d))
        || (o3 == Sign::Zero && on_segment(c, d, a))
        || (o4 == Sign::Zero && on_segment(c, d, b))
}

pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b.sub(a);
    let l2 = ab.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(&ab) / l2).clamp(0.0, 1.0);
    p.dist(&a.lerp(b, t))
}

/// Distance between two 2D segments (zero when they intersect).
pub fn segment_segment_distance(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Distance from a 2D segment to a closed polygon (zero on contact or overlap).
pub fn segment_polygon_distance(a: &Point, b: &Point, poly: &Polytope) -> f64 {
    if point_in_polytope(a, poly)
        .map(|l| l != Location::Exterior)
        .unwrap_or(false)
    {
        return 0.0;
    }
    let v = &poly.vertices;
    let n = v.len();
    (0..n)
        .map(|i| segment_segment_distance(a, b, &v[i], &v[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Distance between two closed 2D polygons.
pub fn polygon_distance(p: &Polytope, q: &Polytope) -> f64 {
    let (vp, vq) = (&p.vertices, &q.vertices);
    let mut best = f64::INFINITY;
    for i in 0..vp.len() {
        best = best.min(segment_polygon_distance(&vp[i], &vp[(i + 1) % vp.len()], q));
    }
    for j in 0..vq.len() {
        best = best.min(segment_polygon_distance(&vq[j], &vq[(j + 1) % vq.len()], p));
    }
    best
}

/// Distance from a point to a convex 3D polytope (zero inside).
pub fn point_convex3_distance(p: &Point, poly: &Polytope) -> f64 {
    if in_convex3(p, poly) != Location::Exterior {
        return 0.0;
    }
    poly.faces
        .iter()
        .map(|f| {
            point_triangle_distance(
                p,
                &poly.vertices[f[0]],
                &poly.vertices[f[1]],
                &poly.vertices[f[2]],
            )
        })
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    Point::new3(
        a.y() * b.z() - a.z() * b.y(),
        a.z() * b.x() - a.x() * b.z(),
        a.x() * b.y() - a.y() * b.x(),
    )
}

pub fn point_triangle_distance(p: &Point, a: &Point, b: &Point, c: &Point) -> f64 {
    let n = cross(&b.sub(a), &c.sub(a));
    let n2 = n.norm2();
    if n2 > 0.0 {
        let t = p.sub(a).dot(&n) / n2;
        let proj = p.sub(&n.scale(t));
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(u, v)| cross(&v.sub(u), &proj.sub(u)).dot(&n) >= 0.0);
        if inside {
            return p.dist(&proj);
        }
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, c, a))
}

/// Segment against a convex 3D polytope, clipped against the face planes.
pub fn segment_hits_convex3(a: &Point, b: &Point, poly: &Polytope, inflate: f64) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let dir = b.sub(a);
    for f in &poly.faces {
        let (p0, p1, p2) = (
            poly.vertices[f[0]],
            poly.vertices[f[1]],
            poly.vertices[f[2]],
        );
        // outward normal
        let n = cross(&p1.sub(&p0), &p2.sub(&p0));
        let len = n.norm2().sqrt();
        if len == 0.0 {
            continue;
        }
        let n = n.scale(-1.0 / len);
        let off = n.dot(&p0) + inflate;
        let num = off - n.dot(a);
        let den = n.dot(&dir);
        if den == 0.0 {
            if num < 0.0 {
                return false;
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
