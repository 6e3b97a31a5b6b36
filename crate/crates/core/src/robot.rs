//! Robot key points, rigid links and their chain decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{segment_hits_convex3, segment_polygon_distance, Point};
use crate::scene::Scene;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub a: String,
    pub b: String,
    pub length: f64,
}

/// Robot description as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub key_points: Vec<String>,
    #[serde(default)]
    pub links: Vec<Link>,
    #[serde(default)]
    pub link_width: f64,
    /// Per-link `[lo, hi]` bounds on the angle relative to the previous link
    /// of its chain (absolute for a chain's first link), radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_limits: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub reconfigurable: bool,
}

impl RobotSpec {
    pub fn point() -> Self {
        RobotSpec {
            schema_version: None,
            key_points: vec!["p".into()],
            links: Vec::new(),
            link_width: 0.0,
            joint_limits: None,
            reconfigurable: false,
        }
    }

    /// Serial chain `q0 - q1 - ... - qn` with the given link lengths.
    pub fn serial(lengths: &[f64], link_width: f64) -> Self {
        let key_points: Vec<String> = (0..=lengths.len()).map(|i| format!("q{i}")).collect();
        let links = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| Link {
                a: key_points[i].clone(),
                b: key_points[i + 1].clone(),
                length: l,
            })
            .collect();
        RobotSpec {
            schema_version: None,
            key_points,
            links,
            link_width,
            joint_limits: None,
            reconfigurable: false,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Input(format!(
                "robot line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.key_points.iter().position(|k| k == name)
    }

    pub fn n_key_points(&self) -> usize {
        self.key_points.len()
    }
}

/// A maximal path (open) or cycle (closed) of links.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    /// Key points in order; a closed chain does not repeat its first point.
    pub vertices: Vec<usize>,
    /// Link indices in order.
    pub links: Vec<usize>,
    pub closed: bool,
}

/// The robot's structural complex: key points, links and chains.
#[derive(Clone, Debug, Serialize)]
pub struct RobotComplex {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub lengths: Vec<f64>,
    pub chains: Vec<Chain>,
    pub link_width: f64,
}

impl RobotComplex {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// Key points adjacent to `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(x, y)| {
                if x == v {
                    Some(y)
                } else if y == v {
                    Some(x)
                } else {
                    None
                }
            })
            .collect()
    }

    /// The single open chain covering every key point, if the robot is one.
    pub fn as_serial(&self) -> Option<&Chain> {
        match self.chains.as_slice() {
            [c] if !c.closed && c.vertices.len() == self.n_vertices => Some(c),
            _ => None,
        }
    }

    /// Identity used to refuse comparing representations across robots.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.n_vertices.hash(&mut h);
        self.edges.hash(&mut h);
        for l in &self.lengths {
            l.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

pub fn build_complex(spec: &RobotSpec) -> Result<RobotComplex> {
    if spec.reconfigurable {
        return Err(Error::Robot(
            "reconfigurable robots are not supported".into(),
        ));
    }
    let n = spec.key_points.len();
    if n == 0 {
        return Err(Error::Robot("no key points".into()));
    }
    let names: BTreeSet<&String> = spec.key_points.iter().collect();
    if names.len() != n {
        return Err(Error::Robot("duplicate key point names".into()));
    }
    if !(spec.link_width >= 0.0 && spec.link_width.is_finite()) {
        return Err(Error::Robot(
            "link_width must be finite and non-negative".into(),
        ));
    }
    let mut edges = Vec::with_capacity(spec.links.len());
    let mut lengths = Vec::with_capacity(spec.links.len());
    for l in &spec.links {
        let a = spec
            .index_of(&l.a)
            .ok_or_else(|| Error::Robot(format!("unknown key point {}", l.a)))?;
        let b = spec
            .index_of(&l.b)
            .ok_or_else(|| Error::Robot(format!("unknown key point {}", l.b)))?;
        if a == b {
            return Err(Error::Robot(format!("link from {} to itself", l.a)));
        }
        if !(l.length > 0.0 && l.length.is_finite()) {
            return Err(Error::Robot(format!(
                "link {}-{} must have positive length",
                l.a, l.b
            )));
        }
        edges.push((a, b));
        lengths.push(l.length);
    }
    if let Some(lim) = &spec.joint_limits {
        if lim.len() != edges.len()
            || lim
                .iter()
                .any(|r| r[0].partial_cmp(&r[1]).is_none_or(|o| o.is_gt()))
        {
            return Err(Error::Robot(
                "joint_limits needs one [lo, hi] range per link".into(),
            ));
        }
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    // connectivity
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Robot("link graph is disconnected".into()));
    }
    let chains = decompose(n, &edges, &adj);
    Ok(RobotComplex {
        n_vertices: n,
        edges,
        lengths,
        chains,
        link_width: spec.link_width,
    })
}

fn decompose(n: usize, edges: &[(usize, usize)], adj: &[Vec<(usize, usize)>]) -> Vec<Chain> {
    let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut used = vec![false; edges.len()];
    let mut chains = Vec::new();
    let walk = |start: usize, first: (usize, usize), used: &mut Vec<bool>| -> Chain {
        let mut vertices = vec![start];
        let mut links = Vec::new();
        let (mut v, mut e) = first;
        loop {
            used[e] = true;
            links.push(e);
            if v == start {
                return Chain {
                    vertices,
                    links,
                    closed: true,
                };
            }
            vertices.push(v);
            if deg[v] != 2 {
                return Chain {
                    vertices,
                    links,
                    closed: false,
                };
            }
            let next = adj[v].iter().copied().find(|&(_, f)| !used[f]);
            match next {
                Some((w, f)) => {
                    v = w;
                    e = f;
                }
                None => {
                    return Chain {
                        vertices,
                        links,
                        closed: false,
                    }
                }
            }
        }
    };
    for s in 0..n {
        if deg[s] == 2 {
            continue;
        }
        for &(w, e) in &adj[s] {
            if !used[e] {
                chains.push(walk(s, (w, e), &mut used));
            }
        }
    }
    // components made only of degree-2 vertices are cycles
    for (s, list) in adj.iter().enumerate() {
        for &(w, e) in list {
            if !used[e] {
                chains.push(walk(s, (w, e), &mut used));
            }
        }
    }
    chains
}

/// Positions of a planar chain from its base and absolute link angles.
pub fn pose_from_angles(base: Point, lengths: &[f64], angles: &[f64]) -> Result<Vec<Point>> {
    if base.dim() != 2 {
        return Err(Error::Unsupported("chain poses are planar only".into()));
    }
    if angles.len() != lengths.len() {
        return Err(Error::Robot(format!(
            "{} angles for {} links",
            angles.len(),
            lengths.len()
        )));
    }
    let mut out = Vec::with_capacity(lengths.len() + 1);
    out.push(base);
    let mut p = base;
    for (l, a) in lengths.iter().zip(angles) {
        p = Point::new2(p.x() + l * a.cos(), p.y() + l * a.sin());
        out.push(p);
    }
    Ok(out)
}

/// Positions of `chain` in key-point order along the chain.
pub fn chain_pose(
    complex: &RobotComplex,
    chain: &Chain,
    base: Point,
    angles: &[f64],
) -> Result<Vec<Point>> {
    if chain.closed {
        return Err(Error::Unsupported(
            "closed chains move as rigid bodies; use a rigid transform".into(),
        ));
    }
    let lengths: Vec<f64> = chain.links.iter().map(|&e| complex.lengths[e]).collect();
    pose_from_angles(base, &lengths, angles)
}

/// Does any link (inflated by the link width) touch an obstacle, or any key
/// point leave the workspace?
pub fn pose_collides(scene: &Scene, complex: &RobotComplex, positions: &[Point]) -> bool {
    if positions.iter().any(|p| !scene.in_bounds(p)) {
        return true;
    }
    let w = complex.link_width;
    if complex.edges.is_empty() {
        return positions.iter().any(|p| point_blocked(scene, p, w));
    }
    complex
        .edges
        .iter()
        .any(|&(a, b)| segment_blocked(scene, &positions[a], &positions[b], w))
}

fn point_blocked(scene: &Scene, p: &Point, w: f64) -> bool {
    segment_blocked(scene, p, p, w)
}

/// Segment within distance `w` of an obstacle (touching counts when `w` is 0).
pub fn segment_blocked(scene: &Scene, a: &Point, b: &Point, w: f64) -> bool {
    scene.obstacles().iter().any(|o| {
        o.pieces.iter().any(|piece| {
            if piece.dim() == 2 {
                let d = segment_polygon_distance(a, b, piece);
                if w > 0.0 {
                    d < w
                } else {
                    d == 0.0
                }
            } else {
                segment_hits_convex3(a, b, piece, w)
            }
        })
    })
}

/// Max deviation of any link length from its nominal value.
pub fn length_error(complex: &RobotComplex, positions: &[Point]) -> f64 {
    complex
        .edges
        .iter()
        .zip(&complex.lengths)
        .map(|(&(a, b), l)| (positions[a].dist(&positions[b]) - l).abs())
        .fold(0.0, f64::max)
}

/// Key-point positions keyed by name, as accepted on the command line.
pub fn positions_from_names(
    spec: &RobotSpec,
    named: &BTreeMap<String, Point>,
) -> Result<Vec<Point>> {
    spec.key_points
        .iter()
        .map(|k| {
            named
                .get(k)
                .copied()
                .ok_or_else(|| Error::Robot(format!("missing position for {k}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(points: &[&str], links: &[(&str, &str)]) -> RobotSpec {
        RobotSpec {
            schema_version: None,
            key_points: points.iter().map(|s| s.to_string()).collect(),
            links: links
                .iter()
                .map(|(a, b)| Link {
                    a: a.to_string(),
                    b: b.to_string(),
                    length: 1.0,
                })
                .collect(),
            link_width: 0.1,
            joint_limits: None,
            reconfigurable: false,
        }
    }

    #[test]
    fn open_chain_of_three() {
        let c = build_complex(&spec(&["a", "b", "c"], &[("a", "b"), ("b", "c")])).unwrap();
        assert_eq!(c.chains.len(), 1);
        assert!(!c.chains[0].closed);
        assert_eq!(c.chains[0].links.len(), 2);
        assert!(c.as_serial().is_some());
    }

    #[test]
    fn humanoid_has_four_chains() {
        let s = spec(
            &["t", "la", "lh", "ra", "rh", "ll", "lf", "rl", "rf"],
            &[
                ("t", "la"),
                ("la", "lh"),
                ("t", "ra"),
                ("ra", "rh"),
                ("t", "ll"),
                ("ll", "lf"),
                ("t", "rl"),
                ("rl", "rf"),
            ],
        );
        let c = build_complex(&s).unwrap();
        assert_eq!(c.chains.len(), 4);
        assert!(c
            .chains
            .iter()
            .all(|ch| ch.vertices[0] == 0 && ch.links.len() == 2 && !ch.closed));
    }

    #[test]
    fn four_cycle_is_closed() {
        let c = build_complex(&spec(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        ))
        .unwrap();
        assert_eq!(c.chains.len(), 1);
        assert!(c.chains[0].closed);
        assert_eq!(c.chains[0].vertices.len(), 4);
    }

    #[test]
    fn disconnected_and_reconfigurable_rejected() {
        assert!(build_complex(&spec(&["a", "b", "c"], &[("a", "b")])).is_err());
        let mut s = spec(&["a", "b"], &[("a", "b")]);
        s.reconfigurable = true;
        assert!(build_complex(&s).is_err());
    }

    #[test]
    fn pose_examples() {
        let p = pose_from_angles(Point::new2(0., 0.), &[1., 1.], &[0., PI / 2.]).unwrap();
        assert!((p[2].x() - 1.).abs() < 1e-15 && (p[2].y() - 1.).abs() < 1e-15);
        let p = pose_from_angles(Point::new2(0., 0.), &[2.], &[PI]).unwrap();
        assert!((p[1].x() + 2.).abs() < 1e-15);
        let p = pose_from_angles(Point::new2(1., 1.), &[1.; 4], &[0.; 4]).unwrap();
        assert_eq!(
            p.iter().map(|q| q.x()).collect::<Vec<_>>(),
            vec![1., 2., 3., 4., 5.]
        );
    }

    #[test]
    fn closed_chain_pose_unsupported() {
        let c = build_complex(&spec(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "c"), ("c", "a")],
        ))
        .unwrap();
        assert!(chain_pose(&c, &c.chains[0], Point::new2(0., 0.), &[0.; 3]).is_err());
    }

    #[test]
    fn collision_examples() {
        let scene = crate::fixtures::single_box();
        let c = build_complex(&RobotSpec::serial(&[4.0], 0.1)).unwrap();
        assert!(pose_collides(
            &scene,
            &c,
            &[Point::new2(3., 5.), Point::new2(7., 5.)]
        ));
        assert!(!pose_collides(
            &scene,
            &c,
            &[Point::new2(1., 1.), Point::new2(1., 3.)]
        ));
        // passes 0.05 from the box's left vertex at x = 3.9: inside the width
        assert!(pose_collides(
            &scene,
            &c,
            &[Point::new2(3.85, 1.), Point::new2(3.85, 5.85)]
        ));
    }
}
