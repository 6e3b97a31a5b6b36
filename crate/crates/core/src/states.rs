//! Robot states as (region, key point) pairs, their contraction, path
//! representations and the planar crossing-word oracle.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{orient_raw, Point, Sign};
use crate::jointcover::{primes, JointCover, RegionId, UnionFind};
use crate::robot::{segment_blocked, RobotComplex};
use crate::scene::Scene;

/// `pairs[k]` is the region holding key point `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StateRep {
    pub pairs: Vec<(RegionId, usize)>,
}

impl StateRep {
    pub fn from_regions(regions: &[RegionId]) -> Self {
        StateRep {
            pairs: regions.iter().enumerate().map(|(k, &r)| (r, k)).collect(),
        }
    }

    pub fn region(&self, k: usize) -> RegionId {
        self.pairs[k].0
    }
}

/// Regions of every key point of a configuration.
pub fn state_of(config: &[Point], jc: &JointCover) -> Result<StateRep> {
    let mut regions = Vec::with_capacity(config.len());
    for p in config {
        regions.push(jc.region_of_point(p)?);
    }
    Ok(StateRep::from_regions(&regions))
}

/// A contracted block: the key points it absorbed and the regions they occupy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Block {
    pub regions: BTreeSet<RegionId>,
    pub key_points: BTreeSet<usize>,
}

/// Canonical contracted state: blocks sorted by (regions, key points).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ContractedRep {
    pub blocks: Vec<Block>,
}

impl ContractedRep {
    /// Prime-power code of the flattened block list; equal codes mean equal
    /// structures because the flattening is self-delimiting.
    pub fn encode(&self) -> BigUint {
        let mut flat: Vec<u64> = Vec::new();
        for b in &self.blocks {
            flat.push(b.regions.len() as u64);
            flat.extend(b.regions.iter().map(|&r| r as u64));
            flat.push(b.key_points.len() as u64);
            flat.extend(b.key_points.iter().map(|&k| k as u64));
        }
        let mut out = BigUint::one();
        for (p, e) in primes(flat.len()).into_iter().zip(flat) {
            out *= BigUint::from(p).pow((e + 1) as u32);
        }
        out
    }

    pub fn n_key_points(&self) -> usize {
        self.blocks.iter().map(|b| b.key_points.len()).sum()
    }

    /// Region of the block holding key point `k`.
    pub fn block_of(&self, k: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.key_points.contains(&k))
    }
}

impl fmt::Display for ContractedRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let r: Vec<String> = b.regions.iter().map(|x| format!("w{x}")).collect();
                let k: Vec<String> = b.key_points.iter().map(|x| format!("q{x}")).collect();
                format!("({}|{})", r.join(","), k.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Contract a state: links whose ends share a region collapse, then linked
/// blocks merge while their regions jointly span a workspace-complex simplex
/// made of compact regions. Iterated to a fixed point.
pub fn contract(l: &StateRep, jc: &JointCover, sb: &RobotComplex) -> ContractedRep {
    let blocks: Vec<Block> = l
        .pairs
        .iter()
        .map(|&(r, k)| Block {
            regions: BTreeSet::from([r]),
            key_points: BTreeSet::from([k]),
        })
        .collect();
    contract_blocks(blocks, jc, sb)
}

/// Apply the contraction rules to an existing block list.
pub fn contract_blocks(blocks: Vec<Block>, jc: &JointCover, sb: &RobotComplex) -> ContractedRep {
    let mut blocks = blocks;
    loop {
        let owner =
            |k: usize, blocks: &[Block]| blocks.iter().position(|b| b.key_points.contains(&k));
        let mut uf = UnionFind::new(blocks.len());
        let mut merged = false;
        for &(a, b) in &sb.edges {
            let (Some(x), Some(y)) = (owner(a, &blocks), owner(b, &blocks)) else {
                continue;
            };
            let (rx, ry) = (uf.find(x), uf.find(y));
            if rx == ry {
                continue;
            }
            if can_merge(&blocks[x], &blocks[y], jc) {
                uf.union(rx, ry);
                merged = true;
            }
        }
        if !merged {
            break;
        }
        let mut next: Vec<Option<Block>> = vec![None; blocks.len()];
        for (i, b) in blocks.iter().enumerate() {
            let r = uf.find(i);
            let e = next[r].get_or_insert_with(|| Block {
                regions: BTreeSet::new(),
                key_points: BTreeSet::new(),
            });
            e.regions.extend(b.regions.iter().copied());
            e.key_points.extend(b.key_points.iter().copied());
        }
        blocks = next.into_iter().flatten().collect();
    }
    blocks.sort();
    ContractedRep { blocks }
}

fn can_merge(x: &Block, y: &Block, jc: &JointCover) -> bool {
    if x.regions == y.regions {
        return true;
    }
    let u: Vec<RegionId> = x.regions.union(&y.regions).copied().collect();
    u.len() <= jc.dim()
        && jc.complex().contains_simplex(&u)
        && u.iter().all(|&r| jc.region(r).compact)
}

/// A path's class representative: contracted states with immediate
/// back-and-forth steps cancelled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathRepresentation {
    pub states: Vec<ContractedRep>,
    #[serde(skip)]
    cover: u64,
    #[serde(skip)]
    robot: u64,
}

impl PathRepresentation {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Region sequence of key point `k`.
    pub fn region_sequence(&self, k: usize) -> Vec<Vec<RegionId>> {
        self.states
            .iter()
            .map(|s| {
                s.block_of(k)
                    .map(|b| b.regions.iter().copied().collect())
                    .unwrap_or_default()
            })
            .collect()
    }

    pub fn encoded(&self) -> Vec<String> {
        self.states.iter().map(|s| s.encode().to_string()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "states": self.states.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "encoded": self.encoded(),
        })
    }
}

/// Reduce a state sequence: drop repeats and cancel `X Y X` to `X`.
pub fn reduce(states: impl IntoIterator<Item = ContractedRep>) -> Vec<ContractedRep> {
    let mut out: Vec<ContractedRep> = Vec::new();
    for s in states {
        if out.last() == Some(&s) {
            continue;
        }
        if out.len() >= 2 && out[out.len() - 2] == s {
            out.pop();
            continue;
        }
        out.push(s);
    }
    out
}

/// Representation of a sampled configuration path. Each key point may cross
/// at most one region boundary per step.
pub fn path_representation(
    configs: &[Vec<Point>],
    jc: &JointCover,
    sb: &RobotComplex,
) -> Result<PathRepresentation> {
    if configs.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    let n = sb.n_vertices;
    let mut states = Vec::with_capacity(configs.len());
    let mut hints = vec![0usize; n];
    for (i, c) in configs.iter().enumerate() {
        if c.len() != n {
            return Err(Error::InvalidPath(format!(
                "configuration {i} has {} key points, expected {n}",
                c.len()
            )));
        }
        if i > 0 {
            for k in 0..n {
                let seq = jc.trace_regions(&configs[i - 1][k], &c[k], hints[k])?;
                if seq.len() > 2 {
                    return Err(Error::Resolution {
                        step: i,
                        key_point: k,
                    });
                }
            }
        }
        let mut regions = Vec::with_capacity(n);
        for k in 0..n {
            let s = jc.simplex_of_point(&c[k], hints[k]).map_err(|e| match e {
                Error::Containment(p, o) => Error::InvalidPath(format!(
                    "configuration {i}: point {p:?} inside obstacle {o}"
                )),
                e => e,
            })?;
            hints[k] = s;
            regions.push(jc.region_of_simplex(s).expect("free"));
        }
        states.push(contract(&StateRep::from_regions(&regions), jc, sb));
    }
    Ok(PathRepresentation {
        states: reduce(states),
        cover: jc.fingerprint(),
        robot: sb.fingerprint(),
    })
}

/// Subdivide steps (linear interpolation of every key point) until no key
/// point crosses more than one region boundary per step.
pub fn refine_path(
    configs: &[Vec<Point>],
    jc: &JointCover,
    max_depth: usize,
) -> Result<Vec<Vec<Point>>> {
    let mut out: Vec<Vec<Point>> = Vec::with_capacity(configs.len());
    if let Some(first) = configs.first() {
        out.push(first.clone());
    }
    for i in 1..configs.len() {
        refine_step(&configs[i - 1], &configs[i], jc, max_depth, i, &mut out)?;
    }
    Ok(out)
}

fn refine_step(
    a: &[Point],
    b: &[Point],
    jc: &JointCover,
    depth: usize,
    step: usize,
    out: &mut Vec<Vec<Point>>,
) -> Result<()> {
    let mut bad = None;
    for k in 0..a.len() {
        if jc.trace_regions(&a[k], &b[k], 0)?.len() > 2 {
            bad = Some(k);
            break;
        }
    }
    match bad {
        None => {
            out.push(b.to_vec());
            Ok(())
        }
        Some(k) if depth == 0 => Err(Error::Resolution { step, key_point: k }),
        Some(_) => {
            let m: Vec<Point> = a.iter().zip(b).map(|(p, q)| p.lerp(q, 0.5)).collect();
            refine_step(a, &m, jc, depth - 1, step, out)?;
            refine_step(&m, b, jc, depth - 1, step, out)
        }
    }
}

/// Representation of a point-robot polyline, traced exactly through the
/// cover so no sampling density is needed.
pub fn point_path_representation(
    path: &[Point],
    jc: &JointCover,
    sb: &RobotComplex,
) -> Result<PathRepresentation> {
    if path.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    if sb.n_vertices != 1 {
        return Err(Error::InvalidPath(
            "point paths need a one-key-point robot".into(),
        ));
    }
    let mut regions = vec![jc.region_of_point(&path[0])?];
    for w in path.windows(2) {
        for r in jc.trace_regions(&w[0], &w[1], 0)? {
            if regions.last() != Some(&r) {
                regions.push(r);
            }
        }
    }
    let states = regions
        .into_iter()
        .map(|r| contract(&StateRep::from_regions(&[r]), jc, sb));
    Ok(PathRepresentation {
        states: reduce(states),
        cover: jc.fingerprint(),
        robot: sb.fingerprint(),
    })
}

/// Same class iff the representations agree entry by entry.
pub fn same_class(r1: &PathRepresentation, r2: &PathRepresentation) -> Result<bool> {
    if r1.cover != r2.cover || r1.robot != r2.robot {
        return Err(Error::Provenance);
    }
    Ok(r1.states == r2.states)
}

/// Reduced crossing word; letter `i` is `a_i`, `-i` is its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HSignature {
    pub word: Vec<i32>,
}

impl fmt::Display for HSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let s: Vec<String> = self
            .word
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("a{l}")
                } else {
                    format!("a{}^-1", -l)
                }
            })
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

impl Serialize for HSignature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn free_reduce(word: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// An interior point of each obstacle with pairwise distinct x coordinates;
/// the downward vertical rays from these points define the crossing word.
pub fn ray_anchors(scene: &Scene) -> Result<Vec<Point>> {
    if scene.dim() != 2 {
        return Err(Error::Unsupported("crossing words are planar only".into()));
    }
    let mut anchors: Vec<Point> = Vec::new();
    for o in scene.obstacles() {
        let candidates = o.pieces.iter().flat_map(|p| ear_centroids(&p.vertices));
        let a = candidates
            .filter(|c| o.contains_interior(c))
            .find(|c| anchors.iter().all(|b| b.x() != c.x()))
            .ok_or_else(|| Error::Degenerate(format!("no ray anchor for obstacle {}", o.id)))?;
        anchors.push(a);
    }
    Ok(anchors)
}

fn ear_centroids(v: &[Point]) -> Vec<Point> {
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        if orient_raw(&[a, b, c]) == Sign::Positive {
            out.push(Point::new2(
                (a.x() + b.x() + c.x()) / 3.0,
                (a.y() + b.y() + c.y()) / 3.0,
            ));
        }
    }
    out
}

/// Crossing word of a planar polyline against downward rays, one per obstacle.
pub fn h_signature(path: &[Point], scene: &Scene) -> Result<HSignature> {
    let anchors = ray_anchors(scene)?;
    h_signature_with(path, scene, &anchors)
}

pub fn h_signature_with(path: &[Point], scene: &Scene, anchors: &[Point]) -> Result<HSignature> {
    for p in path {
        if !scene.is_free(p) {
            return Err(Error::InvalidPath(format!(
                "path point {p:?} is not in free space"
            )));
        }
    }
    let mut word = Vec::new();
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        if segment_blocked(scene, &a, &b, 0.0) {
            return Err(Error::InvalidPath(format!(
                "segment {a:?} -> {b:?} intersects an obstacle"
            )));
        }
        let mut hits: Vec<(f64, i32)> = Vec::new();
        for (i, c) in anchors.iter().enumerate() {
            let id = (i + 1) as i32;
            let (sa, sb) = (a.x() < c.x(), b.x() < c.x());
            if sa == sb {
                continue;
            }
            let o = orient_raw(&[a, b, *c]);
            let rightward = sa;
            let below = if rightward {
                o == Sign::Positive
            } else {
                o == Sign::Negative
            };
            if o == Sign::Zero {
                return Err(Error::InvalidPath(format!(
                    "path passes through the anchor of obstacle {id}"
                )));
            }
            if below {
                let key = if rightward { c.x() } else { -c.x() };
                hits.push((key, if rightward { id } else { -id }));
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        word.extend(hits.into_iter().map(|h| h.1));
    }
    Ok(HSignature {
        word: free_reduce(word),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::jointcover::build_joint_cover;
    use crate::robot::{build_complex, RobotSpec};

    fn p(x: f64, y: f64) -> Point {
        Point::new2(x, y)
    }

    #[test]
    fn free_reduction() {
        assert_eq!(free_reduce([1, -1]), Vec::<i32>::new());
        assert_eq!(free_reduce([1, 2, -2, 3]), vec![1, 3]);
    }

    #[test]
    fn h_signature_examples() {
        let s = fixtures::single_box();
        // straight path below the box, left to right, crosses the ray once
        let below = h_signature(&[p(1., 1.), p(9., 1.)], &s).unwrap();
        assert_eq!(below.word, vec![1]);
        // above the box: no crossing
        let above = h_signature(&[p(1., 1.), p(1., 9.), p(9., 9.), p(9., 1.)], &s).unwrap();
        assert!(above.word.is_empty());
        assert_ne!(below, above);
        // across the ray and straight back
        let back = h_signature(&[p(1., 1.), p(9., 1.), p(1., 1.5)], &s).unwrap();
        assert!(back.word.is_empty());
        assert!(h_signature(&[p(1., 5.), p(9., 5.)], &s).is_err());
    }

    #[test]
    fn representations_left_vs_right() {
        let s = fixtures::single_box();
        let (jc, _) = build_joint_cover(&s).unwrap();
        let sb = build_complex(&RobotSpec::point()).unwrap();
        let left =
            point_path_representation(&[p(5., 1.), p(1., 1.), p(1., 9.), p(5., 9.)], &jc, &sb)
                .unwrap();
        let right =
            point_path_representation(&[p(5., 1.), p(9., 1.), p(9., 9.), p(5., 9.)], &jc, &sb)
                .unwrap();
        assert!(!same_class(&left, &right).unwrap());
        let constant = point_path_representation(&[p(1., 1.), p(1., 1.)], &jc, &sb).unwrap();
        assert_eq!(constant.len(), 1);
        let out_back =
            point_path_representation(&[p(5., 1.), p(1., 5.), p(5., 1.)], &jc, &sb).unwrap();
        assert_eq!(out_back.len(), 1);
    }

    #[test]
    fn strict_sampling_reports_resolution() {
        let s = fixtures::single_box();
        let (jc, _) = build_joint_cover(&s).unwrap();
        let sb = build_complex(&RobotSpec::point()).unwrap();
        let coarse = vec![vec![p(0.5, 0.5)], vec![p(9.5, 0.7)]];
        assert!(matches!(
            path_representation(&coarse, &jc, &sb),
            Err(Error::Resolution {
                step: 1,
                key_point: 0
            })
        ));
        let fine = refine_path(&coarse, &jc, 20).unwrap();
        let a = path_representation(&fine, &jc, &sb).unwrap();
        let b = point_path_representation(&[p(0.5, 0.5), p(9.5, 0.7)], &jc, &sb).unwrap();
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn contraction_collapses_same_region_chain() {
        let s = fixtures::single_box();
        let (jc, _) = build_joint_cover(&s).unwrap();
        let sb = build_complex(&RobotSpec::serial(&[0.2, 0.2], 0.01)).unwrap();
        let t = jc.triangulation();
        let s0 = jc.regions()[0].simplices[0];
        let v = t.simplex_points(s0);
        let mix = |w: [f64; 3]| {
            Point::new2(
                w[0] * v[0].x() + w[1] * v[1].x() + w[2] * v[2].x(),
                w[0] * v[0].y() + w[1] * v[1].y() + w[2] * v[2].y(),
            )
        };
        let pts = [
            mix([0.5, 0.25, 0.25]),
            mix([0.25, 0.5, 0.25]),
            mix([0.25, 0.25, 0.5]),
        ];
        let l = state_of(&pts, &jc).unwrap();
        let c = contract(&l, &jc, &sb);
        assert_eq!(c.blocks.len(), 1);
        assert_eq!(c.blocks[0].key_points.len(), 3);
        let again = contract_blocks(c.blocks.clone(), &jc, &sb);
        assert_eq!(again, c);
    }

    #[test]
    fn encoding_distinguishes_structures() {
        let a = ContractedRep {
            blocks: vec![Block {
                regions: BTreeSet::from([1]),
                key_points: BTreeSet::from([0, 1]),
            }],
        };
        let b = ContractedRep {
            blocks: vec![
                Block {
                    regions: BTreeSet::from([1]),
                    key_points: BTreeSet::from([0]),
                },
                Block {
                    regions: BTreeSet::from([1]),
                    key_points: BTreeSet::from([1]),
                },
            ],
        };
        assert_ne!(a.encode(), b.encode());
        assert_eq!(a.encode(), a.clone().encode());
    }
}
