//! Class-aware planning: region walks on the workspace complex, their
//! realization as point paths, chain interpolation and non-existence
//! certificates.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::jointcover::{JointCover, RegionId};
use crate::robot::{
    build_complex, length_error, pose_collides, segment_blocked, Chain, RobotComplex, RobotSpec,
};
use crate::states::{
    contract, path_representation, reduce, refine_path, state_of, ContractedRep,
    PathRepresentation, StateRep,
};

/// A walk of the leading key point through regions, with the contracted
/// robot states it induces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologicalPath {
    pub regions: Vec<RegionId>,
    pub states: Vec<ContractedRep>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PruneReason {
    Disconnected,
    NarrowInterface {
        from: RegionId,
        to: RegionId,
        width: f64,
    },
    InterpolationFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrunedSequence {
    pub regions: Vec<RegionId>,
    #[serde(flatten)]
    pub reason: PruneReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Connectivity,
    EmbeddingInfeasible,
}

/// Why no plan exists. Connectivity certificates are exact; embedding ones
/// rest on necessary-condition pruning or on failed interpolation and are
/// flagged heuristic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonExistenceCertificate {
    pub kind: CertificateKind,
    pub heuristic: bool,
    pub key_point: usize,
    pub start_region: RegionId,
    pub goal_region: RegionId,
    /// Regions reachable from the start (through feasible interfaces for
    /// embedding certificates); the goal region is not among them.
    pub reachable: Vec<RegionId>,
    pub length_bound: usize,
    pub sequences: Vec<PrunedSequence>,
    /// More sequences exist within the bound than were listed.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Existence {
    Exists,
    Certificate(NonExistenceCertificate),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Validity {
    pub collision_free: bool,
    pub lengths_preserved: bool,
    pub step_bounded: bool,
    pub reaches_goal: bool,
}

impl Validity {
    pub fn ok(&self) -> bool {
        self.collision_free && self.lengths_preserved && self.step_bounded && self.reaches_goal
    }
}

/// Waypoint configurations, indexed `[waypoint][key point]`.
#[derive(Clone, Debug, Serialize)]
pub struct GeometricPlan {
    pub waypoints: Vec<Vec<Point>>,
    pub regions: Vec<RegionId>,
    pub class: Vec<String>,
    pub validity: Validity,
    pub max_length_error: f64,
    pub max_step: f64,
    pub repaired_steps: usize,
    #[serde(skip)]
    pub representation: Option<PathRepresentation>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PlanOutcome {
    Plans {
        plans: Vec<GeometricPlan>,
    },
    Certificate {
        certificate: NonExistenceCertificate,
    },
}

#[derive(Clone, Debug)]
pub struct PlanOptions {
    pub alternatives: usize,
    /// Largest key-point displacement between consecutive waypoints.
    pub step: f64,
    /// Longest region sequence (in regions) listed in certificates.
    pub length_bound: usize,
    pub angle_steps: usize,
    pub retries: usize,
    /// Walks tried per requested alternative before giving up.
    pub candidates_per_alternative: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            alternatives: 1,
            step: 0.05,
            length_bound: 12,
            angle_steps: 64,
            retries: 4,
            candidates_per_alternative: 4,
        }
    }
}

const LISTED_SEQUENCES: usize = 512;
const LENGTH_TOL: f64 = 1e-9;
const STEP_SLACK: f64 = 1.0 + 1e-9;

/// Smallest free width the robot can pass: its links are inflated by
/// `link_width` on each side.
pub fn min_cross_section(sb: &RobotComplex) -> f64 {
    2.0 * sb.link_width
}

/// Upper bound on the width of a robot cross-section that can pass between
/// regions `a` and `b`. Facets with an endpoint that is not on an obstacle
/// impose no bound.
pub fn interface_width(jc: &JointCover, a: RegionId, b: RegionId) -> f64 {
    let t = jc.triangulation();
    let mut best = 0.0f64;
    for (s, k) in jc.interface(a, b) {
        let f = t.facet(s, k);
        if f.iter().any(|&v| t.provenance(v).obstacle.is_none()) {
            return f64::INFINITY;
        }
        let p: Vec<Point> = f.iter().map(|&v| t.points()[v]).collect();
        let w = if p.len() == 2 {
            p[0].dist(&p[1])
        } else {
            2.0 * circumradius3(&p[0], &p[1], &p[2])
        };
        best = best.max(w);
    }
    best
}

fn circumradius3(a: &Point, b: &Point, c: &Point) -> f64 {
    let (x, y, z) = (b.dist(c), a.dist(c), a.dist(b));
    let area2 = crate::geom::cross(&b.sub(a), &c.sub(a)).norm2().sqrt();
    if area2 == 0.0 {
        return x.max(y).max(z) / 2.0;
    }
    x * y * z / (2.0 * area2)
}

fn region_neighbors(jc: &JointCover) -> Vec<Vec<RegionId>> {
    let mut adj = vec![Vec::new(); jc.regions().len()];
    for &(a, b) in jc.adjacency() {
        adj[a].push(b);
        adj[b].push(a);
    }
    for v in &mut adj {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

fn reachable(
    adj: &[Vec<RegionId>],
    from: RegionId,
    ok: &dyn Fn(RegionId, RegionId) -> bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[from] = Some(0);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        let d = dist[v].expect("visited");
        for &w in &adj[v] {
            if dist[w].is_none() && ok(v, w) {
                dist[w] = Some(d + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// Up to `k` simple region walks from `from` to `to`, shortest first, ties
/// in lexicographic order of region ids. `ok` filters transitions.
pub fn region_walks(
    jc: &JointCover,
    from: RegionId,
    to: RegionId,
    k: usize,
    ok: &dyn Fn(RegionId, RegionId) -> bool,
) -> Vec<Vec<RegionId>> {
    let adj = region_neighbors(jc);
    // distances to the goal over allowed transitions
    let to_goal = reachable(&adj, to, &|a, b| ok(b, a));
    let Some(d0) = to_goal[from] else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut budget: usize = 2_000_000;
    for len in d0..adj.len() {
        let mut walk = vec![from];
        let mut on = vec![false; adj.len()];
        on[from] = true;
        dfs_walks(
            &adj,
            &to_goal,
            ok,
            to,
            len,
            &mut walk,
            &mut on,
            &mut out,
            k,
            &mut budget,
        );
        if out.len() >= k || budget == 0 {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_walks(
    adj: &[Vec<RegionId>],
    to_goal: &[Option<usize>],
    ok: &dyn Fn(RegionId, RegionId) -> bool,
    to: RegionId,
    len: usize,
    walk: &mut Vec<RegionId>,
    on: &mut [bool],
    out: &mut Vec<Vec<RegionId>>,
    k: usize,
    budget: &mut usize,
) {
    if out.len() >= k || *budget == 0 {
        return;
    }
    *budget -= 1;
    let v = *walk.last().expect("non-empty");
    let used = walk.len() - 1;
    if v == to {
        if used == len {
            out.push(walk.clone());
        }
        return;
    }
    for &w in &adj[v] {
        if on[w] || !ok(v, w) {
            continue;
        }
        match to_goal[w] {
            Some(d) if used + 1 + d <= len => {}
            _ => continue,
        }
        walk.push(w);
        on[w] = true;
        dfs_walks(adj, to_goal, ok, to, len, walk, on, out, k, budget);
        on[w] = false;
        walk.pop();
    }
}

fn whole_robot_in(r: RegionId, n: usize, jc: &JointCover, sb: &RobotComplex) -> ContractedRep {
    contract(&StateRep::from_regions(&vec![r; n]), jc, sb)
}

fn topological_from_walk(
    walk: Vec<RegionId>,
    start: &StateRep,
    goal: &StateRep,
    jc: &JointCover,
    sb: &RobotComplex,
) -> TopologicalPath {
    let n = sb.n_vertices;
    let mut states = vec![contract(start, jc, sb)];
    states.extend(walk.iter().map(|&r| whole_robot_in(r, n, jc, sb)));
    states.push(contract(goal, jc, sb));
    TopologicalPath {
        regions: walk,
        states: reduce(states),
    }
}

fn connectivity_certificate(
    jc: &JointCover,
    key_point: usize,
    from: RegionId,
    to: RegionId,
    dist: &[Option<usize>],
    length_bound: usize,
) -> NonExistenceCertificate {
    NonExistenceCertificate {
        kind: CertificateKind::Connectivity,
        heuristic: false,
        key_point,
        start_region: from,
        goal_region: to,
        reachable: (0..jc.regions().len())
            .filter(|&r| dist[r].is_some())
            .collect(),
        length_bound,
        sequences: Vec::new(),
        truncated: false,
    }
}

/// Up to `k` class-distinct topological paths for the leading key point
/// (key point 0), or a connectivity certificate.
pub fn search_topological(
    start: &StateRep,
    goal: &StateRep,
    jc: &JointCover,
    sb: &RobotComplex,
    k: usize,
) -> std::result::Result<Vec<TopologicalPath>, NonExistenceCertificate> {
    let (from, to) = (start.region(0), goal.region(0));
    let walks = region_walks(jc, from, to, k, &|_, _| true);
    if walks.is_empty() {
        let dist = reachable(&region_neighbors(jc), from, &|_, _| true);
        return Err(connectivity_certificate(
            jc,
            0,
            from,
            to,
            &dist,
            jc.regions().len(),
        ));
    }
    Ok(walks
        .into_iter()
        .map(|w| topological_from_walk(w, start, goal, jc, sb))
        .collect())
}

/// Connectivity of every key point's start and goal regions, then pruning
/// of transitions too narrow for the robot's cross-section.
pub fn check_existence(
    start: &[Point],
    goal: &[Point],
    jc: &JointCover,
    sb: &RobotComplex,
    length_bound: usize,
) -> Result<Existence> {
    let s = state_of(start, jc)?;
    let g = state_of(goal, jc)?;
    if s.pairs.len() != g.pairs.len() || s.pairs.len() != sb.n_vertices {
        return Err(Error::Validation(
            "start and goal must give every key point".into(),
        ));
    }
    let adj = region_neighbors(jc);
    for kp in 0..sb.n_vertices {
        let (from, to) = (s.region(kp), g.region(kp));
        let dist = reachable(&adj, from, &|_, _| true);
        if dist[to].is_none() {
            return Ok(Existence::Certificate(connectivity_certificate(
                jc,
                kp,
                from,
                to,
                &dist,
                length_bound,
            )));
        }
    }
    let need = min_cross_section(sb);
    if need == 0.0 {
        return Ok(Existence::Exists);
    }
    let mut widths: HashMap<(RegionId, RegionId), f64> = HashMap::new();
    for &(a, b) in jc.adjacency() {
        let w = interface_width(jc, a, b);
        widths.insert((a, b), w);
        widths.insert((b, a), w);
    }
    let feasible = |a: RegionId, b: RegionId| widths[&(a, b)] >= need;
    for kp in 0..sb.n_vertices {
        let (from, to) = (s.region(kp), g.region(kp));
        let dist = reachable(&adj, from, &feasible);
        if dist[to].is_some() {
            continue;
        }
        let mut sequences = Vec::new();
        let mut truncated = false;
        let mut walk = vec![from];
        let mut on = vec![false; adj.len()];
        on[from] = true;
        list_pruned(
            &adj,
            &widths,
            need,
            to,
            length_bound,
            &mut walk,
            &mut on,
            &mut sequences,
            &mut truncated,
        );
        return Ok(Existence::Certificate(NonExistenceCertificate {
            kind: CertificateKind::EmbeddingInfeasible,
            heuristic: true,
            key_point: kp,
            start_region: from,
            goal_region: to,
            reachable: (0..adj.len()).filter(|&r| dist[r].is_some()).collect(),
            length_bound,
            sequences,
            truncated,
        }));
    }
    Ok(Existence::Exists)
}

#[allow(clippy::too_many_arguments)]
fn list_pruned(
    adj: &[Vec<RegionId>],
    widths: &HashMap<(RegionId, RegionId), f64>,
    need: f64,
    to: RegionId,
    bound: usize,
    walk: &mut Vec<RegionId>,
    on: &mut [bool],
    out: &mut Vec<PrunedSequence>,
    truncated: &mut bool,
) {
    let v = *walk.last().expect("non-empty");
    if v == to {
        if out.len() >= LISTED_SEQUENCES {
            *truncated = true;
            return;
        }
        let reason = walk
            .windows(2)
            .map(|p| (p[0], p[1], widths[&(p[0], p[1])]))
            .find(|w| w.2 < need)
            .map(|(from, to, width)| PruneReason::NarrowInterface { from, to, width })
            .unwrap_or(PruneReason::InterpolationFailed);
        out.push(PrunedSequence {
            regions: walk.clone(),
            reason,
        });
        return;
    }
    if walk.len() >= bound || *truncated {
        return;
    }
    for &w in &adj[v] {
        if on[w] {
            continue;
        }
        walk.push(w);
        on[w] = true;
        list_pruned(adj, widths, need, to, bound, walk, on, out, truncated);
        on[w] = false;
        walk.pop();
    }
}

/// Point path through the centroids of shared facets, from `start` to
/// `goal`. Segments leaving their region are replaced by a route through the
/// region's own simplices.
pub fn realize_point_path(
    tp: &TopologicalPath,
    start: &Point,
    goal: &Point,
    jc: &JointCover,
) -> Result<Vec<Point>> {
    let walk = &tp.regions;
    let t = jc.triangulation();
    let s0 = jc.simplex_of_point(start, 0)?;
    let s1 = jc.simplex_of_point(goal, 0)?;
    if jc.region_of_simplex(s0) != walk.first().copied()
        || jc.region_of_simplex(s1) != walk.last().copied()
    {
        return Err(Error::InvalidPath(
            "walk does not start and end in the endpoints' regions".into(),
        ));
    }
    // entry simplex and point per region
    let mut out = vec![*start];
    let mut entry = (s0, *start);
    for i in 0..walk.len() {
        let r = walk[i];
        let exit = if i + 1 < walk.len() {
            let (s, k) = widest_facet(jc, r, walk[i + 1]);
            (s, facet_centroid(jc, s, k))
        } else {
            (s1, *goal)
        };
        let piece = route_in_region(jc, r, entry, exit)?;
        out.extend(piece.into_iter().skip(1));
        if i + 1 < walk.len() {
            let (s, k) = widest_facet(jc, r, walk[i + 1]);
            let n = t.neighbor(s, k).expect("interior facet");
            entry = (n, exit.1);
        }
    }
    dedup_points(&mut out);
    Ok(out)
}

fn dedup_points(v: &mut Vec<Point>) {
    v.dedup_by(|a, b| a.coords() == b.coords());
}

fn widest_facet(jc: &JointCover, a: RegionId, b: RegionId) -> (usize, usize) {
    let t = jc.triangulation();
    let mut best: Option<(f64, (usize, usize))> = None;
    for (s, k) in jc.interface(a, b) {
        let p: Vec<Point> = t.facet(s, k).iter().map(|&v| t.points()[v]).collect();
        let w = if p.len() == 2 {
            p[0].dist(&p[1])
        } else {
            circumradius3(&p[0], &p[1], &p[2])
        };
        if best.is_none_or(|(bw, _)| w > bw) {
            best = Some((w, (s, k)));
        }
    }
    best.expect("adjacent regions share a facet").1
}

fn facet_centroid(jc: &JointCover, s: usize, k: usize) -> Point {
    let t = jc.triangulation();
    let f = t.facet(s, k);
    let mut c = t.points()[f[0]].scale(0.0);
    for &v in &f {
        c = c.add(&t.points()[v]);
    }
    c.scale(1.0 / f.len() as f64)
}

/// Does the segment stay inside region `r` (its closure)?
fn segment_in_region(jc: &JointCover, r: RegionId, a: &Point, b: &Point, hint: usize) -> bool {
    match jc.triangulation().trace(a, b, hint) {
        Ok(ss) => ss.iter().all(|&s| jc.region_of_simplex(s) == Some(r)),
        Err(_) => false,
    }
}

/// Path inside region `r` from a point of simplex `from.0` to a point of
/// simplex `to.0`: cheapest chain of simplices, through shared facet
/// centroids, then shortcut where the region allows.
fn route_in_region(
    jc: &JointCover,
    r: RegionId,
    from: (usize, Point),
    to: (usize, Point),
) -> Result<Vec<Point>> {
    if segment_in_region(jc, r, &from.1, &to.1, from.0) {
        return Ok(vec![from.1, to.1]);
    }
    let t = jc.triangulation();
    let mut dist: HashMap<usize, f64> = HashMap::from([(from.0, 0.0)]);
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut heap = BinaryHeap::from([Reverse((Ordered(0.0), from.0))]);
    while let Some(Reverse((Ordered(d), s))) = heap.pop() {
        if s == to.0 {
            break;
        }
        if d > dist[&s] {
            continue;
        }
        for (k, n) in t.neighbors(s).iter().enumerate() {
            let Some(n) = *n else { continue };
            if jc.region_of_simplex(n) != Some(r) {
                continue;
            }
            let nd = d + t.centroid(s).dist(&t.centroid(n));
            if dist.get(&n).is_none_or(|&x| nd < x) {
                dist.insert(n, nd);
                prev.insert(n, (s, k));
                heap.push(Reverse((Ordered(nd), n)));
            }
        }
    }
    if !dist.contains_key(&to.0) {
        return Err(Error::Degenerate(format!(
            "region {r} is not connected through its simplices"
        )));
    }
    let mut mids = Vec::new();
    let mut s = to.0;
    while s != from.0 {
        let (p, k) = prev[&s];
        mids.push((p, facet_centroid(jc, p, k)));
        s = p;
    }
    mids.reverse();
    let mut pts = vec![(from.0, from.1)];
    pts.extend(mids);
    pts.push((to.0, to.1));
    // greedy shortcut
    let mut out = vec![pts[0].1];
    let mut i = 0;
    while i + 1 < pts.len() {
        let mut j = pts.len() - 1;
        while j > i + 1 && !segment_in_region(jc, r, &pts[i].1, &pts[j].1, pts[i].0) {
            j -= 1;
        }
        out.push(pts[j].1);
        i = j;
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
struct Ordered(f64);
impl Eq for Ordered {}
impl PartialOrd for Ordered {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Ordered {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Split a polyline into maximal pieces whose two ends see each other
/// (the straight segment between them keeps distance `margin` from every
/// obstacle; touching is blocked when `margin` is 0).
pub fn split_visible(fp: &[Point], scene: &crate::scene::Scene, margin: f64) -> Vec<Vec<Point>> {
    let mut pieces = Vec::new();
    if fp.len() < 2 {
        return vec![fp.to_vec()];
    }
    let mut i = 0;
    while i + 1 < fp.len() {
        let mut j = i + 1;
        while j + 1 < fp.len() && !segment_blocked(scene, &fp[i], &fp[j + 1], margin) {
            j += 1;
        }
        pieces.push(fp[i..=j].to_vec());
        i = j;
    }
    pieces
}

/// Densify a polyline so no step exceeds `step`.
pub fn densify(path: &[Point], step: f64) -> Vec<Point> {
    let mut out = vec![path[0]];
    for w in path.windows(2) {
        let n = (w[0].dist(&w[1]) / step).ceil().max(1.0) as usize;
        for i in 1..n {
            out.push(w[0].lerp(&w[1], i as f64 / n as f64));
        }
        out.push(w[1]);
    }
    out
}

/// Trail parameter: segment index and fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Param {
    seg: usize,
    t: f64,
}

struct Trail {
    pts: Vec<Point>,
}

impl Trail {
    fn at(&self, p: Param) -> Point {
        if p.t == 0.0 {
            self.pts[p.seg]
        } else if p.t == 1.0 {
            self.pts[p.seg + 1]
        } else {
            self.pts[p.seg].lerp(&self.pts[p.seg + 1], p.t)
        }
    }

    fn end(&self) -> Param {
        Param {
            seg: self.pts.len() - 2,
            t: 1.0,
        }
    }

    fn advance(&self, mut p: Param, mut ds: f64) -> Param {
        loop {
            let len = self.pts[p.seg].dist(&self.pts[p.seg + 1]);
            let avail = (1.0 - p.t) * len;
            if ds <= avail {
                return Param {
                    seg: p.seg,
                    t: (p.t + ds / len).min(1.0),
                };
            }
            ds -= avail;
            if p.seg + 2 >= self.pts.len() {
                return self.end();
            }
            p = Param {
                seg: p.seg + 1,
                t: 0.0,
            };
        }
    }

    /// Last trail point before `from` at distance `l` from it.
    fn behind(&self, from: Param, l: f64) -> Option<Param> {
        let a = self.at(from);
        for seg in (0..=from.seg).rev() {
            let tmax = if seg == from.seg { from.t } else { 1.0 };
            let p = self.pts[seg];
            let d = self.pts[seg + 1].sub(&p);
            let e = p.sub(&a);
            let (qa, qb, qc) = (d.dot(&d), 2.0 * e.dot(&d), e.dot(&e) - l * l);
            let disc = qb * qb - 4.0 * qa * qc;
            if qa == 0.0 || disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            let mut best: Option<f64> = None;
            for t in [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)] {
                if (0.0..=tmax).contains(&t) && best.is_none_or(|b| t > b) {
                    best = Some(t);
                }
            }
            if let Some(t) = best {
                // snap to a vertex when it already sits at the right distance
                if (self.pts[seg].dist(&a) - l).abs() <= 1e-12 * l.max(1.0) && t < 1e-9 {
                    return Some(Param { seg, t: 0.0 });
                }
                return Some(Param { seg, t });
            }
        }
        None
    }
}

/// Pose along a trail with the leader at `lead`; `None` when a follower
/// runs off the trail's start.
fn trail_pose(trail: &Trail, lead: Param, lengths: &[f64]) -> Option<Vec<Point>> {
    let mut out = vec![trail.at(lead)];
    let mut cur = lead;
    for &l in lengths {
        cur = trail.behind(cur, l)?;
        let prev = *out.last().expect("non-empty");
        let q = trail.at(cur);
        // restore the exact link length against rounding in the lerp
        let v = q.sub(&prev);
        out.push(prev.add(&v.scale(l / v.norm2().sqrt())));
    }
    Some(out)
}

fn max_displacement(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.dist(q)).fold(0.0, f64::max)
}

/// Chain-ordered collision and joint-limit test.
struct ChainCheck<'a> {
    scene: &'a crate::scene::Scene,
    sb: &'a RobotComplex,
    chain: &'a Chain,
    limits: Option<Vec<[f64; 2]>>,
}

impl ChainCheck<'_> {
    fn to_robot(&self, pose: &[Point]) -> Vec<Point> {
        let mut out = vec![pose[0]; self.sb.n_vertices];
        for (i, &v) in self.chain.vertices.iter().enumerate() {
            out[v] = pose[i];
        }
        out
    }

    fn link_ok(&self, pose: &[Point], i: usize) -> bool {
        let (a, b) = (&pose[i - 1], &pose[i]);
        if !self.scene.in_bounds(b) || segment_blocked(self.scene, a, b, self.sb.link_width) {
            return false;
        }
        let Some(lim) = &self.limits else { return true };
        let ang = |k: usize| (pose[k].y() - pose[k - 1].y()).atan2(pose[k].x() - pose[k - 1].x());
        let rel = if i == 1 {
            ang(1)
        } else {
            wrap(ang(i) - ang(i - 1))
        };
        let [lo, hi] = lim[i - 1];
        lo <= rel && rel <= hi
    }

    fn pose_ok(&self, pose: &[Point]) -> bool {
        !pose_collides(self.scene, self.sb, &self.to_robot(pose))
            && (1..pose.len()).all(|i| self.link_ok(pose, i))
    }
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a < -PI {
        a += 2.0 * PI;
    }
    a
}

/// Greedy projection: keep the leader at `lead`, then place each following
/// key point at the collision-free angle closest to where it was, over a
/// ring of discretized angles, backtracking within a bounded budget.
#[allow(clippy::too_many_arguments)]
fn project_pose(
    check: &ChainCheck,
    prev: &[Point],
    target: Option<&[Point]>,
    lead: Point,
    lengths: &[f64],
    step: f64,
    angle_steps: usize,
    ring: usize,
) -> Option<Vec<Point>> {
    let mut pose = vec![lead];
    let mut budget = 4096usize;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        check: &ChainCheck,
        prev: &[Point],
        target: Option<&[Point]>,
        lengths: &[f64],
        step: f64,
        dth: f64,
        ring: usize,
        pose: &mut Vec<Point>,
        budget: &mut usize,
    ) -> bool {
        let i = pose.len();
        if i == prev.len() {
            return true;
        }
        let a = pose[i - 1];
        // never coarser than half the step the link end may travel
        let dth = dth.min(0.5 * step / lengths[i - 1]);
        let angle = |q: &Point| (q.y() - a.y()).atan2(q.x() - a.x());
        let base = angle(&prev[i]);
        let pref = target.map_or(base, |t| angle(&t[i]));
        let mut offs: Vec<f64> = (-(ring as i64)..=ring as i64).map(|j| j as f64).collect();
        offs.sort_by(|x, y| {
            wrap(base + x * dth - pref)
                .abs()
                .total_cmp(&wrap(base + y * dth - pref).abs())
        });
        for off in offs {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let th = base + off * dth;
            let q = Point::new2(
                a.x() + lengths[i - 1] * th.cos(),
                a.y() + lengths[i - 1] * th.sin(),
            );
            if q.dist(&prev[i]) > step * STEP_SLACK {
                continue;
            }
            pose.push(q);
            if check.link_ok(pose, i)
                && rec(check, prev, target, lengths, step, dth, ring, pose, budget)
            {
                return true;
            }
            pose.pop();
        }
        false
    }
    let dth = 2.0 * PI / angle_steps as f64;
    if rec(
        check,
        prev,
        target,
        lengths,
        step,
        dth,
        ring,
        &mut pose,
        &mut budget,
    ) {
        Some(pose)
    } else {
        None
    }
}

/// Move a planar open chain along the pieces of its leader's route. The
/// leader runs the trail made of the reversed start chain, the route and the
/// reversed goal chain; followers stay on the trail when that is collision
/// free, otherwise they are projected onto nearby free angles.
pub fn interpolate_chain(
    pieces: &[Vec<Point>],
    start: &[Point],
    goal: &[Point],
    scene: &crate::scene::Scene,
    spec: &RobotSpec,
    opts: &PlanOptions,
) -> Result<GeometricPlan> {
    let sb = build_complex(spec)?;
    let chain = sb
        .as_serial()
        .ok_or_else(|| Error::Unsupported("interpolation needs an open serial chain".into()))?
        .clone();
    if scene.dim() != 2 {
        return Err(Error::Unsupported(
            "chain interpolation is planar only".into(),
        ));
    }
    let lengths: Vec<f64> = chain.links.iter().map(|&e| sb.lengths[e]).collect();
    let limits = spec
        .joint_limits
        .as_ref()
        .map(|l| chain.links.iter().map(|&e| l[e]).collect());
    let check = ChainCheck {
        scene,
        sb: &sb,
        chain: &chain,
        limits,
    };
    let along = |p: &[Point]| chain.vertices.iter().map(|&v| p[v]).collect::<Vec<_>>();
    let (s, g) = (along(start), along(goal));
    let mut pts: Vec<Point> = s.iter().rev().copied().collect();
    for piece in pieces {
        pts.push(piece[0]);
        pts.push(*piece.last().expect("non-empty piece"));
    }
    pts.extend(g.iter().rev().copied());
    dedup_points(&mut pts);
    let trail = Trail { pts };
    let n = s.len();
    let mut lead = Param { seg: n - 2, t: 1.0 };
    let mut poses = vec![s.clone()];
    let mut repaired = 0;
    let min_ds = opts.step / 1024.0;
    let mut ds = opts.step;
    let mut on_trail = true;
    while lead != trail.end() {
        let cur = poses.last().expect("non-empty").clone();
        let next = trail.advance(lead, ds);
        let within = |p: &Vec<Point>| max_displacement(p, &cur) <= opts.step * STEP_SLACK;
        let target = trail_pose(&trail, next, &lengths);
        let free = target.as_ref().filter(|p| check.pose_ok(p));
        let accepted = match free {
            Some(p) if within(p) => {
                on_trail = true;
                Some(p.clone())
            }
            // followers outpace the leader at a bend: take a shorter step
            Some(_) if on_trail && ds > min_ds => None,
            _ => {
                let l = trail.at(next);
                let r = (1..=opts.retries).find_map(|r| {
                    let ring = (r * opts.angle_steps / 16).max(1);
                    project_pose(
                        &check,
                        &cur,
                        target.as_deref(),
                        l,
                        &lengths,
                        opts.step,
                        opts.angle_steps,
                        ring,
                    )
                    .filter(|p| check.pose_ok(p))
                });
                if r.is_some() {
                    repaired += 1;
                    on_trail = false;
                }
                r
            }
        };
        match accepted {
            Some(p) => {
                poses.push(p);
                lead = next;
                ds = (ds * 2.0).min(opts.step);
            }
            None if ds > min_ds => ds /= 2.0,
            None => {
                return Err(Error::Validation(format!(
                    "interpolation stuck after {} waypoints",
                    poses.len()
                )))
            }
        }
    }
    // settle: leader holds still while followers are drawn onto the goal pose
    let total: f64 = lengths.iter().sum();
    let mut settle = (8.0 * total / opts.step).ceil() as usize;
    while settle > 0 && max_displacement(poses.last().expect("non-empty"), &g) > LENGTH_TOL {
        settle -= 1;
        let cur = poses.last().expect("non-empty").clone();
        if max_displacement(&cur, &g) <= opts.step {
            poses.push(g.clone());
            break;
        }
        let ring = (opts.retries * opts.angle_steps / 16).max(1);
        match project_pose(
            &check,
            &cur,
            Some(&g),
            g[0],
            &lengths,
            opts.step,
            opts.angle_steps,
            ring,
        ) {
            Some(p)
                if check.pose_ok(&p) && max_displacement(&p, &g) < max_displacement(&cur, &g) =>
            {
                poses.push(p)
            }
            _ => break,
        }
    }
    let last = poses.last().expect("non-empty");
    let reaches_goal = max_displacement(last, &g) <= LENGTH_TOL;
    if reaches_goal {
        *poses.last_mut().expect("non-empty") = g.clone();
    }
    let waypoints: Vec<Vec<Point>> = poses.iter().map(|p| check.to_robot(p)).collect();
    Ok(finish_plan(
        waypoints,
        scene,
        &sb,
        opts.step,
        reaches_goal,
        repaired,
    ))
}

fn finish_plan(
    waypoints: Vec<Vec<Point>>,
    scene: &crate::scene::Scene,
    sb: &RobotComplex,
    step: f64,
    reaches_goal: bool,
    repaired_steps: usize,
) -> GeometricPlan {
    let collision_free = waypoints.iter().all(|w| !pose_collides(scene, sb, w));
    let max_length_error = waypoints
        .iter()
        .map(|w| length_error(sb, w))
        .fold(0.0, f64::max);
    let max_step = waypoints
        .windows(2)
        .map(|p| max_displacement(&p[0], &p[1]))
        .fold(0.0, f64::max);
    GeometricPlan {
        validity: Validity {
            collision_free,
            lengths_preserved: max_length_error <= LENGTH_TOL,
            step_bounded: max_step <= step * STEP_SLACK,
            reaches_goal,
        },
        waypoints,
        regions: Vec::new(),
        class: Vec::new(),
        max_length_error,
        max_step,
        repaired_steps,
        representation: None,
    }
}

/// Straight runs through narrow interfaces so long links can pass
/// aligned with the passage. `centroids[i]` is where the route crosses
/// from `walk[i]` to `walk[i + 1]`.
fn narrow_runs(
    jc: &JointCover,
    walk: &[RegionId],
    route: &[Point],
    scene: &crate::scene::Scene,
    sb: &RobotComplex,
) -> (Vec<Point>, Vec<bool>) {
    let reach = sb.lengths.iter().copied().fold(0.0, f64::max);
    let w = sb.link_width;
    let t = jc.triangulation();
    let mut out: Vec<Point> = route.to_vec();
    let mut keep = vec![false; out.len()];
    let mut i = 0;
    while i + 1 < walk.len() {
        let narrow = |i: usize| interface_width(jc, walk[i], walk[i + 1]) < 2.0 * (w + reach);
        if !narrow(i) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 2 < walk.len() && narrow(j + 1) {
            j += 1;
        }
        let (sa, ka) = widest_facet(jc, walk[i], walk[i + 1]);
        let (sz, kz) = widest_facet(jc, walk[j], walk[j + 1]);
        let (ca, cz) = (facet_centroid(jc, sa, ka), facet_centroid(jc, sz, kz));
        let na = facet_normal(t, sa, ka);
        let nz = facet_normal(t, sz, kz);
        let ia = out.iter().position(|p| p.coords() == ca.coords());
        let iz = out.iter().rposition(|p| p.coords() == cz.coords());
        if let (Some(ia), Some(iz)) = (ia, iz) {
            let mut d = reach;
            for _ in 0..5 {
                let (pa, pz) = (ca.sub(&na.scale(d)), cz.add(&nz.scale(d)));
                let clear = |a: &Point, b: &Point| !segment_blocked(scene, a, b, w);
                let ok = scene.in_bounds(&pa)
                    && scene.in_bounds(&pz)
                    && clear(&pa, &ca)
                    && clear(&cz, &pz)
                    && (ia == 0 || clear(&out[ia - 1], &pa))
                    && (iz + 1 == out.len() || clear(&pz, &out[iz + 1]));
                if ok {
                    out.insert(iz + 1, pz);
                    keep.insert(iz + 1, true);
                    out.insert(ia, pa);
                    keep.insert(ia, true);
                    break;
                }
                d /= 2.0;
            }
        }
        i = j + 1;
    }
    (out, keep)
}

/// Unit normal of facet `k` of simplex `s`, pointing out of `s`.
fn facet_normal(t: &crate::delaunay::Triangulation, s: usize, k: usize) -> Point {
    let f: Vec<Point> = t.facet(s, k).iter().map(|&v| t.points()[v]).collect();
    let opp = t.points()[t.simplex(s)[k]];
    let n = if f.len() == 2 {
        let d = f[1].sub(&f[0]);
        Point::new2(-d.y(), d.x())
    } else {
        crate::geom::cross(&f[1].sub(&f[0]), &f[2].sub(&f[0]))
    };
    let n = n.scale(1.0 / n.norm2().sqrt());
    if n.dot(&opp.sub(&f[0])) > 0.0 {
        n.scale(-1.0)
    } else {
        n
    }
}

/// Full pipeline: existence check, region walks, realization and
/// interpolation. Returns up to `opts.alternatives` class-distinct plans.
pub fn plan(
    scene: &crate::scene::Scene,
    start: &[Point],
    goal: &[Point],
    jc: &JointCover,
    spec: &RobotSpec,
    opts: &PlanOptions,
) -> Result<PlanOutcome> {
    let sb = build_complex(spec)?;
    for (name, c) in [("start", start), ("goal", goal)] {
        if c.len() != sb.n_vertices {
            return Err(Error::Validation(format!(
                "{name} has {} key points, robot has {}",
                c.len(),
                sb.n_vertices
            )));
        }
        if length_error(&sb, c) > 1e-6 {
            return Err(Error::Validation(format!(
                "{name} does not respect the link lengths"
            )));
        }
        if pose_collides(scene, &sb, c) {
            return Err(Error::Validation(format!(
                "{name} configuration is in collision"
            )));
        }
    }
    if let Existence::Certificate(c) = check_existence(start, goal, jc, &sb, opts.length_bound)? {
        return Ok(PlanOutcome::Certificate { certificate: c });
    }
    let point_robot = sb.n_vertices == 1;
    let chain = if point_robot {
        None
    } else {
        Some(
            sb.as_serial()
                .ok_or_else(|| {
                    Error::Unsupported(
                        "planning needs a point robot or an open serial chain".into(),
                    )
                })?
                .clone(),
        )
    };
    // the leader is key point 0 for a point, the chain's first vertex otherwise
    let (lead, target) = match &chain {
        None => (start[0], goal[0]),
        Some(c) => (
            start[c.vertices[0]],
            goal[*c.vertices.last().expect("chain")],
        ),
    };
    let from = jc.region_of_point(&lead)?;
    let to = jc.region_of_point(&target)?;
    let need = min_cross_section(&sb);
    let widths: HashMap<(RegionId, RegionId), f64> = jc
        .adjacency()
        .iter()
        .flat_map(|&(a, b)| {
            let w = if need == 0.0 {
                f64::INFINITY
            } else {
                interface_width(jc, a, b)
            };
            [((a, b), w), ((b, a), w)]
        })
        .collect();
    let feasible = |a: RegionId, b: RegionId| widths[&(a, b)] >= need;
    let budget = opts.alternatives * opts.candidates_per_alternative.max(1);
    let walks = region_walks(jc, from, to, budget, &feasible);
    let s_state = state_of(start, jc)?;
    let g_state = state_of(goal, jc)?;
    let mut plans: Vec<GeometricPlan> = Vec::new();
    let mut failed = Vec::new();
    for walk in walks {
        if plans.len() >= opts.alternatives {
            break;
        }
        let tp = topological_from_walk(walk.clone(), &s_state, &g_state, jc, &sb);
        let attempt = match &chain {
            None => realize_point_path(&tp, &lead, &target, jc).map(|route| {
                let wps: Vec<Vec<Point>> = densify(&route, opts.step)
                    .into_iter()
                    .map(|p| vec![p])
                    .collect();
                let reaches = wps.last().is_some_and(|w| w[0] == target);
                finish_plan(wps, scene, &sb, opts.step, reaches, 0)
            }),
            Some(_) => realize_point_path(&tp, &lead, &target, jc).and_then(|route| {
                let (route, keep) = narrow_runs(jc, &walk, &route, scene, &sb);
                let mut pieces = Vec::new();
                let mut from = 0;
                for i in 1..route.len() {
                    if keep[i] || i + 1 == route.len() {
                        pieces.extend(split_visible(&route[from..=i], scene, sb.link_width));
                        from = i;
                    }
                }
                interpolate_chain(&pieces, start, goal, scene, spec, opts)
            }),
        };
        let mut p = match attempt {
            Ok(p) if p.validity.ok() => p,
            _ => {
                failed.push(PrunedSequence {
                    regions: walk,
                    reason: PruneReason::InterpolationFailed,
                });
                continue;
            }
        };
        p.regions = walk;
        let rep = refine_path(&p.waypoints, jc, 30).and_then(|w| path_representation(&w, jc, &sb));
        if let Ok(rep) = &rep {
            if plans.iter().any(|q| q.representation.as_ref() == Some(rep)) {
                continue;
            }
            p.class = rep.states.iter().map(|s| s.to_string()).collect();
        } else {
            p.class = tp.states.iter().map(|s| s.to_string()).collect();
        }
        p.representation = rep.ok();
        plans.push(p);
    }
    if plans.is_empty() {
        let dist = reachable(&region_neighbors(jc), from, &|a, b| feasible(a, b));
        return Ok(PlanOutcome::Certificate {
            certificate: NonExistenceCertificate {
                kind: CertificateKind::EmbeddingInfeasible,
                heuristic: true,
                key_point: chain.as_ref().map_or(0, |c| c.vertices[0]),
                start_region: from,
                goal_region: to,
                reachable: (0..jc.regions().len())
                    .filter(|&r| dist[r].is_some())
                    .collect(),
                length_bound: opts.length_bound,
                sequences: failed,
                truncated: false,
            },
        });
    }
    Ok(PlanOutcome::Plans { plans })
}
