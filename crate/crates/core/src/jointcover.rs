//! Free regions: facet-connected components of free simplices that touch the
//! same obstacles (and the same workspace walls), with their labels, the
//! obstacle adjacency graph and the workspace complex.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::delaunay::Triangulation;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scene::Scene;

pub type RegionId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeRegion {
    pub id: RegionId,
    #[serde(serialize_with = "label_json")]
    pub label: BigInt,
    pub adjacent_obstacles: BTreeSet<u32>,
    /// Workspace walls touched, same bit layout as vertex provenance.
    pub walls: u8,
    pub compact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hole_index: Option<u32>,
    pub simplices: Vec<usize>,
}

/// Labels are arbitrary precision; JSON gets a number when it fits in i64.
pub fn label_json<S: Serializer>(l: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i64::try_from(l) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.serialize_str(&l.to_string()),
    }
}

/// Obstacle adjacency graph: one node per obstacle, one hyperedge per
/// distinct obstacle set of size two or more.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdjacencyGraph {
    pub nodes: BTreeSet<u32>,
    pub hyperedges: BTreeSet<BTreeSet<u32>>,
    pub edges: BTreeSet<(u32, u32)>,
}

impl AdjacencyGraph {
    fn from_sets<'a>(nodes: BTreeSet<u32>, sets: impl Iterator<Item = &'a BTreeSet<u32>>) -> Self {
        let mut g = AdjacencyGraph {
            nodes,
            ..Default::default()
        };
        for s in sets {
            if s.len() >= 2 {
                g.hyperedges.insert(s.clone());
                let v: Vec<u32> = s.iter().copied().collect();
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        g.edges.insert((v[i], v[j]));
                    }
                }
            }
        }
        g
    }
}

/// Workspace complex: vertices are regions, edges join facet-adjacent
/// regions and (in 3D) triangles join three regions around a shared edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WorkspaceComplex {
    pub vertices: usize,
    pub edges: BTreeSet<(RegionId, RegionId)>,
    pub triangles: BTreeSet<[RegionId; 3]>,
}

impl WorkspaceComplex {
    pub fn max_dim(&self) -> usize {
        if !self.triangles.is_empty() {
            2
        } else if !self.edges.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn adjacent(&self, a: RegionId, b: RegionId) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Is the sorted region set a simplex of the complex?
    pub fn contains_simplex(&self, regions: &[RegionId]) -> bool {
        match regions.len() {
            1 => regions[0] < self.vertices,
            2 => self.adjacent(regions[0], regions[1]),
            3 => {
                let mut t = [regions[0], regions[1], regions[2]];
                t.sort_unstable();
                self.triangles.contains(&t)
            }
            _ => false,
        }
    }

    pub fn neighbors(&self, r: RegionId) -> Vec<RegionId> {
        let mut v: Vec<RegionId> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == r {
                    Some(b)
                } else if b == r {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Debug)]
pub struct JointCover {
    tri: Triangulation,
    n_obstacles: usize,
    regions: Vec<FreeRegion>,
    region_of: Vec<Option<RegionId>>,
    adjacency: BTreeSet<(RegionId, RegionId)>,
    complex: WorkspaceComplex,
    fingerprint: u64,
}

/// Label of a region from its obstacle set, per the scheme: a single obstacle
/// `i` gets `i`, the `k`-th hole inside `i` gets `-i*k`, a pair `{i, j}` with
/// `j < i` gets `N*i + j`, and larger sets get `2^i1 * 3^i2 * 5^i3 ...` with
/// ids in descending order. The empty set (walls only) gets 0.
pub fn label_region(adjacent: &BTreeSet<u32>, hole_index: Option<u32>, n: usize) -> Result<BigInt> {
    if let Some(k) = hole_index {
        if adjacent.len() != 1 || k == 0 {
            return Err(Error::Label(format!(
                "hole index {k} needs exactly one obstacle, got {adjacent:?}"
            )));
        }
        let i = *adjacent.iter().next().expect("one element");
        return Ok(-(BigInt::from(i) * BigInt::from(k)));
    }
    let desc: Vec<u32> = adjacent.iter().rev().copied().collect();
    Ok(match desc.len() {
        0 => BigInt::zero(),
        1 => BigInt::from(desc[0]),
        2 => BigInt::from(n) * BigInt::from(desc[0]) + BigInt::from(desc[1]),
        _ => godel(&desc.iter().map(|&x| x as u64).collect::<Vec<_>>()),
    })
}

/// `prod p_j ^ e_j` over the first primes.
pub fn godel(exponents: &[u64]) -> BigInt {
    let mut out = BigInt::one();
    for (p, &e) in primes(exponents.len()).into_iter().zip(exponents) {
        out *= BigInt::from(p).pow(e as u32);
    }
    out
}

pub fn primes(n: usize) -> Vec<u64> {
    let mut v: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while v.len() < n {
        if v.iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| !c.is_multiple_of(p))
        {
            v.push(c);
        }
        c += 1;
    }
    v
}

type Key = (BTreeSet<u32>, u8);

/// Triangulate `scene` and merge its free simplices into regions.
pub fn build_joint_cover(scene: &Scene) -> Result<(JointCover, AdjacencyGraph)> {
    let t = crate::delaunay::triangulate(scene)?;
    let jc = JointCover::build(t, scene.n_obstacles());
    let g = jc.adjacency_graph();
    Ok((jc, g))
}

impl JointCover {
    /// Merge facet-adjacent free simplices with equal obstacle sets and
    /// wall masks into regions. Wall sides only separate the two sides of an
    /// obstacle, so a scene without obstacles keeps a single region.
    pub fn build(tri: Triangulation, n_obstacles: usize) -> JointCover {
        let keys: Vec<Option<Key>> = (0..tri.len())
            .map(|s| {
                if tri.inside_obstacle(s).is_some() {
                    return None;
                }
                let mut obs = BTreeSet::new();
                let mut walls = 0u8;
                for &v in tri.simplex(s) {
                    let p = tri.provenance(v);
                    obs.extend(p.obstacle);
                    walls |= p.walls;
                }
                Some((obs, if n_obstacles == 0 { 0 } else { walls }))
            })
            .collect();
        let region_of = components(&tri, |s| keys[s].is_some(), |a, b| keys[a] == keys[b]);
        let n_regions = region_of.iter().flatten().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_regions];
        for (s, r) in region_of.iter().enumerate() {
            if let Some(r) = r {
                members[*r].push(s);
            }
        }
        let mut regions: Vec<FreeRegion> = members
            .into_iter()
            .enumerate()
            .map(|(id, simplices)| {
                let (obs, walls) = keys[simplices[0]].clone().expect("free simplex");
                let compact = simplices
                    .iter()
                    .all(|&s| tri.neighbors(s).iter().all(|n| n.is_some()));
                FreeRegion {
                    id,
                    label: BigInt::zero(),
                    adjacent_obstacles: obs,
                    walls,
                    compact,
                    hole_index: None,
                    simplices,
                }
            })
            .collect();
        let mut hole_count: BTreeMap<u32, u32> = BTreeMap::new();
        for r in regions.iter_mut() {
            if let Some(i) = JointCover::enclosing_with(&tri, r, &region_of) {
                let k = hole_count.entry(i).or_insert(0);
                *k += 1;
                r.hole_index = Some(*k);
            }
            r.label = label_region(&r.adjacent_obstacles, r.hole_index, n_obstacles)
                .expect("valid label input");
        }
        let mut jc = JointCover {
            tri,
            n_obstacles,
            regions,
            region_of,
            adjacency: BTreeSet::new(),
            complex: WorkspaceComplex::default(),
            fingerprint: 0,
        };
        jc.finish_structure();
        jc
    }

    fn finish_structure(&mut self) {
        let tri = &self.tri;
        let mut adjacency = BTreeSet::new();
        for s in 0..tri.len() {
            let Some(a) = self.region_of[s] else { continue };
            for &n in tri.neighbors(s).iter().flatten() {
                if let Some(b) = self.region_of[n] {
                    if a != b {
                        adjacency.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        let mut triangles = BTreeSet::new();
        if tri.dim() == 3 {
            // regions around each edge of the tetrahedralization
            let mut around: HashMap<(usize, usize), BTreeSet<RegionId>> = HashMap::new();
            for s in 0..tri.len() {
                let Some(r) = self.region_of[s] else { continue };
                let v = tri.simplex(s);
                for i in 0..4 {
                    for j in i + 1..4 {
                        around
                            .entry((v[i].min(v[j]), v[i].max(v[j])))
                            .or_default()
                            .insert(r);
                    }
                }
            }
            for rs in around.values() {
                let v: Vec<RegionId> = rs.iter().copied().collect();
                for a in 0..v.len() {
                    for b in a + 1..v.len() {
                        for c in b + 1..v.len() {
                            let (x, y, z) = (v[a], v[b], v[c]);
                            if adjacency.contains(&(x, y))
                                && adjacency.contains(&(x, z))
                                && adjacency.contains(&(y, z))
                            {
                                triangles.insert([x, y, z]);
                            }
                        }
                    }
                }
            }
        }
        self.complex = WorkspaceComplex {
            vertices: self.regions.len(),
            edges: adjacency.clone(),
            triangles,
        };
        self.adjacency = adjacency;
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.n_obstacles.hash(&mut h);
        for p in self.tri.points() {
            for c in p.coords() {
                c.to_bits().hash(&mut h);
            }
        }
        self.region_of.hash(&mut h);
        self.fingerprint = h.finish();
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn dim(&self) -> usize {
        self.tri.dim()
    }

    pub fn n_obstacles(&self) -> usize {
        self.n_obstacles
    }

    pub fn regions(&self) -> &[FreeRegion] {
        &self.regions
    }

    pub fn region(&self, r: RegionId) -> &FreeRegion {
        &self.regions[r]
    }

    /// Region owning simplex `s`, if it is free.
    pub fn region_of_simplex(&self, s: usize) -> Option<RegionId> {
        self.region_of[s]
    }

    pub fn adjacency(&self) -> &BTreeSet<(RegionId, RegionId)> {
        &self.adjacency
    }

    pub fn complex(&self) -> &WorkspaceComplex {
        &self.complex
    }

    /// Identity of this cover, used to refuse comparing representations
    /// built over different covers.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn adjacency_graph(&self) -> AdjacencyGraph {
        let nodes: BTreeSet<u32> = (1..=self.n_obstacles as u32).collect();
        AdjacencyGraph::from_sets(nodes, self.regions.iter().map(|r| &r.adjacent_obstacles))
    }

    /// Sorted multiset of region labels.
    pub fn label_multiset(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self.regions.iter().map(|r| r.label.clone()).collect();
        v.sort();
        v
    }

    /// The region containing `p`; on a shared boundary the smallest id wins.
    pub fn region_of_point(&self, p: &Point) -> Result<RegionId> {
        self.region_of_point_hint(p, 0)
    }

    pub fn region_of_point_hint(&self, p: &Point, hint: usize) -> Result<RegionId> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        let star = self.tri.star_of_point(p, hint);
        if star.is_empty() {
            return Err(Error::OutsideWorkspace(p.to_vec()));
        }
        if let Some(r) = star.iter().filter_map(|&s| self.region_of[s]).min() {
            return Ok(r);
        }
        let o = star
            .iter()
            .find_map(|&s| self.tri.inside_obstacle(s))
            .expect("simplex is free or inside");
        Err(Error::Containment(p.to_vec(), o))
    }

    /// Simplex containing `p` that belongs to the region `region_of_point` reports.
    pub fn simplex_of_point(&self, p: &Point, hint: usize) -> Result<usize> {
        let r = self.region_of_point_hint(p, hint)?;
        Ok(self
            .tri
            .star_of_point(p, hint)
            .into_iter()
            .find(|&s| self.region_of[s] == Some(r))
            .expect("region simplex"))
    }

    /// Regions crossed by the straight segment `p -> q`, consecutive
    /// duplicates removed.
    pub fn trace_regions(&self, p: &Point, q: &Point, hint: usize) -> Result<Vec<RegionId>> {
        let simplices = self.tri.trace(p, q, hint)?;
        let mut out: Vec<RegionId> = Vec::new();
        for s in simplices {
            let Some(r) = self.region_of[s] else {
                let o = self.tri.inside_obstacle(s).expect("inside");
                return Err(Error::InvalidPath(format!(
                    "segment {p:?} -> {q:?} enters obstacle {o}"
                )));
            };
            if out.last() != Some(&r) {
                out.push(r);
            }
        }
        // a start point on a region boundary belongs to the smallest id
        let r0 = self.region_of_point_hint(p, hint)?;
        if out[0] != r0 {
            out.insert(0, r0);
        }
        let r1 = self.region_of_point_hint(q, hint)?;
        if *out.last().expect("non-empty") != r1 {
            out.push(r1);
        }
        Ok(out)
    }

    /// Facets shared by two regions, as (simplex in `a`, local facet index).
    pub fn interface(&self, a: RegionId, b: RegionId) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &s in &self.regions[a].simplices {
            for (k, n) in self.tri.neighbors(s).iter().enumerate() {
                if let Some(n) = n {
                    if self.region_of[*n] == Some(b) {
                        out.push((s, k));
                    }
                }
            }
        }
        out
    }

    /// Diameter of the largest ball inscribed in one of the region's simplices.
    pub fn clearance(&self, r: RegionId) -> f64 {
        self.regions[r]
            .simplices
            .iter()
            .map(|&s| 2.0 * inradius(&self.tri.simplex_points(s)))
            .fold(0.0, f64::max)
    }

    /// Betti numbers of the closed free subcomplex.
    pub fn free_betti(&self) -> [usize; 3] {
        let d = self.dim();
        let free: Vec<usize> = (0..self.tri.len())
            .filter(|&s| self.region_of[s].is_some())
            .collect();
        let mut faces: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); d + 1];
        for &s in &free {
            let v = self.tri.simplex(s);
            for mask in 1u32..(1 << (d + 1)) {
                let mut f: Vec<usize> = (0..=d)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| v[i])
                    .collect();
                f.sort_unstable();
                faces[f.len() - 1].insert(f);
            }
        }
        let chi: i64 = faces
            .iter()
            .enumerate()
            .map(|(k, f)| {
                if k % 2 == 0 {
                    f.len() as i64
                } else {
                    -(f.len() as i64)
                }
            })
            .sum();
        // components through edges
        let verts: Vec<usize> = faces[0].iter().map(|f| f[0]).collect();
        let mut uf = UnionFind::new(self.tri.points().len());
        for e in &faces[1] {
            uf.union(e[0], e[1]);
        }
        let b0 = verts
            .iter()
            .map(|&v| uf.find(v))
            .collect::<HashSet<_>>()
            .len();
        let b2 = if d == 3 { self.enclosed_voids() } else { 0 };
        let b1 = b0 as i64 + b2 as i64 - chi;
        [b0, b1.max(0) as usize, b2]
    }

    /// Facet-connected obstacle components that do not reach the hull.
    fn enclosed_voids(&self) -> usize {
        let inside = components(&self.tri, |s| self.region_of[s].is_none(), |_, _| true);
        let mut open: BTreeMap<usize, bool> = BTreeMap::new();
        for (s, comp) in inside.iter().enumerate() {
            if let Some(c) = *comp {
                let touches = self.tri.neighbors(s).iter().any(|n| n.is_none());
                *open.entry(c).or_insert(false) |= touches;
            }
        }
        open.values().filter(|t| !**t).count()
    }

    /// Cycle rank of the region adjacency graph. When it equals the first
    /// Betti number of free space (2D), reduced region sequences capture
    /// homotopy exactly.
    pub fn region_cycle_rank(&self) -> usize {
        let mut uf = UnionFind::new(self.regions.len());
        for &(a, b) in &self.adjacency {
            uf.union(a, b);
        }
        let c = (0..self.regions.len())
            .map(|r| uf.find(r))
            .collect::<HashSet<_>>()
            .len();
        self.adjacency.len() + c - self.regions.len()
    }

    /// Graph-level removal of one obstacle: its interior becomes free, and
    /// every region whose obstacle set mentioned it merges with neighbours
    /// that share the reduced set. The triangulation is reused.
    pub fn what_if_remove(&self, obstacle: u32) -> Result<(JointCover, AdjacencyGraph)> {
        let present: BTreeSet<u32> = self.adjacency_graph().nodes;
        if !present.contains(&obstacle) {
            return Err(Error::UnknownObstacle(obstacle));
        }
        let mut tri = self.tri.clone();
        let base = self.regions.len();
        // freed interior gets provisional ids after the existing regions
        let freed = components(
            &tri,
            |s| tri.inside_obstacle(s) == Some(obstacle),
            |_, _| true,
        );
        let mut region_of = self.region_of.clone();
        let mut sets: Vec<BTreeSet<u32>> = self
            .regions
            .iter()
            .map(|r| r.adjacent_obstacles.clone())
            .collect();
        let mut affected: Vec<bool> = sets.iter().map(|s| s.contains(&obstacle)).collect();
        let mut walls: Vec<u8> = self.regions.iter().map(|r| r.walls).collect();
        for (s, c) in freed.iter().enumerate() {
            if let Some(c) = c {
                let id = base + c;
                while sets.len() <= id {
                    sets.push(BTreeSet::new());
                    affected.push(true);
                    walls.push(0);
                }
                region_of[s] = Some(id);
                tri.set_inside(s, None);
            }
        }
        for s in sets.iter_mut() {
            s.remove(&obstacle);
        }
        let mut uf = UnionFind::new(sets.len());
        for s in 0..tri.len() {
            let Some(a) = region_of[s] else { continue };
            for &n in tri.neighbors(s).iter().flatten() {
                if let Some(b) = region_of[n] {
                    if a != b && (affected[a] || affected[b]) && sets[a] == sets[b] {
                        uf.union(a, b);
                    }
                }
            }
        }
        // renumber by first simplex so ids stay deterministic
        let mut renum: HashMap<usize, RegionId> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut new_of: Vec<Option<RegionId>> = vec![None; tri.len()];
        for s in 0..tri.len() {
            if let Some(r) = region_of[s] {
                let root = uf.find(r);
                let next = renum.len();
                let id = *renum.entry(root).or_insert(next);
                if id == members.len() {
                    members.push(Vec::new());
                }
                members[id].push(s);
                new_of[s] = Some(id);
            }
        }
        let mut hole_count: BTreeMap<u32, u32> = BTreeMap::new();
        let mut regions = Vec::with_capacity(members.len());
        for (id, simplices) in members.into_iter().enumerate() {
            let old = region_of[simplices[0]].expect("free");
            let adjacent_obstacles = sets[old].clone();
            let compact = simplices
                .iter()
                .all(|&s| tri.neighbors(s).iter().all(|n| n.is_some()));
            let w = simplices
                .iter()
                .map(|&s| walls[region_of[s].expect("free")])
                .fold(0, |a, b| a | b);
            let mut r = FreeRegion {
                id,
                label: BigInt::zero(),
                adjacent_obstacles,
                walls: w,
                compact,
                hole_index: None,
                simplices,
            };
            let inner = JointCover::enclosing_with(&tri, &r, &new_of);
            if let Some(i) = inner {
                let k = hole_count.entry(i).or_insert(0);
                *k += 1;
                r.hole_index = Some(*k);
            }
            r.label = label_region(&r.adjacent_obstacles, r.hole_index, self.n_obstacles)?;
            regions.push(r);
        }
        let mut jc = JointCover {
            tri,
            n_obstacles: self.n_obstacles,
            regions,
            region_of: new_of,
            adjacency: BTreeSet::new(),
            complex: WorkspaceComplex::default(),
            fingerprint: 0,
        };
        jc.finish_structure();
        let nodes: BTreeSet<u32> = present.into_iter().filter(|&i| i != obstacle).collect();
        let g = AdjacencyGraph::from_sets(nodes, jc.regions.iter().map(|r| &r.adjacent_obstacles));
        Ok((jc, g))
    }

    /// The obstacle enclosing a region completely, if any.
    fn enclosing_with(
        tri: &Triangulation,
        r: &FreeRegion,
        region_of: &[Option<RegionId>],
    ) -> Option<u32> {
        if r.adjacent_obstacles.len() != 1 {
            return None;
        }
        let mut seen = None;
        for &s in &r.simplices {
            for n in tri.neighbors(s) {
                let n = (*n)?;
                if region_of[n] == Some(r.id) {
                    continue;
                }
                let o = tri.inside_obstacle(n)?;
                if seen.is_some_and(|x| x != o) {
                    return None;
                }
                seen = Some(o);
            }
        }
        seen.filter(|o| r.adjacent_obstacles.contains(o))
    }

    /// JSON view: regions with geometry, region adjacency, G_A and S_W.
    pub fn to_json(&self) -> serde_json::Value {
        let regions: Vec<serde_json::Value> = self
            .regions
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).expect("region serializes");
                let geom: Vec<Vec<Point>> = r
                    .simplices
                    .iter()
                    .map(|&s| self.tri.simplex_points(s))
                    .collect();
                v["geometry"] = serde_json::to_value(geom).expect("points serialize");
                v["clearance"] = serde_json::json!(self.clearance(r.id));
                v
            })
            .collect();
        serde_json::json!({
            "dimension": self.dim(),
            "n_obstacles": self.n_obstacles,
            "regions": regions,
            "region_adjacency": self.adjacency,
            "adjacency_graph": self.adjacency_graph(),
            "workspace_complex": self.complex,
        })
    }
}

/// Connected components of the simplices selected by `keep`, joined through
/// facets when `same` holds. Component ids follow the lowest simplex index.
fn components(
    tri: &Triangulation,
    keep: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    let mut comp: Vec<Option<usize>> = vec![None; tri.len()];
    let mut next = 0;
    for s0 in 0..tri.len() {
        if comp[s0].is_some() || !keep(s0) {
            continue;
        }
        comp[s0] = Some(next);
        let mut q = VecDeque::from([s0]);
        while let Some(s) = q.pop_front() {
            for &n in tri.neighbors(s).iter().flatten() {
                if comp[n].is_none() && keep(n) && same(s, n) {
                    comp[n] = Some(next);
                    q.push_back(n);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Inscribed radius of a triangle or tetrahedron.
pub fn inradius(p: &[Point]) -> f64 {
    if p.len() == 3 {
        let (a, b, c) = (p[1].dist(&p[2]), p[0].dist(&p[2]), p[0].dist(&p[1]));
        let s = 0.5 * (a + b + c);
        let area = (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt();
        if s > 0.0 {
            area / s
        } else {
            0.0
        }
    } else {
        let vol = crate::geom::cross(&p[1].sub(&p[0]), &p[2].sub(&p[0]))
            .dot(&p[3].sub(&p[0]))
            .abs()
            / 6.0;
        let tri_area = |a: &Point, b: &Point, c: &Point| {
            0.5 * crate::geom::cross(&b.sub(a), &c.sub(a)).norm2().sqrt()
        };
        let area = tri_area(&p[1], &p[2], &p[3])
            + tri_area(&p[0], &p[2], &p[3])
            + tri_area(&p[0], &p[1], &p[3])
            + tri_area(&p[0], &p[1], &p[2]);
        if area > 0.0 {
            3.0 * vol / area
        } else {
            0.0
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets; the smaller root becomes the representative.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}
