//! Finite median graphs: the 1-skeleta of finite CAT(0) cube complexes.
//!
//! Vertices are dense ids `0..n`. Every vertex set is a [`VertexSet`] bitset
//! and every wall set a bitset over [`WallId`]s. A [`MedianGraph`] is built
//! once, carries its all-pairs distance table, and is immutable afterwards.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::clique::max_clique_size;
use crate::error::{Error, Result};

pub type VertexSet = FixedBitSet;
pub type WallId = usize;

pub const DEFAULT_VALIDATION_CAP: usize = 400;
pub const DEFAULT_CLIQUE_CAP: usize = 64;

/// How [`MedianGraph::build`] treats the median axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Check the median axiom exhaustively over all triples.
    pub validate: bool,
    /// Refuse exhaustive validation above this many vertices.
    pub vertex_cap: usize,
    /// Trust the input to be median (used for instances that are median by
    /// construction and too large to validate). Walls are still extracted.
    pub assume_median: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            validate: true,
            vertex_cap: DEFAULT_VALIDATION_CAP,
            assume_median: false,
        }
    }
}

impl BuildOptions {
    pub fn unvalidated() -> Self {
        BuildOptions {
            validate: false,
            ..Default::default()
        }
    }

    pub fn trusted() -> Self {
        BuildOptions {
            validate: false,
            assume_median: true,
            ..Default::default()
        }
    }
}

/// A wall, stored as its two complementary halfspaces.
///
/// The minus side is the one containing vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub id: WallId,
    pub minus: VertexSet,
    pub plus: VertexSet,
    /// Edges dual to the wall, each written `(u, v)` with `u < v`.
    pub edges: Vec<(usize, usize)>,
}

impl Hyperplane {
    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.minus.contains(x) != self.minus.contains(y)
    }

    /// The halfspace containing `x`.
    pub fn halfspace_of(&self, x: usize) -> &VertexSet {
        if self.minus.contains(x) {
            &self.minus
        } else {
            &self.plus
        }
    }

    /// True iff all four quarter intersections are nonempty.
    pub fn crosses(&self, other: &Hyperplane) -> bool {
        !self.minus.is_disjoint(&other.minus)
            && !self.minus.is_disjoint(&other.plus)
            && !self.plus.is_disjoint(&other.minus)
            && !self.plus.is_disjoint(&other.plus)
    }
}

/// Whether two walls of the same graph cross.
pub fn crossing(h: &Hyperplane, k: &Hyperplane) -> bool {
    h.crosses(k)
}

/// The interval `[a, b]` together with its separation poset.
///
/// Walls are ordered by `h <= k` iff the halfspace of `h` containing `a` is a
/// subset of the halfspace of `k` containing `a`.
#[derive(Debug, Clone)]
pub struct IntervalView {
    pub a: usize,
    pub b: usize,
    pub members: VertexSet,
    /// Separating walls, ascending by id.
    pub separating: Vec<WallId>,
    // leq[i] holds j iff separating[i] <= separating[j]
    leq: Vec<FixedBitSet>,
}

impl IntervalView {
    pub fn contains(&self, z: usize) -> bool {
        self.members.contains(z)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn position(&self, h: WallId) -> Option<usize> {
        self.separating.binary_search(&h).ok()
    }

    /// `h <= k` in the separation poset; `None` if either wall does not
    /// separate `a` from `b`.
    pub fn le(&self, h: WallId, k: WallId) -> Option<bool> {
        let (i, j) = (self.position(h)?, self.position(k)?);
        Some(self.leq[i].contains(j))
    }

    pub fn lt(&self, h: WallId, k: WallId) -> Option<bool> {
        Some(h != k && self.le(h, k)?)
    }

    pub fn comparable(&self, h: WallId, k: WallId) -> Option<bool> {
        Some(self.le(h, k)? || self.le(k, h)?)
    }
}

#[derive(Debug, Clone)]
pub struct MedianGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    dist: Vec<u32>,
    validated: bool,
    labels: Option<Vec<String>>,
    walls: Vec<Hyperplane>,
    // parallel to adj: the wall dual to each incident edge
    adj_walls: Vec<Vec<WallId>>,
    // per vertex: walls having the vertex on their plus side
    signature: Vec<FixedBitSet>,
    crossing: Vec<FixedBitSet>,
}

impl MedianGraph {
    /// Build from an edge list over vertices `0..=max id`, validating when
    /// asked. An empty edge list yields the one-vertex graph.
    pub fn from_edge_list(edges: &[(usize, usize)], validate: bool) -> Result<Self> {
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        let opts = if validate {
            BuildOptions::default()
        } else {
            BuildOptions::unvalidated()
        };
        Self::build(n, edges, opts)
    }

    pub fn build(n: usize, edges: &[(usize, usize)], opts: BuildOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let dist = all_pairs_bfs(n, &adj)?;

        let mut graph = MedianGraph {
            n,
            edges: canon,
            adj,
            dist,
            validated: false,
            labels: None,
            walls: Vec::new(),
            adj_walls: Vec::new(),
            signature: Vec::new(),
            crossing: Vec::new(),
        };

        let exhaustive = opts.validate && !(opts.assume_median && n > opts.vertex_cap);
        if exhaustive {
            if n > opts.vertex_cap {
                return Err(Error::ValidationBudget {
                    vertices: n,
                    cap: opts.vertex_cap,
                });
            }
            let intervals = graph.all_intervals();
            graph.check_median_axiom(&intervals)?;
            graph.extract_walls()?;
            graph.check_halfspace_convexity(&intervals)?;
            graph.validated = true;
        } else if opts.assume_median {
            graph.extract_walls()?;
            graph.validated = true;
        }
        Ok(graph)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Neighbours of `v` paired with the wall dual to the connecting edge.
    pub fn neighbors_with_walls(&self, v: usize) -> impl Iterator<Item = (usize, WallId)> + '_ {
        self.adj[v]
            .iter()
            .copied()
            .zip(self.adj_walls.get(v).into_iter().flatten().copied())
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NoSuchVertex(v))
        }
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> u32 {
        self.dist[x * self.n + y]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    pub fn in_interval(&self, a: usize, b: usize, z: usize) -> bool {
        self.dist(a, z) + self.dist(z, b) == self.dist(a, b)
    }

    pub fn interval_set(&self, a: usize, b: usize) -> VertexSet {
        let mut set = VertexSet::with_capacity(self.n);
        for z in 0..self.n {
            if self.in_interval(a, b, z) {
                set.insert(z);
            }
        }
        set
    }

    /// Closed edge-metric ball.
    pub fn ball(&self, x: usize, r: u32) -> VertexSet {
        let mut set = VertexSet::with_capacity(self.n);
        for z in 0..self.n {
            if self.dist(x, z) <= r {
                set.insert(z);
            }
        }
        set
    }

    pub fn is_convex(&self, set: &VertexSet) -> bool {
        let members: Vec<usize> = set.ones().collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if (0..self.n).any(|z| !set.contains(z) && self.in_interval(u, v, z)) {
                    return false;
                }
            }
        }
        true
    }

    fn require_validated(&self) -> Result<()> {
        if self.validated {
            Ok(())
        } else {
            Err(Error::NotValidated)
        }
    }

    /// The unique vertex of `[x,y] ∩ [y,z] ∩ [z,x]`.
    pub fn median(&self, x: usize, y: usize, z: usize) -> Result<usize> {
        self.require_validated()?;
        (0..self.n)
            .find(|&m| self.in_interval(x, y, m) && self.in_interval(y, z, m) && self.in_interval(z, x, m))
            .ok_or_else(|| Error::invariant(format!("no median for ({x}, {y}, {z})")))
    }

    pub fn hyperplanes(&self) -> Result<&[Hyperplane]> {
        self.require_validated()?;
        Ok(&self.walls)
    }

    pub fn wall(&self, h: WallId) -> &Hyperplane {
        &self.walls[h]
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn walls_cross(&self, h: WallId, k: WallId) -> bool {
        self.crossing[h].contains(k)
    }

    /// Walls having `x` on their plus side.
    pub fn signature(&self, x: usize) -> &FixedBitSet {
        &self.signature[x]
    }

    /// H(a, b): walls separating `a` from `b`.
    pub fn separating(&self, a: usize, b: usize) -> FixedBitSet {
        let mut set = self.signature[a].clone();
        set.symmetric_difference_with(&self.signature[b]);
        set
    }

    pub fn separates(&self, h: WallId, x: usize, y: usize) -> bool {
        self.signature[x].contains(h) != self.signature[y].contains(h)
    }

    /// `h <= k` relative to base `a`: the side of `h` holding `a` lies inside
    /// the side of `k` holding `a`.
    pub fn wall_le(&self, a: usize, h: WallId, k: WallId) -> bool {
        self.walls[h]
            .halfspace_of(a)
            .is_subset(self.walls[k].halfspace_of(a))
    }

    pub fn interval(&self, a: usize, b: usize) -> Result<IntervalView> {
        self.require_validated()?;
        let members = self.interval_set(a, b);
        let separating: Vec<WallId> = self.separating(a, b).ones().collect();
        let leq = separating
            .iter()
            .map(|&h| {
                let mut row = FixedBitSet::with_capacity(separating.len());
                for (j, &k) in separating.iter().enumerate() {
                    if self.wall_le(a, h, k) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        Ok(IntervalView {
            a,
            b,
            members,
            separating,
            leq,
        })
    }

    /// Maximum number of pairwise crossing walls, over all walls or over
    /// H(a, b) when a region is given.
    pub fn dimension(&self, region: Option<(usize, usize)>, clique_cap: usize) -> Result<usize> {
        self.require_validated()?;
        let walls: Vec<WallId> = match region {
            Some((a, b)) => self.separating(a, b).ones().collect(),
            None => (0..self.walls.len()).collect(),
        };
        self.crossing_clique(&walls, clique_cap)
    }

    pub(crate) fn crossing_clique(&self, walls: &[WallId], cap: usize) -> Result<usize> {
        let adjacency: Vec<FixedBitSet> = walls
            .iter()
            .map(|&h| {
                let mut row = FixedBitSet::with_capacity(walls.len());
                for (j, &k) in walls.iter().enumerate() {
                    if self.crossing[h].contains(k) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        max_clique_size(&adjacency, cap)
    }

    fn all_intervals(&self) -> Vec<FixedBitSet> {
        let n = self.n;
        let mut out = vec![FixedBitSet::new(); n * n];
        for a in 0..n {
            for b in a..n {
                let set = self.interval_set(a, b);
                out[b * n + a] = set.clone();
                out[a * n + b] = set;
            }
        }
        out
    }

    fn check_median_axiom(&self, intervals: &[FixedBitSet]) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            for y in x + 1..n {
                let xy = intervals[x * n + y].as_slice();
                for z in y + 1..n {
                    let yz = intervals[y * n + z].as_slice();
                    let zx = intervals[z * n + x].as_slice();
                    let count: u32 = xy
                        .iter()
                        .zip(yz)
                        .zip(zx)
                        .map(|((a, b), c)| (a & b & c).count_ones())
                        .sum();
                    if count != 1 {
                        let meet = (0..n)
                            .filter(|&m| {
                                intervals[x * n + y].contains(m)
                                    && intervals[y * n + z].contains(m)
                                    && intervals[z * n + x].contains(m)
                            })
                            .collect();
                        return Err(Error::NotMedian {
                            triple: (x, y, z),
                            meet,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Per-edge halfspace splits, deduplicated into walls.
    fn extract_walls(&mut self) -> Result<()> {
        let n = self.n;
        let mut index: HashMap<FixedBitSet, WallId> = HashMap::new();
        let mut walls: Vec<Hyperplane> = Vec::new();
        let mut edge_wall: HashMap<(usize, usize), WallId> = HashMap::new();
        for &(u, v) in &self.edges {
            let mut minus = VertexSet::with_capacity(n);
            let mut plus = VertexSet::with_capacity(n);
            for w in 0..n {
                match self.dist(w, u).cmp(&self.dist(w, v)) {
                    std::cmp::Ordering::Less => minus.insert(w),
                    std::cmp::Ordering::Greater => plus.insert(w),
                    std::cmp::Ordering::Equal => return Err(Error::NonConvexHalfspace(u, v)),
                }
            }
            if !minus.contains(0) {
                std::mem::swap(&mut minus, &mut plus);
            }
            let id = match index.get(&minus) {
                Some(&id) => id,
                None => {
                    let id = walls.len();
                    index.insert(minus.clone(), id);
                    walls.push(Hyperplane {
                        id,
                        minus,
                        plus,
                        edges: Vec::new(),
                    });
                    id
                }
            };
            walls[id].edges.push((u, v));
            edge_wall.insert((u, v), id);
        }

        let w = walls.len();
        let mut signature = vec![FixedBitSet::with_capacity(w); n];
        for wall in &walls {
            for x in wall.plus.ones() {
                signature[x].insert(wall.id);
            }
        }
        let adj_walls = self
            .adj
            .iter()
            .enumerate()
            .map(|(v, list)| list.iter().map(|&u| edge_wall[&(u.min(v), u.max(v))]).collect())
            .collect();
        let mut crossing = vec![FixedBitSet::with_capacity(w); w];
        for h in 0..w {
            for k in h + 1..w {
                if walls[h].crosses(&walls[k]) {
                    crossing[h].insert(k);
                    crossing[k].insert(h);
                }
            }
        }
        self.walls = walls;
        self.signature = signature;
        self.adj_walls = adj_walls;
        self.crossing = crossing;
        Ok(())
    }

    fn check_halfspace_convexity(&self, intervals: &[FixedBitSet]) -> Result<()> {
        let n = self.n;
        for wall in &self.walls {
            for side in [&wall.minus, &wall.plus] {
                let members: Vec<usize> = side.ones().collect();
                for (i, &u) in members.iter().enumerate() {
                    for &v in &members[i + 1..] {
                        if !intervals[u * n + v].is_subset(side) {
                            let (a, b) = wall.edges[0];
                            return Err(Error::NonConvexHalfspace(a, b));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Labels as an id-keyed map, for serialization.
    pub fn label_map(&self) -> Option<BTreeMap<usize, String>> {
        self.labels
            .as_ref()
            .map(|l| l.iter().cloned().enumerate().collect())
    }
}

fn all_pairs_bfs(n: usize, adj: &[Vec<usize>]) -> Result<Vec<u32>> {
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == u32::MAX {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(v) = row.iter().position(|&d| d == u32::MAX) {
            return Err(Error::Disconnected(v));
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> MedianGraph {
        crate::generators::grid(&[3, 3]).unwrap()
    }

    // (i, j) -> 3i + j
    fn g(i: usize, j: usize) -> usize {
        3 * i + j
    }

    #[test]
    fn path_and_square_are_median() {
        let path = MedianGraph::from_edge_list(&[(0, 1), (1, 2)], true).unwrap();
        assert!(path.is_validated());
        let square = MedianGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)], true).unwrap();
        assert!(square.is_validated());
        assert_eq!(square.hyperplanes().unwrap().len(), 2);
    }

    #[test]
    fn k23_is_rejected_with_witness() {
        // parts {0,1} and {2,3,4}
        let edges: Vec<_> = [0, 1]
            .iter()
            .flat_map(|&a| [2, 3, 4].map(|b| (a, b)))
            .collect();
        match MedianGraph::from_edge_list(&edges, true) {
            Err(Error::NotMedian { triple, meet }) => {
                assert_eq!(triple, (2, 3, 4));
                assert_eq!(meet, vec![0, 1]);
            }
            other => panic!("expected NotMedian, got {other:?}"),
        }
    }

    #[test]
    fn ingestion_errors() {
        assert!(matches!(
            MedianGraph::build(0, &[], BuildOptions::default()),
            Err(Error::EmptyGraph)
        ));
        assert!(matches!(
            MedianGraph::from_edge_list(&[(1, 1)], true),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            MedianGraph::from_edge_list(&[(0, 1), (1, 0)], true),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            MedianGraph::build(4, &[(0, 1), (2, 3)], BuildOptions::default()),
            Err(Error::Disconnected(2))
        ));
        assert!(matches!(
            MedianGraph::build(2, &[(0, 5)], BuildOptions::default()),
            Err(Error::VertexOutOfRange { .. })
        ));
        let big = crate::generators::path(30).unwrap();
        let opts = BuildOptions {
            vertex_cap: 10,
            ..Default::default()
        };
        assert!(matches!(
            MedianGraph::build(30, big.edges(), opts),
            Err(Error::ValidationBudget { .. })
        ));
    }

    #[test]
    fn unvalidated_graph_refuses_median_queries() {
        let g = MedianGraph::from_edge_list(&[(0, 1), (1, 2)], false).unwrap();
        assert!(!g.is_validated());
        assert!(matches!(g.median(0, 1, 2), Err(Error::NotValidated)));
        assert!(matches!(g.hyperplanes(), Err(Error::NotValidated)));
    }

    #[test]
    fn medians() {
        let grid = grid3();
        assert_eq!(grid.median(g(0, 0), g(2, 0), g(0, 2)).unwrap(), g(0, 0));
        assert_eq!(grid.median(g(2, 2), g(2, 2), g(0, 1)).unwrap(), g(2, 2));
        let path = crate::generators::path(4).unwrap();
        assert_eq!(path.median(0, 3, 2).unwrap(), 2);
    }

    #[test]
    fn intervals() {
        let grid = grid3();
        let iv = grid.interval(g(0, 0), g(1, 1)).unwrap();
        let members: Vec<_> = iv.members.ones().collect();
        assert_eq!(members, vec![g(0, 0), g(0, 1), g(1, 0), g(1, 1)]);
        assert_eq!(iv.separating.len(), 2);
        let (h, k) = (iv.separating[0], iv.separating[1]);
        assert_eq!(iv.comparable(h, k), Some(false));

        let single = grid.interval(4, 4).unwrap();
        assert_eq!(single.members.ones().collect::<Vec<_>>(), vec![4]);
        assert!(single.separating.is_empty());

        let path = crate::generators::path(4).unwrap();
        let iv = path.interval(0, 3).unwrap();
        assert_eq!(iv.len(), 4);
        // nested walls form a chain
        for &h in &iv.separating {
            for &k in &iv.separating {
                assert_eq!(iv.comparable(h, k), Some(true));
                assert_eq!(iv.le(h, k), Some(h <= k));
            }
        }
    }

    #[test]
    fn hyperplane_splits() {
        let path = crate::generators::path(3).unwrap();
        let walls = path.hyperplanes().unwrap();
        assert_eq!(walls.len(), 2);
        let splits: Vec<(Vec<usize>, Vec<usize>)> = walls
            .iter()
            .map(|w| (w.minus.ones().collect(), w.plus.ones().collect()))
            .collect();
        assert_eq!(splits, vec![(vec![0], vec![1, 2]), (vec![0, 1], vec![2])]);
        assert!(!crossing(&walls[0], &walls[1]));

        let square = MedianGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)], true).unwrap();
        let walls = square.hyperplanes().unwrap();
        assert!(crossing(&walls[0], &walls[1]));
        assert_eq!(walls[0].edges.len(), 2);

        let grid = grid3();
        let walls = grid.hyperplanes().unwrap();
        assert_eq!(walls.len(), 4);
        // walls splitting the first coordinate never cross each other
        let first: Vec<&Hyperplane> = walls
            .iter()
            .filter(|w| w.separates(g(0, 0), g(2, 0)))
            .collect();
        let second: Vec<&Hyperplane> = walls
            .iter()
            .filter(|w| w.separates(g(0, 0), g(0, 2)))
            .collect();
        assert_eq!((first.len(), second.len()), (2, 2));
        assert!(!crossing(first[0], first[1]));
        assert!(crossing(first[0], second[1]));
    }

    #[test]
    fn dimensions() {
        let tree = crate::generators::random_tree(10, 1).unwrap();
        assert_eq!(tree.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 1);
        assert_eq!(grid3().dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 2);
        assert_eq!(
            grid3().dimension(Some((g(0, 0), g(2, 0))), DEFAULT_CLIQUE_CAP).unwrap(),
            1
        );
        let q3 = crate::generators::grid(&[2, 2, 2]).unwrap();
        assert_eq!(q3.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 3);
        let point = MedianGraph::from_edge_list(&[], true).unwrap();
        assert_eq!(point.vertex_count(), 1);
        assert_eq!(point.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 0);
        assert!(matches!(q3.dimension(None, 2), Err(Error::CliqueCap(2))));
    }

    #[test]
    fn separation_count_matches_distance() {
        let grid = crate::generators::grid(&[3, 4]).unwrap();
        for x in 0..grid.vertex_count() {
            for y in 0..grid.vertex_count() {
                assert_eq!(grid.separating(x, y).count_ones(..) as u32, grid.dist(x, y));
            }
        }
    }
}
