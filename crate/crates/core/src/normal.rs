//! Normal cube paths, the normal metric, and the decomposition of normal
//! spheres inside an interval.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::median::{MedianGraph, VertexSet, WallId};

/// The unique normal cube path from `source` to `target`.
///
/// `cubes[i]` lists the walls crossed by the i-th cube (ascending);
/// `vertices[i]` is the i-th vertex, so `vertices[0] == source` and the last
/// entry is `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalPath {
    pub source: usize,
    pub target: usize,
    pub cubes: Vec<Vec<WallId>>,
    pub vertices: Vec<usize>,
}

impl NormalPath {
    /// Number of cubes, which is the normal distance.
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn vertex(&self, i: usize) -> usize {
        self.vertices[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    /// Count the cubes of the normal cube path.
    Path,
    /// Longest chain in the separation poset.
    Chain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub wall: WallId,
    pub x_h: usize,
    /// The interval `[x_h, gate]`.
    pub interval: VertexSet,
}

/// `[x0, x] ∩ S_nor(x0, n)` written as a union of intervals `[x_h, gate]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereDecomposition {
    pub basepoint: usize,
    pub apex: usize,
    pub radius: usize,
    pub gate: usize,
    /// One part per wall of the radius-th cube, ascending by wall id.
    pub parts: Vec<Part>,
}

impl SphereDecomposition {
    pub fn union(&self, n: usize) -> VertexSet {
        let mut set = VertexSet::with_capacity(n);
        for part in &self.parts {
            set.union_with(&part.interval);
        }
        set
    }
}

/// Normal-metric queries over one validated graph.
///
/// Distance rows are memoized per source; the cache is safe to share across
/// threads. With verification on, gate vertices and decompositions are
/// cross-checked against their brute-force characterizations.
pub struct NormalGeometry<'g> {
    graph: &'g MedianGraph,
    verify: bool,
    rows: RwLock<HashMap<usize, Arc<Vec<u32>>>>,
}

impl<'g> NormalGeometry<'g> {
    pub fn new(graph: &'g MedianGraph) -> Result<Self> {
        if !graph.is_validated() {
            return Err(Error::NotValidated);
        }
        Ok(NormalGeometry {
            graph,
            verify: false,
            rows: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_verification(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    pub fn graph(&self) -> &'g MedianGraph {
        self.graph
    }

    pub fn path(&self, x: usize, y: usize) -> Result<NormalPath> {
        let g = self.graph;
        let mut remaining = g.separating(x, y);
        let mut cur = x;
        let mut cubes = Vec::new();
        let mut vertices = vec![x];
        while cur != y {
            // walls at `cur` still separating it from `y`
            let step: Vec<WallId> = g
                .neighbors_with_walls(cur)
                .filter(|&(_, h)| remaining.contains(h))
                .map(|(_, h)| h)
                .collect();
            if step.is_empty() {
                return Err(Error::invariant(format!("normal path {x}->{y} stuck at {cur}")));
            }
            for (i, &h) in step.iter().enumerate() {
                if step[i + 1..].iter().any(|&k| !g.walls_cross(h, k)) {
                    return Err(Error::invariant(format!(
                        "walls at {cur} toward {y} do not span a cube"
                    )));
                }
            }
            // cross the cube diagonally, one edge at a time
            let mut todo = FixedBitSet::with_capacity(g.wall_count());
            for &h in &step {
                todo.insert(h);
            }
            for _ in 0..step.len() {
                let (next, h) = g
                    .neighbors_with_walls(cur)
                    .find(|&(_, h)| todo.contains(h))
                    .ok_or_else(|| Error::invariant(format!("cube at {cur} is not present")))?;
                todo.remove(h);
                remaining.remove(h);
                cur = next;
            }
            let mut cube = step;
            cube.sort_unstable();
            cubes.push(cube);
            vertices.push(cur);
        }
        Ok(NormalPath {
            source: x,
            target: y,
            cubes,
            vertices,
        })
    }

    pub fn distance(&self, x: usize, y: usize, mode: DistanceMode) -> Result<u32> {
        match mode {
            DistanceMode::Path => Ok(self.path(x, y)?.len() as u32),
            DistanceMode::Chain => Ok(self.longest_chain(x, y)),
        }
    }

    /// Length of the longest strict chain in H(x, y).
    ///
    /// Walls are processed by the size of their `x`-side: a strict inclusion
    /// of sides forces a strict increase in size.
    pub fn longest_chain(&self, x: usize, y: usize) -> u32 {
        let g = self.graph;
        let mut walls: Vec<(usize, WallId)> = g
            .separating(x, y)
            .ones()
            .map(|h| (g.wall(h).halfspace_of(x).count_ones(..), h))
            .collect();
        walls.sort_unstable();
        let mut best = vec![0u32; walls.len()];
        for i in 0..walls.len() {
            let (size, h) = walls[i];
            best[i] = 1 + (0..i)
                .filter(|&j| walls[j].0 < size && g.wall_le(x, walls[j].1, h))
                .map(|j| best[j])
                .max()
                .unwrap_or(0);
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Normal distances from `x` to every vertex (path mode), memoized.
    pub fn distances_from(&self, x: usize) -> Result<Arc<Vec<u32>>> {
        if let Some(row) = self.rows.read().expect("cache poisoned").get(&x) {
            return Ok(Arc::clone(row));
        }
        let row = (0..self.graph.vertex_count())
            .map(|y| Ok(self.path(x, y)?.len() as u32))
            .collect::<Result<Vec<u32>>>()?;
        let row = Arc::new(row);
        self.rows
            .write()
            .expect("cache poisoned")
            .entry(x)
            .or_insert_with(|| Arc::clone(&row));
        Ok(row)
    }

    pub fn normal_distance(&self, x: usize, y: usize) -> Result<u32> {
        Ok(self.distances_from(x)?[y])
    }

    /// Normal ball and sphere of radius `n` about `x`.
    pub fn ball_sphere(&self, x: usize, n: u32) -> Result<(VertexSet, VertexSet)> {
        let row = self.distances_from(x)?;
        let size = self.graph.vertex_count();
        let mut ball = VertexSet::with_capacity(size);
        let mut sphere = VertexSet::with_capacity(size);
        for (y, &d) in row.iter().enumerate() {
            if d <= n {
                ball.insert(y);
            }
            if d == n {
                sphere.insert(y);
            }
        }
        Ok((ball, sphere))
    }

    /// The n-th vertex of the normal cube path from `x0` to `x`.
    pub fn gate_vertex(&self, x0: usize, x: usize, n: usize) -> Result<usize> {
        let path = self.path(x0, x)?;
        if n > path.len() {
            return Err(Error::precondition(format!(
                "radius {n} exceeds d_nor({x0}, {x}) = {}",
                path.len()
            )));
        }
        let gate = path.vertex(n);
        if self.verify {
            let by_distance = self.farthest_in_normal_ball(x0, x, n)?;
            if by_distance != gate {
                return Err(Error::invariant(format!(
                    "gate of ({x0}, {x}, {n}): path vertex {gate} but farthest point {by_distance}"
                )));
            }
        }
        Ok(gate)
    }

    /// The unique d(x0, ·)-maximizer of `[x0, x] ∩ B_nor(x0, n)`.
    pub fn farthest_in_normal_ball(&self, x0: usize, x: usize, n: usize) -> Result<usize> {
        let g = self.graph;
        let row = self.distances_from(x0)?;
        let candidates: Vec<usize> = (0..g.vertex_count())
            .filter(|&z| g.in_interval(x0, x, z) && row[z] as usize <= n)
            .collect();
        let far = candidates.iter().map(|&z| g.dist(x0, z)).max().unwrap_or(0);
        let mut best = candidates.into_iter().filter(|&z| g.dist(x0, z) == far);
        match (best.next(), best.next()) {
            (Some(v), None) => Ok(v),
            _ => Err(Error::invariant(format!(
                "farthest point of [{x0},{x}] ∩ B_nor({x0},{n}) is not unique"
            ))),
        }
    }

    pub fn sphere_decomposition(&self, x0: usize, x: usize, n: usize) -> Result<SphereDecomposition> {
        let g = self.graph;
        let path = self.path(x0, x)?;
        if n == 0 || n > path.len() {
            return Err(Error::precondition(format!(
                "decomposition radius {n} outside 1..={}",
                path.len()
            )));
        }
        let gate = path.vertex(n);
        let span = g.interval_set(x0, gate);
        let mut parts = Vec::with_capacity(path.cubes[n - 1].len());
        for &h in &path.cubes[n - 1] {
            let face: Vec<usize> = span.ones().filter(|&w| g.separates(h, w, x0)).collect();
            let near = face.iter().map(|&w| g.dist(x0, w)).min().unwrap_or(0);
            let mut nearest = face.iter().copied().filter(|&w| g.dist(x0, w) == near);
            let x_h = match (nearest.next(), nearest.next()) {
                (Some(v), None) => v,
                _ => {
                    return Err(Error::invariant(format!(
                        "F_{h} for ({x0}, {x}, {n}) has no unique nearest point"
                    )))
                }
            };
            let interval = g.interval_set(x_h, gate);
            if interval.count_ones(..) != face.len() || face.iter().any(|&w| !interval.contains(w)) {
                return Err(Error::invariant(format!(
                    "F_{h} for ({x0}, {x}, {n}) is not the interval [{x_h}, {gate}]"
                )));
            }
            parts.push(Part {
                wall: h,
                x_h,
                interval,
            });
        }
        let decomposition = SphereDecomposition {
            basepoint: x0,
            apex: x,
            radius: n,
            gate,
            parts,
        };
        if self.verify {
            self.verify_decomposition(&decomposition)?;
        }
        Ok(decomposition)
    }

    fn verify_decomposition(&self, dec: &SphereDecomposition) -> Result<()> {
        let g = self.graph;
        let (x0, n) = (dec.basepoint, dec.radius);
        let (ball, sphere) = self.ball_sphere(x0, n as u32)?;
        let mut expected = g.interval_set(x0, dec.apex);
        expected.intersect_with(&sphere);
        if dec.union(g.vertex_count()) != expected {
            return Err(Error::invariant(format!(
                "parts of ({x0}, {}, {n}) do not union to the normal sphere slice",
                dec.apex
            )));
        }
        for part in &dec.parts {
            let h = part.wall;
            let mut matching = ball.ones().filter(|&u| {
                g.separates(h, x0, u)
                    && (0..g.wall_count()).all(|k| !g.walls_cross(h, k) || !g.separates(k, u, x0))
            });
            if matching.next() != Some(part.x_h) || matching.next().is_some() {
                return Err(Error::invariant(format!(
                    "x_{h} = {} is not characterized uniquely in B_nor({x0}, {n})",
                    part.x_h
                )));
            }
        }
        Ok(())
    }

    /// The 3l-th vertex of the normal cube path from `x` to `x0`, or `x0`
    /// when that path is shorter.
    pub fn h_map(&self, x0: usize, l: usize, x: usize) -> Result<usize> {
        if l == 0 {
            return Err(Error::precondition("h-map scale must be at least 1"));
        }
        let path = self.path(x, x0)?;
        Ok(if path.len() >= 3 * l {
            path.vertex(3 * l)
        } else {
            x0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn g(i: usize, j: usize) -> usize {
        3 * i + j
    }

    fn set(vs: &[usize]) -> Vec<usize> {
        let mut v = vs.to_vec();
        v.sort_unstable();
        v
    }

    #[test]
    fn grid_path() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap();
        let p = geo.path(g(0, 0), g(2, 1)).unwrap();
        assert_eq!(p.vertices, vec![g(0, 0), g(1, 1), g(2, 1)]);
        assert_eq!(p.cubes.len(), 2);
        assert_eq!(p.cubes[0].len(), 2);
        assert_eq!(p.cubes[1].len(), 1);
        // the first cube crosses the first wall of each axis
        assert!(grid.wall(p.cubes[0][0]).separates(g(0, 0), g(1, 1)));
        assert!(grid.wall(p.cubes[1][0]).separates(g(1, 0), g(2, 0)));
    }

    #[test]
    fn tree_and_trivial_paths() {
        let path = generators::path(4).unwrap();
        let geo = NormalGeometry::new(&path).unwrap();
        let p = geo.path(0, 3).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2, 3]);
        assert!(p.cubes.iter().all(|c| c.len() == 1));
        let q = geo.path(2, 2).unwrap();
        assert!(q.is_empty());
        assert_eq!(q.vertices, vec![2]);
    }

    #[test]
    fn unvalidated_graph_is_refused() {
        let raw = MedianGraph::from_edge_list(&[(0, 1)], false).unwrap();
        assert!(matches!(NormalGeometry::new(&raw), Err(Error::NotValidated)));
    }

    #[test]
    fn distances() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap();
        for mode in [DistanceMode::Path, DistanceMode::Chain] {
            assert_eq!(geo.distance(g(0, 0), g(2, 2), mode).unwrap(), 2);
            assert_eq!(geo.distance(g(2, 2), g(0, 0), mode).unwrap(), 2);
            assert_eq!(geo.distance(g(1, 1), g(1, 1), mode).unwrap(), 0);
        }
        let tree = generators::random_tree(12, 4).unwrap();
        let geo = NormalGeometry::new(&tree).unwrap();
        for x in 0..12 {
            for y in 0..12 {
                assert_eq!(geo.normal_distance(x, y).unwrap(), tree.dist(x, y));
            }
        }
    }

    #[test]
    fn balls_and_spheres() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap();
        let (ball, _) = geo.ball_sphere(g(0, 0), 1).unwrap();
        assert_eq!(
            ball.ones().collect::<Vec<_>>(),
            set(&[g(0, 0), g(1, 0), g(0, 1), g(1, 1)])
        );
        let (ball, sphere) = geo.ball_sphere(g(1, 2), 0).unwrap();
        assert_eq!(ball.ones().collect::<Vec<_>>(), vec![g(1, 2)]);
        assert_eq!(sphere, ball);

        let path = generators::path(4).unwrap();
        let geo = NormalGeometry::new(&path).unwrap();
        let (_, sphere) = geo.ball_sphere(0, 1).unwrap();
        assert_eq!(sphere.ones().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn gates() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap().with_verification(true);
        assert_eq!(geo.gate_vertex(g(0, 0), g(2, 1), 1).unwrap(), g(1, 1));
        assert_eq!(geo.gate_vertex(g(0, 0), g(2, 1), 2).unwrap(), g(2, 1));
        assert_eq!(geo.gate_vertex(g(0, 0), g(2, 1), 0).unwrap(), g(0, 0));
        assert!(matches!(
            geo.gate_vertex(g(0, 0), g(2, 1), 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn grid_decomposition() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap().with_verification(true);
        let d1 = geo.sphere_decomposition(g(0, 0), g(2, 2), 1).unwrap();
        assert_eq!(d1.gate, g(1, 1));
        let mut xh: Vec<usize> = d1.parts.iter().map(|p| p.x_h).collect();
        xh.sort_unstable();
        assert_eq!(xh, vec![g(0, 1), g(1, 0)]);
        assert_eq!(
            d1.union(9).ones().collect::<Vec<_>>(),
            set(&[g(1, 0), g(0, 1), g(1, 1)])
        );

        let d2 = geo.sphere_decomposition(g(0, 0), g(2, 2), 2).unwrap();
        assert_eq!(d2.gate, g(2, 2));
        let mut parts: Vec<Vec<usize>> = d2
            .parts
            .iter()
            .map(|p| p.interval.ones().collect())
            .collect();
        parts.sort();
        assert_eq!(
            parts,
            vec![set(&[g(0, 2), g(1, 2), g(2, 2)]), set(&[g(2, 0), g(2, 1), g(2, 2)])]
        );
        assert!(geo.sphere_decomposition(g(0, 0), g(2, 2), 0).is_err());
        assert!(geo.sphere_decomposition(g(0, 0), g(2, 2), 3).is_err());
    }

    #[test]
    fn tree_decomposition_is_single_point() {
        let tree = generators::random_tree(15, 2).unwrap();
        let geo = NormalGeometry::new(&tree).unwrap().with_verification(true);
        for x in 1..15 {
            let d = tree.dist(0, x) as usize;
            for n in 1..=d {
                let dec = geo.sphere_decomposition(0, x, n).unwrap();
                assert_eq!(dec.parts.len(), 1);
                assert_eq!(dec.parts[0].x_h, dec.gate);
            }
        }
    }

    #[test]
    fn h_maps() {
        let grid = generators::grid(&[3, 3]).unwrap();
        let geo = NormalGeometry::new(&grid).unwrap();
        assert_eq!(geo.h_map(g(0, 0), 1, g(2, 2)).unwrap(), g(0, 0));
        let path = generators::path(7).unwrap();
        let geo = NormalGeometry::new(&path).unwrap();
        assert_eq!(geo.h_map(0, 1, 6).unwrap(), 3);
        assert_eq!(geo.h_map(0, 2, 6).unwrap(), 0);
        assert_eq!(geo.h_map(0, 1, 0).unwrap(), 0);
        assert!(geo.h_map(0, 0, 3).is_err());
    }
}
