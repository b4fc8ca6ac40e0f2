//! Separated nets in intervals, the S-sets they induce, and the uniformly
//! bounded covers `U_l` built from them.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::median::{MedianGraph, VertexSet, DEFAULT_CLIQUE_CAP};
use crate::metric::{self, Cover, CoverMetrics, FiniteMetricSpace, SSystem};
use crate::normal::{NormalGeometry, SphereDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub eta: u64,
    pub k: u64,
    pub m: u64,
    pub n: u64,
}

impl Constants {
    /// `K = (η-1)η/2`, `M = 3η + 3 + K`, `N = (3M)^η η!`.
    pub fn for_rank(eta: u64) -> Result<Self> {
        if eta == 0 {
            return Err(Error::precondition("rank must be at least 1"));
        }
        let k = (eta - 1) * eta / 2;
        let m = 3 * eta + 3 + k;
        let overflow = || Error::Budget(format!("N overflows for rank {eta}"));
        let power = (3 * m)
            .checked_pow(u32::try_from(eta).map_err(|_| overflow())?)
            .ok_or_else(overflow)?;
        let factorial = (1..=eta).try_fold(1u64, |acc, i| acc.checked_mul(i)).ok_or_else(overflow)?;
        let n = power.checked_mul(factorial).ok_or_else(overflow)?;
        Ok(Constants { eta, k, m, n })
    }

    /// `3M`, which also equals `3K + 9η + 9`.
    pub fn three_m(&self) -> u64 {
        3 * self.m
    }

    /// Radius bound `S_l = M·l`.
    pub fn radius(&self, l: u64) -> u64 {
        self.m * l
    }
}

/// A separated net `C` in `[base, apex]` with its projection `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub base: usize,
    pub apex: usize,
    pub l: usize,
    pub points: VertexSet,
    projections: HashMap<usize, VertexSet>,
}

impl Net {
    /// `p(z)` for `z` in the interval.
    pub fn projection(&self, z: usize) -> Result<&VertexSet> {
        self.projections.get(&z).ok_or_else(|| {
            Error::precondition(format!(
                "{z} is outside the interval [{}, {}]",
                self.base, self.apex
            ))
        })
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.projections.keys().copied()
    }
}

/// Builds nets at a fixed scale `l`, memoized by the ordered pair
/// `(base, apex)`. Safe to share across threads.
pub struct NetBuilder<'g> {
    geo: NormalGeometry<'g>,
    l: usize,
    eta: usize,
    nets: RwLock<HashMap<(usize, usize), Arc<Net>>>,
    dims: RwLock<HashMap<(usize, usize), usize>>,
}

impl<'g> NetBuilder<'g> {
    pub fn new(graph: &'g MedianGraph, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::precondition("scale l must be at least 1"));
        }
        let geo = NormalGeometry::new(graph)?;
        let eta = graph.dimension(None, DEFAULT_CLIQUE_CAP)?.max(1);
        Ok(NetBuilder {
            geo,
            l,
            eta,
            nets: RwLock::new(HashMap::new()),
            dims: RwLock::new(HashMap::new()),
        })
    }

    pub fn with_verification(mut self, verify: bool) -> Self {
        self.geo = self.geo.with_verification(verify);
        self
    }

    pub fn geometry(&self) -> &NormalGeometry<'g> {
        &self.geo
    }

    pub fn graph(&self) -> &'g MedianGraph {
        self.geo.graph()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Rank of the whole complex, at least 1.
    pub fn rank(&self) -> usize {
        self.eta
    }

    pub fn constants(&self) -> Result<Constants> {
        Constants::for_rank(self.eta as u64)
    }

    pub fn interval_dimension(&self, a: usize, b: usize) -> Result<usize> {
        if let Some(&d) = self.dims.read().expect("cache poisoned").get(&(a, b)) {
            return Ok(d);
        }
        let d = self.graph().dimension(Some((a, b)), DEFAULT_CLIQUE_CAP)?;
        self.dims.write().expect("cache poisoned").insert((a, b), d);
        Ok(d)
    }

    pub fn net(&self, base: usize, apex: usize) -> Result<Arc<Net>> {
        self.graph().check_vertex(base)?;
        self.graph().check_vertex(apex)?;
        self.net_at_depth(base, apex, 0)
    }

    fn net_at_depth(&self, base: usize, apex: usize, depth: usize) -> Result<Arc<Net>> {
        if depth > self.eta {
            return Err(Error::invariant(format!(
                "net recursion at [{base}, {apex}] exceeded depth {}",
                self.eta
            )));
        }
        if let Some(net) = self.nets.read().expect("cache poisoned").get(&(base, apex)) {
            return Ok(Arc::clone(net));
        }
        let net = if self.interval_dimension(base, apex)? <= 1 {
            self.base_case(base, apex)?
        } else {
            self.recursive_case(base, apex, depth)?
        };
        let net = Arc::new(net);
        self.nets
            .write()
            .expect("cache poisoned")
            .entry((base, apex))
            .or_insert_with(|| Arc::clone(&net));
        Ok(net)
    }

    /// Points at normal distance `0, l, 2l, ...` from `base`, each point
    /// projecting to the last of them on its normal path.
    fn base_case(&self, base: usize, apex: usize) -> Result<Net> {
        let g = self.graph();
        let l = self.l;
        let row = self.geo.distances_from(base)?;
        let span = g.interval_set(base, apex);
        let mut points = VertexSet::with_capacity(g.vertex_count());
        let mut projections = HashMap::new();
        for z in span.ones() {
            let d = row[z] as usize;
            if d.is_multiple_of(l) {
                points.insert(z);
            }
            let target = self.geo.path(base, z)?.vertex(d / l * l);
            let mut p = VertexSet::with_capacity(g.vertex_count());
            p.insert(target);
            projections.insert(z, p);
        }
        Ok(Net {
            base,
            apex,
            l,
            points,
            projections,
        })
    }

    fn recursive_case(&self, base: usize, apex: usize, depth: usize) -> Result<Net> {
        let g = self.graph();
        let l = self.l;
        let size = g.vertex_count();
        let reach = self.geo.path(base, apex)?.len() / l;
        let mut points = VertexSet::with_capacity(size);
        points.insert(base);
        let mut shells: Vec<(SphereDecomposition, Vec<Arc<Net>>)> = Vec::with_capacity(reach);
        for n in 1..=reach {
            let dec = self.geo.sphere_decomposition(base, apex, n * l)?;
            let nets = dec
                .parts
                .iter()
                .map(|part| self.net_at_depth(part.x_h, dec.gate, depth + 1))
                .collect::<Result<Vec<_>>>()?;
            for net in &nets {
                points.union_with(&net.points);
            }
            shells.push((dec, nets));
        }

        let row = self.geo.distances_from(base)?;
        let mut projections = HashMap::new();
        for z in g.interval_set(base, apex).ones() {
            let n_z = row[z] as usize / l;
            let mut p = VertexSet::with_capacity(size);
            if n_z == 0 {
                p.insert(base);
            } else {
                let z_tilde = self.geo.path(base, z)?.vertex(n_z * l);
                let (dec, nets) = &shells[n_z - 1];
                for (part, net) in dec.parts.iter().zip(nets) {
                    if part.interval.contains(z_tilde) {
                        p.union_with(net.projection(z_tilde)?);
                    }
                }
                if p.is_clear() {
                    return Err(Error::invariant(format!(
                        "{z_tilde} lies in no part of the radius-{} sphere in [{base}, {apex}]",
                        n_z * l
                    )));
                }
            }
            projections.insert(z, p);
        }
        Ok(Net {
            base,
            apex,
            l,
            points,
            projections,
        })
    }

    /// `S̃(x, k, l)`: the `h_l`-images of `B(x, k)`.
    pub fn shadow(&self, x0: usize, x: usize, k: usize) -> Result<VertexSet> {
        let g = self.graph();
        let mut out = VertexSet::with_capacity(g.vertex_count());
        for y in g.ball(x, k as u32).ones() {
            out.insert(self.geo.h_map(x0, self.l, y)?);
        }
        Ok(out)
    }

    /// `S(x, k, l) = p_{x0,x}(S̃(x, k, l))`.
    pub fn s_set(&self, x0: usize, x: usize, k: usize) -> Result<VertexSet> {
        if k == 0 || k > 3 * self.l {
            return Err(Error::precondition(format!("k = {k} outside 1..={}", 3 * self.l)));
        }
        let shadow = self.shadow(x0, x, k)?;
        self.project_shadow(x0, x, &shadow)
    }

    fn project_shadow(&self, x0: usize, x: usize, shadow: &VertexSet) -> Result<VertexSet> {
        let g = self.graph();
        let net = self.net(x0, x)?;
        let mut out = VertexSet::with_capacity(g.vertex_count());
        for h in shadow.ones() {
            if !g.in_interval(x0, x, h) {
                return Err(Error::invariant(format!(
                    "h-image {h} escapes the interval [{x0}, {x}]"
                )));
            }
            out.union_with(net.projection(h)?);
        }
        Ok(out)
    }

    /// The S-system at basepoint `x0`, with radius bound `M·l`.
    pub fn s_system(&self, x0: usize) -> Result<SSystem> {
        let g = self.graph();
        g.check_vertex(x0)?;
        let n = g.vertex_count();
        let l = self.l;
        let h: Vec<usize> = (0..n)
            .map(|y| self.geo.h_map(x0, l, y))
            .collect::<Result<_>>()?;
        let sets = (0..n)
            .into_par_iter()
            .map(|x| {
                (1..=3 * l)
                    .map(|k| {
                        let mut shadow = VertexSet::with_capacity(n);
                        g.ball(x, k as u32).ones().for_each(|y| shadow.insert(h[y]));
                        self.project_shadow(x0, x, &shadow)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let c = self.constants()?;
        Ok(SSystem {
            l,
            basepoint: Some(x0),
            radius_bound: metric::dist((c.m * l as u64) as i64),
            sets,
        })
    }
}

/// The cover `U_l` of a graph together with its metrics at radius `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCover {
    pub basepoint: usize,
    pub l: usize,
    pub cover: Cover,
    pub metrics: CoverMetrics,
}

pub fn build_net(graph: &MedianGraph, base: usize, apex: usize, l: usize) -> Result<Net> {
    let builder = NetBuilder::new(graph, l)?;
    Ok(builder.net(base, apex)?.as_ref().clone())
}

pub fn build_cover(graph: &MedianGraph, x0: usize, l: usize) -> Result<GraphCover> {
    let builder = NetBuilder::new(graph, l)?;
    let system = builder.s_system(x0)?;
    cover_from_system(graph, &system)
}

pub fn cover_from_system(graph: &MedianGraph, system: &SSystem) -> Result<GraphCover> {
    let cover = metric::s_system_to_cover(system)?;
    let space = FiniteMetricSpace::from_graph(graph);
    let metrics = metric::cover_metrics(&space, &cover, metric::dist(system.l as i64))?;
    Ok(GraphCover {
        basepoint: system.basepoint.unwrap_or(0),
        l: system.l,
        cover,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::metric::dist;

    fn ids(set: &VertexSet) -> Vec<usize> {
        set.ones().collect()
    }

    #[test]
    fn constants_table() {
        let table = [(1, 0, 6, 18), (2, 1, 10, 1800), (3, 3, 15, 546_750)];
        for (eta, k, m, n) in table {
            let c = Constants::for_rank(eta).unwrap();
            assert_eq!((c.k, c.m, c.n), (k, m, n));
            assert_eq!(c.three_m(), 3 * c.k + 9 * eta + 9);
        }
        assert!(Constants::for_rank(0).is_err());
        assert!(matches!(Constants::for_rank(40), Err(Error::Budget(_))));
    }

    #[test]
    fn path_net() {
        let g = generators::path(4).unwrap();
        let net = build_net(&g, 0, 3, 2).unwrap();
        assert_eq!(ids(&net.points), vec![0, 2]);
        assert_eq!(ids(net.projection(3).unwrap()), vec![2]);
        assert_eq!(ids(net.projection(1).unwrap()), vec![0]);
        assert!(net.projection(3).is_ok());

        let trivial = build_net(&g, 2, 2, 3).unwrap();
        assert_eq!(ids(&trivial.points), vec![2]);
        assert_eq!(ids(trivial.projection(2).unwrap()), vec![2]);
    }

    #[test]
    fn grid_net_at_unit_scale() {
        let g = generators::grid(&[3, 3]).unwrap();
        let net = build_net(&g, 0, 8, 1).unwrap();
        assert_eq!(net.points.count_ones(..), 9);
        for z in 0..9 {
            assert_eq!(ids(net.projection(z).unwrap()), vec![z]);
        }
    }

    #[test]
    fn s_sets_on_path() {
        let g = generators::path(7).unwrap();
        let b = NetBuilder::new(&g, 1).unwrap();
        assert_eq!(ids(&b.s_set(0, 6, 1).unwrap()), vec![2, 3]);
        // every point of B(2, 1) is within normal distance 3 of 0
        assert_eq!(ids(&b.s_set(0, 2, 1).unwrap()), vec![0]);
        assert!(b.s_set(0, 6, 4).is_err());
        for x in 0..7 {
            for k in 1..3 {
                assert!(b.s_set(0, x, k).unwrap().is_subset(&b.s_set(0, x, k + 1).unwrap()));
            }
        }
    }

    #[test]
    fn covers() {
        let single = generators::path(1).unwrap();
        let c = build_cover(&single, 0, 1).unwrap();
        assert_eq!(c.cover.sets.len(), 1);
        assert_eq!(ids(&c.cover.sets[0]), vec![0]);

        let path = generators::path(7).unwrap();
        let c = build_cover(&path, 0, 1).unwrap();
        assert!(c.metrics.mesh <= dist(6));
        assert!(c.metrics.m_r <= 18);
        assert!(c.cover.uncovered(7).is_none());
    }
}
