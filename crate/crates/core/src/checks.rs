//! Exhaustive invariant checks over one instance.
//!
//! Every check walks its full domain and reports how many cases it looked
//! at and the first counterexample. Library errors raised while checking
//! count as failures, with the error text as the witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::median::{MedianGraph, VertexSet, DEFAULT_CLIQUE_CAP};
use crate::metric::{self, FiniteMetricSpace};
use crate::net::{self, NetBuilder};
use crate::normal::{DistanceMode, NormalGeometry, NormalPath};

/// Above this many vertices the five-point median identity is sampled.
pub const EXHAUSTIVE_MEDIAN_VERTICES: usize = 40;
const MEDIAN_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub witness: Option<String>,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    witness: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }
}

fn run(name: &str, body: impl FnOnce(&mut Tally) -> Result<()>) -> CheckResult {
    let mut tally = Tally::default();
    if let Err(e) = body(&mut tally) {
        tally.witness.get_or_insert_with(|| e.to_string());
    }
    CheckResult {
        name: name.to_string(),
        passed: tally.witness.is_none(),
        checked: tally.checked,
        witness: tally.witness,
    }
}

/// All normal cube paths of a graph, indexed `[x * n + y]`.
pub struct PathTable {
    n: usize,
    paths: Vec<NormalPath>,
}

impl PathTable {
    pub fn new(geo: &NormalGeometry<'_>) -> Result<Self> {
        let n = geo.graph().vertex_count();
        let paths = (0..n * n)
            .map(|i| geo.path(i / n, i % n))
            .collect::<Result<_>>()?;
        Ok(PathTable { n, paths })
    }

    pub fn get(&self, x: usize, y: usize) -> &NormalPath {
        &self.paths[x * self.n + y]
    }

    pub fn d_nor(&self, x: usize, y: usize) -> usize {
        self.get(x, y).len()
    }

    /// k-th vertex, staying at the target once the path has ended.
    fn vertex_at(&self, x: usize, y: usize, k: usize) -> usize {
        let p = self.get(x, y);
        p.vertices[k.min(p.len())]
    }
}

pub fn median_axioms(g: &MedianGraph) -> CheckResult {
    run("median_axioms", |t| {
        let n = g.vertex_count();
        if n <= EXHAUSTIVE_MEDIAN_VERTICES {
            let mut table = vec![0usize; n * n * n];
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        table[(x * n + y) * n + z] = g.median(x, y, z)?;
                    }
                }
            }
            let mu = |x: usize, y: usize, z: usize| table[(x * n + y) * n + z];
            for x in 0..n {
                for y in 0..n {
                    t.check(mu(x, x, y) == x, || format!("M1 fails at ({x},{x},{y})"));
                    for z in 0..n {
                        let m = mu(x, y, z);
                        let perms = [mu(x, z, y), mu(y, x, z), mu(y, z, x), mu(z, x, y), mu(z, y, x)];
                        t.check(perms.iter().all(|&p| p == m), || {
                            format!("M2 fails at ({x},{y},{z})")
                        });
                        for u in 0..n {
                            for v in 0..n {
                                let lhs = mu(m, u, v);
                                let rhs = mu(mu(x, u, v), mu(y, u, v), z);
                                t.check(lhs == rhs, || format!("M3 fails at ({x},{y},{z},{u},{v})"));
                            }
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..MEDIAN_SAMPLES {
                let [x, y, z, u, v] = [0; 5].map(|_| rng.random_range(0..n));
                let m = g.median(x, y, z)?;
                t.check(g.median(x, x, y)? == x, || format!("M1 fails at ({x},{x},{y})"));
                t.check(g.median(z, y, x)? == m && g.median(y, z, x)? == m, || {
                    format!("M2 fails at ({x},{y},{z})")
                });
                let lhs = g.median(m, u, v)?;
                let rhs = g.median(g.median(x, u, v)?, g.median(y, u, v)?, z)?;
                t.check(lhs == rhs, || format!("M3 fails at ({x},{y},{z},{u},{v})"));
            }
        }
        Ok(())
    })
}

/// For `z, w ∈ [x, y]`, `z ∈ [x, w]` implies `w ∈ [z, y]`.
pub fn interval_exchange(g: &MedianGraph) -> CheckResult {
    run("interval_exchange", |t| {
        let n = g.vertex_count();
        for x in 0..n {
            for y in 0..n {
                let span = g.interval_set(x, y);
                for z in span.ones() {
                    for w in span.ones() {
                        if g.in_interval(x, w, z) {
                            t.check(g.in_interval(z, y, w), || format!("x={x} y={y} z={z} w={w}"));
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// `d(z, y) = 1` implies the intervals `[x, z]` and `[x, y]` are nested.
pub fn weak_modularity(g: &MedianGraph) -> CheckResult {
    run("weak_modularity", |t| {
        let n = g.vertex_count();
        for x in 0..n {
            for &(a, b) in g.edges() {
                for (z, y) in [(a, b), (b, a)] {
                    let xz = g.interval_set(x, z);
                    let xy = g.interval_set(x, y);
                    t.check(xz.is_subset(&xy) || xy.is_subset(&xz), || {
                        format!("x={x} z={z} y={y}")
                    });
                }
            }
        }
        Ok(())
    })
}

/// Distance equals the number of walls with the two points on opposite
/// sides, counted from the halfspaces directly.
pub fn separation_count(g: &MedianGraph) -> CheckResult {
    run("separation_count", |t| {
        let walls = g.hyperplanes()?;
        let n = g.vertex_count();
        for x in 0..n {
            for y in 0..n {
                let count = walls
                    .iter()
                    .filter(|h| h.minus.contains(x) != h.minus.contains(y))
                    .count();
                t.check(count == g.dist(x, y) as usize, || format!("x={x} y={y}"));
            }
        }
        Ok(())
    })
}

pub fn halfspace_convexity(g: &MedianGraph) -> CheckResult {
    run("halfspace_convexity", |t| {
        for h in g.hyperplanes()? {
            t.check(g.is_convex(&h.minus) && g.is_convex(&h.plus), || format!("wall {}", h.id));
        }
        Ok(())
    })
}

/// Two separating walls are incomparable in the separation order exactly
/// when they cross.
pub fn incomparable_iff_crossing(g: &MedianGraph) -> CheckResult {
    run("incomparable_iff_crossing", |t| {
        let n = g.vertex_count();
        for x in 0..n {
            for y in 0..n {
                let walls: Vec<usize> = g.separating(x, y).ones().collect();
                for &h in &walls {
                    for &k in &walls {
                        if h == k {
                            continue;
                        }
                        let incomparable = !g.wall_le(x, h, k) && !g.wall_le(x, k, h);
                        t.check(incomparable == g.walls_cross(h, k), || {
                            format!("x={x} y={y} walls {h},{k}")
                        });
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn graph_checks(g: &MedianGraph) -> Vec<CheckResult> {
    vec![
        median_axioms(g),
        interval_exchange(g),
        weak_modularity(g),
        separation_count(g),
        halfspace_convexity(g),
        incomparable_iff_crossing(g),
    ]
}

/// Cubes of every path span cubes, cross each separating wall once, and
/// meet the next cube only in their shared vertex.
pub fn normal_path_structure(g: &MedianGraph, paths: &PathTable) -> CheckResult {
    run("normal_path_structure", |t| {
        let n = g.vertex_count();
        for x in 0..n {
            for y in 0..n {
                let p = paths.get(x, y);
                let mut crossed: Vec<usize> = p.cubes.iter().flatten().copied().collect();
                crossed.sort_unstable();
                let separating: Vec<usize> = g.separating(x, y).ones().collect();
                t.check(crossed == separating, || format!("{x}->{y} walls"));
                for (i, cube) in p.cubes.iter().enumerate() {
                    let spans = cube
                        .iter()
                        .enumerate()
                        .all(|(a, &h)| cube[a + 1..].iter().all(|&k| g.walls_cross(h, k)));
                    t.check(spans, || format!("{x}->{y} cube {i}"));
                    if i > 0 {
                        let prev = &p.cubes[i - 1];
                        let normal = cube.iter().all(|&h| prev.iter().any(|&k| !g.walls_cross(h, k)));
                        t.check(normal, || format!("{x}->{y} cube {i} not normal"));
                    }
                }
            }
        }
        Ok(())
    })
}

/// Path and chain modes agree; the normal metric is a metric squeezed
/// between `d / η` and `d`.
pub fn normal_metric(g: &MedianGraph, geo: &NormalGeometry<'_>, paths: &PathTable) -> CheckResult {
    run("normal_metric", |t| {
        let n = g.vertex_count();
        let eta = g.dimension(None, DEFAULT_CLIQUE_CAP)?.max(1);
        for x in 0..n {
            for y in 0..n {
                let dn = paths.d_nor(x, y);
                let chain = geo.distance(x, y, DistanceMode::Chain)? as usize;
                t.check(dn == chain, || format!("modes differ at ({x},{y})"));
                t.check(dn == paths.d_nor(y, x), || format!("asymmetric at ({x},{y})"));
                let d = g.dist(x, y) as usize;
                t.check(dn <= d && d <= eta * dn, || format!("bounds fail at ({x},{y})"));
                for z in 0..n {
                    t.check(dn <= paths.d_nor(x, z) + paths.d_nor(z, y), || {
                        format!("triangle fails at ({x},{z},{y})")
                    });
                }
            }
        }
        Ok(())
    })
}

/// How [`fellow_traveller`] measures the gap between paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Travel {
    /// Edge metric, endpoints pairwise within distance 1.
    Edge,
    /// Edge metric, one shared source and targets within distance 1.
    EdgeSharedSource,
    /// Normal metric, endpoints pairwise within normal distance 1.
    Normal,
}

/// Paths whose endpoints are pairwise close stay within distance 1 vertex
/// by vertex; a path that has ended stays at its target.
pub fn fellow_traveller(g: &MedianGraph, paths: &PathTable, travel: Travel) -> CheckResult {
    let name = match travel {
        Travel::Edge => "fellow_traveller",
        Travel::EdgeSharedSource => "fellow_traveller_shared_source",
        Travel::Normal => "fellow_traveller_normal",
    };
    run(name, |t| {
        let n = g.vertex_count();
        let close = |a: usize, b: usize| match travel {
            Travel::Normal => paths.d_nor(a, b) <= 1,
            _ => g.dist(a, b) <= 1,
        };
        let near: Vec<Vec<usize>> = (0..n)
            .map(|v| (0..n).filter(|&w| close(v, w)).collect())
            .collect();
        for v0 in 0..n {
            let sources: &[usize] = match travel {
                Travel::EdgeSharedSource => std::slice::from_ref(&v0),
                _ => &near[v0],
            };
            for &w0 in sources {
                for (a, ends) in near.iter().enumerate() {
                    for &b in ends {
                        let len = paths.d_nor(v0, a).max(paths.d_nor(w0, b));
                        let ok = (0..=len).all(|k| close(paths.vertex_at(v0, a, k), paths.vertex_at(w0, b, k)));
                        t.check(ok, || format!("paths {v0}->{a} and {w0}->{b}"));
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn normal_ball_convexity(g: &MedianGraph, geo: &NormalGeometry<'_>) -> CheckResult {
    run("normal_ball_convexity", |t| {
        let n = g.vertex_count();
        for x in 0..n {
            let reach = geo.distances_from(x)?.iter().copied().max().unwrap_or(0);
            for r in 0..=reach {
                let (ball, _) = geo.ball_sphere(x, r)?;
                t.check(g.is_convex(&ball), || format!("B_nor({x},{r})"));
            }
        }
        Ok(())
    })
}

/// The path vertex at radius `n` is the farthest point of the normal ball
/// slice, dominates the slice, and lies on the normal sphere.
pub fn gates(g: &MedianGraph, geo: &NormalGeometry<'_>, paths: &PathTable) -> CheckResult {
    run("gates", |t| {
        let size = g.vertex_count();
        for x0 in 0..size {
            for x in 0..size {
                let path = paths.get(x0, x);
                let span = g.interval_set(x0, x);
                for n in 0..=path.len() {
                    let gate = path.vertex(n);
                    let far = geo.farthest_in_normal_ball(x0, x, n)?;
                    t.check(far == gate, || format!("x0={x0} x={x} n={n}: {gate} vs {far}"));
                    let (ball, sphere) = geo.ball_sphere(x0, n as u32)?;
                    let mut slice = span.clone();
                    slice.intersect_with(&ball);
                    t.check(slice.is_subset(&g.interval_set(x0, gate)) && sphere.contains(gate), || {
                        format!("x0={x0} x={x} n={n}: slice not gated")
                    });
                }
            }
        }
        Ok(())
    })
}

/// If `[x0, y] ⊆ [x0, x]` and the n-th path vertices toward `x` and `y`
/// differ, the one toward `x` is outside `[x0, y]`.
pub fn gate_consistency(g: &MedianGraph, paths: &PathTable) -> CheckResult {
    run("gate_consistency", |t| {
        let size = g.vertex_count();
        for x0 in 0..size {
            for x in 0..size {
                for y in g.interval_set(x0, x).ones() {
                    let reach = paths.d_nor(x0, y).min(paths.d_nor(x0, x));
                    for n in 0..=reach {
                        let (vx, vy) = (paths.get(x0, x).vertex(n), paths.get(x0, y).vertex(n));
                        if vx != vy {
                            t.check(!g.in_interval(x0, y, vx), || format!("x0={x0} x={x} y={y} n={n}"));
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

/// Sphere decompositions are exact, have at most `η` parts whose intervals
/// drop in dimension, and the three membership tests for the sphere slice
/// agree.
pub fn decompositions(g: &MedianGraph, geo: &NormalGeometry<'_>, paths: &PathTable) -> CheckResult {
    run("decompositions", |t| {
        let size = g.vertex_count();
        let eta = g.dimension(None, DEFAULT_CLIQUE_CAP)?.max(1);
        let verified = NormalGeometry::new(g)?.with_verification(true);
        for x0 in 0..size {
            let row = geo.distances_from(x0)?;
            for x in 0..size {
                let path = paths.get(x0, x);
                let span = g.interval_set(x0, x);
                let dim = g.dimension(Some((x0, x)), DEFAULT_CLIQUE_CAP)?;
                for n in 1..=path.len() {
                    let dec = match verified.sphere_decomposition(x0, x, n) {
                        Ok(dec) => dec,
                        Err(e) => {
                            t.check(false, || format!("x0={x0} x={x} n={n}: {e}"));
                            continue;
                        }
                    };
                    let mut expected = span.clone();
                    expected.intersect_with(&geo.ball_sphere(x0, n as u32)?.1);
                    t.check(dec.union(size) == expected, || format!("x0={x0} x={x} n={n}: union"));
                    t.check(dec.parts.len() <= eta, || format!("x0={x0} x={x} n={n}: part count"));
                    for part in &dec.parts {
                        let sub = g.dimension(Some((part.x_h, dec.gate)), DEFAULT_CLIQUE_CAP)?;
                        t.check(sub < dim, || {
                            format!("x0={x0} x={x} n={n}: dim[{},{}] = {sub} >= {dim}", part.x_h, dec.gate)
                        });
                    }
                    let h_n = &path.cubes[n - 1];
                    let gate_span = g.interval_set(x0, dec.gate);
                    for w in span.ones() {
                        let on_sphere = row[w] as usize == n;
                        let last = paths.get(x0, w).cubes.last();
                        let crosses_last = h_n.iter().any(|h| last.is_some_and(|c| c.contains(h)));
                        let separated = gate_span.contains(w) && h_n.iter().any(|&h| g.separates(h, w, x0));
                        t.check(on_sphere == crosses_last && on_sphere == separated, || {
                            format!("x0={x0} x={x} n={n} w={w}: membership tests disagree")
                        });
                    }
                }
            }
        }
        Ok(())
    })
}

/// `h_l(y) ∈ [x0, x]` for every `y ∈ B(x, 3l)`.
pub fn h_map_containment(g: &MedianGraph, geo: &NormalGeometry<'_>, x0s: &[usize], l: usize) -> CheckResult {
    run(&format!("h_map_containment(l={l})"), |t| {
        let n = g.vertex_count();
        for &x0 in x0s {
            let h: Vec<usize> = (0..n).map(|y| geo.h_map(x0, l, y)).collect::<Result<_>>()?;
            for x in 0..n {
                for y in g.ball(x, 3 * l as u32).ones() {
                    t.check(g.in_interval(x0, x, h[y]), || format!("x0={x0} x={x} y={y}"));
                }
            }
        }
        Ok(())
    })
}

/// Normal-geometry suite. Fellow travelling is checked from a shared
/// source in the edge metric and in general in the normal metric; the
/// general edge-metric form fails already on a 2×3 grid.
pub fn normal_checks(g: &MedianGraph) -> Result<Vec<CheckResult>> {
    let geo = NormalGeometry::new(g)?;
    let paths = PathTable::new(&geo)?;
    Ok(vec![
        normal_path_structure(g, &paths),
        normal_metric(g, &geo, &paths),
        fellow_traveller(g, &paths, Travel::EdgeSharedSource),
        fellow_traveller(g, &paths, Travel::Normal),
        normal_ball_convexity(g, &geo),
        gates(g, &geo, &paths),
        gate_consistency(g, &paths),
        decompositions(g, &geo, &paths),
    ])
}

/// Net invariants for every ordered pair `(x̄, x)` at scale `l`:
/// restriction, displacement `<= K·l`, separation `|B(z, M·l) ∩ C| <= N`,
/// and the sharper bounds in intervals of dimension at most one
/// (displacement `<= l`, count `<= 3M`).
pub fn net_invariants(builder: &NetBuilder<'_>) -> Vec<CheckResult> {
    let g = builder.graph();
    let l = builder.l();
    let n = g.vertex_count();
    let c = match builder.constants() {
        Ok(c) => c,
        Err(e) => return vec![run(&format!("net_constants(l={l})"), |_| Err(e))],
    };
    let restriction = run(&format!("net_restriction(l={l})"), |t| {
        for base in 0..n {
            for apex in 0..n {
                let net = builder.net(base, apex)?;
                for &y in g.neighbors(apex) {
                    if !g.in_interval(base, apex, y) {
                        continue;
                    }
                    let sub = builder.net(base, y)?;
                    let span = g.interval_set(base, y);
                    let mut restricted = net.points.clone();
                    restricted.intersect_with(&span);
                    t.check(restricted == sub.points, || {
                        format!("C of ({base},{apex}) vs ({base},{y})")
                    });
                    for z in span.ones() {
                        t.check(net.projection(z)? == sub.projection(z)?, || {
                            format!("p of ({base},{apex}) vs ({base},{y}) at {z}")
                        });
                    }
                }
            }
        }
        Ok(())
    });
    let radius = (c.m * l as u64) as u32;
    // (restrict to dimension <= 1, displacement bound, count bound)
    let bounds = |name: String, sharp: bool, displacement: Option<u64>, count: Option<u64>| {
        run(&name, |t| {
            for base in 0..n {
                for apex in 0..n {
                    if sharp && builder.interval_dimension(base, apex)? > 1 {
                        continue;
                    }
                    let net = builder.net(base, apex)?;
                    for z in net.domain() {
                        if let Some(bound) = displacement {
                            for w in net.projection(z)?.ones() {
                                let d = g.dist(z, w) as u64;
                                t.check(d <= bound, || {
                                    format!("({base},{apex}): d({z},{w}) = {d} > {bound}")
                                });
                            }
                        }
                        if let Some(bound) = count {
                            let near = g.ball(z, radius).intersection_count(&net.points) as u64;
                            t.check(near <= bound, || {
                                format!("({base},{apex}): |B({z},{radius}) ∩ C| = {near} > {bound}")
                            });
                        }
                    }
                }
            }
            Ok(())
        })
    };
    let kl = c.k * l as u64;
    vec![
        restriction,
        bounds(format!("net_displacement(l={l})"), false, Some(kl), None),
        bounds(format!("net_separation(l={l})"), false, None, Some(c.n)),
        bounds(format!("net_base_case(l={l})"), true, Some(l as u64), Some(c.three_m())),
    ]
}

/// Largest `d(z, w)` over `w ∈ p(z)` across every net at this scale.
pub fn max_displacement(builder: &NetBuilder<'_>) -> Result<u32> {
    let g = builder.graph();
    let n = g.vertex_count();
    let mut worst = 0;
    for base in 0..n {
        for apex in 0..n {
            let net = builder.net(base, apex)?;
            for z in net.domain() {
                for w in net.projection(z)?.ones() {
                    worst = worst.max(g.dist(z, w));
                }
            }
        }
    }
    Ok(worst)
}

/// Summary of the cover pipeline at one scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub l: usize,
    pub basepoint: usize,
    pub checks: Vec<CheckResult>,
    pub mesh: i64,
    pub m_l: usize,
    pub max_s_2l: usize,
    pub bound_mesh: u64,
    pub bound_n: u64,
}

/// Builds the S-system and the cover `U_l` at `x0`, then checks the
/// S-system conditions against `N` and the cover bounds.
pub fn pipeline(builder: &NetBuilder<'_>, x0: usize) -> Result<PipelineReport> {
    let g = builder.graph();
    let l = builder.l();
    let c = builder.constants()?;
    let system = builder.s_system(x0)?;
    let space = FiniteMetricSpace::from_graph(g);
    let report = metric::verify_s_system(&space, &system, c.n as usize, false);
    let condition = |name: &str, cond: metric::Condition| CheckResult {
        name: format!("{name}(l={l})"),
        passed: cond.passed,
        checked: cond.checked as u64,
        witness: cond.witness.map(|w| match w.y {
            Some(y) => format!("x={} y={y} k={}", w.x, w.k),
            None => format!("x={} k={}", w.x, w.k),
        }),
    };
    let mut checks = vec![
        condition("s_radius", report.radius),
        condition("s_monotone", report.monotone),
        condition("s_edge_shift", report.edge_shift),
        condition("s_cardinality", report.cardinality),
    ];
    let cover = net::cover_from_system(g, &system)?;
    let mesh = cover.metrics.mesh.to_integer();
    let bound_mesh = c.m * l as u64;
    let m_l = cover.metrics.m_r;
    checks.push(run(&format!("cover_covers(l={l})"), |t| {
        t.check(cover.cover.uncovered(g.vertex_count()).is_none(), || "not a cover".into());
        Ok(())
    }));
    checks.push(run(&format!("cover_mesh(l={l})"), |t| {
        t.check(mesh as u64 <= bound_mesh, || format!("mesh {mesh} > {bound_mesh}"));
        Ok(())
    }));
    checks.push(run(&format!("cover_multiplicity(l={l})"), |t| {
        t.check(m_l as u64 <= c.n, || format!("m_l {m_l} > {}", c.n));
        t.check(m_l <= report.max_cardinality_2l, || {
            format!("m_l {m_l} > max |S(x,2l,l)| = {}", report.max_cardinality_2l)
        });
        Ok(())
    }));
    Ok(PipelineReport {
        l,
        basepoint: x0,
        checks,
        mesh,
        m_l,
        max_s_2l: report.max_cardinality_2l,
        bound_mesh,
        bound_n: c.n,
    })
}

/// Points of `set`, for witness messages.
pub fn describe(set: &VertexSet) -> String {
    let ids: Vec<String> = set.ones().map(|v| v.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}
