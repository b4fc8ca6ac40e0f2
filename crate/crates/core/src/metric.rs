//! Covers of finite metric spaces: mesh, multiplicity, Lebesgue numbers,
//! inner and outer neighbourhoods, and the translation between covers and
//! S-systems in both directions.
//!
//! Distances are exact rationals. Graph-backed spaces only ever hold
//! integers, so nothing here compares floating point values.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::median::{MedianGraph, VertexSet};

pub type Dist = Ratio<i64>;

pub const DEFAULT_LEBESGUE_BUDGET: usize = 1_000_000;
pub const DEFAULT_ORACLE_POINTS: usize = 12;

pub fn dist(n: i64) -> Dist {
    Dist::from_integer(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<Dist>,
}

impl FiniteMetricSpace {
    /// Checks symmetry, the zero diagonal, positivity off the diagonal and
    /// the triangle inequality.
    pub fn new(rows: Vec<Vec<Dist>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("metric space has no points".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("distance table is not square".into()));
        }
        for x in 0..n {
            if !rows[x][x].is_zero() {
                return Err(Error::Malformed(format!("d({x},{x}) is not zero")));
            }
            for y in 0..n {
                if rows[x][y] != rows[y][x] {
                    return Err(Error::Malformed(format!("d({x},{y}) is not symmetric")));
                }
                if x != y && rows[x][y] <= Dist::zero() {
                    return Err(Error::Malformed(format!("d({x},{y}) is not positive")));
                }
                for z in 0..n {
                    if rows[x][z] > rows[x][y] + rows[y][z] {
                        return Err(Error::Malformed(format!(
                            "triangle inequality fails at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace {
            n,
            dist: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_graph(graph: &MedianGraph) -> Self {
        let n = graph.vertex_count();
        let dist = (0..n * n)
            .map(|i| dist(graph.dist(i / n, i % n) as i64))
            .collect();
        FiniteMetricSpace { n, dist }
    }

    /// Path metric on `0..n`.
    pub fn path(n: usize) -> Self {
        let dist = (0..n * n)
            .map(|i| dist((i / n).abs_diff(i % n) as i64))
            .collect();
        FiniteMetricSpace { n, dist }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> Dist {
        self.dist[x * self.n + y]
    }

    pub fn rows(&self) -> Vec<Vec<Dist>> {
        self.dist.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn ball(&self, x: usize, r: Dist) -> VertexSet {
        let mut set = VertexSet::with_capacity(self.n);
        for y in 0..self.n {
            if self.d(x, y) <= r {
                set.insert(y);
            }
        }
        set
    }

    pub fn diameter_of(&self, set: &VertexSet) -> Dist {
        let mut diam = Dist::zero();
        for x in set.ones() {
            for y in set.ones().take_while(|&y| y < x) {
                diam = diam.max(self.d(x, y));
            }
        }
        diam
    }

    pub fn diameter(&self) -> Dist {
        self.dist.iter().copied().max().unwrap_or_else(Dist::zero)
    }

    /// Zero and every distinct pairwise distance, ascending.
    pub fn distance_values(&self) -> Vec<Dist> {
        let mut values: Vec<Dist> = self.dist.clone();
        values.push(Dist::zero());
        values.sort_unstable();
        values.dedup();
        values
    }

    /// `[x, y] = {z : d(x,z) + d(z,y) = d(x,y)}`.
    pub fn interval(&self, x: usize, y: usize) -> VertexSet {
        let mut set = VertexSet::with_capacity(self.n);
        for z in 0..self.n {
            if self.d(x, z) + self.d(z, y) == self.d(x, y) {
                set.insert(z);
            }
        }
        set
    }

    /// `d(x, set)`, or `None` for the empty set.
    pub fn gap(&self, x: usize, set: &VertexSet) -> Option<Dist> {
        set.ones().map(|y| self.d(x, y)).min()
    }

    fn meets_within(&self, x: usize, set: &VertexSet, r: Dist) -> bool {
        set.ones().any(|y| self.d(x, y) <= r)
    }
}

/// A named family of point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub names: Vec<String>,
    pub sets: Vec<VertexSet>,
}

impl Cover {
    /// Sets named `U_0, U_1, ...`.
    pub fn new(sets: Vec<VertexSet>) -> Self {
        let names = (0..sets.len()).map(|i| format!("U_{i}")).collect();
        Cover { names, sets }
    }

    pub fn from_lists(n: usize, lists: &[&[usize]]) -> Self {
        Cover::new(
            lists
                .iter()
                .map(|l| {
                    let mut s = VertexSet::with_capacity(n);
                    l.iter().for_each(|&x| s.insert(x));
                    s
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// First point of `0..n` lying in no set.
    pub fn uncovered(&self, n: usize) -> Option<usize> {
        let mut union = VertexSet::with_capacity(n);
        for s in &self.sets {
            union.union_with(s);
        }
        (0..n).find(|&x| !union.contains(x))
    }

    pub fn require_cover(&self, n: usize) -> Result<()> {
        match self.uncovered(n) {
            Some(x) => Err(Error::NotACover(x)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverMetrics {
    #[serde(with = "crate::io::dist_repr")]
    pub mesh: Dist,
    pub m: usize,
    pub m_r: usize,
}

/// Number of sets meeting the closed ball `B(x, r)`.
fn sets_meeting_ball(s: &FiniteMetricSpace, u: &Cover, x: usize, r: Dist) -> usize {
    u.sets.iter().filter(|set| s.meets_within(x, set, r)).count()
}

/// `m_r(u)`: the largest number of sets any closed ball of radius `r` meets.
pub fn r_multiplicity(s: &FiniteMetricSpace, u: &Cover, r: Dist) -> usize {
    (0..s.points())
        .map(|x| sets_meeting_ball(s, u, x, r))
        .max()
        .unwrap_or(0)
}

pub fn multiplicity(u: &Cover, n: usize) -> usize {
    (0..n)
        .map(|x| u.sets.iter().filter(|set| set.contains(x)).count())
        .max()
        .unwrap_or(0)
}

pub fn mesh(s: &FiniteMetricSpace, u: &Cover) -> Dist {
    u.sets
        .iter()
        .map(|set| s.diameter_of(set))
        .max()
        .unwrap_or_else(Dist::zero)
}

pub fn cover_metrics(s: &FiniteMetricSpace, u: &Cover, r: Dist) -> Result<CoverMetrics> {
    u.require_cover(s.points())?;
    if r < Dist::zero() {
        return Err(Error::precondition("multiplicity radius must be nonnegative"));
    }
    Ok(CoverMetrics {
        mesh: mesh(s, u),
        m: multiplicity(u, s.points()),
        m_r: r_multiplicity(s, u, r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LebesgueMode {
    /// Largest threshold `t` such that every subset of diameter `<= t` lies
    /// in some set; searched exhaustively within a node budget.
    Exact { budget: usize },
    /// Largest `r` such that every ball `B(x, r)` lies in some set. Never
    /// exceeds the exact value.
    BallBound,
}

impl LebesgueMode {
    pub fn exact() -> Self {
        LebesgueMode::Exact {
            budget: DEFAULT_LEBESGUE_BUDGET,
        }
    }
}

/// Lebesgue value of a cover, reported as the largest attained threshold.
/// For a cover containing the whole space this is the diameter.
pub fn lebesgue_number(s: &FiniteMetricSpace, u: &Cover, mode: LebesgueMode) -> Result<Dist> {
    u.require_cover(s.points())?;
    let values = s.distance_values();
    let mut best = Dist::zero();
    match mode {
        LebesgueMode::BallBound => {
            for &t in &values {
                let all_fit = (0..s.points()).all(|x| {
                    let ball = s.ball(x, t);
                    u.sets.iter().any(|set| ball.is_subset(set))
                });
                if !all_fit {
                    break;
                }
                best = t;
            }
        }
        LebesgueMode::Exact { budget } => {
            let mut search = BadSetSearch::new(s, u, budget);
            for &t in &values {
                if search.exists_bad(t)? {
                    break;
                }
                best = t;
            }
        }
    }
    Ok(best)
}

/// Depth-first search for a set of diameter `<= t` contained in no element.
struct BadSetSearch<'a> {
    space: &'a FiniteMetricSpace,
    // containing[x]: indices of cover sets holding x
    containing: Vec<FixedBitSet>,
    sets: &'a [VertexSet],
    budget: usize,
    nodes: usize,
}

impl<'a> BadSetSearch<'a> {
    fn new(space: &'a FiniteMetricSpace, u: &'a Cover, budget: usize) -> Self {
        let containing = (0..space.points())
            .map(|x| {
                let mut row = FixedBitSet::with_capacity(u.len());
                for (i, set) in u.sets.iter().enumerate() {
                    if set.contains(x) {
                        row.insert(i);
                    }
                }
                row
            })
            .collect();
        BadSetSearch {
            space,
            containing,
            sets: &u.sets,
            budget,
            nodes: 0,
        }
    }

    fn exists_bad(&mut self, t: Dist) -> Result<bool> {
        let n = self.space.points();
        for x in 0..n {
            let mut chosen = VertexSet::with_capacity(n);
            chosen.insert(x);
            let mut candidates = VertexSet::with_capacity(n);
            for y in x + 1..n {
                if self.space.d(x, y) <= t {
                    candidates.insert(y);
                }
            }
            let live = self.containing[x].clone();
            if self.dfs(t, &mut chosen, live, candidates)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn dfs(
        &mut self,
        t: Dist,
        chosen: &mut VertexSet,
        live: FixedBitSet,
        candidates: VertexSet,
    ) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!(
                "Lebesgue search exceeded {} nodes",
                self.budget
            )));
        }
        if live.is_clear() {
            return Ok(true);
        }
        // every extension fits inside one live set
        let mut reach = chosen.clone();
        reach.union_with(&candidates);
        if live.ones().any(|i| reach.is_subset(&self.sets[i])) {
            return Ok(false);
        }
        for y in candidates.ones() {
            let mut next_live = live.clone();
            next_live.intersect_with(&self.containing[y]);
            let mut next_candidates = VertexSet::with_capacity(candidates.len());
            for z in candidates.ones().filter(|&z| z > y) {
                if self.space.d(y, z) <= t {
                    next_candidates.insert(z);
                }
            }
            chosen.insert(y);
            let found = self.dfs(t, chosen, next_live, next_candidates)?;
            chosen.remove(y);
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerNeighborhood {
    pub cover: Cover,
    /// Whether the shrunken family still covers the space.
    pub covers: bool,
}

/// Elementwise `N_{-λ}(U) = X \ N_λ(X \ U)`, the points whose closed
/// `λ`-ball stays inside `U`.
///
/// Failing to cover is reported, not an error, unless the exact Lebesgue
/// value is at least `2λ`: every `λ`-ball has diameter at most `2λ`, so it
/// must then fit in some element.
pub fn inner_neighborhood(s: &FiniteMetricSpace, u: &Cover, lambda: Dist) -> Result<InnerNeighborhood> {
    if lambda < Dist::zero() {
        return Err(Error::precondition("neighbourhood radius must be nonnegative"));
    }
    let n = s.points();
    let balls: Vec<VertexSet> = (0..n).map(|x| s.ball(x, lambda)).collect();
    let sets = u
        .sets
        .iter()
        .map(|set| {
            let mut inner = VertexSet::with_capacity(n);
            for (x, ball) in balls.iter().enumerate() {
                if ball.is_subset(set) {
                    inner.insert(x);
                }
            }
            inner
        })
        .collect();
    let cover = Cover {
        names: u.names.clone(),
        sets,
    };
    let covers = cover.uncovered(n).is_none();
    if !covers
        && u.uncovered(n).is_none()
        && lebesgue_number(s, u, LebesgueMode::exact())? >= lambda * 2
    {
        return Err(Error::invariant(
            "inner neighbourhood lost coverage although every λ-ball fits in the cover",
        ));
    }
    Ok(InnerNeighborhood { cover, covers })
}

/// Elementwise closed `λ`-neighbourhood `N_λ(U)`.
pub fn outer_neighborhood(s: &FiniteMetricSpace, u: &Cover, lambda: Dist) -> Cover {
    let n = s.points();
    let sets = u
        .sets
        .iter()
        .map(|set| {
            let mut outer = VertexSet::with_capacity(n);
            for x in 0..n {
                if s.meets_within(x, set, lambda) {
                    outer.insert(x);
                }
            }
            outer
        })
        .collect();
    Cover {
        names: u.names.clone(),
        sets,
    }
}

/// The family `S(x, k, l)` for `k = 1..=3l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SSystem {
    pub l: usize,
    pub basepoint: Option<usize>,
    /// Every `S(x, k, l)` should lie in `B(x, radius_bound)`.
    pub radius_bound: Dist,
    // sets[x][k - 1]
    pub sets: Vec<Vec<VertexSet>>,
}

impl SSystem {
    pub fn get(&self, x: usize, k: usize) -> &VertexSet {
        &self.sets[x][k - 1]
    }

    pub fn points(&self) -> usize {
        self.sets.len()
    }

    pub fn max_k(&self) -> usize {
        3 * self.l
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepRule {
    /// Smallest point id of each set.
    MinId,
    /// One representative per set, in cover order.
    Explicit(Vec<usize>),
}

/// `S(x, k, l) = {x_i : B(x, k) ∩ U_i ≠ ∅}` for a representative `x_i` of
/// each set. Returns the system together with `g(l) = m_{3l}(u)`.
pub fn cover_to_s_system(
    s: &FiniteMetricSpace,
    u: &Cover,
    l: usize,
    rule: &RepRule,
) -> Result<(SSystem, usize)> {
    if l == 0 {
        return Err(Error::precondition("scale l must be at least 1"));
    }
    u.require_cover(s.points())?;
    let reps: Vec<Option<usize>> = match rule {
        RepRule::MinId => u.sets.iter().map(|set| set.minimum()).collect(),
        RepRule::Explicit(reps) => {
            if reps.len() != u.len() {
                return Err(Error::precondition("one representative per set is required"));
            }
            for (i, &r) in reps.iter().enumerate() {
                if !u.sets[i].contains(r) {
                    return Err(Error::precondition(format!(
                        "representative {r} is not in set {}",
                        u.names[i]
                    )));
                }
            }
            reps.iter().map(|&r| Some(r)).collect()
        }
    };
    let n = s.points();
    let sets = (0..n)
        .map(|x| {
            let gaps: Vec<Option<Dist>> = u.sets.iter().map(|set| s.gap(x, set)).collect();
            (1..=3 * l)
                .map(|k| {
                    let mut out = VertexSet::with_capacity(n);
                    for (gap, rep) in gaps.iter().zip(&reps) {
                        if let (Some(gap), Some(rep)) = (gap, rep) {
                            if *gap <= dist(k as i64) {
                                out.insert(*rep);
                            }
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let metrics = cover_metrics(s, u, dist(3 * l as i64))?;
    Ok((
        SSystem {
            l,
            basepoint: None,
            radius_bound: dist(3 * l as i64) + metrics.mesh,
            sets,
        },
        metrics.m_r,
    ))
}

/// `A_h = {y : h ∈ S(y, l, l)}` for every `h` occurring in some
/// `S(x, l, l)`; sets are named `A_<h>` and ordered by `h`.
pub fn s_system_to_cover(system: &SSystem) -> Result<Cover> {
    let n = system.points();
    let l = system.l;
    let mut by_point: Vec<Option<VertexSet>> = vec![None; n];
    for x in 0..n {
        let s = system.get(x, l);
        if s.is_clear() {
            return Err(Error::EmptySSet(x));
        }
        for h in s.ones() {
            by_point[h]
                .get_or_insert_with(|| VertexSet::with_capacity(n))
                .insert(x);
        }
    }
    let (names, sets) = by_point
        .into_iter()
        .enumerate()
        .filter_map(|(h, set)| set.map(|s| (format!("A_{h}"), s)))
        .unzip();
    Ok(Cover { names, sets })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: usize,
    pub y: Option<usize>,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl Condition {
    fn new() -> Self {
        Condition {
            passed: true,
            checked: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: Witness) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SSystemReport {
    pub radius: Condition,
    pub monotone: Condition,
    /// `S(y, k) ⊆ S(x, k + 1)` for adjacent `x, y`.
    pub edge_shift: Condition,
    /// Pair conditions with the union form of the second bullet.
    pub pair_shift_union: Option<Condition>,
    /// Pair conditions with the intersection form of the second bullet.
    pub pair_shift_intersection: Option<Condition>,
    /// `|S(x, k, l)| <= g` for every `k`.
    pub cardinality: Condition,
    pub max_cardinality: usize,
    pub max_cardinality_2l: usize,
    pub g_bound: usize,
}

impl SSystemReport {
    pub fn passed(&self) -> bool {
        self.radius.passed
            && self.monotone.passed
            && self.edge_shift.passed
            && self.pair_shift_union.is_none_or(|c| c.passed)
            && self.pair_shift_intersection.is_none_or(|c| c.passed)
            && self.cardinality.passed
    }

    /// The weaker count bound `|S(x, 2l, l)| <= g + 1`.
    pub fn cardinality_2l_within_g_plus_one(&self) -> bool {
        self.max_cardinality_2l <= self.g_bound + 1
    }

    pub fn first_failure(&self) -> Option<(&'static str, Witness)> {
        let named = [
            ("radius", Some(self.radius)),
            ("monotone", Some(self.monotone)),
            ("edge_shift", Some(self.edge_shift)),
            ("pair_shift_union", self.pair_shift_union),
            ("pair_shift_intersection", self.pair_shift_intersection),
            ("cardinality", Some(self.cardinality)),
        ];
        named
            .into_iter()
            .find_map(|(name, c)| c.and_then(|c| c.witness).map(|w| (name, w)))
    }
}

/// Check the S-system conditions. Pair conditions range over pairs at
/// integral distance `1..=l`; adjacency means distance exactly 1.
pub fn verify_s_system(
    s: &FiniteMetricSpace,
    system: &SSystem,
    g_bound: usize,
    strict_pairs: bool,
) -> SSystemReport {
    let n = s.points();
    let top = system.max_k();
    let l = system.l;
    let mut radius = Condition::new();
    let mut monotone = Condition::new();
    let mut edge_shift = Condition::new();
    let mut cardinality = Condition::new();
    let mut max_cardinality = 0;
    let mut max_cardinality_2l = 0;

    for x in 0..n {
        let ball = s.ball(x, system.radius_bound);
        for k in 1..=top {
            let set = system.get(x, k);
            radius.record(set.is_subset(&ball), Witness { x, y: None, k });
            let size = set.count_ones(..);
            max_cardinality = max_cardinality.max(size);
            if k == 2 * l {
                max_cardinality_2l = max_cardinality_2l.max(size);
            }
            cardinality.record(size <= g_bound, Witness { x, y: None, k });
            if k < top {
                monotone.record(set.is_subset(system.get(x, k + 1)), Witness { x, y: None, k });
            }
        }
    }

    let one = dist(1);
    for x in 0..n {
        for y in 0..n {
            if s.d(x, y) != one {
                continue;
            }
            for k in 1..top {
                edge_shift.record(
                    system.get(y, k).is_subset(system.get(x, k + 1)),
                    Witness { x, y: Some(y), k },
                );
            }
        }
    }

    let (pair_shift_union, pair_shift_intersection) = if strict_pairs {
        let mut union = Condition::new();
        let mut inter = Condition::new();
        for x in 0..n {
            for y in 0..n {
                let d = s.d(x, y);
                if x == y || !d.is_integer() || d > dist(l as i64) {
                    continue;
                }
                let d = d.to_integer() as usize;
                for k in d + 1..=top {
                    let (sx, sy) = (system.get(x, k), system.get(y, k));
                    let ok = system.get(x, k - d).ones().all(|h| sx.contains(h) && sy.contains(h));
                    let w = Witness { x, y: Some(y), k };
                    union.record(ok, w);
                    inter.record(ok, w);
                }
                for k in 1..=top - d {
                    let target = system.get(x, k + d);
                    let (sx, sy) = (system.get(x, k), system.get(y, k));
                    let w = Witness { x, y: Some(y), k };
                    union.record(sx.is_subset(target) && sy.is_subset(target), w);
                    inter.record(sx.ones().all(|h| !sy.contains(h) || target.contains(h)), w);
                }
            }
        }
        (Some(union), Some(inter))
    } else {
        (None, None)
    };

    SSystemReport {
        radius,
        monotone,
        edge_shift,
        pair_shift_union,
        pair_shift_intersection,
        cardinality,
        max_cardinality,
        max_cardinality_2l,
        g_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolRule {
    Balls,
    Intervals,
    Subsets,
}

/// Candidate cover elements of diameter at most `mesh_bound`, as bitmasks.
pub fn candidate_pool(s: &FiniteMetricSpace, mesh_bound: Dist, rule: PoolRule) -> Vec<u64> {
    let n = s.points();
    let to_mask = |set: &VertexSet| set.ones().fold(0u64, |m, x| m | 1 << x);
    let mut raw: Vec<VertexSet> = Vec::new();
    match rule {
        PoolRule::Balls => {
            for x in 0..n {
                for r in s.distance_values() {
                    raw.push(s.ball(x, r));
                }
            }
        }
        PoolRule::Intervals => {
            for x in 0..n {
                for y in x..n {
                    raw.push(s.interval(x, y));
                }
            }
        }
        PoolRule::Subsets => {
            for mask in 1u64..1 << n {
                let mut set = VertexSet::with_capacity(n);
                (0..n).filter(|&i| mask >> i & 1 == 1).for_each(|i| set.insert(i));
                raw.push(set);
            }
        }
    }
    let mut seen = HashSet::new();
    raw.iter()
        .filter(|set| s.diameter_of(set) <= mesh_bound)
        .map(to_mask)
        .filter(|&m| seen.insert(m))
        .collect()
}

/// Exact `min m_λ(U) - 1` over covers built from the candidate pool with
/// every element of diameter at most `mesh_bound`.
pub fn ad_oracle(
    s: &FiniteMetricSpace,
    lambda: Dist,
    mesh_bound: Dist,
    rule: PoolRule,
    point_budget: usize,
) -> Result<usize> {
    let n = s.points();
    if n > point_budget.min(63) {
        return Err(Error::Budget(format!(
            "oracle limited to {} points, space has {n}",
            point_budget.min(63)
        )));
    }
    let pool = candidate_pool(s, mesh_bound, rule);
    // reach[i]: points whose λ-ball meets pool[i]
    let reach: Vec<u64> = pool
        .iter()
        .map(|&set| {
            (0..n)
                .filter(|&x| (0..n).any(|y| set >> y & 1 == 1 && s.d(x, y) <= lambda))
                .fold(0u64, |m, x| m | 1 << x)
        })
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let union = pool.iter().fold(0, |m, &s| m | s);
    if union != full {
        return Err(Error::precondition("candidate pool does not cover the space"));
    }
    for cap in 1..=pool.len() {
        let mut load = vec![0usize; n];
        if cover_within(&pool, &reach, full, 0, &mut load, cap, n) {
            return Ok(cap - 1);
        }
    }
    unreachable!("the whole pool is a cover")
}

fn cover_within(
    pool: &[u64],
    reach: &[u64],
    full: u64,
    covered: u64,
    load: &mut [usize],
    cap: usize,
    n: usize,
) -> bool {
    if covered == full {
        return true;
    }
    let p = (!covered & full).trailing_zeros();
    for (i, &set) in pool.iter().enumerate() {
        if set >> p & 1 == 0 {
            continue;
        }
        let r = reach[i];
        if (0..n).any(|x| r >> x & 1 == 1 && load[x] >= cap) {
            continue;
        }
        (0..n).filter(|&x| r >> x & 1 == 1).for_each(|x| load[x] += 1);
        let found = cover_within(pool, reach, full, covered | set, load, cap, n);
        (0..n).filter(|&x| r >> x & 1 == 1).for_each(|x| load[x] -= 1);
        if found {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> VertexSet {
        let mut s = VertexSet::with_capacity(n);
        xs.iter().for_each(|&x| s.insert(x));
        s
    }

    #[test]
    fn metrics_on_paths() {
        let s = FiniteMetricSpace::path(5);
        let u = Cover::from_lists(5, &[&[0, 1, 2], &[2, 3, 4]]);
        let m = cover_metrics(&s, &u, dist(1)).unwrap();
        assert_eq!((m.mesh, m.m, m.m_r), (dist(2), 2, 2));

        let whole = Cover::from_lists(5, &[&[0, 1, 2, 3, 4]]);
        for r in 0..6 {
            let m = cover_metrics(&s, &whole, dist(r)).unwrap();
            assert_eq!((m.m, m.m_r), (1, 1));
        }

        let s3 = FiniteMetricSpace::path(3);
        let singletons = Cover::from_lists(3, &[&[0], &[1], &[2]]);
        assert_eq!(cover_metrics(&s3, &singletons, dist(1)).unwrap().m_r, 3);

        let gap = Cover::from_lists(3, &[&[0], &[2]]);
        assert!(matches!(cover_metrics(&s3, &gap, dist(1)), Err(Error::NotACover(1))));
    }

    #[test]
    fn lebesgue_values() {
        let s = FiniteMetricSpace::path(5);
        let u = Cover::from_lists(5, &[&[0, 1, 2], &[2, 3, 4]]);
        assert_eq!(lebesgue_number(&s, &u, LebesgueMode::exact()).unwrap(), dist(1));
        let whole = Cover::from_lists(5, &[&[0, 1, 2, 3, 4]]);
        assert_eq!(lebesgue_number(&s, &whole, LebesgueMode::exact()).unwrap(), dist(4));
        assert_eq!(lebesgue_number(&s, &whole, LebesgueMode::BallBound).unwrap(), dist(4));
        let singletons = Cover::from_lists(5, &[&[0], &[1], &[2], &[3], &[4]]);
        assert_eq!(lebesgue_number(&s, &singletons, LebesgueMode::exact()).unwrap(), dist(0));
        assert!(matches!(
            lebesgue_number(&s, &u, LebesgueMode::Exact { budget: 2 }),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn inner_neighborhoods() {
        let s = FiniteMetricSpace::path(5);
        let u = Cover::from_lists(5, &[&[0, 1, 2, 3]]);
        let inner = inner_neighborhood(&s, &u, dist(1)).unwrap();
        assert_eq!(inner.cover.sets[0], set(5, &[0, 1, 2]));
        let inner = inner_neighborhood(&s, &u, dist(4)).unwrap();
        assert!(inner.cover.sets[0].is_clear());

        let u = Cover::from_lists(5, &[&[0, 1, 2], &[1, 2, 3, 4]]);
        assert_eq!(lebesgue_number(&s, &u, LebesgueMode::exact()).unwrap(), dist(2));
        let inner = inner_neighborhood(&s, &u, dist(1)).unwrap();
        assert!(inner.covers);
        assert_eq!(inner.cover.sets, vec![set(5, &[0, 1]), set(5, &[2, 3, 4])]);
    }

    #[test]
    fn lebesgue_above_lambda_does_not_force_coverage() {
        // windows of four consecutive points: every set of diameter <= 3
        // fits, yet no interior 2-ball (five points) does
        let s = FiniteMetricSpace::path(9);
        let windows: Vec<Vec<usize>> = (0..6).map(|i| (i..i + 4).collect()).collect();
        let lists: Vec<&[usize]> = windows.iter().map(|w| w.as_slice()).collect();
        let u = Cover::from_lists(9, &lists);
        assert_eq!(lebesgue_number(&s, &u, LebesgueMode::exact()).unwrap(), dist(3));
        let inner = inner_neighborhood(&s, &u, dist(2)).unwrap();
        assert!(!inner.covers);
    }

    #[test]
    fn s_system_from_cover() {
        let s = FiniteMetricSpace::path(3);
        let u = Cover::from_lists(3, &[&[0, 1], &[1, 2]]);
        let (sys, g) = cover_to_s_system(&s, &u, 1, &RepRule::Explicit(vec![0, 2])).unwrap();
        assert_eq!(sys.get(1, 1), &set(3, &[0, 2]));
        for x in 0..3 {
            for k in 1..=3 {
                assert!(sys.get(x, k).count_ones(..) <= g);
                if k < 3 {
                    assert!(sys.get(x, k).is_subset(sys.get(x, k + 1)));
                }
            }
        }
        let report = verify_s_system(&s, &sys, g, true);
        assert!(report.passed(), "{report:?}");
        assert!(cover_to_s_system(&s, &u, 1, &RepRule::Explicit(vec![2, 0])).is_err());
    }

    #[test]
    fn broken_s_system_is_flagged() {
        let s = FiniteMetricSpace::path(4);
        let u = Cover::from_lists(4, &[&[0, 1], &[2, 3]]);
        let (mut sys, g) = cover_to_s_system(&s, &u, 1, &RepRule::MinId).unwrap();
        let victim = sys.get(1, 3).minimum().unwrap();
        sys.sets[1][2].remove(victim);
        let report = verify_s_system(&s, &sys, g, false);
        assert!(!report.passed());
        let (_, w) = report.first_failure().unwrap();
        assert!(w.x == 1 || w.y == Some(1));
    }

    #[test]
    fn s_system_back_to_cover() {
        let s = FiniteMetricSpace::path(4);
        let sys = SSystem {
            l: 1,
            basepoint: Some(0),
            radius_bound: dist(3),
            sets: vec![vec![set(4, &[0]); 3]; 4],
        };
        let cover = s_system_to_cover(&sys).unwrap();
        assert_eq!(cover.names, vec!["A_0".to_string()]);
        assert_eq!(cover.sets, vec![set(4, &[0, 1, 2, 3])]);
        assert!(mesh(&s, &cover) <= sys.radius_bound);

        let mut empty = sys.clone();
        empty.sets[2][0].clear();
        assert!(matches!(s_system_to_cover(&empty), Err(Error::EmptySSet(2))));
    }

    #[test]
    fn oracle_ground_truth() {
        let one = FiniteMetricSpace::path(1);
        assert_eq!(ad_oracle(&one, dist(3), dist(0), PoolRule::Balls, 12).unwrap(), 0);
        let s = FiniteMetricSpace::path(5);
        for rule in [PoolRule::Intervals, PoolRule::Balls, PoolRule::Subsets] {
            assert_eq!(ad_oracle(&s, dist(1), dist(4), rule, 12).unwrap(), 0);
            assert_eq!(ad_oracle(&s, dist(1), dist(2), rule, 12).unwrap(), 1);
        }
        let big = FiniteMetricSpace::path(13);
        assert!(matches!(
            ad_oracle(&big, dist(1), dist(2), PoolRule::Intervals, 12),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn rational_space_validation() {
        let half = Dist::new(1, 2);
        let ok = FiniteMetricSpace::new(vec![
            vec![dist(0), half, dist(1)],
            vec![half, dist(0), half],
            vec![dist(1), half, dist(0)],
        ])
        .unwrap();
        assert_eq!(ok.diameter(), dist(1));
        let bad = FiniteMetricSpace::new(vec![
            vec![dist(0), half, dist(2)],
            vec![half, dist(0), half],
            vec![dist(2), half, dist(0)],
        ]);
        assert!(matches!(bad, Err(Error::Malformed(_))));
    }
}
