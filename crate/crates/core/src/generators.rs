//! Deterministic, seeded families of median graphs.
//!
//! Product vertices are numbered lexicographically in their coordinates, the
//! last coordinate varying fastest. Randomness comes from `ChaCha8Rng`, whose
//! stream is stable across platforms and releases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::median::{BuildOptions, MedianGraph, DEFAULT_VALIDATION_CAP};

pub const DEFAULT_VERTEX_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    /// Random tree by uniform attachment.
    Tree { n: usize, seed: u64 },
    /// Product of paths with the given vertex counts.
    Grid { dims: Vec<usize> },
    /// Cartesian product of random trees with the given vertex counts.
    TreeProduct { sizes: Vec<usize>, seed: u64 },
    /// Down-closed subset of a two-dimensional grid.
    Staircase { dims: Vec<usize>, seed: u64 },
}

impl GenSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GenSpec::Tree { .. } => "tree",
            GenSpec::Grid { .. } => "grid",
            GenSpec::TreeProduct { .. } => "tree_product",
            GenSpec::Staircase { .. } => "staircase",
        }
    }

    /// Vertex count the spec will produce, where it is known up front.
    fn planned_vertices(&self) -> Option<usize> {
        match self {
            GenSpec::Tree { n, .. } => Some(*n),
            GenSpec::Grid { dims } | GenSpec::Staircase { dims, .. } => {
                dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
            }
            GenSpec::TreeProduct { sizes, .. } => {
                sizes.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
            }
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<MedianGraph> {
    generate_with_budget(spec, DEFAULT_VERTEX_BUDGET)
}

pub fn generate_with_budget(spec: &GenSpec, budget: usize) -> Result<MedianGraph> {
    match spec.planned_vertices() {
        Some(n) if n <= budget => {}
        _ => return Err(Error::Budget(format!("{} instance exceeds {budget} vertices", spec.kind()))),
    }
    match spec {
        GenSpec::Tree { n, seed } => random_tree(*n, *seed),
        GenSpec::Grid { dims } => grid(dims),
        GenSpec::TreeProduct { sizes, seed } => tree_product(sizes, *seed),
        GenSpec::Staircase { dims, seed } => staircase(dims, *seed),
    }
}

fn finish(n: usize, edges: &[(usize, usize)], labels: Option<Vec<String>>) -> Result<MedianGraph> {
    let opts = if n <= DEFAULT_VALIDATION_CAP {
        BuildOptions::default()
    } else {
        BuildOptions::trusted()
    };
    let graph = MedianGraph::build(n, edges, opts).map_err(|e| match e {
        Error::NotMedian { .. } | Error::NonConvexHalfspace(..) => {
            Error::invariant(format!("generator produced a non-median graph: {e}"))
        }
        other => other,
    })?;
    Ok(match labels {
        Some(l) => graph.with_labels(l),
        None => graph,
    })
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::precondition("every factor needs at least one vertex"));
    }
    Ok(())
}

pub fn path(n: usize) -> Result<MedianGraph> {
    check_sizes(&[n])?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    finish(n, &edges, None)
}

fn tree_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    (1..n).map(|i| (rng.random_range(0..i), i)).collect()
}

pub fn random_tree(n: usize, seed: u64) -> Result<MedianGraph> {
    check_sizes(&[n])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = tree_edges(n, &mut rng);
    finish(n, &edges, None)
}

/// Cartesian product of factor graphs, each given as `(vertex count, edges)`.
fn product(factors: &[(usize, Vec<(usize, usize)>)]) -> (usize, Vec<(usize, usize)>, Vec<String>) {
    let sizes: Vec<usize> = factors.iter().map(|f| f.0).collect();
    let n: usize = sizes.iter().product();
    let mut strides = vec![1usize; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let coords = |v: usize| -> Vec<usize> {
        sizes
            .iter()
            .zip(&strides)
            .map(|(&s, &st)| (v / st) % s)
            .collect()
    };
    let mut edges = Vec::new();
    for v in 0..n {
        let c = coords(v);
        for (axis, (_, factor_edges)) in factors.iter().enumerate() {
            for &(a, b) in factor_edges {
                if c[axis] == a {
                    edges.push((v, v - a * strides[axis] + b * strides[axis]));
                }
            }
        }
    }
    let labels = (0..n)
        .map(|v| {
            let c: Vec<String> = coords(v).iter().map(|x| x.to_string()).collect();
            format!("({})", c.join(","))
        })
        .collect();
    (n, edges, labels)
}

pub fn grid(dims: &[usize]) -> Result<MedianGraph> {
    check_sizes(dims)?;
    let factors: Vec<_> = dims
        .iter()
        .map(|&d| (d, (1..d).map(|i| (i - 1, i)).collect()))
        .collect();
    let (n, edges, labels) = product(&factors);
    finish(n, &edges, Some(labels))
}

pub fn tree_product(sizes: &[usize], seed: u64) -> Result<MedianGraph> {
    check_sizes(sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<_> = sizes.iter().map(|&s| (s, tree_edges(s, &mut rng))).collect();
    let (n, edges, labels) = product(&factors);
    finish(n, &edges, Some(labels))
}

/// Cells `(i, j)` of an `a × b` grid lying under a random monotone boundary:
/// column `i` keeps rows `0..h_i` with `b >= h_0 >= h_1 >= ... >= 1`.
pub fn staircase(dims: &[usize], seed: u64) -> Result<MedianGraph> {
    check_sizes(dims)?;
    let &[a, b] = dims else {
        return Err(Error::precondition("staircases are two-dimensional"));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut heights = Vec::with_capacity(a);
    let mut cap = b;
    for _ in 0..a {
        let h = rng.random_range(1..=cap);
        heights.push(h);
        cap = h;
    }
    let mut ids = vec![vec![usize::MAX; b]; a];
    let mut labels = Vec::new();
    for (i, &h) in heights.iter().enumerate() {
        for (j, id) in ids[i].iter_mut().take(h).enumerate() {
            *id = labels.len();
            labels.push(format!("({i},{j})"));
        }
    }
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..heights[i] {
            if j + 1 < heights[i] {
                edges.push((ids[i][j], ids[i][j + 1]));
            }
            if i + 1 < a && j < heights[i + 1] {
                edges.push((ids[i][j], ids[i + 1][j]));
            }
        }
    }
    finish(labels.len(), &edges, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::DEFAULT_CLIQUE_CAP;

    #[test]
    fn grid_shape() {
        let g = generate(&GenSpec::Grid { dims: vec![3, 3] }).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 2);
        assert_eq!(g.label(5), "(1,2)");
    }

    #[test]
    fn tree_shape() {
        let g = generate(&GenSpec::Tree { n: 10, seed: 1 }).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edges().len(), 9);
        assert_eq!(g.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), 1);
    }

    #[test]
    fn staircase_validates() {
        let g = generate(&GenSpec::Staircase {
            dims: vec![4, 4],
            seed: 7,
        })
        .unwrap();
        assert!(g.is_validated());
        assert!(g.vertex_count() >= 4 && g.vertex_count() <= 16);
    }

    #[test]
    fn tree_products_have_factor_count_dimension() {
        for (sizes, eta) in [(vec![4, 5], 2), (vec![3, 3, 3], 3), (vec![6], 1)] {
            let g = tree_product(&sizes, 3).unwrap();
            assert_eq!(g.dimension(None, DEFAULT_CLIQUE_CAP).unwrap(), eta);
        }
    }

    #[test]
    fn deterministic() {
        let spec = GenSpec::TreeProduct {
            sizes: vec![4, 4],
            seed: 99,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn budget_and_bad_specs() {
        assert!(matches!(
            generate_with_budget(&GenSpec::Grid { dims: vec![10, 10] }, 50),
            Err(Error::Budget(_))
        ));
        assert!(grid(&[3, 0]).is_err());
        assert!(staircase(&[2, 2, 2], 0).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec: GenSpec = serde_json::from_str(r#"{"kind":"grid","dims":[3,3]}"#).unwrap();
        assert_eq!(spec, GenSpec::Grid { dims: vec![3, 3] });
        let spec: GenSpec =
            serde_json::from_str(r#"{"kind":"tree_product","sizes":[3,4],"seed":5}"#).unwrap();
        assert_eq!(spec.kind(), "tree_product");
    }
}
