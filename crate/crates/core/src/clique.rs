//! Exact maximum clique search by branch and bound with pivoting.
//!
//! The crossing graph of a median graph's walls is small at the scales this
//! crate targets, so an exact search is affordable. Candidates are kept as
//! bitsets over local indices; the bound is `|R| + |P| <= best`.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Size of a maximum clique in the graph given by `adjacency` (symmetric,
/// irreflexive). Fails once a clique larger than `cap` has been found.
pub fn max_clique_size(adjacency: &[FixedBitSet], cap: usize) -> Result<usize> {
    let n = adjacency.len();
    if n == 0 {
        return Ok(0);
    }
    let mut candidates = FixedBitSet::with_capacity(n);
    candidates.insert_range(..);
    let mut best = 0;
    expand(adjacency, 0, candidates, &mut best, cap)?;
    Ok(best)
}

fn expand(
    adjacency: &[FixedBitSet],
    size: usize,
    mut candidates: FixedBitSet,
    best: &mut usize,
    cap: usize,
) -> Result<()> {
    let remaining = candidates.count_ones(..);
    if remaining == 0 {
        if size > *best {
            *best = size;
            if size > cap {
                return Err(Error::CliqueCap(cap));
            }
        }
        return Ok(());
    }
    if size + remaining <= *best {
        return Ok(());
    }
    // Pivot on the candidate with the most candidate neighbours; only its
    // non-neighbours need branching.
    let pivot = candidates
        .ones()
        .max_by_key(|&u| adjacency[u].intersection_count(&candidates))
        .expect("candidates nonempty");
    let branch: Vec<usize> = candidates
        .ones()
        .filter(|&v| !adjacency[pivot].contains(v))
        .collect();
    for v in branch {
        let mut next = candidates.clone();
        next.intersect_with(&adjacency[v]);
        expand(adjacency, size + 1, next, best, cap)?;
        candidates.remove(v);
        if size + candidates.count_ones(..) <= *best {
            break;
        }
    }
    Ok(())
}
