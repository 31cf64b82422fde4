//! Bipartite perfect matching with Hall-violator certificates.
//!
//! The matcher is augmenting-path based and deterministic: given the same
//! inputs it explores candidates in index order and returns the same result.
//! When no matching saturating the left side exists, it returns a certifying
//! witness: a subset `W` of the left side whose neighborhood in the right side
//! is smaller than `W`.

use crate::graph::{Graph, GraphError, Matching};

/// A certified witness that no saturating matching exists: a left subset
/// whose right neighborhood is strictly smaller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallViolator {
    /// Vertices of the left set forming the violating family.
    pub subset: Vec<usize>,
    /// Their entire neighborhood within the right set.
    pub neighborhood: Vec<usize>,
}

/// Result of a saturating-matching attempt.
#[derive(Debug, Clone)]
pub enum HallOutcome {
    /// A matching covering every left vertex with distinct right vertices.
    Matching(Matching),
    /// No such matching; a certified violator is returned instead.
    Violator(HallViolator),
}

/// Core matcher on explicit index adjacency: `left_adj[i]` lists right
/// indices adjacent to left index `i`. Returns either a full assignment
/// `left index -> right index` or the indices of a violating left subset.
pub(crate) fn bipartite_match_indices(
    left_adj: &[Vec<usize>],
    n_right: usize,
) -> Result<Vec<usize>, Vec<usize>> {
    let n_left = left_adj.len();
    let mut right_owner: Vec<Option<usize>> = vec![None; n_right];
    let mut left_match: Vec<Option<usize>> = vec![None; n_left];

    fn try_augment(
        l: usize,
        left_adj: &[Vec<usize>],
        right_owner: &mut [Option<usize>],
        left_match: &mut [Option<usize>],
        visited_right: &mut [bool],
    ) -> bool {
        for &r in &left_adj[l] {
            if !visited_right[r] {
                visited_right[r] = true;
                if right_owner[r].is_none()
                    || try_augment(
                        right_owner[r].unwrap(),
                        left_adj,
                        right_owner,
                        left_match,
                        visited_right,
                    )
                {
                    right_owner[r] = Some(l);
                    left_match[l] = Some(r);
                    return true;
                }
            }
        }
        false
    }

    for l in 0..n_left {
        let mut visited_right = vec![false; n_right];
        if !try_augment(
            l,
            left_adj,
            &mut right_owner,
            &mut left_match,
            &mut visited_right,
        ) {
            // Alternating-reachability cut: the failed start vertex together
            // with the owners of every right vertex touched by the failed
            // search forms a violating family (its whole neighborhood was
            // visited, and all visited rights are matched into the family).
            let mut subset = vec![l];
            for r in 0..n_right {
                if visited_right[r] {
                    subset.push(right_owner[r].expect("visited right must be matched"));
                }
            }
            subset.sort_unstable();
            subset.dedup();
            return Err(subset);
        }
    }
    Ok(left_match.into_iter().map(|m| m.unwrap()).collect())
}

/// Finds a matching in `g` covering every vertex of `a_set` with distinct
/// vertices of `b_set`, or returns a certified Hall violator.
///
/// `a_set` and `b_set` must be disjoint vertex sets of `g`. The violator is
/// re-verified against `g` before being returned.
pub fn hall_matching(
    g: &Graph,
    a_set: &[usize],
    b_set: &[usize],
) -> Result<HallOutcome, GraphError> {
    for &v in a_set.iter().chain(b_set.iter()) {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange(v));
        }
    }
    let mut b_index = vec![usize::MAX; g.n()];
    for (i, &b) in b_set.iter().enumerate() {
        b_index[b] = i;
    }
    for &a in a_set {
        if b_index[a] != usize::MAX {
            return Err(GraphError::VertexCollision(a));
        }
    }
    let left_adj: Vec<Vec<usize>> = a_set
        .iter()
        .map(|&a| {
            g.neighbors(a)
                .iter()
                .filter(|&&w| b_index[w] != usize::MAX)
                .map(|&w| b_index[w])
                .collect()
        })
        .collect();
    match bipartite_match_indices(&left_adj, b_set.len()) {
        Ok(assign) => {
            let pairs = a_set
                .iter()
                .zip(assign.iter())
                .map(|(&a, &ri)| (a, b_set[ri]))
                .collect::<Vec<_>>();
            let m = Matching { pairs };
            m.validate_in(g)?;
            Ok(HallOutcome::Matching(m))
        }
        Err(subset_idx) => {
            let subset: Vec<usize> = subset_idx.iter().map(|&i| a_set[i]).collect();
            let in_b: Vec<bool> = {
                let mut mask = vec![false; g.n()];
                for &b in b_set {
                    mask[b] = true;
                }
                mask
            };
            let mut nb: Vec<usize> = Vec::new();
            for &a in &subset {
                for &w in g.neighbors(a) {
                    if in_b[w] {
                        nb.push(w);
                    }
                }
            }
            nb.sort_unstable();
            nb.dedup();
            assert!(
                nb.len() < subset.len(),
                "internal error: produced witness is not a violator"
            );
            Ok(HallOutcome::Violator(HallViolator {
                subset,
                neighborhood: nb,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_on_even_cycle() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        match hall_matching(&g, &[0, 2, 4], &[1, 3, 5]).unwrap() {
            HallOutcome::Matching(m) => {
                assert_eq!(m.pairs.len(), 3);
                m.validate_in(&g).unwrap();
            }
            HallOutcome::Violator(_) => panic!("expected matching"),
        }
    }

    #[test]
    fn star_yields_violator() {
        // Two left vertices joined only to one right vertex.
        let g = Graph::from_edges(4, &[(0, 2), (1, 2)]).unwrap();
        match hall_matching(&g, &[0, 1], &[2, 3]).unwrap() {
            HallOutcome::Matching(_) => panic!("expected violator"),
            HallOutcome::Violator(w) => {
                assert!(w.neighborhood.len() < w.subset.len());
                assert_eq!(w.neighborhood, vec![2]);
            }
        }
    }

    #[test]
    fn unbalanced_sides_violate() {
        let g = Graph::from_edges(5, &[(0, 3), (1, 3), (2, 4), (1, 4)]).unwrap();
        match hall_matching(&g, &[0, 1, 2], &[3, 4]).unwrap() {
            HallOutcome::Matching(_) => panic!("three into two cannot saturate"),
            HallOutcome::Violator(w) => assert!(w.neighborhood.len() < w.subset.len()),
        }
    }

    #[test]
    fn overlap_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(hall_matching(&g, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn indices_core_matches_smallcase() {
        // left 0 -> {0,1}, left 1 -> {0}: match exists (0->1, 1->0).
        let adj = vec![vec![0, 1], vec![0]];
        let m = bipartite_match_indices(&adj, 2).unwrap();
        assert_eq!(m, vec![1, 0]);
    }

    #[test]
    fn indices_core_violator_is_tight() {
        // Three lefts all adjacent only to right 0.
        let adj = vec![vec![0], vec![0], vec![0]];
        let w = bipartite_match_indices(&adj, 1).unwrap_err();
        assert_eq!(w, vec![0, 1]);
    }
}
