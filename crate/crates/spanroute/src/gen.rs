//! Deterministic, seeded generators for host graphs and target trees used by
//! the pipeline and the test suites.

use crate::graph::{Graph, GraphError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors from generation.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("gave up after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// Generates a uniform-ish random `d`-regular simple graph on `n` vertices by
/// incremental stub pairing: stubs are shuffled and matched one pair at a
/// time, re-drawing pairs that would create loops or repeated edges, with a
/// whole-graph restart when the tail end gets stuck. Requires `d < n` and
/// `n·d` even. `d = n−1` returns the complete graph directly.
pub fn generate_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if n == 0 || d >= n || (n * d) % 2 != 0 {
        return Err(GenError::BadParams(format!(
            "need d < n and n·d even, got n={n}, d={d}"
        )));
    }
    if d + 1 == n {
        let mut edges = Vec::with_capacity(n * d / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        return Ok(Graph::from_edges(n, &edges)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const RESTARTS: usize = 200;
    for _ in 0..RESTARTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        stubs.shuffle(&mut rng);
        let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
        let mut stuck = false;
        while !stubs.is_empty() {
            let mut placed = false;
            for _ in 0..100 {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                if i == j {
                    continue;
                }
                let (u, v) = (stubs[i], stubs[j]);
                if u == v || present.contains(&(u.min(v), u.max(v))) {
                    continue;
                }
                present.insert((u.min(v), u.max(v)));
                edges.push((u, v));
                // Remove the higher index first so the lower stays valid.
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                stuck = true;
                break;
            }
        }
        if !stuck {
            return Ok(Graph::from_edges(n, &edges)?);
        }
    }
    Err(GenError::Exhausted { attempts: RESTARTS })
}

/// Shapes of generated target trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    /// A single path.
    Path,
    /// `delta_cap` near-equal legs around one center.
    Spider,
    /// A long handle ending in a fan of `delta_cap − 1` leaves.
    Broom,
    /// A spine with about `n/20` leaves clustered on its earliest vertices.
    Caterpillar,
    /// A random recursive tree with the degree cap enforced.
    RandomBounded,
}

impl std::str::FromStr for TreeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(TreeKind::Path),
            "spider" => Ok(TreeKind::Spider),
            "broom" => Ok(TreeKind::Broom),
            "caterpillar" => Ok(TreeKind::Caterpillar),
            "random-bounded" => Ok(TreeKind::RandomBounded),
            other => Err(format!(
                "unknown tree kind {other:?}; expected path, spider, broom, \
                 caterpillar, or random-bounded"
            )),
        }
    }
}

/// Generates a tree on `n` vertices with maximum degree at most `delta_cap`
/// (`≥ 2`). Only `RandomBounded` consumes the seed; the other shapes are
/// fully determined by `n` and `delta_cap`.
pub fn generate_tree(
    kind: TreeKind,
    n: usize,
    delta_cap: usize,
    seed: u64,
) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::BadParams("tree needs at least one vertex".into()));
    }
    if delta_cap < 2 {
        return Err(GenError::BadParams(format!(
            "degree cap must be at least 2, got {delta_cap}"
        )));
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    match kind {
        TreeKind::Path => {
            for i in 1..n {
                edges.push((i - 1, i));
            }
        }
        TreeKind::Spider => {
            let legs = delta_cap.min(n - 1).max(1);
            let mut next = 1;
            for leg in 0..legs {
                let mut len = (n - 1) / legs;
                if leg < (n - 1) % legs {
                    len += 1;
                }
                let mut prev = 0;
                for _ in 0..len {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
            }
        }
        TreeKind::Broom => {
            let fan = (delta_cap - 1).min(n - 1);
            let handle = n - fan;
            for i in 1..handle {
                edges.push((i - 1, i));
            }
            for leaf in 0..fan {
                edges.push((handle - 1, handle + leaf));
            }
        }
        TreeKind::Caterpillar => {
            let per_vertex = delta_cap.saturating_sub(2).max(1);
            let leaves = (n / 20).min(n - 2);
            let spine = n - leaves;
            for i in 1..spine {
                edges.push((i - 1, i));
            }
            for leaf in 0..leaves {
                let host = leaf / per_vertex;
                if host >= spine {
                    return Err(GenError::BadParams(format!(
                        "caterpillar with n={n}, cap={delta_cap} cannot place {leaves} leaves"
                    )));
                }
                edges.push((host, spine + leaf));
            }
        }
        TreeKind::RandomBounded => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut degree = vec![0usize; n];
            let mut eligible: Vec<usize> = vec![0];
            for v in 1..n {
                let idx = rng.gen_range(0..eligible.len());
                let parent = eligible[idx];
                edges.push((parent, v));
                degree[parent] += 1;
                degree[v] += 1;
                if degree[parent] >= delta_cap {
                    eligible.swap_remove(idx);
                }
                if degree[v] < delta_cap {
                    eligible.push(v);
                }
            }
        }
    }
    Ok(Graph::from_edges(n, &edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_generator_validates_parameters() {
        assert!(generate_random_regular(5, 3, 0).is_err()); // odd n·d
        assert!(generate_random_regular(4, 4, 0).is_err()); // d ≥ n
        assert!(generate_random_regular(0, 0, 0).is_err());
    }

    #[test]
    fn four_three_is_complete() {
        let g = generate_random_regular(4, 3, 99).unwrap();
        assert_eq!(g.edge_count(), 6);
        for u in 0..4 {
            for v in u + 1..4 {
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn regular_generator_hits_degree_everywhere() {
        for (n, d, seed) in [(30, 6, 1), (60, 8, 2), (100, 30, 3)] {
            let g = generate_random_regular(n, d, seed).unwrap();
            assert_eq!(g.regular_degree(), Some(d), "n={n} d={d}");
            assert_eq!(g.edge_count(), n * d / 2);
        }
    }

    #[test]
    fn regular_generator_is_seed_deterministic() {
        let a = generate_random_regular(50, 7, 42).unwrap();
        let b = generate_random_regular(50, 7, 42).unwrap();
        let c = generate_random_regular(50, 7, 43).unwrap();
        assert_eq!(a.to_json_value().to_string(), b.to_json_value().to_string());
        assert_ne!(a.to_json_value().to_string(), c.to_json_value().to_string());
    }

    fn assert_tree(g: &Graph, n: usize, cap: usize) {
        assert_eq!(g.n(), n);
        assert_eq!(g.edge_count(), n - 1);
        assert!(g.is_connected());
        assert!(g.max_degree() <= cap, "Δ={} > {cap}", g.max_degree());
    }

    #[test]
    fn tree_shapes_are_trees_under_cap() {
        for kind in [
            TreeKind::Path,
            TreeKind::Spider,
            TreeKind::Broom,
            TreeKind::Caterpillar,
            TreeKind::RandomBounded,
        ] {
            for n in [2usize, 10, 41, 100] {
                let t = generate_tree(kind, n, 4, 11).unwrap();
                assert_tree(&t, n, 4);
            }
        }
    }

    #[test]
    fn spider_has_expected_center_degree() {
        let t = generate_tree(TreeKind::Spider, 13, 4, 0).unwrap();
        assert_eq!(t.degree(0), 4);
        let leaves = (0..t.n()).filter(|&v| t.degree(v) == 1).count();
        assert_eq!(leaves, 4);
    }

    #[test]
    fn broom_fans_at_the_end() {
        let t = generate_tree(TreeKind::Broom, 10, 4, 0).unwrap();
        let leaves = (0..t.n()).filter(|&v| t.degree(v) == 1).count();
        // Fan of 3 plus the handle's far end.
        assert_eq!(leaves, 4);
        assert_eq!(t.degree(6), 4);
    }

    #[test]
    fn caterpillar_keeps_a_long_bare_tail() {
        let t = generate_tree(TreeKind::Caterpillar, 100, 4, 0).unwrap();
        let leaves = 100usize / 20;
        let spine = 100 - leaves;
        // Spine vertices past the leaf cluster form a bare path.
        let cluster = leaves.div_ceil(2);
        for v in cluster + 1..spine - 1 {
            assert_eq!(t.degree(v), 2, "vertex {v} should be bare spine");
        }
    }

    #[test]
    fn random_bounded_tree_is_seed_deterministic() {
        let a = generate_tree(TreeKind::RandomBounded, 80, 3, 5).unwrap();
        let b = generate_tree(TreeKind::RandomBounded, 80, 3, 5).unwrap();
        assert_eq!(a.to_json_value().to_string(), b.to_json_value().to_string());
    }
}
