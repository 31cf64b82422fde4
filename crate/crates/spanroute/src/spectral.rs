//! Spectral pseudorandomness audits for host graphs.
//!
//! The quantity of interest is `lambda_hat`: the largest absolute value among
//! the adjacency eigenvalues after removing one copy of the top (Perron)
//! eigenvalue. A d-regular graph with small `lambda_hat` behaves
//! pseudorandomly: edge counts between vertex sets concentrate (mixing),
//! any two large disjoint sets are joined by an edge, and small sets expand.
//! Each of those consequences is exposed here as a checkable audit.

use crate::graph::{Graph, GraphError};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Errors from the spectral operations.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("eigensolver did not converge within {iterations} iterations (best residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("iterative eigensolve requires a regular graph")]
    IrregularIterative,
    #[error("graph has no second eigenvalue (n = {0})")]
    TooSmall(usize),
    #[error("vertex {v} has only {deg} neighbors in the target set, below the required {required}")]
    DeficientVertex { v: usize, deg: usize, required: f64 },
    #[error("sampled joinedness counterexample: disjoint sets of size {m} with no edge between them")]
    JoinednessCounterexample {
        m: usize,
        a: Vec<usize>,
        b: Vec<usize>,
    },
    #[error("operation requires a regular graph")]
    NotRegular,
}

/// How `lambda_hat` was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

/// The spectral summary of a graph.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    /// Average degree (equals the degree for regular graphs).
    pub d: f64,
    /// Largest absolute eigenvalue after deflating one copy of the top one.
    pub lambda_hat: f64,
    pub method: Method,
    /// Tolerance / attained residual of the computation.
    pub residual_tol: f64,
    /// Whether the graph is regular.
    pub regular: bool,
    /// Set when `lambda_hat` reaches `d` within tolerance — for regular
    /// graphs this happens exactly when the graph is disconnected or has a
    /// bipartite component.
    pub d_equality_flag: bool,
}

/// Cutoff below which the dense eigensolver is used.
pub const DENSE_CUTOFF: usize = 2000;

/// Default tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Computes `lambda_hat` for `g` within `tol`.
///
/// Uses a dense symmetric eigensolve for `n ≤ 2000` and a deflated Lanczos
/// iteration with full reorthogonalization above (regular graphs only; the
/// deflation subtracts the known top eigenvector direction). Irregular graphs
/// are handled densely with `d` set to the average degree and flagged.
pub fn second_eigenvalue(g: &Graph, tol: f64) -> Result<SpectralReport, SpectralError> {
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    let regular = g.regular_degree().is_some();
    let d = g.average_degree();
    let (lambda_hat, method, residual) = if n <= DENSE_CUTOFF {
        (dense_lambda_hat(g), Method::Dense, tol)
    } else {
        if !regular {
            return Err(SpectralError::IrregularIterative);
        }
        let (lh, resid) = lanczos_lambda_hat(g, tol, 500)?;
        (lh, Method::Iterative, resid)
    };
    Ok(SpectralReport {
        n,
        d,
        lambda_hat,
        method,
        residual_tol: residual,
        regular,
        d_equality_flag: regular && lambda_hat >= d - 10.0 * tol.max(f64::EPSILON),
    })
}

/// Computes `lambda_hat` with the deflated Lanczos iteration regardless of
/// graph size (regular graphs only). Callers working on mid-sized regular
/// hosts use this to skip the dense solve, which costs `O(n^3)`.
pub fn second_eigenvalue_iterative(g: &Graph, tol: f64) -> Result<SpectralReport, SpectralError> {
    let n = g.n();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    if g.regular_degree().is_none() {
        return Err(SpectralError::IrregularIterative);
    }
    let d = g.average_degree();
    let (lambda_hat, residual) = lanczos_lambda_hat(g, tol, 500)?;
    Ok(SpectralReport {
        n,
        d,
        lambda_hat,
        method: Method::Iterative,
        residual_tol: residual,
        regular: true,
        d_equality_flag: lambda_hat >= d - 10.0 * tol.max(f64::EPSILON),
    })
}

/// Dense path: full symmetric eigensolve of the adjacency matrix, drop one
/// copy of the largest eigenvalue, return the max absolute remainder.
fn dense_lambda_hat(g: &Graph) -> f64 {
    let n = g.n();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for &v in g.neighbors(u) {
            m[(u, v)] = 1.0;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // vals[0] is the Perron value; the remainder carries lambda_hat.
    vals[1..]
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, |acc, v| acc.max(v))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lanczos with full reorthogonalization on the deflated operator
/// `B = A − (d/n)·J` (for d-regular graphs, `J` the all-ones matrix).
/// `B`'s extreme absolute eigenvalue equals `lambda_hat`, since deflation
/// moves the top eigenvalue to 0 and leaves the rest of the spectrum intact.
///
/// Returns `(lambda_hat, attained_residual)`.
fn lanczos_lambda_hat(
    g: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64), SpectralError> {
    let n = g.n();
    let d = g.regular_degree().ok_or(SpectralError::IrregularIterative)? as f64;
    let scale = d / n as f64;
    let apply = |x: &[f64], out: &mut Vec<f64>| {
        let s: f64 = x.iter().sum::<f64>() * scale;
        out.clear();
        out.resize(n, 0.0);
        for u in 0..n {
            let mut acc = 0.0;
            for &v in g.neighbors(u) {
                acc += x[v];
            }
            out[u] = acc - s;
        }
    };

    // Deterministic start vector, orthogonal to the all-ones direction.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    for x in &mut v {
        *x -= mean;
    }
    let nv = norm(&v);
    for x in &mut v {
        *x /= nv;
    }

    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = Vec::new();
    let mut best_resid = f64::INFINITY;

    for k in 0..max_iter {
        apply(&v, &mut w);
        let alpha = dot(&w, &v);
        alphas.push(alpha);
        axpy(&mut w, -alpha, &v);
        if k > 0 {
            let vp = &basis[k - 1];
            axpy(&mut w, -betas[k - 1], vp);
        }
        // Full reorthogonalization, twice for numerical robustness.
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                if c != 0.0 {
                    axpy(&mut w, -c, u);
                }
            }
        }
        let beta = norm(&w);
        let (theta, last_comp) = extreme_ritz(&alphas, &betas);
        let resid = (beta * last_comp).abs();
        best_resid = best_resid.min(resid);
        if resid <= tol * theta.abs().max(1.0) || beta < 1e-13 {
            return Ok((theta.abs(), resid));
        }
        betas.push(beta);
        for x in &mut w {
            *x /= beta;
        }
        v = w.clone();
        basis.push(v.clone());
    }
    Err(SpectralError::NonConvergence {
        iterations: max_iter,
        residual: best_resid,
    })
}

/// Eigen-decomposes the current Lanczos tridiagonal matrix and returns the
/// Ritz value of largest absolute value together with the absolute last
/// component of its eigenvector (used for the residual estimate).
fn extreme_ritz(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = (0.0f64, 1.0f64);
    for j in 0..k {
        let theta = eig.eigenvalues[j];
        if theta.abs() > best.0.abs() {
            best = (theta, eig.eigenvectors[(k - 1, j)].abs());
        }
    }
    best
}

/// True iff the report's `lambda_hat` is at least `sqrt(d(n−d)/(n−1))` minus
/// the report tolerance — the floor every d-regular graph obeys.
pub fn check_lower_bound(report: &SpectralReport) -> bool {
    let n = report.n as f64;
    let d = report.d;
    if report.n < 2 {
        return false;
    }
    let bound = (d * (n - d) / (n - 1.0)).max(0.0).sqrt();
    report.lambda_hat >= bound - report.residual_tol
}

/// One sampled mixing violation: a pair of sets whose edge count deviates
/// from `d|A||B|/n` by more than `lambda_hat · sqrt(|A||B|)`.
#[derive(Debug, Clone, Serialize)]
pub struct MixingViolation {
    pub a_size: usize,
    pub b_size: usize,
    pub edge_count: usize,
    pub expected: f64,
    pub bound: f64,
}

/// Result of [`mixing_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub samples: usize,
    /// max over samples of |e(A,B) − d|A||B|/n| / sqrt(|A||B|); compare
    /// against `lambda_hat`.
    pub max_normalized_deviation: f64,
    pub violations: Vec<MixingViolation>,
}

/// Counts ordered adjacent pairs between two (possibly overlapping) sets:
/// pairs `(a,b)` with `a∈A`, `b∈B`, `ab` an edge. Edges inside `A∩B` are
/// counted in both orders.
pub fn ordered_edge_count(g: &Graph, a: &[usize], b: &[usize]) -> usize {
    let mut in_b = vec![false; g.n()];
    for &v in b {
        in_b[v] = true;
    }
    a.iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&w| in_b[w]).count())
        .sum()
}

/// Samples `samples` random set pairs (A,B), not necessarily disjoint, and
/// checks the mixing inequality
/// `|e(A,B) − d|A||B|/n| ≤ lambda_hat·sqrt(|A||B|) + tol`
/// for each, where `e` counts ordered adjacent pairs.
///
/// A violation falsifies the supplied `lambda_hat`, never the inequality:
/// with the exact value, the inequality is a theorem.
pub fn mixing_audit(
    g: &Graph,
    lambda_hat: f64,
    samples: usize,
    seed: u64,
) -> Result<MixingReport, SpectralError> {
    let d = g.regular_degree().ok_or(SpectralError::NotRegular)? as f64;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<usize> = (0..n).collect();
    let mut max_norm = 0.0f64;
    let mut violations = Vec::new();
    let tol = 1e-9;
    for _ in 0..samples {
        let ka = rng.gen_range(1..=n);
        let kb = rng.gen_range(1..=n);
        let mut pool = ids.clone();
        pool.shuffle(&mut rng);
        let a: Vec<usize> = pool[..ka].to_vec();
        pool.shuffle(&mut rng);
        let b: Vec<usize> = pool[..kb].to_vec();
        let e = ordered_edge_count(g, &a, &b) as f64;
        let expected = d * (ka as f64) * (kb as f64) / n as f64;
        let scale = ((ka * kb) as f64).sqrt();
        let dev = (e - expected).abs();
        max_norm = max_norm.max(dev / scale);
        if dev > lambda_hat * scale + tol {
            violations.push(MixingViolation {
                a_size: ka,
                b_size: kb,
                edge_count: e as usize,
                expected,
                bound: lambda_hat * scale,
            });
        }
    }
    Ok(MixingReport {
        samples,
        max_normalized_deviation: max_norm,
        violations,
    })
}

/// Result of [`joined_bound`].
#[derive(Debug, Clone, Serialize)]
pub struct JoinedReport {
    /// The joinedness parameter: any two disjoint sets of this size span an
    /// edge.
    pub m: usize,
    /// Number of sampled pairs actually checked.
    pub sampled: usize,
    /// True when `2m > n`, making the property vacuous.
    pub vacuous: bool,
}

/// Computes the joinedness parameter `m = ceil(lambda_hat·n/d)` (or an
/// explicit override) and falsification-tests it on `samples` random disjoint
/// pairs of m-sets: each pair must span at least one edge.
///
/// A sampled counterexample is returned as an error — it signals that the
/// supplied `lambda_hat` underestimates the true value.
pub fn joined_bound(
    g: &Graph,
    report: &SpectralReport,
    m_override: Option<usize>,
    samples: usize,
    seed: u64,
) -> Result<JoinedReport, SpectralError> {
    let n = g.n();
    let d = g.regular_degree().ok_or(SpectralError::NotRegular)? as f64;
    let m = match m_override {
        Some(m) => m,
        None => (report.lambda_hat * n as f64 / d).ceil() as usize,
    };
    let m = m.max(1);
    if 2 * m > n {
        return Ok(JoinedReport {
            m,
            sampled: 0,
            vacuous: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<usize> = (0..n).collect();
    for _ in 0..samples {
        let mut pool = ids.clone();
        pool.shuffle(&mut rng);
        let a: Vec<usize> = pool[..m].to_vec();
        let b: Vec<usize> = pool[m..2 * m].to_vec();
        if ordered_edge_count(g, &a, &b) == 0 {
            let mut a = a;
            let mut b = b;
            a.sort_unstable();
            b.sort_unstable();
            return Err(SpectralError::JoinednessCounterexample { m, a, b });
        }
    }
    Ok(JoinedReport {
        m,
        sampled: samples,
        vacuous: false,
    })
}

/// Result of [`expansion_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionAudit {
    pub passed: bool,
    pub checked: usize,
    /// First failing sampled set and its neighborhood size in Y, if any.
    pub failure: Option<(Vec<usize>, usize)>,
}

/// Audits small-set expansion from `x_set` into `y_set`: samples subsets
/// `S ⊆ x_set` with `1 ≤ |S| ≤ max_set_size` and checks
/// `|N(S) ∩ Y| ≥ d_factor·|S|` for each, where `N(S)` is the union of the
/// members' neighborhoods.
///
/// Precondition (checked): every vertex of `x_set` has at least
/// `min_deg_into_y` neighbors inside `y_set`; the error names the first
/// deficient vertex.
#[allow(clippy::too_many_arguments)]
pub fn expansion_audit(
    g: &Graph,
    x_set: &[usize],
    y_set: &[usize],
    min_deg_into_y: f64,
    d_factor: usize,
    sample_budget: usize,
    max_set_size: usize,
    seed: u64,
) -> Result<ExpansionAudit, SpectralError> {
    let mut in_y = vec![false; g.n()];
    for &v in y_set {
        in_y[v] = true;
    }
    for &v in x_set {
        let deg = g.neighbors(v).iter().filter(|&&w| in_y[w]).count();
        if (deg as f64) < min_deg_into_y {
            return Err(SpectralError::DeficientVertex {
                v,
                deg,
                required: min_deg_into_y,
            });
        }
    }
    let cap = max_set_size.min(x_set.len()).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for _ in 0..sample_budget {
        let k = rng.gen_range(1..=cap);
        let mut pool = x_set.to_vec();
        pool.shuffle(&mut rng);
        let s: Vec<usize> = pool[..k].to_vec();
        let mut hit = vec![false; g.n()];
        for &v in &s {
            for &w in g.neighbors(v) {
                if in_y[w] {
                    hit[w] = true;
                }
            }
        }
        let nbhd = hit.iter().filter(|&&h| h).count();
        checked += 1;
        if nbhd < d_factor * k {
            let mut s = s;
            s.sort_unstable();
            return Ok(ExpansionAudit {
                passed: false,
                checked,
                failure: Some((s, nbhd)),
            });
        }
    }
    Ok(ExpansionAudit {
        passed: true,
        checked,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    #[test]
    fn k4_lambda_one() {
        let r = second_eigenvalue(&complete(4), 1e-6).unwrap();
        assert!((r.lambda_hat - 1.0).abs() < 1e-6);
        assert!(r.regular);
        assert!(!r.d_equality_flag);
    }

    #[test]
    fn c4_lambda_two_flagged() {
        let r = second_eigenvalue(&cycle(4), 1e-6).unwrap();
        assert!((r.lambda_hat - 2.0).abs() < 1e-6);
        // Bipartite: -d is an eigenvalue, so the equality flag must trip.
        assert!(r.d_equality_flag);
    }

    #[test]
    fn petersen_lambda_two() {
        let r = second_eigenvalue(&petersen(), 1e-6).unwrap();
        assert!((r.lambda_hat - 2.0).abs() < 1e-6);
        assert!(check_lower_bound(&r));
        let bound = (3.0f64 * 7.0 / 9.0).sqrt();
        assert!((bound - 1.5275).abs() < 1e-3);
    }

    #[test]
    fn k4_equality_case_of_lower_bound() {
        let r = second_eigenvalue(&complete(4), 1e-6).unwrap();
        assert!(check_lower_bound(&r));
    }

    #[test]
    fn fabricated_low_lambda_fails_bound() {
        let mut r = second_eigenvalue(&petersen(), 1e-6).unwrap();
        r.lambda_hat = 0.5;
        assert!(!check_lower_bound(&r));
    }

    #[test]
    fn relabeling_invariance() {
        let g = petersen();
        // Relabel via the permutation v -> (3v + 1) mod 10.
        let perm: Vec<usize> = (0..10).map(|v| (3 * v + 1) % 10).collect();
        let edges: Vec<_> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let h = Graph::from_edges(10, &edges).unwrap();
        let r1 = second_eigenvalue(&g, 1e-8).unwrap();
        let r2 = second_eigenvalue(&h, 1e-8).unwrap();
        assert!((r1.lambda_hat - r2.lambda_hat).abs() < 1e-8);
    }

    #[test]
    fn mixing_exact_lambda_never_violates() {
        let g = petersen();
        let rep = mixing_audit(&g, 2.0, 500, 7).unwrap();
        assert!(rep.violations.is_empty());
        assert!(rep.max_normalized_deviation <= 2.0 + 1e-9);
    }

    #[test]
    fn mixing_zero_lambda_violates() {
        let g = petersen();
        let rep = mixing_audit(&g, 0.0, 200, 7).unwrap();
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn joined_petersen_vacuous() {
        let g = petersen();
        let r = second_eigenvalue(&g, 1e-6).unwrap();
        let j = joined_bound(&g, &r, None, 100, 1).unwrap();
        assert_eq!(j.m, 7);
        assert!(j.vacuous);
    }

    #[test]
    fn joined_disjoint_triangles_counterexample() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let r = second_eigenvalue(&g, 1e-6).unwrap();
        assert!(r.d_equality_flag); // disconnected
        let err = joined_bound(&g, &r, Some(3), 2000, 5).unwrap_err();
        match err {
            SpectralError::JoinednessCounterexample { m, .. } => assert_eq!(m, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn expansion_complete_graph() {
        let g = complete(50);
        let all: Vec<usize> = (0..50).collect();
        let audit = expansion_audit(&g, &all, &all, 1.0, 2, 200, 5, 3).unwrap();
        assert!(audit.passed);
    }

    #[test]
    fn expansion_star_fails() {
        // Star: center 0, leaves 1..=9.
        let e: Vec<_> = (1..10).map(|v| (0usize, v)).collect();
        let g = Graph::from_edges(10, &e).unwrap();
        let leaves: Vec<usize> = (1..10).collect();
        let all: Vec<usize> = (0..10).collect();
        let audit = expansion_audit(&g, &leaves, &all, 1.0, 2, 100, 3, 3).unwrap();
        assert!(!audit.passed);
        let (s, nbhd) = audit.failure.unwrap();
        assert_eq!(nbhd, 1);
        assert!(2 * s.len() > 1);
    }

    #[test]
    fn expansion_deficient_vertex_detected() {
        let e: Vec<_> = (1..10).map(|v| (0usize, v)).collect();
        let g = Graph::from_edges(10, &e).unwrap();
        let leaves: Vec<usize> = (1..10).collect();
        // Y excludes the center, so every leaf has zero neighbors in Y.
        let err = expansion_audit(&g, &leaves, &leaves, 1.0, 2, 10, 3, 3).unwrap_err();
        match err {
            SpectralError::DeficientVertex { v, deg, .. } => {
                assert_eq!(v, 1);
                assert_eq!(deg, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn lanczos_agrees_with_dense_on_midsize() {
        // Circulant 6-regular graph on 240 vertices: connections at offsets
        // ±1, ±3, ±9 — regular, connected, non-bipartite.
        let n = 240;
        let mut e = Vec::new();
        for v in 0..n {
            for off in [1usize, 3, 9] {
                e.push((v, (v + off) % n));
            }
        }
        let g = Graph::from_edges(n, &e).unwrap();
        let dense = dense_lambda_hat(&g);
        let (iter, resid) = lanczos_lambda_hat(&g, 1e-8, 400).unwrap();
        assert!(
            (dense - iter).abs() < 1e-6,
            "dense {dense} vs lanczos {iter} (residual {resid})"
        );
    }

    #[test]
    fn iterative_wrapper_matches_dense_and_rejects_irregular() {
        let r_dense = second_eigenvalue(&petersen(), 1e-6).unwrap();
        let r_iter = second_eigenvalue_iterative(&petersen(), 1e-9).unwrap();
        assert!((r_dense.lambda_hat - r_iter.lambda_hat).abs() < 1e-6);
        assert_eq!(r_iter.method, Method::Iterative);
        // A path is irregular, so the iterative path must refuse it.
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            second_eigenvalue_iterative(&p3, 1e-6),
            Err(SpectralError::IrregularIterative)
        ));
    }
}
