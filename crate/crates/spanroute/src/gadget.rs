//! The comparison gadget: a bounded-degree graph with two in-terminals and
//! two out-terminals that can be traversed by two vertex-disjoint spanning
//! paths in exactly two ways — "crossed" (in1→out2, in2→out1) or "parallel"
//! (in1→out1, in2→out2). Wired along a comparison network, one gadget per
//! comparator, these two modes realize swap / no-swap decisions as routing.
//!
//! For an order parameter `k ≥ 2` with `k ≡ 2 (mod 4)` the gadget has
//! `2k(k−1)` vertices: a backbone cycle on vertices `u_1..u_k, v_1..v_k`,
//! plus, for each of `k−2` prescribed non-adjacent consecutive pairs, a glued
//! path with `2k` fresh interior vertices. Every spanning path pair uses each
//! glued path wholly inside one of its two members.

use crate::graph::{Graph, GraphError, Path};
use thiserror::Error;

/// Errors from gadget construction and use.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("gadget order {0} invalid: need k ≥ 2 and k ≡ 2 (mod 4)")]
    BadOrder(usize),
    #[error("vertex {0} is not an in-terminal of this gadget")]
    NotAnInTerminal(usize),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// The comparison gadget of order `k`.
#[derive(Debug, Clone)]
pub struct Gadget {
    /// The gadget graph on `2k(k−1)` vertices.
    pub graph: Graph,
    /// Order parameter.
    pub k: usize,
    /// First in-terminal (`u_1`).
    pub v_in1: usize,
    /// Second in-terminal (`v_1`).
    pub v_in2: usize,
    /// First out-terminal (`u_k`).
    pub v_out1: usize,
    /// Second out-terminal (`v_k`).
    pub v_out2: usize,
    /// Crossed spanning path `v_in1 → v_out2`.
    pub p1: Path,
    /// Parallel spanning path `v_in1 → v_out1`.
    pub p2: Path,
    /// Crossed spanning path `v_in2 → v_out1`.
    pub q1: Path,
    /// Parallel spanning path `v_in2 → v_out2`.
    pub q2: Path,
    /// The backbone cycle as a cyclic vertex sequence of length `2k`.
    pub cycle_order: Vec<usize>,
    /// The glued pairs `(a, b)` in enumeration order.
    pub glued_pairs: Vec<(usize, usize)>,
    /// The glued paths, one per pair, stored `a → b` with `2k` interior
    /// vertices each.
    pub glued_paths: Vec<Path>,
}

/// Builds the gadget of order `k` (`k ≥ 2`, `k ≡ 2 (mod 4)`).
///
/// Vertex ids: `u_i ↦ i−1`, `v_i ↦ k+i−1` (1-indexed names), then the glued
/// paths' interiors in enumeration order, `2k` ids per pair, path-ordered.
pub fn build_gadget(k: usize) -> Result<Gadget, GadgetError> {
    if k < 2 || k % 4 != 2 {
        return Err(GadgetError::BadOrder(k));
    }
    let u = |i: usize| i - 1;
    let v = |i: usize| k + i - 1;
    let n = 2 * k * (k - 1);

    // Backbone cycle edges.
    let mut edges: Vec<(usize, usize)> = vec![(u(1), v(2)), (u(k), v(k - 1))];
    let mut i = 1;
    while i <= k - 1 {
        edges.push((u(i), u(i + 1)));
        edges.push((v(i), v(i + 1)));
        i += 2;
    }
    let mut i = 2;
    while i <= k.saturating_sub(2) {
        edges.push((u(i), v(i + 2)));
        i += 2;
    }
    let mut i = 3;
    while i <= k {
        edges.push((u(i), v(i - 2)));
        i += 2;
    }

    // Glued pairs: consecutive non-adjacent pairs on the u side (ascending),
    // then on the v side.
    let mut glued_pairs = Vec::new();
    let mut i = 2;
    while i + 1 <= k - 1 {
        glued_pairs.push((u(i), u(i + 1)));
        i += 2;
    }
    let mut i = 2;
    while i + 1 <= k - 1 {
        glued_pairs.push((v(i), v(i + 1)));
        i += 2;
    }

    let mut glued_paths = Vec::with_capacity(glued_pairs.len());
    for (j, &(a, b)) in glued_pairs.iter().enumerate() {
        let base = 2 * k + j * 2 * k;
        let mut seq = Vec::with_capacity(2 * k + 2);
        seq.push(a);
        seq.extend(base..base + 2 * k);
        seq.push(b);
        for w in seq.windows(2) {
            edges.push((w[0], w[1]));
        }
        glued_paths.push(Path::new(seq)?);
    }

    let graph = Graph::from_edges(n, &edges)?;

    // Cyclic order of the backbone: walk from u_1 starting toward u_2.
    let cycle_order = walk_cycle(&graph, k, u(1), u(1).min(u(2)).max(u(2)));

    // Spanning path pairs. `cnt` glued pairs are consumed per path; for the
    // crossed pair the sides alternate, for the parallel pair they do not.
    let cnt = (k - 2) / 2;
    let u_pair = |r: usize| &glued_paths[r];
    let v_pair = |r: usize| &glued_paths[cnt + r];

    // Crossed path from u_1: v-side pair, u-side pair reversed, alternating;
    // ends at v_k.
    let mut p1_seq = vec![u(1)];
    for r in 0..cnt {
        if r % 2 == 0 {
            p1_seq.extend_from_slice(v_pair(r).vertices());
        } else {
            let rev = u_pair(r).reversed();
            p1_seq.extend_from_slice(rev.vertices());
        }
    }
    p1_seq.push(v(k));

    // Crossed path from v_1: u-side pair reversed, v-side pair, alternating;
    // ends at u_k.
    let mut q1_seq = vec![v(1)];
    for r in 0..cnt {
        if r % 2 == 0 {
            let rev = u_pair(r).reversed();
            q1_seq.extend_from_slice(rev.vertices());
        } else {
            q1_seq.extend_from_slice(v_pair(r).vertices());
        }
    }
    q1_seq.push(u(k));

    // Parallel paths stay on one side.
    let mut p2_seq = vec![u(1)];
    for r in 0..cnt {
        p2_seq.extend_from_slice(u_pair(r).vertices());
    }
    p2_seq.push(u(k));
    let mut q2_seq = vec![v(1)];
    for r in 0..cnt {
        q2_seq.extend_from_slice(v_pair(r).vertices());
    }
    q2_seq.push(v(k));

    let gadget = Gadget {
        graph,
        k,
        v_in1: u(1),
        v_in2: v(1),
        v_out1: u(k),
        v_out2: v(k),
        p1: Path::new(p1_seq)?,
        p2: Path::new(p2_seq)?,
        q1: Path::new(q1_seq)?,
        q2: Path::new(q2_seq)?,
        cycle_order,
        glued_pairs,
        glued_paths,
    };
    Ok(gadget)
}

/// Walks the backbone cycle (the degree-≤-2 subgraph induced by the first
/// `2k` ids restricted to cycle edges) from `start` heading to `second`.
fn walk_cycle(graph: &Graph, k: usize, start: usize, second: usize) -> Vec<usize> {
    let backbone = 2 * k;
    let mut order = vec![start, second];
    loop {
        let cur = *order.last().unwrap();
        let prev = order[order.len() - 2];
        let next = graph
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| w < backbone && w != prev)
            .expect("backbone vertices have exactly two backbone neighbors");
        if next == start {
            break;
        }
        order.push(next);
    }
    order
}

/// Report from [`verify_gadget`]: one entry per checked property, in order,
/// plus the first failure description.
#[derive(Debug, Clone)]
pub struct GadgetReport {
    /// Property outcomes, in order:
    /// 0: vertex count is `2k(k−1)`;
    /// 1: max degree is 3 (2 in the degenerate order-2 gadget) with the
    ///    exact degree histogram;
    /// 2: the four terminals are distinct and each has degree 2;
    /// 3: the crossed pair partitions the vertex set with the right
    ///    endpoints;
    /// 4: the parallel pair partitions the vertex set with the right
    ///    endpoints;
    /// 5: each of the four paths has exactly `k(k−1)` vertices and is a
    ///    valid path of the gadget graph.
    pub properties: [bool; 6],
    /// Index and description of the first failed property, if any.
    pub first_failure: Option<(usize, String)>,
}

impl GadgetReport {
    /// True when every property holds.
    pub fn all_ok(&self) -> bool {
        self.properties.iter().all(|&p| p)
    }
}

/// Re-derives the six structural properties from the gadget's graph and
/// paths, independently of how it was built.
pub fn verify_gadget(g: &Gadget) -> GadgetReport {
    let k = g.k;
    let n_expected = 2 * k * (k - 1);
    let mut props = [true; 6];
    let mut fails: Vec<(usize, String)> = Vec::new();
    let fail = |props: &mut [bool; 6], fails: &mut Vec<(usize, String)>, i: usize, msg: String| {
        props[i] = false;
        fails.push((i, msg));
    };

    if g.graph.n() != n_expected {
        fail(
            &mut props,
            &mut fails,
            0,
            format!("vertex count {} ≠ {}", g.graph.n(), n_expected),
        );
    }

    let expected_max = if k == 2 { 2 } else { 3 };
    let mut hist = [0usize; 4];
    let mut too_big = None;
    for x in 0..g.graph.n() {
        let d = g.graph.degree(x);
        if d <= 3 {
            hist[d] += 1;
        } else {
            too_big = Some((x, d));
        }
    }
    let expected_deg3 = if k == 2 { 0 } else { 2 * (k - 2) };
    if let Some((x, d)) = too_big {
        fail(
            &mut props,
            &mut fails,
            1,
            format!("vertex {x} has degree {d} > 3"),
        );
    } else if g.graph.max_degree() != expected_max
        || hist[3] != expected_deg3
        || hist[2] != g.graph.n().saturating_sub(expected_deg3)
        || hist[0] != 0
        || hist[1] != 0
    {
        fail(
            &mut props,
            &mut fails,
            1,
            format!(
                "degree histogram [deg2={}, deg3={}] ≠ expected [deg2={}, deg3={}]",
                hist[2],
                hist[3],
                n_expected - expected_deg3,
                expected_deg3
            ),
        );
    }

    let terms = [g.v_in1, g.v_in2, g.v_out1, g.v_out2];
    let mut sorted_terms = terms.to_vec();
    sorted_terms.sort_unstable();
    sorted_terms.dedup();
    if sorted_terms.len() != 4 || terms.iter().any(|&t| t >= g.graph.n()) {
        fail(&mut props, &mut fails, 2, "terminals not distinct".into());
    } else if let Some(&t) = terms.iter().find(|&&t| g.graph.degree(t) != 2) {
        fail(
            &mut props,
            &mut fails,
            2,
            format!("terminal {t} has degree {} ≠ 2", g.graph.degree(t)),
        );
    }

    let check_pair = |first: &Path, second: &Path, ends1: (usize, usize), ends2: (usize, usize)| -> Option<String> {
        if first.endpoints() != ends1 {
            return Some(format!(
                "path endpoints {:?} ≠ {:?}",
                first.endpoints(),
                ends1
            ));
        }
        if second.endpoints() != ends2 {
            return Some(format!(
                "path endpoints {:?} ≠ {:?}",
                second.endpoints(),
                ends2
            ));
        }
        let mut seen = vec![false; g.graph.n()];
        for p in [first, second] {
            for &x in p.vertices() {
                if x >= g.graph.n() || seen[x] {
                    return Some(format!("vertex {x} covered twice (or out of range)"));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Some(format!("vertex {missing} not covered"));
        }
        None
    };
    if let Some(msg) = check_pair(
        &g.p1,
        &g.q1,
        (g.v_in1, g.v_out2),
        (g.v_in2, g.v_out1),
    ) {
        fail(&mut props, &mut fails, 3, format!("crossed pair: {msg}"));
    }
    if let Some(msg) = check_pair(
        &g.p2,
        &g.q2,
        (g.v_in1, g.v_out1),
        (g.v_in2, g.v_out2),
    ) {
        fail(&mut props, &mut fails, 4, format!("parallel pair: {msg}"));
    }

    let want_len = k * (k - 1);
    for (name, p) in [
        ("crossed-1", &g.p1),
        ("crossed-2", &g.q1),
        ("parallel-1", &g.p2),
        ("parallel-2", &g.q2),
    ] {
        if p.vertices().len() != want_len {
            fail(
                &mut props,
                &mut fails,
                5,
                format!("{name} has {} vertices ≠ {want_len}", p.vertices().len()),
            );
        } else if let Err(e) = p.validate_in(&g.graph) {
            fail(&mut props, &mut fails, 5, format!("{name} invalid: {e}"));
        }
    }

    fails.sort_by_key(|&(i, _)| i);
    GadgetReport {
        properties: props,
        first_failure: fails.into_iter().next(),
    }
}

/// Emits the gadget as a sequence of paths buildable from the single anchor
/// `z` (one of the two in-terminals): first the two edge-disjoint halves of
/// the backbone cycle from `z` to its antipode (length `k` each), then the
/// glued paths in enumeration order (length `2k+1` each).
///
/// Every path has at least one endpoint among `z` and previously placed
/// vertices, and fresh interiors — the input shape the embedding engine
/// consumes.
pub fn gadget_construction_sequence(g: &Gadget, z: usize) -> Result<Vec<Path>, GadgetError> {
    if z != g.v_in1 && z != g.v_in2 {
        return Err(GadgetError::NotAnInTerminal(z));
    }
    let two_k = g.cycle_order.len();
    let k = g.k;
    let iz = g
        .cycle_order
        .iter()
        .position(|&x| x == z)
        .expect("in-terminal on backbone");
    let mut fwd = Vec::with_capacity(k + 1);
    let mut bwd = Vec::with_capacity(k + 1);
    for step in 0..=k {
        fwd.push(g.cycle_order[(iz + step) % two_k]);
        bwd.push(g.cycle_order[(iz + two_k - step) % two_k]);
    }
    let mut seq = vec![Path::new(fwd)?, Path::new(bwd)?];
    seq.extend(g.glued_paths.iter().cloned());
    Ok(seq)
}

/// DOT export with the crossed spanning pair highlighted: edges on the
/// `v_in1 → v_out2` path red, on the `v_in2 → v_out1` path blue, rest gray.
pub fn gadget_to_dot(g: &Gadget) -> String {
    let mut color = std::collections::BTreeMap::new();
    for (p, c) in [(&g.p1, "red"), (&g.q1, "blue")] {
        for w in p.vertices().windows(2) {
            color.insert((w[0].min(w[1]), w[0].max(w[1])), c);
        }
    }
    let mut out = String::from("graph gadget {\n");
    for (u, v) in g.graph.edges() {
        let c = color.get(&(u, v)).copied().unwrap_or("gray");
        out.push_str(&format!("  {u} -- {v} [color={c}];\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::verify_constructible;

    #[test]
    fn order_validation() {
        assert_eq!(build_gadget(0).unwrap_err(), GadgetError::BadOrder(0));
        assert_eq!(build_gadget(4).unwrap_err(), GadgetError::BadOrder(4));
        assert_eq!(build_gadget(8).unwrap_err(), GadgetError::BadOrder(8));
        assert!(build_gadget(2).is_ok());
        assert!(build_gadget(6).is_ok());
    }

    #[test]
    fn order_six_shape() {
        let g = build_gadget(6).unwrap();
        assert_eq!(g.graph.n(), 60);
        assert_eq!(g.graph.edge_count(), 2 * 6 + 4 * 13);
        assert_eq!(g.p1.vertices().len(), 30);
        assert_eq!(g.glued_pairs.len(), 4);
    }

    #[test]
    fn order_two_is_four_cycle() {
        let g = build_gadget(2).unwrap();
        assert_eq!(g.graph.n(), 4);
        assert_eq!(g.graph.edge_count(), 4);
        assert_eq!(g.graph.max_degree(), 2);
        assert_eq!(g.p1.vertices(), &[g.v_in1, g.v_out2]);
        assert_eq!(g.q1.vertices(), &[g.v_in2, g.v_out1]);
    }

    #[test]
    fn verify_passes_built_gadgets() {
        for k in [2, 6, 10, 14] {
            let g = build_gadget(k).unwrap();
            let rep = verify_gadget(&g);
            assert!(rep.all_ok(), "k={k}: {:?}", rep.first_failure);
        }
    }

    #[test]
    fn verify_detects_tampered_paths() {
        let mut g = build_gadget(6).unwrap();
        g.p1 = g.q2.clone();
        let rep = verify_gadget(&g);
        assert!(!rep.all_ok());
        let (idx, _) = rep.first_failure.unwrap();
        assert_eq!(idx, 3);
    }

    #[test]
    fn verify_detects_wrong_terminal() {
        let mut g = build_gadget(6).unwrap();
        g.v_in1 = 1; // an interior backbone vertex of degree 3
        let rep = verify_gadget(&g);
        assert!(!rep.all_ok());
        assert!(rep.properties.iter().filter(|&&p| !p).count() >= 1);
        assert!(!rep.properties[2]);
    }

    #[test]
    fn glued_path_coverage_audit() {
        let g = build_gadget(10).unwrap();
        let mut seen = vec![0usize; g.graph.n()];
        for p in &g.glued_paths {
            for &x in p.interior() {
                seen[x] += 1;
            }
        }
        // Interiors partition exactly the non-backbone ids.
        for x in 0..g.graph.n() {
            let want = usize::from(x >= 2 * g.k);
            assert_eq!(seen[x], want, "vertex {x}");
        }
    }

    #[test]
    fn construction_sequence_shapes() {
        let g6 = build_gadget(6).unwrap();
        let seq = gadget_construction_sequence(&g6, g6.v_in1).unwrap();
        assert_eq!(seq.len(), 6);
        assert_eq!(seq[0].length(), 6);
        assert_eq!(seq[1].length(), 6);
        assert!(seq[2..].iter().all(|p| p.length() == 13));

        let g2 = build_gadget(2).unwrap();
        let seq2 = gadget_construction_sequence(&g2, g2.v_in2).unwrap();
        assert_eq!(seq2.len(), 2);
        assert!(seq2.iter().all(|p| p.length() == 2));
    }

    #[test]
    fn construction_sequence_passes_checker_both_anchors() {
        for k in [2usize, 6, 10] {
            let g = build_gadget(k).unwrap();
            for z in [g.v_in1, g.v_in2] {
                let seq = gadget_construction_sequence(&g, z).unwrap();
                let rep = verify_constructible(&g.graph, &[z], &seq, k, 2 * k + 1);
                assert!(rep.ok, "k={k} z={z}: {:?}", rep.first_violation);
            }
        }
    }

    #[test]
    fn construction_sequence_rejects_non_terminal() {
        let g = build_gadget(6).unwrap();
        assert_eq!(
            gadget_construction_sequence(&g, g.v_out1).unwrap_err(),
            GadgetError::NotAnInTerminal(g.v_out1)
        );
    }

    #[test]
    fn dot_highlights_crossed_pair() {
        let g = build_gadget(6).unwrap();
        let dot = gadget_to_dot(&g);
        assert!(dot.contains("[color=red]"));
        assert!(dot.contains("[color=blue]"));
        assert!(dot.contains("[color=gray]"));
    }
}
