//! The routing template: a bounded-degree graph with distinguished entry
//! vertices `A = {a_0..}` and exit vertices `B = {b_0..}` such that **every**
//! bijection `A → B` is realized by a family of vertex-disjoint paths that
//! partitions the whole vertex set, all paths of one fixed length.
//!
//! The template is wired along a comparison network: one register line per
//! entry vertex, one comparison gadget per comparator, pass-through paths for
//! untouched registers, and fixed-size connector paths between levels. To
//! route a bijection, the network is applied to the corresponding initial
//! assignment and each comparator's swap / no-swap decision selects the
//! crossed or parallel spanning pair inside its gadget.

use crate::gadget::{build_gadget, gadget_construction_sequence, Gadget, GadgetError};
use crate::graph::{Graph, GraphError, Path, PathFactor};
use crate::network::{
    apply_network, Assignment, ComparisonNetwork, NetworkError, NetworkProvider,
};
use thiserror::Error;

/// Errors from template construction and routing.
#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("need at least 2 registers, got {0}")]
    BadRegisters(usize),
    #[error("the comparison network has no levels; nothing to wire")]
    EmptyNetwork,
    #[error(
        "path length {requested} infeasible: natural length is {natural} and \
         padding must be 0 or at least {min_pad}; nearest feasible is {nearest}"
    )]
    InfeasibleLength {
        requested: usize,
        natural: usize,
        min_pad: usize,
        nearest: usize,
    },
    #[error("routing target list is not a permutation of 0..{0}")]
    BadPermutation(usize),
    #[error("underlying network failed to sort the initial assignment")]
    NotSorting,
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("network error: {0}")]
    Network(#[from] NetworkError),
    #[error("gadget error: {0}")]
    Gadget(#[from] GadgetError),
}

/// One gadget copy placed inside the template.
#[derive(Debug, Clone)]
pub struct GadgetCopy {
    /// 1-indexed network level the copy sits at.
    pub level: usize,
    /// Index of its comparator within that level's comparator list.
    pub comp_index: usize,
    /// The comparator's register pair `(j1, j2)`, `j1 < j2`.
    pub registers: (usize, usize),
    /// Gadget-local id → template id.
    pub map: Vec<usize>,
}

#[derive(Debug, Clone)]
enum SegmentKind {
    /// Pass-through path for an untouched register, in line order.
    Pass(Vec<usize>),
    /// This register runs through the gadget copy with the given index.
    Gadget { copy: usize },
}

/// The routing template.
#[derive(Debug, Clone)]
pub struct RoutingTemplate {
    /// The template graph.
    pub graph: Graph,
    /// The underlying comparison network.
    pub network: ComparisonNetwork,
    /// Gadget order used for all copies.
    pub k: usize,
    /// Number of registers (= |A| = |B|).
    pub n_reg: usize,
    /// Uniform routed-path length (edges).
    pub ell: usize,
    /// Entry vertices, `a[j]` for register `j`.
    pub a: Vec<usize>,
    /// Exit vertices, `b[j]` for register `j`.
    pub b: Vec<usize>,
    /// All gadget copies in allocation order.
    pub copies: Vec<GadgetCopy>,
    proto: Gadget,
    /// `conn[i][j]`: the `k` connector ids before level `i+1` (after level
    /// `i`) on register `j`, in line order.
    conn: Vec<Vec<Vec<usize>>>,
    /// `levels[i][j]`: segment of register `j` at 1-indexed level `i+1`.
    levels: Vec<Vec<SegmentKind>>,
    /// Padding ids appended after the last connector, per register.
    pad: Vec<Vec<usize>>,
}

/// Rounds a requested gadget order up to the nearest valid one
/// (`k ≥ 2`, `k ≡ 2 (mod 4)`).
pub fn round_up_order(k_req: usize) -> usize {
    if k_req <= 2 {
        return 2;
    }
    let mut k = k_req;
    while k % 4 != 2 {
        k += 1;
    }
    k
}

/// Natural vertex count of an unpadded template: per register, `depth`
/// segments of `k(k−1)` vertices plus `depth+1` connectors of `k` vertices.
pub fn census(n_reg: usize, k: usize, depth: usize) -> usize {
    n_reg * (depth * k * (k - 1) + (depth + 1) * k)
}

/// Builds a routing template over `n_reg` registers with gadget order
/// `round_up_order(k_req)`, using the comparison network from `provider`.
///
/// When `ell` is given, every routed path is padded to that exact length;
/// the padding per line must be zero or at least `k`, otherwise an
/// [`TemplateError::InfeasibleLength`] names the nearest feasible length.
pub fn build_template(
    n_reg: usize,
    k_req: usize,
    ell: Option<usize>,
    provider: &dyn NetworkProvider,
) -> Result<RoutingTemplate, TemplateError> {
    if n_reg < 2 {
        return Err(TemplateError::BadRegisters(n_reg));
    }
    let k = round_up_order(k_req);
    let network = provider.build(n_reg)?;
    let depth = network.depth();
    if depth == 0 {
        return Err(TemplateError::EmptyNetwork);
    }

    let natural = census(n_reg, k, depth) / n_reg - 1;
    let target = ell.unwrap_or(natural);
    let pad_len = match target.checked_sub(natural) {
        Some(0) => 0,
        Some(d) if d >= k => d,
        _ => {
            let nearest = if target <= natural || target - natural <= k / 2 {
                natural
            } else {
                natural + k
            };
            return Err(TemplateError::InfeasibleLength {
                requested: target,
                natural,
                min_pad: k,
                nearest,
            });
        }
    };

    let proto = build_gadget(k)?;
    let seg_len = k * (k - 1);
    let mut next_id = 0usize;
    let mut alloc = |count: usize| -> Vec<usize> {
        let ids: Vec<usize> = (next_id..next_id + count).collect();
        next_id += count;
        ids
    };

    let mut conn = Vec::with_capacity(depth + 1);
    for _ in 0..=depth {
        let mut per_reg = Vec::with_capacity(n_reg);
        for _ in 0..n_reg {
            per_reg.push(alloc(k));
        }
        conn.push(per_reg);
    }

    let mut copies = Vec::new();
    let mut levels = Vec::with_capacity(depth);
    for (li, level) in network.levels().iter().enumerate() {
        let mut segs: Vec<Option<SegmentKind>> = vec![None; n_reg];
        for (ci, &(j1, j2)) in level.iter().enumerate() {
            let map = alloc(2 * k * (k - 1));
            segs[j1] = Some(SegmentKind::Gadget { copy: copies.len() });
            segs[j2] = Some(SegmentKind::Gadget { copy: copies.len() });
            copies.push(GadgetCopy {
                level: li + 1,
                comp_index: ci,
                registers: (j1, j2),
                map,
            });
        }
        let segs: Vec<SegmentKind> = segs
            .into_iter()
            .map(|s| s.unwrap_or_else(|| SegmentKind::Pass(alloc(seg_len))))
            .collect();
        levels.push(segs);
    }

    let mut pad = Vec::with_capacity(n_reg);
    for _ in 0..n_reg {
        pad.push(alloc(pad_len));
    }

    // Assemble edges.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let chain = |ids: &[usize], edges: &mut Vec<(usize, usize)>| {
        for w in ids.windows(2) {
            edges.push((w[0], w[1]));
        }
    };
    for per_reg in &conn {
        for c in per_reg {
            chain(c, &mut edges);
        }
    }
    for segs in &levels {
        for seg in segs {
            if let SegmentKind::Pass(ids) = seg {
                chain(ids.as_slice(), &mut edges);
            }
        }
    }
    for c in &copies {
        for (u, v) in proto.graph.edges() {
            edges.push((c.map[u], c.map[v]));
        }
    }
    for (j, ids) in pad.iter().enumerate() {
        if !ids.is_empty() {
            edges.push((conn[depth][j][k - 1], ids[0]));
            chain(ids, &mut edges);
        }
    }

    let in_of = |i: usize, j: usize, levels: &[Vec<SegmentKind>], copies: &[GadgetCopy]| -> usize {
        match &levels[i - 1][j] {
            SegmentKind::Pass(ids) => ids[0],
            SegmentKind::Gadget { copy } => {
                let c = &copies[*copy];
                let t = if j == c.registers.0 {
                    proto.v_in1
                } else {
                    proto.v_in2
                };
                c.map[t]
            }
        }
    };
    let out_of = |i: usize, j: usize, levels: &[Vec<SegmentKind>], copies: &[GadgetCopy]| -> usize {
        match &levels[i - 1][j] {
            SegmentKind::Pass(ids) => *ids.last().unwrap(),
            SegmentKind::Gadget { copy } => {
                let c = &copies[*copy];
                let t = if j == c.registers.0 {
                    proto.v_out1
                } else {
                    proto.v_out2
                };
                c.map[t]
            }
        }
    };
    for j in 0..n_reg {
        edges.push((conn[0][j][k - 1], in_of(1, j, &levels, &copies)));
        for i in 1..depth {
            edges.push((out_of(i, j, &levels, &copies), conn[i][j][0]));
            edges.push((conn[i][j][k - 1], in_of(i + 1, j, &levels, &copies)));
        }
        edges.push((out_of(depth, j, &levels, &copies), conn[depth][j][0]));
    }

    let graph = Graph::from_edges(next_id, &edges)?;
    debug_assert_eq!(graph.n(), census(n_reg, k, depth) + n_reg * pad_len);

    let a = (0..n_reg).map(|j| conn[0][j][0]).collect();
    let b = (0..n_reg)
        .map(|j| {
            if pad_len > 0 {
                *pad[j].last().unwrap()
            } else {
                conn[depth][j][k - 1]
            }
        })
        .collect();

    Ok(RoutingTemplate {
        graph,
        network,
        k,
        n_reg,
        ell: natural + pad_len,
        a,
        b,
        copies,
        proto,
        conn,
        levels,
        pad,
    })
}

impl RoutingTemplate {
    /// Network depth (number of comparator levels).
    pub fn depth(&self) -> usize {
        self.network.depth()
    }

    /// The prototype gadget shared by all copies.
    pub fn prototype(&self) -> &Gadget {
        &self.proto
    }

    fn in_vertex(&self, i: usize, j: usize) -> usize {
        match &self.levels[i - 1][j] {
            SegmentKind::Pass(ids) => ids[0],
            SegmentKind::Gadget { copy } => {
                let c = &self.copies[*copy];
                let t = if j == c.registers.0 {
                    self.proto.v_in1
                } else {
                    self.proto.v_in2
                };
                c.map[t]
            }
        }
    }

    fn out_vertex(&self, i: usize, j: usize) -> usize {
        match &self.levels[i - 1][j] {
            SegmentKind::Pass(ids) => *ids.last().unwrap(),
            SegmentKind::Gadget { copy } => {
                let c = &self.copies[*copy];
                let t = if j == c.registers.0 {
                    self.proto.v_out1
                } else {
                    self.proto.v_out2
                };
                c.map[t]
            }
        }
    }

    /// Routes the bijection `a[j] → b[phi[j]]`: returns vertex-disjoint paths
    /// (one per register, in register order) that partition the vertex set,
    /// each of length exactly `self.ell`.
    pub fn route(&self, phi: &[usize]) -> Result<PathFactor, TemplateError> {
        if phi.len() != self.n_reg {
            return Err(TemplateError::BadPermutation(self.n_reg));
        }
        let mut seen = vec![false; self.n_reg];
        for &p in phi {
            if p >= self.n_reg || seen[p] {
                return Err(TemplateError::BadPermutation(self.n_reg));
            }
            seen[p] = true;
        }
        let rho0 = Assignment::new(phi.iter().map(|&p| p + 1).collect())?;
        let (fin, trace) = apply_network(&self.network, &rho0)?;
        if !fin.is_sorted() {
            return Err(TemplateError::NotSorting);
        }

        let mut paths = Vec::with_capacity(self.n_reg);
        for j in 0..self.n_reg {
            let mut cur = j;
            let mut verts: Vec<usize> = self.conn[0][j].clone();
            for i in 1..=self.depth() {
                match &self.levels[i - 1][cur] {
                    SegmentKind::Pass(ids) => verts.extend_from_slice(ids),
                    SegmentKind::Gadget { copy } => {
                        let c = &self.copies[*copy];
                        let swapped = trace[i - 1][c.comp_index];
                        let (local, next) = if cur == c.registers.0 {
                            if swapped {
                                (&self.proto.p1, c.registers.1)
                            } else {
                                (&self.proto.p2, cur)
                            }
                        } else if swapped {
                            (&self.proto.q1, c.registers.0)
                        } else {
                            (&self.proto.q2, cur)
                        };
                        verts.extend(local.vertices().iter().map(|&x| c.map[x]));
                        cur = next;
                    }
                }
                verts.extend_from_slice(&self.conn[i][cur]);
            }
            verts.extend_from_slice(&self.pad[cur]);
            debug_assert_eq!(cur, phi[j]);
            debug_assert_eq!(verts.len(), self.ell + 1);
            paths.push(Path::new(verts)?);
        }
        Ok(PathFactor {
            paths,
            target_set: (0..self.graph.n()).collect(),
        })
    }

    /// Approach path into level `i` on register `j`: the preceding connector
    /// with its junction edges — anchored at the entry vertex (level 1) or at
    /// the previous level's exit vertex. For order-2 gadgets a pass-through
    /// segment is absorbed whole; otherwise the approach stops at the
    /// segment's first vertex and the rest is emitted by `pass_chunks`.
    fn approach_path(&self, i: usize, j: usize) -> Path {
        let mut verts = Vec::new();
        if i >= 2 {
            verts.push(self.out_vertex(i - 1, j));
        }
        verts.extend_from_slice(&self.conn[i - 1][j]);
        match &self.levels[i - 1][j] {
            SegmentKind::Pass(ids) if self.k == 2 => verts.extend_from_slice(ids),
            _ => verts.push(self.in_vertex(i, j)),
        }
        Path::new(verts).expect("approach paths are repeat-free by construction")
    }

    /// Greedy anchored chunking of `ids` continuing from `anchor`, every
    /// chunk length within `[k, 4k]`.
    fn chunks(&self, mut anchor: usize, ids: &[usize], out: &mut Vec<Path>) {
        let k = self.k;
        let mut pos = 0;
        while pos < ids.len() {
            let rem = ids.len() - pos;
            let take = if rem <= 4 * k {
                rem
            } else if rem - 4 * k >= k {
                4 * k
            } else {
                rem - k
            };
            let mut verts = Vec::with_capacity(take + 1);
            verts.push(anchor);
            verts.extend_from_slice(&ids[pos..pos + take]);
            anchor = *verts.last().unwrap();
            pos += take;
            out.push(Path::new(verts).expect("chunk paths are repeat-free"));
        }
    }

    /// Emits the whole template as a path sequence buildable from the entry
    /// vertices `a`: every path has length in `[k, 4k]`, fresh interior
    /// vertices, and at least one endpoint among `a` and previously emitted
    /// vertices; together the paths cover every edge exactly once.
    pub fn construction_sequence(&self) -> Vec<Path> {
        let mut seq = Vec::new();
        for i in 1..=self.depth() {
            let is_second_line = |j: usize| match &self.levels[i - 1][j] {
                SegmentKind::Gadget { copy } => self.copies[*copy].registers.1 == j,
                SegmentKind::Pass(_) => false,
            };
            // First-line and pass approaches.
            for j in 0..self.n_reg {
                if !is_second_line(j) {
                    seq.push(self.approach_path(i, j));
                }
            }
            // Gadget bodies, anchored at the first line's in-terminal.
            for c in self.copies.iter().filter(|c| c.level == i) {
                let local = gadget_construction_sequence(&self.proto, self.proto.v_in1)
                    .expect("prototype in-terminal is valid");
                for p in local {
                    let mapped: Vec<usize> = p.vertices().iter().map(|&x| c.map[x]).collect();
                    seq.push(Path::new(mapped).expect("gadget paths are repeat-free"));
                }
            }
            // Second-line approaches (their segment endpoint now exists).
            for j in 0..self.n_reg {
                if is_second_line(j) {
                    seq.push(self.approach_path(i, j));
                }
            }
            // Remaining pass-through bodies for larger gadget orders.
            if self.k > 2 {
                for j in 0..self.n_reg {
                    if let SegmentKind::Pass(ids) = &self.levels[i - 1][j] {
                        self.chunks(ids[0], &ids[1..], &mut seq);
                    }
                }
            }
        }
        // Exit connectors and padding.
        for j in 0..self.n_reg {
            let mut verts = vec![self.out_vertex(self.depth(), j)];
            verts.extend_from_slice(&self.conn[self.depth()][j]);
            seq.push(Path::new(verts).expect("tail paths are repeat-free"));
            if !self.pad[j].is_empty() {
                self.chunks(self.conn[self.depth()][j][self.k - 1], &self.pad[j], &mut seq);
            }
        }
        seq
    }
}

/// First violation found by [`verify_constructible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructibleViolation {
    /// Path `index` is not a valid path of the graph.
    InvalidPath { index: usize, detail: String },
    /// Path `index` has a length outside the window.
    LengthOutOfWindow { index: usize, length: usize },
    /// Path `index` has an interior vertex that was already placed.
    StaleInterior { index: usize, vertex: usize },
    /// Path `index` has no endpoint among the anchors and prior vertices.
    NoAnchoredEndpoint { index: usize },
    /// Path `index` reuses an edge already covered.
    EdgeReused { index: usize, edge: (usize, usize) },
    /// The sequence never covers this graph edge.
    EdgeMissing { edge: (usize, usize) },
}

/// Report from [`verify_constructible`].
#[derive(Debug, Clone)]
pub struct ConstructibleReport {
    pub ok: bool,
    pub first_violation: Option<ConstructibleViolation>,
}

/// Checks that `seq` witnesses buildability of `g` from the anchor set:
/// every path valid in `g` with length in `[len_lo, len_hi]`, interior
/// vertices never previously placed, at least one endpoint among
/// `a_set ∪ (vertices of earlier paths)`, and the path edges partition
/// `E(g)` exactly.
pub fn verify_constructible(
    g: &Graph,
    a_set: &[usize],
    seq: &[Path],
    len_lo: usize,
    len_hi: usize,
) -> ConstructibleReport {
    let fail = |v: ConstructibleViolation| ConstructibleReport {
        ok: false,
        first_violation: Some(v),
    };
    let mut placed = vec![false; g.n()];
    for &x in a_set {
        if x >= g.n() {
            return fail(ConstructibleViolation::InvalidPath {
                index: 0,
                detail: format!("anchor {x} out of range"),
            });
        }
        placed[x] = true;
    }
    let mut used = std::collections::BTreeSet::new();
    for (index, p) in seq.iter().enumerate() {
        if let Err(e) = p.validate_in(g) {
            return fail(ConstructibleViolation::InvalidPath {
                index,
                detail: e.to_string(),
            });
        }
        if p.length() < len_lo || p.length() > len_hi {
            return fail(ConstructibleViolation::LengthOutOfWindow {
                index,
                length: p.length(),
            });
        }
        if let Some(&v) = p.interior().iter().find(|&&v| placed[v]) {
            return fail(ConstructibleViolation::StaleInterior { index, vertex: v });
        }
        let (s, t) = p.endpoints();
        if !placed[s] && !placed[t] {
            return fail(ConstructibleViolation::NoAnchoredEndpoint { index });
        }
        for w in p.vertices().windows(2) {
            let e = (w[0].min(w[1]), w[0].max(w[1]));
            if !used.insert(e) {
                return fail(ConstructibleViolation::EdgeReused { index, edge: e });
            }
        }
        for &v in p.vertices() {
            placed[v] = true;
        }
    }
    if let Some(edge) = g.edges().into_iter().find(|e| !used.contains(e)) {
        return fail(ConstructibleViolation::EdgeMissing { edge });
    }
    ConstructibleReport {
        ok: true,
        first_violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_valid_path_factor;
    use crate::network::{Brickwall, OddEvenMergesort};

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut all = Vec::with_capacity(factorial(n));
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            all.push(cur.clone());
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        all
    }

    #[test]
    fn order_rounding() {
        assert_eq!(round_up_order(0), 2);
        assert_eq!(round_up_order(2), 2);
        assert_eq!(round_up_order(3), 6);
        assert_eq!(round_up_order(6), 6);
        assert_eq!(round_up_order(7), 10);
    }

    #[test]
    fn two_register_desk_example() {
        let t = build_template(2, 2, None, &OddEvenMergesort).unwrap();
        assert_eq!(t.graph.n(), 12);
        assert_eq!(t.ell, 5);
        assert_eq!(t.graph.max_degree(), 3);
        assert_eq!(census(2, 2, 1), 12);
    }

    #[test]
    fn census_matches_builds() {
        for (n_reg, k) in [(2usize, 2usize), (3, 2), (4, 2), (2, 6), (3, 6)] {
            let t = build_template(n_reg, k, None, &OddEvenMergesort).unwrap();
            assert_eq!(t.graph.n(), census(n_reg, k, t.depth()), "n_reg={n_reg} k={k}");
            assert_eq!(t.ell + 1, t.graph.n() / n_reg);
        }
    }

    #[test]
    fn routes_every_bijection_exactly() {
        for n_reg in [2usize, 3, 4] {
            let t = build_template(n_reg, 2, None, &OddEvenMergesort).unwrap();
            for phi in permutations(n_reg) {
                let f = t.route(&phi).unwrap();
                assert_eq!(f.paths.len(), n_reg);
                assert!(f.paths.iter().all(|p| p.length() == t.ell));
                let cons: Vec<(usize, usize)> =
                    (0..n_reg).map(|j| (t.a[j], t.b[phi[j]])).collect();
                let (ok, diag) = is_valid_path_factor(&t.graph, &f, Some(&cons));
                assert!(ok, "n_reg={n_reg} phi={phi:?}: {diag:?}");
            }
        }
    }

    #[test]
    fn routes_with_larger_gadget_order() {
        let t = build_template(2, 6, None, &OddEvenMergesort).unwrap();
        assert_eq!(t.graph.n(), 2 * (30 + 12));
        for phi in [vec![0, 1], vec![1, 0]] {
            let f = t.route(&phi).unwrap();
            let cons: Vec<(usize, usize)> = (0..2).map(|j| (t.a[j], t.b[phi[j]])).collect();
            let (ok, diag) = is_valid_path_factor(&t.graph, &f, Some(&cons));
            assert!(ok, "{diag:?}");
        }
    }

    #[test]
    fn identity_routing_stays_parallel() {
        let t = build_template(4, 2, None, &OddEvenMergesort).unwrap();
        let phi: Vec<usize> = (0..4).collect();
        let f = t.route(&phi).unwrap();
        for (j, p) in f.paths.iter().enumerate() {
            assert_eq!(p.endpoints(), (t.a[j], t.b[j]));
        }
    }

    #[test]
    fn rejects_non_permutations() {
        let t = build_template(3, 2, None, &OddEvenMergesort).unwrap();
        assert!(matches!(
            t.route(&[0, 0, 1]),
            Err(TemplateError::BadPermutation(3))
        ));
        assert!(matches!(
            t.route(&[0, 1]),
            Err(TemplateError::BadPermutation(3))
        ));
    }

    #[test]
    fn padding_reaches_requested_length() {
        let t0 = build_template(3, 2, None, &OddEvenMergesort).unwrap();
        let want = t0.ell + 5;
        let t = build_template(3, 2, Some(want), &OddEvenMergesort).unwrap();
        assert_eq!(t.ell, want);
        assert_eq!(t.graph.n(), 3 * (want + 1));
        for phi in permutations(3) {
            let f = t.route(&phi).unwrap();
            assert!(f.paths.iter().all(|p| p.length() == want));
            let (ok, diag) = is_valid_path_factor(&t.graph, &f, None);
            assert!(ok, "{diag:?}");
        }
    }

    #[test]
    fn infeasible_length_names_nearest() {
        let t0 = build_template(3, 2, None, &OddEvenMergesort).unwrap();
        let err = build_template(3, 2, Some(t0.ell + 1), &OddEvenMergesort).unwrap_err();
        match err {
            TemplateError::InfeasibleLength {
                requested,
                natural,
                nearest,
                ..
            } => {
                assert_eq!(requested, t0.ell + 1);
                assert_eq!(natural, t0.ell);
                assert_eq!(nearest, t0.ell);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err = build_template(3, 2, Some(t0.ell - 1), &OddEvenMergesort).unwrap_err();
        assert!(matches!(err, TemplateError::InfeasibleLength { .. }));
    }

    #[test]
    fn construction_sequence_is_buildable() {
        let cases: Vec<RoutingTemplate> = vec![
            build_template(2, 2, None, &OddEvenMergesort).unwrap(),
            build_template(4, 2, None, &OddEvenMergesort).unwrap(),
            build_template(3, 2, None, &Brickwall).unwrap(),
            build_template(2, 6, None, &OddEvenMergesort).unwrap(),
            build_template(3, 6, None, &OddEvenMergesort).unwrap(),
            build_template(3, 2, Some(26), &OddEvenMergesort).unwrap(),
            build_template(2, 6, Some(60), &OddEvenMergesort).unwrap(),
        ];
        for t in cases {
            let seq = t.construction_sequence();
            let rep = verify_constructible(&t.graph, &t.a, &seq, t.k, 4 * t.k);
            assert!(
                rep.ok,
                "n_reg={} k={} ell={}: {:?}",
                t.n_reg, t.k, t.ell, rep.first_violation
            );
        }
    }

    #[test]
    fn constructible_checker_raises_right_violations() {
        let t = build_template(2, 2, None, &OddEvenMergesort).unwrap();
        let seq = t.construction_sequence();

        // Wrong anchor set: nothing is placed, first path has no anchor.
        let rep = verify_constructible(&t.graph, &[], &seq, t.k, 4 * t.k);
        assert!(matches!(
            rep.first_violation,
            Some(ConstructibleViolation::NoAnchoredEndpoint { index: 0 })
        ));

        // Tight window: some path falls outside.
        let rep = verify_constructible(&t.graph, &t.a, &seq, 3, 3);
        assert!(matches!(
            rep.first_violation,
            Some(ConstructibleViolation::LengthOutOfWindow { .. })
        ));

        // Re-cover an edge with an interior-free path: reuse is flagged.
        let mut dup = seq.clone();
        dup.push(Path::new(seq[0].vertices()[..2].to_vec()).unwrap());
        let rep = verify_constructible(&t.graph, &t.a, &dup, 1, 4 * t.k);
        assert!(matches!(
            rep.first_violation,
            Some(ConstructibleViolation::EdgeReused { .. })
        ));

        // Drop a path: some edge is never covered.
        let partial = &seq[..seq.len() - 1];
        let rep = verify_constructible(&t.graph, &t.a, partial, t.k, 4 * t.k);
        assert!(matches!(
            rep.first_violation,
            Some(ConstructibleViolation::EdgeMissing { .. })
        ));
    }

    #[test]
    fn builds_are_deterministic() {
        let t1 = build_template(4, 2, None, &OddEvenMergesort).unwrap();
        let t2 = build_template(4, 2, None, &OddEvenMergesort).unwrap();
        assert_eq!(
            t1.graph.to_json_value().to_string(),
            t2.graph.to_json_value().to_string()
        );
        let phi = vec![2, 0, 3, 1];
        let f1 = t1.route(&phi).unwrap();
        let f2 = t2.route(&phi).unwrap();
        assert_eq!(
            serde_json::to_string(&f1).unwrap(),
            serde_json::to_string(&f2).unwrap()
        );
    }

    #[test]
    fn rejects_single_register() {
        assert!(matches!(
            build_template(1, 2, None, &OddEvenMergesort),
            Err(TemplateError::BadRegisters(1))
        ));
    }
}
