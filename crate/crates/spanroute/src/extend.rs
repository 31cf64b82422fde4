//! Leaf-extension embedding with rollback: maintain a small-degree subgraph
//! `S` of a host graph so that an expansion invariant keeps holding, which
//! guarantees that `S` can always be grown by one more leaf. The invariant —
//! for every vertex set `U` with `1 ≤ |U| ≤ 2m`,
//! `|Γ(U) \ V(S)| ≥ (D−1)|U| − Σ_{u ∈ U∩V(S)} (d_S(u)−1)` — survives both
//! leaf additions and leaf removals, so exploratory growth can be rolled
//! back. On top of the two primitive moves this module builds prescribed
//! exact-length connections between vertices of `S`, whole-tree and forest
//! embeddings, and the bare-path surgery used to split a tree into a forest
//! plus uniform path pieces.

use crate::graph::{Graph, GraphError, Path, Subgraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors from the extension engine.
#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("degree cap must be at least 3, got {0}")]
    BadDegreeCap(u32),
    #[error("vertex {0} is not in the working subgraph")]
    AnchorNotInS(usize),
    #[error("vertex {vertex} already has subgraph degree {degree} (cap {cap})")]
    DegreeCapReached { vertex: usize, degree: u32, cap: u32 },
    #[error("no admissible extension at {anchor} after trying {tried} candidates")]
    NoExtension { anchor: usize, tried: usize },
    #[error("exact audit infeasible for n={n}, m={m}; allowed only for n ≤ 18 and m ≤ 3")]
    ExactAuditTooLarge { n: usize, m: usize },
    #[error("length {ell} too short; this configuration needs at least {min}")]
    LengthTooShort { ell: usize, min: usize },
    #[error("subgraph too large: {size} exceeds the budget {budget}")]
    SizeBudgetExceeded { size: usize, budget: i64 },
    #[error("endpoint {vertex} has subgraph degree {degree} > cap/2 = {half_cap}")]
    EndpointDegreeTooHigh { vertex: usize, degree: u32, half_cap: u32 },
    #[error("could not connect {a} and {b}: {detail}")]
    ConnectFailed { a: usize, b: usize, detail: String },
    #[error("target is not a tree/forest: {0}")]
    NotAForest(String),
    #[error("target tree degree {got} exceeds cap/2 = {half_cap}")]
    TreeDegreeTooHigh { got: usize, half_cap: u32 },
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// How operations re-verify the expansion invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    /// Exhaustively re-check after every tentative move (tiny hosts only).
    Exact,
    /// Randomized spot-check with a sample budget and seed.
    Sampled { budget: usize, seed: u64 },
    /// No per-move audit; correctness is established by the caller's own
    /// final verification.
    Trust,
}

/// A set violating the expansion condition, with both sides of the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionWitness {
    /// The violating set, ascending.
    pub u_set: Vec<usize>,
    /// `|Γ(U) \ V(S)|`.
    pub gamma_outside: usize,
    /// `(D−1)|U| − Σ_{u∈U∩V(S)} (d_S(u)−1)`.
    pub required: i64,
}

/// Result of checking the expansion condition on one set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionCheck {
    pub gamma_outside: usize,
    pub required: i64,
}

impl ExpansionCheck {
    /// Whether the condition holds on the checked set.
    pub fn satisfied(&self) -> bool {
        self.gamma_outside as i64 >= self.required
    }
}

/// A growing subgraph of a fixed host, with the degree cap and set-size
/// parameter of the expansion invariant, plus a forbidden mask for vertices
/// reserved by the caller (extensions never claim them; explicit seeding and
/// path insertion may).
#[derive(Debug, Clone)]
pub struct ExtendableState<'g> {
    host: &'g Graph,
    s: Subgraph,
    d_cap: u32,
    m: usize,
    forbidden: Vec<bool>,
}

impl<'g> ExtendableState<'g> {
    /// Fresh empty state over `host` with degree cap `d_cap ≥ 3` and
    /// set-size parameter `m`.
    pub fn new(host: &'g Graph, d_cap: u32, m: usize) -> Result<Self, ExtendError> {
        if d_cap < 3 {
            return Err(ExtendError::BadDegreeCap(d_cap));
        }
        Ok(ExtendableState {
            host,
            s: Subgraph::empty(host.n()),
            d_cap,
            m: m.max(1),
            forbidden: vec![false; host.n()],
        })
    }

    /// The host graph.
    pub fn host(&self) -> &Graph {
        self.host
    }

    /// The current working subgraph.
    pub fn subgraph(&self) -> &Subgraph {
        &self.s
    }

    /// Degree cap `D`.
    pub fn degree_cap(&self) -> u32 {
        self.d_cap
    }

    /// Set-size parameter `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Marks a vertex as reserved: extensions will not claim it.
    pub fn forbid(&mut self, v: usize) {
        self.forbidden[v] = true;
    }

    /// Lifts a reservation.
    pub fn allow(&mut self, v: usize) {
        self.forbidden[v] = false;
    }

    /// Whether a vertex is currently reserved.
    pub fn is_forbidden(&self, v: usize) -> bool {
        self.forbidden[v]
    }

    /// Adds an isolated vertex to the subgraph (explicit placement; the
    /// forbidden mask does not apply).
    pub fn seed_vertex(&mut self, v: usize) -> Result<(), ExtendError> {
        self.s.add_vertex(v)?;
        Ok(())
    }

    /// Inserts a whole path (explicit placement, unaudited): interior
    /// vertices must be new, endpoints may exist.
    pub fn insert_path(&mut self, p: &Path) -> Result<(), ExtendError> {
        self.s.add_path(self.host, p)?;
        Ok(())
    }

    /// Removes a previously inserted path again: every path edge disappears
    /// and the interior vertices leave the subgraph, while the endpoints
    /// stay (possibly as isolated vertices). The interiors must not have
    /// acquired edges outside the path.
    pub fn remove_path(&mut self, p: &Path) -> Result<(), ExtendError> {
        let vs = p.vertices();
        self.s.remove_edge(vs[0], vs[1])?;
        for &w in &vs[1..vs.len() - 1] {
            self.s.remove_leaf(w)?;
        }
        Ok(())
    }

    /// Substitutes `new` for the embedded vertex `old`: `new` takes over
    /// every subgraph edge of `old`, which then leaves the subgraph. `new`
    /// must be outside the subgraph and host-adjacent to each of `old`'s
    /// current subgraph neighbors, so the embedding stays edge-faithful.
    pub fn swap_vertex(&mut self, old: usize, new: usize) -> Result<(), ExtendError> {
        let nbrs: Vec<usize> = self.s.neighbors(old).to_vec();
        for &x in &nbrs {
            if !self.host.has_edge(new, x) {
                return Err(ExtendError::ConnectFailed {
                    a: new,
                    b: x,
                    detail: "substitute vertex misses a host edge".to_string(),
                });
            }
        }
        self.s.add_vertex(new)?;
        for &x in &nbrs {
            self.s.remove_edge(old, x)?;
            self.s.add_edge(new, x)?;
        }
        self.s.remove_leaf(old)?;
        Ok(())
    }

    /// True when `v` can be claimed by an extension.
    fn usable(&self, v: usize) -> bool {
        !self.s.has_vertex(v) && !self.forbidden[v]
    }

    /// Number of host-neighbors of `w` inside the subgraph.
    fn degree_into_s(&self, w: usize) -> usize {
        self.host
            .neighbors(w)
            .iter()
            .filter(|&&x| self.s.has_vertex(x))
            .count()
    }

    /// Checks the expansion condition on one candidate set.
    pub fn check_expansion_condition(&self, u_set: &[usize]) -> ExpansionCheck {
        let mut gamma_outside = BTreeSet::new();
        let mut deficit: i64 = 0;
        for &u in u_set {
            for &w in self.host.neighbors(u) {
                if !self.s.has_vertex(w) {
                    gamma_outside.insert(w);
                }
            }
            if self.s.has_vertex(u) {
                deficit += i64::from(self.s.degree(u)) - 1;
            }
        }
        ExpansionCheck {
            gamma_outside: gamma_outside.len(),
            required: (i64::from(self.d_cap) - 1) * u_set.len() as i64 - deficit,
        }
    }

    /// Exhaustively verifies the expansion invariant over every vertex set
    /// of size `1..=2m`. Only allowed on tiny instances (`n ≤ 18`, `m ≤ 3`);
    /// returns the first violating set, or `None` when the invariant holds.
    pub fn is_extendable_exact(&self) -> Result<Option<ExpansionWitness>, ExtendError> {
        let n = self.host.n();
        if n > 18 || self.m > 3 {
            return Err(ExtendError::ExactAuditTooLarge { n, m: self.m });
        }
        for size in 1..=(2 * self.m).min(n) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let check = self.check_expansion_condition(&idx);
                if !check.satisfied() {
                    return Ok(Some(ExpansionWitness {
                        u_set: idx,
                        gamma_outside: check.gamma_outside,
                        required: check.required,
                    }));
                }
                // Advance the combination odometer.
                let mut i = size;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if idx[i] != i + n - size {
                        idx[i] += 1;
                        for j in i + 1..size {
                            idx[j] = idx[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        idx.clear();
                        break;
                    }
                }
                if idx.is_empty() {
                    break;
                }
            }
        }
        Ok(None)
    }

    /// Randomized spot-check of the expansion invariant: `budget` sampled
    /// sets of size `1..=2m`, half drawn near the subgraph (where the bound
    /// binds), half uniform. Returns the first violating set found.
    pub fn is_extendable_sampled(&self, budget: usize, seed: u64) -> Option<ExpansionWitness> {
        let n = self.host.n();
        if n == 0 {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut near: Vec<usize> = Vec::new();
        {
            let mut mark = vec![false; n];
            for v in 0..n {
                if self.s.has_vertex(v) {
                    mark[v] = true;
                    for &w in self.host.neighbors(v) {
                        mark[w] = true;
                    }
                }
            }
            near.extend((0..n).filter(|&v| mark[v]));
        }
        let all: Vec<usize> = (0..n).collect();
        for trial in 0..budget {
            let pool = if trial % 2 == 0 && !near.is_empty() {
                &near
            } else {
                &all
            };
            let size = rng.gen_range(1..=(2 * self.m).min(pool.len()));
            let mut u_set: Vec<usize> = pool
                .choose_multiple(&mut rng, size)
                .copied()
                .collect();
            u_set.sort_unstable();
            let check = self.check_expansion_condition(&u_set);
            if !check.satisfied() {
                return Some(ExpansionWitness {
                    u_set,
                    gamma_outside: check.gamma_outside,
                    required: check.required,
                });
            }
        }
        None
    }

    fn audit(&self, mode: AuditMode) -> Result<Option<ExpansionWitness>, ExtendError> {
        match mode {
            AuditMode::Exact => self.is_extendable_exact(),
            AuditMode::Sampled { budget, seed } => Ok(self.is_extendable_sampled(budget, seed)),
            AuditMode::Trust => Ok(None),
        }
    }

    /// Extension candidates at `anchor`: free, unreserved host neighbors,
    /// preferring those with the fewest host-neighbors inside the subgraph
    /// (ties by id) — the choice that least erodes expansion.
    fn candidates(&self, anchor: usize) -> Vec<usize> {
        let mut cands: Vec<usize> = self
            .host
            .neighbors(anchor)
            .iter()
            .copied()
            .filter(|&w| self.usable(w))
            .collect();
        cands.sort_by_key(|&w| (self.degree_into_s(w), w));
        cands
    }

    /// Adds one leaf at `anchor`: claims the best admissible free neighbor,
    /// returning the new vertex. Under `Exact`/`Sampled` audits a candidate
    /// is rejected (and rolled back) whenever the invariant breaks.
    pub fn extend_leaf(&mut self, anchor: usize, mode: AuditMode) -> Result<usize, ExtendError> {
        if !self.s.has_vertex(anchor) {
            return Err(ExtendError::AnchorNotInS(anchor));
        }
        let deg = self.s.degree(anchor);
        if deg >= self.d_cap {
            return Err(ExtendError::DegreeCapReached {
                vertex: anchor,
                degree: deg,
                cap: self.d_cap,
            });
        }
        let cands = self.candidates(anchor);
        let tried = cands.len();
        for w in cands {
            self.s.add_vertex(w)?;
            self.s.add_edge(anchor, w)?;
            if self.audit(mode)?.is_none() {
                return Ok(w);
            }
            self.s.remove_leaf(w)?;
        }
        Err(ExtendError::NoExtension { anchor, tried })
    }

    /// Removes a leaf (or isolated vertex) from the subgraph.
    pub fn rollback_leaf(&mut self, v: usize) -> Result<(), ExtendError> {
        self.s.remove_leaf(v)?;
        Ok(())
    }

    fn rollback_many(&mut self, added: &[usize]) {
        for &v in added.iter().rev() {
            let _ = self.s.remove_leaf(v);
        }
    }

    /// Smallest `t ≥ 1` with `(D−1)^t ≥ 2m`: the exploration depth needed on
    /// each side of a connection.
    pub fn exploration_depth(&self) -> usize {
        let base = u128::from(self.d_cap) - 1;
        let goal = 2 * self.m as u128;
        let mut t = 1;
        let mut pow = base;
        while pow < goal {
            pow = pow.saturating_mul(base);
            t += 1;
        }
        t
    }

    /// Grows a breadth-first exploration tree of exactly `depth` layers from
    /// `root`, each layer at most `width` vertices. Returns the final layer,
    /// parent pointers, and all added vertices in insertion order.
    fn grow_frontier(
        &mut self,
        root: usize,
        depth: usize,
        width: usize,
        mode: AuditMode,
    ) -> Result<(Vec<usize>, Vec<(usize, usize)>, Vec<usize>), ExtendError> {
        let mut layer = vec![root];
        let mut parents: Vec<(usize, usize)> = Vec::new();
        let mut added: Vec<usize> = Vec::new();
        for _ in 0..depth {
            let mut next = Vec::new();
            'outer: for &f in &layer {
                while self.s.degree(f) < self.d_cap {
                    match self.extend_leaf(f, mode) {
                        Ok(w) => {
                            parents.push((w, f));
                            added.push(w);
                            next.push(w);
                            if next.len() >= width {
                                break 'outer;
                            }
                        }
                        Err(ExtendError::NoExtension { .. }) => break,
                        Err(e) => {
                            self.rollback_many(&added);
                            return Err(e);
                        }
                    }
                }
            }
            if next.is_empty() {
                self.rollback_many(&added);
                return Err(ExtendError::ConnectFailed {
                    a: root,
                    b: root,
                    detail: "exploration tree could not grow a full layer".into(),
                });
            }
            layer = next;
        }
        Ok((layer, parents, added))
    }

    /// Connects two subgraph vertices by a path of exactly `ell` edges whose
    /// interior is fresh, growing exploration trees from both sides, bridging
    /// them by the lexicographically least host edge, and rolling back every
    /// unused exploration vertex. On success the path has been added to the
    /// subgraph.
    pub fn connect(
        &mut self,
        a: usize,
        b: usize,
        ell: usize,
        mode: AuditMode,
    ) -> Result<Path, ExtendError> {
        let k0 = self.exploration_depth();
        let min_len = 2 * k0 + 1;
        if ell < min_len {
            return Err(ExtendError::LengthTooShort { ell, min: min_len });
        }
        for v in [a, b] {
            if !self.s.has_vertex(v) {
                return Err(ExtendError::AnchorNotInS(v));
            }
            let deg = self.s.degree(v);
            if deg > self.d_cap / 2 {
                return Err(ExtendError::EndpointDegreeTooHigh {
                    vertex: v,
                    degree: deg,
                    half_cap: self.d_cap / 2,
                });
            }
        }
        let budget = self.host.n() as i64
            - 10 * i64::from(self.d_cap) * self.m as i64
            - (ell as i64 - min_len as i64);
        if (self.s.vertex_count() as i64) > budget {
            return Err(ExtendError::SizeBudgetExceeded {
                size: self.s.vertex_count(),
                budget,
            });
        }

        // Absorb any surplus length as a path prefix hanging off `a`.
        let surplus = ell - min_len;
        let mut prefix = vec![a];
        let mut added_all: Vec<usize> = Vec::new();
        for _ in 0..surplus {
            match self.extend_leaf(*prefix.last().unwrap(), mode) {
                Ok(w) => {
                    prefix.push(w);
                    added_all.push(w);
                }
                Err(e) => {
                    self.rollback_many(&added_all);
                    return Err(e);
                }
            }
        }
        let a_prime = *prefix.last().unwrap();

        let width = self.m.max(8);
        let (fa, pa, added_a) = match self.grow_frontier(a_prime, k0, width, mode) {
            Ok(t) => t,
            Err(e) => {
                self.rollback_many(&added_all);
                return Err(e);
            }
        };
        added_all.extend(&added_a);
        let (fb, pb, added_b) = match self.grow_frontier(b, k0, width, mode) {
            Ok(t) => t,
            Err(e) => {
                self.rollback_many(&added_all);
                return Err(e);
            }
        };
        added_all.extend(&added_b);

        // Lexicographically least bridging edge between the two frontiers.
        let fb_set: BTreeSet<usize> = fb.iter().copied().collect();
        let mut fa_sorted = fa.clone();
        fa_sorted.sort_unstable();
        let mut bridge = None;
        'search: for &x in &fa_sorted {
            for &y in self.host.neighbors(x) {
                if fb_set.contains(&y) {
                    bridge = Some((x, y));
                    break 'search;
                }
            }
        }
        let Some((x, y)) = bridge else {
            self.rollback_many(&added_all);
            return Err(ExtendError::ConnectFailed {
                a,
                b,
                detail: format!(
                    "no host edge between frontiers of sizes {} and {}",
                    fa.len(),
                    fb.len()
                ),
            });
        };

        // Assemble the path: prefix, ascent to x, bridge, descent to b.
        let parent = |list: &[(usize, usize)], v: usize| {
            list.iter().find(|&&(c, _)| c == v).map(|&(_, p)| p)
        };
        let mut up = vec![x];
        while *up.last().unwrap() != a_prime {
            let v = *up.last().unwrap();
            up.push(parent(&pa, v).expect("exploration vertices have parents"));
        }
        let mut verts = prefix.clone();
        verts.extend(up.iter().rev().skip(1)); // a′ already at the prefix end
        let mut down = vec![y];
        while *down.last().unwrap() != b {
            let v = *down.last().unwrap();
            down.push(parent(&pb, v).expect("exploration vertices have parents"));
        }
        verts.extend(&down);
        let path = Path::new(verts)?;
        debug_assert_eq!(path.length(), ell);

        // Roll back every exploration vertex not on the path, then commit
        // the bridging edge.
        let on_path: BTreeSet<usize> = path.vertices().iter().copied().collect();
        for &v in added_all.iter().rev() {
            if !on_path.contains(&v) {
                self.s.remove_leaf(v)?;
            }
        }
        self.s.add_edge(x, y)?;

        if mode == AuditMode::Exact {
            if let Some(w) = self.is_extendable_exact()? {
                for ww in path.vertices().windows(2) {
                    let _ = self.s.remove_edge(ww[0], ww[1]);
                }
                for &v in path.interior().iter().rev() {
                    let _ = self.s.remove_leaf(v);
                }
                return Err(ExtendError::ConnectFailed {
                    a,
                    b,
                    detail: format!("connection breaks the invariant at {:?}", w.u_set),
                });
            }
        }
        Ok(path)
    }

    /// Length-2 connection through one fresh common neighbor — used where
    /// the full exploration machinery cannot reach (paths shorter than its
    /// minimum), at the price of no invariant guarantee.
    pub(crate) fn short_connect(&mut self, a: usize, b: usize) -> Result<Path, ExtendError> {
        for v in [a, b] {
            if !self.s.has_vertex(v) {
                return Err(ExtendError::AnchorNotInS(v));
            }
            let deg = self.s.degree(v);
            if deg >= self.d_cap {
                return Err(ExtendError::DegreeCapReached {
                    vertex: v,
                    degree: deg,
                    cap: self.d_cap,
                });
            }
        }
        let bs: BTreeSet<usize> = self.host.neighbors(b).iter().copied().collect();
        let mut commons: Vec<usize> = self
            .host
            .neighbors(a)
            .iter()
            .copied()
            .filter(|&w| bs.contains(&w) && self.usable(w))
            .collect();
        commons.sort_by_key(|&w| (self.degree_into_s(w), w));
        let Some(w) = commons.first().copied() else {
            return Err(ExtendError::ConnectFailed {
                a,
                b,
                detail: "no fresh common neighbor".into(),
            });
        };
        self.s.add_vertex(w)?;
        self.s.add_edge(a, w)?;
        self.s.add_edge(w, b)?;
        Ok(Path::new(vec![a, w, b])?)
    }

    /// Embeds the component of `root_t` in `target` by breadth-first leaf
    /// extensions, writing images into `map`. `map[root_t]` must already be
    /// set and its image present in the subgraph.
    fn embed_component(
        &mut self,
        target: &Graph,
        root_t: usize,
        mode: AuditMode,
        map: &mut [Option<usize>],
    ) -> Result<Vec<usize>, ExtendError> {
        let mut added = Vec::new();
        let mut queue = std::collections::VecDeque::from([root_t]);
        while let Some(t) = queue.pop_front() {
            let img = map[t].expect("queued target vertices are mapped");
            for &c in target.neighbors(t) {
                if map[c].is_some() {
                    continue;
                }
                match self.extend_leaf(img, mode) {
                    Ok(w) => {
                        map[c] = Some(w);
                        added.push(w);
                        queue.push_back(c);
                    }
                    Err(e) => {
                        self.rollback_many(&added);
                        for &v in &added {
                            for slot in map.iter_mut() {
                                if *slot == Some(v) {
                                    *slot = None;
                                }
                            }
                        }
                        return Err(e);
                    }
                }
            }
        }
        Ok(added)
    }

    /// Embeds a whole tree, rooting `root_t` at `root_host` (seeded if not
    /// yet present). Returns the image of every target vertex.
    pub fn embed_tree(
        &mut self,
        tree: &Graph,
        root_t: usize,
        root_host: usize,
        mode: AuditMode,
    ) -> Result<Vec<usize>, ExtendError> {
        if tree.edge_count() != tree.n().saturating_sub(1) || !tree.is_connected() {
            return Err(ExtendError::NotAForest(
                "expected a connected tree".into(),
            ));
        }
        self.check_target_degree(tree)?;
        self.check_size_budget(tree.n())?;
        let seeded = !self.s.has_vertex(root_host);
        if seeded {
            self.seed_vertex(root_host)?;
        }
        let mut map = vec![None; tree.n()];
        map[root_t] = Some(root_host);
        match self.embed_component(tree, root_t, mode, &mut map) {
            Ok(_) => Ok(map.into_iter().map(|v| v.unwrap()).collect()),
            Err(e) => {
                if seeded {
                    let _ = self.s.remove_leaf(root_host);
                }
                Err(e)
            }
        }
    }

    /// Embeds a forest: each component is rooted at its least vertex and
    /// placed on the free unreserved host vertex with the fewest neighbors
    /// inside the subgraph. Returns the image of every target vertex.
    pub fn embed_forest(
        &mut self,
        forest: &Graph,
        mode: AuditMode,
    ) -> Result<Vec<usize>, ExtendError> {
        self.check_target_degree(forest)?;
        self.check_size_budget(forest.n())?;
        let mut map: Vec<Option<usize>> = vec![None; forest.n()];
        let mut placed_edges = 0usize;
        for root_t in 0..forest.n() {
            if map[root_t].is_some() {
                continue;
            }
            let mut roots: Vec<usize> = (0..self.host.n()).filter(|&v| self.usable(v)).collect();
            roots.sort_by_key(|&v| (self.degree_into_s(v), v));
            let Some(root_host) = roots.first().copied() else {
                return Err(ExtendError::ConnectFailed {
                    a: root_t,
                    b: root_t,
                    detail: "no free host vertex for a component root".into(),
                });
            };
            self.seed_vertex(root_host)?;
            map[root_t] = Some(root_host);
            let added = self.embed_component(forest, root_t, mode, &mut map)?;
            placed_edges += added.len();
        }
        if placed_edges != forest.edge_count() {
            return Err(ExtendError::NotAForest(format!(
                "{placed_edges} tree edges placed but the target has {}; it contains a cycle",
                forest.edge_count()
            )));
        }
        Ok(map.into_iter().map(|v| v.unwrap()).collect())
    }

    fn check_target_degree(&self, target: &Graph) -> Result<(), ExtendError> {
        let half = self.d_cap / 2;
        if target.max_degree() > half as usize {
            return Err(ExtendError::TreeDegreeTooHigh {
                got: target.max_degree(),
                half_cap: half,
            });
        }
        Ok(())
    }

    fn check_size_budget(&self, incoming: usize) -> Result<(), ExtendError> {
        let budget = self.host.n() as i64
            - (2 * i64::from(self.d_cap) + 3) * self.m as i64;
        if self.s.vertex_count() as i64 + incoming as i64 > budget {
            return Err(ExtendError::SizeBudgetExceeded {
                size: self.s.vertex_count() + incoming,
                budget,
            });
        }
        Ok(())
    }
}

/// Finds the maximal chains of a tree (paths whose interior vertices have
/// degree exactly 2) and chops each into disjoint pieces of `k+1` vertices,
/// in deterministic order. Any tree with `L` leaves yields at least
/// `n/(k+1) − (2L−2)` pieces.
pub fn extract_bare_paths(tree: &Graph, k: usize) -> Result<Vec<Path>, ExtendError> {
    if tree.n() == 0 || tree.edge_count() != tree.n() - 1 || !tree.is_connected() {
        return Err(ExtendError::NotAForest("expected a connected tree".into()));
    }
    if k == 0 {
        return Err(ExtendError::LengthTooShort { ell: 0, min: 1 });
    }
    let special: Vec<usize> = (0..tree.n()).filter(|&v| tree.degree(v) != 2).collect();
    let mut walked: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut pieces = Vec::new();
    for &s in &special {
        for &nb in tree.neighbors(s) {
            let first = (s.min(nb), s.max(nb));
            if walked.contains(&first) {
                continue;
            }
            let mut chain = vec![s, nb];
            while tree.degree(*chain.last().unwrap()) == 2 {
                let cur = *chain.last().unwrap();
                let prev = chain[chain.len() - 2];
                let next = tree
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&w| w != prev)
                    .expect("degree-2 vertices have another neighbor");
                chain.push(next);
            }
            for w in chain.windows(2) {
                walked.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
            let count = chain.len() / (k + 1);
            for q in 0..count {
                let lo = q * (k + 1);
                pieces.push(Path::new(chain[lo..lo + k + 1].to_vec())?);
            }
        }
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    fn circulant(n: usize, offsets: &[usize]) -> Graph {
        let mut e = Vec::new();
        for v in 0..n {
            for &o in offsets {
                e.push((v, (v + o) % n));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn path_graph(n: usize) -> Graph {
        let e: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn exact_audit_on_empty_and_seeded_state() {
        let g = petersen();
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        assert!(st.is_extendable_exact().unwrap().is_none());
        st.seed_vertex(0).unwrap();
        assert!(st.is_extendable_exact().unwrap().is_none());
    }

    #[test]
    fn exact_audit_finds_violation_when_graph_is_thin() {
        // A path host has no expansion: a middle vertex with both neighbors
        // consumed violates the bound.
        let g = path_graph(6);
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        for v in [1, 2, 3] {
            st.seed_vertex(v).unwrap();
        }
        st.s.add_edge(1, 2).unwrap();
        st.s.add_edge(2, 3).unwrap();
        let w = st.is_extendable_exact().unwrap();
        assert!(w.is_some());
        let w = w.unwrap();
        assert!(!st.check_expansion_condition(&w.u_set).satisfied());
    }

    #[test]
    fn sampled_audit_agrees_on_violation() {
        let g = path_graph(6);
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        for v in [1, 2, 3] {
            st.seed_vertex(v).unwrap();
        }
        st.s.add_edge(1, 2).unwrap();
        st.s.add_edge(2, 3).unwrap();
        let w = st.is_extendable_sampled(500, 7);
        assert!(w.is_some());
    }

    #[test]
    fn strict_extension_refuses_on_tight_hosts() {
        // A 3-regular host cannot sustain the D=3 invariant once the
        // subgraph has an edge: two outside vertices sharing neighbors with
        // both subgraph vertices leave only 3 < 4 fresh joint neighbors.
        let g = petersen();
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        st.seed_vertex(0).unwrap();
        assert!(matches!(
            st.extend_leaf(0, AuditMode::Exact),
            Err(ExtendError::NoExtension { anchor: 0, tried: 3 })
        ));
        // The refused attempt leaves no residue.
        assert_eq!(st.subgraph().vertex_count(), 1);
        assert_eq!(st.subgraph().edge_count(), 0);
    }

    #[test]
    fn extend_and_rollback_restore_state() {
        let g = circulant(16, &[1, 2, 3, 4, 5]);
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        st.seed_vertex(0).unwrap();
        let w = st.extend_leaf(0, AuditMode::Exact).unwrap();
        assert_eq!(st.subgraph().vertex_count(), 2);
        assert_eq!(st.subgraph().edge_count(), 1);
        assert!(st.is_extendable_exact().unwrap().is_none());
        st.rollback_leaf(w).unwrap();
        assert_eq!(st.subgraph().vertex_count(), 1);
        assert_eq!(st.subgraph().edge_count(), 0);
        assert!(st.is_extendable_exact().unwrap().is_none());
    }

    #[test]
    fn extensions_respect_reservations_and_caps() {
        let g = petersen();
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        st.seed_vertex(0).unwrap();
        // Reserve two of 0's three neighbors; the extension must take the
        // remaining one.
        st.forbid(1);
        st.forbid(4);
        let w = st.extend_leaf(0, AuditMode::Trust).unwrap();
        assert_eq!(w, 5);
        // Reserve everything else: no candidates remain.
        st.forbid(5);
        for v in 0..10 {
            st.forbid(v);
        }
        match st.extend_leaf(0, AuditMode::Trust) {
            Err(ExtendError::NoExtension { anchor: 0, tried: 0 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        // Degree cap: seed a fresh state and exhaust a vertex.
        let mut st = ExtendableState::new(&g, 3, 1).unwrap();
        st.seed_vertex(0).unwrap();
        for _ in 0..3 {
            st.extend_leaf(0, AuditMode::Trust).unwrap();
        }
        assert!(matches!(
            st.extend_leaf(0, AuditMode::Trust),
            Err(ExtendError::DegreeCapReached { vertex: 0, .. })
        ));
    }

    #[test]
    fn connect_builds_exact_length_path() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        st.seed_vertex(0).unwrap();
        st.seed_vertex(12).unwrap();
        assert_eq!(st.exploration_depth(), 1);
        let p = st.connect(0, 12, 5, AuditMode::Trust).unwrap();
        assert_eq!(p.length(), 5);
        assert_eq!(p.endpoints(), (0, 12));
        p.validate_in(&g).unwrap();
        // The subgraph is exactly the path: everything else was rolled back.
        assert_eq!(st.subgraph().vertex_count(), 6);
        assert_eq!(st.subgraph().edge_count(), 5);
    }

    #[test]
    fn connect_minimum_length_and_budget_errors() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        st.seed_vertex(0).unwrap();
        st.seed_vertex(12).unwrap();
        assert!(matches!(
            st.connect(0, 12, 2, AuditMode::Trust),
            Err(ExtendError::LengthTooShort { ell: 2, min: 3 })
        ));
        let small = circulant(100, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&small, 8, 2).unwrap();
        st.seed_vertex(0).unwrap();
        st.seed_vertex(12).unwrap();
        // Budget is 100 − 160 < 0: always exceeded.
        assert!(matches!(
            st.connect(0, 12, 3, AuditMode::Trust),
            Err(ExtendError::SizeBudgetExceeded { .. })
        ));
    }

    #[test]
    fn connect_is_deterministic() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let run = || {
            let mut st = ExtendableState::new(&g, 8, 2).unwrap();
            st.seed_vertex(0).unwrap();
            st.seed_vertex(12).unwrap();
            st.connect(0, 12, 7, AuditMode::Trust).unwrap()
        };
        assert_eq!(run().vertices(), run().vertices());
    }

    #[test]
    fn short_connect_takes_a_common_neighbor() {
        let g = circulant(50, &[1, 2]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        st.seed_vertex(0).unwrap();
        st.seed_vertex(2).unwrap();
        let p = st.short_connect(0, 2).unwrap();
        assert_eq!(p.length(), 2);
        assert_eq!(p.vertices()[1], 1);
        assert!(st.subgraph().has_vertex(1));
    }

    #[test]
    fn embed_tree_produces_host_copy() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        let tree = path_graph(10);
        let map = st.embed_tree(&tree, 0, 7, AuditMode::Trust).unwrap();
        assert_eq!(map.len(), 10);
        assert_eq!(map[0], 7);
        let mut sorted = map.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 10, "images are distinct");
        for (u, v) in tree.edges() {
            assert!(g.has_edge(map[u], map[v]), "tree edge preserved");
            assert!(st.subgraph().neighbors(map[u]).contains(&map[v]));
        }
    }

    #[test]
    fn embed_forest_handles_components_and_rejects_cycles() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        // Two paths and an isolated vertex.
        let forest =
            Graph::from_edges(7, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let map = st.embed_forest(&forest, AuditMode::Trust).unwrap();
        let mut sorted = map.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 7);
        for (u, v) in forest.edges() {
            assert!(g.has_edge(map[u], map[v]));
        }
        assert_eq!(st.subgraph().vertex_count(), 7);

        let cyclic = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        assert!(st.embed_forest(&cyclic, AuditMode::Trust).is_err());
    }

    #[test]
    fn embed_tree_rejects_high_degree_targets() {
        let g = circulant(200, &[1, 2, 3, 4]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        let star = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6)])
            .unwrap();
        assert!(matches!(
            st.embed_tree(&star, 0, 0, AuditMode::Trust),
            Err(ExtendError::TreeDegreeTooHigh { got: 6, half_cap: 4 })
        ));
    }

    #[test]
    fn bare_path_extraction_on_a_path() {
        let t = path_graph(10);
        let pieces = extract_bare_paths(&t, 3).unwrap();
        assert_eq!(pieces.len(), 2);
        for p in &pieces {
            assert_eq!(p.vertices().len(), 4);
            p.validate_in(&t).unwrap();
        }
        let mut all: Vec<usize> = pieces
            .iter()
            .flat_map(|p| p.vertices().iter().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 8, "pieces are vertex-disjoint");
    }

    #[test]
    fn bare_path_extraction_on_a_star_is_empty() {
        let star =
            Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(extract_bare_paths(&star, 2).unwrap().is_empty());
    }

    #[test]
    fn bare_path_extraction_meets_leaf_bound() {
        // Spider: three legs of length 6 hanging off vertex 0.
        let mut e = Vec::new();
        let mut next = 1;
        for _ in 0..3 {
            let mut prev = 0;
            for _ in 0..6 {
                e.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        let t = Graph::from_edges(next, &e).unwrap();
        let k = 2;
        let pieces = extract_bare_paths(&t, k).unwrap();
        let leaves = (0..t.n()).filter(|&v| t.degree(v) == 1).count();
        let bound = (t.n() / (k + 1)) as i64 - (2 * leaves as i64 - 2);
        assert!(pieces.len() as i64 >= bound);
        assert_eq!(pieces.len(), 6, "each leg yields two 3-vertex pieces");
    }

    #[test]
    fn insert_and_remove_path_round_trip() {
        let g = circulant(20, &[1, 2]);
        let mut st = ExtendableState::new(&g, 8, 2).unwrap();
        st.seed_vertex(0).unwrap();
        st.seed_vertex(6).unwrap();
        let p = Path::new(vec![0, 2, 4, 6]).unwrap();
        st.insert_path(&p).unwrap();
        assert_eq!(st.subgraph().vertex_count(), 4);
        assert_eq!(st.subgraph().edge_count(), 3);
        st.remove_path(&p).unwrap();
        assert_eq!(st.subgraph().vertex_count(), 2);
        assert_eq!(st.subgraph().edge_count(), 0);
        assert!(st.subgraph().has_vertex(0) && st.subgraph().has_vertex(6));
        // A single-edge path removes just the edge and keeps both ends.
        let e = Path::new(vec![0, 1]).unwrap();
        st.insert_path(&e).unwrap();
        st.remove_path(&e).unwrap();
        assert!(st.subgraph().has_vertex(1));
        assert_eq!(st.subgraph().edge_count(), 0);
    }
}
