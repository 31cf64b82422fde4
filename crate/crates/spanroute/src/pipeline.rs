//! End-to-end spanning-tree embedding pipeline.
//!
//! Given a regular host graph and a bounded-degree target tree on the same
//! vertex count, the pipeline produces a bijective embedding in six phases:
//!
//! 0. find vertex-disjoint long bare paths in the target and set them aside;
//! 1. sample small reserved vertex sets with balanced host degrees;
//! 2. realize the routing template inside the host, anchored on two of the
//!    reserved sets;
//! 3. embed the remaining target forest with the incremental extension
//!    engine;
//! 4. grow short connector paths from the images of the bare-path endpoints;
//! 5. sweep every still-unused host vertex into disjoint chains that link
//!    the connector tips to the template terminals;
//! 6. pick the register permutation that closes every chain pair into one
//!    host path per bare path, route the template accordingly, and splice.
//!
//! The same machinery, minus the forest phase, yields vertex-disjoint cycle
//! factors: chains from the template exits back to its entries close each
//! routed path into a cycle.

use crate::extend::{extract_bare_paths, AuditMode, ExtendError, ExtendableState};
use crate::graph::{Graph, GraphError, Path};
use crate::matching::bipartite_match_indices;
use crate::network::{Brickwall, NetworkProvider, OddEvenMergesort};
use crate::spectral::{self, SpectralError};
use crate::template::{build_template, RoutingTemplate, TemplateError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// Mixing constant for deriving per-attempt sub-seeds from the master seed.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Errors surfaced by the pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("host has {host} vertices but the target has {target}")]
    SizeMismatch { host: usize, target: usize },
    #[error("the host graph must be regular")]
    HostIrregular,
    #[error("the host graph must be connected")]
    HostDisconnected,
    #[error("the target is not a tree: {0}")]
    NotATree(String),
    #[error("target maximum degree {got} exceeds the embedder bound {cap}")]
    TargetDegreeTooHigh { got: usize, cap: usize },
    #[error("found {found} disjoint bare paths of length {len}, need {needed}")]
    BarePathDeficit {
        found: usize,
        needed: usize,
        len: usize,
    },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error(
        "reserved-set sampling exhausted {attempts} attempts; worst violator: \
         vertex {vertex} has degree {degree} into set {set_index}"
    )]
    ReservedRetriesExceeded {
        attempts: usize,
        vertex: usize,
        set_index: usize,
        degree: usize,
    },
    #[error("cycle length {k} does not divide the host order {n}")]
    CycleDivisibility { n: usize, k: usize },
    #[error("cycle length {k} outside the feasible band [{min}, {max}]")]
    CycleBand { k: usize, min: usize, max: usize },
    #[error("step {step} failed after {attempts} attempts: {detail}")]
    StepFailed {
        step: &'static str,
        attempts: usize,
        detail: String,
    },
    #[error("template error: {0}")]
    Template(#[from] TemplateError),
    #[error("extension engine error: {0}")]
    Extend(#[from] ExtendError),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("spectral error: {0}")]
    Spectral(#[from] SpectralError),
}

/// Tunable parameters for the embedding pipeline.
///
/// [`PipelineConfig::recommended`] produces settings sized for hosts with a
/// few hundred to a few thousand vertices and degree in the tens; all knobs
/// can be overridden before use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Degree cap `D` of the extension engine; targets may use up to `D/2`.
    pub d_cap: u32,
    /// Expansion parameter `m` of the extension engine.
    pub m_ext: usize,
    /// Number of bare paths set aside (= registers of the template).
    pub registers: usize,
    /// Gadget order for the template (rounded up internally as needed).
    pub k_gadget: usize,
    /// Sorting-network provider: `"odd-even"` or `"brickwall"`.
    pub provider: String,
    /// Length of each connector grown from a bare-path endpoint image.
    pub t_prime: usize,
    /// Interior vertices per absorption chain (pool levels per chain).
    pub num_levels: usize,
    /// Extra scratch reservation released before the chain phase.
    pub r0_size: usize,
    /// Accepted degree band (lo, hi) of any host vertex into a reserved set.
    pub reserved_band: (usize, usize),
    /// Sampling retries for the reserved sets.
    pub reserved_retries: usize,
    /// Explicit routed-path length request for the template, if any.
    pub template_len: Option<usize>,
    /// Audit tier of the extension engine.
    pub audit: AuditMode,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
    /// Full restarts of the embedding attempt.
    pub outer_attempts: usize,
    /// Realization rounds for the template within one attempt.
    pub template_rounds: usize,
    /// Restarts of the chain sweep within one attempt.
    pub chain_restarts: usize,
    /// Expansion budget of one rotation search.
    pub rotation_cap: usize,
    /// Fraction of the chain pool pre-sampled uniformly at random and held
    /// back from the earlier phases. The rest of the pool is whatever those
    /// phases leave over; holding most of it back keeps the pool internally
    /// well connected instead of being the dregs of deterministic growth.
    #[serde(default = "default_pool_reserve")]
    pub pool_reserve: f64,
    /// Whether trees with too few bare paths fall back to the leaf-matching
    /// endgame instead of failing.
    pub allow_fallback: bool,
}

fn default_pool_reserve() -> f64 {
    0.6
}

impl PipelineConfig {
    /// Settings sized for an `n`-vertex, `d`-regular host.
    ///
    /// The chain pool absorbs every host vertex left over by the other
    /// phases, so it must be large enough that the leftover set keeps a
    /// healthy internal degree: the target pool size is
    /// `max(0.3·n, 8·n/d)`, split over `2·registers` chains.
    pub fn recommended(n: usize, d: usize) -> Self {
        let registers = 4usize;
        let pool_target = ((3 * n).div_ceil(10)).max((8 * n).div_ceil(d.max(1)));
        let num_levels = pool_target.div_ceil(2 * registers).max(8);
        PipelineConfig {
            d_cap: 8,
            m_ext: 2,
            registers,
            k_gadget: 2,
            provider: "odd-even".to_string(),
            t_prime: 7,
            num_levels,
            r0_size: 0,
            reserved_band: (0, 3),
            reserved_retries: 100,
            template_len: None,
            audit: AuditMode::Trust,
            seed: 7,
            outer_attempts: 12,
            template_rounds: 40,
            chain_restarts: 60,
            rotation_cap: 800,
            pool_reserve: default_pool_reserve(),
            allow_fallback: true,
        }
    }

    /// Bare-path length implied by this configuration for routed length
    /// `ell_t`: connector, chain, and template segments plus the two
    /// splice edges.
    pub fn ell_bare(&self, ell_t: usize) -> usize {
        2 * self.t_prime + 2 * self.num_levels + ell_t + 2
    }

    /// Checks internal consistency of the knobs.
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.d_cap < 3 {
            return Err(PipelineError::BadConfig(
                "degree cap must be at least 3".into(),
            ));
        }
        if self.registers < 2 {
            return Err(PipelineError::BadConfig(
                "need at least two registers".into(),
            ));
        }
        if self.k_gadget < 2 {
            return Err(PipelineError::BadConfig(
                "gadget order must be at least 2".into(),
            ));
        }
        if self.t_prime == 0 || self.num_levels == 0 {
            return Err(PipelineError::BadConfig(
                "connector length and chain levels must be positive".into(),
            ));
        }
        if self.reserved_band.0 > self.reserved_band.1 {
            return Err(PipelineError::BadConfig(format!(
                "reserved degree band ({}, {}) is inverted",
                self.reserved_band.0, self.reserved_band.1
            )));
        }
        if self.outer_attempts == 0 {
            return Err(PipelineError::BadConfig(
                "need at least one attempt".into(),
            ));
        }
        if !(0.0..=0.95).contains(&self.pool_reserve) {
            return Err(PipelineError::BadConfig(format!(
                "pool reserve fraction {} outside [0, 0.95]",
                self.pool_reserve
            )));
        }
        provider_by_name(&self.provider).map(|_| ())
    }
}

fn provider_by_name(name: &str) -> Result<Box<dyn NetworkProvider>, PipelineError> {
    match name {
        "odd-even" => Ok(Box::new(OddEvenMergesort)),
        "brickwall" => Ok(Box::new(Brickwall)),
        other => Err(PipelineError::BadConfig(format!(
            "unknown network provider {other:?}; use \"odd-even\" or \"brickwall\""
        ))),
    }
}

/// Request for a family of disjoint reserved vertex sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReservedSpec {
    /// Requested cardinalities, one per set (zero-size entries allowed).
    pub sizes: Vec<usize>,
    /// Minimum host degree of any vertex into each non-empty set.
    pub band_lo: usize,
    /// Maximum host degree of any vertex into each non-empty set.
    pub band_hi: usize,
    /// Sampling attempts before giving up.
    pub retries: usize,
}

/// Disjoint reserved vertex sets, each sorted ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReservedSets {
    pub sets: Vec<Vec<usize>>,
}

/// Samples disjoint uniformly random vertex sets of the requested sizes and
/// accepts only families where every host vertex has a degree inside the
/// band into every non-empty set. On exhaustion the error names the worst
/// violating vertex/set pair seen.
pub fn sample_reserved_sets(
    g: &Graph,
    spec: &ReservedSpec,
    seed: u64,
) -> Result<ReservedSets, PipelineError> {
    let n = g.n();
    let total: usize = spec.sizes.iter().sum();
    if total > n {
        return Err(PipelineError::BadConfig(format!(
            "reserved sets need {total} vertices but the host has {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = spec.retries.max(1);
    // Worst violation seen: (distance outside the band, vertex, set, degree).
    let mut worst: Option<(usize, usize, usize, usize)> = None;
    for _ in 0..attempts {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(spec.sizes.len());
        let mut at = 0usize;
        for &s in &spec.sizes {
            let mut set: Vec<usize> = order[at..at + s].to_vec();
            at += s;
            set.sort_unstable();
            sets.push(set);
        }
        let mut violation: Option<(usize, usize, usize, usize)> = None;
        'sets: for (si, set) in sets.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let mut member = vec![false; n];
            for &v in set {
                member[v] = true;
            }
            for v in 0..n {
                let deg = g.neighbors(v).iter().filter(|&&w| member[w]).count();
                if deg < spec.band_lo || deg > spec.band_hi {
                    let dist = if deg < spec.band_lo {
                        spec.band_lo - deg
                    } else {
                        deg - spec.band_hi
                    };
                    violation = Some((dist, v, si, deg));
                    break 'sets;
                }
            }
        }
        match violation {
            None => return Ok(ReservedSets { sets }),
            Some(v) => {
                if worst.map_or(true, |w| v.0 > w.0) {
                    worst = Some(v);
                }
            }
        }
    }
    let (_, vertex, set_index, degree) = worst.expect("violations were recorded");
    Err(PipelineError::ReservedRetriesExceeded {
        attempts,
        vertex,
        set_index,
        degree,
    })
}

/// A single defect found while checking an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingViolation {
    /// The map does not have one entry per target vertex.
    MapLength { got: usize, expected: usize },
    /// Host and target orders differ, so no bijection exists.
    NotSpanning { host: usize, target: usize },
    /// An image lies outside the host vertex range.
    ImageOutOfRange { vertex: usize, image: usize },
    /// Two target vertices share an image.
    DuplicateImage {
        first: usize,
        second: usize,
        image: usize,
    },
    /// A target edge maps to a host non-edge.
    MissingEdge {
        u: usize,
        v: usize,
        image_u: usize,
        image_v: usize,
    },
}

/// Verdict of [`verify_embedding`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub ok: bool,
    /// Up to 16 defects, in discovery order.
    pub violations: Vec<EmbeddingViolation>,
}

/// Checks that `map` is a bijection from the target onto the host vertices
/// carrying every target edge to a host edge.
pub fn verify_embedding(g: &Graph, target: &Graph, map: &[usize]) -> EmbeddingCheck {
    const CAP: usize = 16;
    let mut violations = Vec::new();
    if target.n() != g.n() {
        violations.push(EmbeddingViolation::NotSpanning {
            host: g.n(),
            target: target.n(),
        });
    }
    if map.len() != target.n() {
        violations.push(EmbeddingViolation::MapLength {
            got: map.len(),
            expected: target.n(),
        });
        return EmbeddingCheck {
            ok: false,
            violations,
        };
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for (v, &img) in map.iter().enumerate() {
        if img >= g.n() {
            violations.push(EmbeddingViolation::ImageOutOfRange { vertex: v, image: img });
        } else if let Some(first) = owner[img] {
            violations.push(EmbeddingViolation::DuplicateImage {
                first,
                second: v,
                image: img,
            });
        } else {
            owner[img] = Some(v);
        }
        if violations.len() >= CAP {
            return EmbeddingCheck {
                ok: false,
                violations,
            };
        }
    }
    for (u, v) in target.edges() {
        let (iu, iv) = (map[u], map[v]);
        if iu >= g.n() || iv >= g.n() {
            continue; // already reported above
        }
        if !g.has_edge(iu, iv) {
            violations.push(EmbeddingViolation::MissingEdge {
                u,
                v,
                image_u: iu,
                image_v: iv,
            });
            if violations.len() >= CAP {
                break;
            }
        }
    }
    EmbeddingCheck {
        ok: violations.is_empty(),
        violations,
    }
}

/// Diagnostic record accompanying a successful embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineTrace {
    /// Trace format tag.
    pub schema: String,
    pub host_n: usize,
    pub host_d: usize,
    /// Magnitude of the second adjacency eigenvalue of the host.
    pub lambda_hat: f64,
    /// Joinedness margin `ceil(lambda_hat * n / d)` implied by the spectra.
    pub m_recommended: usize,
    /// Expansion parameter the extension engine actually ran with.
    pub m_used: usize,
    pub registers: usize,
    pub template_vertices: usize,
    pub template_len: usize,
    pub bare_len: usize,
    pub bare_pieces_found: usize,
    pub forest_vertices: usize,
    pub pool_size: usize,
    pub attempts: usize,
    pub template_rounds: usize,
    pub chain_restarts: usize,
    /// Register permutation the template was routed with.
    pub phi: Vec<usize>,
    pub complete_host_shortcut: bool,
    pub fallback_used: bool,
    /// Whether the final map passed [`verify_embedding`].
    pub verified: bool,
}

impl PipelineTrace {
    fn new(host_n: usize, host_d: usize) -> Self {
        PipelineTrace {
            schema: "v1".to_string(),
            host_n,
            host_d,
            lambda_hat: 0.0,
            m_recommended: 0,
            m_used: 0,
            registers: 0,
            template_vertices: 0,
            template_len: 0,
            bare_len: 0,
            bare_pieces_found: 0,
            forest_vertices: 0,
            pool_size: 0,
            attempts: 0,
            template_rounds: 0,
            chain_restarts: 0,
            phi: Vec::new(),
            complete_host_shortcut: false,
            fallback_used: false,
            verified: false,
        }
    }
}

/// A successful embedding: the vertex map plus its diagnostic trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingResult {
    /// `map[v]` is the host image of target vertex `v`.
    pub map: Vec<usize>,
    pub trace: PipelineTrace,
}

/// Outcome of one template realization.
#[derive(Debug, Clone)]
pub struct TemplatePlacement {
    /// `corr[t]` is the host image of template vertex `t`.
    pub corr: Vec<usize>,
    /// Rounds spent (1 = first try succeeded).
    pub rounds: usize,
}

/// Grows a path of `len` fresh edges from `from` one leaf at a time,
/// rolling everything back on failure.
fn grow_path(
    state: &mut ExtendableState,
    from: usize,
    len: usize,
    mode: AuditMode,
) -> Result<Path, ExtendError> {
    let mut vs = vec![from];
    let mut added: Vec<usize> = Vec::new();
    for _ in 0..len {
        match state.extend_leaf(*vs.last().unwrap(), mode) {
            Ok(w) => {
                vs.push(w);
                added.push(w);
            }
            Err(e) => {
                for &w in added.iter().rev() {
                    let _ = state.rollback_leaf(w);
                }
                return Err(e);
            }
        }
    }
    Ok(Path::new(vs).expect("extension vertices are distinct"))
}

/// Realizes the routing template inside the host, anchored on pre-placed
/// terminal images: `v1[j]` hosts the entry and `v2[j]` the exit of
/// register `j`. Walks the construction sequence, connecting pieces whose
/// endpoints are both placed and growing the others. A failed round is
/// unwound completely; retry rounds temporarily reserve a small random
/// slice of the free vertices so the deterministic growth explores
/// different territory.
pub fn embed_template(
    state: &mut ExtendableState,
    template: &RoutingTemplate,
    v1: &[usize],
    v2: &[usize],
    mode: AuditMode,
    rounds: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TemplatePlacement, PipelineError> {
    let k = template.n_reg;
    if v1.len() != k || v2.len() != k {
        return Err(PipelineError::BadConfig(format!(
            "terminal lists must have {k} entries"
        )));
    }
    for &v in v1.iter().chain(v2.iter()) {
        if !state.subgraph().has_vertex(v) {
            return Err(PipelineError::BadConfig(format!(
                "terminal {v} must be placed before template realization"
            )));
        }
    }
    let seq = template.construction_sequence();
    let host_n = state.host().n();
    let mut detail = String::new();
    for round in 0..rounds.max(1) {
        let mut masked: Vec<usize> = Vec::new();
        if round > 0 {
            let free: Vec<usize> = (0..host_n)
                .filter(|&v| !state.subgraph().has_vertex(v) && !state.is_forbidden(v))
                .collect();
            let take = (free.len() / 12).clamp(1, 48).min(free.len());
            masked = free.choose_multiple(rng, take).copied().collect();
            for &v in &masked {
                state.forbid(v);
            }
        }
        let outcome = realize_template_once(state, template, &seq, v1, v2, mode);
        for &v in &masked {
            state.allow(v);
        }
        match outcome {
            Ok(corr) => {
                return Ok(TemplatePlacement {
                    corr,
                    rounds: round + 1,
                })
            }
            Err(msg) => detail = msg,
        }
    }
    Err(PipelineError::StepFailed {
        step: "template",
        attempts: rounds.max(1),
        detail,
    })
}

/// One realized construction piece: the host path, whether its far end was
/// freshly grown, and the oriented template ids it covers.
struct RealizedPiece {
    host: Path,
    grown: bool,
    tv: Vec<usize>,
}

fn realize_template_once(
    state: &mut ExtendableState,
    template: &RoutingTemplate,
    seq: &[Path],
    v1: &[usize],
    v2: &[usize],
    mode: AuditMode,
) -> Result<Vec<usize>, String> {
    let tn = template.graph.n();
    let mut corr: Vec<Option<usize>> = vec![None; tn];
    for j in 0..template.n_reg {
        corr[template.a[j]] = Some(v1[j]);
        corr[template.b[j]] = Some(v2[j]);
    }
    // Pieces realized so far; `realized[i]` covers `seq[i]`.
    let mut realized: Vec<RealizedPiece> = Vec::new();
    // Host vertices banned per piece position by earlier backtracks: when a
    // connect finds no room, the culpable choice of an earlier piece is
    // taboo'd and that piece is redone. A stubborn pair resolves after a
    // couple of bans because most alternatives work.
    let mut taboo: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); seq.len()];
    let mut budget = 8 * seq.len();
    let unwound = |state: &mut ExtendableState, rp: &RealizedPiece, corr: &mut Vec<Option<usize>>| {
        let _ = state.remove_path(&rp.host);
        if rp.grown {
            let _ = state.rollback_leaf(*rp.host.vertices().last().unwrap());
        }
        let last = rp.tv.len() - 1;
        for (idx, &t) in rp.tv.iter().enumerate().skip(1) {
            if idx < last || rp.grown {
                corr[t] = None;
            }
        }
    };
    let mut ip = 0usize;
    while ip < seq.len() {
        let mut tv = seq[ip].vertices().to_vec();
        // Orient the piece so its placed endpoint comes first.
        match (corr[tv[0]], corr[*tv.last().unwrap()]) {
            (Some(_), _) => {}
            (None, Some(_)) => tv.reverse(),
            (None, None) => {
                for rp in realized.iter().rev() {
                    unwound(state, rp, &mut corr);
                }
                return Err("construction piece with no placed endpoint".into());
            }
        }
        let h0 = corr[tv[0]].expect("piece is oriented from its placed end");
        let far = corr[*tv.last().unwrap()];
        let len = tv.len() - 1;
        let grown = far.is_none();
        // Apply this position's taboos for the duration of the operation,
        // remembering which were already reserved by the caller.
        let bans: Vec<usize> = taboo[ip].iter().copied().collect();
        let prior: Vec<bool> = bans.iter().map(|&t| state.is_forbidden(t)).collect();
        for &t in &bans {
            state.forbid(t);
        }
        let hp = match far {
            Some(hb) => {
                if len == 2 {
                    state.short_connect(h0, hb)
                } else {
                    state.connect(h0, hb, len, mode)
                }
            }
            None => grow_path(state, h0, len, mode),
        };
        for (&t, &was) in bans.iter().zip(prior.iter()) {
            if !was {
                state.allow(t);
            }
        }
        match hp {
            Ok(p) => {
                let hv = p.vertices();
                debug_assert_eq!(hv[0], h0);
                let mut drift = false;
                for (idx, &tvx) in tv.iter().enumerate().skip(1) {
                    match corr[tvx] {
                        None => corr[tvx] = Some(hv[idx]),
                        Some(existing) if existing == hv[idx] => {}
                        Some(_) => {
                            drift = true;
                            break;
                        }
                    }
                }
                realized.push(RealizedPiece {
                    host: p,
                    grown,
                    tv,
                });
                if drift {
                    for rp in realized.iter().rev() {
                        unwound(state, rp, &mut corr);
                    }
                    return Err("placement drift between construction pieces".into());
                }
                ip += 1;
            }
            Err(e) => {
                // Find the latest piece that chose one of the failing
                // endpoints (as its grown far end or as a connect interior),
                // ban that choice there, and redo from that piece on.
                let mut fail_ends = vec![h0];
                if let Some(hb) = far {
                    fail_ends.push(hb);
                }
                let hit = realized.iter().rposition(|rp| {
                    let vs = rp.host.vertices();
                    let far_hit = rp.grown && fail_ends.contains(vs.last().unwrap());
                    far_hit || vs[1..vs.len() - 1].iter().any(|w| fail_ends.contains(w))
                });
                let (Some(bi), true) = (hit, budget > 0) else {
                    for rp in realized.iter().rev() {
                        unwound(state, rp, &mut corr);
                    }
                    return Err(e.to_string());
                };
                budget -= 1;
                {
                    let rp = &realized[bi];
                    let vs = rp.host.vertices();
                    for (idx, &w) in vs.iter().enumerate().skip(1) {
                        let is_far = idx == vs.len() - 1;
                        if (!is_far || rp.grown) && fail_ends.contains(&w) {
                            taboo[bi].insert(w);
                        }
                    }
                }
                for rp in realized.drain(bi..).collect::<Vec<_>>().iter().rev() {
                    unwound(state, rp, &mut corr);
                }
                ip = bi;
            }
        }
    }
    let mut out = Vec::with_capacity(tn);
    for o in corr {
        out.push(o.ok_or_else(|| "template vertex left unmapped".to_string())?);
    }
    Ok(out)
}

/// Pool neighbor of `head` that still has a pool continuation of its own
/// (so the chain will not strand there), chosen by shuffled rank. Rank
/// rather than a degree heuristic keeps restarts decorrelated: degree-first
/// picks send every chain into the same sparse pocket on every restart.
fn viable_pool_neighbor(
    host: &Graph,
    head: usize,
    pool: &BTreeSet<usize>,
    rank: &[usize],
) -> Option<usize> {
    host.neighbors(head)
        .iter()
        .copied()
        .filter(|v| pool.contains(v))
        .filter(|&v| host.neighbors(v).iter().any(|w| pool.contains(w)))
        .min_by_key(|&v| rank[v])
}

/// A pool neighbor of `head` with no pool neighbor of its own, lowest
/// shuffled rank first. Such a vertex can never be reached through the pool
/// again, so a passing chain should swallow it while it can; the chain then
/// relies on a rotation to keep growing.
fn isolated_pool_neighbor(
    host: &Graph,
    head: usize,
    pool: &BTreeSet<usize>,
    rank: &[usize],
) -> Option<usize> {
    host.neighbors(head)
        .iter()
        .copied()
        .filter(|v| pool.contains(v))
        .filter(|&v| !host.neighbors(v).iter().any(|w| pool.contains(w)))
        .min_by_key(|&v| rank[v])
}

/// Any pool neighbor of `head`, preferring vertices about to be stranded
/// (fewest pool neighbors of their own). Used for a chain's last pool pick,
/// which needs no continuation.
fn absorbing_pool_neighbor(
    host: &Graph,
    head: usize,
    pool: &BTreeSet<usize>,
    rank: &[usize],
) -> Option<usize> {
    host.neighbors(head)
        .iter()
        .copied()
        .filter(|v| pool.contains(v))
        .min_by_key(|&v| {
            let pool_deg = host.neighbors(v).iter().filter(|w| pool.contains(w)).count();
            (pool_deg, rank[v])
        })
}

/// Breadth-first search over path rotations: the path stays anchored at its
/// first vertex; whenever the current head has an edge to an earlier path
/// vertex, the segment behind that vertex is reversed, exposing a new head.
/// Rotations permute the path's vertex set without changing its length.
/// Returns the first rotated path (the input counts) whose head satisfies
/// `accept`, deduplicating by head and spending at most `cap` expansions.
fn rotate_search<F: Fn(&[usize]) -> bool>(
    host: &Graph,
    start: &[usize],
    cap: usize,
    accept: F,
) -> Option<Vec<usize>> {
    if accept(start) {
        return Some(start.to_vec());
    }
    if start.len() < 3 {
        return None;
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    seen.insert(*start.last().unwrap());
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    queue.push_back(start.to_vec());
    let mut budget = cap;
    while let Some(p) = queue.pop_front() {
        let head = *p.last().unwrap();
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &v) in p.iter().enumerate() {
            pos.insert(v, i);
        }
        for &u in host.neighbors(head) {
            let Some(&i) = pos.get(&u) else { continue };
            if i + 2 >= p.len() {
                continue; // the head's predecessor gives back the same path
            }
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let mut np: Vec<usize> = p[..=i].to_vec();
            np.extend(p[i + 1..].iter().rev());
            let nh = *np.last().unwrap();
            if seen.insert(nh) {
                if accept(&np) {
                    return Some(np);
                }
                queue.push_back(np);
            }
        }
    }
    None
}

/// One family of chains: each start must reach some target of the family.
struct ChainPlan<'a> {
    starts: &'a [usize],
    targets: &'a [usize],
}

/// Slack in the already-embedded forest: non-anchor slots whose host image
/// may be traded for a pool vertex. A stranded pool vertex concentrates its
/// host neighbors among forest images — that is exactly what stranded it —
/// so when no chain-side move places it, it can usually take over a forest
/// slot whose neighbor images it covers, releasing the slot's old image
/// into the pool as far better trade currency. Swaps are logged so a failed
/// sweep can restore the original images and a successful one can reconcile
/// the caller's occupancy bookkeeping.
struct ForestSlack<'a> {
    forest_map: &'a mut [usize],
    /// Relocatable slots: compact forest id plus its forest neighbors.
    slots: Vec<(usize, Vec<usize>)>,
    /// Slots already swapped this sweep; each moves at most once.
    used: BTreeSet<usize>,
    /// Applied swaps `(slot, new image, old image)` in order.
    log: Vec<(usize, usize, usize)>,
}

impl ForestSlack<'_> {
    /// Moves `z` into the first untouched slot whose neighbor images it
    /// covers and returns the image it frees.
    fn try_swap(&mut self, host: &Graph, z: usize) -> Option<usize> {
        for (slot, nbrs) in &self.slots {
            if self.used.contains(slot) {
                continue;
            }
            if nbrs.iter().all(|&v| host.has_edge(z, self.forest_map[v])) {
                let w = std::mem::replace(&mut self.forest_map[*slot], z);
                self.used.insert(*slot);
                self.log.push((*slot, z, w));
                return Some(w);
            }
        }
        None
    }

    /// Undoes every swap made after `mark`, newest first.
    fn rollback_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (slot, _, w) = self.log.pop().expect("length checked");
            self.forest_map[slot] = w;
            self.used.remove(&slot);
        }
    }
}

/// Inserts the lowest-rank pool vertex adjacent to two consecutive vertices
/// of `path` between them, consuming it without moving the head. This
/// reaches pool vertices stranded far from every live head.
fn splice_pool_vertex(
    host: &Graph,
    path: &mut Vec<usize>,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
) -> bool {
    let mut zs: Vec<usize> = pw.iter().copied().collect();
    zs.sort_unstable_by_key(|&z| rank[z]);
    for z in zs {
        let mut prev_adj = false;
        for (i, &u) in path.iter().enumerate() {
            let adj = host.has_edge(z, u);
            if adj && prev_adj {
                path.insert(i, z);
                pw.remove(&z);
                return true;
            }
            prev_adj = adj;
        }
    }
    false
}

/// Inserts two pool vertices joined by an edge between a consecutive pair
/// of `path`, the first adjacent to the left end and the second to the
/// right. Reaches leftovers that no single-vertex splice can place.
fn splice_pool_segment(
    host: &Graph,
    path: &mut Vec<usize>,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
) -> bool {
    let mut zs: Vec<usize> = pw.iter().copied().collect();
    zs.sort_unstable_by_key(|&z| rank[z]);
    for &za in &zs {
        for &zb in &zs {
            if za == zb || !host.has_edge(za, zb) {
                continue;
            }
            for i in 1..path.len() {
                if host.has_edge(za, path[i - 1]) && host.has_edge(zb, path[i]) {
                    path.insert(i, zb);
                    path.insert(i, za);
                    pw.remove(&za);
                    pw.remove(&zb);
                    return true;
                }
            }
        }
    }
    false
}

/// Inserts `z` into `path` by a reversal: pick two `z`-neighbors on the
/// path, reverse the stretch between them and thread `z` in at the join,
/// which costs one extra host edge at the far end of the reversed stretch.
/// Subsumes the consecutive-window splice (adjacent picks need no extra
/// edge) while drawing on every pair of `z`-neighbors along the path, so it
/// stays usable long after plain splice windows are exhausted. Both scan
/// directions are tried; endpoints never move.
fn gen_insert_try(host: &Graph, path: &mut Vec<usize>, z: usize) -> bool {
    for flip in [false, true] {
        let p: Vec<usize> = if flip {
            path.iter().rev().copied().collect()
        } else {
            path.clone()
        };
        let hits: Vec<usize> = (0..p.len()).filter(|&i| host.has_edge(z, p[i])).collect();
        for ai in 0..hits.len() {
            for bi in ai + 1..hits.len() {
                let (a, b) = (hits[ai], hits[bi]);
                if b + 1 >= p.len() || !host.has_edge(p[a + 1], p[b + 1]) {
                    continue;
                }
                let mut np = Vec::with_capacity(p.len() + 1);
                np.extend_from_slice(&p[..=a]);
                np.push(z);
                np.extend(p[a + 1..=b].iter().rev().copied());
                np.extend_from_slice(&p[b + 1..]);
                if flip {
                    np.reverse();
                }
                *path = np;
                return true;
            }
        }
    }
    false
}

/// Pool-scanning form of [`gen_insert_try`]: inserts the lowest-rank pool
/// vertex that fits anywhere in `path` and consumes it.
fn gen_insert_pool(
    host: &Graph,
    path: &mut Vec<usize>,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
) -> bool {
    let mut zs: Vec<usize> = pw.iter().copied().collect();
    zs.sort_unstable_by_key(|&z| rank[z]);
    for z in zs {
        if gen_insert_try(host, path, z) {
            pw.remove(&z);
            return true;
        }
    }
    false
}

/// Interior positions whose removal leaves a valid path: the two neighbors
/// of position `j` are themselves joined by a host edge.
fn contract_options(host: &Graph, path: &[usize], skip: usize) -> Vec<usize> {
    if path.len() < 3 {
        return Vec::new();
    }
    (1..path.len() - 1)
        .filter(|&j| path[j] != skip && host.has_edge(path[j - 1], path[j + 1]))
        .collect()
}

/// Positions whose vertex `z` can replace outright: `z` neighbors both body
/// vertices beside position `j`. Length and endpoints stay untouched, and
/// the windows involved (distance two) are disjoint from the consecutive
/// windows a splice uses, so replacements stay available after every splice
/// opportunity has been consumed.
fn replace_options(host: &Graph, path: &[usize], z: usize) -> Vec<usize> {
    if path.len() < 3 {
        return Vec::new();
    }
    (1..path.len() - 1)
        .filter(|&j| host.has_edge(z, path[j - 1]) && host.has_edge(z, path[j + 1]))
        .collect()
}

/// Exchanges a stranded pool vertex for some other chain's head interior:
/// splice the pool vertex into that chain's body, then return the chain's
/// old head to the pool. Every length is preserved, so quotas and pairing
/// stay intact while the pool residue drifts toward well-connected vertices
/// that a stuck chain can actually reach. Frozen chains never donate: their
/// heads are landed anchors or certified lengths that must not move.
fn churn_pool(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    chain_order: &[(usize, usize)],
    frozen: &[bool],
    skip_oi: usize,
    start: usize,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
) -> bool {
    let nchains = chain_order.len();
    for shift in 0..nchains {
        let oi = (start + shift) % nchains;
        let (pi, ci) = chain_order[oi];
        if oi == skip_oi || frozen[oi] || paths[pi][ci].len() < 2 {
            continue;
        }
        if splice_pool_vertex(host, &mut paths[pi][ci], pw, rank) {
            let w = paths[pi][ci].pop().expect("spliced chains are non-empty");
            pw.insert(w);
            return true;
        }
    }
    false
}

/// Ways to trade `z` into `path` without changing its length or endpoints:
/// insert `z` between a consecutive pair adjacent to it, then eject some
/// interior whose former neighbors close ranks. Returns `(insert_at,
/// eject_index)` pairs, both positions in the unmodified path; apply them
/// with [`apply_excise`].
fn excise_options(host: &Graph, path: &[usize], z: usize) -> Vec<(usize, usize)> {
    let len = path.len();
    if len < 3 {
        return Vec::new();
    }
    let mut spots: Vec<usize> = Vec::new();
    for i in 1..len {
        if host.has_edge(z, path[i - 1]) && host.has_edge(z, path[i]) {
            spots.push(i);
        }
    }
    let mut out = Vec::new();
    for &i in &spots {
        for j in 1..len - 1 {
            let ok = if j + 1 == i {
                // Ejecting the vertex just before z: z itself closes the gap.
                host.has_edge(path[j - 1], z)
            } else if j == i {
                // Ejecting the vertex just after z.
                host.has_edge(z, path[j + 1])
            } else {
                host.has_edge(path[j - 1], path[j + 1])
            };
            if ok {
                out.push((i, j));
            }
        }
    }
    out
}

/// Applies one [`excise_options`] choice and returns the ejected vertex.
fn apply_excise(path: &mut Vec<usize>, z: usize, insert_at: usize, eject: usize) -> usize {
    path.insert(insert_at, z);
    let at = if eject >= insert_at { eject + 1 } else { eject };
    path.remove(at)
}

/// Last-resort extension for a stuck head: trade a stranded pool vertex for
/// an interior of any other chain that happens to neighbor the head, then
/// grow onto the freed vertex. Every other length is untouched, so even
/// frozen and landed chains can serve as hosts for the trade.
fn excise_rescue(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    chain_order: &[(usize, usize)],
    stuck_oi: usize,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
) -> bool {
    let (sp, sc) = chain_order[stuck_oi];
    let head = *paths[sp][sc].last().unwrap();
    let mut zs: Vec<usize> = pw.iter().copied().collect();
    zs.sort_unstable_by_key(|&z| rank[z]);
    for z in zs {
        for (oi, &(pi, ci)) in chain_order.iter().enumerate() {
            if oi == stuck_oi {
                continue;
            }
            let opts = excise_options(host, &paths[pi][ci], z);
            let hit = opts
                .iter()
                .find(|&&(_, j)| host.has_edge(head, paths[pi][ci][j]))
                .copied();
            if let Some((ins, ej)) = hit {
                let w = apply_excise(&mut paths[pi][ci], z, ins, ej);
                pw.remove(&z);
                paths[sp][sc].push(w);
                return true;
            }
        }
    }
    false
}

/// Steals a single interior vertex adjacent to the stuck head from another
/// growing chain whose body closes over the gap with a host edge. Needs no
/// pool vertex at all, so it works even when the leftover pool has gone
/// stale; the donor shrinks by one and the scheduler regrows it later.
fn steal_interior(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    chain_order: &[(usize, usize)],
    frozen: &[bool],
    stuck_oi: usize,
) -> bool {
    let (sp, sc) = chain_order[stuck_oi];
    let head = *paths[sp][sc].last().unwrap();
    let mut found: Option<(usize, usize, usize)> = None;
    for (oi, &(pi, ci)) in chain_order.iter().enumerate() {
        if oi == stuck_oi || frozen[oi] {
            continue;
        }
        let body = &paths[pi][ci];
        if body.len() < 4 {
            continue;
        }
        for j in 1..body.len() - 1 {
            if host.has_edge(head, body[j]) && host.has_edge(body[j - 1], body[j + 1]) {
                found = Some((pi, ci, j));
                break;
            }
        }
        if found.is_some() {
            break;
        }
    }
    let Some((pi, ci, j)) = found else {
        return false;
    };
    let w = paths[pi][ci].remove(j);
    paths[sp][sc].push(w);
    true
}

/// Rescue for a chain whose head has no pool neighbor and no useful
/// rotation: cut another chain behind a vertex adjacent to the stuck head
/// and append the severed tail. The stuck chain gets the donor's old head,
/// the donor gets a fresh head at the cut, and the length imbalance is
/// ground out by most-deficit-first scheduling. Donors are scanned in
/// schedule order, preferring the shortest admissible tail; the stolen tail
/// must fit the thief's remaining quota `room`.
fn transfer_tail(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    chain_order: &[(usize, usize)],
    frozen: &[bool],
    thief_oi: usize,
    room: usize,
) -> bool {
    let (tp, tc) = chain_order[thief_oi];
    let head = *paths[tp][tc].last().unwrap();
    for (oi, &(pi, ci)) in chain_order.iter().enumerate() {
        // Frozen chains keep their final length; shortening one silently
        // breaks the pairing arithmetic.
        if oi == thief_oi || frozen[oi] {
            continue;
        }
        let m = paths[pi][ci].len() - 1;
        if m == 0 {
            continue;
        }
        let lo = (m + 1).saturating_sub(room).max(1);
        let mut i = m;
        while i >= lo {
            if host.has_edge(head, paths[pi][ci][i]) {
                let tail: Vec<usize> = paths[pi][ci].drain(i..).collect();
                paths[tp][tc].extend(tail);
                return true;
            }
            i -= 1;
        }
    }
    false
}

/// Builds disjoint chains for every plan at once: each chain leaves its
/// start, walks pool vertices, and lands on a distinct target of its own
/// plan. Growth is interleaved most-deficit-first so the pool shrinks
/// uniformly, with rotation search and tail transfers when a head is stuck.
///
/// In exact mode (`paired == false`) every chain walks exactly `levels`
/// interiors. In paired mode (`paired == true`, exactly two plans with the
/// same chain count) only pair sums are fixed: chain `i` of the first plan
/// and whichever second-plan chain lands on target `i` together walk
/// `2 * levels` interiors. A chain that dies short hands its leftover quota
/// to the other side, and the landing phase only matches complementary
/// lengths, so the sum constraint holds for every pair.
///
/// On success the consumed interiors are removed from `pool` and each plan
/// yields its chains plus `landing[i]` = target index chain `i` reached.
#[allow(clippy::too_many_arguments)]
fn build_chain_systems(
    host: &Graph,
    pool: &mut BTreeSet<usize>,
    plans: &[ChainPlan<'_>],
    levels: usize,
    paired: bool,
    rng: &mut ChaCha8Rng,
    restarts: usize,
    rotation_cap: usize,
    restarts_used: &mut usize,
    mut slack: Option<&mut ForestSlack<'_>>,
) -> Option<Vec<(Vec<Vec<usize>>, Vec<usize>)>> {
    let mut chain_ids: Vec<(usize, usize)> = Vec::new();
    for (pi, plan) in plans.iter().enumerate() {
        for ci in 0..plan.starts.len() {
            chain_ids.push((pi, ci));
        }
    }
    for _ in 0..restarts.max(1) {
        *restarts_used += 1;
        let mut order: Vec<usize> = pool.iter().copied().collect();
        order.shuffle(rng);
        let mut rank = vec![usize::MAX; host.n()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        chain_ids.shuffle(rng);
        let mark = slack.as_ref().map_or(0, |s| s.log.len());
        if let Some((paths, landings, remaining)) = chain_sweep(
            host,
            pool,
            &rank,
            plans,
            levels,
            paired,
            &chain_ids,
            rotation_cap,
            &mut slack,
        ) {
            *pool = remaining;
            return Some(paths.into_iter().zip(landings).collect());
        }
        // A failed sweep may have traded pool vertices into the forest;
        // undo so the next restart sees the original embedding.
        if let Some(s) = slack.as_deref_mut() {
            s.rollback_to(mark);
        }
    }
    None
}

/// Grows every `active` chain to its quota, interleaved most-deficit-first.
/// A stuck head climbs a rescue ladder: rotation search, splicing a pool
/// vertex into its own body, stealing another living chain's tail, churning
/// the pool, and trading a pool vertex for an interior next to the head.
/// When the whole ladder fails, exact mode gives up, while paired mode
/// freezes the chain at its current length, hands what quota it can to
/// living chains of the same plan, and leaves the remainder in the pool for
/// the balance pass that follows landing.
#[allow(clippy::too_many_arguments)]
fn grow_chains(
    host: &Graph,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
    paths: &mut [Vec<Vec<usize>>],
    chain_order: &[(usize, usize)],
    active: &[usize],
    quota: &mut [usize],
    frozen: &mut [bool],
    cap: usize,
    paired: bool,
    rotation_cap: usize,
) -> bool {
    let mut transfers = 8 * active.len();
    let mut churns = 32 * active.len();
    loop {
        let mut next: Option<(usize, usize)> = None;
        let mut unfinished = 0usize;
        for &oi in active {
            let (pi, ci) = chain_order[oi];
            let ints = paths[pi][ci].len() - 1;
            if frozen[oi] || ints >= quota[oi] {
                continue;
            }
            unfinished += 1;
            let deficit = quota[oi] - ints;
            if next.is_none_or(|(bd, _)| deficit > bd) {
                next = Some((deficit, oi));
            }
        }
        let Some((_, oi)) = next else { return true };
        let (pi, ci) = chain_order[oi];
        let ints = paths[pi][ci].len() - 1;
        // Near exhaustion every remaining pool vertex must go somewhere, so
        // picks switch to absorbing the most endangered neighbor.
        let endgame = if paired {
            pw.len() <= 2 * unfinished
        } else {
            ints + 1 == quota[oi]
        };
        let pick = |pp: &[usize], pool: &BTreeSet<usize>| {
            let h = *pp.last().unwrap();
            if endgame {
                return absorbing_pool_neighbor(host, h, pool, rank);
            }
            // Swallow stranded pool vertices on contact; the next turn's
            // rotation or tail transfer restores a live head.
            if pp.len() >= 6 {
                if let Some(z) = isolated_pool_neighbor(host, h, pool, rank) {
                    return Some(z);
                }
            }
            viable_pool_neighbor(host, h, pool, rank)
        };
        let cur = std::mem::take(&mut paths[pi][ci]);
        match rotate_search(host, &cur, rotation_cap, |pp| pick(pp, pw).is_some()) {
            Some(rotated) => {
                let c = pick(&rotated, pw).expect("accepted head has a pool pick");
                paths[pi][ci] = rotated;
                paths[pi][ci].push(c);
                pw.remove(&c);
                continue;
            }
            None => paths[pi][ci] = cur,
        }
        // Dead head: no pool neighbor reachable by rotations. First try to
        // work a pool vertex into this chain's own body, which makes
        // progress without needing the head at all.
        if splice_pool_vertex(host, &mut paths[pi][ci], pw, rank)
            || gen_insert_pool(host, &mut paths[pi][ci], pw, rank)
        {
            continue;
        }
        // Then steal the tail of another chain behind a vertex adjacent to
        // the head; both chains end up with fresh heads and the scheduler
        // regrows the donor.
        let room = quota[oi] - ints;
        if transfers > 0 && transfer_tail(host, paths, chain_order, frozen, oi, room) {
            transfers -= 1;
            continue;
        }
        // Or take a single head-adjacent interior from a donor that can
        // close ranks over the gap.
        if churns > 0 && steal_interior(host, paths, chain_order, frozen, oi) {
            churns -= 1;
            continue;
        }
        // Swap a stranded pool vertex for another chain's head interior and
        // let this chain retry against the refreshed pool.
        if churns > 0 && churn_pool(host, paths, chain_order, frozen, oi, churns, pw, rank) {
            churns -= 1;
            continue;
        }
        // Trade a stranded pool vertex for any interior adjacent to the
        // stuck head and grow onto the freed vertex directly.
        if churns > 0 && excise_rescue(host, paths, chain_order, oi, pw, rank) {
            churns -= 1;
            continue;
        }
        if !paired {
            return false;
        }
        // Freeze the chain at its current length. Quota headroom moves to
        // living chains of the same plan; anything they cannot take stays
        // in the pool for the balance pass.
        quota[oi] = ints;
        frozen[oi] = true;
        let mut rest = room;
        for &oj in active {
            if rest == 0 {
                break;
            }
            if oj == oi || frozen[oj] {
                continue;
            }
            let add = rest.min(cap - quota[oj]);
            quota[oj] += add;
            rest -= add;
        }
    }
}

/// Absorbs one more pool vertex into an unlanded chain, rotating as needed.
/// Used when a chain cannot land: every extra interior is another body
/// vertex the landing scan may cut at, and the pool it draws from would
/// otherwise be left for the far weaker balance pass.
fn grow_one(
    host: &Graph,
    path: &mut Vec<usize>,
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
    rotation_cap: usize,
) -> bool {
    let cur = std::mem::take(path);
    match rotate_search(host, &cur, rotation_cap, |pp| {
        absorbing_pool_neighbor(host, *pp.last().unwrap(), pw, rank).is_some()
    }) {
        Some(rot) => {
            let z = absorbing_pool_neighbor(host, *rot.last().unwrap(), pw, rank)
                .expect("accepted head has a pool pick");
            *path = rot;
            path.push(z);
            pw.remove(&z);
            true
        }
        None => {
            *path = cur;
            false
        }
    }
}

/// Rotates a chain until its head neighbors an eligible target, then
/// appends that target and reports its index. On failure the chain is left
/// as it was.
fn land_one(
    host: &Graph,
    path: &mut Vec<usize>,
    targets: &[usize],
    eligible: &[bool],
    rotation_cap: usize,
) -> Option<usize> {
    let lands_on = |head: usize| {
        (0..targets.len()).find(|&ti| eligible[ti] && host.has_edge(head, targets[ti]))
    };
    let cur = std::mem::take(path);
    match rotate_search(host, &cur, rotation_cap, |pp| {
        lands_on(*pp.last().unwrap()).is_some()
    }) {
        Some(rot) => {
            let ti = lands_on(*rot.last().unwrap()).expect("accepted head reaches a target");
            *path = rot;
            path.push(targets[ti]);
            Some(ti)
        }
        None => {
            *path = cur;
            None
        }
    }
}

/// Lands a chain on an eligible target, preferring rotations, which keep
/// every interior in place. Rotation fans are shallow on sparse hosts, so
/// when no rotated head reaches a target the chain is instead cut at its
/// deepest vertex adjacent to one and the severed tail returns to the pool;
/// the quota arithmetic downstream absorbs the shortfall. `elig(ti, ints)`
/// says whether target `ti` accepts a chain of `ints` interiors, and `pref`
/// breaks ties among eligible targets, larger first.
fn land_or_dump<E, P>(
    host: &Graph,
    path: &mut Vec<usize>,
    targets: &[usize],
    rotation_cap: usize,
    pw: &mut BTreeSet<usize>,
    elig: E,
    pref: P,
) -> Option<usize>
where
    E: Fn(usize, usize) -> bool,
    P: Fn(usize) -> usize,
{
    let full = path.len() - 1;
    let eligible: Vec<bool> = (0..targets.len()).map(|ti| elig(ti, full)).collect();
    if let Some(ti) = land_one(host, path, targets, &eligible, rotation_cap) {
        return Some(ti);
    }
    for i in (0..path.len()).rev() {
        let hit = (0..targets.len())
            .filter(|&ti| elig(ti, i) && host.has_edge(path[i], targets[ti]))
            .max_by_key(|&ti| pref(ti));
        if let Some(ti) = hit {
            for idx in i + 1..path.len() {
                pw.insert(path[idx]);
            }
            path.truncate(i + 1);
            path.push(targets[ti]);
            return Some(ti);
        }
    }
    None
}

/// Depth-bounded augmenting placement: put `z` into some needy body
/// directly, or work it into any body while ejecting an interior that is
/// placed recursively. Replacements, excises and reversal inserts followed
/// by a contraction all preserve the intermediate body's length, so only
/// the final insertion — into a needy body — changes any length, and the
/// helped pair's index is returned. Bodies are restored from snapshots on
/// failed branches; `banned` holds the vertices already placed along the
/// current branch so no step undoes an earlier one. `budget` caps the total
/// number of entry attempts across the whole search.
#[allow(clippy::too_many_arguments)]
fn try_place(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    needy_bodies: &[(usize, usize, usize)],
    all_bodies: &[(usize, usize)],
    z: usize,
    depth: usize,
    budget: &mut usize,
    banned: &mut Vec<usize>,
) -> Option<usize> {
    for &(t, pi, ci) in needy_bodies {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        if gen_insert_try(host, &mut paths[pi][ci], z) {
            return Some(t);
        }
    }
    if depth == 0 {
        return None;
    }
    for &(pi, ci) in all_bodies {
        for j in replace_options(host, &paths[pi][ci], z) {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let w = paths[pi][ci][j];
            if banned.contains(&w) {
                continue;
            }
            paths[pi][ci][j] = z;
            banned.push(w);
            if let Some(t) =
                try_place(host, paths, needy_bodies, all_bodies, w, depth - 1, budget, banned)
            {
                return Some(t);
            }
            banned.pop();
            paths[pi][ci][j] = w;
        }
        for (ins, ej) in excise_options(host, &paths[pi][ci], z) {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let w = paths[pi][ci][ej];
            if banned.contains(&w) {
                continue;
            }
            let snap = paths[pi][ci].clone();
            apply_excise(&mut paths[pi][ci], z, ins, ej);
            banned.push(w);
            if let Some(t) =
                try_place(host, paths, needy_bodies, all_bodies, w, depth - 1, budget, banned)
            {
                return Some(t);
            }
            banned.pop();
            paths[pi][ci] = snap;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let snap = paths[pi][ci].clone();
        if gen_insert_try(host, &mut paths[pi][ci], z) {
            for j in contract_options(host, &paths[pi][ci], z) {
                let w = paths[pi][ci][j];
                if banned.contains(&w) {
                    continue;
                }
                let snap2 = paths[pi][ci].clone();
                paths[pi][ci].remove(j);
                banned.push(w);
                if let Some(t) =
                    try_place(host, paths, needy_bodies, all_bodies, w, depth - 1, budget, banned)
                {
                    return Some(t);
                }
                banned.pop();
                paths[pi][ci] = snap2;
            }
            paths[pi][ci] = snap;
        }
    }
    None
}

/// Final accounting for paired sweeps. Each leftover pool vertex must enter
/// a pair whose interiors still fall short of the pair sum: splice directly
/// where possible, and when nothing splices, trade a stranded vertex for
/// some chain interior that does fit a needy pair, which frees exactly the
/// right kind of vertex without disturbing any certified length.
#[allow(clippy::too_many_arguments)]
fn balance_pairs(
    host: &Graph,
    paths: &mut [Vec<Vec<usize>>],
    pair_chains: &[(usize, usize)],
    deficit: &mut [usize],
    pw: &mut BTreeSet<usize>,
    rank: &[usize],
    slack: &mut Option<&mut ForestSlack<'_>>,
) -> bool {
    let mut swap_budget = 2 * pw.len() + 8;
    'outer: while !pw.is_empty() {
        let mut needy: Vec<usize> = (0..deficit.len()).filter(|&t| deficit[t] > 0).collect();
        needy.sort_by_key(|&t| std::cmp::Reverse(deficit[t]));
        let needy_bodies: Vec<(usize, usize, usize)> = needy
            .iter()
            .flat_map(|&t| {
                let (c0, c1) = pair_chains[t];
                [(t, 0, c0), (t, 1, c1)]
            })
            .collect();
        let all_bodies: Vec<(usize, usize)> = (0..paths.len())
            .flat_map(|pi| (0..paths[pi].len()).map(move |ci| (pi, ci)))
            .collect();
        let mut zs: Vec<usize> = pw.iter().copied().collect();
        zs.sort_unstable_by_key(|&z| rank[z]);
        for z in zs {
            let mut budget = 400usize;
            let mut banned = vec![z];
            if let Some(t) = try_place(
                host,
                paths,
                &needy_bodies,
                &all_bodies,
                z,
                2,
                &mut budget,
                &mut banned,
            ) {
                deficit[t] -= 1;
                pw.remove(&z);
                continue 'outer;
            }
        }
        // No single vertex places even through trades; settle a two-vertex
        // segment into a pair that is at least two short.
        for &t in &needy {
            let (c0, c1) = pair_chains[t];
            if deficit[t] >= 2
                && (splice_pool_segment(host, &mut paths[0][c0], pw, rank)
                    || splice_pool_segment(host, &mut paths[1][c1], pw, rank))
            {
                deficit[t] -= 2;
                continue 'outer;
            }
        }
        // A vertex with no body adjacencies at all still has most of its
        // edges into the frozen images backing the rest of the embedding.
        // Trade it into one of those slots and release the slot's old
        // occupant — typically far better connected — into the pool.
        if swap_budget > 0 {
            if let Some(s) = slack.as_deref_mut() {
                let mut zs: Vec<usize> = pw.iter().copied().collect();
                zs.sort_unstable_by_key(|&z| rank[z]);
                for z in zs {
                    if let Some(w) = s.try_swap(host, z) {
                        pw.remove(&z);
                        pw.insert(w);
                        swap_budget -= 1;
                        continue 'outer;
                    }
                }
            }
        }
        if std::env::var("CHAIN_DEBUG").is_ok() {
            eprintln!(
                "balance stuck: pool {}, deficits {:?}",
                pw.len(),
                deficit
            );
        }
        return false;
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn chain_sweep(
    host: &Graph,
    pool: &BTreeSet<usize>,
    rank: &[usize],
    plans: &[ChainPlan<'_>],
    levels: usize,
    paired: bool,
    chain_order: &[(usize, usize)],
    rotation_cap: usize,
    slack: &mut Option<&mut ForestSlack<'_>>,
) -> Option<(Vec<Vec<Vec<usize>>>, Vec<Vec<usize>>, BTreeSet<usize>)> {
    let nchains = chain_order.len();
    let mut pw = pool.clone();
    let mut paths: Vec<Vec<Vec<usize>>> = plans
        .iter()
        .map(|pl| pl.starts.iter().map(|&s| vec![s]).collect())
        .collect();
    // Per-chain interior quota: a chain never grows past its quota, and the
    // quotas of a phase bound how much pool that phase may consume.
    let mut quota = vec![levels; nchains];
    let cap = 2 * levels - 1;
    let mut frozen = vec![false; nchains];
    let mut landings: Vec<Vec<usize>> = plans
        .iter()
        .map(|pl| vec![usize::MAX; pl.starts.len()])
        .collect();
    let mut used: Vec<Vec<bool>> = plans
        .iter()
        .map(|pl| vec![false; pl.targets.len()])
        .collect();

    if !paired {
        let active: Vec<usize> = (0..nchains).collect();
        if !grow_chains(
            host,
            &mut pw,
            rank,
            &mut paths,
            chain_order,
            &active,
            &mut quota,
            &mut frozen,
            cap,
            false,
            rotation_cap,
        ) {
            return None;
        }
        for &(pi, ci) in chain_order {
            let eligible: Vec<bool> = used[pi].iter().map(|u| !u).collect();
            let Some(ti) = land_one(
                host,
                &mut paths[pi][ci],
                plans[pi].targets,
                &eligible,
                rotation_cap,
            ) else {
                return None;
            };
            used[pi][ti] = true;
            landings[pi][ci] = ti;
        }
        return Some((paths, landings, pw));
    }

    // Paired mode runs in phases. The entry side sweeps first, while the
    // pool is at its densest, then lands; its lengths are final from that
    // point on. The exit side inherits quotas mirroring those lengths:
    // sorting the pair-sum complements largest-first keeps every later
    // landing feasible, because the chain carrying the most interiors can
    // always find an entry chain short enough to share a pair with.
    let k = plans[0].starts.len();
    let side: Vec<Vec<usize>> = (0..2)
        .map(|p| (0..nchains).filter(|&oi| chain_order[oi].0 == p).collect())
        .collect();
    debug_assert_eq!(side[0].len(), k);
    grow_chains(
        host,
        &mut pw,
        rank,
        &mut paths,
        chain_order,
        &side[0],
        &mut quota,
        &mut frozen,
        cap,
        true,
        rotation_cap,
    );
    for &oi in &side[0] {
        let (pi, ci) = chain_order[oi];
        // When no body vertex can reach a free target, absorb another pool
        // vertex and rescan; dumping returns any overshoot afterwards. The
        // first pass refuses cuts deeper than a few vertices — a chain cut
        // near its start dumps almost a full quota back on the pool and
        // saddles its exit partner with an unfillable complement — and only
        // if growing cannot fix that does the floor drop away.
        let mut landed = None;
        let floor0 = (paths[pi][ci].len() - 1).saturating_sub(8);
        'pass: for (floor, grows) in [(floor0, 8), (0, levels)] {
            for _ in 0..=grows {
                landed = land_or_dump(
                    host,
                    &mut paths[pi][ci],
                    plans[0].targets,
                    rotation_cap,
                    &mut pw,
                    |ti, ints| !used[0][ti] && ints >= floor,
                    |_| 0,
                );
                if landed.is_some() {
                    break 'pass;
                }
                if !(grow_one(host, &mut paths[pi][ci], &mut pw, rank, rotation_cap)
                    || gen_insert_pool(host, &mut paths[pi][ci], &mut pw, rank))
                {
                    break;
                }
            }
        }
        let Some(ti) = landed else {
            if std::env::var("CHAIN_DEBUG").is_ok() {
                eprintln!("entry land stuck: chain {ci}, ints {}", paths[pi][ci].len() - 1);
            }
            return None;
        };
        used[0][ti] = true;
        landings[0][ci] = ti;
        frozen[oi] = true;
    }
    let mut comp: Vec<usize> = (0..k)
        .map(|t| 2 * levels - (paths[0][t].len() - 2))
        .collect();
    comp.sort_unstable_by_key(|&c| std::cmp::Reverse(c));
    for (slot, &oi) in side[1].iter().enumerate() {
        quota[oi] = comp[slot].min(cap);
    }
    // A frozen exit chain leaves its shortfall to the balance pass, which
    // works vertex by vertex and is the costliest place to catch up. Retry
    // passes thaw the short chains against whatever the other freezes
    // returned to the pool; each pass can only shrink the frozen set.
    let orig: Vec<usize> = side[1].iter().map(|&oi| quota[oi]).collect();
    for _ in 0..3 {
        grow_chains(
            host,
            &mut pw,
            rank,
            &mut paths,
            chain_order,
            &side[1],
            &mut quota,
            &mut frozen,
            cap,
            true,
            rotation_cap,
        );
        if pw.is_empty() {
            break;
        }
        let mut thawed = false;
        for (slot, &oi) in side[1].iter().enumerate() {
            let (pi, ci) = chain_order[oi];
            if frozen[oi] && paths[pi][ci].len() - 1 < orig[slot] {
                frozen[oi] = false;
                quota[oi] = orig[slot];
                thawed = true;
            }
        }
        if !thawed {
            break;
        }
    }
    // Exit-side landing, longest chain first; prefer exact pair sums and
    // settle for a shortfall the balance pass can fill.
    let mut order1 = side[1].clone();
    order1.sort_by_key(|&oi| {
        let (pi, ci) = chain_order[oi];
        std::cmp::Reverse(paths[pi][ci].len())
    });
    let a_ints: Vec<usize> = (0..k).map(|t| paths[0][t].len() - 2).collect();
    let mut deficit = vec![0usize; k];
    for &oi in &order1 {
        let (_, ci) = chain_order[oi];
        // Mirror of the entry loop: the first pass only accepts landings
        // that leave the pair within a small shortfall of its sum, growing
        // to get there; the fallback pass takes any feasible landing.
        let mut landed = None;
        'pass: for (margin, grows) in [(8, 8), (2 * levels, levels)] {
            for _ in 0..=grows {
                let my_ints = paths[1][ci].len() - 1;
                let exact: Vec<bool> = (0..k)
                    .map(|ti| !used[1][ti] && a_ints[ti] + my_ints == 2 * levels)
                    .collect();
                landed = land_one(host, &mut paths[1][ci], plans[1].targets, &exact, rotation_cap)
                    .or_else(|| {
                        land_or_dump(
                            host,
                            &mut paths[1][ci],
                            plans[1].targets,
                            rotation_cap,
                            &mut pw,
                            |ti, ints| {
                                !used[1][ti]
                                    && a_ints[ti] + ints <= 2 * levels
                                    && a_ints[ti] + ints + margin >= 2 * levels
                            },
                            |ti| a_ints[ti],
                        )
                    });
                if landed.is_some() {
                    break 'pass;
                }
                if !(grow_one(host, &mut paths[1][ci], &mut pw, rank, rotation_cap)
                    || gen_insert_pool(host, &mut paths[1][ci], &mut pw, rank))
                {
                    break;
                }
            }
        }
        let Some(ti) = landed else {
            if std::env::var("CHAIN_DEBUG").is_ok() {
                eprintln!("exit land stuck: ints {}", paths[1][ci].len() - 1);
            }
            return None;
        };
        used[1][ti] = true;
        landings[1][ci] = ti;
        deficit[ti] = 2 * levels - a_ints[ti] - (paths[1][ci].len() - 2);
    }
    let mut pair_chains: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); k];
    for ci in 0..k {
        pair_chains[landings[1][ci]] = (landings[1][ci], ci);
    }
    if !balance_pairs(host, &mut paths, &pair_chains, &mut deficit, &mut pw, rank, slack) {
        if std::env::var("CHAIN_DEBUG").is_ok() {
            eprintln!(
                "balance stalled: pool left {}, deficits {:?}",
                pw.len(),
                deficit
            );
        }
        return None;
    }
    for &(c0, c1) in &pair_chains {
        if paths[0][c0].len() + paths[1][c1].len() != 2 * levels + 4 {
            if std::env::var("CHAIN_DEBUG").is_ok() {
                eprintln!(
                    "pair sum broken: {} + {}",
                    paths[0][c0].len(),
                    paths[1][c1].len()
                );
            }
            return None;
        }
    }
    Some((paths, landings, pw))
}

/// Embeds a spanning tree of bounded degree into a connected regular host
/// of the same order, returning the vertex bijection and a trace.
pub fn embed_spanning_tree(
    g: &Graph,
    target: &Graph,
    cfg: &PipelineConfig,
) -> Result<EmbeddingResult, PipelineError> {
    cfg.validate()?;
    let n = g.n();
    if n == 0 {
        return Err(PipelineError::BadConfig("empty host".into()));
    }
    if target.n() != n {
        return Err(PipelineError::SizeMismatch {
            host: n,
            target: target.n(),
        });
    }
    if target.edge_count() != n - 1 || !target.is_connected() {
        return Err(PipelineError::NotATree(format!(
            "{} vertices, {} edges, connected: {}",
            target.n(),
            target.edge_count(),
            target.is_connected()
        )));
    }
    if !g.is_connected() {
        return Err(PipelineError::HostDisconnected);
    }
    let Some(d) = g.regular_degree() else {
        return Err(PipelineError::HostIrregular);
    };

    // A complete host admits every bijection, so take the identity. Its
    // adjacency spectrum is n-1 once and -1 repeated, hence lambda_hat = 1.
    if d + 1 == n {
        let map: Vec<usize> = (0..n).collect();
        let mut trace = PipelineTrace::new(n, d);
        trace.complete_host_shortcut = true;
        trace.lambda_hat = if n >= 2 { 1.0 } else { 0.0 };
        trace.m_recommended = if d > 0 {
            ((trace.lambda_hat * n as f64) / d as f64).ceil() as usize
        } else {
            0
        };
        trace.m_used = cfg.m_ext;
        trace.attempts = 1;
        trace.verified = verify_embedding(g, target, &map).ok;
        return Ok(EmbeddingResult { map, trace });
    }

    let delta_cap = (cfg.d_cap / 2) as usize;
    if target.max_degree() > delta_cap {
        return Err(PipelineError::TargetDegreeTooHigh {
            got: target.max_degree(),
            cap: delta_cap,
        });
    }

    let spectrum = if n <= 300 {
        spectral::second_eigenvalue(g, 1e-9)?
    } else {
        spectral::second_eigenvalue_iterative(g, 1e-9)?
    };

    let provider = provider_by_name(&cfg.provider)?;
    let template = build_template(cfg.registers, cfg.k_gadget, cfg.template_len, provider.as_ref())?;
    let ell_bare = cfg.ell_bare(template.ell);
    let k = cfg.registers;

    let mut trace = PipelineTrace::new(n, d);
    trace.lambda_hat = spectrum.lambda_hat;
    trace.m_recommended = ((spectrum.lambda_hat * n as f64) / d as f64).ceil() as usize;
    trace.m_used = cfg.m_ext;
    trace.registers = k;
    trace.template_vertices = template.graph.n();
    trace.template_len = template.ell;
    trace.bare_len = ell_bare;
    trace.pool_size = 2 * k * (cfg.t_prime + cfg.num_levels);

    // Step 0: disjoint bare paths of the splice length.
    let pieces_all = extract_bare_paths(target, ell_bare)?;
    trace.bare_pieces_found = pieces_all.len();
    if pieces_all.len() < k {
        if cfg.allow_fallback {
            return many_leaves_fallback(g, target, cfg, trace);
        }
        return Err(PipelineError::BarePathDeficit {
            found: pieces_all.len(),
            needed: k,
            len: ell_bare,
        });
    }
    let pieces: Vec<&Path> = pieces_all.iter().take(k).collect();

    // The residual forest: strip the bare-path interiors and compact ids.
    let mut interior = vec![false; n];
    for p in &pieces {
        let vs = p.vertices();
        for &v in &vs[1..vs.len() - 1] {
            interior[v] = true;
        }
    }
    let old_ids: Vec<usize> = (0..n).filter(|&v| !interior[v]).collect();
    let mut old2new: Vec<Option<usize>> = vec![None; n];
    for (ci, &v) in old_ids.iter().enumerate() {
        old2new[v] = Some(ci);
    }
    let tprime_edges: Vec<(usize, usize)> = target
        .edges()
        .into_iter()
        .filter(|&(u, v)| !interior[u] && !interior[v])
        .map(|(u, v)| (old2new[u].unwrap(), old2new[v].unwrap()))
        .collect();
    let tprime = Graph::from_edges(old_ids.len(), &tprime_edges)?;
    trace.forest_vertices = tprime.n();

    let mut last: (&'static str, String) = ("setup", "no attempt ran".into());
    for attempt in 0..cfg.outer_attempts.max(1) {
        trace.attempts = attempt + 1;
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed ^ (attempt as u64).wrapping_mul(SEED_STRIDE));
        match run_attempt(
            g, cfg, &template, &pieces, &tprime, &old_ids, &old2new, &mut rng, &mut trace,
        ) {
            Ok((map, phi)) => {
                let check = verify_embedding(g, target, &map);
                if !check.ok {
                    last = (
                        "verify",
                        format!("embedding check failed: {:?}", check.violations.first()),
                    );
                    continue;
                }
                trace.phi = phi;
                trace.verified = true;
                return Ok(EmbeddingResult {
                    map,
                    trace: trace.clone(),
                });
            }
            Err(e) => {
                if std::env::var("CHAIN_DEBUG").is_ok() {
                    eprintln!("attempt {attempt} failed at {}: {}", e.0, e.1);
                }
                last = e;
            }
        }
    }
    Err(PipelineError::StepFailed {
        step: last.0,
        attempts: cfg.outer_attempts.max(1),
        detail: last.1,
    })
}

/// One full embedding attempt (steps 1 through 6). Returns the vertex map
/// and the register permutation, or the failing step with detail.
#[allow(clippy::too_many_arguments)]
fn run_attempt(
    g: &Graph,
    cfg: &PipelineConfig,
    template: &RoutingTemplate,
    pieces: &[&Path],
    tprime: &Graph,
    old_ids: &[usize],
    old2new: &[Option<usize>],
    rng: &mut ChaCha8Rng,
    trace: &mut PipelineTrace,
) -> Result<(Vec<usize>, Vec<usize>), (&'static str, String)> {
    let n = g.n();
    let k = cfg.registers;
    let mut state =
        ExtendableState::new(g, cfg.d_cap, cfg.m_ext).map_err(|e| ("setup", e.to_string()))?;

    // Step 1: reserved sets. The first is scratch held back until the chain
    // phase; the other two host the template entries and exits.
    let spec = ReservedSpec {
        sizes: vec![cfg.r0_size, k, k],
        band_lo: cfg.reserved_band.0,
        band_hi: cfg.reserved_band.1,
        retries: cfg.reserved_retries,
    };
    let rs = sample_reserved_sets(g, &spec, rng.gen::<u64>())
        .map_err(|e| ("reserve", e.to_string()))?;
    let r0 = rs.sets[0].clone();
    let v1 = rs.sets[1].clone();
    let v2 = rs.sets[2].clone();
    for &v in &r0 {
        state.forbid(v);
    }
    for &v in v1.iter().chain(v2.iter()) {
        state.seed_vertex(v).map_err(|e| ("reserve", e.to_string()))?;
    }

    // Hold back a uniform random slice of the future chain pool. The earlier
    // phases grow around it, so most of the pool stays a random subset with
    // healthy internal degree instead of the leftovers of greedy growth.
    let span = cfg.t_prime + cfg.num_levels;
    let mut taken = vec![false; n];
    for &v in r0.iter().chain(v1.iter()).chain(v2.iter()) {
        taken[v] = true;
    }
    let hold_size = ((2 * k * span) as f64 * cfg.pool_reserve).round() as usize;
    let open: Vec<usize> = (0..n).filter(|&v| !taken[v]).collect();
    if hold_size + 64 > open.len() {
        return Err((
            "reserve",
            format!(
                "pool hold of {hold_size} leaves too little room among {} open vertices",
                open.len()
            ),
        ));
    }
    let pool_hold: Vec<usize> = open
        .choose_multiple(rng, hold_size)
        .copied()
        .collect();
    for &v in &pool_hold {
        state.forbid(v);
    }

    // Step 2: realize the template on the reserved terminals.
    let placement = embed_template(
        &mut state,
        template,
        &v1,
        &v2,
        cfg.audit,
        cfg.template_rounds,
        rng,
    )
    .map_err(|e| ("template", e.to_string()))?;
    trace.template_rounds += placement.rounds;
    let corr = placement.corr;

    // Step 3: embed the residual forest.
    let mut forest_map = state
        .embed_forest(tprime, cfg.audit)
        .map_err(|e| ("forest", e.to_string()))?;
    let mut a_root: Vec<usize> = Vec::with_capacity(k);
    let mut b_root: Vec<usize> = Vec::with_capacity(k);
    for piece in pieces {
        let vs = piece.vertices();
        a_root.push(forest_map[old2new[vs[0]].expect("piece endpoints survive stripping")]);
        b_root.push(forest_map[old2new[*vs.last().unwrap()].expect("piece endpoints survive")]);
    }
    for &v in r0.iter().chain(pool_hold.iter()) {
        state.allow(v);
    }

    // Steps 4 and 5: sweep every leftover vertex into chains. Entry-side
    // chains run from the images of the bare-path left endpoints to the
    // template entries; exit-side chains run from the template exits to the
    // images of the right endpoints. Each complementary pair of chains
    // carries `2 * span` interiors between its fixed ends.
    let mut pool: BTreeSet<usize> = (0..n)
        .filter(|&v| !state.subgraph().has_vertex(v))
        .collect();
    let expected_pool = 2 * k * span;
    if pool.len() != expected_pool {
        return Err((
            "chains",
            format!(
                "pool arithmetic drift: {} free vertices, expected {expected_pool}",
                pool.len()
            ),
        ));
    }
    let x: Vec<usize> = (0..k).map(|j| corr[template.a[j]]).collect();
    let y: Vec<usize> = (0..k).map(|j| corr[template.b[j]]).collect();
    let plans = [
        ChainPlan {
            starts: &a_root,
            targets: &x,
        },
        ChainPlan {
            starts: &y,
            targets: &b_root,
        },
    ];
    // Forest images that are not chain anchors may be traded against the
    // pool when the sweep runs out of moves; the swap log is replayed onto
    // the occupancy state once a sweep succeeds.
    let mut anchor = vec![false; tprime.n()];
    for piece in pieces {
        let vs = piece.vertices();
        anchor[old2new[vs[0]].expect("piece endpoints survive stripping")] = true;
        anchor[old2new[*vs.last().unwrap()].expect("piece endpoints survive")] = true;
    }
    let mut slots: Vec<(usize, Vec<usize>)> = (0..tprime.n())
        .filter(|&ci| !anchor[ci])
        .map(|ci| (ci, tprime.neighbors(ci).to_vec()))
        .collect();
    slots.sort_by_key(|(_, nbrs)| nbrs.len());
    let mut slack = ForestSlack {
        forest_map: &mut forest_map,
        slots,
        used: BTreeSet::new(),
        log: Vec::new(),
    };
    let mut systems = build_chain_systems(
        g,
        &mut pool,
        &plans,
        span,
        true,
        rng,
        cfg.chain_restarts,
        cfg.rotation_cap,
        &mut trace.chain_restarts,
        Some(&mut slack),
    )
    .ok_or_else(|| {
        (
            "chains",
            "no disjoint chain system within the restart budget".to_string(),
        )
    })?;
    let (chains_b, tau) = systems.pop().expect("two plans were swept");
    let (chains_a, psi) = systems.pop().expect("two plans were swept");
    if !pool.is_empty() {
        return Err((
            "chains",
            format!("{} pool vertices escaped the sweep", pool.len()),
        ));
    }
    for &(_, z, w) in &slack.log {
        state
            .swap_vertex(w, z)
            .map_err(|e| ("chains", format!("forest swap reconcile: {e}")))?;
    }
    for ch in chains_a.iter().chain(chains_b.iter()) {
        let p = Path::new(ch.clone()).map_err(|e| ("chains", e.to_string()))?;
        state.insert_path(&p).map_err(|e| ("chains", e.to_string()))?;
    }

    // Step 6: close the system. Chain i of the entry side lands on entry
    // psi[i]; exit-side chain j lands on endpoint image tau[j]. Routing with
    // phi[r] = tau^{-1}(psi^{-1}(r)) sends each routed path to the exit
    // whose chain returns to the same bare path it left.
    let mut inv_psi = vec![usize::MAX; k];
    for (i, &r) in psi.iter().enumerate() {
        inv_psi[r] = i;
    }
    let mut inv_tau = vec![usize::MAX; k];
    for (j, &i) in tau.iter().enumerate() {
        inv_tau[i] = j;
    }
    if inv_psi.contains(&usize::MAX) || inv_tau.contains(&usize::MAX) {
        return Err(("route", "chain landings are not bijective".to_string()));
    }
    let phi: Vec<usize> = (0..k).map(|r| inv_tau[inv_psi[r]]).collect();
    let factor = template.route(&phi).map_err(|e| ("route", e.to_string()))?;

    // Assemble the final map: forest images first, then one spliced host
    // path per bare piece.
    let mut map: Vec<Option<usize>> = vec![None; n];
    for (ci, &old) in old_ids.iter().enumerate() {
        map[old] = Some(forest_map[ci]);
    }
    for i in 0..k {
        let r = psi[i];
        let jreg = phi[r];
        let route_host: Vec<usize> = factor.paths[r]
            .vertices()
            .iter()
            .map(|&tv| corr[tv])
            .collect();
        let mut splice: Vec<usize> = chains_a[i].clone();
        splice.extend(&route_host[1..]);
        splice.extend(&chains_b[jreg][1..]);
        let tvs = pieces[i].vertices();
        if splice.len() != tvs.len() {
            return Err((
                "splice",
                format!(
                    "bare path {i} spliced to {} vertices, expected {}",
                    splice.len(),
                    tvs.len()
                ),
            ));
        }
        let sp = Path::new(splice.clone()).map_err(|e| ("splice", e.to_string()))?;
        sp.validate_in(g).map_err(|e| ("splice", e.to_string()))?;
        if map[tvs[0]] != Some(splice[0]) || map[*tvs.last().unwrap()] != Some(*splice.last().unwrap())
        {
            return Err(("splice", format!("splice {i} drifted off its anchors")));
        }
        for (idx, &tvx) in tvs.iter().enumerate().skip(1).take(tvs.len() - 2) {
            if map[tvx].is_some() {
                return Err(("splice", format!("target vertex {tvx} mapped twice")));
            }
            map[tvx] = Some(splice[idx]);
        }
    }
    let mut out = Vec::with_capacity(n);
    for (tv, o) in map.into_iter().enumerate() {
        match o {
            Some(h) => out.push(h),
            None => return Err(("assemble", format!("target vertex {tv} left unmapped"))),
        }
    }
    Ok((out, phi))
}

/// Endgame for targets without enough long bare paths (many leaves): embed
/// the tree minus its leaves while holding back a near-leaf-count reserve,
/// then match the leaf slots to the free vertices along host edges.
fn many_leaves_fallback(
    g: &Graph,
    target: &Graph,
    cfg: &PipelineConfig,
    mut trace: PipelineTrace,
) -> Result<EmbeddingResult, PipelineError> {
    trace.fallback_used = true;
    let n = g.n();
    let leaves: Vec<usize> = (0..n).filter(|&v| target.degree(v) == 1).collect();
    let is_leaf: Vec<bool> = {
        let mut f = vec![false; n];
        for &v in &leaves {
            f[v] = true;
        }
        f
    };
    let keep: Vec<usize> = (0..n).filter(|&v| !is_leaf[v]).collect();
    if keep.is_empty() {
        return Err(PipelineError::BadConfig(
            "target has no internal vertices".into(),
        ));
    }
    let mut old2new: Vec<Option<usize>> = vec![None; n];
    for (ci, &v) in keep.iter().enumerate() {
        old2new[v] = Some(ci);
    }
    let minus_edges: Vec<(usize, usize)> = target
        .edges()
        .into_iter()
        .filter(|&(u, v)| !is_leaf[u] && !is_leaf[v])
        .map(|(u, v)| (old2new[u].unwrap(), old2new[v].unwrap()))
        .collect();
    let t_minus = Graph::from_edges(keep.len(), &minus_edges)?;
    trace.forest_vertices = t_minus.n();
    trace.pool_size = leaves.len();

    let mut last: (&'static str, String) = ("fallback", "no attempt ran".into());
    for attempt in 0..cfg.outer_attempts.max(1) {
        trace.attempts = attempt + 1;
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed ^ (attempt as u64).wrapping_mul(SEED_STRIDE));
        let mut state = match ExtendableState::new(g, cfg.d_cap, cfg.m_ext) {
            Ok(s) => s,
            Err(e) => return Err(e.into()),
        };
        // Hold back half the leaf count: the rest of the slack keeps the
        // forest endgame from running out of room, while the reserve keeps
        // the leaf pool spread across the host instead of being the dregs.
        let slack = (leaves.len() / 2).max(1);
        let reserve_ct = leaves.len().saturating_sub(slack);
        let all: Vec<usize> = (0..n).collect();
        let reserved: Vec<usize> = all
            .choose_multiple(&mut rng, reserve_ct)
            .copied()
            .collect();
        for &v in &reserved {
            state.forbid(v);
        }
        let forest_map = match state.embed_forest(&t_minus, cfg.audit) {
            Ok(m) => m,
            Err(e) => {
                last = ("fallback-forest", e.to_string());
                continue;
            }
        };
        for &v in &reserved {
            state.allow(v);
        }
        let free: Vec<usize> = (0..n)
            .filter(|&v| !state.subgraph().has_vertex(v))
            .collect();
        if free.len() != leaves.len() {
            last = (
                "fallback-match",
                format!(
                    "{} free vertices for {} leaves",
                    free.len(),
                    leaves.len()
                ),
            );
            continue;
        }
        let mut free_idx: Vec<Option<usize>> = vec![None; n];
        for (fi, &v) in free.iter().enumerate() {
            free_idx[v] = Some(fi);
        }
        let left_adj: Vec<Vec<usize>> = leaves
            .iter()
            .map(|&leaf| {
                let parent = target.neighbors(leaf)[0];
                let hp = forest_map[old2new[parent].expect("leaf parents are internal")];
                g.neighbors(hp)
                    .iter()
                    .filter_map(|&w| free_idx[w])
                    .collect()
            })
            .collect();
        match bipartite_match_indices(&left_adj, free.len()) {
            Ok(assign) => {
                let mut map = vec![0usize; n];
                for (ci, &v) in keep.iter().enumerate() {
                    map[v] = forest_map[ci];
                }
                for (slot, &leaf) in leaves.iter().enumerate() {
                    map[leaf] = free[assign[slot]];
                }
                let check = verify_embedding(g, target, &map);
                if !check.ok {
                    last = (
                        "fallback-verify",
                        format!("embedding check failed: {:?}", check.violations.first()),
                    );
                    continue;
                }
                trace.verified = true;
                return Ok(EmbeddingResult { map, trace });
            }
            Err(_) => {
                last = (
                    "fallback-match",
                    "no perfect leaf-to-free matching".to_string(),
                );
            }
        }
    }
    Err(PipelineError::StepFailed {
        step: last.0,
        attempts: cfg.outer_attempts.max(1),
        detail: last.1,
    })
}

/// Partitions the host vertices into cycles of length `k_cycle` (which must
/// divide the host order): the template is realized once, chains sweep the
/// leftover pool from the exits back onto the entries, and each routed path
/// closes into a cycle with its chain.
pub fn cycle_factor(
    g: &Graph,
    k_cycle: usize,
    cfg: &PipelineConfig,
) -> Result<Vec<Vec<usize>>, PipelineError> {
    cfg.validate()?;
    let n = g.n();
    if n == 0 || k_cycle < 3 {
        return Err(PipelineError::CycleBand {
            k: k_cycle,
            min: 3,
            max: n,
        });
    }
    if n % k_cycle != 0 {
        return Err(PipelineError::CycleDivisibility { n, k: k_cycle });
    }
    if !g.is_connected() {
        return Err(PipelineError::HostDisconnected);
    }
    let Some(d) = g.regular_degree() else {
        return Err(PipelineError::HostIrregular);
    };
    // Complete host: consecutive blocks are cycles.
    if d + 1 == n {
        return Ok((0..n / k_cycle)
            .map(|i| (i * k_cycle..(i + 1) * k_cycle).collect())
            .collect());
    }
    // A connected 2-regular host is itself a cycle; return it whole.
    if d == 2 && k_cycle == n {
        let mut order = vec![0usize];
        let mut prev = 0usize;
        let mut cur = g.neighbors(0)[0];
        while cur != 0 {
            order.push(cur);
            let ns = g.neighbors(cur);
            let next = if ns[0] == prev { ns[1] } else { ns[0] };
            prev = cur;
            cur = next;
        }
        return Ok(vec![order]);
    }
    let n_reg = n / k_cycle;
    if n_reg < 2 {
        return Err(PipelineError::CycleBand {
            k: k_cycle,
            min: 3,
            max: n / 2,
        });
    }
    let provider = provider_by_name(&cfg.provider)?;
    let template = build_template(n_reg, cfg.k_gadget, cfg.template_len, provider.as_ref())?;
    let ell_t = template.ell;
    if k_cycle < ell_t + 2 {
        return Err(PipelineError::CycleBand {
            k: k_cycle,
            min: ell_t + 2,
            max: n / 2,
        });
    }
    let levels = k_cycle - ell_t - 1;

    let mut last: (&'static str, String) = ("setup", "no attempt ran".into());
    for attempt in 0..cfg.outer_attempts.max(1) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed ^ (attempt as u64).wrapping_mul(SEED_STRIDE));
        let mut state = ExtendableState::new(g, cfg.d_cap, cfg.m_ext)?;
        let spec = ReservedSpec {
            sizes: vec![n_reg, n_reg],
            band_lo: cfg.reserved_band.0,
            band_hi: cfg.reserved_band.1,
            retries: cfg.reserved_retries,
        };
        let rs = match sample_reserved_sets(g, &spec, rng.gen::<u64>()) {
            Ok(r) => r,
            Err(e) => {
                last = ("reserve", e.to_string());
                continue;
            }
        };
        let v1 = rs.sets[0].clone();
        let v2 = rs.sets[1].clone();
        for &v in v1.iter().chain(v2.iter()) {
            state.seed_vertex(v)?;
        }
        let placement = match embed_template(
            &mut state,
            &template,
            &v1,
            &v2,
            cfg.audit,
            cfg.template_rounds,
            &mut rng,
        ) {
            Ok(p) => p,
            Err(e) => {
                last = ("template", e.to_string());
                continue;
            }
        };
        let corr = placement.corr;
        let mut pool: BTreeSet<usize> = (0..n)
            .filter(|&v| !state.subgraph().has_vertex(v))
            .collect();
        if pool.len() != n_reg * levels {
            last = (
                "chains",
                format!(
                    "pool arithmetic drift: {} free vertices, expected {}",
                    pool.len(),
                    n_reg * levels
                ),
            );
            continue;
        }
        let x: Vec<usize> = (0..n_reg).map(|j| corr[template.a[j]]).collect();
        let y: Vec<usize> = (0..n_reg).map(|j| corr[template.b[j]]).collect();
        let plans = [ChainPlan {
            starts: &y,
            targets: &x,
        }];
        let mut restarts_used = 0usize;
        let Some(mut systems) = build_chain_systems(
            g,
            &mut pool,
            &plans,
            levels,
            false,
            &mut rng,
            cfg.chain_restarts,
            cfg.rotation_cap,
            &mut restarts_used,
            None,
        ) else {
            last = (
                "chains",
                "no disjoint chain system within the restart budget".to_string(),
            );
            continue;
        };
        let (chains, tau) = systems.pop().expect("one plan was swept");
        // Exit-side chain j lands on entry tau[j]; routing with
        // phi[tau[j]] = j closes each pair into one cycle.
        let mut phi = vec![usize::MAX; n_reg];
        for (j, &r) in tau.iter().enumerate() {
            phi[r] = j;
        }
        if phi.contains(&usize::MAX) {
            last = ("route", "chain landings are not bijective".to_string());
            continue;
        }
        let factor = match template.route(&phi) {
            Ok(f) => f,
            Err(e) => {
                last = ("route", e.to_string());
                continue;
            }
        };
        let mut cycles: Vec<Vec<usize>> = Vec::with_capacity(n_reg);
        for j in 0..n_reg {
            let r = tau[j];
            let route_host: Vec<usize> = factor.paths[r]
                .vertices()
                .iter()
                .map(|&tv| corr[tv])
                .collect();
            // chains[j] runs y_j .. x_r; the routed path runs x_r .. y_j.
            let mut cyc = chains[j].clone();
            cyc.extend(&route_host[1..route_host.len() - 1]);
            cycles.push(cyc);
        }
        match validate_cycle_factor(g, &cycles, k_cycle) {
            Ok(()) => return Ok(cycles),
            Err(msg) => last = ("cycles", msg),
        }
    }
    Err(PipelineError::StepFailed {
        step: last.0,
        attempts: cfg.outer_attempts.max(1),
        detail: last.1,
    })
}

/// Checks that `cycles` is a vertex partition of the host into cycles of
/// the stated length whose consecutive pairs (and wrap) are host edges.
fn validate_cycle_factor(g: &Graph, cycles: &[Vec<usize>], k_cycle: usize) -> Result<(), String> {
    let mut seen = vec![false; g.n()];
    let mut covered = 0usize;
    for (ci, cyc) in cycles.iter().enumerate() {
        if cyc.len() != k_cycle {
            return Err(format!("cycle {ci} has length {}", cyc.len()));
        }
        for w in 0..cyc.len() {
            let u = cyc[w];
            let v = cyc[(w + 1) % cyc.len()];
            if u >= g.n() {
                return Err(format!("cycle {ci} names vertex {u} outside the host"));
            }
            if seen[u] {
                return Err(format!("vertex {u} appears in two cycles"));
            }
            seen[u] = true;
            covered += 1;
            if !g.has_edge(u, v) {
                return Err(format!("cycle {ci} uses the host non-edge {u}-{v}"));
            }
        }
    }
    if covered != g.n() {
        return Err(format!(
            "cycles cover {covered} of {} host vertices",
            g.n()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_random_regular, generate_tree, TreeKind};

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle_host(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn circulant(n: usize, offsets: &[usize]) -> Graph {
        let mut edges = Vec::new();
        for v in 0..n {
            for &o in offsets {
                edges.push((v, (v + o) % n));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn assert_cycle_partition(g: &Graph, cycles: &[Vec<usize>], k: usize) {
        let mut seen = vec![false; g.n()];
        for cyc in cycles {
            assert_eq!(cyc.len(), k);
            for w in 0..cyc.len() {
                assert!(!seen[cyc[w]]);
                seen[cyc[w]] = true;
                assert!(g.has_edge(cyc[w], cyc[(w + 1) % cyc.len()]));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn recommended_config_matches_expected_shape() {
        let cfg = PipelineConfig::recommended(600, 30);
        assert_eq!(cfg.registers, 4);
        assert_eq!(cfg.num_levels, 23);
        assert_eq!(cfg.ell_bare(13), 75);
        cfg.validate().unwrap();

        let cfg2 = PipelineConfig::recommended(1200, 30);
        assert_eq!(cfg2.num_levels, 45);
        assert_eq!(cfg2.ell_bare(13), 119);
    }

    #[test]
    fn config_validation_rejects_bad_knobs() {
        let mut cfg = PipelineConfig::recommended(600, 30);
        cfg.registers = 1;
        assert!(matches!(
            cfg.validate(),
            Err(PipelineError::BadConfig(_))
        ));
        let mut cfg = PipelineConfig::recommended(600, 30);
        cfg.provider = "bubbles".into();
        assert!(matches!(cfg.validate(), Err(PipelineError::BadConfig(_))));
        let mut cfg = PipelineConfig::recommended(600, 30);
        cfg.reserved_band = (5, 2);
        assert!(matches!(cfg.validate(), Err(PipelineError::BadConfig(_))));
    }

    #[test]
    fn verify_embedding_accepts_the_identity() {
        let g = circulant(10, &[1, 2]);
        let map: Vec<usize> = (0..10).collect();
        let check = verify_embedding(&g, &g, &map);
        assert!(check.ok);
        assert!(check.violations.is_empty());
    }

    #[test]
    fn verify_embedding_reports_defects() {
        let g = cycle_host(6);
        let t = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        // Duplicate image.
        let check = verify_embedding(&g, &t, &[0, 1, 2, 3, 4, 4]);
        assert!(!check.ok);
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, EmbeddingViolation::DuplicateImage { image: 4, .. })));
        // Non-edge: 0-2 is not an edge of the 6-cycle.
        let check = verify_embedding(&g, &t, &[0, 2, 4, 1, 3, 5]);
        assert!(!check.ok);
        assert!(check
            .violations
            .iter()
            .any(|v| matches!(v, EmbeddingViolation::MissingEdge { .. })));
        // Wrong map length.
        let check = verify_embedding(&g, &t, &[0, 1, 2]);
        assert!(!check.ok);
        assert!(matches!(
            check.violations[0],
            EmbeddingViolation::MapLength { got: 3, expected: 6 }
        ));
    }

    #[test]
    fn complete_host_takes_any_tree() {
        let g = complete(40);
        let cfg = PipelineConfig::recommended(40, 39);
        // A path.
        let t = generate_tree(TreeKind::Path, 40, 4, 1).unwrap();
        let res = embed_spanning_tree(&g, &t, &cfg).unwrap();
        assert!(res.trace.complete_host_shortcut);
        assert!(res.trace.verified);
        // A star: maximum degree far above the usual bound.
        let star_edges: Vec<(usize, usize)> = (1..40).map(|i| (0, i)).collect();
        let star = Graph::from_edges(40, &star_edges).unwrap();
        let res = embed_spanning_tree(&g, &star, &cfg).unwrap();
        assert!(res.trace.complete_host_shortcut);
        assert!(verify_embedding(&g, &star, &res.map).ok);
    }

    #[test]
    fn precondition_errors_are_specific() {
        let g = circulant(20, &[1, 2]);
        let cfg = PipelineConfig::recommended(20, 4);
        let small = generate_tree(TreeKind::Path, 19, 4, 1).unwrap();
        assert!(matches!(
            embed_spanning_tree(&g, &small, &cfg),
            Err(PipelineError::SizeMismatch { host: 20, target: 19 })
        ));
        let cyclic = cycle_host(20);
        assert!(matches!(
            embed_spanning_tree(&g, &cyclic, &cfg),
            Err(PipelineError::NotATree(_))
        ));
        let star_edges: Vec<(usize, usize)> = (1..20).map(|i| (0, i)).collect();
        let star = Graph::from_edges(20, &star_edges).unwrap();
        assert!(matches!(
            embed_spanning_tree(&g, &star, &cfg),
            Err(PipelineError::TargetDegreeTooHigh { got: 19, cap: 4 })
        ));
    }

    #[test]
    fn reserved_sets_are_disjoint_and_banded() {
        let g = complete(100);
        let spec = ReservedSpec {
            sizes: vec![5, 5],
            band_lo: 0,
            band_hi: 100,
            retries: 10,
        };
        let rs = sample_reserved_sets(&g, &spec, 3).unwrap();
        assert_eq!(rs.sets.len(), 2);
        let mut all: Vec<usize> = rs.sets.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 10);
        for set in &rs.sets {
            assert!(set.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn impossible_reserved_band_names_the_worst_violator() {
        let g = circulant(50, &[1, 2]);
        let spec = ReservedSpec {
            sizes: vec![10],
            band_lo: 4,
            band_hi: 4,
            retries: 5,
        };
        match sample_reserved_sets(&g, &spec, 1) {
            Err(PipelineError::ReservedRetriesExceeded {
                attempts, degree, ..
            }) => {
                assert_eq!(attempts, 5);
                assert!(degree < 4 || degree > 4);
            }
            other => panic!("expected retry exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn template_realization_maps_every_vertex_onto_host_edges() {
        let g = generate_random_regular(300, 20, 42).unwrap();
        let provider = OddEvenMergesort;
        let template = build_template(4, 2, None, &provider).unwrap();
        let mut state = ExtendableState::new(&g, 8, 2).unwrap();
        let spec = ReservedSpec {
            sizes: vec![4, 4],
            band_lo: 0,
            band_hi: 3,
            retries: 50,
        };
        let rs = sample_reserved_sets(&g, &spec, 9).unwrap();
        let (v1, v2) = (rs.sets[0].clone(), rs.sets[1].clone());
        for &v in v1.iter().chain(v2.iter()) {
            state.seed_vertex(v).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let placement = embed_template(
            &mut state,
            &template,
            &v1,
            &v2,
            AuditMode::Trust,
            30,
            &mut rng,
        )
        .unwrap();
        let corr = placement.corr;
        assert_eq!(corr.len(), template.graph.n());
        let distinct: BTreeSet<usize> = corr.iter().copied().collect();
        assert_eq!(distinct.len(), corr.len());
        for (u, v) in template.graph.edges() {
            assert!(g.has_edge(corr[u], corr[v]));
        }
        for j in 0..template.n_reg {
            assert_eq!(corr[template.a[j]], v1[j]);
            assert_eq!(corr[template.b[j]], v2[j]);
        }
    }

    #[test]
    fn end_to_end_path_embedding() {
        let g = generate_random_regular(600, 30, 0xA11CE).unwrap();
        let t = generate_tree(TreeKind::Path, 600, 4, 1).unwrap();
        let cfg = PipelineConfig::recommended(600, 30);
        let res = embed_spanning_tree(&g, &t, &cfg).unwrap();
        assert!(res.trace.verified);
        assert!(!res.trace.fallback_used);
        assert!(verify_embedding(&g, &t, &res.map).ok);
        // The register permutation really is one.
        let mut phi = res.trace.phi.clone();
        phi.sort_unstable();
        assert_eq!(phi, vec![0, 1, 2, 3]);
        assert_eq!(res.trace.pool_size, 240);
        assert_eq!(res.trace.bare_len, 75);
    }

    #[test]
    fn end_to_end_spider_embedding() {
        let g = generate_random_regular(600, 30, 0xBEE).unwrap();
        let t = generate_tree(TreeKind::Spider, 600, 4, 2).unwrap();
        let cfg = PipelineConfig::recommended(600, 30);
        let res = embed_spanning_tree(&g, &t, &cfg).unwrap();
        assert!(res.trace.verified);
        assert!(verify_embedding(&g, &t, &res.map).ok);
    }

    #[test]
    fn embedding_is_deterministic() {
        let g = generate_random_regular(600, 30, 77).unwrap();
        let t = generate_tree(TreeKind::Caterpillar, 600, 4, 3).unwrap();
        let cfg = PipelineConfig::recommended(600, 30);
        let r1 = embed_spanning_tree(&g, &t, &cfg).unwrap();
        let r2 = embed_spanning_tree(&g, &t, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn leafy_tree_uses_the_fallback() {
        let g = generate_random_regular(600, 30, 0xF00D).unwrap();
        let t = generate_tree(TreeKind::RandomBounded, 600, 4, 11).unwrap();
        let cfg = PipelineConfig::recommended(600, 30);
        let res = embed_spanning_tree(&g, &t, &cfg).unwrap();
        assert!(res.trace.fallback_used);
        assert!(res.trace.verified);
        assert!(verify_embedding(&g, &t, &res.map).ok);
    }

    #[test]
    fn fallback_can_be_disabled() {
        let g = generate_random_regular(600, 30, 0xF00D).unwrap();
        let t = generate_tree(TreeKind::RandomBounded, 600, 4, 11).unwrap();
        let mut cfg = PipelineConfig::recommended(600, 30);
        cfg.allow_fallback = false;
        assert!(matches!(
            embed_spanning_tree(&g, &t, &cfg),
            Err(PipelineError::BarePathDeficit { needed: 4, .. })
        ));
    }

    #[test]
    fn cycle_factor_on_complete_host() {
        let g = complete(30);
        let cfg = PipelineConfig::recommended(30, 29);
        let cycles = cycle_factor(&g, 6, &cfg).unwrap();
        assert_eq!(cycles.len(), 5);
        assert_cycle_partition(&g, &cycles, 6);
    }

    #[test]
    fn cycle_factor_walks_a_plain_cycle() {
        let g = cycle_host(12);
        let cfg = PipelineConfig::recommended(12, 2);
        let cycles = cycle_factor(&g, 12, &cfg).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_cycle_partition(&g, &cycles, 12);
        assert!(matches!(
            cycle_factor(&g, 5, &cfg),
            Err(PipelineError::CycleDivisibility { n: 12, k: 5 })
        ));
        assert!(matches!(
            cycle_factor(&g, 4, &cfg),
            Err(PipelineError::CycleBand { k: 4, .. })
        ));
    }

    #[test]
    fn cycle_factor_partitions_a_regular_host() {
        let g = generate_random_regular(1200, 40, 13).unwrap();
        let cfg = PipelineConfig::recommended(1200, 40);
        let cycles = cycle_factor(&g, 300, &cfg).unwrap();
        assert_eq!(cycles.len(), 4);
        assert_cycle_partition(&g, &cycles, 300);
    }
}
