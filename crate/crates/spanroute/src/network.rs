//! Parallel comparison networks.
//!
//! A network on `n` registers is a sequence of levels; each level is a set of
//! comparator pairs `(j1, j2)` with `j1 < j2` touching pairwise distinct
//! registers. Applying the network to a bijective assignment of values
//! `1..=n` runs the swap recurrence level by level: a comparator swaps its
//! two registers exactly when the lower-indexed one holds the larger value.
//! The per-comparator swap trace is first-class — routing decisions downstream
//! are read directly off it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from network construction, simulation, and verification.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("comparator ({j1},{j2}) invalid (need j1 < j2 < n = {n})")]
    InvalidComparator { j1: usize, j2: usize, n: usize },
    #[error("register {index} appears twice in level {level}")]
    DuplicateIndexInLevel { level: usize, index: usize },
    #[error("assignment is not a bijection onto 1..={n}")]
    NonBijective { n: usize },
    #[error("assignment has {got} registers, network has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("{n} registers too large for {mode} verification (limit {limit})")]
    TooLarge {
        n: usize,
        mode: &'static str,
        limit: usize,
    },
    #[error("network must have at least one register")]
    Empty,
    #[error("invalid JSON network: {0}")]
    BadJson(String),
}

/// A comparison network: register count plus a sequence of comparator levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonNetwork {
    n: usize,
    levels: Vec<Vec<(usize, usize)>>,
}

impl ComparisonNetwork {
    /// Builds a network, validating every level: pairs ordered, in range, and
    /// register-disjoint within the level. Comparators are stored sorted by
    /// first index for deterministic traces.
    pub fn new(n: usize, levels: Vec<Vec<(usize, usize)>>) -> Result<Self, NetworkError> {
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        let mut stored = Vec::with_capacity(levels.len());
        for (li, level) in levels.into_iter().enumerate() {
            let mut seen = vec![false; n];
            for &(j1, j2) in &level {
                if j1 >= j2 || j2 >= n {
                    return Err(NetworkError::InvalidComparator { j1, j2, n });
                }
                for j in [j1, j2] {
                    if seen[j] {
                        return Err(NetworkError::DuplicateIndexInLevel {
                            level: li,
                            index: j,
                        });
                    }
                    seen[j] = true;
                }
            }
            let mut level = level;
            level.sort_unstable();
            stored.push(level);
        }
        Ok(ComparisonNetwork { n, levels: stored })
    }

    /// Register count.
    pub fn registers(&self) -> usize {
        self.n
    }

    /// Number of levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The comparator levels.
    pub fn levels(&self) -> &[Vec<(usize, usize)>] {
        &self.levels
    }

    /// Total comparator count.
    pub fn comparator_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// The same network with its final level removed (empty networks stay
    /// empty). Used to build near-miss fixtures in tests.
    pub fn without_last_level(&self) -> ComparisonNetwork {
        let mut levels = self.levels.clone();
        levels.pop();
        ComparisonNetwork { n: self.n, levels }
    }

    /// Serializes as `{"n":...,"levels":[[[j1,j2],...],...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({"schema": "v1", "n": self.n, "levels": self.levels})
    }

    /// Parses the JSON network schema (an extra `schema` field is ignored).
    pub fn from_json_str(s: &str) -> Result<Self, NetworkError> {
        #[derive(Deserialize)]
        struct NetJson {
            n: usize,
            levels: Vec<Vec<(usize, usize)>>,
        }
        let parsed: NetJson =
            serde_json::from_str(s).map_err(|e| NetworkError::BadJson(e.to_string()))?;
        ComparisonNetwork::new(parsed.n, parsed.levels)
    }
}

/// A bijective assignment of the values `1..=n` to registers `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    values: Vec<usize>,
}

impl Assignment {
    /// Builds an assignment from `values[register] = value`, checking
    /// bijectivity onto `1..=n`.
    pub fn new(values: Vec<usize>) -> Result<Self, NetworkError> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return Err(NetworkError::NonBijective { n });
            }
            seen[v] = true;
        }
        Ok(Assignment { values })
    }

    /// The identity assignment (value `j+1` at register `j`).
    pub fn identity(n: usize) -> Self {
        Assignment {
            values: (1..=n).collect(),
        }
    }

    /// Value held at register `j`.
    pub fn value_at(&self, j: usize) -> usize {
        self.values[j]
    }

    /// Register currently holding `value`.
    pub fn register_of(&self, value: usize) -> usize {
        self.values.iter().position(|&v| v == value).unwrap()
    }

    /// The underlying value vector.
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Whether register `j` holds value `j+1` for every `j`.
    pub fn is_sorted(&self) -> bool {
        self.values.iter().enumerate().all(|(j, &v)| v == j + 1)
    }
}

/// Per-level, per-comparator swap decisions from one application of a
/// network; `trace[i][c]` is true when comparator `c` of level `i` swapped.
pub type SwapTrace = Vec<Vec<bool>>;

/// Runs the swap recurrence on `rho0` and returns the final assignment plus
/// the per-comparator swap trace.
pub fn apply_network(
    net: &ComparisonNetwork,
    rho0: &Assignment,
) -> Result<(Assignment, SwapTrace), NetworkError> {
    if rho0.values.len() != net.n {
        return Err(NetworkError::SizeMismatch {
            got: rho0.values.len(),
            want: net.n,
        });
    }
    let mut vals = rho0.values.clone();
    let mut trace = Vec::with_capacity(net.levels.len());
    for level in &net.levels {
        let mut level_trace = Vec::with_capacity(level.len());
        for &(j1, j2) in level {
            let swap = vals[j1] > vals[j2];
            if swap {
                vals.swap(j1, j2);
            }
            level_trace.push(swap);
        }
        trace.push(level_trace);
    }
    Ok((Assignment { values: vals }, trace))
}

/// Verification strategy for [`is_sorting_network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Tests all `2^n` monotone-coded binary inputs (valid by the zero-one
    /// principle); allowed up to n = 24.
    ZeroOne,
    /// Tests all `n!` permutations; allowed up to n = 8.
    Exhaustive,
}

/// Decides whether the network sorts every input, by the requested mode.
/// The two modes agree wherever both apply.
pub fn is_sorting_network(
    net: &ComparisonNetwork,
    mode: VerifyMode,
) -> Result<bool, NetworkError> {
    let n = net.n;
    match mode {
        VerifyMode::ZeroOne => {
            if n > 24 {
                return Err(NetworkError::TooLarge {
                    n,
                    mode: "zero-one",
                    limit: 24,
                });
            }
            for mask in 0u32..(1u32 << n) {
                let mut bits: Vec<u8> = (0..n).map(|j| ((mask >> j) & 1) as u8).collect();
                for level in &net.levels {
                    for &(j1, j2) in level {
                        if bits[j1] > bits[j2] {
                            bits.swap(j1, j2);
                        }
                    }
                }
                if bits.windows(2).any(|w| w[0] > w[1]) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        VerifyMode::Exhaustive => {
            if n > 8 {
                return Err(NetworkError::TooLarge {
                    n,
                    mode: "exhaustive",
                    limit: 8,
                });
            }
            let mut perm: Vec<usize> = (1..=n).collect();
            loop {
                let rho0 = Assignment::new(perm.clone()).unwrap();
                let (out, _) = apply_network(net, &rho0)?;
                if !out.is_sorted() {
                    return Ok(false);
                }
                if !next_permutation(&mut perm) {
                    return Ok(true);
                }
            }
        }
    }
}

/// Advances `perm` to the next lexicographic permutation; false at the last.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// A source of sorting networks at any register count. The classical
/// logarithmic-depth existence result has no practical construction, so
/// builders stand behind this seam and depth is measured, not assumed.
pub trait NetworkProvider {
    /// Builds a sorting network on `n` registers.
    fn build(&self, n: usize) -> Result<ComparisonNetwork, NetworkError>;
    /// Short stable name for reports.
    fn name(&self) -> &'static str;
}

/// Odd-even mergesort builder (default provider). Depth grows as
/// `O(log^2 n)`; exact depths: n=2 → 1, n=4 → 3, n=8 → 6.
#[derive(Debug, Clone, Copy, Default)]
pub struct OddEvenMergesort;

impl NetworkProvider for OddEvenMergesort {
    fn build(&self, n: usize) -> Result<ComparisonNetwork, NetworkError> {
        build_odd_even_mergesort(n)
    }
    fn name(&self) -> &'static str {
        "odd-even"
    }
}

/// Brickwall (odd-even transposition) builder: n alternating levels of
/// adjacent comparators. Depth n after empty levels are dropped (n=2 → 1).
#[derive(Debug, Clone, Copy, Default)]
pub struct Brickwall;

impl NetworkProvider for Brickwall {
    fn build(&self, n: usize) -> Result<ComparisonNetwork, NetworkError> {
        build_brickwall(n)
    }
    fn name(&self) -> &'static str {
        "brickwall"
    }
}

/// Builds the odd-even mergesort network on `n` registers.
///
/// The classical power-of-two construction is generated for the next power of
/// two, then restricted to the first `n` wires by deleting every comparator
/// touching a virtual register: virtual wires conceptually hold +∞ sentinels,
/// which never move under min/max, so the restriction sorts all `n`-register
/// inputs. Levels left empty by the restriction are dropped.
pub fn build_odd_even_mergesort(n: usize) -> Result<ComparisonNetwork, NetworkError> {
    if n == 0 {
        return Err(NetworkError::Empty);
    }
    if n == 1 {
        return ComparisonNetwork::new(1, vec![]);
    }
    let mut np2 = 1usize;
    while np2 < n {
        np2 <<= 1;
    }
    let mut levels: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut p = 1;
    while p < np2 {
        let mut k = p;
        while k >= 1 {
            let mut level = Vec::new();
            let mut j = k % p;
            while j + k < np2 {
                for i in 0..k.min(np2 - j - k) {
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        let (a, b) = (i + j, i + j + k);
                        if b < n {
                            level.push((a, b));
                        }
                    }
                }
                j += 2 * k;
            }
            if !level.is_empty() {
                levels.push(level);
            }
            k /= 2;
        }
        p *= 2;
    }
    ComparisonNetwork::new(n, levels)
}

/// Builds the brickwall network on `n` registers: level `i` (0-indexed)
/// compares `(j, j+1)` for all `j ≡ i (mod 2)`, for `n` levels, dropping
/// levels that end up empty.
pub fn build_brickwall(n: usize) -> Result<ComparisonNetwork, NetworkError> {
    if n == 0 {
        return Err(NetworkError::Empty);
    }
    let mut levels = Vec::new();
    for i in 0..n {
        let mut level = Vec::new();
        let mut j = i % 2;
        while j + 1 < n {
            level.push((j, j + 1));
            j += 2;
        }
        if !level.is_empty() {
            levels.push(level);
        }
    }
    ComparisonNetwork::new(n, levels)
}

/// The depth-4 four-register reference network used in examples: the
/// brickwall on 4 registers. Its first three levels pin value 1 to the first
/// register and value 4 to the last; the final level sorts the middle pair.
pub fn reference_four_register() -> ComparisonNetwork {
    build_brickwall(4).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_depths_match_contract() {
        assert_eq!(build_odd_even_mergesort(2).unwrap().depth(), 1);
        assert_eq!(build_odd_even_mergesort(4).unwrap().depth(), 3);
        assert_eq!(build_odd_even_mergesort(8).unwrap().depth(), 6);
        assert_eq!(build_brickwall(2).unwrap().depth(), 1);
        assert_eq!(build_brickwall(4).unwrap().depth(), 4);
        assert_eq!(build_brickwall(6).unwrap().depth(), 6);
    }

    #[test]
    fn odd_even_four_exact_levels() {
        let net = build_odd_even_mergesort(4).unwrap();
        assert_eq!(
            net.levels(),
            &[
                vec![(0, 1), (2, 3)],
                vec![(0, 2), (1, 3)],
                vec![(1, 2)]
            ]
        );
    }

    #[test]
    fn both_builders_sort_up_to_nine() {
        for n in 1..=9 {
            for net in [
                build_odd_even_mergesort(n).unwrap(),
                build_brickwall(n).unwrap(),
            ] {
                assert!(
                    is_sorting_network(&net, VerifyMode::ZeroOne).unwrap(),
                    "n = {n}"
                );
            }
        }
    }

    #[test]
    fn modes_agree_on_small_networks() {
        for n in 2..=6 {
            let good = build_odd_even_mergesort(n).unwrap();
            let bad = good.without_last_level();
            for net in [good, bad] {
                let zo = is_sorting_network(&net, VerifyMode::ZeroOne).unwrap();
                let ex = is_sorting_network(&net, VerifyMode::Exhaustive).unwrap();
                assert_eq!(zo, ex, "n = {n}");
            }
        }
    }

    #[test]
    fn identity_through_any_network_no_swaps() {
        let net = build_brickwall(6).unwrap();
        let (out, trace) = apply_network(&net, &Assignment::identity(6)).unwrap();
        assert!(out.is_sorted());
        assert!(trace.iter().all(|l| l.iter().all(|&s| !s)));
    }

    #[test]
    fn single_comparator_swap() {
        let net = ComparisonNetwork::new(2, vec![vec![(0, 1)]]).unwrap();
        let (out, trace) = apply_network(&net, &Assignment::new(vec![2, 1]).unwrap()).unwrap();
        assert!(out.is_sorted());
        assert_eq!(trace, vec![vec![true]]);
    }

    #[test]
    fn reference_network_caption_properties() {
        let net = reference_four_register();
        assert_eq!(net.depth(), 4);
        assert!(is_sorting_network(&net, VerifyMode::Exhaustive).unwrap());
        // After the first three levels, value 1 sits at register 0 and value
        // 4 at register 3, for every input permutation.
        let prefix = net.without_last_level();
        let mut perm = vec![1usize, 2, 3, 4];
        loop {
            let (out, _) =
                apply_network(&prefix, &Assignment::new(perm.clone()).unwrap()).unwrap();
            assert_eq!(out.value_at(0), 1);
            assert_eq!(out.value_at(3), 4);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        // And the prefix alone does not sort.
        assert!(!is_sorting_network(&prefix, VerifyMode::Exhaustive).unwrap());
    }

    #[test]
    fn assignment_rejects_non_bijection() {
        assert!(Assignment::new(vec![1, 1, 3]).is_err());
        assert!(Assignment::new(vec![0, 1]).is_err());
        assert!(Assignment::new(vec![1, 3]).is_err());
    }

    #[test]
    fn level_rejects_duplicate_register() {
        let err = ComparisonNetwork::new(3, vec![vec![(0, 1), (1, 2)]]).unwrap_err();
        assert_eq!(
            err,
            NetworkError::DuplicateIndexInLevel { level: 0, index: 1 }
        );
    }

    #[test]
    fn json_roundtrip() {
        let net = build_odd_even_mergesort(5).unwrap();
        let s = net.to_json_value().to_string();
        let back = ComparisonNetwork::from_json_str(&s).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn traces_deterministic() {
        let net = build_odd_even_mergesort(8).unwrap();
        let rho = Assignment::new(vec![5, 3, 8, 1, 7, 2, 6, 4]).unwrap();
        let (o1, t1) = apply_network(&net, &rho).unwrap();
        let (o2, t2) = apply_network(&net, &rho).unwrap();
        assert!(o1.is_sorted());
        assert_eq!(o1, o2);
        assert_eq!(t1, t2);
    }
}
