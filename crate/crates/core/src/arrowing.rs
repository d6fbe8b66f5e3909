//! Subset-pair expansion checks on balanced bipartite graphs, and a brute-force
//! arrowing oracle for tiny graphs.

use std::collections::HashSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphs::{HostGraph, Vertex};

/// Largest number of (S, T) pairs the exhaustive mode will walk.
pub const MAX_EXHAUSTIVE_PAIRS: f64 = 1e8;
/// Largest number of colorings the arrowing oracle will enumerate.
pub const MAX_COLORINGS: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrowError {
    #[error("graph has no bipartition")]
    NotBipartite,
    #[error("bipartition {0}+{1} is not balanced")]
    Unbalanced(usize, usize),
    #[error("subset size {s} outside 1..={side}")]
    BadSubsetSize { s: usize, side: usize },
    #[error("exhaustive search over {0:.3e} pairs exceeds the cap")]
    Blowup(f64),
    #[error("need at least one color")]
    NoColors,
    #[error("oracle supports at most 64 vertices (got {0})")]
    TooManyVertices(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionSpec {
    pub s: usize,
    pub mode: ExpansionMode,
}

/// Subset size ⌊n(2c + 1 − 2^r)/2^{r+1}⌋ for a bipartite graph with cn vertices per side.
/// For r = 3 this is ⌊n(2c − 7)/16⌋.
pub fn subset_size(r: u32, c: f64, n: usize) -> usize {
    let two_r = 2f64.powi(r as i32);
    let size = n as f64 * (2.0 * c + 1.0 - two_r) / (2.0 * two_r);
    if size <= 0.0 {
        0
    } else {
        size.floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Exhaustive: every pair of s-sets is joined by an edge.
    Pass,
    /// Sampled: no violating pair among the samples (one-sided).
    NoViolationFound { samples: usize },
    /// A pair of s-sets with no edge between them (left and right vertex ids).
    Fail {
        s_set: Vec<Vertex>,
        t_set: Vec<Vertex>,
    },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn to_text(&self) -> String {
        match self {
            Verdict::Pass => "verdict PASS\n".to_string(),
            Verdict::NoViolationFound { samples } => {
                format!("verdict NO_VIOLATION_FOUND\nsamples {samples}\n")
            }
            Verdict::Fail { s_set, t_set } => {
                let join = |v: &[Vertex]| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                format!("verdict FAIL\nS {}\nT {}\n", join(s_set), join(t_set))
            }
        }
    }
}

/// C(n, k) as a float (for blowup estimates).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn balanced_side(g: &HostGraph) -> Result<usize, ArrowError> {
    let (l, r) = g.bipartition().ok_or(ArrowError::NotBipartite)?;
    if l != r {
        return Err(ArrowError::Unbalanced(l, r));
    }
    Ok(l)
}

fn check_exhaustive(side: usize, s: usize) -> Result<(), ArrowError> {
    if s == 0 || s > side {
        return Err(ArrowError::BadSubsetSize { s, side });
    }
    let pairs = binomial_f64(side, s).powi(2);
    if pairs > MAX_EXHAUSTIVE_PAIRS {
        return Err(ArrowError::Blowup(pairs));
    }
    Ok(())
}

/// Lexicographic k-combinations of `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            done: k > n,
        }
    }

    fn advance(&mut self) {
        let k = self.idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

/// Walks every left s-set with the right vertices it has no edge to.
fn for_each_left_set(
    g: &HostGraph,
    side: usize,
    s: usize,
    mut visit: impl FnMut(&[usize], &[Vertex]) -> bool,
) {
    let mut stamp = vec![0usize; side];
    let mut round = 0;
    let mut combos = Combinations::new(side, s);
    while !combos.done {
        round += 1;
        for &u in &combos.idx {
            for &w in g.neighbors(u) {
                stamp[w - side] = round;
            }
        }
        let free: Vec<Vertex> = (0..side)
            .filter(|&w| stamp[w] != round)
            .map(|w| w + side)
            .collect();
        if !visit(&combos.idx, &free) {
            return;
        }
        combos.advance();
    }
}

/// Exact number of pairs (S, T), |S| = |T| = s, with no edge between them.
pub fn count_zero_pairs(g: &HostGraph, s: usize) -> Result<u128, ArrowError> {
    let side = balanced_side(g)?;
    check_exhaustive(side, s)?;
    let mut total = 0u128;
    for_each_left_set(g, side, s, |_, free| {
        total += binomial_u128(free.len(), s);
        true
    });
    Ok(total)
}

pub fn check_expansion(g: &HostGraph, spec: &ExpansionSpec) -> Result<Verdict, ArrowError> {
    let side = balanced_side(g)?;
    let s = spec.s;
    match spec.mode {
        ExpansionMode::Exhaustive => {
            check_exhaustive(side, s)?;
            let mut witness = None;
            for_each_left_set(g, side, s, |set, free| {
                if free.len() >= s {
                    witness = Some((set.to_vec(), free[..s].to_vec()));
                    false
                } else {
                    true
                }
            });
            Ok(match witness {
                Some((s_set, t_set)) => Verdict::Fail { s_set, t_set },
                None => Verdict::Pass,
            })
        }
        ExpansionMode::Sampled { samples, seed } => {
            if s == 0 || s > side {
                return Err(ArrowError::BadSubsetSize { s, side });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut in_t = vec![0usize; side];
            for round in 1..=samples {
                let s_set = index::sample(&mut rng, side, s).into_vec();
                let t_set = index::sample(&mut rng, side, s).into_vec();
                for &w in &t_set {
                    in_t[w] = round;
                }
                let touches = s_set
                    .iter()
                    .any(|&u| g.neighbors(u).iter().any(|&w| in_t[w - side] == round));
                if !touches {
                    let mut s_set = s_set;
                    let mut t_set: Vec<Vertex> = t_set.into_iter().map(|w| w + side).collect();
                    s_set.sort_unstable();
                    t_set.sort_unstable();
                    return Ok(Verdict::Fail { s_set, t_set });
                }
            }
            Ok(Verdict::NoViolationFound { samples })
        }
    }
}

/// True iff every coloring of the edges of `g` with `colors` colors has a
/// monochromatic path on `path_vertices` vertices.
pub fn arrow_bruteforce(
    g: &HostGraph,
    path_vertices: usize,
    colors: usize,
) -> Result<bool, ArrowError> {
    if colors == 0 {
        return Err(ArrowError::NoColors);
    }
    let n = g.n_vertices();
    if n > 64 {
        return Err(ArrowError::TooManyVertices(n));
    }
    let m = g.n_edges();
    let total = (colors as f64).powi(m as i32);
    if total > MAX_COLORINGS {
        return Err(ArrowError::Blowup(total));
    }
    if path_vertices <= 1 {
        return Ok(n >= 1);
    }
    if m == 0 {
        return Ok(false);
    }
    // Color permutations preserve the property, so edge 0 keeps color 0.
    let mut assignment = vec![0usize; m];
    loop {
        if !(0..colors).any(|c| has_path(g, &assignment, c, path_vertices)) {
            return Ok(false);
        }
        // increment the counter over edges 1..m
        let mut i = 1;
        while i < m {
            assignment[i] += 1;
            if assignment[i] < colors {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i >= m {
            return Ok(true);
        }
    }
}

/// Depth-first search over simple paths in one color class, skipping visited (set, end) states.
fn has_path(g: &HostGraph, assignment: &[usize], color: usize, k: usize) -> bool {
    let n = g.n_vertices();
    let mut adj = vec![0u64; n];
    for (&(u, v), &c) in g.edges().iter().zip(assignment) {
        if c == color {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
    }
    let mut seen: HashSet<(u64, usize)> = HashSet::new();
    fn dfs(
        adj: &[u64],
        mask: u64,
        end: usize,
        len: usize,
        k: usize,
        seen: &mut HashSet<(u64, usize)>,
    ) -> bool {
        if len == k {
            return true;
        }
        if !seen.insert((mask, end)) {
            return false;
        }
        let mut next = adj[end] & !mask;
        while next != 0 {
            let w = next.trailing_zeros() as usize;
            next &= next - 1;
            if dfs(adj, mask | (1 << w), w, len + 1, k, seen) {
                return true;
            }
        }
        false
    }
    (0..n).any(|v| adj[v] != 0 && dfs(&adj, 1 << v, v, 1, k, &mut seen))
}
