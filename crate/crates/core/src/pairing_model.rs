//! Bipartite pairing (configuration) model for random d-regular bipartite graphs.
//!
//! Each side has `side_size` boxes of `degree` points. Left point `i` belongs to
//! left box `i / degree`; a pairing is a uniformly random bijection from left
//! points to right points. Projected vertices are `0..side_size` on the left and
//! `side_size..2·side_size` on the right.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphs::HostGraph;

/// Cap on the number of points per side.
pub const MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("side size and degree must both be at least 1")]
    Empty,
    #[error("{side_size} boxes of {degree} points exceed the cap of {MAX_POINTS} points")]
    TooLarge { side_size: usize, degree: usize },
    #[error("no simple graph after {0} attempts")]
    Exhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub side_size: usize,
    pub degree: usize,
    /// `matching[i]` is the right point paired with left point `i`.
    pub matching: Vec<u32>,
    pub seed: u64,
}

fn check_size(side_size: usize, degree: usize) -> Result<usize, PairingError> {
    if side_size == 0 || degree == 0 {
        return Err(PairingError::Empty);
    }
    side_size
        .checked_mul(degree)
        .filter(|&p| p <= MAX_POINTS)
        .ok_or(PairingError::TooLarge { side_size, degree })
}

fn draw(points: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut matching: Vec<u32> = (0..points as u32).collect();
    matching.shuffle(rng);
    matching
}

/// Uniform random pairing (Fisher–Yates on the right points).
pub fn sample_pairing(side_size: usize, degree: usize, seed: u64) -> Result<Pairing, PairingError> {
    let points = check_size(side_size, degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Pairing {
        side_size,
        degree,
        matching: draw(points, &mut rng),
        seed,
    })
}

/// Multigraph obtained by collapsing points into boxes.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Edge multiplicities keyed by `(left box, right box)`, right box index in `0..side_size`.
    pub multiplicities: BTreeMap<(usize, usize), usize>,
    /// Number of distinct edges having each multiplicity.
    pub histogram: BTreeMap<usize, usize>,
    /// The simple graph, present only when no edge is repeated.
    pub simple: Option<HostGraph>,
}

impl Projection {
    pub fn is_simple(&self) -> bool {
        self.simple.is_some()
    }

    /// Degrees counted with multiplicity: `(left, right)`.
    pub fn degrees(&self, side_size: usize) -> (Vec<usize>, Vec<usize>) {
        let mut left = vec![0; side_size];
        let mut right = vec![0; side_size];
        for (&(u, v), &m) in &self.multiplicities {
            left[u] += m;
            right[v] += m;
        }
        (left, right)
    }

    /// Underlying simple graph (multi-edges merged), with bipartition.
    pub fn support(&self, side_size: usize) -> HostGraph {
        let edges = self.multiplicities.keys().map(|&(u, v)| (u, side_size + v));
        HostGraph::from_edges(2 * side_size, edges)
            .and_then(|g| g.with_bipartition(side_size, side_size))
            .expect("bipartite edges")
    }
}

impl Pairing {
    /// Whether every box pair is hit at most once; cheaper than a full projection.
    pub fn is_simple(&self) -> bool {
        let d = self.degree;
        let mut seen = vec![usize::MAX; self.side_size];
        for (left_box, chunk) in self.matching.chunks(d).enumerate() {
            for &pt in chunk {
                let right_box = pt as usize / d;
                if seen[right_box] == left_box {
                    return false;
                }
                seen[right_box] = left_box;
            }
        }
        true
    }

    pub fn project(&self) -> Projection {
        let d = self.degree;
        let mut multiplicities = BTreeMap::new();
        for (i, &pt) in self.matching.iter().enumerate() {
            *multiplicities.entry((i / d, pt as usize / d)).or_insert(0) += 1;
        }
        let mut histogram = BTreeMap::new();
        for &m in multiplicities.values() {
            *histogram.entry(m).or_insert(0) += 1;
        }
        let simple = (histogram.keys().all(|&m| m == 1)).then(|| {
            let s = self.side_size;
            HostGraph::from_edges(2 * s, multiplicities.keys().map(|&(u, v)| (u, s + v)))
                .and_then(|g| g.with_bipartition(s, s))
                .expect("bipartite edges")
        });
        Projection {
            multiplicities,
            histogram,
            simple,
        }
    }
}

/// Asymptotic probability that a bipartite pairing projects to a simple graph: e^{−(d−1)²/2}.
pub fn simplicity_probability(degree: usize) -> f64 {
    let m = degree as f64 - 1.0;
    (-m * m / 2.0).exp()
}

/// A simple sample together with the number of pairings drawn to get it.
#[derive(Debug, Clone)]
pub struct SimpleSample {
    pub graph: HostGraph,
    pub attempts: usize,
}

/// Rejection sampling: draws pairings from one seeded stream until the projection is simple.
pub fn sample_simple(
    side_size: usize,
    degree: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<SimpleSample, PairingError> {
    let points = check_size(side_size, degree)?;
    let expected = 1.0 / simplicity_probability(degree);
    if (max_attempts as f64) < 10.0 * expected {
        log::warn!("{max_attempts} attempts is small against an expected {expected:.3e} draws per simple graph");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let pairing = Pairing {
            side_size,
            degree,
            matching: draw(points, &mut rng),
            seed,
        };
        if pairing.is_simple() {
            let graph = pairing.project().simple.expect("checked simple");
            return Ok(SimpleSample {
                graph,
                attempts: attempt,
            });
        }
    }
    Err(PairingError::Exhausted(max_attempts))
}
