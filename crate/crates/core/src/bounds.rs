//! Closed-form lower bounds and the bounded-difference tail estimates behind them.
//!
//! All tail computations are plain `f64`; `exp` of a large negative argument
//! underflows to exactly zero, which is the intended semantics.

use thiserror::Error;

use crate::finite_field::prime_power;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("need r >= 3 colors (got {0})")]
    TooFewColors(usize),
    #[error("r - 2 = {0} is not a prime power")]
    NotPrimePower(usize),
    #[error("path power exponent k must be at least 1")]
    ZeroPower,
    #[error("deviation threshold must be non-negative (got {0})")]
    NegativeGamma(f64),
    #[error("bounded-difference constants must be non-empty and non-negative")]
    BadDifferences,
    #[error("parameter {name} = {value} outside its domain")]
    Domain { name: &'static str, value: f64 },
}

/// Where a color count falls relative to the affine-plane construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorRange {
    /// r - 2 = q is a prime power >= 2; the plane of order q exists.
    Constructive { q: usize },
    /// r = 3: q = 1 gives no plane. The closed-form bound is still evaluated.
    Degenerate,
}

pub fn classify_colors(r: usize) -> Result<ColorRange, BoundsError> {
    match r {
        0..=2 => Err(BoundsError::TooFewColors(r)),
        3 => Ok(ColorRange::Degenerate),
        _ => {
            let q = r - 2;
            prime_power(q as u64)
                .map(|_| ColorRange::Constructive { q })
                .ok_or(BoundsError::NotPrimePower(q))
        }
    }
}

/// Bounded-difference tail bound `exp(-2 γ² / Σ a_i²)`.
pub fn mcdiarmid(gamma: f64, a: &[f64]) -> Result<f64, BoundsError> {
    if a.is_empty() || a.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(BoundsError::BadDifferences);
    }
    let sum_sq: f64 = a.iter().map(|x| x * x).sum();
    tail_from_sum_sq(gamma, sum_sq)
}

/// Same bound with the sum of squared differences already formed.
pub fn tail_from_sum_sq(gamma: f64, sum_sq: f64) -> Result<f64, BoundsError> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(BoundsError::NegativeGamma(gamma));
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    if sum_sq == 0.0 {
        // a deterministic function never deviates
        return Ok(0.0);
    }
    Ok((-2.0 * gamma * gamma / sum_sq).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub gamma: f64,
    pub sum_sq: f64,
    pub bound: f64,
    /// `(q² + q) · bound`, the union over all lines.
    pub union: f64,
}

impl TailBound {
    /// Tail bound for one line count: γ = C√n/(r−2)², one variable per partitioned
    /// vertex with difference r²d/(1−β).
    pub fn for_line_counts(
        r: usize,
        n: usize,
        d: f64,
        beta: f64,
        c: f64,
        variables: usize,
    ) -> Result<Self, BoundsError> {
        let q = constructive_q(r)?;
        check_positive("d", d)?;
        check_unit("beta", beta)?;
        if c.is_nan() || c < 0.0 {
            return Err(BoundsError::Domain {
                name: "C",
                value: c,
            });
        }
        let gamma = deviation_threshold(r, n, c);
        let a = difference_constant(r, d, beta);
        let sum_sq = variables as f64 * a * a;
        let bound = tail_from_sum_sq(gamma, sum_sq)?;
        Ok(TailBound {
            gamma,
            sum_sq,
            bound,
            union: ((q * q + q) as f64 * bound),
        })
    }
}

fn constructive_q(r: usize) -> Result<usize, BoundsError> {
    match classify_colors(r)? {
        ColorRange::Constructive { q } => Ok(q),
        ColorRange::Degenerate => Err(BoundsError::NotPrimePower(1)),
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::Domain { name, value })
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Domain { name, value })
    }
}

/// γ = C√n/(r−2)².
pub fn deviation_threshold(r: usize, n: usize, c: f64) -> f64 {
    let q = (r - 2) as f64;
    c * (n as f64).sqrt() / (q * q)
}

/// Largest change in any line count when one vertex moves between parts: r²d/(1−β).
pub fn difference_constant(r: usize, d: f64, beta: f64) -> f64 {
    (r * r) as f64 * d / (1.0 - beta)
}

/// `1 − (q²+q)·bound`; positive means the good event has positive probability.
pub fn union_margin(q: usize, tail: &TailBound) -> f64 {
    1.0 - (q * q + q) as f64 * tail.bound
}

/// The tail estimate in the form exp{−2C²(1−β)²/(r⁸d²β)}, reported next to the
/// direct bounded-difference evaluation for comparison.
pub fn displayed_tail(r: usize, d: f64, beta: f64, c: f64) -> f64 {
    let r8 = (r as f64).powi(8);
    (-2.0 * c * c * (1.0 - beta).powi(2) / (r8 * d * d * beta)).exp()
}

/// Smallest C whose union margin reaches `target` (use 0 for "positive").
pub fn minimal_constant(
    r: usize,
    n: usize,
    d: f64,
    beta: f64,
    variables: usize,
    target: f64,
) -> Result<f64, BoundsError> {
    let q = constructive_q(r)?;
    check_positive("d", d)?;
    check_unit("beta", beta)?;
    if !(0.0..1.0).contains(&target) {
        return Err(BoundsError::Domain {
            name: "target margin",
            value: target,
        });
    }
    if n == 0 {
        return Err(BoundsError::Domain {
            name: "n",
            value: 0.0,
        });
    }
    let lines = (q * q + q) as f64;
    let a = difference_constant(r, d, beta);
    let sum_sq = variables as f64 * a * a;
    // lines · exp(−2γ²/S) = 1 − target
    let gamma = (sum_sq * (lines / (1.0 - target)).ln() / 2.0).sqrt();
    let qf = q as f64;
    Ok(gamma * qf * qf / (n as f64).sqrt())
}

/// (nd/2)(r−2)² − C√n.
pub fn lower_bound_general(r: usize, n: f64, d: f64, c: f64) -> Result<f64, BoundsError> {
    classify_colors(r)?;
    check_positive("n", n)?;
    check_positive("d", d)?;
    let q = (r - 2) as f64;
    Ok(n * d / 2.0 * q * q - c * n.sqrt())
}

/// k·n(r−2)² − ((k²+k)/2)(r−2)² − C√n.
pub fn lower_bound_path_power(r: usize, n: f64, k: usize, c: f64) -> Result<f64, BoundsError> {
    classify_colors(r)?;
    if k == 0 {
        return Err(BoundsError::ZeroPower);
    }
    check_positive("n", n)?;
    let q2 = ((r - 2) * (r - 2)) as f64;
    let k = k as f64;
    Ok(k * n * q2 - (k * k + k) / 2.0 * q2 - c * n.sqrt())
}

/// Average degree of the k-th path power on n vertices: (2nk − k² − k)/n.
pub fn path_power_average_degree(n: f64, k: usize) -> f64 {
    let k = k as f64;
    (2.0 * n * k - k * k - k) / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mcdiarmid_examples() {
        assert_eq!(mcdiarmid(0.0, &[1.0, 2.0]).unwrap(), 1.0);
        let n = 400;
        let ones = vec![1.0; n];
        let v = mcdiarmid((n as f64).sqrt(), &ones).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-12);
        assert!((v - 0.13534).abs() < 1e-5);
        let a = [0.5, 1.5, 3.0];
        let doubled: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        let lhs = mcdiarmid(1.7, &a).unwrap();
        let rhs = mcdiarmid(3.4, &doubled).unwrap();
        assert!((lhs - rhs).abs() < 1e-15);
        assert_eq!(mcdiarmid(1.0, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(mcdiarmid(-1.0, &[1.0]).is_err());
        assert!(mcdiarmid(1.0, &[]).is_err());
        assert_eq!(mcdiarmid(1e6, &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn mcdiarmid_monotone_on_grid() {
        let a = [1.0, 2.0, 0.5];
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let v = mcdiarmid(i as f64 * 0.1, &a).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        for i in 0..3 {
            let mut prev = 0.0;
            for step in 0..30 {
                let mut b = a;
                b[i] = step as f64 * 0.2;
                let v = mcdiarmid(1.0, &b).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn color_ranges() {
        assert_eq!(classify_colors(2), Err(BoundsError::TooFewColors(2)));
        assert_eq!(classify_colors(3), Ok(ColorRange::Degenerate));
        assert_eq!(classify_colors(4), Ok(ColorRange::Constructive { q: 2 }));
        assert_eq!(classify_colors(8), Err(BoundsError::NotPrimePower(6)));
        assert_eq!(classify_colors(11), Ok(ColorRange::Constructive { q: 9 }));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_general(4, 1e4, 2.0, 0.0).unwrap(), 4e4);
        for n in [1e2, 1e4, 1e8] {
            let v = lower_bound_general(4, n, 2.0, 7.0).unwrap() / n;
            assert!(v < 4.0 && v > 4.0 - 7.0 / n.sqrt() - 1e-12);
        }
        for n in [5.0, 17.0, 1000.0] {
            assert_eq!(lower_bound_path_power(4, n, 1, 0.0).unwrap(), 4.0 * n - 4.0);
        }
        assert_eq!(
            lower_bound_path_power(4, 10.0, 0, 0.0),
            Err(BoundsError::ZeroPower)
        );
        assert!(lower_bound_general(8, 10.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn path_power_matches_general_bound() {
        for r in [3usize, 4, 5, 6, 7, 9, 11] {
            for n in [10.0, 100.0, 1234.0, 1e6] {
                for k in 1..6 {
                    for c in [0.0, 1.0, 17.5] {
                        let d = path_power_average_degree(n, k);
                        let a = lower_bound_general(r, n, d, c).unwrap();
                        let b = lower_bound_path_power(r, n, k, c).unwrap();
                        assert!(
                            (a - b).abs() <= 1e-9 * a.abs().max(1.0),
                            "r={r} n={n} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn union_margin_examples() {
        let tail = |bound: f64| TailBound {
            gamma: 1.0,
            sum_sq: 1.0,
            bound,
            union: 0.0,
        };
        assert_eq!(union_margin(3, &tail(0.0)), 1.0);
        assert!((union_margin(3, &tail(0.01)) - 0.88).abs() < 1e-12);
        assert!(union_margin(3, &tail(1.0 / 12.0)) <= 1e-15);
        assert!(union_margin(3, &tail(0.5)) < 0.0);
    }

    #[test]
    fn minimal_constant_hits_target() {
        for target in [0.0, 0.5, 0.9] {
            let c = minimal_constant(4, 10_000, 2.0, 0.5, 10_000, target).unwrap();
            let tail = TailBound::for_line_counts(4, 10_000, 2.0, 0.5, c, 10_000).unwrap();
            assert!((union_margin(2, &tail) - target).abs() < 1e-9);
            let below = TailBound::for_line_counts(4, 10_000, 2.0, 0.5, c * 0.99, 10_000).unwrap();
            assert!(union_margin(2, &below) < target);
        }
    }

    #[test]
    fn tail_bound_invariants() {
        let t = TailBound::for_line_counts(5, 1000, 3.0, 0.3, 50.0, 900).unwrap();
        assert!(t.bound > 0.0 && t.bound <= 1.0);
        assert!(t.union >= t.bound);
        assert!(TailBound::for_line_counts(3, 1000, 3.0, 0.3, 50.0, 900).is_err());
        assert!(TailBound::for_line_counts(4, 1000, 3.0, 1.0, 50.0, 900).is_err());
        assert!(displayed_tail(4, 2.0, 0.5, 100.0) > 0.0);
    }
}
