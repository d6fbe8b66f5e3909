//! Exact arithmetic in GF(p^k).
//!
//! Elements are dense coefficient vectors over GF(p), reduced modulo a monic
//! irreducible polynomial of degree k. The modulus is the lowest monic
//! irreducible when its lower coefficients are read as a base-p integer with
//! the constant term as the least significant digit, so every construction is
//! reproducible.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted (desk-scale cap).
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the cap of {MAX_FIELD_ORDER}")]
    TooLarge { p: u64, k: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("operands belong to different fields")]
    MismatchedFields,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element index {index} out of range for a field of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Defining data of GF(p^k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    /// Monic modulus, coefficients from the constant term upwards (length k+1).
    modulus: Vec<u32>,
}

impl FieldSpec {
    /// Builds GF(p^k) with the deterministic modulus choice.
    pub fn new(p: u64, k: u32) -> Result<Arc<Self>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k < 1 {
            return Err(FieldError::ZeroDegree);
        }
        let too_large = FieldError::TooLarge { p, k };
        let q = p.checked_pow(k).ok_or(too_large.clone())?;
        if q > MAX_FIELD_ORDER {
            return Err(too_large);
        }
        let p = p as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            lowest_irreducible(p, k as usize)
        };
        Ok(Arc::new(FieldSpec { p, k, modulus }))
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Arc<Self>, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.k)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
}

/// Polynomials over GF(p) as coefficient vectors, constant term first.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn inv_mod_p(a: u32, p: u32) -> u32 {
        // p is prime and small, so Fermat is plenty.
        let mut result = 1u64;
        let mut base = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        result as u32
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let mut out: Vec<u32> = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a / b`; `b` must be nonzero.
    pub fn divmod(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let db = degree(b).expect("division by the zero polynomial");
        let lead_inv = inv_mod_p(b[db], p);
        let mut rem: Vec<u32> = a.to_vec();
        trim(&mut rem);
        let mut quot = vec![0u32; rem.len().saturating_sub(db).max(1)];
        while let Some(dr) = degree(&rem) {
            if dr < db {
                break;
            }
            let factor = (rem[dr] as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = dr - db;
            quot[shift] = factor;
            for (i, &c) in b.iter().enumerate().take(db + 1) {
                let sub = (c as u64 * factor as u64 % p as u64) as u32;
                rem[i + shift] = (rem[i + shift] + p - sub) % p;
            }
            trim(&mut rem);
        }
        trim(&mut quot);
        (quot, rem)
    }
}

/// Monic polynomial of degree `deg` whose lower coefficients spell `index` in base p.
fn monic_from_index(mut index: usize, deg: usize, p: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(deg + 1);
    for _ in 0..deg {
        coeffs.push((index % p as usize) as u32);
        index /= p as usize;
    }
    coeffs.push(1);
    coeffs
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let Some(deg) = poly::degree(f) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, d, p);
            let (_, r) = poly::divmod(f, &g, p);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

fn lowest_irreducible(p: u32, k: usize) -> Vec<u32> {
    let count = (p as usize).pow(k as u32);
    (0..count)
        .map(|idx| monic_from_index(idx, k, p))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// An element of GF(p^k).
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    spec: Arc<FieldSpec>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}){:?}", self.spec.p, self.spec.k, self.coeffs)
    }
}

impl FieldElement {
    /// Element whose coefficients spell `index` in base p (constant term least significant).
    pub fn from_index(spec: &Arc<FieldSpec>, index: usize) -> Result<Self, FieldError> {
        let order = spec.order();
        if index >= order {
            return Err(FieldError::IndexOutOfRange { index, order });
        }
        let mut coeffs = monic_from_index(index, spec.k as usize, spec.p);
        coeffs.pop();
        Ok(FieldElement {
            coeffs,
            spec: Arc::clone(spec),
        })
    }

    /// Reduces arbitrary residues into a field element.
    pub fn from_coeffs(spec: &Arc<FieldSpec>, coeffs: &[u32]) -> Self {
        let mut c: Vec<u32> = coeffs.iter().map(|&x| x % spec.p).collect();
        poly::trim(&mut c);
        let (_, mut rem) = poly::divmod(&c, &spec.modulus, spec.p);
        rem.resize(spec.k as usize, 0);
        FieldElement {
            coeffs: rem,
            spec: Arc::clone(spec),
        }
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        FieldElement {
            coeffs: vec![0; spec.k as usize],
            spec: Arc::clone(spec),
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        let mut coeffs = vec![0; spec.k as usize];
        coeffs[0] = 1;
        FieldElement {
            coeffs,
            spec: Arc::clone(spec),
        }
    }

    /// All q elements in index order.
    pub fn enumerate(spec: &Arc<FieldSpec>) -> Vec<Self> {
        (0..spec.order())
            .map(|i| Self::from_index(spec, i).expect("index below order"))
            .collect()
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// Position of this element in the deterministic enumeration.
    pub fn index(&self) -> usize {
        self.coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.spec.p as usize + c as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(FieldError::MismatchedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let p = self.spec.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            coeffs,
            spec: Arc::clone(&self.spec),
        })
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p;
        FieldElement {
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
            spec: Arc::clone(&self.spec),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_same(other)?;
        let product = poly::mul(&self.coeffs, &other.coeffs, self.spec.p);
        Ok(Self::from_coeffs(&self.spec, &product))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm on polynomials.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.spec.p;
        let mut a = self.coeffs.clone();
        poly::trim(&mut a);
        // Invariant: s_i * self ≡ r_i (mod modulus).
        let (mut r0, mut r1) = (self.spec.modulus.clone(), a);
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while poly::degree(&r1).is_some() {
            let (quot, rem) = poly::divmod(&r0, &r1, p);
            let s2 = poly::sub(&s0, &poly::mul(&quot, &s1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible.
        let scale = poly::inv_mod_p(r0[0], p);
        let scaled: Vec<u32> = s0
            .iter()
            .map(|&c| (c as u64 * scale as u64 % p as u64) as u32)
            .collect();
        Ok(Self::from_coeffs(&self.spec, &scaled))
    }
}
