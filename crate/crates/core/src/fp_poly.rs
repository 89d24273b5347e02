//! Dense univariate polynomials over a prime field `F_p`.
//!
//! Coefficients are little-endian (`coeffs[i]` multiplies `x^i`) and the
//! representation is kept trimmed, so the zero polynomial has no coefficients.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, inv_mod, mul_mod};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u32,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl FpPoly {
    /// Builds a polynomial from little-endian coefficients, reducing them mod `p`.
    pub fn new(p: u32, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| (c % p as u64) as u32).collect();
        let mut poly = Self { p, coeffs };
        poly.trim();
        poly
    }

    pub fn zero(p: u32) -> Self {
        Self { p, coeffs: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Self { p, coeffs: vec![1] }
    }

    /// The monomial `x^d`.
    pub fn monomial(p: u32, d: usize) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = 1;
        Self { p, coeffs }
    }

    pub fn x(p: u32) -> Self {
        Self::monomial(p, 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p);
        self.scale(inv)
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p;
        Self::from_raw(p, self.coeffs.iter().map(|&a| mul_mod(a, c, p)).collect())
    }

    fn from_raw(p: u32, coeffs: Vec<u32>) -> Self {
        let mut poly = Self { p, coeffs };
        poly.trim();
        poly
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| arith::add_mod(self.coeff(i), other.coeff(i), p))
            .collect();
        Self::from_raw(p, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| arith::sub_mod(self.coeff(i), other.coeff(i), p))
            .collect();
        Self::from_raw(p, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Self::from_raw(self.p, acc.into_iter().map(|c| c as u32).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv_lead = inv_mod(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = mul_mod(rem[i], inv_lead, p);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &m) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = arith::sub_mod(rem[i - dd + j], mul_mod(c, m, p), p);
            }
        }
        rem.truncate(dd);
        (Self::from_raw(p, quot), Self::from_raw(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Inverse of `self` modulo `modulus`, if the two are coprime.
    pub fn inverse_mod(&self, modulus: &Self) -> Option<Self> {
        let p = self.p;
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = inv_mod(r0.leading(), p);
        Some(s0.scale(inv).rem(modulus))
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut base = self.rem(modulus);
        let mut acc = Self::one(self.p).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            e >>= 1;
        }
        acc
    }

    /// Evaluation at a point of `F_p`.
    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| arith::add_mod(mul_mod(acc, x, p), c, p))
    }

    /// Rabin's irreducibility test over `F_p`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else {
            return false;
        };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let f = self.make_monic();
        let p = self.p as u64;
        let x = Self::x(self.p);
        // frob[i] = x^{p^i} mod f
        let mut frob = Vec::with_capacity(d + 1);
        frob.push(x.rem(&f));
        for i in 1..=d {
            let next = frob[i - 1].pow_mod(p, &f);
            frob.push(next);
        }
        if frob[d] != x.rem(&f) {
            return false;
        }
        arith::prime_factors_small(d as u64).into_iter().all(|l| {
            let g = frob[d / l as usize].sub(&x).gcd(&f);
            g.degree() == Some(0)
        })
    }

    /// Polynomial whose coefficient vector is the base-`p` expansion of `index`.
    pub(crate) fn from_index(p: u32, mut index: u128, len: usize) -> Self {
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push((index % p as u128) as u32);
            index /= p as u128;
        }
        Self::from_raw(p, coeffs)
    }
}

/// Möbius function for small arguments.
fn mobius(mut n: u64) -> i64 {
    let mut result = 1i64;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`
/// (Gauss's formula `(1/d) Σ_{e|d} μ(e) q^{d/e}`). Saturates at `u128::MAX`.
pub fn count_monic_irreducibles(q: u64, d: usize) -> u128 {
    if d == 0 {
        return 0;
    }
    let mut total: i128 = 0;
    for e in 1..=d as u64 {
        if !(d as u64).is_multiple_of(e) {
            continue;
        }
        let mu = mobius(e);
        if mu == 0 {
            continue;
        }
        let Some(term) = (q as i128).checked_pow((d as u64 / e) as u32) else {
            return u128::MAX;
        };
        total += mu as i128 * term;
    }
    (total / d as i128) as u128
}

/// Supply of monic irreducibles of degree `1..=max_degree` over `F_q`.
pub fn irreducible_supply(q: u64, max_degree: usize) -> u128 {
    (1..=max_degree).fold(0u128, |acc, d| acc.saturating_add(count_monic_irreducibles(q, d)))
}

/// Exhaustive enumeration cutoff for the irreducible sampler.
const ENUMERATE_LIMIT: u128 = 1 << 18;

/// Draws `count` pairwise distinct monic irreducibles over `F_p` of degree at
/// most `max_degree`. Degree `max_degree` is drawn first and lower degrees
/// only fill any remaining shortfall, so the reported maximum degree stays as
/// small as the supply allows.
pub fn random_irreducibles(p: u32, count: usize, max_degree: usize, seed: u64) -> Result<Vec<FpPoly>> {
    arith::check_prime(p as u64)?;
    let available = irreducible_supply(p as u64, max_degree);
    if (count as u128) > available {
        return Err(Error::InsufficientSupply {
            requested: count,
            max_degree,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut degree = max_degree;
    while out.len() < count {
        let need = count - out.len();
        let supply = count_monic_irreducibles(p as u64, degree);
        let total = (p as u128).checked_pow(degree as u32).unwrap_or(u128::MAX);
        if total <= ENUMERATE_LIMIT || supply <= need as u128 {
            let mut pool: Vec<FpPoly> = (0..total)
                .map(|i| {
                    let mut poly = FpPoly::from_index(p, i, degree);
                    poly.coeffs.resize(degree + 1, 0);
                    poly.coeffs[degree] = 1;
                    poly
                })
                .filter(FpPoly::is_irreducible)
                .collect();
            pool.shuffle(&mut rng);
            out.extend(pool.into_iter().take(need));
        } else {
            let mut chosen = std::collections::BTreeSet::new();
            while chosen.len() < need {
                let mut coeffs: Vec<u64> = (0..degree).map(|_| rng.gen_range(0..p as u64)).collect();
                coeffs.push(1);
                let poly = FpPoly::new(p, coeffs);
                if poly.is_irreducible() {
                    chosen.insert(poly);
                }
            }
            let mut picked: Vec<FpPoly> = chosen.into_iter().collect();
            picked.shuffle(&mut rng);
            out.extend(picked);
        }
        if degree == 1 {
            break;
        }
        degree -= 1;
    }
    Ok(out)
}

/// Finds a monic irreducible of degree `d` over `F_p` by seeded random search.
pub fn find_irreducible(p: u32, d: usize, seed: u64) -> Result<FpPoly> {
    arith::check_prime(p as u64)?;
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if d == 1 {
        return Ok(FpPoly::x(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut coeffs: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p as u64)).collect();
        coeffs.push(1);
        let poly = FpPoly::new(p, coeffs);
        if poly.is_irreducible() {
            return Ok(poly);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible(poly: &FpPoly) -> bool {
        // trial division by every monic polynomial of degree 1..=deg/2
        let d = poly.degree().unwrap();
        let p = poly.characteristic();
        for e in 1..=d / 2 {
            for i in 0..(p as u128).pow(e as u32) {
                let mut g = FpPoly::from_index(p, i, e);
                g.coeffs.resize(e + 1, 0);
                g.coeffs[e] = 1;
                if poly.rem(&g).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_matches_trial_division() {
        for p in [2u32, 3, 5] {
            for d in 1..=6usize {
                let total = (p as u128).pow(d as u32);
                for i in 0..total.min(800) {
                    let mut f = FpPoly::from_index(p, i, d);
                    f.coeffs.resize(d + 1, 0);
                    f.coeffs[d] = 1;
                    assert_eq!(f.is_irreducible(), brute_irreducible(&f), "p={p} f={f}");
                }
            }
        }
    }

    #[test]
    fn gauss_counts_match_enumeration() {
        for p in [2u32, 3] {
            for d in 1..=6usize {
                let total = (p as u128).pow(d as u32);
                let enumerated = (0..total)
                    .filter(|&i| {
                        let mut f = FpPoly::from_index(p, i, d);
                        f.coeffs.resize(d + 1, 0);
                        f.coeffs[d] = 1;
                        f.is_irreducible()
                    })
                    .count() as u128;
                assert_eq!(count_monic_irreducibles(p as u64, d), enumerated);
            }
        }
    }

    #[test]
    fn binary_supply_up_to_degree_two_is_three() {
        // x, x+1, x^2+x+1
        assert_eq!(irreducible_supply(2, 2), 3);
        match random_irreducibles(2, 7, 2, 0) {
            Err(Error::InsufficientSupply { available, .. }) => assert_eq!(available, 3),
            other => panic!("expected supply error, got {other:?}"),
        }
    }

    #[test]
    fn sampler_single_binary_linear() {
        let got = random_irreducibles(2, 1, 1, 9).unwrap();
        assert_eq!(got.len(), 1);
        assert!(got[0] == FpPoly::new(2, [0, 1]) || got[0] == FpPoly::new(2, [1, 1]));
    }

    #[test]
    fn twenty_quadratics_over_f7() {
        let polys = random_irreducibles(7, 20, 2, 3).unwrap();
        let distinct: std::collections::BTreeSet<_> = polys.iter().cloned().collect();
        assert_eq!(distinct.len(), 20);
        for f in &polys {
            assert_eq!(f.degree(), Some(2));
            assert!(f.is_monic() && f.is_irreducible());
        }
        assert_eq!(polys, random_irreducibles(7, 20, 2, 3).unwrap());
    }

    #[test]
    fn inverse_mod_roundtrip() {
        let m = FpPoly::new(3, [1, 2, 0, 1]); // x^3 + 2x + 1, irreducible over F_3
        assert!(m.is_irreducible());
        let a = FpPoly::new(3, [2, 1]);
        let inv = a.inverse_mod(&m).unwrap();
        assert_eq!(a.mul_mod(&inv, &m), FpPoly::one(3));
    }
}
