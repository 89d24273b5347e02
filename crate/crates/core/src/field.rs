//! The field tower `F_p ⊆ F_q ⊆ F_{q^m} ⊆ F_{q^n}`.
//!
//! `F_{q^n}` is built once as `F_p[x]/(f)` with `deg f = a·n`; every
//! intermediate field `F_{q^m}` (`m | n`) is located inside it as the fixed
//! space of `x ↦ x^{q^m}`. Elements are little-endian coefficient vectors over
//! `F_p`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, add_mod, inv_mod, mul_mod, sub_mod};
use crate::error::{invalid, Error, Result};
use crate::fp_poly::{find_irreducible, FpPoly};
use crate::linalg::{left_kernel, mat_mul};

/// Serializable description of a field: `F_{q^n}` with `q = p^a`, defined by
/// `modulus` (little-endian, monic, degree `a·n`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub a: u32,
    pub n: u32,
    #[serde(default)]
    pub modulus: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
}

struct Subfield {
    basis: Vec<Vec<u32>>,
    generator: Vec<u32>,
    /// matrix of `x ↦ x^{q^m}`
    frobenius: Vec<Vec<u32>>,
}

struct FieldInner {
    p: u32,
    a: usize,
    n: usize,
    degree: usize,
    modulus: Vec<u32>,
    seed: u64,
    /// `reduction[i] = x^{degree + i} mod f`
    reduction: Vec<Vec<u32>>,
    lazy: bool,
    /// row `i` is `(x^i)^p`
    frob_p: Vec<Vec<u32>>,
    subfields: BTreeMap<usize, Subfield>,
    fq_units: Vec<Vec<u32>>,
    packed_keys: bool,
    group_factors: OnceLock<std::result::Result<Vec<BigUint>, String>>,
}

/// An absolute extension `F_{q^n}` of `F_p`. Cheap to clone; immutable.
#[derive(Clone)]
pub struct FieldCtx(Arc<FieldInner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.a == other.0.a
                && self.0.n == other.0.n
                && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{{{}^{}}} over F_{{{}^{}}} (modulus {})",
            self.0.p,
            self.0.degree,
            self.0.p,
            self.0.a,
            FpPoly::new(self.0.p, self.0.modulus.iter().map(|&c| c as u64))
        )
    }
}

/// `make_field` with seed 0.
pub fn make_field(p: u32, a: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<FieldCtx> {
    FieldCtx::new(p, a, n, modulus, 0)
}

fn apply(p: u32, lazy: bool, matrix: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    let w = matrix.first().map_or(0, Vec::len);
    let mut acc = vec![0u64; w];
    for (&c, row) in v.iter().zip(matrix) {
        if c == 0 {
            continue;
        }
        if lazy {
            for (x, &y) in acc.iter_mut().zip(row) {
                *x += c as u64 * y as u64;
            }
        } else {
            for (x, &y) in acc.iter_mut().zip(row) {
                *x = (*x + c as u64 * y as u64) % p as u64;
            }
        }
    }
    acc.into_iter().map(|x| (x % p as u64) as u32).collect()
}

impl FieldCtx {
    pub fn new(p: u32, a: u32, n: u32, modulus: Option<Vec<u32>>, seed: u64) -> Result<Self> {
        arith::check_prime(p as u64)?;
        if a == 0 || n == 0 {
            return invalid("a and n must be positive");
        }
        let (a, n) = (a as usize, n as usize);
        let degree = a * n;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != degree + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected degree {degree}, got {} coefficients",
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus(format!("coefficients must lie in [0, {p})")));
                }
                if m[degree] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                let poly = FpPoly::new(p, m.iter().map(|&c| c as u64));
                if !poly.is_irreducible() {
                    return Err(Error::BadModulus(format!("{poly} is reducible over F_{p}")));
                }
                m
            }
            None => {
                let poly = find_irreducible(p, degree, seed)?;
                let mut m = poly.coeffs().to_vec();
                m.resize(degree + 1, 0);
                m
            }
        };
        let pm1 = (p - 1) as u128;
        let lazy = 2 * degree as u128 * pm1 * pm1 < u64::MAX as u128;

        // x^{d+i} mod f
        let mut reduction = Vec::with_capacity(degree.saturating_sub(1));
        if degree > 1 {
            let mut cur: Vec<u32> = modulus[..degree].iter().map(|&c| sub_mod(0, c, p)).collect();
            for _ in 0..degree - 1 {
                reduction.push(cur.clone());
                // multiply by x
                let top = cur[degree - 1];
                let mut next = vec![0u32; degree];
                next[1..].copy_from_slice(&cur[..degree - 1]);
                if top != 0 {
                    for (x, &r) in next.iter_mut().zip(&reduction[0]) {
                        *x = add_mod(*x, mul_mod(top, r, p), p);
                    }
                }
                cur = next;
            }
        }

        let mut inner = FieldInner {
            p,
            a,
            n,
            degree,
            modulus,
            seed,
            reduction,
            lazy,
            frob_p: Vec::new(),
            subfields: BTreeMap::new(),
            fq_units: Vec::new(),
            packed_keys: (p as f64).log2() * degree as f64 <= 127.0,
            group_factors: OnceLock::new(),
        };

        // Frobenius x -> x^p as an F_p-linear map
        let mut xp = vec![0u32; degree];
        if degree == 1 {
            xp[0] = 0;
        } else {
            xp[1] = 1;
        }
        let xp = inner.pow_raw(&xp, p as u64);
        let mut frob_p = Vec::with_capacity(degree);
        let mut row = vec![0u32; degree];
        row[0] = 1;
        for _ in 0..degree {
            frob_p.push(row.clone());
            row = inner.mul_raw(&row, &xp);
        }
        let mut frob_q = frob_p.clone();
        for _ in 1..a {
            frob_q = mat_mul(p, &frob_q, &frob_p);
        }
        inner.frob_p = frob_p;

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1e1d);
        let mut frob_m = frob_q.clone();
        let mut located: BTreeMap<usize, Subfield> = BTreeMap::new();
        for m in 1..=n {
            if m > 1 {
                frob_m = mat_mul(p, &frob_m, &frob_q);
            }
            if n % m != 0 {
                continue;
            }
            let shifted: Vec<Vec<u32>> = frob_m
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut r = r.clone();
                    r[i] = sub_mod(r[i], 1, p);
                    r
                })
                .collect();
            let basis = left_kernel(p, &shifted);
            if basis.len() != a * m {
                return Err(Error::Invariant(format!(
                    "fixed space of q^{m}-Frobenius has F_p-dimension {} instead of {}",
                    basis.len(),
                    a * m
                )));
            }
            // an element of exact degree m over F_q
            let proper: Vec<usize> = located.keys().copied().filter(|&e| m % e == 0 && e < m).collect();
            let generator = loop {
                let cand = random_combination(p, &basis, degree, &mut rng);
                let outside = proper.iter().all(|e| {
                    let fe = &located[e].frobenius;
                    apply(p, lazy, fe, &cand) != cand
                });
                if outside && cand.iter().any(|&c| c != 0) {
                    break cand;
                }
            };
            located.insert(
                m,
                Subfield {
                    basis,
                    generator,
                    frobenius: frob_m.clone(),
                },
            );
        }
        inner.subfields = located;

        if a > 1 {
            let basis = &inner.subfields[&1].basis;
            let q = (p as u64).pow(a as u32);
            inner.fq_units = (1..q)
                .map(|idx| {
                    let mut v = vec![0u32; degree];
                    let mut rest = idx;
                    for b in basis {
                        let c = (rest % p as u64) as u32;
                        rest /= p as u64;
                        for (x, &y) in v.iter_mut().zip(b) {
                            *x = add_mod(*x, mul_mod(c, y, p), p);
                        }
                    }
                    v
                })
                .collect();
        }
        Ok(FieldCtx(Arc::new(inner)))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let modulus = if spec.modulus.is_empty() {
            None
        } else {
            Some(spec.modulus.clone())
        };
        Self::new(spec.p, spec.a, spec.n, modulus, spec.seed)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.0.p,
            a: self.0.a as u32,
            n: self.0.n as u32,
            modulus: self.0.modulus.clone(),
            seed: self.0.seed,
        }
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    /// Exponent with `q = p^a`.
    pub fn a(&self) -> usize {
        self.0.a
    }

    /// Degree over `F_q`.
    pub fn n(&self) -> usize {
        self.0.n
    }

    /// Absolute degree `a·n` over `F_p`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn q(&self) -> u64 {
        (self.0.p as u64).pow(self.0.a as u32)
    }

    pub fn seed(&self) -> u64 {
        self.0.seed
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Field size `p^{a·n}`.
    pub fn order(&self) -> BigUint {
        arith::big_pow(self.0.p as u64, self.0.degree as u32)
    }

    pub fn group_order(&self) -> BigUint {
        self.order() - 1u32
    }

    /// Size of the automorphism group of `F_{q^n}` (powers of `x ↦ x^p`).
    pub fn automorphism_count(&self) -> usize {
        self.0.degree
    }

    pub fn subfield_degrees(&self) -> Vec<usize> {
        self.0.subfields.keys().copied().collect()
    }

    pub fn is_subfield_degree(&self, m: usize) -> bool {
        self.0.subfields.contains_key(&m)
    }

    pub(crate) fn check_divisor(&self, m: usize) -> Result<()> {
        if m == 0 || !self.0.n.is_multiple_of(m) {
            return invalid(format!("{m} does not divide n = {}", self.0.n));
        }
        Ok(())
    }

    /// `F_p`-basis (reduced) of `F_{q^m}`.
    pub fn subfield_basis(&self, m: usize) -> Result<Vec<FieldElement>> {
        self.check_divisor(m)?;
        Ok(self.0.subfields[&m]
            .basis
            .iter()
            .map(|c| self.wrap(c.clone()))
            .collect())
    }

    /// A fixed element of degree exactly `m` over `F_q`.
    pub fn subfield_generator(&self, m: usize) -> Result<FieldElement> {
        self.check_divisor(m)?;
        Ok(self.wrap(self.0.subfields[&m].generator.clone()))
    }

    /// `F_p`-basis of `F_q`.
    pub fn base_field_basis(&self) -> Vec<FieldElement> {
        self.subfield_basis(1).expect("1 divides n")
    }

    /// Every element of `F_{q^m}`, in base-`p` counting order over its basis.
    pub fn subfield_elements(&self, m: usize) -> Result<Vec<FieldElement>> {
        self.check_divisor(m)?;
        let basis = &self.0.subfields[&m].basis;
        let count = (self.0.p as u128)
            .checked_pow(basis.len() as u32)
            .filter(|&c| c <= 1 << 26)
            .ok_or_else(|| Error::InvalidArgument(format!("F_{{q^{m}}} too large to enumerate")))?;
        Ok((0..count)
            .map(|idx| {
                let mut v = vec![0u32; self.0.degree];
                let mut rest = idx;
                for b in basis {
                    let c = (rest % self.0.p as u128) as u32;
                    rest /= self.0.p as u128;
                    if c == 0 {
                        continue;
                    }
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = add_mod(*x, mul_mod(c, y, self.0.p), self.0.p);
                    }
                }
                self.wrap(v)
            })
            .collect())
    }

    pub fn random_subfield_element(&self, m: usize, rng: &mut impl Rng) -> Result<FieldElement> {
        self.check_divisor(m)?;
        let sub = &self.0.subfields[&m];
        Ok(self.wrap(random_combination(self.0.p, &sub.basis, self.0.degree, rng)))
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> FieldElement {
        let p = self.0.p;
        self.wrap((0..self.0.degree).map(|_| rng.gen_range(0..p)).collect())
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(vec![0; self.0.degree])
    }

    pub fn one(&self) -> FieldElement {
        self.from_fp(1)
    }

    pub fn from_fp(&self, c: u64) -> FieldElement {
        let mut v = vec![0; self.0.degree];
        v[0] = (c % self.0.p as u64) as u32;
        self.wrap(v)
    }

    /// The class of `x` in `F_p[x]/(f)`.
    pub fn x(&self) -> FieldElement {
        if self.0.degree == 1 {
            let c = sub_mod(0, self.0.modulus[0], self.0.p);
            return self.from_fp(c as u64);
        }
        let mut v = vec![0; self.0.degree];
        v[1] = 1;
        self.wrap(v)
    }

    /// Element from little-endian coefficients; shorter lists are zero padded.
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.0.degree {
            return invalid(format!(
                "{} coefficients exceed field degree {}",
                coeffs.len(),
                self.0.degree
            ));
        }
        let mut v: Vec<u32> = coeffs.iter().map(|&c| (c % self.0.p as u64) as u32).collect();
        v.resize(self.0.degree, 0);
        Ok(self.wrap(v))
    }

    /// Evaluates a polynomial over `F_p` at `x`.
    pub fn eval_fp_poly(&self, poly: &FpPoly, x: &FieldElement) -> FieldElement {
        poly.coeffs()
            .iter()
            .rev()
            .fold(self.zero(), |acc, &c| &(&acc * x) + &self.from_fp(c as u64))
    }

    pub(crate) fn wrap(&self, coeffs: Vec<u32>) -> FieldElement {
        debug_assert_eq!(coeffs.len(), self.0.degree);
        FieldElement {
            ctx: self.clone(),
            coeffs,
        }
    }

    /// Nonzero elements of `F_q` as coefficient vectors (populated only for `a > 1`).
    pub(crate) fn fq_units(&self) -> &[Vec<u32>] {
        &self.0.fq_units
    }

    /// Distinct prime divisors of `p^{a n} - 1`, via its cyclotomic factors.
    pub fn group_order_prime_factors(&self) -> Result<Vec<BigUint>> {
        self.0
            .group_factors
            .get_or_init(|| factor_group_order(self.0.p as u64, self.0.degree))
            .clone()
            .map_err(Error::Unfactorable)
    }
}

fn random_combination(p: u32, basis: &[Vec<u32>], degree: usize, rng: &mut impl Rng) -> Vec<u32> {
    let mut v = vec![0u32; degree];
    for b in basis {
        let c = rng.gen_range(0..p);
        if c == 0 {
            continue;
        }
        for (x, &y) in v.iter_mut().zip(b) {
            *x = add_mod(*x, mul_mod(c, y, p), p);
        }
    }
    v
}

/// `Φ_e(p)` for every `e | d`, each factored; the union of their primes is the
/// prime support of `p^d - 1`.
fn factor_group_order(p: u64, d: usize) -> std::result::Result<Vec<BigUint>, String> {
    let mut primes = std::collections::BTreeSet::new();
    for e in arith::divisors(d) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for f in arith::divisors(e) {
            let term = arith::big_pow(p, f as u32) - 1u32;
            match mobius(e / f) {
                1 => num *= term,
                -1 => den *= term,
                _ => {}
            }
        }
        let phi = num / den;
        if phi.is_one() {
            continue;
        }
        if let Some(v) = phi.to_u64() {
            for (prime, _) in num_prime::nt_funcs::factorize64(v) {
                primes.insert(BigUint::from(prime));
            }
        } else if let Some(v) = phi.to_u128() {
            for (prime, _) in num_prime::nt_funcs::factorize128(v) {
                primes.insert(BigUint::from(prime));
            }
        } else {
            return Err(format!("Φ_{e}({p}) = {phi}"));
        }
    }
    Ok(primes.into_iter().collect())
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
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

impl FieldInner {
    fn mul_raw(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let d = self.degree;
        let p = self.p as u64;
        let mut t = vec![0u64; 2 * d - 1];
        if self.lazy {
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let x = x as u64;
                for (slot, &y) in t[i..i + d].iter_mut().zip(b) {
                    *slot += x * y as u64;
                }
            }
        } else {
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (slot, &y) in t[i..i + d].iter_mut().zip(b) {
                    *slot = (*slot + x as u64 * y as u64) % p;
                }
            }
        }
        let (low, high) = t.split_at_mut(d);
        for (hi, red) in high.iter().zip(&self.reduction) {
            let c = hi % p;
            if c == 0 {
                continue;
            }
            if self.lazy {
                for (slot, &r) in low.iter_mut().zip(red) {
                    *slot += c * r as u64;
                }
            } else {
                for (slot, &r) in low.iter_mut().zip(red) {
                    *slot = (*slot + c * r as u64) % p;
                }
            }
        }
        low.iter().map(|&x| (x % p) as u32).collect()
    }

    fn pow_raw(&self, base: &[u32], mut e: u64) -> Vec<u32> {
        let mut acc = vec![0u32; self.degree];
        acc[0] = 1;
        let mut base = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            base = self.mul_raw(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Hashable exact identity of an element: the base-`p` integer when it fits
/// in 128 bits, else the coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKey {
    Packed(u128),
    Coeffs(Box<[u32]>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    ctx: FieldCtx,
    coeffs: Vec<u32>,
}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = FpPoly::new(self.ctx.p(), self.coeffs.iter().map(|&c| c as u64));
        write!(f, "{poly}")
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            coeffs: self.coeffs.iter().map(|&c| c as u64).collect(),
        }
        .serialize(serializer)
    }
}

/// Wire form of an element: `{"coeffs": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub coeffs: Vec<u64>,
}

/// Constraint on `N_{q^n / q^m}(γ)` used by generator searches.
#[derive(Clone, Debug)]
pub struct NormConstraint {
    /// target subfield degree `m`
    pub down_to: usize,
    pub equal: bool,
    pub value: FieldElement,
}

impl NormConstraint {
    /// `N_{q^n/q}(γ) ≠ (-1)^n`.
    pub fn not_sign(ctx: &FieldCtx) -> Self {
        Self {
            down_to: 1,
            equal: false,
            value: sign_power(ctx, ctx.n()),
        }
    }

    /// `N_{q^n/q}(γ) = (-1)^n`.
    pub fn sign(ctx: &FieldCtx) -> Self {
        Self {
            down_to: 1,
            equal: true,
            value: sign_power(ctx, ctx.n()),
        }
    }

    fn describe(&self) -> String {
        format!(
            "N_{{q^n/q^{}}}(γ) {} {}",
            self.down_to,
            if self.equal { "=" } else { "≠" },
            self.value
        )
    }

    fn holds(&self, x: &FieldElement) -> bool {
        let norm = x.norm(self.down_to).expect("validated divisor");
        (norm == self.value) == self.equal
    }
}

/// `(-1)^e` in the field.
pub fn sign_power(ctx: &FieldCtx, e: usize) -> FieldElement {
    if e.is_multiple_of(2) {
        ctx.one()
    } else {
        -&ctx.one()
    }
}

#[derive(Clone, Debug, Default)]
pub struct GeneratorOptions {
    pub primitive: bool,
    pub norm: Option<NormConstraint>,
    pub seed: u64,
}

const SEARCH_ATTEMPTS: usize = 20_000;
const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

impl FieldCtx {
    /// Seeded search for `γ` with `F_{q^m}(γ) = F_{q^n}` and the requested
    /// extra properties.
    pub fn find_generator(&self, over_m: usize, opts: &GeneratorOptions) -> Result<FieldElement> {
        self.check_divisor(over_m)?;
        if let Some(c) = &opts.norm {
            self.check_divisor(c.down_to)?;
            if c.value.ctx != *self {
                return Err(Error::MixedContexts);
            }
            if !c.value.in_subfield(c.down_to)? && c.equal {
                return Err(Error::NoSuchElement {
                    constraint: c.describe(),
                });
            }
            // the norm map onto F_{q^m}^* is surjective, so `≠ v` is impossible
            // only when F_{q^m}^* = {v}
            let units = arith::big_pow(self.q(), c.down_to as u32) - 1u32;
            if !c.equal && units.is_one() && c.value.is_one() {
                return Err(Error::NoSuchElement {
                    constraint: c.describe(),
                });
            }
        }
        let mut describe = vec![format!("F_{{q^{over_m}}}(γ) = F_{{q^n}}")];
        if opts.primitive {
            describe.push("γ primitive".into());
        }
        if let Some(c) = &opts.norm {
            describe.push(c.describe());
        }
        let constraint = describe.join(", ");
        let norm = opts.norm.clone();
        self.search_generator(over_m, opts.primitive, opts.seed, &constraint, move |x| {
            norm.as_ref().is_none_or(|c| c.holds(x))
        })
    }

    /// Like [`find_generator`](Self::find_generator) with an arbitrary extra
    /// predicate. Tries seeded random candidates, then falls back to an
    /// exhaustive sweep when the field is small.
    pub fn search_generator(
        &self,
        over_m: usize,
        primitive: bool,
        seed: u64,
        constraint: &str,
        pred: impl Fn(&FieldElement) -> bool,
    ) -> Result<FieldElement> {
        self.check_divisor(over_m)?;
        let target = self.n() / over_m;
        let ok = |x: &FieldElement| -> Result<bool> {
            if x.is_zero() || x.degree_over(over_m)? != target {
                return Ok(false);
            }
            if primitive && !x.is_primitive()? {
                return Ok(false);
            }
            Ok(pred(x))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SEARCH_ATTEMPTS {
            let cand = self.random_element(&mut rng);
            if ok(&cand)? {
                return Ok(cand);
            }
        }
        let size = self.order();
        if size <= BigUint::from(EXHAUSTIVE_LIMIT) {
            let total = size.to_u128().expect("bounded");
            for idx in 0..total {
                let cand = self.element_from_index(idx);
                if ok(&cand)? {
                    return Ok(cand);
                }
            }
        }
        Err(Error::NoSuchElement {
            constraint: constraint.to_string(),
        })
    }

    /// Element whose coefficient vector is the base-`p` digits of `idx`.
    pub fn element_from_index(&self, mut idx: u128) -> FieldElement {
        let p = self.0.p as u128;
        let v = (0..self.0.degree)
            .map(|_| {
                let c = (idx % p) as u32;
                idx /= p;
                c
            })
            .collect();
        self.wrap(v)
    }
}

impl FieldElement {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            coeffs: self.coeffs.iter().map(|&c| c as u64).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn same_field(&self, other: &Self) -> bool {
        self.ctx == other.ctx
    }

    pub fn scale_fp(&self, c: u32) -> Self {
        let p = self.ctx.p();
        self.ctx.wrap(self.coeffs.iter().map(|&x| mul_mod(x, c, p)).collect())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, e: u64) -> Self {
        self.ctx.wrap(self.ctx.0.pow_raw(&self.coeffs, e))
    }

    pub fn pow_big(&self, e: &BigUint) -> Self {
        let mut acc = self.ctx.one();
        for i in (0..e.bits()).rev() {
            acc = acc.square();
            if e.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.ctx.p();
        let f = FpPoly::new(p, self.ctx.modulus().iter().map(|&c| c as u64));
        let a = FpPoly::new(p, self.coeffs.iter().map(|&c| c as u64));
        let inv = a.inverse_mod(&f)?;
        let mut v = inv.coeffs().to_vec();
        v.resize(self.ctx.degree(), 0);
        Some(self.ctx.wrap(v))
    }

    /// `self / other`; panics when `other` is zero.
    pub fn div(&self, other: &Self) -> Self {
        self * &other.inverse().expect("division by zero")
    }

    /// `x^{p^i}`, the `i`-th power of the absolute Frobenius.
    pub fn frobenius_p(&self, i: usize) -> Self {
        let inner = &self.ctx.0;
        let mut v = self.coeffs.clone();
        for _ in 0..i % inner.degree {
            v = apply(inner.p, inner.lazy, &inner.frob_p, &v);
        }
        self.ctx.wrap(v)
    }

    /// `x^{q^i}`.
    pub fn frobenius(&self, i: usize) -> Self {
        let inner = &self.ctx.0;
        let mut v = self.coeffs.clone();
        let frob_q = &inner.subfields[&1].frobenius;
        for _ in 0..i % inner.n {
            v = apply(inner.p, inner.lazy, frob_q, &v);
        }
        self.ctx.wrap(v)
    }

    /// `x^{q^m}` for `m | n`, one matrix application.
    fn frobenius_sub(&self, m: usize) -> Self {
        let inner = &self.ctx.0;
        let mat = &inner.subfields[&m].frobenius;
        self.ctx.wrap(apply(inner.p, inner.lazy, mat, &self.coeffs))
    }

    pub fn in_subfield(&self, m: usize) -> Result<bool> {
        self.ctx.check_divisor(m)?;
        Ok(self.frobenius_sub(m) == *self)
    }

    /// Degree of `x` over `F_{q^m}`: least `j` with `x^{q^{mj}} = x`.
    pub fn degree_over(&self, m: usize) -> Result<usize> {
        self.ctx.check_divisor(m)?;
        let n = self.ctx.n();
        for j in arith::divisors(n / m) {
            if self.ctx.is_subfield_degree(m * j) && self.frobenius_sub(m * j) == *self {
                return Ok(j);
            }
        }
        Err(Error::Invariant("element not fixed by the q^n-Frobenius".into()))
    }

    /// Conjugates `x, x^{q^m}, x^{q^{2m}}, …` over `F_{q^m}` (`n/m` of them, with repetition).
    fn conjugates(&self, m: usize) -> Vec<Self> {
        let count = self.ctx.n() / m;
        let mut out = Vec::with_capacity(count);
        let mut cur = self.clone();
        for _ in 0..count {
            let next = cur.frobenius_sub(m);
            out.push(cur);
            cur = next;
        }
        out
    }

    /// `N_{q^n/q^m}(x) = x^{(q^n-1)/(q^m-1)}`, computed as the product of conjugates.
    pub fn norm(&self, m: usize) -> Result<Self> {
        self.ctx.check_divisor(m)?;
        Ok(self.conjugates(m).iter().fold(self.ctx.one(), |acc, c| &acc * c))
    }

    /// `Tr_{q^n/q^m}(x)`, the sum of conjugates.
    pub fn trace(&self, m: usize) -> Result<Self> {
        self.ctx.check_divisor(m)?;
        Ok(self.conjugates(m).iter().fold(self.ctx.zero(), |acc, c| &acc + c))
    }

    /// `N_{q^k/q^m}(x)` for `x ∈ F_{q^k}`, `m | k | n`.
    pub fn relative_norm(&self, k: usize, m: usize) -> Result<Self> {
        self.check_relative(k, m)?;
        let mut acc = self.ctx.one();
        let mut cur = self.clone();
        for _ in 0..k / m {
            acc = &acc * &cur;
            cur = cur.frobenius_sub(m);
        }
        Ok(acc)
    }

    /// `Tr_{q^k/q^m}(x)` for `x ∈ F_{q^k}`, `m | k | n`.
    pub fn relative_trace(&self, k: usize, m: usize) -> Result<Self> {
        self.check_relative(k, m)?;
        let mut acc = self.ctx.zero();
        let mut cur = self.clone();
        for _ in 0..k / m {
            acc = &acc + &cur;
            cur = cur.frobenius_sub(m);
        }
        Ok(acc)
    }

    fn check_relative(&self, k: usize, m: usize) -> Result<()> {
        self.ctx.check_divisor(k)?;
        if m == 0 || !k.is_multiple_of(m) {
            return invalid(format!("{m} does not divide {k}"));
        }
        if !self.in_subfield(k)? {
            return invalid(format!("element is not in F_(q^{k})"));
        }
        Ok(())
    }

    /// Minimal polynomial over `F_{q^m}`: little-endian, monic, coefficients in `F_{q^m}`.
    pub fn minimal_polynomial(&self, m: usize) -> Result<Vec<Self>> {
        let deg = self.degree_over(m)?;
        let mut poly = vec![self.ctx.one()];
        let mut root = self.clone();
        for _ in 0..deg {
            // poly *= (X - root)
            let mut next = vec![self.ctx.zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = &next[i + 1] + c;
                next[i] = &next[i] - &(c * &root);
            }
            poly = next;
            root = root.frobenius_sub(m);
        }
        Ok(poly)
    }

    /// Multiplicative generator test via the prime support of `p^{an} - 1`.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Ok(false);
        }
        let order = self.ctx.group_order();
        for l in self.ctx.group_order_prime_factors()? {
            if self.pow_big(&(&order / &l)).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn key(&self) -> ElementKey {
        if self.ctx.0.packed_keys {
            let p = self.ctx.p() as u128;
            ElementKey::Packed(self.coeffs.iter().rev().fold(0u128, |acc, &c| acc * p + c as u128))
        } else {
            ElementKey::Coeffs(self.coeffs.clone().into_boxed_slice())
        }
    }

    /// Canonical representative of the projective point `x·F_q^*`: scaled so the
    /// lowest nonzero coordinate is 1 (for `a = 1`), or the lexicographically
    /// least `F_q^*`-multiple in general. Zero maps to zero.
    pub fn projective_normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.ctx.p();
        if self.ctx.a() == 1 {
            let lead = *self.coeffs.iter().find(|&&c| c != 0).expect("nonzero");
            if lead == 1 {
                return self.clone();
            }
            return self.scale_fp(inv_mod(lead, p));
        }
        self.ctx
            .fq_units()
            .iter()
            .map(|u| self.ctx.0.mul_raw(&self.coeffs, u))
            .min()
            .map(|v| self.ctx.wrap(v))
            .expect("F_q has units")
    }

    pub fn projective_key(&self) -> ElementKey {
        self.projective_normalize().key()
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.same_field(rhs));
        let p = self.ctx.p();
        self.ctx.wrap(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&x, &y)| add_mod(x, y, p))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.same_field(rhs));
        let p = self.ctx.p();
        self.ctx.wrap(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&x, &y)| sub_mod(x, y, p))
                .collect(),
        )
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.ctx.p();
        self.ctx.wrap(self.coeffs.iter().map(|&x| sub_mod(0, x, p)).collect())
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(self.same_field(rhs));
        self.ctx.wrap(self.ctx.0.mul_raw(&self.coeffs, &rhs.coeffs))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Exponent `(q^n - 1)/(q^m - 1)`.
pub fn norm_exponent(ctx: &FieldCtx, m: usize) -> BigUint {
    let q = ctx.q();
    let num = arith::big_pow(q, ctx.n() as u32) - 1u32;
    let den = arith::big_pow(q, m as u32) - 1u32;
    if den.is_zero() {
        return BigUint::zero();
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32, a: u32, n: u32) -> FieldCtx {
        FieldCtx::new(p, a, n, None, 7).unwrap()
    }

    #[test]
    fn f64_has_expected_lattice() {
        let ctx = make_field(2, 1, 6, None).unwrap();
        assert_eq!(ctx.order(), BigUint::from(64u32));
        assert_eq!(ctx.subfield_degrees(), vec![1, 2, 3, 6]);
        for m in [1, 2, 3, 6] {
            let elems = ctx.subfield_elements(m).unwrap();
            assert_eq!(elems.len(), 1 << m);
            // closed under + and x, and exactly the fixed set of x -> x^{q^m}
            let keys: std::collections::HashSet<_> = elems.iter().map(|e| e.key()).collect();
            for x in &elems {
                assert!(x.in_subfield(m).unwrap());
                for y in &elems {
                    assert!(keys.contains(&(x + y).key()));
                    assert!(keys.contains(&(x * y).key()));
                }
            }
        }
        let fixed = (0..64u128)
            .map(|i| ctx.element_from_index(i))
            .filter(|x| x.pow(8) == *x)
            .count();
        assert_eq!(fixed, 8);
    }

    #[test]
    fn f3_16_group_order() {
        let ctx = make_field(3, 1, 16, None).unwrap();
        assert_eq!(ctx.group_order(), BigUint::from(43046720u64));
        assert_eq!(norm_exponent(&ctx, 1), BigUint::from(21523360u64));
    }

    #[test]
    fn f7_61_builds() {
        let ctx = make_field(7, 1, 61, None).unwrap();
        assert_eq!(ctx.subfield_degrees(), vec![1, 61]);
        let x = ctx.x();
        // x^{7^61} = x
        assert_eq!(x.frobenius(61), x);
        assert_ne!(x.frobenius(1), x);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(make_field(4, 1, 3, None).unwrap_err(), Error::NotPrime(4));
        // x^2 + 1 = (x+1)^2 over F_2
        assert!(matches!(
            make_field(2, 1, 2, Some(vec![1, 0, 1])),
            Err(Error::BadModulus(_))
        ));
        assert!(matches!(
            make_field(2, 1, 3, Some(vec![1, 1, 1])),
            Err(Error::BadModulus(_))
        ));
        assert!(make_field(2, 1, 2, Some(vec![1, 1, 1])).is_ok());
    }

    #[test]
    fn frobenius_order_exhaustive_small() {
        for (p, a, n) in [(2, 1, 8), (3, 1, 5), (2, 2, 3), (5, 1, 3)] {
            let ctx = f(p, a, n);
            let total = ctx.order().to_u128().unwrap();
            for i in 0..total {
                let x = ctx.element_from_index(i);
                assert_eq!(x.frobenius(n as usize), x);
                assert_eq!(x.frobenius_p(ctx.degree()), x);
            }
        }
    }

    #[test]
    fn norm_of_one_and_binary_norms() {
        let ctx = f(2, 1, 6);
        for m in ctx.subfield_degrees() {
            assert!(ctx.one().norm(m).unwrap().is_one());
        }
        for i in 1..64u128 {
            assert!(ctx.element_from_index(i).norm(1).unwrap().is_one());
        }
        assert!(ctx.one().norm(4).is_err());
    }

    #[test]
    fn norm_power_formula_matches_conjugate_product() {
        // q = 3, k = 4: power formula against explicit conjugate product
        let ctx = f(3, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = ctx.random_element(&mut rng);
            let via_power = d.pow_big(&norm_exponent(&ctx, 1));
            let product = (0..4).fold(ctx.one(), |acc, i| &acc * &d.pow(3u64.pow(i)));
            assert_eq!(via_power, product);
            assert_eq!(d.norm(1).unwrap(), product);
        }
    }

    #[test]
    fn relative_norms() {
        let ctx = f(3, 1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let d = ctx.random_subfield_element(4, &mut rng).unwrap();
            let rel = d.relative_norm(4, 1).unwrap();
            assert_eq!(rel, d.pow(1 + 3 + 9 + 27));
            // N_{q^n/q}(d) = N_{q^k/q}(d)^{n/k}
            assert_eq!(d.norm(1).unwrap(), rel.square());
            assert_eq!(d.relative_trace(4, 2).unwrap(), &d + &d.pow(9));
        }
        assert!(ctx.x().relative_norm(4, 1).is_err());
        assert!(ctx.one().relative_norm(4, 3).is_err());
    }

    #[test]
    fn trace_over_f8() {
        let ctx = f(2, 1, 3);
        let zero = ctx.zero();
        assert!(zero.trace(1).unwrap().is_zero());
        let traces: Vec<_> = (0..8u128)
            .map(|i| ctx.element_from_index(i).trace(1).unwrap())
            .collect();
        assert!(traces.iter().all(|t| t.in_subfield(1).unwrap()));
        assert_eq!(traces.iter().filter(|t| t.is_zero()).count(), 4);
        assert_eq!(traces.iter().filter(|t| t.is_one()).count(), 4);
    }

    #[test]
    fn trace_kernel_dimension() {
        for (p, k) in [(2u32, 4u32), (3, 4), (2, 5), (3, 3)] {
            let ctx = f(p, 1, k);
            let images: Vec<Vec<u32>> = ctx
                .subfield_basis(k as usize)
                .unwrap()
                .iter()
                .map(|b| b.trace(1).unwrap().coeffs().to_vec())
                .collect();
            assert_eq!(left_kernel(p, &images).len(), k as usize - 1);
        }
    }

    #[test]
    fn minimal_polynomials() {
        let ctx = f(3, 1, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [1, 2, 3] {
            let sub = ctx.random_subfield_element(m, &mut rng).unwrap();
            let mp = sub.minimal_polynomial(m).unwrap();
            assert_eq!(mp.len(), 2);
            assert_eq!(mp[0], -&sub);
        }
        let gamma = ctx.find_generator(2, &GeneratorOptions::default()).unwrap();
        let mp = gamma.minimal_polynomial(2).unwrap();
        assert_eq!(mp.len(), 4); // t = 3
        assert!(mp.last().unwrap().is_one());
        for c in &mp {
            assert!(c.in_subfield(2).unwrap());
        }
        // root check at every conjugate
        for conj in gamma.conjugates(2) {
            let val = mp.iter().rev().fold(ctx.zero(), |acc, c| &(&acc * &conj) + c);
            assert!(val.is_zero());
        }
        // a_0 = (-1)^t γ^{(q^n-1)/(q^k-1)}
        let expected = &sign_power(&ctx, 3) * &gamma.pow_big(&norm_exponent(&ctx, 2));
        assert_eq!(mp[0], expected);
    }

    #[test]
    fn generator_search() {
        let ctx = f(2, 1, 6);
        let g = ctx.find_generator(3, &GeneratorOptions::default()).unwrap();
        assert!(!g.in_subfield(3).unwrap());
        let err = ctx
            .find_generator(
                1,
                &GeneratorOptions {
                    norm: Some(NormConstraint::not_sign(&ctx)),
                    ..Default::default()
                },
            )
            .unwrap_err();
        assert!(matches!(err, Error::NoSuchElement { .. }));
    }

    #[test]
    fn primitive_in_f3_16() {
        let ctx = make_field(3, 1, 16, None).unwrap();
        let g = ctx
            .find_generator(
                1,
                &GeneratorOptions {
                    primitive: true,
                    ..Default::default()
                },
            )
            .unwrap();
        // independent order check: factor 3^16 - 1 = 2^6 · 5 · 17 · 41 · 193 by hand
        let order = 43046720u64;
        let mut n = order;
        let mut primes = vec![];
        let mut d = 2;
        while n > 1 {
            if n.is_multiple_of(d) {
                primes.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        assert_eq!(primes, vec![2, 5, 17, 41, 193]);
        assert!(g.pow(order).is_one());
        for l in primes {
            assert!(!g.pow(order / l).is_one());
        }
    }

    #[test]
    fn nonprime_base_field() {
        // F_{4^3}: q = 4
        let ctx = f(2, 2, 3);
        assert_eq!(ctx.q(), 4);
        assert_eq!(ctx.subfield_elements(1).unwrap().len(), 4);
        assert_eq!(ctx.fq_units().len(), 3);
        let x = ctx.x();
        let n = x.norm(1).unwrap();
        assert!(n.in_subfield(1).unwrap());
    }

    proptest! {
        #[test]
        fn field_axioms(seed in any::<u64>()) {
            let ctx = f(3, 1, 5);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y, z) = (ctx.random_element(&mut rng), ctx.random_element(&mut rng), ctx.random_element(&mut rng));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if let Some(inv) = x.inverse() {
                prop_assert!((&x * &inv).is_one());
            }
            // Frobenius is additive and multiplicative
            prop_assert_eq!((&x + &y).frobenius(1), &x.frobenius(1) + &y.frobenius(1));
            prop_assert_eq!((&x * &y).frobenius(1), &x.frobenius(1) * &y.frobenius(1));
        }

        #[test]
        fn norm_trace_transitive(seed in any::<u64>()) {
            let ctx = f(2, 1, 12);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = ctx.random_element(&mut rng);
            let y = ctx.random_element(&mut rng);
            for k in [2usize, 3, 4, 6] {
                // N_{q^k/q} and Tr_{q^k/q} of the relative values, by conjugates inside F_{q^k}
                let nk = x.norm(k).unwrap();
                let tk = x.trace(k).unwrap();
                let n_down = (0..k).fold(ctx.one(), |acc, i| &acc * &nk.frobenius(i));
                let t_down = (0..k).fold(ctx.zero(), |acc, i| &acc + &tk.frobenius(i));
                prop_assert_eq!(n_down, x.norm(1).unwrap());
                prop_assert_eq!(t_down, x.trace(1).unwrap());
            }
            prop_assert_eq!((&x * &y).norm(3).unwrap(), &x.norm(3).unwrap() * &y.norm(3).unwrap());
            prop_assert!(x.norm(4).unwrap().in_subfield(4).unwrap());
        }
    }
}
