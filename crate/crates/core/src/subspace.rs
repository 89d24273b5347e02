//! `F_q`-subspaces of `F_{q^n}` and the span calculus on them.

use std::fmt;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::field::{FieldCtx, FieldElement, FieldSpec};
use crate::linalg::{self, Echelon};

/// An `F_q`-subspace, stored as the reduced `F_p`-echelon form of its
/// underlying `F_p`-space. The reduced form is unique, so equality of values
/// is equality of sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ctx: FieldCtx,
    ech: Echelon,
    dim: usize,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("dim", &self.dim)
            .field("basis", &self.basis())
            .finish()
    }
}

/// Wire form: `{"field": <spec>, "basis": [[coeffs], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub field: FieldSpec,
    pub basis: Vec<Vec<u64>>,
}

impl Subspace {
    pub fn zero(ctx: &FieldCtx) -> Self {
        Self {
            ctx: ctx.clone(),
            ech: Echelon::new(ctx.p(), ctx.degree()),
            dim: 0,
        }
    }

    pub fn whole(ctx: &FieldCtx) -> Self {
        Self::subfield(ctx, ctx.n()).expect("n divides n")
    }

    /// `F_{q^m}` as an `F_q`-subspace.
    pub fn subfield(ctx: &FieldCtx, m: usize) -> Result<Self> {
        Ok(Self::from_fp_rows(
            ctx,
            ctx.subfield_basis(m)?.iter().map(|b| b.coeffs().to_vec()),
        ))
    }

    /// Smallest `F_q`-subspace containing `generators`.
    pub fn span(ctx: &FieldCtx, generators: &[FieldElement]) -> Result<Self> {
        if generators.iter().any(|g| g.ctx() != ctx) {
            return Err(Error::MixedContexts);
        }
        let mut out = Self::zero(ctx);
        for g in generators {
            out.absorb(g);
        }
        Ok(out)
    }

    /// Rows already spanning an `F_q`-closed `F_p`-space.
    fn from_fp_rows(ctx: &FieldCtx, rows: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let ech = Echelon::from_rows(ctx.p(), ctx.degree(), rows);
        let dim = ech.rank() / ctx.a();
        debug_assert_eq!(ech.rank() % ctx.a(), 0);
        Self {
            ctx: ctx.clone(),
            ech,
            dim,
        }
    }

    /// Adds the `F_q`-line through `g`.
    fn absorb(&mut self, g: &FieldElement) -> bool {
        if self.ech.contains(g.coeffs()) {
            return false;
        }
        if self.ctx.a() == 1 {
            self.ech.insert(g.coeffs().to_vec());
        } else {
            for b in self.ctx.base_field_basis() {
                self.ech.insert((g * &b).coeffs().to_vec());
            }
        }
        self.dim = self.ech.rank() / self.ctx.a();
        true
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// `F_q`-dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Reduced `F_p`-rows of the underlying `F_p`-space.
    pub fn fp_rows(&self) -> &[Vec<u32>] {
        self.ech.rows()
    }

    /// Canonical `F_q`-basis: reduced rows taken greedily in echelon order,
    /// skipping rows already in the `F_q`-span of earlier picks.
    pub fn basis(&self) -> Vec<FieldElement> {
        if self.ctx.a() == 1 {
            return self.ech.rows().iter().map(|r| self.ctx.wrap(r.clone())).collect();
        }
        let mut acc = Subspace::zero(&self.ctx);
        let mut out = Vec::with_capacity(self.dim);
        for row in self.ech.rows() {
            let e = self.ctx.wrap(row.clone());
            if acc.absorb(&e) {
                out.push(e);
            }
        }
        out
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.ech.contains(x.coeffs())
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ech.rows().iter().all(|r| other.ech.contains(r))
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::MixedContexts);
        }
        Ok(())
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let mut ech = self.ech.clone();
        for r in other.ech.rows() {
            ech.insert(r.clone());
        }
        let dim = ech.rank() / self.ctx.a();
        Ok(Self {
            ctx: self.ctx.clone(),
            ech,
            dim,
        })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let rows = linalg::intersect(self.ctx.p(), self.ctx.degree(), self.ech.rows(), other.ech.rows());
        Ok(Self::from_fp_rows(&self.ctx, rows))
    }

    /// `αV`.
    pub fn scale(&self, alpha: &FieldElement) -> Result<Self> {
        if alpha.ctx() != &self.ctx {
            return Err(Error::MixedContexts);
        }
        if alpha.is_zero() {
            return invalid("cannot scale a subspace by 0");
        }
        Ok(self.map_rows(|x| x * alpha))
    }

    /// `V^σ` for `σ: x ↦ x^{p^i}`.
    pub fn frob_image(&self, i: usize) -> Self {
        self.map_rows(|x| x.frobenius_p(i))
    }

    /// Image under an `F_p`-linear bijection that preserves `F_q`-closure.
    fn map_rows(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_fp_rows(
            &self.ctx,
            self.ech
                .rows()
                .iter()
                .map(|r| f(&self.ctx.wrap(r.clone())).coeffs().to_vec()),
        )
    }

    /// `dim_{F_q}(V ∩ αV)`, computed as `2k - dim(V + αV)`.
    pub fn intersection_dim_scaled(&self, alpha: &FieldElement) -> usize {
        let mut ech = self.ech.clone();
        for r in self.ech.rows() {
            let img = alpha * &self.ctx.wrap(r.clone());
            ech.insert(img.coeffs().to_vec());
        }
        let a = self.ctx.a();
        (2 * self.ech.rank() - ech.rank()) / a
    }

    /// `AB = ⟨ab : a ∈ A, b ∈ B⟩`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let mut out = Subspace::zero(&self.ctx);
        let full = self.ctx.n();
        let right = other.basis();
        for x in self.basis() {
            for y in &right {
                out.absorb(&(&x * y));
                if out.dim == full {
                    return Ok(out);
                }
            }
        }
        Ok(out)
    }

    /// `V^s`, with `V^0 = F_q`.
    pub fn power(&self, s: usize) -> Self {
        let mut acc = Subspace::subfield(&self.ctx, 1).expect("1 divides n");
        for _ in 0..s {
            acc = acc.product(self).expect("same field");
        }
        acc
    }

    /// Largest `m | n` with `F_{q^m}·V = V`; for nonzero `V` this is the
    /// stabilizer degree `h(V) = [H(V) : F_q]`, and also the maximum field
    /// of linearity. The zero space is stabilized by everything.
    pub fn stabilizer(&self) -> usize {
        let n = self.ctx.n();
        if self.is_zero() {
            return n;
        }
        let basis = self.basis();
        for m in arith::divisors(n).into_iter().rev() {
            let g = self.ctx.subfield_generator(m).expect("m divides n");
            if basis.iter().all(|b| self.contains(&(&g * b))) {
                return m;
            }
        }
        1
    }

    pub fn field_of_linearity(&self) -> usize {
        self.stabilizer()
    }

    /// `(q^n - 1)/(q^t - 1)` with `t` the field of linearity.
    pub fn orbit_size(&self) -> BigUint {
        crate::field::norm_exponent(&self.ctx, self.field_of_linearity())
    }

    /// Smallest `m | n` with `V ⊆ F_{q^m}`.
    pub fn generated_field(&self) -> usize {
        let basis = self.basis();
        arith::divisors(self.ctx.n())
            .into_iter()
            .find(|&m| basis.iter().all(|b| b.in_subfield(m).expect("m divides n")))
            .expect("n always works")
    }

    /// Canonical representatives of the projective points of `V`.
    pub fn projective_points(&self) -> Result<Vec<FieldElement>> {
        const CAP: u128 = 1 << 24;
        let q = self.ctx.q() as u128;
        let count = q
            .checked_pow(self.dim as u32)
            .map(|c| (c - 1) / (q - 1))
            .filter(|&c| c <= CAP)
            .ok_or(Error::BudgetExceeded {
                required: q.checked_pow(self.dim as u32).unwrap_or(u128::MAX),
                cap: CAP,
            })?;
        let p = self.ctx.p();
        if self.ctx.a() == 1 {
            // coefficient vectors over the basis whose lowest nonzero entry is 1
            let basis = self.ech.rows();
            let k = basis.len();
            let mut out = Vec::with_capacity(count as usize);
            for lead in 0..k {
                let free = k - lead - 1;
                let total = (p as u128).pow(free as u32);
                for idx in 0..total {
                    let mut v = basis[lead].clone();
                    let mut rest = idx;
                    for row in &basis[lead + 1..] {
                        let c = (rest % p as u128) as u32;
                        rest /= p as u128;
                        if c == 0 {
                            continue;
                        }
                        for (x, &y) in v.iter_mut().zip(row) {
                            *x = arith::add_mod(*x, arith::mul_mod(c, y, p), p);
                        }
                    }
                    out.push(self.ctx.wrap(v).projective_normalize());
                }
            }
            return Ok(out);
        }
        let rows = self.ech.rows();
        let total = (p as u128).pow(rows.len() as u32);
        let mut seen = std::collections::BTreeMap::new();
        for idx in 1..total {
            let mut v = vec![0u32; self.ctx.degree()];
            let mut rest = idx;
            for row in rows {
                let c = (rest % p as u128) as u32;
                rest /= p as u128;
                if c == 0 {
                    continue;
                }
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = arith::add_mod(*x, arith::mul_mod(c, y, p), p);
                }
            }
            let e = self.ctx.wrap(v).projective_normalize();
            seen.entry(e.key()).or_insert(e);
        }
        debug_assert_eq!(seen.len() as u128, count);
        Ok(seen.into_values().collect())
    }

    /// Seeded random `k`-dimensional subspace: draws `k` elements at a time
    /// until they are independent.
    pub fn random(ctx: &FieldCtx, k: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(ctx, k, &mut rng)
    }

    pub fn random_with(ctx: &FieldCtx, k: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        if k == 0 || k > ctx.n() {
            return invalid(format!("dimension {k} outside 1..={}", ctx.n()));
        }
        loop {
            let gens: Vec<_> = (0..k).map(|_| ctx.random_element(rng)).collect();
            let v = Self::span(ctx, &gens)?;
            if v.dim == k {
                return Ok(v);
            }
        }
    }

    /// `v⁻¹V` for the first canonical basis vector `v`, so the result contains 1.
    pub fn normalized(&self) -> Self {
        match self.basis().first() {
            Some(v) => self.scale(&v.inverse().expect("nonzero")).expect("same field"),
            None => self.clone(),
        }
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&self.ctx.one())
    }

    /// Stable 64-bit FNV-1a fingerprint of the field and reduced rows.
    pub fn id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        };
        feed(self.ctx.p() as u64);
        feed(self.ctx.a() as u64);
        feed(self.ctx.n() as u64);
        for &c in self.ctx.modulus() {
            feed(c as u64);
        }
        for row in self.ech.rows() {
            for &c in row {
                feed(c as u64);
            }
        }
        format!("{h:016x}")
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            field: self.ctx.spec(),
            basis: self
                .basis()
                .iter()
                .map(|b| b.coeffs().iter().map(|&c| c as u64).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &SubspaceJson) -> Result<Self> {
        let ctx = FieldCtx::from_spec(&json.field)?;
        Self::from_json_in(&ctx, json)
    }

    /// Reads the basis into an existing context (the spec must match).
    pub fn from_json_in(ctx: &FieldCtx, json: &SubspaceJson) -> Result<Self> {
        if FieldCtx::from_spec(&json.field)? != *ctx {
            return Err(Error::MixedContexts);
        }
        let gens = json.basis.iter().map(|c| ctx.element(c)).collect::<Result<Vec<_>>>()?;
        Self::span(ctx, &gens)
    }
}

/// One level `V^s` of a span chain.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub s: usize,
    pub space: Subspace,
    pub dim: usize,
    pub h: usize,
}

#[derive(Clone, Debug)]
pub struct SpanChain {
    pub levels: Vec<ChainLevel>,
    /// Least `s` with `V^s = V^{s+1}`, if reached within the cap.
    pub t_bar: Option<usize>,
    pub truncated: bool,
    /// `[F_q(V) : F_q]`.
    pub generated_field_degree: usize,
}

impl SpanChain {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    pub fn level(&self, s: usize) -> Option<&ChainLevel> {
        self.levels.get(s.checked_sub(1)?)
    }
}

/// Computes `V, V^2, …` until `V^s = V^{s+1}` or `s = max_s`. When the chain
/// stabilizes, the last listed level is `V^{t̄}`.
pub fn span_chain(v: &Subspace, max_s: usize) -> Result<SpanChain> {
    if v.is_zero() {
        return invalid("span chain of the zero subspace");
    }
    let mut levels = vec![ChainLevel {
        s: 1,
        dim: v.dim(),
        h: v.stabilizer(),
        space: v.clone(),
    }];
    let mut t_bar = None;
    while levels.len() < max_s {
        let last = &levels.last().expect("nonempty").space;
        let next = last.product(v)?;
        if next == *last {
            t_bar = Some(levels.len());
            break;
        }
        let s = levels.len() + 1;
        levels.push(ChainLevel {
            s,
            dim: next.dim(),
            h: next.stabilizer(),
            space: next,
        });
    }
    if t_bar.is_none() {
        // one more product decides whether the last level is already stable
        let last = &levels.last().expect("nonempty").space;
        if last.product(v)? == *last {
            t_bar = Some(levels.len());
        }
    }
    Ok(SpanChain {
        truncated: t_bar.is_none(),
        levels,
        t_bar,
        generated_field_degree: v.generated_field(),
    })
}

/// Kneser-type inequality `dim(AB) ≥ min{n, dim A + dim B - h(AB)}`; returns
/// both sides.
pub fn kneser_sides(a: &Subspace, b: &Subspace) -> Result<(usize, usize)> {
    let ab = a.product(b)?;
    let rhs = (a.dim() + b.dim()).saturating_sub(ab.stabilizer()).min(a.ctx().n());
    Ok((ab.dim(), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, GeneratorOptions};
    use proptest::prelude::*;

    fn gamma(ctx: &FieldCtx, over: usize) -> FieldElement {
        ctx.find_generator(over, &GeneratorOptions::default()).unwrap()
    }

    #[test]
    fn spans() {
        let ctx = make_field(3, 1, 6, None).unwrap();
        assert_eq!(Subspace::span(&ctx, &[]).unwrap().dim(), 0);
        let g = gamma(&ctx, 1);
        let pw: Vec<_> = (0..4).map(|i| g.pow(i)).collect();
        assert_eq!(Subspace::span(&ctx, &pw).unwrap().dim(), 4);
        let u = ctx.x();
        let v = Subspace::span(&ctx, &[u.clone(), u.scale_fp(2)]).unwrap();
        assert_eq!(v.dim(), 1);
        let other = make_field(3, 1, 5, None).unwrap();
        assert_eq!(Subspace::span(&ctx, &[other.one()]).unwrap_err(), Error::MixedContexts);
    }

    #[test]
    fn products_and_stabilizers() {
        let ctx = make_field(2, 1, 6, None).unwrap();
        let f8 = Subspace::subfield(&ctx, 3).unwrap();
        assert_eq!(f8.product(&f8).unwrap(), f8);
        assert_eq!(f8.stabilizer(), 3);
        assert_eq!(f8.orbit_size(), BigUint::from(9u32));
        let g = gamma(&ctx, 1);
        let line = Subspace::span(&ctx, &[ctx.one(), g.clone()]).unwrap();
        let sq = line.product(&line).unwrap();
        assert_eq!(sq, Subspace::span(&ctx, &[ctx.one(), g.clone(), g.square()]).unwrap());
        assert_eq!(line.generated_field(), 6);
        let whole = Subspace::whole(&ctx);
        assert_eq!(whole.field_of_linearity(), 6);
        assert_eq!(whole.orbit_size(), BigUint::from(1u32));
        // a line γ F_{q^k}
        let f4 = Subspace::subfield(&ctx, 2).unwrap();
        assert_eq!(f4.scale(&g).unwrap().field_of_linearity(), 2);
        assert!(f4.scale(&ctx.zero()).is_err());
    }

    #[test]
    fn coprime_dimension_has_trivial_stabilizer() {
        let ctx = make_field(2, 1, 9, None).unwrap();
        for seed in 0..30 {
            for k in [2, 4, 5, 7] {
                let v = Subspace::random(&ctx, k, seed).unwrap();
                assert_eq!(v.stabilizer(), 1);
            }
        }
    }

    #[test]
    fn chain_of_subfield_is_immediate() {
        let ctx = make_field(2, 1, 6, None).unwrap();
        let f8 = Subspace::subfield(&ctx, 3).unwrap();
        let chain = span_chain(&f8, 6).unwrap();
        assert_eq!(chain.t_bar, Some(1));
        assert_eq!(chain.dims(), vec![3]);
    }

    #[test]
    fn generated_field_matches_chain_limit() {
        for (p, n) in [(2, 6), (2, 8), (3, 4)] {
            let ctx = make_field(p, 1, n, None).unwrap();
            for seed in 0..15 {
                let v = Subspace::random(&ctx, 2, seed).unwrap().normalized();
                assert!(v.contains_one());
                let chain = span_chain(&v, n as usize + 1).unwrap();
                assert_eq!(chain.levels.last().unwrap().dim, v.generated_field());
                assert_eq!(chain.generated_field_degree, v.generated_field());
            }
        }
    }

    #[test]
    fn projective_points_counts() {
        let ctx = make_field(3, 1, 5, None).unwrap();
        let v = Subspace::random(&ctx, 3, 1).unwrap();
        let pts = v.projective_points().unwrap();
        assert_eq!(pts.len(), 13);
        let keys: std::collections::HashSet<_> = pts.iter().map(|x| x.key()).collect();
        assert_eq!(keys.len(), 13);
        assert!(pts.iter().all(|x| v.contains(x)));
        // non-prime q
        let ctx = make_field(2, 2, 3, None).unwrap();
        let v = Subspace::random(&ctx, 2, 3).unwrap();
        assert_eq!(v.fp_rows().len(), 4);
        assert_eq!(v.projective_points().unwrap().len(), 5);
    }

    #[test]
    fn canonical_form_is_set_equality_on_small_spaces() {
        // all subspaces of dimension <= 2 in F_{2^6}, as sets of elements
        let ctx = make_field(2, 1, 6, None).unwrap();
        let elems: Vec<_> = (1..64u128).map(|i| ctx.element_from_index(i)).collect();
        let mut by_form = std::collections::HashMap::new();
        for (i, x) in elems.iter().enumerate() {
            for y in &elems[i..] {
                let v = Subspace::span(&ctx, &[x.clone(), y.clone()]).unwrap();
                let mut set: Vec<u128> = (0..64u128)
                    .filter(|&j| v.contains(&ctx.element_from_index(j)))
                    .collect();
                set.sort();
                let prev = by_form.entry(v.fp_rows().to_vec()).or_insert(set.clone());
                assert_eq!(*prev, set);
            }
        }
        let distinct_sets: std::collections::HashSet<_> = by_form.values().collect();
        assert_eq!(distinct_sets.len(), by_form.len());
        // 63 points + 651 lines
        assert_eq!(by_form.len(), 63 + 651);
    }

    #[test]
    fn random_is_deterministic() {
        let ctx = make_field(2, 1, 9, None).unwrap();
        assert_eq!(
            Subspace::random(&ctx, 3, 42).unwrap(),
            Subspace::random(&ctx, 3, 42).unwrap()
        );
        assert_eq!(Subspace::random(&ctx, 9, 1).unwrap(), Subspace::whole(&ctx));
        assert_eq!(
            Subspace::random(&ctx, 1, 1).unwrap().projective_points().unwrap().len(),
            1
        );
    }

    #[test]
    fn json_roundtrip() {
        let ctx = make_field(3, 1, 4, None).unwrap();
        let v = Subspace::random(&ctx, 2, 9).unwrap();
        let text = serde_json::to_string(&v.to_json()).unwrap();
        let back: SubspaceJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Subspace::from_json(&back).unwrap(), v);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn modular_law_and_kneser(seed in any::<u64>(), ka in 1usize..5, kb in 1usize..5) {
            let ctx = make_field(2, 1, 8, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Subspace::random_with(&ctx, ka, &mut rng).unwrap();
            let b = Subspace::random_with(&ctx, kb, &mut rng).unwrap();
            let s = a.sum(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            prop_assert_eq!(a.dim() + b.dim(), s.dim() + i.dim());
            prop_assert!(i.is_subspace_of(&a) && i.is_subspace_of(&b));
            let (lhs, rhs) = kneser_sides(&a.normalized(), &b.normalized()).unwrap();
            prop_assert!(lhs >= rhs);
            let (lhs, rhs) = kneser_sides(&a, &b).unwrap();
            prop_assert!(lhs >= rhs);
            // products distribute over sums
            let c = Subspace::random_with(&ctx, 2, &mut rng).unwrap();
            prop_assert_eq!(
                s.product(&c).unwrap(),
                a.product(&c).unwrap().sum(&b.product(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn scale_and_frobenius_preserve_dimension(seed in any::<u64>(), i in 0usize..12) {
            let ctx = make_field(3, 2, 3, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = Subspace::random_with(&ctx, 2, &mut rng).unwrap();
            let mut alpha = ctx.random_element(&mut rng);
            if alpha.is_zero() { alpha = ctx.one(); }
            let w = v.scale(&alpha).unwrap();
            prop_assert_eq!(w.dim(), 2);
            prop_assert_eq!(v.frob_image(i).dim(), 2);
            prop_assert_eq!(
                v.intersection_dim_scaled(&alpha),
                v.intersect(&w).unwrap().dim()
            );
        }

        #[test]
        fn chain_invariants(seed in any::<u64>(), k in 2usize..4) {
            let ctx = make_field(2, 1, 12, None).unwrap();
            let v = Subspace::random(&ctx, k, seed).unwrap();
            let chain = span_chain(&v, 12).unwrap();
            let nested = span_chain(&v.normalized(), 12).unwrap();
            for w in nested.levels.windows(2) {
                prop_assert!(w[0].dim < w[1].dim);
            }
            for w in chain.levels.windows(2) {
                prop_assert!(w[0].dim <= w[1].dim);
                prop_assert!(w[0].h <= w[1].h);
                prop_assert_eq!(w[1].h % w[0].h, 0);
            }
            for l in &chain.levels {
                let cap = arith::multiset_count(k as u64, l.s as u64).min(12);
                prop_assert!(l.dim as u128 <= cap);
            }
        }
    }
}
