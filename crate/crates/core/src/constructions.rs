//! Named builders. Each returns the subspace together with a record of the
//! parameters, the elements chosen, and every claimed property re-measured
//! at build time. A claim that does not survive measurement is an error.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith;
use crate::brset::is_br_set;
use crate::error::{invalid, Error, Result};
use crate::field::{make_field, ElementJson, FieldCtx, FieldElement, FieldSpec, GeneratorOptions, NormConstraint};
use crate::fp_poly::{irreducible_supply, random_irreducibles, FpPoly};
use crate::linalg::Echelon;
use crate::multiset::Multisets;
use crate::qpoly::{LinearizedPoly, PolyJson};
use crate::sidon::{is_max_span, is_r_sidon, multiset_budget_needed};
use crate::subspace::{span_chain, Subspace, SubspaceJson};

/// Brute-force cap used when a builder re-checks an `r`-Sidon claim.
pub const CLAIM_BUDGET: u128 = 2_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    /// Largest degree among the irreducibles (`Δ`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub property: String,
    /// `null` for quantities that are reported but not predicted.
    pub expected: Value,
    pub measured: Value,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexedPoly {
    /// 1-based multi-index `i_1 ≤ … ≤ i_r`.
    pub index: Vec<usize>,
    pub coeffs: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionRecord {
    pub name: String,
    pub field: FieldSpec,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolyJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub irreducibles: Vec<IndexedPoly>,
    /// The `f_j` whose evaluations span the space.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brset: Option<Vec<u64>>,
    pub subspace: SubspaceJson,
    pub claims: Vec<Claim>,
    #[serde(skip)]
    pub space: Subspace,
    #[serde(skip)]
    pub gamma_element: Option<FieldElement>,
    #[serde(skip)]
    pub delta_element: Option<FieldElement>,
    #[serde(skip)]
    pub poly: Option<LinearizedPoly>,
}

impl ConstructionRecord {
    fn new(name: &str, params: Params, space: Subspace) -> Self {
        Self {
            name: name.into(),
            field: space.ctx().spec(),
            params,
            gamma: None,
            delta: None,
            polynomial: None,
            irreducibles: Vec::new(),
            generators: Vec::new(),
            brset: None,
            subspace: space.to_json(),
            claims: Vec::new(),
            space,
            gamma_element: None,
            delta_element: None,
            poly: None,
        }
    }

    fn with_gamma(mut self, g: &FieldElement) -> Self {
        self.gamma = Some(g.to_json());
        self.gamma_element = Some(g.clone());
        self
    }

    fn with_poly(mut self, f: &LinearizedPoly) -> Self {
        self.polynomial = Some(f.to_json());
        self.poly = Some(f.clone());
        self
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.space.ctx()
    }

    /// Records a predicted property; fails loudly when it does not hold.
    fn claim(&mut self, property: impl Into<String>, expected: Value, measured: Value) -> Result<()> {
        let property = property.into();
        let holds = expected == measured;
        self.claims.push(Claim {
            property: property.clone(),
            expected: expected.clone(),
            measured: measured.clone(),
            holds,
        });
        if holds {
            Ok(())
        } else {
            Err(Error::ClaimMismatch(format!(
                "{}: {property} expected {expected}, measured {measured}",
                self.name
            )))
        }
    }

    /// Records a measured quantity with no prediction attached.
    fn report(&mut self, property: impl Into<String>, measured: Value) {
        self.claims.push(Claim {
            property: property.into(),
            expected: Value::Null,
            measured,
            holds: true,
        });
    }

    pub fn claim_value(&self, property: &str) -> Option<&Value> {
        self.claims.iter().find(|c| c.property == property).map(|c| &c.measured)
    }

    /// `r`-Sidon re-check when the brute force fits in `budget`, otherwise a
    /// "skipped" entry.
    fn claim_r_sidon(&mut self, r: usize, expected: bool, budget: u128) -> Result<()> {
        let property = format!("{r}-sidon");
        if multiset_budget_needed(&self.space, r) > budget {
            self.report(property, json!("skipped: budget"));
            return Ok(());
        }
        let verdict = is_r_sidon(&self.space, r, budget)?.verdict;
        self.claim(property, json!(expected), json!(verdict))
    }
}

/// `F_{q^n}` with the default modulus.
pub fn field_for(q: u64, n: usize) -> Result<FieldCtx> {
    let (p, a) = arith::prime_power(q).ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?;
    make_field(p, a, n as u32, None)
}

fn require_divides(ctx: &FieldCtx, k: usize) -> Result<usize> {
    if k == 0 || !ctx.n().is_multiple_of(k) {
        return invalid(format!("k = {k} must divide n = {}", ctx.n()));
    }
    Ok(ctx.n() / k)
}

// ---------------------------------------------------------------------------
// monomial

#[derive(Clone, Debug)]
pub struct MonomialParams {
    pub q: u64,
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub r: usize,
    pub seed: u64,
    pub primitive: bool,
    /// Force `N_{q^n/q}(γ) = (-1)^n` (`Some(true)`) or `≠` (`Some(false)`).
    pub sign_norm: Option<bool>,
    pub budget: u128,
}

impl MonomialParams {
    pub fn new(q: u64, k: usize, s: usize, t: usize, r: usize) -> Self {
        Self {
            q,
            k,
            s,
            t,
            r,
            seed: 0,
            primitive: false,
            sign_norm: None,
            budget: CLAIM_BUDGET,
        }
    }
}

/// Whether `x ∈ F_{q^k}^*` is a `(q-1)`-th power in `F_{q^k}`. Small fields
/// are enumerated; larger ones use the index-`(q-1)` subgroup test
/// `x^{(q^k-1)/(q-1)} = 1`.
pub struct PowerTest {
    k: usize,
    table: Option<HashSet<crate::field::ElementKey>>,
}

const POWER_ENUM_LIMIT: u64 = 1 << 16;

impl PowerTest {
    pub fn new(ctx: &FieldCtx, k: usize) -> Result<Self> {
        ctx.check_divisor(k)?;
        let size = ctx.q().checked_pow(k as u32);
        let table = match size {
            Some(sz) if sz <= POWER_ENUM_LIMIT => {
                let e = ctx.q() - 1;
                Some(
                    ctx.subfield_elements(k)?
                        .iter()
                        .filter(|y| !y.is_zero())
                        .map(|y| y.pow(e).key())
                        .collect(),
                )
            }
            _ => None,
        };
        Ok(Self { k, table })
    }

    pub fn is_power(&self, x: &FieldElement) -> Result<bool> {
        if x.is_zero() || !x.in_subfield(self.k)? {
            return invalid(format!("expected a unit of F_(q^{})", self.k));
        }
        Ok(match &self.table {
            Some(t) => t.contains(&x.key()),
            None => x
                .pow_big(&((arith::big_pow(x.ctx().q(), self.k as u32) - 1u32) / (x.ctx().q() - 1)))
                .is_one(),
        })
    }
}

/// `V = {u + u^{q^s} γ : u ∈ F_{q^k}} ⊆ F_{q^{kt}}`.
///
/// With `t ≥ r+1` any `γ` with `F_{q^k}(γ) = F_{q^n}` works. With `t = r` the
/// constant term of the minimal polynomial of `γ` over `F_{q^k}` must not be
/// a `(q-1)`-th power in `F_{q^k}`, which no element satisfies when `q = 2`.
pub fn monomial(p: &MonomialParams) -> Result<ConstructionRecord> {
    let MonomialParams { q, k, s, t, r, .. } = *p;
    if k == 0 || r == 0 || t == 0 {
        return invalid("k, t and r must be positive");
    }
    if arith::gcd(s as u64, k as u64) != 1 {
        return invalid(format!("gcd(s, k) = gcd({s}, {k}) must be 1"));
    }
    let norm_variant = if t > r {
        false
    } else if t == r {
        true
    } else {
        return invalid(format!(
            "t = {t} < r = {r}: need t ≥ r+1, or t = r with the norm condition"
        ));
    };
    let ctx = field_for(q, k * t)?;
    let mut constraint = vec![format!("F_(q^{k})(γ) = F_(q^n)")];
    let sign = NormConstraint::sign(&ctx);
    if let Some(want) = p.sign_norm {
        constraint.push(format!("N(γ) {} (-1)^n", if want { "=" } else { "≠" }));
        if q == 2 && !want {
            return Err(Error::NoSuchElement {
                constraint: constraint.join(", "),
            });
        }
    }
    let power_test = if norm_variant {
        constraint.push("minimal polynomial constant over F_(q^k) is not a (q-1)-th power".into());
        if q == 2 {
            // every element of F_{2^k} is a first power
            return Err(Error::NoSuchElement {
                constraint: constraint.join(", "),
            });
        }
        Some(PowerTest::new(&ctx, k)?)
    } else {
        None
    };
    let gamma = ctx.search_generator(k, p.primitive, p.seed, &constraint.join(", "), |g| {
        if let Some(want) = p.sign_norm {
            if (g.norm(1).expect("1 | n") == sign.value) != want {
                return false;
            }
        }
        match &power_test {
            Some(pt) => {
                let c0 = g.minimal_polynomial(k).expect("k | n")[0].clone();
                !pt.is_power(&c0).expect("nonzero element of F_{q^k}")
            }
            None => true,
        }
    })?;
    monomial_in(&ctx, p, &gamma)
}

/// [`monomial`] with a caller-chosen `γ`; the arithmetic constraints are the
/// same.
pub fn monomial_in(ctx: &FieldCtx, p: &MonomialParams, gamma: &FieldElement) -> Result<ConstructionRecord> {
    let MonomialParams { q, k, s, t, r, .. } = *p;
    if ctx.q() != q || ctx.n() != k * t {
        return invalid("field does not match (q, k·t)");
    }
    if gamma.degree_over(k)? != t {
        return invalid("γ must generate F_(q^n) over F_(q^k)");
    }
    let f = LinearizedPoly::monomial(ctx, k, s)?;
    let v = f.v_f_gamma(gamma)?;
    let params = Params {
        q,
        k,
        n: k * t,
        r: Some(r),
        s: Some(s),
        t: Some(t),
        variant: Some(if t > r { "free" } else { "norm" }.into()),
        seed: p.seed,
        ..Default::default()
    };
    let mut rec = ConstructionRecord::new("monomial", params, v)
        .with_gamma(gamma)
        .with_poly(&f);
    rec.claim("dim V", json!(k), json!(rec.space.dim()))?;
    let mut power = rec.space.clone();
    for rr in 2..t {
        power = power.product(&rec.space)?;
        let property = format!("dim V^{rr}");
        if k >= 3 {
            rec.claim(property, json!(rr * k), json!(power.dim()))?;
        } else {
            // rk exceeds the ceiling C(k+r-1, r) when k ≤ 2
            rec.report(property, json!(power.dim()));
        }
    }
    rec.claim_r_sidon(r, true, p.budget)?;
    Ok(rec)
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub r: usize,
    pub dim: usize,
    /// `V^r` equals `γF_{q^k} ⊕ … ⊕ γ^{r-1}F_{q^k} ⊕ V_{x^{q^s}, γ^r}` as sets.
    pub set_equal: bool,
    /// The summands have dimensions adding up to the dimension of their sum.
    pub direct: bool,
    /// `h(V^r)`.
    pub stabilizer: usize,
    pub norm_is_sign: bool,
    pub t_bar: Option<usize>,
    pub t_bar_expected: usize,
    pub holds: bool,
}

/// Rebuilds the `r`-span of a monomial record from its summands and checks
/// equality, directness, the trivial stabilizer, and `t̄` against the norm of
/// `γ`.
pub fn monomial_decomposition_check(rec: &ConstructionRecord) -> Result<Decomposition> {
    if rec.name != "monomial" {
        return invalid("record is not a monomial construction");
    }
    let (k, s, t, r) = (
        rec.params.k,
        rec.params.s.expect("monomial"),
        rec.params.t.expect("monomial"),
        rec.params.r.expect("monomial"),
    );
    if r + 1 > t {
        return invalid(format!("decomposition needs r ≤ t-1 (r = {r}, t = {t})"));
    }
    let ctx = rec.ctx();
    let gamma = rec.gamma_element.as_ref().expect("monomial records carry γ");
    let v = &rec.space;
    let vr = v.power(r);

    let fqk = Subspace::subfield(ctx, k)?;
    let mut parts = Vec::new();
    let mut gi = ctx.one();
    for _ in 1..r {
        gi = &gi * gamma;
        parts.push(fqk.scale(&gi)?);
    }
    let tail = LinearizedPoly::monomial(ctx, k, s)?.v_f_gamma(&gamma.pow(r as u64))?;
    parts.push(tail);
    let mut sum = Subspace::zero(ctx);
    for part in &parts {
        sum = sum.sum(part)?;
    }
    let direct = parts.iter().map(Subspace::dim).sum::<usize>() == sum.dim();
    let set_equal = sum == vr;
    let stabilizer = vr.stabilizer();

    let norm_is_sign = gamma.norm(1)? == NormConstraint::sign(ctx).value;
    let t_bar_expected = if norm_is_sign { t + 1 } else { t };
    let t_bar = span_chain(v, t + 2)?.t_bar;
    let holds = set_equal && direct && stabilizer == 1 && t_bar == Some(t_bar_expected);
    Ok(Decomposition {
        r,
        dim: vr.dim(),
        set_equal,
        direct,
        stabilizer,
        norm_is_sign,
        t_bar,
        t_bar_expected,
        holds,
    })
}

// ---------------------------------------------------------------------------
// binomials

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `x^{q^s} + δ x^{q^{2s}}`
    Mid,
    /// `x^{q^s} + δ x^{q^{s(k-1)}}`
    End,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Mid => "mid",
            Variant::End => "end",
        }
    }

    pub fn second_exponent(self, k: usize, s: usize) -> usize {
        match self {
            Variant::Mid => 2 * s,
            Variant::End => s * (k - 1),
        }
    }

    /// Whether `δ` must satisfy `N_{q^k/q}(δ) ≠ 1`.
    pub fn needs_norm(self, k: usize) -> bool {
        self == Variant::End && k.is_multiple_of(2)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mid" => Ok(Variant::Mid),
            "end" => Ok(Variant::End),
            _ => invalid(format!("unknown variant `{s}` (expected mid or end)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BinomialParams {
    pub q: u64,
    pub k: usize,
    pub s: usize,
    pub t: usize,
    pub variant: Variant,
    /// Absolute coordinates of `δ`; drawn from the seed when absent.
    pub delta: Option<Vec<u64>>,
    /// Measure `dim V^r` for this `r`.
    pub r: Option<usize>,
    pub primitive: bool,
    pub seed: u64,
}

impl BinomialParams {
    pub fn new(q: u64, k: usize, s: usize, t: usize, variant: Variant) -> Self {
        Self {
            q,
            k,
            s,
            t,
            variant,
            delta: None,
            r: None,
            primitive: true,
            seed: 0,
        }
    }
}

/// Whether `δ` is admissible for the variant over `F_{q^k}`.
pub fn delta_admissible(variant: Variant, k: usize, delta: &FieldElement) -> Result<bool> {
    if delta.is_zero() || !delta.in_subfield(k)? {
        return Ok(false);
    }
    Ok(!variant.needs_norm(k) || !delta.relative_norm(k, 1)?.is_one())
}

/// Every admissible `δ` of `F_{q^k}`, in index order.
pub fn admissible_deltas(ctx: &FieldCtx, variant: Variant, k: usize) -> Result<Vec<FieldElement>> {
    let mut out = Vec::new();
    for d in ctx.subfield_elements(k)? {
        if delta_admissible(variant, k, &d)? {
            out.push(d);
        }
    }
    Ok(out)
}

/// `V_{f,γ}` for `f = x^{q^s} + δ x^{q^{2s}}` (mid) or `x^{q^s} + δ x^{q^{s(k-1)}}` (end).
pub fn binomial_family(p: &BinomialParams) -> Result<ConstructionRecord> {
    if p.k == 0 || p.t == 0 {
        return invalid("k and t must be positive");
    }
    let ctx = field_for(p.q, p.k * p.t)?;
    let delta = match &p.delta {
        Some(c) => ctx.element(c)?,
        None => {
            if p.variant.needs_norm(p.k) && p.q == 2 {
                return Err(Error::NoSuchElement {
                    constraint: "N_(q^k/q)(δ) ≠ 1 over F_2".into(),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
            loop {
                let d = ctx.random_subfield_element(p.k, &mut rng)?;
                if delta_admissible(p.variant, p.k, &d)? {
                    break d;
                }
            }
        }
    };
    let gamma = ctx.find_generator(
        p.k,
        &GeneratorOptions {
            primitive: p.primitive,
            norm: None,
            seed: p.seed,
        },
    )?;
    binomial_in(&ctx, p, &delta, &gamma)
}

/// [`binomial_family`] in an existing field with explicit `δ` and `γ`.
pub fn binomial_in(
    ctx: &FieldCtx,
    p: &BinomialParams,
    delta: &FieldElement,
    gamma: &FieldElement,
) -> Result<ConstructionRecord> {
    let (k, s) = (p.k, p.s);
    let t = require_divides(ctx, k)?;
    if ctx.q() != p.q || t != p.t {
        return invalid("field does not match (q, k·t)");
    }
    if delta.is_zero() {
        return invalid("δ must be nonzero");
    }
    if !delta.in_subfield(k)? {
        return invalid(format!("δ must lie in F_(q^{k})"));
    }
    if p.variant.needs_norm(k) && delta.relative_norm(k, 1)?.is_one() {
        return invalid("this variant with even k needs N_(q^k/q)(δ) ≠ 1");
    }
    if gamma.degree_over(k)? != t {
        return invalid("γ must generate F_(q^n) over F_(q^k)");
    }
    let f = LinearizedPoly::binomial(ctx, k, s, delta, p.variant.second_exponent(k, s))?;
    let v = f.v_f_gamma(gamma)?;
    let params = Params {
        q: p.q,
        k,
        n: ctx.n(),
        r: p.r,
        s: Some(s),
        t: Some(t),
        variant: Some(p.variant.name().into()),
        seed: p.seed,
        ..Default::default()
    };
    let mut rec = ConstructionRecord::new("binomial", params, v)
        .with_gamma(gamma)
        .with_poly(&f);
    rec.delta = Some(delta.to_json());
    rec.delta_element = Some(delta.clone());
    rec.claim("dim V", json!(k), json!(rec.space.dim()))?;
    if let Some(r) = p.r {
        let d = rec.space.power(r).dim();
        rec.report(format!("dim V^{r}"), json!(d));
    }
    Ok(rec)
}

// ---------------------------------------------------------------------------
// trace

#[derive(Clone, Debug)]
pub struct TraceParams {
    pub q: u64,
    pub k: usize,
    pub t: usize,
    /// Largest `r` whose span dimension is claimed; defaults to `t-1`.
    pub r: Option<usize>,
    pub primitive: bool,
    pub seed: u64,
}

impl TraceParams {
    pub fn new(q: u64, k: usize, t: usize) -> Self {
        Self {
            q,
            k,
            t,
            r: None,
            primitive: false,
            seed: 0,
        }
    }
}

/// Projective points of `F_{q^k} \ F_q`, canonical representatives.
pub fn projective_outside_base(ctx: &FieldCtx, k: usize) -> Result<Vec<FieldElement>> {
    Ok(ctx
        .subfield_elements(k)?
        .into_iter()
        .filter(|a| !a.is_zero() && !a.in_subfield(1).expect("1 | n") && a.projective_normalize() == *a)
        .collect())
}

/// `V = {u + Tr_{q^k/q}(u) γ : u ∈ F_{q^k}}`.
pub fn trace_space(p: &TraceParams) -> Result<ConstructionRecord> {
    if p.t < 2 {
        return invalid("t must be at least 2");
    }
    let ctx = field_for(p.q, p.k * p.t)?;
    let gamma = ctx.find_generator(
        p.k,
        &GeneratorOptions {
            primitive: p.primitive,
            norm: None,
            seed: p.seed,
        },
    )?;
    trace_in(&ctx, p, &gamma)
}

pub fn trace_in(ctx: &FieldCtx, p: &TraceParams, gamma: &FieldElement) -> Result<ConstructionRecord> {
    let k = p.k;
    let t = require_divides(ctx, k)?;
    if t != p.t || t < 2 {
        return invalid("field does not match (q, k·t) with t ≥ 2");
    }
    if gamma.degree_over(k)? != t {
        return invalid("γ must generate F_(q^n) over F_(q^k)");
    }
    let f = LinearizedPoly::trace(ctx, k)?;
    let v = f.v_f_gamma(gamma)?;
    let r_max = p.r.unwrap_or(t - 1);
    let params = Params {
        q: p.q,
        k,
        n: ctx.n(),
        r: p.r,
        t: Some(t),
        seed: p.seed,
        ..Default::default()
    };
    let mut rec = ConstructionRecord::new("trace", params, v)
        .with_gamma(gamma)
        .with_poly(&f);
    rec.claim("dim V", json!(k), json!(rec.space.dim()))?;

    let alphas = projective_outside_base(ctx, k)?;
    let dims: Vec<usize> = alphas.iter().map(|a| rec.space.intersection_dim_scaled(a)).collect();
    let lo = dims.iter().min().copied();
    let hi = dims.iter().max().copied();
    rec.report("alphas swept", json!(alphas.len()));
    if k >= 2 {
        rec.claim("min dim(V ∩ αV), α ∈ F_(q^k)\\F_q", json!(k - 2), json!(lo))?;
        rec.claim("max dim(V ∩ αV), α ∈ F_(q^k)\\F_q", json!(k - 2), json!(hi))?;
    }
    if k > 3 {
        // an α with dim(V ∩ αV) ≥ 2 already refutes the Sidon property
        rec.claim("sidon", json!(false), json!(!hi.is_some_and(|d| d >= 2)))?;
    }
    if r_max + 1 > t {
        return invalid(format!("span claims need t ≥ r+1 (r = {r_max}, t = {t})"));
    }
    let mut power = rec.space.clone();
    for rr in 2..=r_max {
        power = power.product(&rec.space)?;
        rec.claim(format!("dim V^{rr}"), json!(rr * k), json!(power.dim()))?;
    }
    Ok(rec)
}

// ---------------------------------------------------------------------------
// max-span constructions

#[derive(Clone, Debug)]
pub struct BrsetParams {
    pub set: Vec<u64>,
    pub q: u64,
    pub r: usize,
    pub n: usize,
    /// Absolute coordinates of `γ`; a generator is searched for otherwise.
    pub gamma: Option<Vec<u64>>,
    pub seed: u64,
    pub budget: u128,
}

impl BrsetParams {
    pub fn new(set: &[u64], q: u64, r: usize, n: usize) -> Self {
        Self {
            set: set.to_vec(),
            q,
            r,
            n,
            gamma: None,
            seed: 0,
            budget: CLAIM_BUDGET,
        }
    }
}

/// `V = ⟨γ^{n_i} : n_i ∈ S⟩` for a `B_r`-set `S ⊆ [0, h]` in `Z` and `n > rh`.
pub fn maxspan_from_brset(p: &BrsetParams) -> Result<ConstructionRecord> {
    if p.r == 0 {
        return invalid("r must be positive");
    }
    let check = is_br_set(&p.set, p.r, None, p.budget.max(1 << 24))?;
    if let Some((left, right)) = check.witness {
        return Err(Error::NotBrSet { r: p.r, left, right });
    }
    let h = *p.set.iter().max().expect("nonempty");
    if (p.n as u128) <= p.r as u128 * h as u128 {
        return invalid(format!("need n > r·h = {}", p.r as u64 * h));
    }
    let ctx = field_for(p.q, p.n)?;
    let gamma = match &p.gamma {
        Some(c) => {
            let g = ctx.element(c)?;
            if g.degree_over(1)? != p.n {
                return invalid("γ must generate F_(q^n) over F_q");
            }
            g
        }
        None => ctx.find_generator(
            1,
            &GeneratorOptions {
                seed: p.seed,
                ..Default::default()
            },
        )?,
    };
    let mut set = p.set.clone();
    set.sort_unstable();
    let gens: Vec<_> = set.iter().map(|&e| gamma.pow(e)).collect();
    let v = Subspace::span(&ctx, &gens)?;
    let k = set.len();
    let params = Params {
        q: p.q,
        k,
        n: p.n,
        r: Some(p.r),
        seed: p.seed,
        ..Default::default()
    };
    let mut rec = ConstructionRecord::new("maxspan-brset", params, v).with_gamma(&gamma);
    rec.brset = Some(set);
    rec.claim("dim V", json!(k), json!(rec.space.dim()))?;
    let expected = arith::multiset_count(k as u64, p.r as u64) as u64;
    let measured = rec.space.power(p.r).dim();
    rec.claim(format!("dim V^{}", p.r), json!(expected), json!(measured))?;
    rec.claim("max-span", json!(true), json!(is_max_span(&rec.space, p.r)))?;
    rec.claim_r_sidon(p.r, true, p.budget)?;
    Ok(rec)
}

/// The twenty monic quadratics over `F_7` of the worked example, as
/// `(c_0, c_1)` for `x^2 + c_1 x + c_0`, in lexicographic order of their
/// multi-indices `111, 112, …, 444`.
pub const F7_QUADRATICS: [(u64, u64); 20] = [
    (1, 4),
    (2, 2),
    (5, 2),
    (6, 4),
    (3, 5),
    (5, 5),
    (5, 4),
    (6, 6),
    (1, 3),
    (6, 3),
    (2, 0),
    (6, 1),
    (4, 0),
    (3, 1),
    (5, 3),
    (2, 5),
    (4, 1),
    (1, 0),
    (3, 6),
    (4, 6),
];

pub fn f7_quadratics() -> Vec<FpPoly> {
    F7_QUADRATICS
        .iter()
        .map(|&(c0, c1)| FpPoly::new(7, [c0, c1, 1]))
        .collect()
}

/// Nondecreasing `r`-tuples over `{0, …, k-1}` in lexicographic order.
pub fn lex_multi_indices(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<_> = Multisets::new(k, r).collect();
    all.sort();
    all
}

#[derive(Clone, Debug)]
pub enum IrreducibleSource {
    /// Seeded draw with the smallest sufficient maximum degree.
    Seeded,
    /// Explicit list, matched to multi-indices in lexicographic order.
    Given(Vec<FpPoly>),
}

#[derive(Clone, Debug)]
pub struct IrreducibleParams {
    pub q: u64,
    pub k: usize,
    pub r: usize,
    pub source: IrreducibleSource,
    /// Overrides the default `n = rΔ·C(k+r-2, r) + 1`; must exceed the bound.
    pub n: Option<usize>,
    pub seed: u64,
}

impl IrreducibleParams {
    pub fn new(q: u64, k: usize, r: usize) -> Self {
        Self {
            q,
            k,
            r,
            source: IrreducibleSource::Seeded,
            n: None,
            seed: 0,
        }
    }

    /// The worked `q = 7, k = 4, r = 3` instance with the built-in list.
    pub fn f7_example() -> Self {
        Self {
            source: IrreducibleSource::Given(f7_quadratics()),
            ..Self::new(7, 4, 3)
        }
    }
}

/// `f_j = Π_{I ∌ j} p_I` over the multi-indices `I`, matched in order to `polys`.
pub fn avoiding_products(polys: &[FpPoly], k: usize, r: usize) -> Vec<FpPoly> {
    let idx = lex_multi_indices(k, r);
    let p = polys[0].characteristic();
    (0..k)
        .map(|j| {
            idx.iter()
                .zip(polys)
                .filter(|(i, _)| !i.contains(&j))
                .fold(FpPoly::one(p), |acc, (_, f)| acc.mul(f))
        })
        .collect()
}

/// `V = ⟨f_1(γ), …, f_k(γ)⟩` from `C(k+r-1, r)` distinct monic irreducibles
/// over a prime field, with `γ` of degree `n > rΔ·C(k+r-2, r)`.
pub fn maxspan_from_irreducibles(p: &IrreducibleParams) -> Result<ConstructionRecord> {
    let (k, r) = (p.k, p.r);
    if !(1 < r && r < k) {
        return invalid(format!("need 1 < r < k (r = {r}, k = {k})"));
    }
    let (prime, a) =
        arith::prime_power(p.q).ok_or_else(|| Error::InvalidArgument(format!("{} is not a prime power", p.q)))?;
    if a != 1 {
        return invalid("irreducible-family construction is implemented over prime fields only");
    }
    let count = arith::multiset_count(k as u64, r as u64) as usize;
    let polys = match &p.source {
        IrreducibleSource::Given(list) => {
            if list.len() != count {
                return invalid(format!("need exactly {count} polynomials, got {}", list.len()));
            }
            let distinct: HashSet<_> = list.iter().collect();
            if distinct.len() != count {
                return invalid("polynomials must be distinct");
            }
            if let Some(bad) = list
                .iter()
                .find(|f| f.characteristic() != prime || !f.is_monic() || !f.is_irreducible())
            {
                return invalid(format!("{bad} is not a monic irreducible over F_{prime}"));
            }
            list.clone()
        }
        IrreducibleSource::Seeded => {
            let delta = (1..)
                .find(|&d| irreducible_supply(p.q, d) >= count as u128)
                .expect("supply grows without bound");
            random_irreducibles(prime, count, delta, p.seed)?
        }
    };
    let delta = polys.iter().filter_map(FpPoly::degree).max().expect("nonempty");
    let bound = r as u128 * delta as u128 * arith::binomial((k + r - 2) as u64, r as u64);
    let n = match p.n {
        Some(n) if n as u128 <= bound => return invalid(format!("n = {n} must exceed rΔ·C(k+r-2, r) = {bound}")),
        Some(n) => n,
        None => bound as usize + 1,
    };
    let ctx = field_for(p.q, n)?;
    let gamma = ctx.find_generator(
        1,
        &GeneratorOptions {
            seed: p.seed,
            ..Default::default()
        },
    )?;
    let fs = avoiding_products(&polys, k, r);
    let gens: Vec<_> = fs.iter().map(|f| ctx.eval_fp_poly(f, &gamma)).collect();
    let v = Subspace::span(&ctx, &gens)?;
    let params = Params {
        q: p.q,
        k,
        n,
        r: Some(r),
        max_degree: Some(delta),
        variant: Some(match p.source {
            IrreducibleSource::Seeded => "seeded".into(),
            IrreducibleSource::Given(_) => "given".into(),
        }),
        seed: p.seed,
        ..Default::default()
    };
    let mut rec = ConstructionRecord::new("maxspan-irreducibles", params, v).with_gamma(&gamma);
    rec.irreducibles = lex_multi_indices(k, r)
        .into_iter()
        .zip(&polys)
        .map(|(i, f)| IndexedPoly {
            index: i.iter().map(|x| x + 1).collect(),
            coeffs: f.coeffs().to_vec(),
        })
        .collect();
    rec.generators = fs.iter().map(|f| f.coeffs().to_vec()).collect();
    rec.claim("dim V", json!(k), json!(rec.space.dim()))?;
    let independent = polynomial_independence_check(&fs, &gamma)?;
    rec.claim("f_j independent", json!(true), json!(independent))?;
    let vr = rec.space.power(r).dim();
    rec.claim(format!("dim V^{r}"), json!(count), json!(vr))?;
    rec.claim("max-span", json!(true), json!(is_max_span(&rec.space, r)))?;
    rec.claim_r_sidon(r, true, CLAIM_BUDGET)?;
    Ok(rec)
}

/// Decides `F_q`-independence of `fs` both as polynomials and as evaluations
/// at `γ`; the two answers must agree when every degree is below the degree
/// of `γ`.
pub fn polynomial_independence_check(fs: &[FpPoly], gamma: &FieldElement) -> Result<bool> {
    let ctx = gamma.ctx();
    if ctx.a() != 1 {
        return invalid("polynomials over F_p require q = p");
    }
    let deg_gamma = gamma.degree_over(1)?;
    let mut width = 1;
    for f in fs {
        if f.characteristic() != ctx.p() {
            return invalid("polynomial characteristic differs from the field");
        }
        if let Some(d) = f.degree() {
            if d >= deg_gamma {
                return invalid(format!("degree {d} is not below the degree {deg_gamma} of γ"));
            }
            width = width.max(d + 1);
        }
    }
    let mut ech = Echelon::new(ctx.p(), width);
    for f in fs {
        let mut row = f.coeffs().to_vec();
        row.resize(width, 0);
        ech.insert(row);
    }
    let by_poly = ech.rank() == fs.len();
    let evals: Vec<_> = fs.iter().map(|f| ctx.eval_fp_poly(f, gamma)).collect();
    let by_eval = Subspace::span(ctx, &evals)?.dim() == fs.len();
    if by_poly != by_eval {
        return Err(Error::Invariant(format!(
            "polynomial independence {by_poly} but evaluation independence {by_eval}"
        )));
    }
    Ok(by_poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_rejections() {
        assert!(monomial(&MonomialParams::new(2, 4, 2, 3, 2)).is_err());
        assert!(matches!(
            monomial(&MonomialParams::new(2, 3, 1, 2, 3)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            monomial(&MonomialParams::new(2, 3, 1, 3, 3)),
            Err(Error::NoSuchElement { .. })
        ));
    }

    #[test]
    fn monomial_small() {
        let rec = monomial(&MonomialParams::new(2, 3, 1, 3, 2)).unwrap();
        assert_eq!(rec.params.n, 9);
        assert_eq!(rec.claim_value("dim V^2"), Some(&json!(6)));
        assert_eq!(rec.claim_value("2-sidon"), Some(&json!(true)));
        let d = monomial_decomposition_check(&rec).unwrap();
        assert!(d.holds, "{d:?}");
        assert!(d.norm_is_sign);
        assert_eq!(d.t_bar, Some(4));
    }

    #[test]
    fn power_test_matches_subgroup_index() {
        let ctx = field_for(3, 4).unwrap();
        let pt = PowerTest::new(&ctx, 4).unwrap();
        let mut count = 0;
        for x in ctx.subfield_elements(4).unwrap().iter().filter(|x| !x.is_zero()) {
            let lit = pt.is_power(x).unwrap();
            assert_eq!(lit, x.pow(40).is_one());
            count += lit as usize;
        }
        assert_eq!(count, 40);
    }

    #[test]
    fn binomial_rejections() {
        let mut p = BinomialParams::new(3, 4, 1, 3, Variant::End);
        p.delta = Some(vec![0; 12]);
        assert!(binomial_family(&p).is_err());
        // δ = 1 has norm 1
        let mut one = vec![0; 12];
        one[0] = 1;
        p.delta = Some(one);
        assert!(binomial_family(&p).is_err());
        p.delta = None;
        p.primitive = false;
        let rec = binomial_family(&p).unwrap();
        assert!(!rec
            .delta_element
            .as_ref()
            .unwrap()
            .relative_norm(4, 1)
            .unwrap()
            .is_one());
    }

    #[test]
    fn brset_rejections() {
        assert!(matches!(
            maxspan_from_brset(&BrsetParams::new(&[0, 1, 2], 2, 2, 10)),
            Err(Error::NotBrSet { .. })
        ));
        assert!(maxspan_from_brset(&BrsetParams::new(&[0, 1, 4, 16], 2, 3, 48)).is_err());
        let rec = maxspan_from_brset(&BrsetParams::new(&[0], 2, 3, 5)).unwrap();
        assert_eq!(rec.claim_value("dim V^3"), Some(&json!(1)));
    }

    #[test]
    fn quadratics_are_the_lex_family() {
        let polys = f7_quadratics();
        assert_eq!(polys.len(), 20);
        assert!(polys.iter().all(FpPoly::is_irreducible));
        assert_eq!(polys.iter().collect::<HashSet<_>>().len(), 20);
        assert!(maxspan_from_irreducibles(&IrreducibleParams::new(2, 3, 3)).is_err());
    }

    #[test]
    fn independence() {
        let ctx = field_for(3, 5).unwrap();
        let g = ctx.find_generator(1, &GeneratorOptions::default()).unwrap();
        let x = FpPoly::x(3);
        assert!(polynomial_independence_check(&[FpPoly::one(3), x.clone(), x.mul(&x)], &g).unwrap());
        assert!(!polynomial_independence_check(&[x.clone(), x.scale(2)], &g).unwrap());
        assert!(polynomial_independence_check(&[FpPoly::monomial(3, 5)], &g).is_err());
    }
}
