//! Sidon, `r`-Sidon and max-span deciders, and the dimension bound audit.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::multiset::Multisets;
use crate::subspace::{span_chain, Subspace};

/// Default cap on the number of `r`-multisets a brute-force check may visit.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Definition,
    IntersectionCriterion,
    MaxSpanSufficient,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Distinct multisets of projective points with projectively equal products.
    Collision {
        left: Vec<FieldElement>,
        right: Vec<FieldElement>,
    },
    /// `α ∉ F_q` with `dim(V ∩ αV) ≥ 2`.
    Intersection { alpha: FieldElement, dim: usize },
}

impl Witness {
    /// Re-checks the counterexample against `v` from scratch.
    pub fn verifies(&self, v: &Subspace, r: usize) -> bool {
        match self {
            Witness::Collision { left, right } => {
                if left.len() != r || right.len() != r {
                    return false;
                }
                if !left.iter().chain(right).all(|x| !x.is_zero() && v.contains(x)) {
                    return false;
                }
                let mut lk: Vec<_> = left.iter().map(FieldElement::projective_key).collect();
                let mut rk: Vec<_> = right.iter().map(FieldElement::projective_key).collect();
                lk.sort();
                rk.sort();
                let one = v.ctx().one();
                let lp = left.iter().fold(one.clone(), |acc, x| &acc * x);
                let rp = right.iter().fold(one, |acc, x| &acc * x);
                lk != rk && lp.projective_key() == rp.projective_key()
            }
            Witness::Intersection { alpha, dim } => {
                !alpha.is_zero()
                    && !alpha.in_subfield(1).unwrap_or(true)
                    && *dim >= 2
                    && v.intersect(&v.scale(alpha).expect("nonzero"))
                        .expect("same field")
                        .dim()
                        == *dim
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SidonReport {
    pub subspace_id: String,
    pub r: usize,
    pub verdict: bool,
    pub method: Method,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_of_linearity: Option<usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Number of `r`-multisets of projective points of `v`.
pub fn multiset_budget_needed(v: &Subspace, r: usize) -> u128 {
    let q = v.ctx().q() as u128;
    let points = q
        .checked_pow(v.dim() as u32)
        .map(|c| (c - 1) / (q - 1))
        .unwrap_or(u128::MAX);
    arith::multiset_count(points.min(u64::MAX as u128) as u64, r as u64)
}

/// `r`-Sidon by definition: the map from `r`-multisets of projective points
/// to the projective point of their product must be injective.
pub fn is_r_sidon(v: &Subspace, r: usize, budget: u128) -> Result<SidonReport> {
    let start = Instant::now();
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let required = multiset_budget_needed(v, r);
    if required > budget {
        return Err(Error::BudgetExceeded { required, cap: budget });
    }
    let points = v.projective_points()?;
    let ctx = v.ctx();
    let mut seen = HashMap::with_capacity(required.min(1 << 20) as usize);
    let mut it = Multisets::new(points.len(), r);
    // partial[j] = product of the points at positions j..r
    let mut partial = vec![ctx.one(); r + 1];
    let mut top = r;
    let mut ordinal: u64 = 0;
    let mut witness = None;
    if !points.is_empty() {
        loop {
            for j in (0..top).rev() {
                partial[j] = &points[it.current()[j]] * &partial[j + 1];
            }
            let key = partial[0].projective_key();
            if let Some(&prev) = seen.get(&key) {
                let left = Multisets::nth(points.len(), r, prev).expect("visited");
                let pick = |m: &[usize]| m.iter().map(|&i| points[i].clone()).collect();
                witness = Some(Witness::Collision {
                    left: pick(&left),
                    right: pick(it.current()),
                });
                break;
            }
            seen.insert(key, ordinal);
            ordinal += 1;
            match it.advance() {
                Some(j) => top = j + 1,
                None => break,
            }
        }
    }
    Ok(SidonReport {
        subspace_id: v.id(),
        r,
        verdict: witness.is_none(),
        method: Method::Definition,
        witness,
        field_of_linearity: None,
        elapsed: start.elapsed(),
    })
}

/// Number of projective points of `F_{q^n}` the intersection sweep visits.
pub fn intersection_budget_needed(v: &Subspace) -> u128 {
    let ctx = v.ctx();
    (ctx.p() as u128).checked_pow(ctx.degree() as u32).unwrap_or(u128::MAX)
}

/// Sidon via `dim(V ∩ αV) ≤ 1` for every `α ∈ F_{q^n} \ F_q`, one `α` per
/// projective point. The witness is the first failing `α` in index order.
pub fn is_sidon_intersection(v: &Subspace, budget: u128) -> Result<SidonReport> {
    let start = Instant::now();
    let ctx = v.ctx();
    let total = intersection_budget_needed(v);
    if total > budget {
        return Err(Error::BudgetExceeded {
            required: total,
            cap: budget,
        });
    }
    let hit = (1..total).into_par_iter().find_map_first(|idx| {
        let alpha = ctx.element_from_index(idx);
        if alpha.projective_normalize() != alpha || alpha.in_subfield(1).expect("1 | n") {
            return None;
        }
        let dim = v.intersection_dim_scaled(&alpha);
        (dim >= 2).then_some(Witness::Intersection { alpha, dim })
    });
    Ok(SidonReport {
        subspace_id: v.id(),
        r: 2,
        verdict: hit.is_none(),
        method: Method::IntersectionCriterion,
        witness: hit,
        field_of_linearity: Some(v.field_of_linearity()),
        elapsed: start.elapsed(),
    })
}

/// 2-Sidon by whichever exhaustive route is cheaper.
pub fn is_sidon(v: &Subspace, budget: u128) -> Result<SidonReport> {
    let by_def = multiset_budget_needed(v, 2);
    let by_int = intersection_budget_needed(v).saturating_mul(v.dim() as u128);
    if by_def <= by_int || by_def <= budget && intersection_budget_needed(v) > budget {
        is_r_sidon(v, 2, budget)
    } else {
        is_sidon_intersection(v, budget)
    }
}

/// `dim V^r = C(k+r-1, r)`.
pub fn is_max_span(v: &Subspace, r: usize) -> bool {
    let bound = arith::multiset_count(v.dim() as u64, r as u64);
    if bound > v.ctx().n() as u128 {
        return false;
    }
    v.power(r).dim() as u128 == bound
}

/// Verdicts for `r = 2..=r_max`. Errors if the verdicts are not downward
/// closed.
pub fn r_sidon_profile(v: &Subspace, r_max: usize, budget: u128) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    for r in 2..=r_max {
        let rep = is_r_sidon(v, r, budget)?;
        out.push((r, rep.verdict));
    }
    if let Some(w) = out.windows(2).find(|w| !w[0].1 && w[1].1) {
        return Err(Error::Invariant(format!(
            "{}-Sidon holds although {}-Sidon fails",
            w[1].0, w[0].0
        )));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Holds,
    Violated,
    /// Recorded only; no claim is being tested.
    Informational,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub s: usize,
    pub lhs: f64,
    pub relation: String,
    pub rhs: f64,
    pub status: BoundStatus,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundHypotheses {
    pub k: usize,
    pub n: usize,
    pub n_prime: bool,
    pub contains_one: bool,
    /// `None` when the budget did not allow a decision.
    pub sidon: Option<bool>,
    /// `t̄` of the normalized chain `(v⁻¹V)^s`.
    pub t: Option<usize>,
    pub generated_field_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundAudit {
    pub subspace_id: String,
    pub hypotheses: BoundHypotheses,
    pub checks: Vec<BoundCheck>,
    pub violated: bool,
}

impl BoundAudit {
    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.status == BoundStatus::Violated)
    }
}

#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub budget: u128,
    /// Already-known `r`-Sidon verdicts, used instead of recomputation.
    pub known: BTreeMap<usize, bool>,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            known: BTreeMap::new(),
        }
    }
}

fn check(name: &str, s: usize, lhs: f64, relation: &str, rhs: f64) -> BoundCheck {
    let ok = match relation {
        "<=" => lhs <= rhs,
        ">=" => lhs >= rhs,
        "<" => lhs < rhs,
        "|" => rhs % lhs == 0.0,
        _ => unreachable!("unknown relation"),
    };
    BoundCheck {
        name: name.into(),
        s,
        lhs,
        relation: relation.into(),
        rhs,
        status: if ok { BoundStatus::Holds } else { BoundStatus::Violated },
    }
}

/// Evaluates every applicable dimension inequality on `V, V^2, …, V^{r_max}`
/// and, for Sidon `V` with `k ≥ 3`, the lower bounds on the normalized chain.
pub fn audit_bounds(v: &Subspace, r_max: usize, opts: &AuditOptions) -> Result<BoundAudit> {
    let ctx = v.ctx();
    let (k, n) = (v.dim(), ctx.n());
    let mut checks = Vec::new();
    let mut hyp = BoundHypotheses {
        k,
        n,
        n_prime: arith::is_prime(n as u64),
        contains_one: v.contains_one(),
        generated_field_degree: v.generated_field(),
        ..Default::default()
    };
    if k == 0 {
        return Ok(BoundAudit {
            subspace_id: v.id(),
            hypotheses: hyp,
            checks,
            violated: false,
        });
    }

    let verdict = |r: usize| -> Option<bool> {
        if let Some(&b) = opts.known.get(&r) {
            return Some(b);
        }
        let rep = if r == 2 {
            is_sidon(v, opts.budget)
        } else {
            is_r_sidon(v, r, opts.budget)
        };
        rep.ok().map(|rep| rep.verdict)
    };

    // powers V^1..V^{r_max}
    let mut powers = vec![v.clone()];
    while powers.len() < r_max.max(1) {
        let next = powers.last().expect("nonempty").product(v)?;
        powers.push(next);
    }
    let hs: Vec<usize> = powers.iter().map(Subspace::stabilizer).collect();
    for (i, pw) in powers.iter().enumerate() {
        let s = i + 1;
        let cap = arith::multiset_count(k as u64, s as u64).min(n as u128);
        checks.push(check("span-upper", s, pw.dim() as f64, "<=", cap as f64));
        checks.push(check("stabilizer-divides-dim", s, hs[i] as f64, "|", pw.dim() as f64));
        if s >= 2 {
            let rhs = (powers[i - 1].dim() + k).saturating_sub(hs[i]).min(n);
            checks.push(check("kneser", s, pw.dim() as f64, ">=", rhs as f64));
            checks.push(check("stabilizer-chain", s, hs[i - 1] as f64, "|", hs[i] as f64));
        }
    }

    let mut sidon_by_r = BTreeMap::new();
    for r in 2..=r_max {
        let Some(b) = verdict(r) else { continue };
        sidon_by_r.insert(r, b);
        if b {
            let q = ctx.q() as f64;
            let rhs = n as f64 / r as f64 + 1.0 + (r as f64).ln() / q.ln();
            checks.push(check("r-sidon-dimension", r, k as f64, "<", rhs));
            if !hyp.n_prime {
                let mut c = check(
                    "composite-rk-lower",
                    r,
                    powers[r - 1].dim() as f64,
                    ">=",
                    (r * k) as f64,
                );
                c.status = BoundStatus::Informational;
                checks.push(c);
            }
        }
    }
    hyp.sidon = match sidon_by_r.get(&2) {
        Some(&b) => Some(b),
        None => verdict(2),
    };

    if hyp.sidon == Some(true) && k >= 3 {
        let w = v.normalized();
        let chain = span_chain(&w, n + 1)?;
        hyp.t = chain.t_bar;
        let m = chain.generated_field_degree as f64;
        if let Some(t) = chain.t_bar {
            for s in 2..=t {
                let lvl = chain.level(s).expect("chain reaches t");
                let rhs = (s * k) as f64 - ((s - 2) * lvl.h) as f64;
                checks.push(check("sidon-lower", s, lvl.dim as f64, ">=", rhs));
                checks.push(check(
                    "sidon-field-degree",
                    s,
                    k as f64,
                    "<=",
                    m * (1.0 - 1.0 / s as f64),
                ));
            }
            let reaches_whole = chain.levels.last().is_some_and(|l| l.dim == n);
            if hyp.n_prime && reaches_whole && t > 2 {
                for s in 2..t {
                    let lvl = chain.level(s).expect("chain reaches t");
                    checks.push(check("prime-lower", s, lvl.dim as f64, ">=", (s * k) as f64));
                }
                checks.push(check("prime-dimension", t, k as f64, "<=", (n / (t - 1)) as f64));
            }
        }
    }

    let violated = checks.iter().any(|c| c.status == BoundStatus::Violated);
    Ok(BoundAudit {
        subspace_id: v.id(),
        hypotheses: hyp,
        checks,
        violated,
    })
}
