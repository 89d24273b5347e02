//! Linearized polynomials `f(x) = Σ a_i x^{q^i}` over `F_{q^k}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{ElementJson, FieldCtx, FieldElement};
use crate::linalg::left_kernel;
use crate::subspace::Subspace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPoly {
    ctx: FieldCtx,
    k: usize,
    /// `coeffs[i]` multiplies `x^{q^i}`; reduced so that `len() <= k`.
    coeffs: Vec<FieldElement>,
}

/// Wire form: `{"k": k, "coeffs": [[...], ...]}` in absolute coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub k: usize,
    pub coeffs: Vec<Vec<u64>>,
}

impl LinearizedPoly {
    /// Builds `Σ coeffs[i] x^{q^i}` over `F_{q^k}`, folding exponents modulo
    /// `x^{q^k} - x`.
    pub fn new(ctx: &FieldCtx, k: usize, coeffs: Vec<FieldElement>) -> Result<Self> {
        ctx.check_divisor(k)?;
        let mut folded = vec![ctx.zero(); k];
        for (i, c) in coeffs.into_iter().enumerate() {
            if c.ctx() != ctx {
                return Err(Error::MixedContexts);
            }
            if !c.in_subfield(k)? {
                return invalid(format!("coefficient of x^(q^{i}) is not in F_(q^{k})"));
            }
            folded[i % k] = &folded[i % k] + &c;
        }
        while folded.last().is_some_and(FieldElement::is_zero) {
            folded.pop();
        }
        Ok(Self {
            ctx: ctx.clone(),
            k,
            coeffs: folded,
        })
    }

    pub fn zero(ctx: &FieldCtx, k: usize) -> Result<Self> {
        Self::new(ctx, k, Vec::new())
    }

    /// `x^{q^s}`.
    pub fn monomial(ctx: &FieldCtx, k: usize, s: usize) -> Result<Self> {
        let mut c = vec![ctx.zero(); s + 1];
        c[s] = ctx.one();
        Self::new(ctx, k, c)
    }

    /// `x^{q^s} + δ x^{q^e}`.
    pub fn binomial(ctx: &FieldCtx, k: usize, s: usize, delta: &FieldElement, e: usize) -> Result<Self> {
        let mut c = vec![ctx.zero(); s.max(e) + 1];
        c[s] = ctx.one();
        c[e] = &c[e] + delta;
        Self::new(ctx, k, c)
    }

    /// `Tr_{q^k/q}(x) = Σ_{i<k} x^{q^i}`.
    pub fn trace(ctx: &FieldCtx, k: usize) -> Result<Self> {
        Self::new(ctx, k, vec![ctx.one(); k])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Largest `i` with `a_i ≠ 0`; `None` for the zero polynomial.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn evaluate(&self, u: &FieldElement) -> Result<FieldElement> {
        if u.ctx() != &self.ctx {
            return Err(Error::MixedContexts);
        }
        if !u.in_subfield(self.k)? {
            return invalid(format!("argument is not in F_(q^{})", self.k));
        }
        Ok(self.eval_unchecked(u))
    }

    fn eval_unchecked(&self, u: &FieldElement) -> FieldElement {
        let mut acc = self.ctx.zero();
        let mut conj = u.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                conj = conj.frobenius(1);
            }
            if !a.is_zero() {
                acc = &acc + &(a * &conj);
            }
        }
        acc
    }

    /// Decides whether `a ↦ f(a)/a` is injective on the projective points
    /// of `F_{q^k}`. The quotient is constant on each point, so points are
    /// compared by the exact value of the quotient; roots all share the
    /// value 0.
    pub fn is_scattered(&self) -> Result<Scattered> {
        let points = Subspace::subfield(&self.ctx, self.k)?.projective_points()?;
        let mut seen: HashMap<_, usize> = HashMap::with_capacity(points.len());
        for (i, a) in points.iter().enumerate() {
            let quotient = self.eval_unchecked(a).div(a);
            if let Some(&j) = seen.get(&quotient.key()) {
                return Ok(Scattered {
                    scattered: false,
                    witness: Some((points[j].clone(), a.clone())),
                });
            }
            seen.insert(quotient.key(), i);
        }
        Ok(Scattered {
            scattered: true,
            witness: None,
        })
    }

    /// `dim_{F_q} S_{a,f}` where `S_{a,f} = {ρ ∈ F_{q^k} : f(ρa) = ρ f(a)}`.
    pub fn s_dimension(&self, a: &FieldElement) -> Result<usize> {
        if !a.in_subfield(self.k)? || a.is_zero() {
            return invalid("a must be a nonzero element of F_(q^k)");
        }
        let basis = self.ctx.subfield_basis(self.k)?;
        let fa = self.eval_unchecked(a);
        let images: Vec<Vec<u32>> = basis
            .iter()
            .map(|rho| {
                let diff = &self.eval_unchecked(&(rho * a)) - &(rho * &fa);
                diff.coeffs().to_vec()
            })
            .collect();
        Ok(left_kernel(self.ctx.p(), &images).len() / self.ctx.a())
    }

    /// `V_{f,γ} = {u + f(u)γ : u ∈ F_{q^k}}`.
    pub fn v_f_gamma(&self, gamma: &FieldElement) -> Result<Subspace> {
        if gamma.ctx() != &self.ctx {
            return Err(Error::MixedContexts);
        }
        if gamma.in_subfield(self.k)? {
            return invalid(format!("γ must be F_(q^{})-independent from 1", self.k));
        }
        let gens: Vec<_> = Subspace::subfield(&self.ctx, self.k)?
            .basis()
            .iter()
            .map(|u| u + &(&self.eval_unchecked(u) * gamma))
            .collect();
        Subspace::span(&self.ctx, &gens)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            k: self.k,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.coeffs().iter().map(|&x| x as u64).collect())
                .collect(),
        }
    }

    pub fn from_json(ctx: &FieldCtx, json: &PolyJson) -> Result<Self> {
        let coeffs = json.coeffs.iter().map(|c| ctx.element(c)).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, json.k, coeffs)
    }
}

#[derive(Clone, Debug)]
pub struct Scattered {
    pub scattered: bool,
    /// Non-proportional `a, b` with `f(a)/a = f(b)/b`.
    pub witness: Option<(FieldElement, FieldElement)>,
}

impl Scattered {
    pub fn witness_json(&self) -> Option<(ElementJson, ElementJson)> {
        self.witness.as_ref().map(|(a, b)| (a.to_json(), b.to_json()))
    }
}
