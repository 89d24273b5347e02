//! Orbit codes `{αV : α ∈ F_{q^n}^*}`: subspace distance, orbit size, minimum
//! distance, and semilinear equivalence.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::FieldElement;
use crate::qpoly::LinearizedPoly;
use crate::subspace::Subspace;

/// `d(U, V) = dim U + dim V - 2 dim(U ∩ V)`.
pub fn subspace_distance(u: &Subspace, v: &Subspace) -> Result<usize> {
    let i = u.intersect(v)?.dim();
    Ok(u.dim() + v.dim() - 2 * i)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub subspace_id: String,
    pub k: usize,
    pub n: usize,
    #[serde(serialize_with = "as_decimal")]
    pub orbit_size: BigUint,
    /// `None` when the orbit has a single member.
    pub min_distance: Option<usize>,
    /// `max dim(V ∩ αV)` over `α ∉ F_{q^t}`, `t` the field of linearity.
    pub max_intersection: Option<usize>,
    pub field_of_linearity: usize,
    /// First `α` attaining the maximum.
    pub argmax: Option<FieldElement>,
    /// Sidon through the orbit characterization: strictly `F_q`-linear and
    /// every intersection at most 1.
    pub sidon: bool,
    pub alphas_swept: u128,
}

fn as_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// Number of field elements an `α`-sweep over `F_{q^n}` walks through.
pub fn sweep_size(v: &Subspace) -> u128 {
    let ctx = v.ctx();
    (ctx.p() as u128).checked_pow(ctx.degree() as u32).unwrap_or(u128::MAX)
}

/// Full sweep over projective `α ∉ F_{q^t}`.
pub fn orbit_report(v: &Subspace, budget: u128) -> Result<OrbitReport> {
    if v.is_zero() {
        return invalid("orbit of the zero subspace");
    }
    let ctx = v.ctx();
    let total = sweep_size(v);
    if total > budget {
        return Err(Error::BudgetExceeded {
            required: total,
            cap: budget,
        });
    }
    let t = v.field_of_linearity();
    let best = (1..total)
        .into_par_iter()
        .filter_map(|idx| {
            let alpha = ctx.element_from_index(idx);
            if alpha.projective_normalize() != alpha || alpha.in_subfield(t).expect("t | n") {
                return None;
            }
            Some((v.intersection_dim_scaled(&alpha), idx))
        })
        // largest dimension, then smallest index
        .reduce_with(|a, b| {
            if (a.0, std::cmp::Reverse(a.1)) >= (b.0, std::cmp::Reverse(b.1)) {
                a
            } else {
                b
            }
        });
    let k = v.dim();
    let max_intersection = best.map(|b| b.0);
    Ok(OrbitReport {
        subspace_id: v.id(),
        k,
        n: ctx.n(),
        orbit_size: v.orbit_size(),
        min_distance: max_intersection.map(|m| 2 * k - 2 * m),
        max_intersection,
        field_of_linearity: t,
        argmax: best.map(|b| ctx.element_from_index(b.1)),
        sidon: t == 1 && max_intersection.is_none_or(|m| m <= 1),
        alphas_swept: total - 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// `U = α V^σ`.
    pub alpha: FieldElement,
    /// `σ = x ↦ x^{p^sigma}`.
    pub sigma: usize,
}

impl Certificate {
    pub fn verifies(&self, u: &Subspace, v: &Subspace) -> bool {
        !self.alpha.is_zero() && v.frob_image(self.sigma).scale(&self.alpha).is_ok_and(|w| w == *u)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub certificate: Option<Certificate>,
    /// Automorphisms times projective points in the sweep.
    pub search_space: u128,
}

/// Exhaustive search for `(α, σ)` with `U = α V^σ`, `σ` ranging over all
/// `a·n` powers of the absolute Frobenius and `α` over projective points in
/// index order. The first hit in `(σ, α)` order is returned.
pub fn semilinear_equivalent(u: &Subspace, v: &Subspace, budget: u128) -> Result<Equivalence> {
    if u.ctx() != v.ctx() {
        return Err(Error::MixedContexts);
    }
    let ctx = u.ctx();
    let autos = ctx.automorphism_count() as u128;
    let q = ctx.q() as u128;
    let points = sweep_size(u).saturating_sub(1) / (q - 1);
    let search_space = autos.saturating_mul(points);
    if search_space > budget {
        return Err(Error::BudgetExceeded {
            required: search_space,
            cap: budget,
        });
    }
    if u.dim() != v.dim() {
        return Ok(Equivalence {
            equivalent: false,
            certificate: None,
            search_space,
        });
    }
    let total = sweep_size(u);
    for sigma in 0..ctx.automorphism_count() {
        let w = v.frob_image(sigma);
        let w_basis = w.basis();
        let hit = (1..total).into_par_iter().find_map_first(|idx| {
            let alpha = ctx.element_from_index(idx);
            if alpha.projective_normalize() != alpha {
                return None;
            }
            w_basis.iter().all(|b| u.contains(&(&alpha * b))).then_some(alpha)
        });
        if let Some(alpha) = hit {
            return Ok(Equivalence {
                equivalent: true,
                certificate: Some(Certificate { alpha, sigma }),
                search_space,
            });
        }
    }
    Ok(Equivalence {
        equivalent: false,
        certificate: None,
        search_space,
    })
}

/// `A = [[c, d], [a, b]]` over `F_{q^k}`, acting on row vectors.
pub type Matrix2 = [[FieldElement; 2]; 2];

#[derive(Clone, Debug, Serialize)]
pub struct GlCheck {
    /// `ξ = (a + bγ^σ)/(c + dγ^σ)`.
    pub xi_matches: bool,
    /// `U^σ = W·A` for the graphs of `f` and `g`.
    pub graph_matches: bool,
    /// `λ = 1/(c + dγ^σ)`.
    pub lambda: FieldElement,
    /// `λ V_{f,γ}^σ = V_{g,ξ}`, computed on the subspaces themselves.
    pub direct: bool,
    pub holds: bool,
}

/// Checks a `GL(2, q^k)` certificate for `V_{f,γ} ~ V_{g,ξ}` through the
/// matrix conditions, and separately by mapping the subspace.
pub fn verify_glk2_certificate(
    f: &LinearizedPoly,
    g: &LinearizedPoly,
    gamma: &FieldElement,
    xi: &FieldElement,
    m: &Matrix2,
    sigma: usize,
) -> Result<GlCheck> {
    let ctx = f.ctx();
    let k = f.k();
    if g.ctx() != ctx || gamma.ctx() != ctx || xi.ctx() != ctx {
        return Err(Error::MixedContexts);
    }
    if g.k() != k {
        return invalid("f and g must live over the same F_(q^k)");
    }
    for e in m.iter().flatten() {
        if e.ctx() != ctx {
            return Err(Error::MixedContexts);
        }
        if !e.in_subfield(k)? {
            return invalid(format!("matrix entries must lie in F_(q^{k})"));
        }
    }
    if gamma.in_subfield(k)? || xi.in_subfield(k)? {
        return invalid(format!("{{1, γ}} and {{1, ξ}} must be F_(q^{k})-independent"));
    }
    let [[c, d], [a, b]] = m;
    let det = &(c * b) - &(d * a);
    if det.is_zero() {
        return invalid("A is singular");
    }
    let gs = gamma.frobenius_p(sigma);
    let denom = c + &(d * &gs);
    let lambda = denom
        .inverse()
        .ok_or_else(|| Error::InvalidArgument("c + dγ^σ = 0, ξ is undefined".into()))?;
    let xi_matches = *xi == &(a + &(b * &gs)) * &lambda;

    let det_inv = det.inverse().expect("nonzero");
    let graph_matches = Subspace::subfield(ctx, k)?.basis().iter().all(|u| {
        let x = u.frobenius_p(sigma);
        let y = f.evaluate(u).expect("u ∈ F_{q^k}").frobenius_p(sigma);
        // (w, w') = (x, y)·A^{-1}, A^{-1} = det^{-1} [[b, -d], [-a, c]]
        let w = &(&(&x * b) - &(&y * a)) * &det_inv;
        let w2 = &(&(&y * c) - &(&x * d)) * &det_inv;
        g.evaluate(&w).is_ok_and(|gw| gw == w2)
    });

    let source = f.v_f_gamma(gamma)?.frob_image(sigma).scale(&lambda)?;
    let direct = source == g.v_f_gamma(xi)?;
    if xi_matches && graph_matches && !direct {
        return Err(Error::Invariant(
            "matrix conditions hold but the subspaces differ".into(),
        ));
    }
    Ok(GlCheck {
        xi_matches,
        graph_matches,
        lambda,
        direct,
        holds: xi_matches && graph_matches && direct,
    })
}
