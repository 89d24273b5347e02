//! Independent reference implementations used as oracles. They only read
//! coordinates out of the library types; all arithmetic and enumeration is
//! redone here with plain vectors over a prime field.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use sidon_core::field::FieldCtx;
use sidon_core::subspace::Subspace;

/// Schoolbook `F_p[x]/(f)` for a monic `f`, elements as coefficient vectors.
#[derive(Clone, Debug)]
pub struct PolyField {
    pub p: u32,
    pub modulus: Vec<u32>,
}

impl PolyField {
    pub fn of(ctx: &FieldCtx) -> Self {
        assert_eq!(ctx.a(), 1, "oracle handles prime base fields only");
        Self {
            p: ctx.p(),
            modulus: ctx.modulus().to_vec(),
        }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let d = self.degree();
        let mut prod = vec![0u64; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (d..2 * d).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modulus[..d].iter().enumerate() {
                // x^d = -(m_0 + ... + m_{d-1} x^{d-1})
                prod[i - d + j] = (prod[i - d + j] + c * (p - m as u64)) % p;
            }
        }
        prod[..d].iter().map(|&c| c as u32).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> Vec<u32> {
        a.iter()
            .map(|&x| ((x as u64 * c as u64) % self.p as u64) as u32)
            .collect()
    }

    /// Smallest (lexicographic) nonzero scalar multiple: a line label that
    /// does not depend on the library's normalization.
    pub fn line(&self, a: &[u32]) -> Vec<u32> {
        (1..self.p).map(|c| self.scale(c, a)).min().expect("p >= 2")
    }

    pub fn all(&self) -> Vec<Vec<u32>> {
        span_fp(self.p, &unit_vectors(self.degree()))
    }
}

fn unit_vectors(d: usize) -> Vec<Vec<u32>> {
    (0..d)
        .map(|i| {
            let mut v = vec![0; d];
            v[i] = 1;
            v
        })
        .collect()
}

/// All `F_p`-combinations of `basis`.
pub fn span_fp(p: u32, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let d = basis.first().map_or(0, Vec::len);
    let mut out = vec![vec![0u32; d]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for c in 0..p {
            for v in &out {
                next.push(v.iter().zip(b).map(|(&x, &y)| (x + c * y) % p).collect());
            }
        }
        out = next;
    }
    out
}

pub fn elements(v: &Subspace) -> Vec<Vec<u32>> {
    let basis: Vec<Vec<u32>> = v.basis().iter().map(|b| b.coeffs().to_vec()).collect();
    if basis.is_empty() {
        return vec![vec![0; v.ctx().degree()]];
    }
    span_fp(v.ctx().p(), &basis)
}

/// Distinct lines of `v`.
pub fn lines(f: &PolyField, v: &Subspace) -> Vec<Vec<u32>> {
    let mut set: Vec<Vec<u32>> = elements(v)
        .into_iter()
        .filter(|x| x.iter().any(|&c| c != 0))
        .map(|x| f.line(&x))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    set.sort();
    set
}

/// `r`-Sidon straight from the definition: no two distinct `r`-multisets of
/// lines of `V` have products on the same line.
pub fn r_sidon(v: &Subspace, r: usize) -> bool {
    let f = PolyField::of(v.ctx());
    let ls = lines(&f, v);
    let mut seen: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    let mut idx = vec![0usize; r];
    loop {
        let mut prod = ls[idx[0]].clone();
        for &i in &idx[1..] {
            prod = f.mul(&prod, &ls[i]);
        }
        if seen.insert(f.line(&prod), idx.clone()).is_some() {
            return false;
        }
        // next non-decreasing index tuple
        let mut j = r;
        while j > 0 && idx[j - 1] == ls.len() - 1 {
            j -= 1;
        }
        if j == 0 {
            return true;
        }
        idx[j - 1] += 1;
        let v0 = idx[j - 1];
        for x in &mut idx[j..] {
            *x = v0;
        }
    }
}

/// Sidon through intersections: `|V ∩ αV| ≤ q` for every `α ∉ F_p` (prime
/// base field), i.e. every such intersection has dimension at most one.
pub fn sidon_by_intersections(v: &Subspace) -> bool {
    let f = PolyField::of(v.ctx());
    let elems = elements(v);
    let members: HashSet<&Vec<u32>> = elems.iter().collect();
    let nonzero: Vec<&Vec<u32>> = elems.iter().filter(|x| x.iter().any(|&c| c != 0)).collect();
    let in_base = |a: &[u32]| a[1..].iter().all(|&c| c == 0);
    f.all().into_iter().filter(|a| !in_base(a)).all(|alpha| {
        // x ∈ V^* with αx ∈ V: the nonzero elements of V ∩ α^{-1}V
        let hits = nonzero.iter().filter(|x| members.contains(&f.mul(&alpha, x))).count();
        hits < (f.p as usize).pow(2) - 1
    })
}

/// RREF bases of every `k`-dimensional subspace of `F_p^d`.
pub fn all_subspaces(p: u32, d: usize, k: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    pivot_sets(d, k, 0, &mut pivots, &mut |piv| {
        // free positions: row i, column c > piv[i], c not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| ((piv[i] + 1)..d).filter(|c| !piv.contains(c)).map(move |c| (i, c)))
            .collect();
        let total = (p as usize).pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u32; d]; k];
            for (i, &c) in piv.iter().enumerate() {
                rows[i][c] = 1;
            }
            for &(i, c) in &free {
                rows[i][c] = (code % p as usize) as u32;
                code /= p as usize;
            }
            out.push(rows);
        }
    });
    out
}

fn pivot_sets(d: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..d {
        cur.push(c);
        pivot_sets(d, k, c + 1, cur, f);
        cur.pop();
    }
}

/// `[d choose k]_q`.
pub fn gaussian_binomial(q: u128, d: u32, k: u32) -> u128 {
    let num: u128 = (0..k).map(|i| q.pow(d - i) - 1).product();
    let den: u128 = (0..k).map(|i| q.pow(i + 1) - 1).product();
    num / den
}

pub fn subspace_from_rows(ctx: &FieldCtx, rows: &[Vec<u32>]) -> Subspace {
    let gens: Vec<_> = rows
        .iter()
        .map(|r| ctx.element(&r.iter().map(|&c| c as u64).collect::<Vec<_>>()).unwrap())
        .collect();
    Subspace::span(ctx, &gens).unwrap()
}
