//! `B_r`-sets in `Z` and `Z_m`, and their extraction from `r`-Sidon spaces
//! through discrete logarithms.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::dlog::BsgsTable;
use crate::error::{invalid, Error, Result};
use crate::field::{norm_exponent, FieldElement};
use crate::multiset::Multisets;
use crate::sidon::{is_r_sidon, DEFAULT_BUDGET};
use crate::subspace::Subspace;

pub use crate::dlog::discrete_log;

/// File form: `{"elements": [...], "modulus": m | null, "r": r, "verified": b}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrSet {
    pub elements: Vec<u64>,
    pub modulus: Option<u64>,
    pub r: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrCheck {
    pub holds: bool,
    pub sums: u128,
    /// Two distinct multisets (as element lists) with equal sums.
    pub witness: Option<(Vec<u64>, Vec<u64>)>,
}

/// Decides whether all `r`-multiset sums of `set` are distinct, in `Z` or
/// modulo `modulus`.
pub fn is_br_set(set: &[u64], r: usize, modulus: Option<u64>, budget: u128) -> Result<BrCheck> {
    if set.is_empty() {
        return invalid("empty set");
    }
    if r == 0 {
        return invalid("r must be positive");
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return invalid("elements must be distinct");
    }
    if let Some(m) = modulus {
        if m == 0 {
            return invalid("modulus must be positive");
        }
        if s.last().is_some_and(|&x| x >= m) {
            return invalid(format!("elements must lie in [0, {m})"));
        }
    }
    let sums = arith::multiset_count(s.len() as u64, r as u64);
    if sums > budget {
        return Err(Error::BudgetExceeded {
            required: sums,
            cap: budget,
        });
    }
    let reduce = |x: u128| modulus.map_or(x, |m| x % m as u128);
    let mut seen: HashMap<u128, u64> = HashMap::with_capacity(sums.min(1 << 22) as usize);
    let mut it = Multisets::new(s.len(), r);
    let mut ordinal = 0u64;
    loop {
        let sum = reduce(it.current().iter().map(|&i| s[i] as u128).sum());
        if let Some(&prev) = seen.get(&sum) {
            let left = Multisets::nth(s.len(), r, prev).expect("visited");
            let pick = |m: &[usize]| m.iter().map(|&i| s[i]).collect();
            return Ok(BrCheck {
                holds: false,
                sums,
                witness: Some((pick(&left), pick(it.current()))),
            });
        }
        seen.insert(sum, ordinal);
        ordinal += 1;
        if it.advance().is_none() {
            break;
        }
    }
    Ok(BrCheck {
        holds: true,
        sums,
        witness: None,
    })
}

impl BrSet {
    /// Re-runs the sum check and updates `verified`.
    pub fn verify(&mut self, budget: u128) -> Result<BrCheck> {
        let check = is_br_set(&self.elements, self.r, self.modulus, budget)?;
        self.verified = check.holds;
        Ok(check)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    /// Subtract the minimum so that `0 ∈ S`.
    pub translate: bool,
    /// Skip the `r`-Sidon check; the caller vouches for it.
    pub assume_sidon: bool,
    pub budget: u128,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            translate: true,
            assume_sidon: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Logs of one representative per projective point of `v`, reduced modulo
/// `(q^n-1)/(q-1)`, unsorted and untranslated.
pub fn projective_logs(v: &Subspace, table: &BsgsTable) -> Result<(Vec<u64>, u64)> {
    let modulus = norm_exponent(v.ctx(), 1)
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("modulus does not fit in 64 bits".into()))?;
    let points = v.projective_points()?;
    let logs = points
        .par_iter()
        .map(|x| table.log(x).map(|e| e % modulus))
        .collect::<Result<Vec<_>>>()?;
    Ok((logs, modulus))
}

/// `S = {log_γ x mod (q^n-1)/(q-1) : x a projective point of V}`, verified as
/// a `B_r`-set modulo `(q^n-1)/(q-1)`.
pub fn extract_brset(v: &Subspace, r: usize, gamma: &FieldElement, opts: &ExtractOptions) -> Result<BrSet> {
    if gamma.ctx() != v.ctx() {
        return Err(Error::MixedContexts);
    }
    if v.is_zero() {
        return invalid("zero subspace has no projective points");
    }
    let table = BsgsTable::new(gamma)?;
    if !opts.assume_sidon && !is_r_sidon(v, r, opts.budget)?.verdict {
        return Err(Error::NotRSidon(r));
    }
    let (logs, modulus) = projective_logs(v, &table)?;
    brset_from_logs(logs, modulus, r, opts)
}

/// Finishes extraction from precomputed residues.
pub fn brset_from_logs(mut logs: Vec<u64>, modulus: u64, r: usize, opts: &ExtractOptions) -> Result<BrSet> {
    logs.sort_unstable();
    if logs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invariant("two projective points share a residue".into()));
    }
    if opts.translate {
        let min = logs[0];
        for x in &mut logs {
            *x -= min;
        }
    }
    let mut set = BrSet {
        elements: logs,
        modulus: Some(modulus),
        r,
        verified: false,
    };
    set.verify(opts.budget)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, GeneratorOptions};
    use crate::qpoly::LinearizedPoly;

    #[test]
    fn small_sets() {
        let b = is_br_set(&[0, 1, 4, 16], 3, None, DEFAULT_BUDGET).unwrap();
        assert!(b.holds);
        assert_eq!(b.sums, 20);
        let b = is_br_set(&[0, 1, 2], 2, None, DEFAULT_BUDGET).unwrap();
        assert!(!b.holds);
        assert_eq!(b.witness, Some((vec![1, 1], vec![0, 2])));
        assert!(is_br_set(&[7], 5, None, DEFAULT_BUDGET).unwrap().holds);
        // 0+0 ≡ 1+3 mod 4
        assert!(is_br_set(&[0, 1, 3], 2, None, DEFAULT_BUDGET).unwrap().holds);
        assert!(!is_br_set(&[0, 1, 3], 2, Some(4), DEFAULT_BUDGET).unwrap().holds);
        assert!(is_br_set(&[0, 0], 2, None, DEFAULT_BUDGET).is_err());
        assert!(is_br_set(&[0, 5], 2, Some(5), DEFAULT_BUDGET).is_err());
        assert!(matches!(
            is_br_set(&[0, 1, 4, 16], 3, None, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn extraction_in_f64() {
        let ctx = make_field(2, 1, 6, None).unwrap();
        let gamma = ctx
            .find_generator(
                1,
                &GeneratorOptions {
                    primitive: true,
                    ..Default::default()
                },
            )
            .unwrap();
        let f = LinearizedPoly::monomial(&ctx, 3, 1).unwrap();
        let v = f.v_f_gamma(&gamma).unwrap();
        // this space is not Sidon in F_64, so extraction must refuse
        assert_eq!(
            extract_brset(&v, 2, &gamma, &ExtractOptions::default()),
            Err(Error::NotRSidon(2))
        );
        let one = Subspace::span(&ctx, std::slice::from_ref(&gamma)).unwrap();
        let s = extract_brset(&one, 4, &gamma, &ExtractOptions::default()).unwrap();
        assert_eq!(s.elements, vec![0]);
        assert!(s.verified);
        let s = extract_brset(
            &one,
            4,
            &gamma,
            &ExtractOptions {
                translate: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.elements, vec![1]);
    }
}
