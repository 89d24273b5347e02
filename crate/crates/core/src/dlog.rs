//! Baby-step/giant-step discrete logarithms in `F_{q^n}^*`.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::field::{ElementKey, FieldElement};

/// Largest baby-step table we are willing to hold in memory.
pub const MAX_TABLE: u64 = 1 << 26;

/// Baby steps `γ^j ↦ j` for `j < m = ⌈√N⌉`, plus the giant stride `γ^{-m}`.
#[derive(Debug)]
pub struct BsgsTable {
    gamma: FieldElement,
    order: u64,
    m: u64,
    baby: HashMap<ElementKey, u64>,
    giant: FieldElement,
}

impl BsgsTable {
    /// Builds the table for a primitive `γ`.
    pub fn new(gamma: &FieldElement) -> Result<Self> {
        if !gamma.is_primitive()? {
            return invalid("γ is not a primitive element");
        }
        let ctx = gamma.ctx();
        let order = ctx
            .group_order()
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("group order does not fit in 64 bits".into()))?;
        let m = order.isqrt() + u64::from(order.isqrt().pow(2) < order);
        if m > MAX_TABLE {
            return Err(Error::BudgetExceeded {
                required: m as u128,
                cap: MAX_TABLE as u128,
            });
        }
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = ctx.one();
        for j in 0..m {
            baby.entry(cur.key()).or_insert(j);
            cur = &cur * gamma;
        }
        // cur = γ^m
        let giant = cur.inverse().expect("γ is a unit");
        Ok(Self {
            gamma: gamma.clone(),
            order,
            m,
            baby,
            giant,
        })
    }

    pub fn table_size(&self) -> usize {
        self.baby.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn gamma(&self) -> &FieldElement {
        &self.gamma
    }

    /// The unique `e ∈ [0, q^n - 1)` with `γ^e = x`.
    pub fn log(&self, x: &FieldElement) -> Result<u64> {
        if x.ctx() != self.gamma.ctx() {
            return Err(Error::MixedContexts);
        }
        if x.is_zero() {
            return invalid("discrete log of zero");
        }
        let mut y = x.clone();
        for i in 0..self.m {
            if let Some(&j) = self.baby.get(&y.key()) {
                return Ok((i * self.m + j) % self.order);
            }
            y = &y * &self.giant;
        }
        Err(Error::Invariant("giant steps exhausted for a primitive base".into()))
    }
}

/// One-shot `log_γ(x)`; build a [`BsgsTable`] when taking many logs.
pub fn discrete_log(x: &FieldElement, gamma: &FieldElement) -> Result<u64> {
    if x.is_zero() {
        return invalid("discrete log of zero");
    }
    BsgsTable::new(gamma)?.log(x)
}
