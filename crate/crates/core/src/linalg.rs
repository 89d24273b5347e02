//! Row reduction over `F_p`.
//!
//! Every subspace in the crate bottoms out here: vectors are coefficient
//! lists over the prime field and a span is kept in reduced row echelon form,
//! pivots at the lowest nonzero coordinate of each row. The reduced form is
//! unique, so two spans are equal exactly when their row lists are.

use crate::arith::{inv_mod, mul_mod, sub_mod};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Echelon {
    p: u32,
    width: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u32, width: usize) -> Self {
        Self {
            p,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(p: u32, width: usize, rows: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut ech = Self::new(p, width);
        for row in rows {
            ech.insert(row);
        }
        ech
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_rows(self) -> Vec<Vec<u32>> {
        self.rows
    }

    /// Residue of `v` after eliminating every pivot column.
    pub fn reduce(&self, mut v: Vec<u32>) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.width);
        let p = self.p;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row).skip(pc) {
                if r != 0 {
                    *x = sub_mod(*x, mul_mod(c, r, p), p);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        let p = self.p;
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[pc], p);
        if inv != 1 {
            for x in v.iter_mut().skip(pc) {
                *x = mul_mod(*x, inv, p);
            }
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c == 0 {
                continue;
            }
            for (x, &r) in row.iter_mut().zip(&v).skip(pc) {
                if r != 0 {
                    *x = sub_mod(*x, mul_mod(c, r, p), p);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, v);
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }
}

/// Vectors `c` with `Σ c_i · images[i] = 0` (the left kernel), in reduced form.
pub fn left_kernel(p: u32, images: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = images.len();
    let Some(w) = images.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut ech = Echelon::new(p, w + n);
    for (i, img) in images.iter().enumerate() {
        let mut row = img.clone();
        row.resize(w + n, 0);
        row[w + i] = 1;
        ech.insert(row);
    }
    let kernel = ech
        .rows
        .iter()
        .zip(&ech.pivots)
        .filter(|(_, &pc)| pc >= w)
        .map(|(row, _)| row[w..].to_vec());
    Echelon::from_rows(p, n, kernel).into_rows()
}

/// Intersection of two row spaces by the Zassenhaus construction: reduce the
/// stacked rows `[a | a]`, `[b | 0]`; rows whose left half vanishes carry the
/// common solutions in their right half.
pub fn intersect(p: u32, width: usize, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut ech = Echelon::new(p, 2 * width);
    for row in a {
        let mut v = row.clone();
        v.extend_from_slice(row);
        ech.insert(v);
    }
    for row in b {
        let mut v = row.clone();
        v.resize(2 * width, 0);
        ech.insert(v);
    }
    let common = ech
        .rows
        .iter()
        .zip(&ech.pivots)
        .filter(|(_, &pc)| pc >= width)
        .map(|(row, _)| row[width..].to_vec());
    Echelon::from_rows(p, width, common).into_rows()
}

/// Square matrix product over `F_p` (row-major, `x·A` convention).
pub fn mat_mul(p: u32, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let w = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut acc = vec![0u64; w];
            for (&c, brow) in row.iter().zip(b) {
                if c == 0 {
                    continue;
                }
                for (x, &y) in acc.iter_mut().zip(brow) {
                    *x = (*x + c as u64 * y as u64) % p as u64;
                }
            }
            acc.into_iter().map(|x| x as u32).collect()
        })
        .collect()
}
