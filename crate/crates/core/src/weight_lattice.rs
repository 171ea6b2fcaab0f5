//! Serre weights as lattice data: canonical forms under the row-shift
//! equivalence, lifts to Hodge types, norm, duality, twists, regularity and
//! full enumeration at a fixed context.
//!
//! A weight is an `f × n` integer matrix, one non-increasing row per residue
//! embedding, with successive gaps at most `p−1`. Two matrices are equivalent
//! when they differ by per-row constants `x_0, …, x_{f−1}` with
//! `Σ_j p^j x_j ≡ 0 (mod p^f − 1)`; [`SerreWeight`] always stores the unique
//! canonical representative (rows `0..f−1` except the last have bottom entry
//! `0`, the last row's bottom entry lies in `[0, p^f − 2]`).

use crate::context::{eta, Context};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A canonical Serre weight. Structural equality coincides with equivalence
/// of the underlying classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SerreWeight {
    /// The arithmetic frame the weight lives in.
    pub ctx: Context,
    /// One non-increasing `n`-tuple per residue embedding, canonicalized.
    pub rows: Vec<Vec<i64>>,
}

/// A Hodge type: one non-increasing `n`-tuple per embedding of `K`
/// (`e·f` columns; column `σ·e + j` is the `j`-th embedding above residue
/// embedding `σ`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HodgeType {
    /// The arithmetic frame.
    pub ctx: Context,
    /// One column per embedding of `K`.
    pub cols: Vec<Vec<i64>>,
}

/// Errors from weight construction and manipulation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    /// A row increases or has a gap exceeding `p−1`.
    #[error("row {row} is not restricted at position {pos} (gap {gap}, allowed 0..={max})")]
    NotRestricted { row: usize, pos: usize, gap: i64, max: i64 },
    /// The input matrix has the wrong shape for the context.
    #[error("expected a {f}×{n} matrix, got {rows}×{cols}")]
    BadShape { f: u32, n: u32, rows: usize, cols: usize },
    /// `shift_of` requires equal entries at the split position.
    #[error("shift undefined: entries {i0} and {next} differ in row {row}", next = i0 + 1)]
    ShiftUndefined { row: usize, i0: usize },
}

impl SerreWeight {
    /// Builds the canonical representative of the class of `raw`.
    ///
    /// Fails if a row increases or a successive gap exceeds `p−1` (such a
    /// matrix is not restricted, and restrictedness is shift-invariant).
    pub fn canonicalize(raw: &[Vec<i64>], ctx: Context) -> Result<SerreWeight, WeightError> {
        let (f, n) = (ctx.f as usize, ctx.n as usize);
        if raw.len() != f || raw.iter().any(|r| r.len() != n) {
            return Err(WeightError::BadShape {
                f: ctx.f,
                n: ctx.n,
                rows: raw.len(),
                cols: raw.first().map_or(0, |r| r.len()),
            });
        }
        let max_gap = ctx.p as i64 - 1;
        for (ri, row) in raw.iter().enumerate() {
            for i in 0..n.saturating_sub(1) {
                let gap = row[i] - row[i + 1];
                if !(0..=max_gap).contains(&gap) {
                    return Err(WeightError::NotRestricted { row: ri, pos: i, gap, max: max_gap });
                }
            }
        }
        let m = ctx.pf_minus_1_i64();
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(f);
        // Shift rows 0..f−1 so their bottom entry is 0; the congruence then
        // determines the last row's shift mod p^f − 1, and we take the unique
        // choice putting its bottom entry in [0, p^f − 2].
        let mut partial = 0i64; // Σ_{j<f−1} p^j x_j  (mod m)
        let mut pj = 1i64; // p^j (mod m)
        for (j, row) in raw.iter().enumerate() {
            if j + 1 < f {
                let x = -row[n - 1];
                rows.push(row.iter().map(|&v| v + x).collect());
                partial = (partial + pj.checked_mul(x.rem_euclid(m)).expect("overflow")) % m;
                pj = pj * (ctx.p as i64 % m) % m;
            } else {
                // p^{f−1} is invertible mod p^f − 1 with inverse p.
                let x_class = (-(ctx.p as i64 % m) * partial).rem_euclid(m);
                let bottom = row[n - 1];
                // smallest x ≥ −bottom with x ≡ x_class (mod m)
                let x = -bottom + (x_class + bottom).rem_euclid(m);
                rows.push(row.iter().map(|&v| v + x).collect());
            }
        }
        Ok(SerreWeight { ctx, rows })
    }

    /// All `e^f` lifts of the weight: for each residue embedding choose one
    /// of the `e` embeddings of `K` above it to carry the row, all other
    /// columns zero.
    pub fn lifts_of(&self) -> Vec<HodgeType> {
        let (f, e) = (self.ctx.f as usize, self.ctx.e as usize);
        let zero = vec![0i64; self.ctx.n as usize];
        let mut out = Vec::new();
        let mut choice = vec![0usize; f];
        loop {
            let mut cols = vec![zero.clone(); f * e];
            for (sigma, &j) in choice.iter().enumerate() {
                cols[sigma * e + j] = self.rows[sigma].clone();
            }
            out.push(HodgeType { ctx: self.ctx, cols });
            // odometer over choices
            let mut k = 0;
            while k < f {
                choice[k] += 1;
                if choice[k] < e {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == f {
                break;
            }
        }
        out
    }

    /// `‖a‖ = Σ_{σ,i} (n+1−2i) a_{σ,i}`.
    pub fn norm(&self) -> i64 {
        let n = self.ctx.n as i64;
        self.rows
            .iter()
            .flat_map(|row| {
                row.iter()
                    .enumerate()
                    .map(move |(i0, &v)| (n + 1 - 2 * (i0 as i64 + 1)) * v)
            })
            .sum()
    }

    /// The dual weight `F^∨ ⊗ det^{1−n}`: rows reversed, negated, shifted by
    /// `1−n`, then canonicalized. An involution.
    pub fn dual_weight(&self) -> SerreWeight {
        let shift = 1 - self.ctx.n as i64;
        let raw: Vec<Vec<i64>> = self
            .rows
            .iter()
            .map(|row| row.iter().rev().map(|&v| -v + shift).collect())
            .collect();
        SerreWeight::canonicalize(&raw, self.ctx).expect("dual of a restricted weight is restricted")
    }

    /// Adds `c` to every entry and canonicalizes (twisting by a power of the
    /// determinant character).
    pub fn twist(&self, c: i64) -> SerreWeight {
        let raw: Vec<Vec<i64>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&v| v + c).collect())
            .collect();
        SerreWeight::canonicalize(&raw, self.ctx).expect("twist preserves restrictedness")
    }

    /// Whether every successive gap is strictly less than `p−1`.
    pub fn is_regular(&self) -> bool {
        let max = self.ctx.p as i64 - 1;
        self.rows
            .iter()
            .all(|row| row.windows(2).all(|w| w[0] - w[1] < max))
    }

    /// The shift of the weight at `i0 ∈ 1..n`: adds `p−1` to entries
    /// `1..=i0` of every row, defined only when entries `i0` and `i0+1`
    /// agree in every row.
    pub fn shift_of(&self, i0: usize) -> Result<SerreWeight, WeightError> {
        assert!((1..self.ctx.n as usize).contains(&i0), "i0 out of range");
        for (ri, row) in self.rows.iter().enumerate() {
            if row[i0 - 1] != row[i0] {
                return Err(WeightError::ShiftUndefined { row: ri, i0 });
            }
        }
        let pm1 = self.ctx.p as i64 - 1;
        let raw: Vec<Vec<i64>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, &v)| if i < i0 { v + pm1 } else { v })
                    .collect()
            })
            .collect();
        SerreWeight::canonicalize(&raw, self.ctx)
    }

    /// The rows with `η` added to each (used to pass to type construction).
    pub fn rows_plus_eta(&self) -> Vec<Vec<i64>> {
        let eta = eta(self.ctx.n);
        self.rows
            .iter()
            .map(|row| row.iter().zip(&eta).map(|(&v, &h)| v + h).collect())
            .collect()
    }
}

/// Yields every canonical weight of the context exactly once
/// (`(p^f − 1) · p^{f(n−1)}` of them).
pub fn enumerate_all(ctx: Context) -> impl Iterator<Item = SerreWeight> {
    let (f, n) = (ctx.f as usize, ctx.n as usize);
    let p = ctx.p as i64;
    let m = ctx.pf_minus_1_i64();
    let num_gaps = f * (n - 1);
    let mut gaps = vec![0i64; num_gaps];
    let mut bottom = 0i64;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut rows = Vec::with_capacity(f);
        for sigma in 0..f {
            let b = if sigma + 1 == f { bottom } else { 0 };
            let mut row = vec![b; n];
            for i in (0..n - 1).rev() {
                row[i] = row[i + 1] + gaps[sigma * (n - 1) + i];
            }
            rows.push(row);
        }
        let out = SerreWeight { ctx, rows };
        // advance odometer: bottom fastest, then gaps
        bottom += 1;
        if bottom >= m {
            bottom = 0;
            let mut k = 0;
            while k < num_gaps {
                gaps[k] += 1;
                if gaps[k] < p {
                    break;
                }
                gaps[k] = 0;
                k += 1;
            }
            if k == num_gaps {
                done = true;
            }
        }
        Some(out)
    })
}

impl HodgeType {
    /// The Hodge–Tate multiset `{λ_{κ,i} + n − i}` of one column, returned in
    /// decreasing order.
    pub fn ht_weights(&self, col: usize) -> Vec<i64> {
        let n = self.ctx.n as i64;
        self.cols[col]
            .iter()
            .enumerate()
            .map(|(i0, &v)| v + n - (i0 as i64 + 1))
            .collect()
    }
}
