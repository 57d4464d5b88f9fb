use num_traits::{Signed, Zero};

use super::IntMatrix;
use crate::num::Int;

/// `left · m · right = diag`, with `left` and `right` unimodular.
#[derive(Debug, Clone)]
pub struct SnfDecomposition {
    pub diag: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries, in order; they form a divisibility chain.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let k = self.diag.rows().min(self.diag.cols());
        (0..k).map(|i| self.diag[(i, i)].clone()).take_while(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form. Pivots are chosen by smallest absolute value, ties broken
/// by (row, column), so the witnesses are deterministic.
pub fn snf(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_entry(&a, t) else {
                return SnfDecomposition { diag: a, left, right };
            };
            a.swap_rows(t, pi);
            left.swap_rows(t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&a[(i, t)] / &a[(t, t)]);
                a.add_row_multiple(i, t, &q);
                left.add_row_multiple(i, t, &q);
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col_multiple(j, t, &q);
                right.add_col_multiple(j, t, &q);
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let p = a[(t, t)].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[(i, j)] % &p).is_zero()));
            match bad {
                Some(i) => {
                    let one = Int::from(1);
                    a.add_row_multiple(t, i, &one);
                    left.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
    }
    SnfDecomposition { diag: a, left, right }
}

fn smallest_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(Int, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a[(i, j)].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}
