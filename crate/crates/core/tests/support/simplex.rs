//! Dense tableau simplex over exact rationals with Bland's rule, for
//! `max c·x` subject to `A x ≤ b`, `x ≥ 0`, `b ≥ 0`.

use num_traits::{Signed, Zero};
use toricomplex::num::Rat;

/// Optimal value and an optimal point.
pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> (Rat, Vec<Rat>) {
    let m = a.len();
    let n = c.len();
    assert!(b.iter().all(|x| !x.is_negative()), "origin must be feasible");
    // Columns: n originals, m slacks, rhs.
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|j| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut obj: Vec<Rat> = c.iter().map(|x| -x).collect();
    obj.extend(std::iter::repeat(Rat::zero()).take(m + 1));
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][n + m] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("bounded problem");
        let p = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &p;
        }
        let pivot = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let k = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &k * y;
                }
            }
        }
        let k = obj[enter].clone();
        for (x, y) in obj.iter_mut().zip(&pivot) {
            *x -= &k * y;
        }
        basis[r] = enter;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][n + m].clone();
        }
    }
    (obj[n + m].clone(), x)
}
