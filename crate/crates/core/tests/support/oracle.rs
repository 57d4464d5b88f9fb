//! Exhaustive minimization over partial set partitions of the boundary
//! primes and orbifold index vectors, with part weights from an exact LP.

use num_traits::{One, Signed, Zero};

use super::partial_partitions;
use super::simplex::maximize;
use toricomplex::complexity::Mode;
use toricomplex::lattice::RationalCone;
use toricomplex::num::{Int, Rat};
use toricomplex::pair::ToricPair;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleValues {
    pub c_fine: Rat,
    pub c_orb: Rat,
    pub lps: u64,
}

/// Rank by fraction-free Gaussian elimination.
fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, |x| x.len());
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &k * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn ints(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Dimension of the span of block classes in `Cl ⊗ Q`: the rank of blocks
/// stacked on the principal divisors, minus the rank of the latter.
fn span(principal: &[Vec<Rat>], blocks: &[Vec<usize>], nrays: usize) -> usize {
    let base = rank(principal.to_vec());
    let mut rows = principal.to_vec();
    for blk in blocks {
        let mut v = vec![Rat::zero(); nrays];
        for &r in blk {
            v[r] = Rat::one();
        }
        rows.push(v);
    }
    rank(rows) - base
}

fn meets_fiber(p: &ToricPair, ray: usize) -> bool {
    match &p.mode {
        Mode::Relative { base_rays } => {
            let tau = RationalCone::new(p.fan.rank(), base_rays.clone()).unwrap();
            p.fan.max_cones().iter().filter(|c| c.contains(&ray)).any(|c| {
                let gens = p.fan.cone_rays(c);
                let sum: Vec<Int> = (0..p.fan.rank()).map(|i| gens.iter().map(|g| &g[i]).sum()).collect();
                tau.contains_relint(&sum)
            })
        }
        _ => true,
    }
}

/// Weight grid used as a feasibility cross-check of every LP optimum.
const GRID: i64 = 24;

fn block_optimum(blocks: &[Vec<usize>], budget: &[Rat], coeff: &[Rat]) -> Rat {
    // One row per (block, ray): b_j · coeff_ρ ≤ budget_ρ.
    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for (j, blk) in blocks.iter().enumerate() {
        for &r in blk {
            let mut row = vec![Rat::zero(); blocks.len()];
            row[j] = coeff[r].clone();
            a.push(row);
            rhs.push(budget[r].clone());
        }
    }
    let (opt, x) = maximize(&a, &rhs, &vec![Rat::one(); blocks.len()]);
    // The grid point just below the optimum in every coordinate is feasible.
    for (j, blk) in blocks.iter().enumerate() {
        let g = Rat::new((&x[j] * Rat::from_integer(GRID.into())).floor().to_integer(), GRID.into());
        assert!(blk.iter().all(|&r| &g * &coeff[r] <= budget[r]));
    }
    opt
}

/// `c̄` and `ĉ` by exhaustion. Orbifold indices run over `1..=max_index`
/// subject to `1 − 1/n ≤ B_ρ`; parts are `Σ_{ρ ∈ block} (1/n_ρ) D_ρ`.
pub fn brute_force(p: &ToricPair, max_index: u64) -> OracleValues {
    let f = &p.fan;
    let n = f.num_rays();
    let b = &p.boundary;
    let dim = Rat::from_integer(Int::from(f.rank()));
    let principal: Vec<Vec<Rat>> = (0..f.rank()).map(|i| ints(&f.rays().iter().map(|u| u[i].clone()).collect::<Vec<_>>())).collect();
    let cands: Vec<usize> = (0..n).filter(|&r| b.coeff(r).is_positive() && meets_fiber(p, r)).collect();
    let mut c_fine: Option<Rat> = None;
    let mut c_orb: Option<Rat> = None;
    let mut lps = 0u64;
    let ones = vec![Rat::one(); n];
    for blocks in partial_partitions(&cands) {
        let s = Rat::from_integer(Int::from(span(&principal, &blocks, n)));
        let v = &dim + &s - block_optimum(&blocks, b.coeffs(), &ones);
        lps += 1;
        if c_fine.as_ref().is_none_or(|c| v < *c) {
            c_fine = Some(v.clone());
        }
        let assigned: Vec<usize> = blocks.iter().flatten().copied().collect();
        let options: Vec<Vec<u64>> = assigned
            .iter()
            .map(|&r| (1..=max_index).filter(|&k| Rat::one() - Rat::new(Int::one(), Int::from(k)) <= *b.coeff(r)).collect())
            .collect();
        let mut digits = vec![0usize; assigned.len()];
        loop {
            let mut budget = b.coeffs().to_vec();
            let mut coeff = ones.clone();
            for (k, &r) in assigned.iter().enumerate() {
                let idx = Int::from(options[k][digits[k]]);
                budget[r] -= Rat::one() - Rat::new(Int::one(), idx.clone());
                coeff[r] = Rat::new(Int::one(), idx);
            }
            let v = &dim + &s - block_optimum(&blocks, &budget, &coeff);
            lps += 1;
            if c_orb.as_ref().is_none_or(|c| v < *c) {
                c_orb = Some(v);
            }
            let mut k = 0;
            while k < digits.len() {
                digits[k] += 1;
                if digits[k] < options[k].len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
        }
    }
    OracleValues { c_fine: c_fine.unwrap(), c_orb: c_orb.unwrap(), lps }
}

