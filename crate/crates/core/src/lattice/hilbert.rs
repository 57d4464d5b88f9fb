use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::cone::{combinations, ConeError, RationalCone};
use super::linalg::{inverse_rat, rank_int};
use super::{snf, IntMatrix};
use crate::num::{Int, Rat};

/// Minimal generating set of the monoid `cone ∩ Z^rank`, sorted lexicographically.
///
/// Every maximal linearly independent subset of generators spans a simplicial
/// subcone; by Carathéodory these subcones cover the cone, so their
/// fundamental-parallelepiped points together with the generators generate the
/// monoid. Reducible elements are then discarded.
pub fn hilbert_basis(cone: &RationalCone) -> Result<Vec<Vec<Int>>, ConeError> {
    if !cone.is_pointed() {
        return Err(ConeError::NotPointed);
    }
    let gens = cone.generators();
    let d = cone.dim();
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut candidates: BTreeSet<Vec<Int>> = gens.iter().cloned().collect();
    for subset in combinations(gens.len(), d) {
        let sub: Vec<Vec<Int>> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank_int(&sub) != d {
            continue;
        }
        for p in parallelepiped_points(&sub) {
            if p.iter().any(|x| !x.is_zero()) {
                candidates.insert(p);
            }
        }
    }
    let cands: Vec<Vec<Int>> = candidates.into_iter().collect();
    let basis: Vec<Vec<Int>> = cands
        .iter()
        .filter(|g| {
            !cands.iter().any(|h| {
                h != *g && {
                    let diff: Vec<Int> = g.iter().zip(h).map(|(a, b)| a - b).collect();
                    cone.contains(&diff)
                }
            })
        })
        .cloned()
        .collect();
    Ok(basis)
}

/// Lattice points `Σ λ_i g_i` with `λ ∈ [0,1)^d` for linearly independent `g`,
/// in the saturated lattice `Z^n ∩ span(g)`.
fn parallelepiped_points(gens: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = gens[0].len();
    let d = gens.len();
    // Columns of s are the generators.
    let s = IntMatrix::from_rows(d, &(0..n).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect::<Vec<_>>());
    let dec = snf(&s);
    let factors = dec.invariant_factors();
    let to_rat = |m: &IntMatrix| -> Vec<Vec<Rat>> {
        m.row_vecs().iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect()
    };
    let left_inv = inverse_rat(&to_rat(&dec.left)).expect("unimodular");
    let right_inv = inverse_rat(&to_rat(&dec.right)).expect("unimodular");
    // Coordinates of the generators in the saturated basis: A = D_d · right^{-1}.
    let a: Vec<Vec<Rat>> = (0..d)
        .map(|i| right_inv[i].iter().map(|x| x * Rat::from_integer(factors[i].clone())).collect())
        .collect();
    let a_inv = inverse_rat(&a).expect("independent generators");

    let mut out = Vec::new();
    let mut c = vec![Int::zero(); d];
    loop {
        // λ = A^{-1} c, reduce to fractional parts.
        let lambda: Vec<Rat> = (0..d).map(|i| (0..d).map(|j| &a_inv[i][j] * Rat::from_integer(c[j].clone())).sum()).collect();
        let frac: Vec<Rat> = lambda.iter().map(|l| l - l.floor()).collect();
        let coords: Vec<Rat> = (0..d).map(|i| (0..d).map(|j| &a[i][j] * &frac[j]).sum()).collect();
        let point: Vec<Int> = (0..n).map(|r| (0..d).map(|k| &left_inv[r][k] * &coords[k]).sum::<Rat>().to_integer()).collect();
        out.push(point);

        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            c[k] += Int::one();
            if c[k] < factors[k] {
                break;
            }
            c[k] = Int::zero();
            k += 1;
        }
    }
}

/// Whether `x` is a non-negative integer combination of `basis`. Terminates
/// because every step stays inside a pointed cone.
pub fn in_monoid(basis: &[Vec<Int>], x: &[Int], cone: &RationalCone) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    for b in basis {
        let rest: Vec<Int> = x.iter().zip(b).map(|(p, q)| p - q).collect();
        if cone.contains(&rest) && in_monoid(basis, &rest, cone) {
            return true;
        }
    }
    false
}

/// Index of the sublattice spanned by independent vectors inside its saturation.
pub fn lattice_index(gens: &[Vec<Int>]) -> Int {
    let n = gens[0].len();
    let s = IntMatrix::from_rows(gens.len(), &(0..n).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect::<Vec<_>>());
    snf(&s).invariant_factors().iter().fold(Int::one(), |acc, f| acc * f).abs()
}
