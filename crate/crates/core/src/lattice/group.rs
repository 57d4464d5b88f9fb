use num_traits::{One, Zero};

use super::{snf, IntMatrix};
use crate::num::{Int, Rat};

/// A finitely generated abelian group `Z^n / image(m)` in Smith coordinates.
///
/// `basis_map` is the left Smith witness: the class of `x ∈ Z^n` has
/// coordinates `basis_map · x`. Coordinates whose invariant factor is 1 are
/// dropped, those with factor `d ≥ 2` are torsion (read mod `d`), and the
/// trailing `free_rank` coordinates are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub basis_map: IntMatrix,
    trivial: usize,
}

/// A group element in the coordinates of an [`AbelianGroupPresentation`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub torsion: Vec<Int>,
    pub free: Vec<Int>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().all(Zero::is_zero) && self.free.iter().all(Zero::is_zero)
    }
}

/// Cokernel of `m : Z^cols → Z^rows`.
pub fn cokernel(m: &IntMatrix) -> AbelianGroupPresentation {
    let d = snf(m);
    let factors = d.invariant_factors();
    let trivial = factors.iter().filter(|f| f.is_one()).count();
    let torsion: Vec<Int> = factors[trivial..].to_vec();
    AbelianGroupPresentation { free_rank: m.rows() - factors.len(), torsion, basis_map: d.left, trivial }
}

impl AbelianGroupPresentation {
    /// Number of generators presented (the ambient `Z^n`).
    pub fn generators(&self) -> usize {
        self.basis_map.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn class_of(&self, x: &[Int]) -> GroupElement {
        let y = self.basis_map.mul_vec(x);
        let nt = self.torsion.len();
        let torsion = self
            .torsion
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let r = &y[self.trivial + k] % d;
                if r < Int::zero() {
                    r + d
                } else {
                    r
                }
            })
            .collect();
        let free = y[self.trivial + nt..].to_vec();
        GroupElement { torsion, free }
    }

    /// Image in `G ⊗ Q` of a rational combination of generators.
    pub fn rational_class(&self, x: &[Rat]) -> Vec<Rat> {
        let start = self.trivial + self.torsion.len();
        (start..self.basis_map.rows())
            .map(|i| self.basis_map.row(i).iter().zip(x).map(|(a, b)| Rat::from_integer(a.clone()) * b).sum())
            .collect()
    }

    /// Order of an element; `None` for infinite order.
    pub fn order(&self, e: &GroupElement) -> Option<Int> {
        if e.free.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(e.torsion.iter().zip(&self.torsion).fold(Int::one(), |acc, (x, d)| {
            let g = num_integer::Integer::gcd(x, d);
            num_integer::Integer::lcm(&acc, &(d / g))
        }))
    }

    /// The SNF-canonical torsion generator: the generator of the largest cyclic
    /// torsion factor, as a combination of presented generators.
    pub fn canonical_torsion_generator(&self) -> Option<Vec<Int>> {
        if self.torsion.is_empty() {
            return None;
        }
        let row = self.trivial + self.torsion.len() - 1;
        // Preimage of the unit vector e_row under basis_map.
        let inv = super::linalg::inverse_rat(
            &self.basis_map.row_vecs().iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect::<Vec<_>>(),
        )?;
        Some(inv.iter().map(|r| r[row].to_integer()).collect())
    }
}
