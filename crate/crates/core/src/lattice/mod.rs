//! Exact integer and rational linear algebra on lattices.

mod cone;
mod group;
mod hilbert;
pub mod linalg;
mod matrix;
mod snf;

pub use cone::{combinations, ConeError, Facet, RationalCone};
pub use group::{cokernel, AbelianGroupPresentation, GroupElement};
pub use hilbert::{hilbert_basis, in_monoid, lattice_index};
pub use matrix::IntMatrix;
pub use snf::{snf, SnfDecomposition};

use crate::num::Int;

/// A unimodular matrix whose first row pairs to 1 with the primitive vector
/// `v`, and whose remaining rows annihilate it. Rows 1.. give coordinates on
/// the quotient lattice `Z^n / Z v`.
pub fn quotient_by_primitive(v: &[Int]) -> IntMatrix {
    let col = IntMatrix::from_rows(1, &v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let d = snf(&col);
    // left · v · right = e_1 with right = ±1; fold the sign into the first row.
    let mut w = d.left;
    if d.right[(0, 0)] < num_traits::Zero::zero() {
        w.negate_row(0);
    }
    w
}
