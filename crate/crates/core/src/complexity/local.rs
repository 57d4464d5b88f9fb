use num_traits::One;

use super::ComplexityError;
use crate::divisor::{canonical_divisor, cartier_on_cone, local_class_group, DivisorError, InvariantDivisor};
use crate::fan::Fan;
use crate::num::{Int, Rat};

/// `c^loc` at the fixed point of a maximal cone with its realizing boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalComplexity {
    pub value: Rat,
    pub boundary: InvariantDivisor,
    pub class_rank: usize,
}

/// Local complexity over invariant lc boundaries.
///
/// `dim + rank Cl(X_x) − Σ a_ρ` only depends on the coefficients of rays of
/// `σ`, each bounded by 1, and the boundary with all of them equal to 1 makes
/// `K + B` Cartier on `σ`. So that boundary attains the infimum.
pub fn local_complexity_cloc(f: &Fan, cone: usize) -> Result<LocalComplexity, ComplexityError> {
    let l = local_class_group(f, cone).map_err(|e| match e {
        DivisorError::NoSuchCone(c) => ComplexityError::NoSuchCone(c),
        _ => ComplexityError::NotFullDimensional(cone),
    })?;
    let boundary = InvariantDivisor::indicator(f.num_rays(), l.rays.iter().copied());
    let kb = &canonical_divisor(f) + &boundary;
    if cartier_on_cone(f, &f.max_cones()[cone], &kb).is_none() {
        return Err(ComplexityError::NotQCartier);
    }
    let total = Rat::from_integer(Int::from(l.rays.len()));
    let value = Rat::from_integer(Int::from(f.rank() + l.group.free_rank)) - total;
    debug_assert!(boundary.coeffs().iter().all(|c| *c <= Rat::one()));
    Ok(LocalComplexity { value, boundary, class_rank: l.group.free_rank })
}
