//! Torus-invariant Weil divisors.
//!
//! Support functions follow the convention `⟨m_σ, u_ρ⟩ = −a_ρ` for a divisor
//! `Σ a_ρ D_ρ`, so `div(χ^m) = Σ ⟨m, u_ρ⟩ D_ρ` and `D + div(χ^{m_σ})` vanishes
//! on the rays of `σ`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::fan::{Fan, RaySet, StarFan};
use crate::lattice::linalg::rank_rat;
use crate::lattice::{cokernel, snf, AbelianGroupPresentation, GroupElement, IntMatrix};
use crate::num::{dot, format_rat, lcm_all, Int, Rat};

pub type DivisorClass = GroupElement;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivisorError {
    #[error("divisor has {got} coefficients, fan has {expected} rays")]
    LengthMismatch { expected: usize, got: usize },
    #[error("divisor is not Q-Cartier on cone {cone}")]
    NotQCartier { cone: usize },
    #[error("cone {cone} is not full-dimensional")]
    NotFullDimensional { cone: usize },
    #[error("cone index {0} out of range")]
    NoSuchCone(usize),
    #[error("ray index {0} out of range")]
    NoSuchRay(usize),
    #[error("divisor has non-integral coefficients")]
    NotIntegral,
}

/// `Σ a_ρ D_ρ` with one exact rational per ray.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantDivisor {
    coeffs: Vec<Rat>,
}

impl InvariantDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![Rat::zero(); n] }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self { coeffs: coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect() }
    }

    pub fn from_fractions(coeffs: &[(i64, i64)]) -> Self {
        Self { coeffs: coeffs.iter().map(|&(p, q)| crate::num::rat(p, q)).collect() }
    }

    /// The prime divisor `D_i`.
    pub fn prime(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.coeffs[i] = Rat::one();
        d
    }

    /// `Σ_{i ∈ set} D_i`.
    pub fn indicator(n: usize, set: impl IntoIterator<Item = usize>) -> Self {
        let mut d = Self::zero(n);
        for i in set {
            d.coeffs[i] = Rat::one();
        }
        d
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: Rat) {
        self.coeffs[i] = c;
    }

    pub fn support(&self) -> RaySet {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// `self ≤ other` coefficientwise.
    pub fn le(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, t: &Rat) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * t).collect() }
    }

    pub fn integral_coeffs(&self) -> Result<Vec<Int>, DivisorError> {
        if !self.is_integral() {
            return Err(DivisorError::NotIntegral);
        }
        Ok(self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    /// Least common denominator of the coefficients.
    pub fn denominator(&self) -> Int {
        crate::num::common_denominator(self.coeffs.iter())
    }

    fn check_len(&self, f: &Fan) -> Result<(), DivisorError> {
        if self.len() != f.num_rays() {
            return Err(DivisorError::LengthMismatch { expected: f.num_rays(), got: self.len() });
        }
        Ok(())
    }
}

impl Add for &InvariantDivisor {
    type Output = InvariantDivisor;
    fn add(self, o: &InvariantDivisor) -> InvariantDivisor {
        InvariantDivisor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &InvariantDivisor {
    type Output = InvariantDivisor;
    fn sub(self, o: &InvariantDivisor) -> InvariantDivisor {
        InvariantDivisor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &InvariantDivisor {
    type Output = InvariantDivisor;
    fn neg(self) -> InvariantDivisor {
        InvariantDivisor { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for InvariantDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}·D{}", format_rat(c), i))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `K = −Σ D_ρ`.
pub fn canonical_divisor(f: &Fan) -> InvariantDivisor {
    InvariantDivisor { coeffs: vec![-Rat::one(); f.num_rays()] }
}

/// `Cl = coker(M → Z^{rays})`, `m ↦ (⟨m, u_ρ⟩)_ρ`.
pub fn class_group(f: &Fan) -> AbelianGroupPresentation {
    cokernel(&f.ray_matrix())
}

/// Class group of the affine chart of a full-dimensional maximal cone,
/// together with the restriction from divisors on the whole fan.
#[derive(Debug, Clone)]
pub struct LocalClassGroup {
    pub cone: usize,
    pub rays: Vec<usize>,
    pub group: AbelianGroupPresentation,
}

impl LocalClassGroup {
    pub fn restrict(&self, d: &InvariantDivisor) -> Vec<Rat> {
        self.rays.iter().map(|&i| d.coeff(i).clone()).collect()
    }

    pub fn class_of(&self, d: &InvariantDivisor) -> Result<DivisorClass, DivisorError> {
        let r = InvariantDivisor::new(self.restrict(d));
        Ok(self.group.class_of(&r.integral_coeffs()?))
    }

    pub fn rational_class(&self, d: &InvariantDivisor) -> Vec<Rat> {
        self.group.rational_class(&self.restrict(d))
    }
}

pub fn local_class_group(f: &Fan, cone: usize) -> Result<LocalClassGroup, DivisorError> {
    let set = f.max_cones().get(cone).ok_or(DivisorError::NoSuchCone(cone))?;
    if !f.cone(set).is_full_dimensional() {
        return Err(DivisorError::NotFullDimensional { cone });
    }
    let rays: Vec<usize> = set.iter().copied().collect();
    let group = cokernel(&IntMatrix::from_rows(f.rank(), &f.cone_rays(set)));
    Ok(LocalClassGroup { cone, rays, group })
}

pub fn class_of(g: &AbelianGroupPresentation, d: &InvariantDivisor) -> Result<DivisorClass, DivisorError> {
    Ok(g.class_of(&d.integral_coeffs()?))
}

/// `dim_Q` of the span of the classes of `divs` in `g ⊗ Q`.
pub fn q_span_dim(divs: &[InvariantDivisor], g: &AbelianGroupPresentation) -> usize {
    let rows: Vec<Vec<Rat>> = divs.iter().map(|d| g.rational_class(d.coeffs())).collect();
    if rows.is_empty() {
        return 0;
    }
    rank_rat(&rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartierIndex {
    Index(Int),
    NotQCartier,
}

impl CartierIndex {
    pub fn index(&self) -> Option<&Int> {
        match self {
            CartierIndex::Index(i) => Some(i),
            CartierIndex::NotQCartier => None,
        }
    }
}

/// Cartier index on a set of rays: `None` if no rational `m` matches.
/// Also returns the rational linear function `m` with `⟨m, u_ρ⟩ = −a_ρ`.
pub fn cartier_on_cone(f: &Fan, set: &RaySet, d: &InvariantDivisor) -> Option<(Int, Vec<Rat>)> {
    let rays = f.cone_rays(set);
    let n = f.rank();
    if rays.is_empty() {
        return Some((Int::one(), vec![Rat::zero(); n]));
    }
    let r = IntMatrix::from_rows(n, &rays);
    let dec = snf(&r);
    let factors = dec.invariant_factors();
    let rhs: Vec<Rat> = set.iter().map(|&i| -d.coeff(i)).collect();
    let y: Vec<Rat> = (0..rays.len())
        .map(|i| dec.left.row(i).iter().zip(&rhs).map(|(l, b)| Rat::from_integer(l.clone()) * b).sum())
        .collect();
    if y[factors.len()..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mprime: Vec<Rat> = (0..n)
        .map(|i| if i < factors.len() { &y[i] / Rat::from_integer(factors[i].clone()) } else { Rat::zero() })
        .collect();
    let index = lcm_all(mprime.iter().map(|q| q.denom()));
    let m: Vec<Rat> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from_integer(dec.right[(i, j)].clone()) * &mprime[j]).sum())
        .collect();
    Some((index, m))
}

/// Cartier index of `d` on every maximal cone.
pub fn cartier_data(d: &InvariantDivisor, f: &Fan) -> Result<Vec<CartierIndex>, DivisorError> {
    d.check_len(f)?;
    Ok(f.max_cones()
        .iter()
        .map(|s| match cartier_on_cone(f, s, d) {
            Some((i, _)) => CartierIndex::Index(i),
            None => CartierIndex::NotQCartier,
        })
        .collect())
}

pub fn is_q_cartier(d: &InvariantDivisor, f: &Fan) -> bool {
    d.len() == f.num_rays() && f.max_cones().iter().all(|s| cartier_on_cone(f, s, d).is_some())
}

/// Global Cartier index (lcm over maximal cones).
pub fn cartier_index(d: &InvariantDivisor, f: &Fan) -> Result<Int, DivisorError> {
    let data = cartier_data(d, f)?;
    let mut acc = Int::one();
    for (c, ci) in data.iter().enumerate() {
        match ci {
            CartierIndex::Index(i) => acc = acc.lcm(i),
            CartierIndex::NotQCartier => return Err(DivisorError::NotQCartier { cone: c }),
        }
    }
    Ok(acc)
}

/// The linear functions `m_σ` of the support function, one per maximal cone.
pub fn support_function(d: &InvariantDivisor, f: &Fan) -> Result<Vec<Vec<Rat>>, DivisorError> {
    d.check_len(f)?;
    f.max_cones()
        .iter()
        .enumerate()
        .map(|(c, s)| cartier_on_cone(f, s, d).map(|(_, m)| m).ok_or(DivisorError::NotQCartier { cone: c }))
        .collect()
}

/// A single `m` with `⟨m, u_ρ⟩ = −a_ρ` on every ray, if one exists
/// (`d` is principal as a Q-divisor).
pub fn global_linear_function(d: &InvariantDivisor, f: &Fan) -> Option<Vec<Rat>> {
    let all: RaySet = (0..f.num_rays()).collect();
    cartier_on_cone(f, &all, d).map(|(_, m)| m)
}

/// Nef iff the support function is convex across every interior wall, i.e.
/// `⟨m_σ, u⟩ ≥ −a_u` for each ray `u` of a cone adjacent to `σ`. On a
/// non-complete fan this is nefness over the affine base.
pub fn is_nef(d: &InvariantDivisor, f: &Fan) -> Result<bool, DivisorError> {
    let ms = support_function(d, f)?;
    for w in f.walls() {
        for (a, b) in [(w.left, w.right), (w.right, w.left)] {
            for &u in f.max_cones()[b].difference(&f.max_cones()[a]) {
                let val: Rat = ms[a].iter().zip(f.ray(u)).map(|(m, x)| m * Rat::from_integer(x.clone())).sum();
                if val < -d.coeff(u) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `(X, B)` is log canonical iff every coefficient is at most 1 and `K + B`
/// is Q-Cartier.
pub fn check_log_canonical(f: &Fan, b: &InvariantDivisor) -> bool {
    b.len() == f.num_rays()
        && b.coeffs().iter().all(|c| *c <= Rat::one())
        && is_q_cartier(&(&canonical_divisor(f) + b), f)
}

/// Restriction `D|_E` of a divisor Q-Cartier along `E = D_ρ` to the star fan.
///
/// Subtracting `div(χ^m)` with `⟨m, u_ρ⟩ = −a_ρ` kills the coefficient of `E`;
/// the result then descends to the quotient, where `D_u` meets `E` in
/// `(1/g)·D_w` if `q(u) = g·w`.
pub fn restrict_to_star(d: &InvariantDivisor, f: &Fan, ray: usize, star: &StarFan) -> Result<InvariantDivisor, DivisorError> {
    d.check_len(f)?;
    if ray >= f.num_rays() {
        return Err(DivisorError::NoSuchRay(ray));
    }
    for c in f.cones_containing_ray(ray) {
        if cartier_on_cone(f, &f.max_cones()[c], d).is_none() {
            return Err(DivisorError::NotQCartier { cone: c });
        }
    }
    let w0 = star.quotient.row(0);
    let a_e = d.coeff(ray);
    let coeffs = star
        .over
        .iter()
        .map(|&u| {
            let (_, g) = &star.ray_map[&u];
            (d.coeff(u) - a_e * Rat::from_integer(dot(w0, f.ray(u)))) / Rat::from_integer(g.clone())
        })
        .collect();
    Ok(InvariantDivisor::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::examples::*;
    use crate::num::rat;


    #[test]
    fn class_groups() {
        let g = class_group(&p2());
        assert_eq!((g.free_rank, g.torsion.len()), (1, 0));
        assert_eq!(class_group(&p1xp1()).free_rank, 2);
        let a1 = class_group(&a1_cone());
        assert_eq!((a1.free_rank, a1.torsion.clone()), (0, vec![Int::from(2)]));
    }

    #[test]
    fn local_groups() {
        assert!(local_class_group(&p2(), 0).unwrap().group.is_trivial());
        assert_eq!(local_class_group(&a1_cone(), 0).unwrap().group.torsion, vec![Int::from(2)]);
        let c = local_class_group(&conifold(), 0).unwrap().group;
        assert_eq!((c.free_rank, c.torsion.len()), (1, 0));
        let line = Fan::from_i64(2, &[&[1, 0]], &[&[0]]);
        assert_eq!(local_class_group(&line, 0).unwrap_err(), DivisorError::NotFullDimensional { cone: 0 });
    }

    #[test]
    fn spans() {
        let g = class_group(&p2());
        let lines: Vec<_> = (0..3).map(|i| InvariantDivisor::prime(3, i)).collect();
        assert_eq!(q_span_dim(&lines, &g), 1);
        assert_eq!(q_span_dim(&[], &g), 0);
        let g = class_group(&p1xp1());
        let d = [InvariantDivisor::prime(4, 0), InvariantDivisor::prime(4, 2), InvariantDivisor::prime(4, 1)];
        assert_eq!(q_span_dim(&d, &g), 2);
    }

    #[test]
    fn cartier_indices() {
        let a1 = a1_cone();
        let d = InvariantDivisor::from_i64(&[1, 0]);
        assert_eq!(cartier_data(&d, &a1).unwrap(), vec![CartierIndex::Index(Int::from(2))]);
        let c = conifold();
        let d = InvariantDivisor::from_i64(&[1, 0, 0, 0]);
        assert_eq!(cartier_data(&d, &c).unwrap(), vec![CartierIndex::NotQCartier]);
        let k = canonical_divisor(&c);
        assert_eq!(cartier_data(&k, &c).unwrap(), vec![CartierIndex::Index(Int::one())]);
        let half = InvariantDivisor::from_fractions(&[(1, 2), (0, 1), (0, 1)]);
        assert_eq!(cartier_index(&half, &p2()).unwrap(), Int::from(2));
    }

    #[test]
    fn support_function_convention() {
        let f = p2();
        let d = InvariantDivisor::from_i64(&[0, 0, 1]);
        for (s, m) in f.max_cones().iter().zip(support_function(&d, &f).unwrap()) {
            for &r in s {
                let v: Rat = m.iter().zip(f.ray(r)).map(|(a, b)| a * Rat::from_integer(b.clone())).sum();
                assert_eq!(v, -d.coeff(r));
            }
        }
    }

    #[test]
    fn nefness() {
        let k = canonical_divisor(&p2());
        assert!(is_nef(&-&k, &p2()).unwrap());
        assert!(!is_nef(&k, &p2()).unwrap());
        assert!(is_nef(&InvariantDivisor::zero(3), &p2()).unwrap());
        let bl = blown_up_plane();
        let e = InvariantDivisor::prime(3, 2);
        assert!(!is_nef(&e, &bl).unwrap());
        assert!(is_nef(&-&e, &bl).unwrap());
    }

    #[test]
    fn log_canonical() {
        assert!(check_log_canonical(&p2(), &InvariantDivisor::from_i64(&[1, 1, 1])));
        assert!(!check_log_canonical(&p2(), &InvariantDivisor::from_fractions(&[(3, 2), (0, 1), (0, 1)])));
        assert!(!check_log_canonical(&conifold(), &InvariantDivisor::from_i64(&[1, 0, 0, 0])));
        assert!(check_log_canonical(&conifold(), &InvariantDivisor::from_i64(&[1, 1, 1, 1])));
    }

    #[test]
    fn minus_exceptional_restricts_to_degree_one() {
        let bl = blown_up_plane();
        let star = bl.star_fan(2).unwrap();
        let r = restrict_to_star(&-&InvariantDivisor::prime(3, 2), &bl, 2, &star).unwrap();
        let deg: Rat = r.coeffs().iter().sum();
        assert_eq!(deg, Rat::one());
    }

    #[test]
    fn canonical_restriction_is_adjunction() {
        // (K + E)|_E = K_E on a smooth fan.
        let y = p2().star_subdivision(&crate::num::to_ints(&[1, 1])).unwrap();
        let e = y.ray_index(&crate::num::to_ints(&[1, 1])).unwrap();
        let star = y.star_fan(e).unwrap();
        let ke = &canonical_divisor(&y) + &InvariantDivisor::prime(y.num_rays(), e);
        let r = restrict_to_star(&ke, &y, e, &star).unwrap();
        let deg: Rat = r.coeffs().iter().sum();
        assert_eq!(deg, rat(-2, 1));
    }
}
