//! Orbifold cones over polarized toric varieties and the degree-zero part of
//! the Cox ring of a plt-type star subdivision of an affine cone.
//!
//! For `σ` and an interior primitive `v`, let `Y` be the star subdivision and
//! `E = D_v`. The degree-zero monoid `V ⊂ N^{r+1}` consists of exponent
//! vectors of `x_1^{a_1}⋯x_r^{a_r} e^b` with class 0 in `Cl(Y_x)`; `b` is
//! then determined by `a` and is the grading. `X_x` is recovered as the cone
//! over `(E, −E|_E)`, checked here by an explicit unimodular map.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::divisor::{restrict_to_star, support_function, DivisorError, InvariantDivisor};
use crate::fan::{Fan, FanError, StarFan};
use crate::lattice::linalg::inverse_rat;
use crate::lattice::{hilbert_basis, quotient_by_primitive, snf, AbelianGroupPresentation, ConeError, GroupElement, IntMatrix, RationalCone};
use crate::num::{dot, dot_rat_int, primitive, primitive_from_rational, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeCoxError {
    #[error("the fan is not complete")]
    NotComplete,
    #[error("divisor has {got} coefficients, fan has {expected} rays")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the divisor is not ample")]
    NotAmple,
    #[error("expected a single pointed full-dimensional cone using every ray")]
    NotAffine,
    #[error("{0:?} is not in the interior of the cone")]
    NotInterior(Vec<Int>),
    #[error("{0:?} is already a ray: no exceptional divisor")]
    TrivialSubdivision(Vec<Int>),
    #[error("Cl(Y_x) has torsion {torsion:?} (canonical generator {generator:?}); pass to the torsion cover")]
    TorsionObstruction { torsion: Vec<Int>, generator: Vec<Int> },
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// A complete fan with an ample invariant Q-divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedToric {
    fan: Fan,
    divisor: InvariantDivisor,
}

impl PolarizedToric {
    pub fn new(fan: Fan, divisor: InvariantDivisor) -> Result<Self, ConeCoxError> {
        if divisor.len() != fan.num_rays() {
            return Err(ConeCoxError::LengthMismatch { expected: fan.num_rays(), got: divisor.len() });
        }
        if !fan.is_complete() {
            return Err(ConeCoxError::NotComplete);
        }
        if !is_ample(&divisor, &fan)? {
            return Err(ConeCoxError::NotAmple);
        }
        Ok(Self { fan, divisor })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn divisor(&self) -> &InvariantDivisor {
        &self.divisor
    }
}

/// Strict convexity of the support function across every wall.
pub fn is_ample(d: &InvariantDivisor, f: &Fan) -> Result<bool, DivisorError> {
    let ms = support_function(d, f)?;
    for w in f.walls() {
        for (a, b) in [(w.left, w.right), (w.right, w.left)] {
            for &u in f.max_cones()[b].difference(&f.max_cones()[a]) {
                if dot_rat_int(&ms[a], f.ray(u)) <= -d.coeff(u) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The affine toric variety `Spec ⊕_t H^0(⌊t d⌋)`: the dual of the cone over
/// the polytope of `d` at height 1, i.e. the cone on `(u_ρ, a_ρ)`.
pub fn cone_over(p: &PolarizedToric) -> Fan {
    let f = &p.fan;
    let rays: Vec<Vec<Int>> = (0..f.num_rays())
        .map(|r| {
            let mut v: Vec<Rat> = f.ray(r).iter().map(|x| Rat::from_integer(x.clone())).collect();
            v.push(p.divisor.coeff(r).clone());
            primitive_from_rational(&v)
        })
        .collect();
    let all = (0..rays.len()).collect();
    Fan::new(f.rank() + 1, rays, vec![all])
}

/// `Y`, the index of `E` among its rays, and the classes of all invariant
/// divisors of `Y` in `Cl(Y_x)` (those of `σ` first, `E` last).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxDegrees {
    pub y: Fan,
    pub exceptional: usize,
    pub group: AbelianGroupPresentation,
    pub degrees: Vec<GroupElement>,
}

fn affine_cone(x: &Fan) -> Result<RationalCone, ConeCoxError> {
    if x.max_cones().len() != 1 || x.max_cones()[0].len() != x.num_rays() {
        return Err(ConeCoxError::NotAffine);
    }
    let c = x.max_cone(0);
    if !c.is_full_dimensional() || !c.is_pointed() {
        return Err(ConeCoxError::NotAffine);
    }
    Ok(c)
}

fn check_interior(x: &Fan, v: &[Int]) -> Result<Vec<Int>, ConeCoxError> {
    let c = affine_cone(x)?;
    if v.len() != x.rank() || v.iter().all(Zero::is_zero) {
        return Err(ConeCoxError::NotInterior(v.to_vec()));
    }
    let v = primitive(v);
    if x.ray_index(&v).is_some() {
        return Err(ConeCoxError::TrivialSubdivision(v));
    }
    if !c.contains_relint(&v) {
        return Err(ConeCoxError::NotInterior(v));
    }
    Ok(v)
}

fn identity_columns(n: usize) -> impl Iterator<Item = Vec<Int>> {
    (0..n).map(move |i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
}

pub fn cox_degrees(x: &Fan, v: &[Int]) -> Result<CoxDegrees, ConeCoxError> {
    let v = check_interior(x, v)?;
    let y = x.star_subdivision(&v)?;
    let exceptional = y.num_rays() - 1;
    debug_assert_eq!(y.ray(exceptional), v.as_slice());
    let group = crate::divisor::class_group(&y);
    let degrees = identity_columns(y.num_rays()).map(|e| group.class_of(&e)).collect();
    Ok(CoxDegrees { y, exceptional, group, degrees })
}

/// Generators of the degree-zero monoid with their grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMonoid {
    /// Exponent vectors, `E` last, sorted lexicographically.
    pub generators: Vec<Vec<Int>>,
    pub group: AbelianGroupPresentation,
    /// `τ̃` of each generator: its exponent of `e`.
    pub grading: Vec<Int>,
}

impl GradedMonoid {
    pub fn degree(&self, exps: &[Int]) -> GroupElement {
        self.group.class_of(exps)
    }
}

/// Hilbert basis of `V` in exponent space.
///
/// `V` is the image of `σ^∨ ∩ M` under `m ↦ (⟨m, u_i⟩, ⟨m, v⟩)`, since the
/// kernel of the degree map is exactly the lattice of principal divisors.
pub fn degree_zero_monoid(g: &CoxDegrees) -> Result<GradedMonoid, ConeCoxError> {
    if !g.group.torsion.is_empty() {
        return Err(ConeCoxError::TorsionObstruction {
            torsion: g.group.torsion.clone(),
            generator: g.group.canonical_torsion_generator().unwrap_or_default(),
        });
    }
    let y = &g.y;
    let n = y.rank();
    // σ is the union of the cones of Y; its dual is cut out by all rays.
    let sigma = RationalCone::new(n, y.rays().to_vec())?;
    let dual = RationalCone::new(n, sigma.dual_generators()?)?;
    let mut generators: Vec<Vec<Int>> = hilbert_basis(&dual)?
        .iter()
        .map(|m| (0..y.num_rays()).map(|r| dot(m, y.ray(r))).collect())
        .collect();
    generators.sort();
    for e in &generators {
        debug_assert!(g.group.class_of(e).is_zero());
    }
    let grading = generators.iter().map(|e| e.last().unwrap().clone()).collect();
    let group = g.group.clone();
    Ok(GradedMonoid { generators, group, grading })
}

/// The index-one cover killing the torsion of `Cl(Y_x)`: the same cones in
/// the sublattice `N'` spanned by the rays of `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionCover {
    pub torsion: Vec<Int>,
    /// SNF-canonical torsion generator as a combination of invariant divisors of `Y`.
    pub generator: Vec<Int>,
    /// Basis of `N'` in coordinates of `N`.
    pub basis: Vec<Vec<Int>>,
    pub index: Int,
}

/// Re-expresses `σ` and `v` in the lattice spanned by the rays of the
/// subdivision. Returns the new cone, the new `v` and the cover data.
pub fn torsion_cover(x: &Fan, v: &[Int]) -> Result<(Fan, Vec<Int>, TorsionCover), ConeCoxError> {
    let degrees = cox_degrees(x, v)?;
    let v = primitive(v);
    let n = x.rank();
    let mut gens: Vec<Vec<Int>> = x.rays().to_vec();
    gens.push(v.clone());
    // Columns are the generators.
    let g = IntMatrix::from_rows(gens.len(), &(0..n).map(|i| gens.iter().map(|r| r[i].clone()).collect()).collect::<Vec<_>>());
    let dec = snf(&g);
    let d = dec.invariant_factors();
    let coords = |x: &[Int]| -> Vec<Int> {
        let y = dec.left.mul_vec(x);
        (0..n).map(|i| &y[i] / &d[i]).collect()
    };
    let left_inv = inverse_rat(&dec.left.row_vecs().iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect::<Vec<_>>())
        .expect("unimodular");
    let basis: Vec<Vec<Int>> = (0..n).map(|j| (0..n).map(|i| (&left_inv[i][j] * Rat::from_integer(d[j].clone())).to_integer()).collect()).collect();
    let rays: Vec<Vec<Int>> = x.rays().iter().map(|r| coords(r)).collect();
    let cover = Fan::new(n, rays, vec![(0..x.num_rays()).collect()]);
    let index = d.iter().fold(Int::one(), |a, b| a * b).abs();
    let data = TorsionCover {
        torsion: degrees.group.torsion.clone(),
        generator: degrees.group.canonical_torsion_generator().unwrap_or_default(),
        basis,
        index,
    };
    Ok((cover, coords(&v), data))
}

/// Outcome of comparing `σ` with the cone over `(E, −E|_E)`.
#[derive(Debug, Clone)]
pub struct ConeIsoReport {
    pub y: Fan,
    pub exceptional: usize,
    pub star: StarFan,
    /// `−E|_E` on the star fan.
    pub polarization: InvariantDivisor,
    pub target: Fan,
    /// Unimodular `T` with `T(σ) = target`.
    pub witness: IntMatrix,
    /// `(ray of σ, ray of target)` with `T u = u'`.
    pub ray_matching: Vec<(usize, usize)>,
    /// The matching sends `D_u` to the cone over the star divisor it meets.
    pub divisors_match: bool,
    pub hilbert_source: Vec<Vec<Int>>,
    pub hilbert_target: Vec<Vec<Int>>,
    pub isomorphic: bool,
}

fn is_unimodular(t: &IntMatrix) -> bool {
    t.rows() == t.cols() && t.det().abs().is_one()
}

/// Builds `Y`, `E` and `(E, −E|_E)`, forms the cone over it, and checks that
/// `T = (q; φ)` (quotient coordinates, then the functional dual to `v`)
/// carries `σ` onto it: rays onto rays and the dual Hilbert bases onto each
/// other.
pub fn verify_cone_iso(x: &Fan, v: &[Int]) -> Result<ConeIsoReport, ConeCoxError> {
    let v = check_interior(x, v)?;
    let y = x.star_subdivision(&v)?;
    let exceptional = y.ray_index(&v).expect("subdivision adds v");
    let star = y.star_fan(exceptional)?;
    let minus_e = InvariantDivisor::prime(y.num_rays(), exceptional).scale(&-Rat::one());
    let polarization = restrict_to_star(&minus_e, &y, exceptional, &star)?;
    let target = cone_over(&PolarizedToric::new(star.fan.clone(), polarization.clone())?);

    let n = x.rank();
    let w = quotient_by_primitive(&v);
    let rows: Vec<Vec<Int>> = (1..n).map(|i| w.row(i).to_vec()).chain([w.row(0).to_vec()]).collect();
    let witness = IntMatrix::from_rows(n, &rows);

    let target_rays: BTreeMap<Vec<Int>, usize> = target.rays().iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let mut ray_matching = Vec::new();
    for (i, u) in x.rays().iter().enumerate() {
        if let Some(&j) = target_rays.get(&witness.mul_vec(u)) {
            ray_matching.push((i, j));
        }
    }
    let bijective = ray_matching.len() == x.num_rays()
        && ray_matching.iter().map(|p| p.1).collect::<BTreeSet<_>>().len() == target.num_rays();
    let y_index: BTreeMap<Vec<Int>, usize> = y.rays().iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let divisors_match = bijective && ray_matching.iter().all(|&(i, j)| star.ray_map[&y_index[x.ray(i)]].0 == j);

    let dual_hb = |f: &Fan| -> Result<Vec<Vec<Int>>, ConeCoxError> {
        let c = f.max_cone(0);
        Ok(hilbert_basis(&RationalCone::new(f.rank(), c.dual_generators()?)?)?)
    };
    let hilbert_source = dual_hb(x)?;
    let hilbert_target = dual_hb(&target)?;
    // Characters transform by m ↦ m·T^{-1}.
    let t_inv = inverse_rat(&rows.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect::<Vec<_>>());
    let hilbert_matches = t_inv.is_some_and(|inv| {
        let mapped: BTreeSet<Vec<Int>> = hilbert_source
            .iter()
            .map(|m| (0..n).map(|j| (0..n).map(|i| Rat::from_integer(m[i].clone()) * &inv[i][j]).sum::<Rat>()).map(|q| q.to_integer()).collect())
            .collect();
        mapped == hilbert_target.iter().cloned().collect()
    });
    let isomorphic = is_unimodular(&witness) && bijective && divisors_match && hilbert_matches;
    Ok(ConeIsoReport {
        y,
        exceptional,
        star,
        polarization,
        target,
        witness,
        ray_matching,
        divisors_match,
        hilbert_source,
        hilbert_target,
        isomorphic,
    })
}

/// `rank Cl(Y_x) − rank Cl(X_x)`.
pub fn class_rank_step(x: &Fan, v: &[Int]) -> Result<(usize, usize), ConeCoxError> {
    let d = cox_degrees(x, v)?;
    Ok((crate::divisor::class_group(x).free_rank, d.group.free_rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::examples::*;
    use crate::num::to_ints;

    /// Irreducible nonzero exponent vectors of degree 0 inside a box.
    fn degree_zero_irreducibles(g: &AbelianGroupPresentation, len: usize, bound: i64) -> BTreeSet<Vec<Int>> {
        let mut pts = Vec::new();
        let mut e = vec![0i64; len];
        loop {
            let v = to_ints(&e);
            if e.iter().any(|&x| x != 0) && g.class_of(&v).is_zero() {
                pts.push(e.clone());
            }
            let mut k = 0;
            while k < len && e[k] == bound {
                e[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
            e[k] += 1;
        }
        let set: BTreeSet<Vec<i64>> = pts.iter().cloned().collect();
        pts.iter()
            .filter(|p| !set.iter().any(|q| q != *p && q.iter().zip(p.iter()).all(|(a, b)| a <= b) && set.contains(&p.iter().zip(q).map(|(a, b)| a - b).collect::<Vec<_>>())))
            .map(|p| to_ints(p))
            .collect()
    }

    #[test]
    fn cone_over_p1() {
        let p = PolarizedToric::new(p1(), InvariantDivisor::from_i64(&[1, 0])).unwrap();
        let c = cone_over(&p);
        assert_eq!(c.multiplicity(&c.max_cones()[0]), Int::one());
        let p = PolarizedToric::new(p1(), InvariantDivisor::from_i64(&[1, 1])).unwrap();
        let c = cone_over(&p);
        assert_eq!(c.multiplicity(&c.max_cones()[0]), Int::from(2));
        let dual = RationalCone::new(2, c.max_cone(0).dual_generators().unwrap()).unwrap();
        assert_eq!(hilbert_basis(&dual).unwrap().len(), 3);
    }

    #[test]
    fn not_ample() {
        assert_eq!(PolarizedToric::new(p1(), InvariantDivisor::zero(2)), Err(ConeCoxError::NotAmple));
        assert_eq!(PolarizedToric::new(affine_plane(), InvariantDivisor::zero(2)), Err(ConeCoxError::NotComplete));
        // O(1, 0) on P1 x P1 is nef but not ample.
        assert_eq!(PolarizedToric::new(p1xp1(), InvariantDivisor::from_i64(&[1, 0, 0, 0])), Err(ConeCoxError::NotAmple));
    }

    #[test]
    fn blow_up_of_plane_degrees() {
        let d = cox_degrees(&affine_plane(), &to_ints(&[1, 1])).unwrap();
        assert_eq!(d.group.free_rank, 1);
        assert!(d.group.torsion.is_empty());
        assert_eq!(d.degrees[0], d.degrees[1]);
        assert_eq!(d.degrees[2].free[0], -d.degrees[0].free[0].clone());
        let m = degree_zero_monoid(&d).unwrap();
        assert_eq!(m.generators, vec![to_ints(&[0, 1, 1]), to_ints(&[1, 0, 1])]);
        assert_eq!(m.grading, to_ints(&[1, 1]));
    }

    #[test]
    fn monoids_match_box_oracle() {
        for (x, v) in [(affine_plane(), [1, 1, 0]), (a1_cone(), [1, 1, 0]), (conifold(), [1, 1, 2])] {
            let v = to_ints(&v[..x.rank()]);
            let d = cox_degrees(&x, &v).unwrap();
            let m = degree_zero_monoid(&d).unwrap();
            let oracle = degree_zero_irreducibles(&d.group, d.y.num_rays(), 3);
            assert_eq!(m.generators.iter().cloned().collect::<BTreeSet<_>>(), oracle);
            for (a, b) in m.generators.iter().zip(m.generators.iter().skip(1)) {
                let s: Vec<Int> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                assert!(m.degree(&s).is_zero());
                assert_eq!(s.last().unwrap(), &(a.last().unwrap() + b.last().unwrap()));
            }
        }
    }

    #[test]
    fn a1_blow_up_gradings() {
        let d = cox_degrees(&a1_cone(), &to_ints(&[1, 1])).unwrap();
        let m = degree_zero_monoid(&d).unwrap();
        let mut g: Vec<Int> = m.grading.clone();
        g.sort();
        assert_eq!(g, to_ints(&[1, 1, 1]));
        assert_eq!(m.generators.len(), 3);
    }

    #[test]
    fn conifold_class_rank() {
        let d = cox_degrees(&conifold(), &to_ints(&[1, 1, 2])).unwrap();
        assert_eq!(d.group.free_rank, 2);
        assert_eq!(class_rank_step(&conifold(), &to_ints(&[1, 1, 2])).unwrap(), (1, 2));
    }

    #[test]
    fn guards() {
        assert!(matches!(cox_degrees(&affine_plane(), &to_ints(&[1, 0])), Err(ConeCoxError::TrivialSubdivision(_))));
        assert!(matches!(cox_degrees(&affine_plane(), &to_ints(&[1, -1])), Err(ConeCoxError::NotInterior(_))));
        assert_eq!(cox_degrees(&p2(), &to_ints(&[1, 1])).unwrap_err(), ConeCoxError::NotAffine);
    }

    #[test]
    fn isomorphisms() {
        for (x, v) in [(affine_plane(), vec![1, 1]), (a1_cone(), vec![1, 1]), (conifold(), vec![1, 1, 2])] {
            let r = verify_cone_iso(&x, &to_ints(&v)).unwrap();
            assert!(r.isomorphic, "{x:?}");
            assert!(r.witness.is_unimodular());
        }
        // Over A1 the polarization is O(2) on P1.
        let r = verify_cone_iso(&a1_cone(), &to_ints(&[1, 1])).unwrap();
        assert_eq!(r.polarization.coeffs().iter().sum::<Rat>(), Rat::from_integer(Int::from(2)));
    }

    #[test]
    fn torsion() {
        // cone((1,0),(1,2)) with v = (3,2): the rays of Y span an index-2 sublattice.
        let x = Fan::from_i64(2, &[&[1, 0], &[1, 2]], &[&[0, 1]]);
        let v = to_ints(&[3, 2]);
        let d = cox_degrees(&x, &v).unwrap();
        assert!(matches!(degree_zero_monoid(&d), Err(ConeCoxError::TorsionObstruction { .. })));
        let (cover, v2, data) = torsion_cover(&x, &v).unwrap();
        assert_eq!(data.index, Int::from(2));
        assert_eq!(data.torsion, to_ints(&[2]));
        let d2 = cox_degrees(&cover, &v2).unwrap();
        assert!(d2.group.torsion.is_empty());
        assert!(degree_zero_monoid(&d2).is_ok());
        assert!(verify_cone_iso(&x, &v).unwrap().isomorphic);
    }
}
