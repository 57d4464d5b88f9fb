//! Rational polyhedral fans.
//!
//! Ray order is part of the data: divisor coefficient vectors, class-group
//! coordinates and every report are indexed by it, so nothing here sorts rays.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::lattice::linalg::{nullspace_int, rank_int};
use crate::lattice::{lattice_index, quotient_by_primitive, snf, IntMatrix, RationalCone};
use crate::num::{dot, gcd_all, is_primitive, primitive, Int};

pub type RaySet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanIssue {
    #[error("ray {ray} has length {got}, lattice rank is {rank}")]
    WrongLength { ray: usize, got: usize, rank: usize },
    #[error("ray {ray} is zero")]
    ZeroRay { ray: usize },
    #[error("ray {ray} is not primitive")]
    NotPrimitive { ray: usize },
    #[error("rays {a} and {b} coincide")]
    DuplicateRay { a: usize, b: usize },
    #[error("cone {cone} refers to missing ray {index}")]
    RayIndexOutOfRange { cone: usize, index: usize },
    #[error("cone {cone} has no rays")]
    EmptyCone { cone: usize },
    #[error("cone {cone} is not pointed")]
    NotPointed { cone: usize },
    #[error("ray {ray} is not an extremal ray of cone {cone}")]
    RedundantRay { cone: usize, ray: usize },
    #[error("cone {inner} is contained in cone {outer}")]
    ConeContained { inner: usize, outer: usize },
    #[error("cones {a} and {b} do not meet in a common face (OverlappingCones)")]
    OverlappingCones { a: usize, b: usize },
    #[error("ray {ray} lies in no cone")]
    RayNotInCone { ray: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("invalid fan: {0}")]
    Invalid(#[from] FanIssue),
    #[error("vector {0:?} lies outside the support of the fan")]
    RayOutsideSupport(Vec<Int>),
    #[error("vector has length {got}, lattice rank is {rank}")]
    WrongLength { got: usize, rank: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("ray index {0} out of range")]
    NoSuchRay(usize),
    #[error("cone index {0} out of range")]
    NoSuchCone(usize),
}

/// Result of [`Fan::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub issues: Vec<FanIssue>,
    pub complete: bool,
    pub simplicial: bool,
    pub smooth: bool,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn first_issue(&self) -> Option<&FanIssue> {
        self.issues.first()
    }
}

/// A fan: primitive rays in `Z^rank` and maximal cones given as ray-index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<Int>>,
    max_cones: Vec<RaySet>,
}

/// A wall: codimension-one face shared by two full-dimensional maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub left: usize,
    pub right: usize,
    pub face: RaySet,
}

/// The fan of the invariant divisor `D_ρ`, on the lattice `N / Z u_ρ`.
#[derive(Debug, Clone)]
pub struct StarFan {
    pub fan: Fan,
    /// Rows 1.. of a unimodular matrix killing `u_ρ`; maps `N` onto the quotient.
    pub quotient: IntMatrix,
    /// For each ray of the ambient fan spanning a 2-cone with `ρ`: the index of
    /// the star ray it maps to, and the lattice factor `g` with
    /// `q(u) = g · (star ray)`.
    pub ray_map: BTreeMap<usize, (usize, Int)>,
    /// Inverse of `ray_map`: the ambient ray over each star ray.
    pub over: Vec<usize>,
    /// Ambient maximal cone over each star maximal cone.
    pub cone_over: Vec<usize>,
}

impl StarFan {
    pub fn project(&self, x: &[Int]) -> Vec<Int> {
        (1..self.quotient.rows()).map(|i| dot(self.quotient.row(i), x)).collect()
    }
}

impl Fan {
    /// Builds a fan without validating it; see [`Fan::checked`].
    pub fn new(rank: usize, rays: Vec<Vec<Int>>, max_cones: Vec<Vec<usize>>) -> Self {
        let max_cones = max_cones.into_iter().map(|c| c.into_iter().collect()).collect();
        Self { rank, rays, max_cones }
    }

    pub fn checked(rank: usize, rays: Vec<Vec<Int>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanIssue> {
        let f = Self::new(rank, rays, max_cones);
        match f.validate().issues.into_iter().next() {
            Some(issue) => Err(issue),
            None => Ok(f),
        }
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Self {
        Self::new(
            rank,
            rays.iter().map(|r| crate::num::to_ints(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[Int] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[RaySet] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &[Int]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn cone_rays(&self, set: &RaySet) -> Vec<Vec<Int>> {
        set.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn cone(&self, set: &RaySet) -> RationalCone {
        RationalCone::new(self.rank, self.cone_rays(set)).expect("ray lengths checked")
    }

    pub fn max_cone(&self, i: usize) -> RationalCone {
        self.cone(&self.max_cones[i])
    }

    /// `#rays × rank` matrix of ray vectors; its transpose is `M → Z^{rays}`.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rank, &self.rays)
    }

    /// Dimension of the linear span of the rays.
    pub fn span_rank(&self) -> usize {
        rank_int(&self.rays)
    }

    pub fn validate(&self) -> Diagnostics {
        let mut issues = Vec::new();
        self.check_rays(&mut issues);
        if issues.is_empty() {
            self.check_cones(&mut issues);
        }
        let ok = issues.is_empty();
        Diagnostics {
            complete: ok && self.is_complete(),
            simplicial: ok && self.is_simplicial(),
            smooth: ok && self.is_smooth(),
            issues,
        }
    }

    fn check_rays(&self, issues: &mut Vec<FanIssue>) {
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.rank {
                issues.push(FanIssue::WrongLength { ray: i, got: r.len(), rank: self.rank });
            } else if r.iter().all(Zero::is_zero) {
                issues.push(FanIssue::ZeroRay { ray: i });
            } else if !is_primitive(r) {
                issues.push(FanIssue::NotPrimitive { ray: i });
            }
        }
        for a in 0..self.rays.len() {
            for b in a + 1..self.rays.len() {
                if self.rays[a] == self.rays[b] {
                    issues.push(FanIssue::DuplicateRay { a, b });
                }
            }
        }
    }

    fn check_cones(&self, issues: &mut Vec<FanIssue>) {
        for (c, set) in self.max_cones.iter().enumerate() {
            if let Some(&index) = set.iter().find(|&&i| i >= self.rays.len()) {
                issues.push(FanIssue::RayIndexOutOfRange { cone: c, index });
                return;
            }
            if set.is_empty() && self.rank > 0 {
                issues.push(FanIssue::EmptyCone { cone: c });
            }
        }
        if !issues.is_empty() {
            return;
        }
        let cones: Vec<RationalCone> = self.max_cones.iter().map(|s| self.cone(s)).collect();
        for (c, (set, cone)) in self.max_cones.iter().zip(&cones).enumerate() {
            if !cone.is_pointed() {
                issues.push(FanIssue::NotPointed { cone: c });
                continue;
            }
            let faces = cone.faces();
            for (local, &ray) in set.iter().enumerate() {
                if !faces.contains(&[local].into_iter().collect()) {
                    issues.push(FanIssue::RedundantRay { cone: c, ray });
                }
            }
        }
        for ray in 0..self.rays.len() {
            if !self.max_cones.iter().any(|s| s.contains(&ray)) {
                issues.push(FanIssue::RayNotInCone { ray });
            }
        }
        if !issues.is_empty() {
            return;
        }
        for a in 0..self.max_cones.len() {
            for b in 0..self.max_cones.len() {
                if a != b && self.max_cones[a].is_subset(&self.max_cones[b]) {
                    issues.push(FanIssue::ConeContained { inner: a, outer: b });
                }
            }
        }
        for a in 0..self.max_cones.len() {
            for b in a + 1..self.max_cones.len() {
                if !self.meet_in_common_face(a, b, &cones) {
                    issues.push(FanIssue::OverlappingCones { a, b });
                }
            }
        }
    }

    /// Two cones meet in a common face iff their shared rays span a face of
    /// each, and modulo that face the two cones meet only at the origin.
    fn meet_in_common_face(&self, a: usize, b: usize, cones: &[RationalCone]) -> bool {
        let (sa, sb) = (&self.max_cones[a], &self.max_cones[b]);
        let shared: RaySet = sa.intersection(sb).copied().collect();
        let local = |set: &RaySet| -> RaySet {
            set.iter().enumerate().filter(|(_, r)| shared.contains(r)).map(|(k, _)| k).collect()
        };
        if !cones[a].is_face(&local(sa)) || !cones[b].is_face(&local(sb)) {
            return false;
        }
        let annihilator = if shared.is_empty() {
            (0..self.rank).map(|i| (0..self.rank).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect()
        } else {
            nullspace_int(&self.cone_rays(&shared), self.rank)
        };
        let proj = |v: &[Int]| -> Vec<Int> { annihilator.iter().map(|m| dot(m, v)).collect() };
        let mut gens: Vec<Vec<Int>> = sa.difference(&shared).map(|&i| proj(&self.rays[i])).collect();
        gens.extend(sb.difference(&shared).map(|&i| proj(&self.rays[i]).into_iter().map(|x| -x).collect::<Vec<_>>()));
        RationalCone::new(annihilator.len(), gens).map(|c| c.is_pointed()).unwrap_or(false)
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones.iter().all(|s| rank_int(&self.cone_rays(s)) == s.len())
    }

    pub fn cone_is_smooth(&self, set: &RaySet) -> bool {
        let rays = self.cone_rays(set);
        if rays.is_empty() {
            return true;
        }
        rank_int(&rays) == rays.len() && lattice_index(&rays).is_one()
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|s| self.cone_is_smooth(s))
    }

    /// Lattice multiplicity of a simplicial cone.
    pub fn multiplicity(&self, set: &RaySet) -> Int {
        let rays = self.cone_rays(set);
        if rays.is_empty() {
            return Int::one();
        }
        lattice_index(&rays)
    }

    /// Every maximal cone full-dimensional and every facet shared by exactly
    /// two maximal cones.
    pub fn is_complete(&self) -> bool {
        if self.rank == 0 {
            return self.max_cones.len() == 1;
        }
        if self.max_cones.is_empty() {
            return false;
        }
        let mut count: BTreeMap<RaySet, usize> = BTreeMap::new();
        for set in &self.max_cones {
            let cone = self.cone(set);
            if !cone.is_full_dimensional() {
                return false;
            }
            let global: Vec<usize> = set.iter().copied().collect();
            for f in cone.facets() {
                let face: RaySet = f.incident.iter().map(|&k| global[k]).collect();
                *count.entry(face).or_default() += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    /// All cones of the fan (every face of every maximal cone) as ray sets.
    pub fn all_cones(&self) -> BTreeSet<RaySet> {
        let mut out = BTreeSet::new();
        for set in &self.max_cones {
            let global: Vec<usize> = set.iter().copied().collect();
            for face in self.cone(set).faces() {
                out.insert(face.iter().map(|&k| global[k]).collect());
            }
        }
        out
    }

    /// Whether the rays in `set` span a cone of the fan.
    pub fn is_cone(&self, set: &RaySet) -> bool {
        self.all_cones().contains(set)
    }

    pub fn walls(&self) -> Vec<Wall> {
        let mut facet_owner: BTreeMap<RaySet, Vec<usize>> = BTreeMap::new();
        for (c, set) in self.max_cones.iter().enumerate() {
            let cone = self.cone(set);
            if !cone.is_full_dimensional() {
                continue;
            }
            let global: Vec<usize> = set.iter().copied().collect();
            for f in cone.facets() {
                facet_owner.entry(f.incident.iter().map(|&k| global[k]).collect()).or_default().push(c);
            }
        }
        facet_owner
            .into_iter()
            .filter(|(_, owners)| owners.len() == 2)
            .map(|(face, owners)| Wall { left: owners[0], right: owners[1], face })
            .collect()
    }

    /// Maximal cones containing `x`.
    pub fn locate(&self, x: &[Int]) -> Vec<usize> {
        (0..self.max_cones.len()).filter(|&c| self.max_cone(c).contains(x)).collect()
    }

    pub fn in_support(&self, x: &[Int]) -> bool {
        !self.locate(x).is_empty()
    }

    pub fn cones_containing_ray(&self, ray: usize) -> Vec<usize> {
        (0..self.max_cones.len()).filter(|&c| self.max_cones[c].contains(&ray)).collect()
    }

    /// Rays spanning a 2-dimensional cone together with `ray`.
    pub fn neighbors(&self, ray: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for c in self.cones_containing_ray(ray) {
            let set = &self.max_cones[c];
            let global: Vec<usize> = set.iter().copied().collect();
            let cone = self.cone(set);
            for face in cone.faces() {
                let g: RaySet = face.iter().map(|&k| global[k]).collect();
                if g.len() >= 2 && g.contains(&ray) && cone.face_dim(&face) == 2 && face.len() == 2 {
                    out.extend(g.into_iter().filter(|&r| r != ray));
                }
            }
        }
        out
    }

    /// Star subdivision at `v`. A non-primitive `v` is replaced by its primitive
    /// generator; subdividing at an existing ray returns the fan unchanged.
    pub fn star_subdivision(&self, v: &[Int]) -> Result<Fan, FanError> {
        if v.len() != self.rank {
            return Err(FanError::WrongLength { got: v.len(), rank: self.rank });
        }
        if v.iter().all(Zero::is_zero) {
            return Err(FanError::ZeroVector);
        }
        let v = primitive(v);
        if self.ray_index(&v).is_some() {
            return Ok(self.clone());
        }
        let hosts = self.locate(&v);
        if hosts.is_empty() {
            return Err(FanError::RayOutsideSupport(v));
        }
        let new = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v.clone());
        let mut cones: Vec<RaySet> = Vec::new();
        for (c, set) in self.max_cones.iter().enumerate() {
            if !hosts.contains(&c) {
                cones.push(set.clone());
                continue;
            }
            let global: Vec<usize> = set.iter().copied().collect();
            for f in self.cone(set).facets() {
                if dot(&f.normal, &v).is_positive() {
                    let mut s: RaySet = f.incident.iter().map(|&k| global[k]).collect();
                    s.insert(new);
                    cones.push(s);
                }
            }
        }
        let cones = drop_non_maximal(cones);
        let out = Fan { rank: self.rank, rays, max_cones: cones };
        if let Some(issue) = out.validate().issues.into_iter().next() {
            return Err(FanError::Invalid(issue));
        }
        Ok(out)
    }

    pub fn star_fan(&self, ray: usize) -> Result<StarFan, FanError> {
        if ray >= self.rays.len() {
            return Err(FanError::NoSuchRay(ray));
        }
        let w = quotient_by_primitive(&self.rays[ray]);
        let q = |x: &[Int]| -> Vec<Int> { (1..w.rows()).map(|i| dot(w.row(i), x)).collect() };
        let mut star_rays: Vec<Vec<Int>> = Vec::new();
        let mut over: Vec<usize> = Vec::new();
        let mut ray_map: BTreeMap<usize, (usize, Int)> = BTreeMap::new();
        for u in self.neighbors(ray) {
            let image = q(&self.rays[u]);
            let g = gcd_all(image.iter());
            let p = primitive(&image);
            let idx = match star_rays.iter().position(|r| *r == p) {
                Some(i) => i,
                None => {
                    star_rays.push(p);
                    over.push(u);
                    star_rays.len() - 1
                }
            };
            ray_map.insert(u, (idx, g));
        }
        let mut cones: Vec<(RaySet, usize)> = Vec::new();
        for c in self.cones_containing_ray(ray) {
            let s: RaySet = self.max_cones[c].iter().filter_map(|u| ray_map.get(u).map(|(i, _)| *i)).collect();
            if !cones.iter().any(|(t, _)| *t == s) {
                cones.push((s, c));
            }
        }
        let kept = drop_non_maximal(cones.iter().map(|(s, _)| s.clone()).collect());
        let cone_over = kept.iter().map(|s| cones.iter().find(|(t, _)| t == s).unwrap().1).collect();
        let fan = Fan { rank: self.rank - 1, rays: star_rays, max_cones: kept };
        Ok(StarFan { fan, quotient: w, ray_map, over, cone_over })
    }

    /// The affine fan of the faces of maximal cone `c`, with its rays renumbered;
    /// the second component maps new ray indices to old ones.
    pub fn affine_chart(&self, c: usize) -> Result<(Fan, Vec<usize>), FanError> {
        let set = self.max_cones.get(c).ok_or(FanError::NoSuchCone(c))?;
        let old: Vec<usize> = set.iter().copied().collect();
        let fan = Fan {
            rank: self.rank,
            rays: old.iter().map(|&i| self.rays[i].clone()).collect(),
            max_cones: vec![(0..old.len()).collect()],
        };
        Ok((fan, old))
    }

    /// Whether `other` refines this fan: same lattice, same support, and every
    /// cone of `other` inside some cone of `self`.
    pub fn is_refined_by(&self, other: &Fan) -> bool {
        if other.rank != self.rank {
            return false;
        }
        let inside = other.max_cones.iter().all(|s| {
            let gens = other.cone_rays(s);
            let barycenter: Vec<Int> = (0..self.rank).map(|i| gens.iter().map(|g| &g[i]).sum()).collect();
            self.locate(&barycenter).iter().any(|&c| {
                let cone = self.max_cone(c);
                gens.iter().all(|g| cone.contains(g))
            })
        });
        inside && self.rays.iter().all(|r| other.in_support(r))
            && self.max_cones.iter().all(|s| {
                let gens = self.cone_rays(s);
                let barycenter: Vec<Int> = (0..self.rank).map(|i| gens.iter().map(|g| &g[i]).sum()).collect();
                other.in_support(&barycenter)
            })
    }

    /// Rank of the cokernel torsion-free part, `#rays − rank(span)`.
    pub fn class_rank_formula(&self) -> usize {
        self.rays.len() - self.span_rank()
    }

    /// Invariant factors of the ray matrix of a cone (diagnostic).
    pub fn cone_invariant_factors(&self, set: &RaySet) -> Vec<Int> {
        snf(&IntMatrix::from_rows(self.rank, &self.cone_rays(set))).invariant_factors()
    }
}

fn drop_non_maximal(cones: Vec<RaySet>) -> Vec<RaySet> {
    let mut uniq: Vec<RaySet> = Vec::new();
    for c in cones {
        if !uniq.contains(&c) {
            uniq.push(c);
        }
    }
    uniq.iter()
        .filter(|c| !uniq.iter().any(|d| d != *c && c.is_subset(d)))
        .cloned()
        .collect()
}

/// Standard fans used throughout tests, the CLI suite and the acceptance suite.
pub mod examples {
    use super::Fan;

    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        rays.push(vec![-1; n]);
        let cones: Vec<Vec<usize>> = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
        let rays: Vec<&[i64]> = rays.iter().map(|r| r.as_slice()).collect();
        let cones: Vec<&[usize]> = cones.iter().map(|c| c.as_slice()).collect();
        Fan::from_i64(n, &rays, &cones)
    }

    pub fn p1() -> Fan {
        projective_space(1)
    }

    pub fn p2() -> Fan {
        projective_space(2)
    }

    pub fn p3() -> Fan {
        projective_space(3)
    }

    pub fn p1xp1() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
    }

    /// Hirzebruch surface `F_a`.
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
    }

    /// Blow-up of `P^2` at a torus-fixed point; ray 3 is the exceptional curve.
    pub fn blown_up_p2() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1], &[1, 1]], &[&[0, 3], &[3, 1], &[1, 2], &[2, 0]])
    }

    /// Weighted projective plane `P(1,1,2)`.
    pub fn p112() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[2, 0]])
    }

    pub fn affine_plane() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])
    }

    /// Blow-up of the affine plane at the origin; ray 2 is exceptional.
    pub fn blown_up_plane() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 2], &[2, 1]])
    }

    /// The A1 surface singularity `cone((0,1),(2,1))`.
    pub fn a1_cone() -> Fan {
        Fan::from_i64(2, &[&[0, 1], &[2, 1]], &[&[0, 1]])
    }

    /// Cone over the unit square (the conifold point).
    pub fn conifold() -> Fan {
        Fan::from_i64(3, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]], &[&[0, 1, 2, 3]])
    }

    /// The two small resolutions of the conifold.
    pub fn conifold_resolutions() -> (Fan, Fan) {
        let rays: &[&[i64]] = &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]];
        (Fan::from_i64(3, rays, &[&[0, 1, 3], &[0, 2, 3]]), Fan::from_i64(3, rays, &[&[0, 1, 2], &[1, 2, 3]]))
    }

    /// The acceptance suite of complete smooth fans.
    pub fn suite() -> Vec<(&'static str, Fan)> {
        vec![
            ("P1", p1()),
            ("P2", p2()),
            ("P3", p3()),
            ("P1xP1", p1xp1()),
            ("Bl_pt P2", blown_up_p2()),
            ("F1", hirzebruch(1)),
            ("F2", hirzebruch(2)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::num::to_ints;

    #[test]
    fn suite_is_valid_complete_smooth() {
        for (name, f) in suite() {
            let d = f.validate();
            assert!(d.is_valid(), "{name}: {:?}", d.issues);
            assert!(d.complete, "{name}");
            assert!(d.smooth, "{name}");
        }
    }

    #[test]
    fn overlapping_cones_rejected() {
        let f = Fan::from_i64(2, &[&[1, 0], &[1, 1], &[0, 1]], &[&[0, 1], &[0, 2]]);
        assert!(matches!(f.validate().first_issue(), Some(FanIssue::ConeContained { .. }) | Some(FanIssue::OverlappingCones { .. })));
        let g = Fan::from_i64(2, &[&[1, 0], &[1, 2], &[0, 1], &[2, 1]], &[&[0, 1], &[2, 3]]);
        assert_eq!(g.validate().first_issue(), Some(&FanIssue::OverlappingCones { a: 0, b: 1 }));
    }

    #[test]
    fn a1_not_smooth() {
        let d = a1_cone().validate();
        assert!(d.is_valid());
        assert!(!d.smooth);
        assert!(!d.complete);
        assert_eq!(a1_cone().multiplicity(&[0, 1].into_iter().collect()), Int::from(2));
    }

    #[test]
    fn bad_rays() {
        let f = Fan::from_i64(2, &[&[2, 0], &[0, 1]], &[&[0, 1]]);
        assert_eq!(f.validate().first_issue(), Some(&FanIssue::NotPrimitive { ray: 0 }));
        let f = Fan::from_i64(2, &[&[1, 0], &[-1, 0]], &[&[0, 1]]);
        assert_eq!(f.validate().first_issue(), Some(&FanIssue::NotPointed { cone: 0 }));
    }

    #[test]
    fn blow_up_p2() {
        let f = p2().star_subdivision(&to_ints(&[1, 1])).unwrap();
        assert_eq!(f.num_rays(), 4);
        assert_eq!(f.max_cones().len(), 4);
        let d = f.validate();
        assert!(d.is_valid() && d.complete && d.smooth);
    }

    #[test]
    fn subdivision_at_existing_ray() {
        assert_eq!(p2().star_subdivision(&to_ints(&[1, 0])).unwrap(), p2());
    }

    #[test]
    fn subdivision_outside_support() {
        assert!(matches!(affine_plane().star_subdivision(&to_ints(&[-1, 1])), Err(FanError::RayOutsideSupport(_))));
    }

    #[test]
    fn blow_up_plane() {
        let f = affine_plane().star_subdivision(&to_ints(&[1, 1])).unwrap();
        assert_eq!(f.max_cones().len(), 2);
        assert!(f.max_cones().iter().all(|c| f.cone_is_smooth(c)));
        assert!(affine_plane().is_refined_by(&f));
    }

    #[test]
    fn star_fan_of_line_in_p2() {
        let s = p2().star_fan(0).unwrap();
        assert_eq!(s.fan.rank(), 1);
        assert_eq!(s.fan.num_rays(), 2);
        assert!(s.fan.validate().complete);
    }

    #[test]
    fn star_fan_of_exceptional_curve() {
        let s = blown_up_plane().star_fan(2).unwrap();
        assert_eq!(s.fan.num_rays(), 2);
        assert!(s.fan.is_complete());
    }

    #[test]
    fn star_fan_over_square_cone_is_p1xp1() {
        let y = conifold().star_subdivision(&to_ints(&[1, 1, 2])).unwrap();
        let e = y.ray_index(&to_ints(&[1, 1, 2])).unwrap();
        let s = y.star_fan(e).unwrap();
        assert!(s.fan.validate().is_valid());
        assert!(s.fan.is_complete() && s.fan.is_smooth());
        assert_eq!(s.fan.num_rays(), 4);
        // Adjacency graph of P1xP1: a 4-cycle, each ray in exactly two cones,
        // and the two rays opposite each other are negatives.
        for r in 0..4 {
            assert_eq!(s.fan.cones_containing_ray(r).len(), 2);
            let neg: Vec<Int> = s.fan.ray(r).iter().map(|x| -x).collect();
            assert!(s.fan.ray_index(&neg).is_some());
        }
    }

    #[test]
    fn walls_of_p2() {
        assert_eq!(p2().walls().len(), 3);
        assert_eq!(blown_up_plane().walls().len(), 1);
    }
}
