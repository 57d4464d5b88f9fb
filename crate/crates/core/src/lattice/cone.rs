use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::linalg::{nullspace_int, rank_int};
use crate::num::{dot, primitive, Int};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("cone is not pointed (contains a line)")]
    NotPointed,
    #[error("cone is not full-dimensional (dimension {dim} in rank {rank})")]
    NotFullDimensional { dim: usize, rank: usize },
    #[error("generator has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
}

/// A facet of a cone: inward normal (lying in the span of the cone) and the
/// indices of the generators on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Int>,
    pub incident: BTreeSet<usize>,
}

/// Rational polyhedral cone given by integer generators in `Z^rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    rank: usize,
    generators: Vec<Vec<Int>>,
    dim: usize,
    equations: Vec<Vec<Int>>,
    facets: Vec<Facet>,
}

impl RationalCone {
    pub fn new(rank: usize, generators: Vec<Vec<Int>>) -> Result<Self, ConeError> {
        if let Some(g) = generators.iter().find(|g| g.len() != rank) {
            return Err(ConeError::WrongLength { expected: rank, got: g.len() });
        }
        let generators: Vec<Vec<Int>> = generators.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
        let dim = rank_int(&generators);
        let equations = nullspace_int(&generators, rank);
        let facets = compute_facets(&generators, dim);
        Ok(Self { rank, generators, dim, equations, facets })
    }

    pub fn from_i64(rank: usize, gens: &[&[i64]]) -> Result<Self, ConeError> {
        Self::new(rank, gens.iter().map(|g| crate::num::to_ints(g)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Integer basis of the linear forms vanishing on the cone.
    pub fn equations(&self) -> &[Vec<Int>] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.rank
    }

    pub fn is_pointed(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let normals: Vec<Vec<Int>> = self.facets.iter().map(|f| f.normal.clone()).collect();
        rank_int(&normals) == self.dim
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero()) && self.facets.iter().all(|f| !dot(&f.normal, x).is_negative())
    }

    /// `x` in the relative interior.
    pub fn contains_relint(&self, x: &[Int]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero()) && self.facets.iter().all(|f| dot(&f.normal, x).is_positive())
    }

    /// All faces as sets of generator indices, including the cone itself.
    /// For a pointed cone the vertex appears as the empty set.
    pub fn faces(&self) -> Vec<BTreeSet<usize>> {
        let full: BTreeSet<usize> = (0..self.generators.len()).collect();
        let mut faces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        faces.insert(full);
        loop {
            let mut added = Vec::new();
            for face in &faces {
                for f in &self.facets {
                    let meet: BTreeSet<usize> = face.intersection(&f.incident).copied().collect();
                    if !faces.contains(&meet) {
                        added.push(meet);
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            faces.extend(added);
        }
        faces.into_iter().collect()
    }

    pub fn face_dim(&self, face: &BTreeSet<usize>) -> usize {
        let g: Vec<Vec<Int>> = face.iter().map(|&i| self.generators[i].clone()).collect();
        rank_int(&g)
    }

    /// Whether the generators with the given indices span a face whose
    /// generator set is exactly that set.
    pub fn is_face(&self, set: &BTreeSet<usize>) -> bool {
        self.faces().iter().any(|f| f == set)
    }

    /// Generators of the dual cone `{m : <m, x> ≥ 0 on the cone}`.
    pub fn dual_generators(&self) -> Result<Vec<Vec<Int>>, ConeError> {
        if !self.is_full_dimensional() {
            return Err(ConeError::NotFullDimensional { dim: self.dim, rank: self.rank });
        }
        let mut out: Vec<Vec<Int>> = self.facets.iter().map(|f| f.normal.clone()).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Primitive generators of the extremal rays of a pointed cone.
    pub fn extremal_rays(&self) -> Vec<Vec<Int>> {
        let mut rays: Vec<Vec<Int>> = self
            .faces()
            .iter()
            .filter(|f| !f.is_empty() && self.face_dim(f) == 1)
            .map(|f| primitive(&self.generators[*f.iter().next().unwrap()]))
            .collect();
        rays.sort();
        rays.dedup();
        rays
    }
}

fn compute_facets(gens: &[Vec<Int>], dim: usize) -> Vec<Facet> {
    if dim == 0 {
        return Vec::new();
    }
    let basis = independent_subset(gens, dim);
    let basis_vecs: Vec<&Vec<Int>> = basis.iter().map(|&i| &gens[i]).collect();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut facets = Vec::new();
    for subset in combinations(gens.len(), dim - 1) {
        let sub: Vec<Vec<Int>> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank_int(&sub) != dim - 1 {
            continue;
        }
        // Normal inside span(basis): coefficients c with <Σ c_k b_k, s> = 0.
        let rows: Vec<Vec<Int>> = sub.iter().map(|s| basis_vecs.iter().map(|b| dot(b, s)).collect()).collect();
        let ns = nullspace_int(&rows, dim);
        debug_assert_eq!(ns.len(), 1);
        let c = &ns[0];
        let n = gens[0].len();
        let mut w: Vec<Int> = vec![Int::zero(); n];
        for (ck, b) in c.iter().zip(&basis_vecs) {
            for (wi, bi) in w.iter_mut().zip(b.iter()) {
                *wi += ck * bi;
            }
        }
        let w = primitive(&w);
        let vals: Vec<Int> = gens.iter().map(|g| dot(&w, g)).collect();
        let nonneg = vals.iter().all(|v| !v.is_negative());
        let nonpos = vals.iter().all(|v| !v.is_positive());
        if !(nonneg || nonpos) {
            continue;
        }
        let w = if nonneg { w } else { w.iter().map(|x| -x).collect() };
        let incident: BTreeSet<usize> = vals.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect();
        if seen.insert(incident.clone()) {
            facets.push(Facet { normal: w, incident });
        }
    }
    facets
}

/// Greedy choice of `dim` linearly independent generators.
pub(crate) fn independent_subset(gens: &[Vec<Int>], dim: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut vecs: Vec<Vec<Int>> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        vecs.push(g.clone());
        if rank_int(&vecs) > chosen.len() {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        } else {
            vecs.pop();
        }
    }
    chosen
}

/// k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
