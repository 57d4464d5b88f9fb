//! Complexity, fine complexity and orbifold complexity of invariant pairs.
//!
//! For a decomposition `Σ = Σ_ρ (1 − 1/n_ρ) D_ρ + Σ_j b_j B_j ≤ B`:
//!
//! * `c(Σ)  = dim X + rank Cl  − |Σ|`
//! * `c̄(Σ)  = dim X + dim ⟨B_j⟩ − |Σ|`
//! * `ĉ(Σ)  = dim X + dim ⟨B_j⟩ − |Σ|` with a nontrivial orbifold structure allowed
//!
//! where `|Σ| = Σ b_j` and spans are taken in `Cl_Q` of the chosen [`Mode`].
//! Only torus-invariant decompositions are considered.

mod local;
mod search;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::divisor::{
    canonical_divisor, cartier_on_cone, class_group, is_q_cartier, local_class_group, DivisorError, InvariantDivisor,
};
use crate::fan::{Fan, RaySet};
use crate::lattice::linalg::rank_rat;
use crate::lattice::RationalCone;
use crate::num::{format_rat, Int, Rat};

pub use local::{local_complexity_cloc, LocalComplexity};
pub use search::{minimize, minimize_batch, Execution, MinimizeOptions};

/// What "at a point / over a fiber" means for an evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// Complete fan over a point; every invariant divisor meets the fiber.
    Projective,
    /// Germ at the fixed point of a full-dimensional maximal cone.
    Local { cone: usize },
    /// Birational morphism to the affine toric variety of a full-dimensional
    /// base cone; the fiber is over its fixed point.
    Relative { base_rays: Vec<Vec<Int>> },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Projective => write!(f, "projective"),
            Mode::Local { cone } => write!(f, "local at cone {cone}"),
            Mode::Relative { base_rays } => write!(f, "relative over cone {base_rays:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexityError {
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error("boundary has {got} coefficients, fan has {expected} rays")]
    LengthMismatch { expected: usize, got: usize },
    #[error("projective mode needs a complete fan")]
    NotComplete,
    #[error("cone {0} is not a full-dimensional maximal cone")]
    NotFullDimensional(usize),
    #[error("cone index {0} out of range")]
    NoSuchCone(usize),
    #[error("base cone must be full-dimensional and pointed")]
    BadBase,
    #[error("fan support is not the base cone")]
    NotOverBase,
    #[error("boundary is not effective at ray {0}")]
    NotEffective(usize),
    #[error("pair is not log canonical: coefficient of ray {0} exceeds 1")]
    NotLogCanonical(usize),
    #[error("K + B is not Q-Cartier")]
    NotQCartier,
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("orbifold index at ray {ray} is incompatible with the boundary")]
    IncompatibleOrbifold { ray: usize },
    #[error("{got} candidate rays exceed the partition limit {limit}")]
    SearchTooLarge { got: usize, limit: usize },
}

/// Orbifold indices `n_ρ ≥ 1`; rays not listed have index 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbifoldStructure {
    indices: BTreeMap<usize, u64>,
}

impl OrbifoldStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut s = Self::default();
        for (r, n) in pairs {
            s.set(r, n);
        }
        s
    }

    pub fn get(&self, ray: usize) -> u64 {
        self.indices.get(&ray).copied().unwrap_or(1)
    }

    /// Index 0 is treated as 1.
    pub fn set(&mut self, ray: usize, n: u64) {
        if n <= 1 {
            self.indices.remove(&ray);
        } else {
            self.indices.insert(ray, n);
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn support(&self) -> RaySet {
        self.indices.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.indices.iter().map(|(&r, &n)| (r, n))
    }

    /// `Σ (1 − 1/n_ρ) D_ρ`.
    pub fn divisor(&self, nrays: usize) -> InvariantDivisor {
        let mut d = InvariantDivisor::zero(nrays);
        for (r, n) in self.iter() {
            d.set_coeff(r, Rat::one() - Rat::new(Int::one(), Int::from(n)));
        }
        d
    }
}

/// One weighted part `b · B` of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Part {
    pub b: Rat,
    pub divisor: InvariantDivisor,
}

/// `Σ = Σ_ρ (1 − 1/n_ρ) D_ρ + Σ_j b_j B_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbifoldDecomposition {
    pub orbifold: OrbifoldStructure,
    pub parts: Vec<Part>,
}

impl OrbifoldDecomposition {
    pub fn new(orbifold: OrbifoldStructure, parts: Vec<Part>) -> Self {
        Self { orbifold, parts }
    }

    pub fn trivial(parts: Vec<Part>) -> Self {
        Self { orbifold: OrbifoldStructure::trivial(), parts }
    }

    pub fn empty() -> Self {
        Self::trivial(Vec::new())
    }

    /// `Σ B_ρ D_ρ` split into prime parts over `rays`.
    pub fn prime(b: &InvariantDivisor, rays: impl IntoIterator<Item = usize>) -> Self {
        let n = b.len();
        Self::trivial(
            rays.into_iter()
                .filter(|&r| b.coeff(r).is_positive())
                .map(|r| Part { b: b.coeff(r).clone(), divisor: InvariantDivisor::prime(n, r) })
                .collect(),
        )
    }

    /// `|Σ| = Σ b_j`.
    pub fn norm(&self) -> Rat {
        self.parts.iter().map(|p| &p.b).sum()
    }

    pub fn total(&self, nrays: usize) -> InvariantDivisor {
        let mut t = self.orbifold.divisor(nrays);
        for p in &self.parts {
            t = &t + &p.divisor.scale(&p.b);
        }
        t
    }

    /// Each part is a single prime divisor `(1/n_ρ) D_ρ` and the total is `B`.
    pub fn is_prime_orbifold_exact(&self, b: &InvariantDivisor) -> bool {
        self.parts.iter().all(|p| {
            let s = p.divisor.support();
            s.len() == 1 && {
                let r = *s.iter().next().unwrap();
                *p.divisor.coeff(r) == Rat::new(Int::one(), Int::from(self.orbifold.get(r)))
            }
        }) && self.total(b.len()) == *b
    }
}

impl fmt::Display for OrbifoldDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orb: Vec<String> = self.orbifold.iter().map(|(r, n)| format!("n{r}={n}")).collect();
        let parts: Vec<String> = self.parts.iter().map(|p| format!("{}·({})", format_rat(&p.b), p.divisor)).collect();
        if !orb.is_empty() {
            write!(f, "[{}] ", orb.join(", "))?;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Class-group data of a fan in a given mode: `Cl_Q` coordinates of each prime
/// divisor and which divisors meet the fiber.
#[derive(Debug, Clone)]
pub struct Setting {
    pub dim: usize,
    pub class_rank: usize,
    pub classes: Vec<Vec<Rat>>,
    pub meets_fiber: Vec<bool>,
    pub mode: Mode,
}

impl Setting {
    pub fn new(f: &Fan, mode: &Mode) -> Result<Self, ComplexityError> {
        let n = f.num_rays();
        let dim = f.rank();
        match mode {
            Mode::Projective => {
                if !f.is_complete() {
                    return Err(ComplexityError::NotComplete);
                }
                Ok(Self::global(f, vec![true; n], mode.clone()))
            }
            Mode::Local { cone } => {
                let l = local_class_group(f, *cone).map_err(|e| match e {
                    DivisorError::NoSuchCone(c) => ComplexityError::NoSuchCone(c),
                    _ => ComplexityError::NotFullDimensional(*cone),
                })?;
                let r = l.group.free_rank;
                let mut classes = vec![vec![Rat::zero(); r]; n];
                let mut meets = vec![false; n];
                for &ray in &l.rays {
                    classes[ray] = l.rational_class(&InvariantDivisor::prime(n, ray));
                    meets[ray] = true;
                }
                Ok(Self { dim, class_rank: r, classes, meets_fiber: meets, mode: mode.clone() })
            }
            Mode::Relative { base_rays } => {
                let tau = RationalCone::new(dim, base_rays.clone()).map_err(|_| ComplexityError::BadBase)?;
                if !tau.is_full_dimensional() || !tau.is_pointed() {
                    return Err(ComplexityError::BadBase);
                }
                if !covers_exactly(f, &tau) {
                    return Err(ComplexityError::NotOverBase);
                }
                let meets = (0..n)
                    .map(|ray| {
                        f.cones_containing_ray(ray).into_iter().any(|c| {
                            let gens = f.cone_rays(&f.max_cones()[c]);
                            let sum: Vec<Int> = (0..dim).map(|i| gens.iter().map(|g| &g[i]).sum()).collect();
                            tau.contains_relint(&sum)
                        })
                    })
                    .collect();
                Ok(Self::global(f, meets, mode.clone()))
            }
        }
    }

    /// Global class group with every ray eligible, for varieties that are not
    /// necessarily complete (such as a non-complete invariant divisor).
    pub fn whole(f: &Fan) -> Self {
        Self::global(f, vec![true; f.num_rays()], Mode::Projective)
    }

    fn global(f: &Fan, meets_fiber: Vec<bool>, mode: Mode) -> Self {
        let n = f.num_rays();
        let g = class_group(f);
        let classes = (0..n).map(|r| g.rational_class(InvariantDivisor::prime(n, r).coeffs())).collect();
        Self { dim: f.rank(), class_rank: g.free_rank, classes, meets_fiber, mode }
    }

    pub fn class_of(&self, d: &InvariantDivisor) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.class_rank];
        for (c, cls) in d.coeffs().iter().zip(&self.classes) {
            if c.is_zero() {
                continue;
            }
            for (vi, x) in v.iter_mut().zip(cls) {
                *vi += c * x;
            }
        }
        v
    }

    pub fn span_dim(&self, parts: &[Part]) -> usize {
        let rows: Vec<Vec<Rat>> = parts.iter().map(|p| self.class_of(&p.divisor)).collect();
        if rows.is_empty() || self.class_rank == 0 {
            return 0;
        }
        rank_rat(&rows)
    }

    /// Rays eligible for parts of a decomposition of `b`.
    pub fn candidates(&self, b: &InvariantDivisor) -> Vec<usize> {
        (0..b.len()).filter(|&r| self.meets_fiber[r] && b.coeff(r).is_positive()).collect()
    }

    /// `c` of the pair: the value of the prime decomposition.
    pub fn pair_complexity(&self, b: &InvariantDivisor) -> Rat {
        let sum: Rat = self.candidates(b).iter().map(|&r| b.coeff(r).clone()).sum();
        Rat::from_integer(Int::from(self.dim + self.class_rank)) - sum
    }
}

/// Every maximal cone lies in `tau`, and the fan covers `tau`: each facet of a
/// full-dimensional maximal cone is shared with another cone or lies on the
/// boundary of `tau`.
fn covers_exactly(f: &Fan, tau: &RationalCone) -> bool {
    if !f.rays().iter().all(|r| tau.contains(r)) {
        return false;
    }
    let mut count: BTreeMap<RaySet, usize> = BTreeMap::new();
    for set in f.max_cones() {
        let cone = f.cone(set);
        if !cone.is_full_dimensional() {
            return false;
        }
        let global: Vec<usize> = set.iter().copied().collect();
        for facet in cone.facets() {
            *count.entry(facet.incident.iter().map(|&k| global[k]).collect()).or_default() += 1;
        }
    }
    count.into_iter().all(|(face, c)| {
        c == 2 || (c == 1 && tau.facets().iter().any(|t| face.iter().all(|&r| crate::num::dot(&t.normal, f.ray(r)).is_zero())))
    })
}

fn check_boundary(f: &Fan, b: &InvariantDivisor) -> Result<(), ComplexityError> {
    if b.len() != f.num_rays() {
        return Err(ComplexityError::LengthMismatch { expected: f.num_rays(), got: b.len() });
    }
    if let Some(r) = (0..b.len()).find(|&r| b.coeff(r).is_negative()) {
        return Err(ComplexityError::NotEffective(r));
    }
    Ok(())
}

/// Log canonical over the mode: coefficients in `[0, 1]` and `K + B`
/// Q-Cartier (on `σ` in local mode).
pub fn check_pair(f: &Fan, b: &InvariantDivisor, mode: &Mode) -> Result<(), ComplexityError> {
    check_boundary(f, b)?;
    if let Some(r) = (0..b.len()).find(|&r| *b.coeff(r) > Rat::one()) {
        return Err(ComplexityError::NotLogCanonical(r));
    }
    let kb = &canonical_divisor(f) + b;
    let ok = match mode {
        Mode::Local { cone } => {
            let set = f.max_cones().get(*cone).ok_or(ComplexityError::NoSuchCone(*cone))?;
            cartier_on_cone(f, set, &kb).is_some()
        }
        _ => is_q_cartier(&kb, f),
    };
    if ok {
        Ok(())
    } else {
        Err(ComplexityError::NotQCartier)
    }
}

/// Checks `0 ≤ Σ ≤ B`, positivity of weights, effectivity and the orbifold
/// Weil condition of parts, orbifold compatibility and the support condition.
pub fn validate_decomposition(
    setting: &Setting,
    b: &InvariantDivisor,
    sigma: &OrbifoldDecomposition,
) -> Result<(), ComplexityError> {
    let n = b.len();
    let bad = |s: String| Err(ComplexityError::InvalidDecomposition(s));
    for (ray, idx) in sigma.orbifold.iter() {
        if ray >= n {
            return bad(format!("orbifold index on missing ray {ray}"));
        }
        let floor = Rat::one() - Rat::new(Int::one(), Int::from(idx));
        if !b.coeff(ray).is_positive() || *b.coeff(ray) < floor {
            return Err(ComplexityError::IncompatibleOrbifold { ray });
        }
    }
    for (j, p) in sigma.parts.iter().enumerate() {
        if p.divisor.len() != n {
            return bad(format!("part {j} has {} coefficients, expected {n}", p.divisor.len()));
        }
        if !p.b.is_positive() {
            return bad(format!("part {j} has non-positive weight"));
        }
        if !p.divisor.is_effective() || p.divisor.is_zero() {
            return bad(format!("part {j} is not a nonzero effective divisor"));
        }
        for r in p.divisor.support() {
            let scaled = p.divisor.coeff(r) * Rat::from_integer(Int::from(sigma.orbifold.get(r)));
            if !scaled.is_integer() {
                return bad(format!("part {j} is not an orbifold Weil divisor at ray {r}"));
            }
        }
        if !p.divisor.support().iter().any(|&r| setting.meets_fiber[r]) {
            return bad(format!("part {j} does not meet the fiber"));
        }
    }
    let total = sigma.total(n);
    if let Some(r) = (0..n).find(|&r| total.coeff(r) > b.coeff(r)) {
        return bad(format!("Σ exceeds B at ray {r}"));
    }
    Ok(())
}

/// `ĉ` of a decomposition against a prepared setting.
pub fn evaluate_orbifold(setting: &Setting, b: &InvariantDivisor, sigma: &OrbifoldDecomposition) -> Result<Rat, ComplexityError> {
    validate_decomposition(setting, b, sigma)?;
    Ok(value(setting, setting.span_dim(&sigma.parts), &sigma.norm()))
}

fn value(setting: &Setting, span: usize, norm: &Rat) -> Rat {
    Rat::from_integer(Int::from(setting.dim + span)) - norm
}

/// `dim X + rank Cl − |Σ|` for a decomposition with trivial orbifold structure.
pub fn complexity(f: &Fan, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<Rat, ComplexityError> {
    let s = prepare(f, b, mode, sigma, true)?;
    Ok(value(&s, s.class_rank, &sigma.norm()))
}

/// `dim X + dim ⟨Σ⟩ − |Σ|` for a decomposition with trivial orbifold structure.
pub fn fine_complexity(f: &Fan, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<Rat, ComplexityError> {
    let s = prepare(f, b, mode, sigma, true)?;
    Ok(value(&s, s.span_dim(&sigma.parts), &sigma.norm()))
}

/// `dim X + dim ⟨Σ⟩ − |Σ|`; orbifold rays count towards `Σ ≤ B` only.
pub fn orbifold_complexity(f: &Fan, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<Rat, ComplexityError> {
    let s = prepare(f, b, mode, sigma, false)?;
    Ok(value(&s, s.span_dim(&sigma.parts), &sigma.norm()))
}

fn prepare(
    f: &Fan,
    b: &InvariantDivisor,
    mode: &Mode,
    sigma: &OrbifoldDecomposition,
    trivial_only: bool,
) -> Result<Setting, ComplexityError> {
    check_boundary(f, b)?;
    if trivial_only && !sigma.orbifold.is_trivial() {
        return Err(ComplexityError::InvalidDecomposition("orbifold structure must be trivial".into()));
    }
    let s = Setting::new(f, mode)?;
    validate_decomposition(&s, b, sigma)?;
    Ok(s)
}

/// Output of [`minimize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub mode: Mode,
    pub dim: usize,
    pub class_rank: usize,
    /// Complexity `c`, realized by the prime decomposition.
    pub c: Rat,
    pub prime: OrbifoldDecomposition,
    /// Fine complexity `c̄` and a realizing decomposition.
    pub c_fine: Rat,
    pub fine: OrbifoldDecomposition,
    pub fine_span: usize,
    /// Orbifold complexity `ĉ` and a realizing orbifold decomposition.
    pub c_orb: Rat,
    pub orbifold: OrbifoldDecomposition,
    pub orbifold_span: usize,
    /// Search-tree nodes visited by the two searches.
    pub nodes: u64,
}

impl ComplexityReport {
    pub fn chain_holds(&self) -> bool {
        self.c >= self.c_fine && self.c_fine >= self.c_orb
    }
}

/// Restriction on the search space, stated in every report.
pub const SCOPE_NOTE: &str = "minimum over torus-invariant decompositions whose parts are reduced sums of distinct \
invariant primes scaled by 1/n, with orbifold indices dividing the boundary denominators";
