//! Adjunction of an invariant pair along an invariant divisor `E = D_ρ`.
//!
//! A codimension-one point `Q` of `E` is a star ray, the image of a 2-cone
//! `{ρ, u}`; the only other invariant prime through `Q` is `P = D_u`. With
//! `q(u) = g·w` in `N / Z u_ρ`, the Cartier index of `E` at `Q` is
//! `i_Q = g` and `P|_E = (γ/i_Q)·Q` with `γ = 1`; both are computed here
//! from lattice data rather than assumed.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::complexity::{evaluate_orbifold, ComplexityError, Mode, OrbifoldDecomposition, OrbifoldStructure, Part, Setting};
use crate::divisor::{canonical_divisor, cartier_on_cone, restrict_to_star, InvariantDivisor};
use crate::fan::{Fan, FanError, StarFan};
use crate::lattice::RationalCone;
use crate::num::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdjunctionError {
    #[error("ray {0} out of range")]
    NoSuchRay(usize),
    #[error("coefficient of ray {ray} in B is {coeff}, not 1")]
    NotDivisorialCenter { ray: usize, coeff: String },
    #[error("K + B is not Q-Cartier on cone {0}")]
    NotQCartier(usize),
    #[error("boundary has {got} coefficients, fan has {expected} rays")]
    LengthMismatch { expected: usize, got: usize },
    #[error("orbifold indices {incident:?} meet star ray {star_ray}: the pair is not log canonical there")]
    LcViolation { star_ray: usize, incident: Vec<(usize, u64)> },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("index {0} does not fit a machine integer")]
    IndexTooLarge(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
}

/// How the orbifold structure meets a codimension-one point `Q` of `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbifoldCase {
    /// No prime with `n > 1` contains `Q`.
    Free,
    /// Exactly one, `P_0`.
    Single { ray: usize },
    /// Exactly two, both with index 2.
    Pair { rays: (usize, usize) },
}

/// Lattice data of `E` at one codimension-one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallRecord {
    pub star_ray: usize,
    pub ambient_ray: usize,
    /// Cartier index `i_Q` of `E` at `Q`.
    pub cartier_index: Int,
    /// `γ_{P,Q}` with `coeff_Q(P|_E) = γ / i_Q`.
    pub gamma: Int,
    pub case: OrbifoldCase,
    pub m: u64,
}

/// Everything produced by adjunction along `E`.
#[derive(Debug, Clone)]
pub struct AdjunctionResult {
    pub ray: usize,
    pub star: StarFan,
    /// `B_E`, defined by `(K + B)|_E = K_E + B_E`.
    pub boundary: InvariantDivisor,
    pub orbifold: OrbifoldStructure,
    pub decomposition: OrbifoldDecomposition,
    pub walls: Vec<WallRecord>,
    /// Star rays in case (b).
    pub s_set: Vec<usize>,
    /// The input after moving `E` into its own part with weight 1 and `n_E = 1`.
    pub normalized: OrbifoldDecomposition,
    pub rewritten: bool,
    pub c_hat_input: Rat,
    pub c_hat_x: Rat,
    pub c_hat_e: Rat,
    pub span_x: usize,
    pub span_e: usize,
    pub class_rank_e: usize,
    /// `E` lies over the closed point of the base.
    pub center_in_fiber: bool,
    pub e_complete: bool,
}

impl AdjunctionResult {
    pub fn monotone(&self) -> bool {
        self.c_hat_e <= self.c_hat_x
    }

    pub fn equality(&self) -> bool {
        self.c_hat_e == self.c_hat_x
    }

    pub fn full_span(&self) -> bool {
        self.span_e == self.class_rank_e
    }

    pub fn sigma_equals_boundary(&self) -> bool {
        self.decomposition.total(self.boundary.len()) == self.boundary
    }
}

fn check_center(f: &Fan, b: &InvariantDivisor, ray: usize) -> Result<(), AdjunctionError> {
    if b.len() != f.num_rays() {
        return Err(AdjunctionError::LengthMismatch { expected: f.num_rays(), got: b.len() });
    }
    if ray >= f.num_rays() {
        return Err(AdjunctionError::NoSuchRay(ray));
    }
    if !b.coeff(ray).is_one() {
        return Err(AdjunctionError::NotDivisorialCenter { ray, coeff: crate::num::format_rat(b.coeff(ray)) });
    }
    let kb = &canonical_divisor(f) + b;
    for c in f.cones_containing_ray(ray) {
        if cartier_on_cone(f, &f.max_cones()[c], &kb).is_none() {
            return Err(AdjunctionError::NotQCartier(c));
        }
    }
    Ok(())
}

/// `(ambient ray, i_Q, γ)` for each star ray, in star-ray order.
pub fn wall_data(f: &Fan, ray: usize, star: &StarFan) -> Vec<(usize, Int, Int)> {
    let e = InvariantDivisor::prime(f.num_rays(), ray);
    star.over
        .iter()
        .map(|&u| {
            let pair = [ray, u].into_iter().collect();
            let (i_q, _) = cartier_on_cone(f, &pair, &e).expect("2-cones are simplicial");
            let g = &star.ray_map[&u].1;
            debug_assert!(i_q.is_multiple_of(g));
            let gamma = &i_q / g;
            (u, i_q, gamma)
        })
        .collect()
}

/// The different `B_E` on the star fan of `ray`:
/// `coeff_Q = 1 − 1/i_Q + coeff_P(B)·γ_{P,Q}/i_Q`.
pub fn different(f: &Fan, b: &InvariantDivisor, ray: usize) -> Result<(StarFan, InvariantDivisor), AdjunctionError> {
    check_center(f, b, ray)?;
    let star = f.star_fan(ray)?;
    let coeffs = wall_data(f, ray, &star)
        .into_iter()
        .map(|(u, i_q, gamma)| {
            let i = Rat::from_integer(i_q);
            Rat::one() - Rat::one() / &i + b.coeff(u) * Rat::from_integer(gamma) / &i
        })
        .collect();
    Ok((star, InvariantDivisor::new(coeffs)))
}

/// `m(Q)` from the Cartier index and the primes of the orbifold support
/// through `Q` (with their indices).
pub fn assign_orbifold_index(star_ray: usize, i_q: &Int, incident: &[(usize, u64)]) -> Result<(u64, OrbifoldCase), AdjunctionError> {
    let i = i_q.to_u64().ok_or_else(|| AdjunctionError::IndexTooLarge(i_q.to_string()))?;
    match incident {
        [] => Ok((i, OrbifoldCase::Free)),
        [(p, n)] => {
            let m = n.checked_mul(i).ok_or_else(|| AdjunctionError::IndexTooLarge(format!("{n}·{i}")))?;
            Ok((m, OrbifoldCase::Single { ray: *p }))
        }
        [(p1, 2), (p2, 2)] => Ok((1, OrbifoldCase::Pair { rays: (*p1, *p2) })),
        _ => Err(AdjunctionError::LcViolation { star_ray, incident: incident.to_vec() }),
    }
}

/// The orbifold structure `m` on `E` induced by `n`, with per-wall records
/// and the set of case-(b) points.
pub fn induced_orbifold(
    f: &Fan,
    n: &OrbifoldStructure,
    ray: usize,
    star: &StarFan,
) -> Result<(OrbifoldStructure, Vec<WallRecord>, Vec<usize>), AdjunctionError> {
    let mut m = OrbifoldStructure::trivial();
    let mut walls = Vec::new();
    let mut s_set = Vec::new();
    for (q, (u, i_q, gamma)) in wall_data(f, ray, star).into_iter().enumerate() {
        let incident: Vec<(usize, u64)> = [u].into_iter().filter(|&p| n.get(p) > 1).map(|p| (p, n.get(p))).collect();
        let (mq, case) = assign_orbifold_index(q, &i_q, &incident)?;
        if matches!(case, OrbifoldCase::Pair { .. }) {
            s_set.push(q);
        }
        m.set(q, mq);
        walls.push(WallRecord { star_ray: q, ambient_ray: u, cartier_index: i_q, gamma, case, m: mq });
    }
    Ok((m, walls, s_set))
}

/// Rewrites `Σ` so that `n_E = 1` and `E` is its own part with weight 1,
/// removing `E` from every other part and dropping parts supported on `E`.
pub fn normalize(sigma: &OrbifoldDecomposition, ray: usize, nrays: usize) -> OrbifoldDecomposition {
    let mut orbifold = sigma.orbifold.clone();
    orbifold.set(ray, 1);
    let mut parts = vec![Part { b: Rat::one(), divisor: InvariantDivisor::prime(nrays, ray) }];
    for p in &sigma.parts {
        let mut d = p.divisor.clone();
        d.set_coeff(ray, Rat::zero());
        if !d.is_zero() {
            parts.push(Part { b: p.b.clone(), divisor: d });
        }
    }
    OrbifoldDecomposition::new(orbifold, parts)
}

/// `P|_E` for a divisor without `E` in its support, via
/// `coeff_Q = Σ_P coeff_P·γ_{P,Q}/i_Q`.
fn restrict_part(d: &InvariantDivisor, walls: &[WallRecord]) -> InvariantDivisor {
    InvariantDivisor::new(
        walls
            .iter()
            .map(|w| d.coeff(w.ambient_ray) * Rat::from_integer(w.gamma.clone()) / Rat::from_integer(w.cartier_index.clone()))
            .collect(),
    )
}

fn center_in_fiber(f: &Fan, ray: usize, mode: &Mode) -> bool {
    match mode {
        Mode::Projective => true,
        Mode::Local { .. } => false,
        Mode::Relative { base_rays } => RationalCone::new(f.rank(), base_rays.clone())
            .map(|t| t.contains_relint(f.ray(ray)))
            .unwrap_or(false),
    }
}

/// The induced decomposition `Σ_E` and both orbifold complexities.
///
/// `Σ` is normalized first; the remaining hypotheses are that every other
/// part meets `E` and that `B` has coefficient 1 along `E`.
pub fn induced_decomposition(
    f: &Fan,
    b: &InvariantDivisor,
    mode: &Mode,
    sigma: &OrbifoldDecomposition,
    ray: usize,
) -> Result<AdjunctionResult, AdjunctionError> {
    let setting_x = Setting::new(f, mode)?;
    let c_hat_input = evaluate_orbifold(&setting_x, b, sigma)?;
    let (star, boundary) = different(f, b, ray)?;
    let nrays = f.num_rays();
    let normalized = normalize(sigma, ray, nrays);
    let rewritten = normalized.orbifold != sigma.orbifold || {
        let a: BTreeSet<_> = normalized.parts.iter().map(|p| (p.b.clone(), p.divisor.clone())).collect();
        let b: BTreeSet<_> = sigma.parts.iter().map(|p| (p.b.clone(), p.divisor.clone())).collect();
        a != b
    };
    let c_hat_x = evaluate_orbifold(&setting_x, b, &normalized)?;

    let neighbors = f.neighbors(ray);
    for (j, p) in normalized.parts.iter().enumerate().skip(1) {
        if !p.divisor.support().iter().any(|r| neighbors.contains(r)) {
            return Err(AdjunctionError::Hypothesis(format!("part {j} does not meet E")));
        }
    }

    let (m, walls, s_set) = induced_orbifold(f, &normalized.orbifold, ray, &star)?;
    let mut parts = Vec::new();
    for p in normalized.parts.iter().skip(1) {
        let r = restrict_part(&p.divisor, &walls);
        for (q, c) in r.coeffs().iter().enumerate() {
            if !(c * Rat::from_integer(Int::from(m.get(q)))).is_integer() {
                return Err(AdjunctionError::Hypothesis(format!("restricted part is not orbifold Weil at star ray {q}")));
            }
        }
        parts.push(Part { b: p.b.clone(), divisor: r });
    }
    let decomposition = OrbifoldDecomposition::new(m.clone(), parts);
    let setting_e = Setting::whole(&star.fan);
    let c_hat_e = evaluate_orbifold(&setting_e, &boundary, &decomposition)?;
    Ok(AdjunctionResult {
        ray,
        span_x: setting_x.span_dim(&normalized.parts),
        span_e: setting_e.span_dim(&decomposition.parts),
        class_rank_e: setting_e.class_rank,
        center_in_fiber: center_in_fiber(f, ray, mode),
        e_complete: star.fan.is_complete(),
        star,
        boundary,
        orbifold: m,
        decomposition,
        walls,
        s_set,
        normalized,
        rewritten,
        c_hat_input,
        c_hat_x,
        c_hat_e,
    })
}

/// `B_E` recomputed from `(K + B)|_E − K_E` by restricting the support function.
pub fn different_by_restriction(f: &Fan, b: &InvariantDivisor, ray: usize) -> Result<InvariantDivisor, AdjunctionError> {
    check_center(f, b, ray)?;
    let star = f.star_fan(ray)?;
    let kb = &canonical_divisor(f) + b;
    let r = restrict_to_star(&kb, f, ray, &star).map_err(|_| AdjunctionError::NotQCartier(ray))?;
    Ok(&r - &canonical_divisor(&star.fan))
}
