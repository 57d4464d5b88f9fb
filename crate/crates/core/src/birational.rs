//! Toric surgeries and how the three complexities behave under them:
//! divisorial contractions (a ray disappears), small modifications (same
//! rays, new cones) and extractions (star subdivisions at lc places).

use num_traits::{One, Zero};

use crate::complexity::{complexity, fine_complexity, orbifold_complexity, ComplexityError, Mode, OrbifoldDecomposition, OrbifoldStructure, Part};
use crate::divisor::{canonical_divisor, cartier_on_cone, InvariantDivisor};
use crate::fan::{Fan, FanError};
use crate::num::{dot_rat_int, primitive, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BirationalError {
    #[error("invalid surgery: {0}")]
    InvalidSurgery(String),
    #[error("correspondence mismatch: {0}")]
    CorrespondenceMismatch(String),
    #[error("{vector:?} is not an lc place: log discrepancy {discrepancy}")]
    NotLcPlace { vector: Vec<Int>, discrepancy: String },
    #[error("K + B is not Q-Cartier on cone {0}")]
    NotQCartier(usize),
    #[error("not crepant at ray {ray} (cone {cone} of the target): coefficient {found}, pullback gives {expected}")]
    NotCrepant { ray: usize, cone: usize, found: String, expected: String },
    #[error("K + B bends across the wall between cones {left} and {right}")]
    NotTrivialAcrossWall { left: usize, right: usize },
    #[error("surgeries are compared in projective or relative mode")]
    UnsupportedMode,
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurgeryKind {
    Contraction,
    SmallModification,
    Extraction,
}

/// A birational map `source ⇢ target` between fans in the same lattice.
/// Every target ray is a source ray; `correspondence[i]` is the target index
/// of source ray `i`, if it survives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanSurgery {
    pub kind: SurgeryKind,
    pub source: Fan,
    pub target: Fan,
    pub correspondence: Vec<Option<usize>>,
}

fn correspond(source: &Fan, target: &Fan) -> Result<Vec<Option<usize>>, BirationalError> {
    if source.rank() != target.rank() {
        return Err(BirationalError::InvalidSurgery("fans live in different lattices".into()));
    }
    let corr: Vec<Option<usize>> = source.rays().iter().map(|r| target.ray_index(r)).collect();
    let hit = corr.iter().flatten().count();
    if hit != target.num_rays() {
        return Err(BirationalError::InvalidSurgery("target has rays that are not source rays".into()));
    }
    Ok(corr)
}

fn check_valid(f: &Fan, which: &str) -> Result<(), BirationalError> {
    match f.validate().issues.into_iter().next() {
        Some(issue) => Err(BirationalError::InvalidSurgery(format!("{which} fan: {issue}"))),
        None => Ok(()),
    }
}

impl FanSurgery {
    /// `source → target` contracting exactly one ray; `source` refines `target`.
    pub fn contraction(source: Fan, target: Fan) -> Result<Self, BirationalError> {
        check_valid(&source, "source")?;
        check_valid(&target, "target")?;
        let correspondence = correspond(&source, &target)?;
        if source.num_rays() != target.num_rays() + 1 {
            return Err(BirationalError::InvalidSurgery("a contraction removes exactly one ray".into()));
        }
        if !target.is_refined_by(&source) {
            return Err(BirationalError::InvalidSurgery("source does not refine target".into()));
        }
        Ok(Self { kind: SurgeryKind::Contraction, source, target, correspondence })
    }

    /// Same rays, different maximal cones, same support.
    pub fn small(source: Fan, target: Fan) -> Result<Self, BirationalError> {
        check_valid(&source, "source")?;
        check_valid(&target, "target")?;
        let correspondence = correspond(&source, &target)?;
        if source.num_rays() != target.num_rays() {
            return Err(BirationalError::InvalidSurgery("a small modification keeps every ray".into()));
        }
        let relabel = |c: &crate::fan::RaySet| -> crate::fan::RaySet { c.iter().map(|&i| correspondence[i].unwrap()).collect() };
        let mut a: Vec<_> = source.max_cones().iter().map(relabel).collect();
        let mut b: Vec<_> = target.max_cones().to_vec();
        a.sort();
        b.sort();
        let identity = a == b;
        let same_support = |x: &Fan, y: &Fan| {
            x.max_cones().iter().all(|c| {
                let rays = x.cone_rays(c);
                let sum: Vec<Int> = (0..x.rank()).map(|k| rays.iter().map(|r| r[k].clone()).sum()).collect();
                rays.iter().all(|r| y.in_support(r)) && y.in_support(&sum)
            })
        };
        if !identity && !(same_support(&source, &target) && same_support(&target, &source)) {
            return Err(BirationalError::InvalidSurgery("supports differ".into()));
        }
        Ok(Self { kind: SurgeryKind::SmallModification, source, target, correspondence })
    }

    /// The source is `target` star-subdivided at each vector in turn.
    pub fn extraction(target: Fan, vectors: &[Vec<Int>]) -> Result<Self, BirationalError> {
        check_valid(&target, "target")?;
        let mut source = target.clone();
        for v in vectors {
            let p = primitive(v);
            if source.ray_index(&p).is_some() {
                return Err(BirationalError::InvalidSurgery(format!("{p:?} is already a ray")));
            }
            source = source.star_subdivision(&p)?;
        }
        let correspondence = correspond(&source, &target)?;
        Ok(Self { kind: SurgeryKind::Extraction, source, target, correspondence })
    }

    /// Source rays with no target counterpart.
    pub fn exceptional(&self) -> Vec<usize> {
        (0..self.correspondence.len()).filter(|&i| self.correspondence[i].is_none()).collect()
    }
}

/// Coefficients carried along the correspondence; exceptional rays vanish.
pub fn pushforward_divisor(d: &InvariantDivisor, s: &FanSurgery) -> Result<InvariantDivisor, BirationalError> {
    if d.len() != s.source.num_rays() {
        return Err(BirationalError::CorrespondenceMismatch(format!("{} coefficients for {} source rays", d.len(), s.source.num_rays())));
    }
    let mut out = InvariantDivisor::zero(s.target.num_rays());
    for (i, t) in s.correspondence.iter().enumerate() {
        if let Some(t) = t {
            out.set_coeff(*t, d.coeff(i).clone());
        }
    }
    Ok(out)
}

/// Strict transform: target coefficients on the surviving rays, 0 elsewhere.
pub fn strict_transform(d: &InvariantDivisor, s: &FanSurgery) -> Result<InvariantDivisor, BirationalError> {
    if d.len() != s.target.num_rays() {
        return Err(BirationalError::CorrespondenceMismatch(format!("{} coefficients for {} target rays", d.len(), s.target.num_rays())));
    }
    let coeffs = s.correspondence.iter().map(|t| t.map_or_else(Rat::zero, |t| d.coeff(t).clone())).collect();
    Ok(InvariantDivisor::new(coeffs))
}

/// `π_*Σ` and the parts that were supported on exceptional rays only.
pub fn pushforward(sigma: &OrbifoldDecomposition, s: &FanSurgery) -> Result<(OrbifoldDecomposition, Vec<Part>), BirationalError> {
    let mut orbifold = OrbifoldStructure::trivial();
    for (r, n) in sigma.orbifold.iter() {
        match s.correspondence.get(r) {
            Some(Some(t)) => orbifold.set(*t, n),
            Some(None) => {}
            None => return Err(BirationalError::CorrespondenceMismatch(format!("orbifold index on missing ray {r}"))),
        }
    }
    let mut parts = Vec::new();
    let mut dropped = Vec::new();
    for p in &sigma.parts {
        let d = pushforward_divisor(&p.divisor, s)?;
        if d.is_zero() {
            dropped.push(p.clone());
        } else {
            parts.push(Part { b: p.b.clone(), divisor: d });
        }
    }
    Ok((OrbifoldDecomposition::new(orbifold, parts), dropped))
}

/// Log discrepancy `a(v) = ⟨m_σ, v⟩` of the invariant valuation of a primitive
/// `v`, where `⟨m_σ, u_ρ⟩ = 1 − B_ρ` on a maximal cone containing `v`.
pub fn log_discrepancy(f: &Fan, b: &InvariantDivisor, v: &[Int]) -> Result<(Rat, usize), BirationalError> {
    let v = primitive(v);
    let kb = &canonical_divisor(f) + b;
    let cone = *f.locate(&v).first().ok_or_else(|| BirationalError::Fan(FanError::RayOutsideSupport(v.clone())))?;
    let (_, m) = cartier_on_cone(f, &f.max_cones()[cone], &kb).ok_or(BirationalError::NotQCartier(cone))?;
    Ok((dot_rat_int(&m, &v), cone))
}

/// `π^*(K_X + B_X) = K_Y + B_Y` ray by ray, with `X` the target.
fn check_crepant(s: &FanSurgery, b_source: &InvariantDivisor, b_target: &InvariantDivisor) -> Result<(), BirationalError> {
    for (i, u) in s.source.rays().iter().enumerate() {
        let (a, cone) = log_discrepancy(&s.target, b_target, u)?;
        let expected = Rat::one() - a;
        if *b_source.coeff(i) != expected {
            return Err(BirationalError::NotCrepant {
                ray: i,
                cone,
                found: crate::num::format_rat(b_source.coeff(i)),
                expected: crate::num::format_rat(&expected),
            });
        }
    }
    Ok(())
}

/// `K + B` is one linear function across every wall.
fn check_trivial(f: &Fan, b: &InvariantDivisor) -> Result<(), BirationalError> {
    let kb = &canonical_divisor(f) + b;
    let ms: Vec<Vec<Rat>> = f
        .max_cones()
        .iter()
        .enumerate()
        .map(|(c, set)| cartier_on_cone(f, set, &kb).map(|x| x.1).ok_or(BirationalError::NotQCartier(c)))
        .collect::<Result<_, _>>()?;
    for w in f.walls() {
        if ms[w.left] != ms[w.right] {
            return Err(BirationalError::NotTrivialAcrossWall { left: w.left, right: w.right });
        }
    }
    Ok(())
}

/// `(c, c̄, ĉ)`; the first two only for a trivial orbifold structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub c: Option<Rat>,
    pub c_fine: Option<Rat>,
    pub c_orb: Rat,
}

impl Invariants {
    pub fn evaluate(f: &Fan, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<Self, ComplexityError> {
        let trivial = sigma.orbifold.is_trivial();
        Ok(Self {
            c: if trivial { Some(complexity(f, b, mode, sigma)?) } else { None },
            c_fine: if trivial { Some(fine_complexity(f, b, mode, sigma)?) } else { None },
            c_orb: orbifold_complexity(f, b, mode, sigma)?,
        })
    }

    /// Componentwise `≤`.
    pub fn le(&self, other: &Self) -> bool {
        let opt = |a: &Option<Rat>, b: &Option<Rat>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        opt(&self.c, &other.c) && opt(&self.c_fine, &other.c_fine) && self.c_orb <= other.c_orb
    }
}

/// Complexities before and after a surgery.
#[derive(Debug, Clone)]
pub struct SurgeryReport {
    pub kind: SurgeryKind,
    /// The side the given decomposition lives on.
    pub before: Invariants,
    /// The side the constructed decomposition lives on.
    pub after: Invariants,
    pub boundary_after: InvariantDivisor,
    pub decomposition_after: OrbifoldDecomposition,
    /// Parts lost under pushforward.
    pub dropped: Vec<Part>,
    /// Total weight of the dropped parts (contractions).
    pub exceptional_weight: Rat,
    /// `(v, a(v))` for every extracted vector.
    pub discrepancies: Vec<(Vec<Int>, Rat)>,
    /// The inequalities (or equalities, for small modifications) predicted.
    pub inequalities_hold: bool,
    /// Contractions: `c` is preserved exactly when the dropped weight is 1.
    pub equality_criterion_holds: Option<bool>,
}

fn check_mode(mode: &Mode) -> Result<(), BirationalError> {
    match mode {
        Mode::Local { .. } => Err(BirationalError::UnsupportedMode),
        _ => Ok(()),
    }
}

fn expect(s: &FanSurgery, kind: SurgeryKind) -> Result<(), BirationalError> {
    if s.kind == kind {
        Ok(())
    } else {
        Err(BirationalError::InvalidSurgery(format!("expected {kind:?}, got {:?}", s.kind)))
    }
}

/// Pushes `Σ` on the source down the contraction and compares.
pub fn check_contraction(s: &FanSurgery, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<SurgeryReport, BirationalError> {
    expect(s, SurgeryKind::Contraction)?;
    check_mode(mode)?;
    let b_target = pushforward_divisor(b, s)?;
    check_crepant(s, b, &b_target)?;
    let before = Invariants::evaluate(&s.source, b, mode, sigma)?;
    let (pushed, dropped) = pushforward(sigma, s)?;
    let after = Invariants::evaluate(&s.target, &b_target, mode, &pushed)?;
    let weight: Rat = dropped.iter().map(|p| p.b.clone()).sum();
    let criterion = match (&before.c, &after.c) {
        (Some(x), Some(y)) => Some((x == y) == weight.is_one()),
        _ => None,
    };
    Ok(SurgeryReport {
        kind: s.kind,
        inequalities_hold: after.le(&before),
        before,
        after,
        boundary_after: b_target,
        decomposition_after: pushed,
        dropped,
        exceptional_weight: weight,
        discrepancies: Vec::new(),
        equality_criterion_holds: criterion,
    })
}

/// Transports `Σ` across a small modification; all three invariants agree.
pub fn check_small(s: &FanSurgery, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<SurgeryReport, BirationalError> {
    expect(s, SurgeryKind::SmallModification)?;
    check_mode(mode)?;
    let b_target = pushforward_divisor(b, s)?;
    check_trivial(&s.source, b)?;
    check_trivial(&s.target, &b_target)?;
    let before = Invariants::evaluate(&s.source, b, mode, sigma)?;
    let (pushed, dropped) = pushforward(sigma, s)?;
    let after = Invariants::evaluate(&s.target, &b_target, mode, &pushed)?;
    Ok(SurgeryReport {
        kind: s.kind,
        inequalities_hold: before == after,
        before,
        after,
        boundary_after: b_target,
        decomposition_after: pushed,
        dropped,
        exceptional_weight: Rat::zero(),
        discrepancies: Vec::new(),
        equality_criterion_holds: None,
    })
}

/// Extracts lc places: `Σ_Y` is the strict transform of `Σ` plus every
/// exceptional divisor with weight 1.
pub fn check_extraction(s: &FanSurgery, b: &InvariantDivisor, mode: &Mode, sigma: &OrbifoldDecomposition) -> Result<SurgeryReport, BirationalError> {
    expect(s, SurgeryKind::Extraction)?;
    check_mode(mode)?;
    let mut discrepancies = Vec::new();
    for e in s.exceptional() {
        let v = s.source.ray(e).to_vec();
        let (a, _) = log_discrepancy(&s.target, b, &v)?;
        if !a.is_zero() {
            return Err(BirationalError::NotLcPlace { vector: v, discrepancy: crate::num::format_rat(&a) });
        }
        discrepancies.push((v, a));
    }
    let mut b_source = strict_transform(b, s)?;
    for e in s.exceptional() {
        b_source.set_coeff(e, Rat::one());
    }
    check_crepant(s, &b_source, b)?;
    let before = Invariants::evaluate(&s.target, b, mode, sigma)?;
    let mut orbifold = OrbifoldStructure::trivial();
    for (r, n) in sigma.orbifold.iter() {
        let src = s.correspondence.iter().position(|t| *t == Some(r)).ok_or_else(|| BirationalError::CorrespondenceMismatch(format!("orbifold index on missing ray {r}")))?;
        orbifold.set(src, n);
    }
    let mut parts: Vec<Part> = sigma
        .parts
        .iter()
        .map(|p| Ok(Part { b: p.b.clone(), divisor: strict_transform(&p.divisor, s)? }))
        .collect::<Result<_, BirationalError>>()?;
    for e in s.exceptional() {
        parts.push(Part { b: Rat::one(), divisor: InvariantDivisor::prime(s.source.num_rays(), e) });
    }
    let sigma_y = OrbifoldDecomposition::new(orbifold, parts);
    let after = Invariants::evaluate(&s.source, &b_source, mode, &sigma_y)?;
    Ok(SurgeryReport {
        kind: s.kind,
        inequalities_hold: after.le(&before),
        before,
        after,
        boundary_after: b_source,
        decomposition_after: sigma_y,
        dropped: Vec::new(),
        exceptional_weight: Rat::zero(),
        discrepancies,
        equality_criterion_holds: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::examples::*;
    use crate::num::{rat, rat_int, to_ints};

    fn blowup() -> FanSurgery {
        FanSurgery::contraction(blown_up_p2(), p2()).unwrap()
    }

    fn full(n: usize) -> InvariantDivisor {
        InvariantDivisor::indicator(n, 0..n)
    }

    #[test]
    fn identity_pushforward() {
        let s = FanSurgery::small(p2(), p2()).unwrap();
        let sigma = OrbifoldDecomposition::prime(&full(3), 0..3);
        assert_eq!(pushforward(&sigma, &s).unwrap().0, sigma);
    }

    #[test]
    fn contraction_variants() {
        let s = blowup();
        let b = full(4);
        let e = 3;
        let rest = [0usize, 1, 2].map(|r| Part { b: rat_int(1), divisor: InvariantDivisor::prime(4, r) });
        let with = |w: Option<Rat>| {
            let mut parts = rest.to_vec();
            if let Some(w) = w {
                parts.push(Part { b: w, divisor: InvariantDivisor::prime(4, e) });
            }
            OrbifoldDecomposition::trivial(parts)
        };
        let one = check_contraction(&s, &b, &Mode::Projective, &with(Some(rat_int(1)))).unwrap();
        assert_eq!(one.before.c, one.after.c);
        assert_eq!(one.decomposition_after.parts.len(), 3);
        let half = check_contraction(&s, &b, &Mode::Projective, &with(Some(rat(1, 2)))).unwrap();
        assert!(half.after.c < half.before.c);
        let none = check_contraction(&s, &b, &Mode::Projective, &with(None)).unwrap();
        assert_eq!(none.after.c.clone().unwrap(), none.before.c.clone().unwrap() - rat_int(1));
        for r in [one, half, none] {
            assert!(r.inequalities_hold);
            assert_eq!(r.equality_criterion_holds, Some(true));
        }
    }

    #[test]
    fn not_crepant() {
        let s = blowup();
        let b = InvariantDivisor::from_i64(&[1, 1, 1, 0]);
        assert!(matches!(check_contraction(&s, &b, &Mode::Projective, &OrbifoldDecomposition::empty()), Err(BirationalError::NotCrepant { ray: 3, .. })));
    }

    #[test]
    fn atiyah_flop() {
        let (y, y2) = conifold_resolutions();
        let s = FanSurgery::small(y, y2).unwrap();
        let mode = Mode::Relative { base_rays: conifold().rays().to_vec() };
        let b = full(4);
        let sigma = OrbifoldDecomposition::prime(&b, 0..4);
        let r = check_small(&s, &b, &mode, &sigma).unwrap();
        assert!(r.inequalities_hold);
        assert_eq!(r.after.c, Some(rat_int(0)));
        // Two parts.
        let grouped = OrbifoldDecomposition::trivial(vec![
            Part { b: rat_int(1), divisor: InvariantDivisor::from_i64(&[1, 1, 0, 0]) },
            Part { b: rat_int(1), divisor: InvariantDivisor::from_i64(&[0, 0, 1, 1]) },
        ]);
        let r = check_small(&s, &b, &mode, &grouped).unwrap();
        assert_eq!(r.before.c_fine, r.after.c_fine);
    }

    #[test]
    fn extractions_over_p2() {
        let b = full(3);
        let sigma = OrbifoldDecomposition::prime(&b, 0..3);
        for v in [[1, 1], [2, 1]] {
            let s = FanSurgery::extraction(p2(), &[to_ints(&v)]).unwrap();
            let r = check_extraction(&s, &b, &Mode::Projective, &sigma).unwrap();
            assert_eq!(r.discrepancies[0].1, rat_int(0));
            assert_eq!(r.after.c_fine, Some(rat_int(0)));
            assert!(r.inequalities_hold);
        }
    }

    #[test]
    fn not_an_lc_place() {
        let b = InvariantDivisor::from_i64(&[1, 1, 0]);
        let s = FanSurgery::extraction(p2(), &[to_ints(&[1, -1])]).unwrap();
        match check_extraction(&s, &b, &Mode::Projective, &OrbifoldDecomposition::empty()) {
            Err(BirationalError::NotLcPlace { discrepancy, .. }) => assert_eq!(discrepancy, "1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extraction_then_contraction_round_trip() {
        let b = full(3);
        let sigma = OrbifoldDecomposition::prime(&b, 0..3);
        let ext = FanSurgery::extraction(p2(), &[to_ints(&[1, 1])]).unwrap();
        let r = check_extraction(&ext, &b, &Mode::Projective, &sigma).unwrap();
        let back = FanSurgery::contraction(ext.source.clone(), p2()).unwrap();
        let r2 = check_contraction(&back, &r.boundary_after, &Mode::Projective, &r.decomposition_after).unwrap();
        assert_eq!(r2.after.c, r.before.c);
    }

    /// On a smooth cone `v = Σ c_i u_i` gives `a(v) = Σ c_i (1 − B_i)`.
    #[test]
    fn discrepancy_on_smooth_cones() {
        let f = p2();
        let b = InvariantDivisor::from_fractions(&[(1, 2), (1, 3), (1, 1)]);
        for v in [[3, 5], [1, 1], [7, 2]] {
            let (a, _) = log_discrepancy(&f, &b, &to_ints(&v)).unwrap();
            let direct = rat_int(v[0]) * (Rat::one() - b.coeff(0)) + rat_int(v[1]) * (Rat::one() - b.coeff(1));
            assert_eq!(a, direct);
        }
    }

    #[test]
    fn malformed_surgeries() {
        assert!(FanSurgery::contraction(p2(), blown_up_p2()).is_err());
        assert!(FanSurgery::small(p2(), p1xp1()).is_err());
        assert!(FanSurgery::extraction(p2(), &[to_ints(&[1, 0])]).is_err());
    }
}
