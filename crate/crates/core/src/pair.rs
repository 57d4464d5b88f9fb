//! Invariant (generalized) pairs `(X/Z, B + M)` with eager validation.

use num_traits::{One, Signed};

use crate::complexity::{ComplexityError, Mode, Setting};
use crate::divisor::{canonical_divisor, cartier_on_cone, global_linear_function, is_nef, InvariantDivisor};
use crate::fan::{Fan, FanIssue};
use crate::num::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("invalid fan: {0}")]
    InvalidFan(FanIssue),
    #[error("invalid mode: {0}")]
    Mode(ComplexityError),
    #[error("{what} has {got} coefficients, fan has {expected} rays")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("boundary coefficient of ray {0} is negative")]
    NotEffective(usize),
    #[error("boundary coefficient of ray {0} exceeds 1 (not log canonical)")]
    NotLogCanonical(usize),
    #[error("nef trace is not Q-Cartier on cone {0}")]
    NefTraceNotQCartier(usize),
    #[error("nef trace is not nef")]
    NotNef,
    #[error("K + B + M is not Q-Cartier on cone {0}")]
    NotQCartier(usize),
}

/// A validated invariant pair. Construct with [`build_pair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricPair {
    pub fan: Fan,
    pub boundary: InvariantDivisor,
    pub nef_trace: Option<InvariantDivisor>,
    pub mode: Mode,
    /// `K + B + M ∼_Q 0` over the base of the mode.
    pub calabi_yau: bool,
}

impl ToricPair {
    /// `K + B + M`.
    pub fn log_canonical_divisor(&self) -> InvariantDivisor {
        let kb = &canonical_divisor(&self.fan) + &self.boundary;
        match &self.nef_trace {
            Some(m) => &kb + m,
            None => kb,
        }
    }
}

/// Checks every invariant and reports all failures found. Fan and mode
/// problems stop validation early since later checks depend on them.
pub fn build_pair(
    fan: Fan,
    boundary: InvariantDivisor,
    nef_trace: Option<InvariantDivisor>,
    mode: Mode,
) -> Result<ToricPair, Vec<PairError>> {
    if let Some(issue) = fan.validate().issues.into_iter().next() {
        return Err(vec![PairError::InvalidFan(issue)]);
    }
    Setting::new(&fan, &mode).map_err(|e| vec![PairError::Mode(e)])?;
    let n = fan.num_rays();
    let mut errors = Vec::new();
    for (what, d) in std::iter::once(("boundary", &boundary)).chain(nef_trace.as_ref().map(|m| ("nef trace", m))) {
        if d.len() != n {
            errors.push(PairError::LengthMismatch { what, expected: n, got: d.len() });
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    for r in 0..n {
        if boundary.coeff(r).is_negative() {
            errors.push(PairError::NotEffective(r));
        } else if *boundary.coeff(r) > Rat::one() {
            errors.push(PairError::NotLogCanonical(r));
        }
    }
    let cones = region(&fan, &mode);
    if let Some(m) = &nef_trace {
        let bad: Vec<usize> = cones.iter().copied().filter(|&c| cartier_on_cone(&fan, &fan.max_cones()[c], m).is_none()).collect();
        errors.extend(bad.iter().map(|&c| PairError::NefTraceNotQCartier(c)));
        if bad.is_empty() && !matches!(mode, Mode::Local { .. }) && !is_nef(m, &fan).unwrap_or(false) {
            errors.push(PairError::NotNef);
        }
    }
    let mut pair = ToricPair { fan, boundary, nef_trace, mode, calabi_yau: false };
    let kbm = pair.log_canonical_divisor();
    for &c in &cones {
        if cartier_on_cone(&pair.fan, &pair.fan.max_cones()[c], &kbm).is_none() {
            errors.push(PairError::NotQCartier(c));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    pair.calabi_yau = is_log_cy(&pair);
    Ok(pair)
}

/// Maximal cones the mode looks at.
fn region(f: &Fan, mode: &Mode) -> Vec<usize> {
    match mode {
        Mode::Local { cone } => vec![*cone],
        _ => (0..f.max_cones().len()).collect(),
    }
}

/// `K + B + M ∼_Q 0` over the base: one linear function on the whole support
/// (projective, relative) or on `σ` (local).
pub fn is_log_cy(p: &ToricPair) -> bool {
    let kbm = p.log_canonical_divisor();
    match &p.mode {
        Mode::Local { cone } => cartier_on_cone(&p.fan, &p.fan.max_cones()[*cone], &kbm).is_some(),
        _ => global_linear_function(&kbm, &p.fan).is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::examples::*;

    #[test]
    fn p2_toric_boundary() {
        let p = build_pair(p2(), InvariantDivisor::from_i64(&[1, 1, 1]), None, Mode::Projective).unwrap();
        assert!(p.calabi_yau);
    }

    #[test]
    fn p2_two_lines_with_nef_trace() {
        let p = build_pair(p2(), InvariantDivisor::from_i64(&[1, 1, 0]), Some(InvariantDivisor::from_i64(&[0, 0, 1])), Mode::Projective).unwrap();
        assert!(p.calabi_yau);
        let q = build_pair(p2(), InvariantDivisor::from_i64(&[1, 1, 0]), None, Mode::Projective).unwrap();
        assert!(!q.calabi_yau);
    }

    #[test]
    fn conifold_single_prime() {
        let e = build_pair(conifold(), InvariantDivisor::from_i64(&[1, 0, 0, 0]), None, Mode::Local { cone: 0 }).unwrap_err();
        assert_eq!(e, vec![PairError::NotQCartier(0)]);
    }

    #[test]
    fn a1_germ_is_cy() {
        let p = build_pair(a1_cone(), InvariantDivisor::from_i64(&[1, 1]), None, Mode::Local { cone: 0 }).unwrap();
        assert!(p.calabi_yau);
    }

    #[test]
    fn collects_errors() {
        let b = InvariantDivisor::from_fractions(&[(-1, 2), (3, 2), (0, 1)]);
        let e = build_pair(p2(), b, Some(InvariantDivisor::from_i64(&[-1, 0, 0])), Mode::Projective).unwrap_err();
        assert_eq!(e, vec![PairError::NotEffective(0), PairError::NotLogCanonical(1), PairError::NotNef]);
    }

    #[test]
    fn bad_fan_and_mode() {
        let bad = Fan::from_i64(2, &[&[2, 0], &[0, 1]], &[&[0, 1]]);
        assert!(matches!(build_pair(bad, InvariantDivisor::zero(2), None, Mode::Projective).unwrap_err()[0], PairError::InvalidFan(_)));
        let e = build_pair(affine_plane(), InvariantDivisor::zero(2), None, Mode::Projective).unwrap_err();
        assert_eq!(e, vec![PairError::Mode(ComplexityError::NotComplete)]);
    }
}
