//! Versioned JSON input (`"schema": 1`) and its conversion to library types.
//!
//! Rationals travel as strings (`"3/4"`), integers as JSON numbers.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use toricomplex::complexity::{Mode, OrbifoldDecomposition, OrbifoldStructure, Part};
use toricomplex::divisor::InvariantDivisor;
use toricomplex::fan::Fan;
use toricomplex::num::{parse_rat, Int, Rat};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModeSpec {
    Projective,
    Local { cone: usize },
    Relative { base_rays: Vec<Vec<i64>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    pub b: String,
    pub support: BTreeMap<String, String>,
}

/// A pair with an optional decomposition. Every field beyond the fan is optional.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(default)]
    pub schema: Option<u32>,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    pub boundary: Option<Vec<String>>,
    #[serde(default)]
    pub nef_trace: Option<Vec<String>>,
    #[serde(default)]
    pub mode: Option<ModeSpec>,
    #[serde(default)]
    pub orbifold: Option<BTreeMap<String, u64>>,
    #[serde(default)]
    pub decomposition: Option<Vec<PartSpec>>,
    /// Ray to adjoin along (`adjoin`).
    #[serde(default)]
    pub ray: Option<usize>,
    /// Interior vector to blow up (`cone`).
    #[serde(default)]
    pub v: Option<Vec<i64>>,
}

/// `check` input: a pair on one side plus the other side's fan or the
/// vectors to extract.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgerySpec {
    #[serde(default)]
    pub schema: Option<u32>,
    pub pair: PairSpec,
    #[serde(default)]
    pub target: Option<FanSpec>,
    #[serde(default)]
    pub vectors: Option<Vec<Vec<i64>>>,
}

/// `hilbert` input: a cone by generators.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    #[serde(default)]
    pub schema: Option<u32>,
    pub rank: usize,
    pub generators: Vec<Vec<i64>>,
}

pub fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn check_schema(s: Option<u32>) -> Result<(), CliError> {
    match s {
        None | Some(SCHEMA) => Ok(()),
        Some(v) => Err(CliError::Parse(format!("unsupported schema version {v}, expected {SCHEMA}"))),
    }
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn rat(s: &str, what: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

fn ray_key(k: &str, nrays: usize, what: &str) -> Result<usize, CliError> {
    let r: usize = k.trim().parse().map_err(|_| CliError::Parse(format!("{what}: ray key {k:?} is not an index")))?;
    if r >= nrays {
        return Err(CliError::Invalid(format!("{what}: ray {r} out of range (fan has {nrays} rays)")));
    }
    Ok(r)
}

impl FanSpec {
    pub fn build(&self) -> Result<Fan, CliError> {
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.rank {
                return Err(CliError::Invalid(format!("ray {i} has {} coordinates, rank is {}", r.len(), self.rank)));
            }
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            if let Some(&r) = cone.iter().find(|&&r| r >= self.rays.len()) {
                return Err(CliError::Invalid(format!("max cone {c} uses ray {r}, fan has {} rays", self.rays.len())));
            }
        }
        let rays = self.rays.iter().map(|r| ints(r)).collect();
        Fan::checked(self.rank, rays, self.max_cones.clone()).map_err(|e| CliError::Invalid(format!("fan: {e}")))
    }
}

impl ModeSpec {
    pub fn build(&self) -> Mode {
        match self {
            ModeSpec::Projective => Mode::Projective,
            ModeSpec::Local { cone } => Mode::Local { cone: *cone },
            ModeSpec::Relative { base_rays } => Mode::Relative { base_rays: base_rays.iter().map(|r| ints(r)).collect() },
        }
    }
}

/// `--mode` override: `projective`, `local:<cone>` or `relative` (base rays
/// from the input file).
pub fn resolve_mode(flag: Option<&str>, file: Option<&ModeSpec>) -> Result<Mode, CliError> {
    let Some(flag) = flag else {
        return Ok(file.map(ModeSpec::build).unwrap_or(Mode::Projective));
    };
    match flag.split_once(':') {
        None if flag == "projective" => Ok(Mode::Projective),
        None if flag == "relative" => match file {
            Some(m @ ModeSpec::Relative { .. }) => Ok(m.build()),
            _ => Err(CliError::Invalid("--mode relative needs \"mode\": {\"kind\": \"relative\", \"base_rays\": ...} in the input".into())),
        },
        Some(("local", c)) => {
            let cone = c.parse().map_err(|_| CliError::Parse(format!("--mode local:{c}: cone index expected")))?;
            Ok(Mode::Local { cone })
        }
        _ => Err(CliError::Parse(format!("unknown mode {flag:?} (projective, local:<cone>, relative)"))),
    }
}

/// A fully converted pair input.
pub struct PairInput {
    pub fan: Fan,
    pub boundary: InvariantDivisor,
    pub nef_trace: Option<InvariantDivisor>,
    pub mode: Mode,
    pub decomposition: Option<OrbifoldDecomposition>,
    pub ray: Option<usize>,
    pub v: Option<Vec<Int>>,
}

fn divisor(coeffs: &[String], n: usize, what: &str) -> Result<InvariantDivisor, CliError> {
    if coeffs.len() != n {
        return Err(CliError::Invalid(format!("{what} has {} coefficients, fan has {n} rays", coeffs.len())));
    }
    let c = coeffs.iter().enumerate().map(|(i, s)| rat(s, &format!("{what}[{i}]"))).collect::<Result<_, _>>()?;
    Ok(InvariantDivisor::new(c))
}

impl PairSpec {
    pub fn build(&self, mode_flag: Option<&str>) -> Result<PairInput, CliError> {
        check_schema(self.schema)?;
        let fan = FanSpec { rank: self.rank, rays: self.rays.clone(), max_cones: self.max_cones.clone() }.build()?;
        let n = fan.num_rays();
        let boundary = match &self.boundary {
            Some(b) => divisor(b, n, "boundary")?,
            None => InvariantDivisor::zero(n),
        };
        let nef_trace = self.nef_trace.as_ref().map(|m| divisor(m, n, "nef_trace")).transpose()?;
        let mode = resolve_mode(mode_flag, self.mode.as_ref())?;
        let mut orbifold = OrbifoldStructure::trivial();
        for (k, &idx) in self.orbifold.iter().flatten() {
            if idx == 0 {
                return Err(CliError::Invalid(format!("orbifold index of ray {k} must be positive")));
            }
            orbifold.set(ray_key(k, n, "orbifold")?, idx);
        }
        let decomposition = match &self.decomposition {
            Some(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for (j, p) in parts.iter().enumerate() {
                    let what = format!("decomposition[{j}]");
                    let mut d = InvariantDivisor::zero(n);
                    for (k, c) in &p.support {
                        d.set_coeff(ray_key(k, n, &what)?, rat(c, &what)?);
                    }
                    out.push(Part { b: rat(&p.b, &what)?, divisor: d });
                }
                Some(OrbifoldDecomposition::new(orbifold, out))
            }
            None if !orbifold.is_trivial() => Some(OrbifoldDecomposition::new(orbifold, Vec::new())),
            None => None,
        };
        if let Some(r) = self.ray {
            if r >= n {
                return Err(CliError::Invalid(format!("ray {r} out of range (fan has {n} rays)")));
            }
        }
        if let Some(v) = &self.v {
            if v.len() != fan.rank() {
                return Err(CliError::Invalid(format!("v has {} coordinates, rank is {}", v.len(), fan.rank())));
            }
        }
        Ok(PairInput { fan, boundary, nef_trace, mode, decomposition, ray: self.ray, v: self.v.as_deref().map(ints) })
    }
}
