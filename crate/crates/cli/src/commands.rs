use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use toricomplex::adjunction::induced_decomposition;
use toricomplex::birational::{check_contraction, check_extraction, check_small, FanSurgery, Invariants, SurgeryReport};
use toricomplex::complexity::{local_complexity_cloc, minimize, ComplexityReport, MinimizeOptions, Mode, OrbifoldDecomposition, SCOPE_NOTE};
use toricomplex::conecox::{class_rank_step, cox_degrees, degree_zero_monoid, torsion_cover, verify_cone_iso};
use toricomplex::divisor::{class_group, InvariantDivisor};
use toricomplex::fan::{examples, Fan};
use toricomplex::lattice::{hilbert_basis, RationalCone};
use toricomplex::num::{format_rat, to_ints, Rat};
use toricomplex::pair::{build_pair, ToricPair};

use crate::input::{self, ConeSpec, PairInput, PairSpec, SurgerySpec};
use crate::report::{self, fmt_ints, Report};
use crate::{CliError, Options};

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn load_pair(text: &str, opts: &Options) -> Result<PairInput, CliError> {
    input::parse::<PairSpec>(text)?.build(opts.mode.as_deref())
}

fn validated(p: &PairInput) -> Result<ToricPair, CliError> {
    build_pair(p.fan.clone(), p.boundary.clone(), p.nef_trace.clone(), p.mode.clone())
        .map_err(|errs| CliError::Invalid(errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")))
}

fn mode_json(m: &Mode) -> Value {
    match m {
        Mode::Projective => json!({ "kind": "projective" }),
        Mode::Local { cone } => json!({ "kind": "local", "cone": cone }),
        Mode::Relative { base_rays } => json!({ "kind": "relative", "base_rays": report::int_rows(base_rays) }),
    }
}

pub fn validate(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let d = p.fan.validate();
    let pair = validated(&p)?;
    let mut r = Report::new("validate");
    r.set("fan", json!({ "complete": d.complete, "simplicial": d.simplicial, "smooth": d.smooth, "rays": p.fan.num_rays() }));
    r.set("mode", mode_json(&pair.mode));
    r.set("calabi_yau", json!(pair.calabi_yau));
    r.line(format!("fan: {} rays, rank {}, complete {}, simplicial {}, smooth {}", p.fan.num_rays(), p.fan.rank(), d.complete, d.simplicial, d.smooth));
    r.line(format!("pair valid in {} mode; B = {}", pair.mode, pair.boundary));
    r.line(format!("K + B + M ~_Q 0: {}", pair.calabi_yau));
    Ok(r)
}

pub fn classgroup(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let g = class_group(&p.fan);
    let n = p.fan.num_rays();
    let classes: Vec<_> = (0..n).map(|i| g.class_of(&to_ints(&unit(n, i)))).collect();
    let mut r = Report::new("classgroup");
    r.set("free_rank", json!(g.free_rank));
    r.set("torsion", report::ints(&g.torsion));
    r.set("classes", Value::Array(classes.iter().map(report::group_element).collect()));
    let tors: Vec<String> = g.torsion.iter().map(|d| format!("Z/{d}")).collect();
    r.line(format!("Cl = Z^{}{}", g.free_rank, if tors.is_empty() { String::new() } else { format!(" + {}", tors.join(" + ")) }));
    for (i, c) in classes.iter().enumerate() {
        r.line(format!("[D{i}] = free {} torsion {}", fmt_ints(&c.free), fmt_ints(&c.torsion)));
    }
    if let Mode::Local { cone } = p.mode {
        let l = local_complexity_cloc(&p.fan, cone).map_err(invalid)?;
        r.set("local_class_rank", json!(l.class_rank));
        r.line(format!("rank Cl(X_x) at cone {cone} = {}", l.class_rank));
    }
    Ok(r)
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| i64::from(i == j)).collect()
}

fn options(opts: &Options) -> MinimizeOptions {
    MinimizeOptions { orbifold_cap: opts.orbifold_cap, partition_limit: opts.partition_limit, ..Default::default() }
}

const CHAIN_CLAIM: &str = "c ≥ c̄ ≥ ĉ, and ĉ ≥ 0 with Σ = B prime-wise when ĉ = 0 on projective log Calabi–Yau pairs";

/// Checks shared by `complexity` and `minimize` on the minimizer's output.
fn assert_minimum(r: &mut Report, pair: &ToricPair, m: &ComplexityReport) {
    r.assert("chain", m.chain_holds());
    if pair.calabi_yau {
        r.assert("nonnegative", !m.c_orb.is_negative());
        if m.c_orb.is_zero() && matches!(pair.mode, Mode::Projective) {
            r.assert("zero_is_boundary", m.orbifold.is_prime_orbifold_exact(&pair.boundary));
        }
    }
}

fn minimum_json(m: &ComplexityReport) -> Value {
    json!({
        "c": report::rat(&m.c),
        "c_fine": report::rat(&m.c_fine),
        "c_orb": report::rat(&m.c_orb),
        "dim": m.dim,
        "class_rank": m.class_rank,
        "fine": report::decomposition(&m.fine),
        "fine_span": m.fine_span,
        "orbifold": report::decomposition(&m.orbifold),
        "orbifold_span": m.orbifold_span,
        "scope": SCOPE_NOTE,
    })
}

fn opt_rat(x: &Option<Rat>) -> Value {
    x.as_ref().map(report::rat).unwrap_or(Value::Null)
}

fn opt_str(x: &Option<Rat>) -> String {
    x.as_ref().map(format_rat).unwrap_or_else(|| "-".into())
}

fn invariants_json(i: &Invariants) -> Value {
    json!({ "c": opt_rat(&i.c), "c_fine": opt_rat(&i.c_fine), "c_orb": report::rat(&i.c_orb) })
}

fn invariants_text(i: &Invariants) -> String {
    format!("(c, c̄, ĉ) = ({}, {}, {})", opt_str(&i.c), opt_str(&i.c_fine), format_rat(&i.c_orb))
}

pub fn complexity(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let pair = validated(&p)?;
    let mut r = Report::new("complexity").claim(CHAIN_CLAIM);
    r.set("mode", mode_json(&pair.mode));
    if let Some(sigma) = &p.decomposition {
        let inv = Invariants::evaluate(&pair.fan, &pair.boundary, &pair.mode, sigma).map_err(invalid)?;
        r.line(format!("given Σ = {sigma}"));
        r.line(format!("given Σ: {}", invariants_text(&inv)));
        r.set("given", invariants_json(&inv));
        let chain = match (&inv.c, &inv.c_fine) {
            (Some(c), Some(f)) => c >= f && *f >= inv.c_orb,
            _ => true,
        };
        r.assert("given_chain", chain);
    }
    let m = minimize(&pair.fan, &pair.boundary, &pair.mode, &options(opts)).map_err(invalid)?;
    r.line(format!("(c, c̄, ĉ) = ({}, {}, {})", format_rat(&m.c), format_rat(&m.c_fine), format_rat(&m.c_orb)));
    r.line(format!("realizing Σ = {}", m.orbifold));
    r.set("minimum", minimum_json(&m));
    if let Mode::Local { cone } = pair.mode {
        let l = local_complexity_cloc(&pair.fan, cone).map_err(invalid)?;
        r.line(format!("c_loc at cone {cone} = {}", format_rat(&l.value)));
        r.set("c_loc", report::rat(&l.value));
        r.assert("local_zero", l.value.is_zero());
    }
    assert_minimum(&mut r, &pair, &m);
    Ok(r)
}

pub fn minimize_cmd(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let pair = validated(&p)?;
    let m = minimize(&pair.fan, &pair.boundary, &pair.mode, &options(opts)).map_err(invalid)?;
    let mut r = Report::new("minimize").claim(CHAIN_CLAIM);
    r.set("mode", mode_json(&pair.mode));
    r.set("minimum", minimum_json(&m));
    r.line(format!("mode {}, dim {}, rank Cl = {}", pair.mode, m.dim, m.class_rank));
    r.line(format!("c = {} via {}", format_rat(&m.c), m.prime));
    r.line(format!("c̄ = {} via {} (span {})", format_rat(&m.c_fine), m.fine, m.fine_span));
    r.line(format!("ĉ = {} via {} (span {})", format_rat(&m.c_orb), m.orbifold, m.orbifold_span));
    r.line(format!("search space: {SCOPE_NOTE}"));
    assert_minimum(&mut r, &pair, &m);
    Ok(r)
}

/// Prime decomposition of `B` over `E` and the primes meeting it.
fn default_adjunction_sigma(f: &Fan, b: &InvariantDivisor, e: usize) -> OrbifoldDecomposition {
    let near = f.neighbors(e);
    OrbifoldDecomposition::prime(b, b.support().into_iter().filter(|r| *r == e || near.contains(r)))
}

pub fn adjoin(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let pair = validated(&p)?;
    let e = p.ray.ok_or_else(|| CliError::Invalid("adjoin needs \"ray\": the index of E".into()))?;
    let sigma = p.decomposition.clone().unwrap_or_else(|| default_adjunction_sigma(&pair.fan, &pair.boundary, e));
    let res = induced_decomposition(&pair.fan, &pair.boundary, &pair.mode, &sigma, e).map_err(invalid)?;
    let mut r = Report::new("adjoin").claim("adjunction to a divisorial lc center does not increase orbifold complexity");
    r.set("ray", json!(e));
    r.set("star", report::fan(&res.star.fan));
    r.set("boundary_e", report::divisor(&res.boundary));
    r.set("normalized", report::decomposition(&res.normalized));
    r.set("rewritten", json!(res.rewritten));
    r.set("decomposition_e", report::decomposition(&res.decomposition));
    r.set("c_orb_input", report::rat(&res.c_hat_input));
    r.set("c_orb_x", report::rat(&res.c_hat_x));
    r.set("c_orb_e", report::rat(&res.c_hat_e));
    r.set("span_x", json!(res.span_x));
    r.set("span_e", json!(res.span_e));
    r.set("class_rank_e", json!(res.class_rank_e));
    r.set("s_set", json!(res.s_set));
    r.set(
        "walls",
        Value::Array(
            res.walls
                .iter()
                .map(|w| {
                    json!({
                        "star_ray": w.star_ray,
                        "ambient_ray": w.ambient_ray,
                        "cartier_index": report::int(&w.cartier_index),
                        "gamma": report::int(&w.gamma),
                        "case": format!("{:?}", w.case),
                        "m": w.m,
                    })
                })
                .collect(),
        ),
    );
    r.line(format!("E = D{e}; star fan has {} rays", res.star.fan.num_rays()));
    r.line(format!("B_E = {}", res.boundary));
    if res.rewritten {
        r.line(format!("Σ normalized to {}", res.normalized));
    }
    r.line(format!("Σ_E = {}", res.decomposition));
    for w in &res.walls {
        r.line(format!("  star ray {} over D{}: i_Q = {}, γ = {}, {:?}, m = {}", w.star_ray, w.ambient_ray, w.cartier_index, w.gamma, w.case, w.m));
    }
    r.line(format!("ĉ(X; Σ) = {}, ĉ(E; Σ_E) = {}", format_rat(&res.c_hat_x), format_rat(&res.c_hat_e)));
    r.assert("normalization", res.c_hat_x <= res.c_hat_input);
    r.assert("monotone", res.monotone());
    if res.equality() && res.full_span() && res.e_complete {
        let on_e = minimize(&res.star.fan, &res.boundary, &Mode::Projective, &options(opts)).map_err(invalid)?;
        if on_e.c_orb == res.c_hat_e {
            r.assert("equality_diagnostics", res.sigma_equals_boundary() && res.s_set.is_empty());
        }
    }
    Ok(r)
}

pub fn cone(text: &str, opts: &Options) -> Result<Report, CliError> {
    let p = load_pair(text, opts)?;
    let v = p.v.clone().ok_or_else(|| CliError::Invalid("cone needs \"v\": an interior lattice vector".into()))?;
    let (x, v, cover) = {
        let g = cox_degrees(&p.fan, &v).map_err(invalid)?;
        if g.group.torsion.is_empty() {
            (p.fan.clone(), v, None)
        } else if opts.torsion_cover {
            let (x, v, c) = torsion_cover(&p.fan, &v).map_err(invalid)?;
            (x, v, Some(c))
        } else {
            return Err(invalid(degree_zero_monoid(&g).expect_err("torsion")));
        }
    };
    let iso = verify_cone_iso(&x, &v).map_err(invalid)?;
    let (before, after) = class_rank_step(&x, &v).map_err(invalid)?;
    let monoid = degree_zero_monoid(&cox_degrees(&x, &v).map_err(invalid)?).map_err(invalid)?;
    let mut r = Report::new("cone").claim("the germ is the orbifold cone over (E, −E|E), and rank Cl grows by one");
    if let Some(c) = &cover {
        r.set("torsion_cover", json!({ "torsion": report::ints(&c.torsion), "generator": report::ints(&c.generator), "basis": report::int_rows(&c.basis), "index": report::int(&c.index) }));
        r.line(format!("Cl(Y_x) torsion {:?}: passed to the cover of index {}", c.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(), c.index));
    }
    r.set("v", report::ints(&v));
    r.set("star", report::fan(&iso.star.fan));
    r.set("polarization", report::divisor(&iso.polarization));
    r.set("target", report::fan(&iso.target));
    r.set("witness", report::int_rows(&iso.witness.row_vecs()));
    r.set("ray_matching", json!(iso.ray_matching));
    r.set("hilbert_source", report::int_rows(&iso.hilbert_source));
    r.set("hilbert_target", report::int_rows(&iso.hilbert_target));
    r.set("class_rank", json!({ "x": before, "y": after }));
    r.set("monoid", json!({ "generators": report::int_rows(&monoid.generators), "grading": report::ints(&monoid.grading) }));
    let e_name = if iso.star.fan.rank() == 1 {
        let d: Rat = iso.polarization.coeffs().iter().sum();
        format!("Cone(P1, O({}))", format_rat(&d))
    } else {
        format!("Cone(E, -E|E) with E of dimension {}", iso.star.fan.rank())
    };
    if iso.isomorphic {
        r.line(format!("iso verified: X_x ≅ {e_name}"));
    } else {
        r.line(format!("iso NOT verified for {e_name}"));
    }
    r.line(format!("witness T = {:?}", iso.witness.row_vecs().iter().map(|row| fmt_ints(row)).collect::<Vec<_>>()));
    r.line(format!("rank Cl(X_x) = {before}, rank Cl(Y_x) = {after}"));
    r.line(format!("V has {} generators, τ̃-degrees {}", monoid.generators.len(), fmt_ints(&monoid.grading)));
    r.assert("isomorphic", iso.isomorphic && iso.divisors_match);
    r.assert("rank_step", after == before + 1);
    Ok(r)
}

pub fn hilbert(text: &str, _opts: &Options) -> Result<Report, CliError> {
    let spec: ConeSpec = input::parse(text)?;
    input::check_schema(spec.schema)?;
    let c = RationalCone::new(spec.rank, spec.generators.iter().map(|g| input::ints(g)).collect()).map_err(invalid)?;
    let basis = hilbert_basis(&c).map_err(invalid)?;
    let dual = RationalCone::new(spec.rank, c.dual_generators().map_err(invalid)?).map_err(invalid)?;
    let dual_basis = hilbert_basis(&dual).map_err(invalid)?;
    let mut r = Report::new("hilbert");
    r.set("extremal_rays", report::int_rows(&c.extremal_rays()));
    r.set("hilbert_basis", report::int_rows(&basis));
    r.set("dual_hilbert_basis", report::int_rows(&dual_basis));
    r.line(format!("Hilbert basis ({}): {}", basis.len(), basis.iter().map(|b| fmt_ints(b)).collect::<Vec<_>>().join(" ")));
    r.line(format!("dual Hilbert basis ({}): {}", dual_basis.len(), dual_basis.iter().map(|b| fmt_ints(b)).collect::<Vec<_>>().join(" ")));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum CheckKind {
    /// Divisorial contraction: `pair` on the source, `target` fan.
    Contract,
    /// Small modification: `pair` on one side, `target` fan on the other.
    Small,
    /// Extraction of lc places: `pair` on the base, `vectors` to extract.
    Extract,
    /// Built-in instances of all three.
    Suite,
}

const CONTRACT_CLAIM: &str = "divisorial contractions do not increase c, c̄, ĉ; c is preserved iff E has weight one";
const SMALL_CLAIM: &str = "small modifications preserve c, c̄ and ĉ";
const EXTRACT_CLAIM: &str = "extracting lc places does not increase c̄ or ĉ";

fn surgery_json(rep: &SurgeryReport) -> Value {
    json!({
        "kind": format!("{:?}", rep.kind),
        "before": invariants_json(&rep.before),
        "after": invariants_json(&rep.after),
        "boundary_after": report::divisor(&rep.boundary_after),
        "decomposition_after": report::decomposition(&rep.decomposition_after),
        "dropped": rep.dropped.iter().map(report::part).collect::<Vec<_>>(),
        "exceptional_weight": report::rat(&rep.exceptional_weight),
        "discrepancies": rep.discrepancies.iter().map(|(v, a)| json!({ "v": report::ints(v), "a": report::rat(a) })).collect::<Vec<_>>(),
    })
}

fn surgery_text(r: &mut Report, rep: &SurgeryReport) {
    r.line(format!("{:?}", rep.kind));
    r.line(format!("  before: {}", invariants_text(&rep.before)));
    r.line(format!("  after:  {}", invariants_text(&rep.after)));
    r.line(format!("  Σ' = {}", rep.decomposition_after));
    if !rep.dropped.is_empty() {
        r.line(format!("  dropped weight {}", format_rat(&rep.exceptional_weight)));
    }
    for (v, a) in &rep.discrepancies {
        r.line(format!("  a({}) = {}", fmt_ints(v), format_rat(a)));
    }
}

fn assert_surgery(r: &mut Report, rep: &SurgeryReport) {
    let name = if rep.kind == toricomplex::birational::SurgeryKind::SmallModification { "equality" } else { "inequalities" };
    r.assert(name, rep.inequalities_hold);
    if let Some(ok) = rep.equality_criterion_holds {
        r.assert("equality_criterion", ok);
    }
}

fn run_surgery(kind: CheckKind, spec: &SurgerySpec, opts: &Options) -> Result<SurgeryReport, CliError> {
    input::check_schema(spec.schema)?;
    let p = spec.pair.build(opts.mode.as_deref())?;
    let sigma = p.decomposition.clone().unwrap_or_else(|| OrbifoldDecomposition::prime(&p.boundary, p.boundary.support()));
    let target = || {
        spec.target.as_ref().ok_or_else(|| CliError::Invalid("\"target\" fan required".into())).and_then(|t| t.build())
    };
    match kind {
        CheckKind::Contract => {
            let s = FanSurgery::contraction(p.fan, target()?).map_err(invalid)?;
            check_contraction(&s, &p.boundary, &p.mode, &sigma).map_err(invalid)
        }
        CheckKind::Small => {
            let s = FanSurgery::small(p.fan, target()?).map_err(invalid)?;
            check_small(&s, &p.boundary, &p.mode, &sigma).map_err(invalid)
        }
        CheckKind::Extract => {
            let vs = spec.vectors.as_ref().ok_or_else(|| CliError::Invalid("\"vectors\" required".into()))?;
            let s = FanSurgery::extraction(p.fan, &vs.iter().map(|v| input::ints(v)).collect::<Vec<_>>()).map_err(invalid)?;
            check_extraction(&s, &p.boundary, &p.mode, &sigma).map_err(invalid)
        }
        CheckKind::Suite => unreachable!("handled by the caller"),
    }
}

pub fn check(kind: CheckKind, text: Option<&str>, opts: &Options) -> Result<Report, CliError> {
    if kind == CheckKind::Suite {
        return suite();
    }
    let text = text.ok_or_else(|| CliError::Io("--input is required".into()))?;
    let spec: SurgerySpec = input::parse(text)?;
    let rep = run_surgery(kind, &spec, opts)?;
    let (name, claim) = match kind {
        CheckKind::Contract => ("check contract", CONTRACT_CLAIM),
        CheckKind::Small => ("check small", SMALL_CLAIM),
        _ => ("check extract", EXTRACT_CLAIM),
    };
    let mut r = Report::new(name).claim(claim);
    r.set("surgery", surgery_json(&rep));
    surgery_text(&mut r, &rep);
    assert_surgery(&mut r, &rep);
    Ok(r)
}

fn full(n: usize) -> InvariantDivisor {
    InvariantDivisor::new(vec![Rat::one(); n])
}

/// Blow-up of P2 contracted with E at weights 1, 1/2 and 0; the Atiyah flop;
/// extractions of (1,1) and (2,1) over P2 with the toric boundary.
fn suite() -> Result<Report, CliError> {
    let mut r = Report::new("check suite").claim("contraction, small modification and extraction inequalities");
    let mut cases = Vec::new();
    let s = FanSurgery::contraction(examples::blown_up_p2(), examples::p2()).map_err(invalid)?;
    for w in [Some(Rat::one()), Some(Rat::new(1.into(), 2.into())), None] {
        let mut b = full(4);
        b.set_coeff(3, w.clone().unwrap_or_else(Rat::zero));
        let sigma = OrbifoldDecomposition::prime(&b, 0..4);
        let label = format!("contract Bl_pt P2 -> P2, E weight {}", w.as_ref().map(format_rat).unwrap_or_else(|| "0".into()));
        cases.push((label, check_contraction(&s, &full(4), &Mode::Projective, &sigma).map_err(invalid)?));
    }
    let (y, y2) = examples::conifold_resolutions();
    let flop = FanSurgery::small(y, y2).map_err(invalid)?;
    let mode = Mode::Relative { base_rays: examples::conifold().rays().to_vec() };
    cases.push(("Atiyah flop".into(), check_small(&flop, &full(4), &mode, &OrbifoldDecomposition::prime(&full(4), 0..4)).map_err(invalid)?));
    for v in [[1, 1], [2, 1]] {
        let ext = FanSurgery::extraction(examples::p2(), &[to_ints(&v)]).map_err(invalid)?;
        let rep = check_extraction(&ext, &full(3), &Mode::Projective, &OrbifoldDecomposition::prime(&full(3), 0..3)).map_err(invalid)?;
        cases.push((format!("extract {v:?} over P2"), rep));
    }
    let mut out = Vec::new();
    for (label, rep) in &cases {
        r.line(format!("== {label}"));
        surgery_text(&mut r, rep);
        let ok = rep.inequalities_hold && rep.equality_criterion_holds != Some(false);
        r.assert(label, ok);
        out.push(json!({ "case": label, "surgery": surgery_json(rep) }));
    }
    r.set("cases", Value::Array(out));
    Ok(r)
}
