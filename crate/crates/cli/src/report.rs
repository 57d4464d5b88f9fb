//! Reports: a JSON body plus text lines, rendered in the requested format.
//! JSON uses sorted keys and string rationals so output is byte-stable.

use serde_json::{json, Map, Value};

use toricomplex::complexity::{OrbifoldDecomposition, Part};
use toricomplex::divisor::InvariantDivisor;
use toricomplex::fan::Fan;
use toricomplex::lattice::GroupElement;
use toricomplex::num::{format_rat, Int, Rat};

use crate::input::SCHEMA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub struct Report {
    pub command: String,
    /// The statement the run certifies, if any.
    pub claim: Option<&'static str>,
    /// Whether every certified property held on the instance.
    pub holds: bool,
    pub result: Value,
    pub text: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), claim: None, holds: true, result: Value::Object(Map::new()), text: Vec::new() }
    }

    pub fn claim(mut self, claim: &'static str) -> Self {
        self.claim = Some(claim);
        self
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.result.as_object_mut().expect("object body").insert(key.to_string(), v);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    /// Records a certified property; a failure makes the run exit with 2.
    pub fn assert(&mut self, name: &str, ok: bool) {
        self.holds &= ok;
        let checks = self.result.as_object_mut().unwrap().entry("checks").or_insert_with(|| Value::Object(Map::new()));
        checks.as_object_mut().unwrap().insert(name.to_string(), Value::Bool(ok));
        self.text.push(format!("check {name}: {}", if ok { "ok" } else { "FAILED" }));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "claim": self.claim,
                    "holds": self.holds,
                    "result": self.result,
                });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
            Format::Text => {
                let mut out = String::new();
                for l in &self.text {
                    out.push_str(l);
                    out.push('\n');
                }
                if let Some(c) = self.claim {
                    out.push_str(&format!("claim: {c}: {}\n", if self.holds { "holds" } else { "FAILED" }));
                }
                out
            }
        }
    }
}

pub fn rat(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

pub fn int(i: &Int) -> Value {
    // Integers beyond i64 stay exact as strings.
    match i64::try_from(i) {
        Ok(x) => json!(x),
        Err(_) => Value::String(i.to_string()),
    }
}

pub fn ints(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn int_rows(v: &[Vec<Int>]) -> Value {
    Value::Array(v.iter().map(|r| ints(r)).collect())
}

pub fn divisor(d: &InvariantDivisor) -> Value {
    Value::Array(d.coeffs().iter().map(rat).collect())
}

fn sparse(d: &InvariantDivisor) -> Value {
    Value::Object(d.support().into_iter().map(|r| (r.to_string(), rat(d.coeff(r)))).collect())
}

pub fn part(p: &Part) -> Value {
    json!({ "b": rat(&p.b), "support": sparse(&p.divisor) })
}

/// Same shape as the `orbifold` and `decomposition` input fields.
pub fn decomposition(s: &OrbifoldDecomposition) -> Value {
    let orb: Map<String, Value> = s.orbifold.iter().map(|(r, n)| (r.to_string(), json!(n))).collect();
    json!({ "orbifold": orb, "parts": s.parts.iter().map(part).collect::<Vec<_>>() })
}

pub fn fan(f: &Fan) -> Value {
    json!({
        "rank": f.rank(),
        "rays": int_rows(f.rays()),
        "max_cones": f.max_cones().iter().map(|c| c.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn group_element(g: &GroupElement) -> Value {
    json!({ "torsion": ints(&g.torsion), "free": ints(&g.free) })
}

pub fn fmt_ints(v: &[Int]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}
