//! JSON report shapes. Every number is a string: rationals as `n/m`,
//! radii as `p^e`, p-adic values as literals.

use padic_core::dynamics::{
    ErgodicityReport, ErgodicityVerdict, IsometryCheck, IsometryWitness, NotErgodicReason, OrbitRecord, RhoOutcome,
};
use padic_core::groups::{AxiomReport, Counterexample};
use padic_core::padic::render_rational;
use padic_core::{PAdic, Prime, Radius};
use serde::Serialize;
use serde_json::Value;

pub fn radius(p: Prime, r: Radius) -> String {
    format!("{}^{}", p.get(), r.exp())
}

fn radius_or_zero(p: Prime, r: Option<Radius>) -> String {
    r.map_or_else(|| "0".to_string(), |r| radius(p, r))
}

#[derive(Serialize)]
pub struct Witness {
    pub x: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
}

impl Witness {
    fn pair(x: &PAdic, y: Option<&PAdic>) -> Self {
        Witness {
            x: x.render(),
            y: y.map(PAdic::render),
        }
    }
}

#[derive(Serialize)]
pub struct Failure {
    pub x: String,
    pub y: String,
    pub z: String,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
}

#[derive(Serialize)]
pub struct LawJson {
    pub law: &'static str,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

pub fn axioms(report: &AxiomReport) -> Vec<LawJson> {
    let cx = |c: &Counterexample| Failure {
        x: c.x.render(),
        y: c.y.render(),
        z: c.z.render(),
        lhs: c.lhs.as_ref().map(PAdic::render),
        rhs: c.rhs.as_ref().map(PAdic::render),
    };
    report
        .laws
        .iter()
        .map(|l| LawJson {
            law: l.law.name(),
            trials: l.trials,
            failures: l.failures.iter().map(cx).collect(),
        })
        .collect()
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
}

fn isometry_reason(w: &IsometryWitness) -> &'static str {
    match w {
        IsometryWitness::LeavesSphere { .. } => "LeavesSphere",
        IsometryWitness::Distorts { .. } => "Distorts",
        IsometryWitness::Evaluation { .. } => "Evaluation",
    }
}

fn isometry_witness(w: &IsometryWitness) -> Witness {
    match w {
        IsometryWitness::LeavesSphere { x, fx } => Witness::pair(x, Some(fx)),
        other => {
            let (x, y) = other.points();
            Witness::pair(x, y)
        }
    }
}

pub fn verify(check: &IsometryCheck) -> VerifyJson {
    match check {
        IsometryCheck::Pass { points, pairs } => VerifyJson {
            verdict: "pass",
            reason: None,
            witness: None,
            points: Some(*points),
            pairs: Some(*pairs),
        },
        IsometryCheck::Witness(w) => VerifyJson {
            verdict: "witness",
            reason: Some(isometry_reason(w)),
            witness: Some(isometry_witness(w)),
            points: None,
            pairs: None,
        },
    }
}

#[derive(Serialize)]
pub struct RhoJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

pub fn rho(p: Prime, outcome: &RhoOutcome) -> RhoJson {
    match outcome {
        RhoOutcome::Constant(r) => RhoJson {
            verdict: "Constant",
            rho: Some(radius(p, *r)),
            witness: None,
        },
        RhoOutcome::NonConstant { x, y, .. } => RhoJson {
            verdict: "NonConstant",
            rho: None,
            witness: Some(Witness::pair(x, Some(y))),
        },
        RhoOutcome::ZeroSomewhere { x, other } => RhoJson {
            verdict: "ZeroSomewhere",
            rho: None,
            witness: Some(Witness::pair(x, other.as_ref().map(|(y, _)| y))),
        },
    }
}

#[derive(Serialize)]
pub struct PeriodJson {
    pub length: usize,
    pub offset: usize,
}

#[derive(Serialize)]
pub struct OrbitJson {
    pub start: String,
    pub points: Vec<String>,
    pub displacements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodJson>,
}

pub fn orbit(p: Prime, o: &OrbitRecord) -> OrbitJson {
    OrbitJson {
        start: o.start.render(),
        points: o.points.iter().map(PAdic::render).collect(),
        displacements: o.displacements.iter().map(|d| radius_or_zero(p, *d)).collect(),
        period: o.period.map(|q| PeriodJson {
            length: q.length,
            offset: q.offset,
        }),
    }
}

#[derive(Serialize)]
pub struct PermJson {
    pub level: u32,
    pub image: Vec<usize>,
    pub cycles: Vec<usize>,
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub rho_equals_radius: bool,
}

pub fn verdict(p: Prime, report: &ErgodicityReport) -> VerdictJson {
    let mut out = VerdictJson {
        verdict: report.verdict.name(),
        reason: None,
        rho: report.rho.map(|r| radius(p, r)),
        criterion_value: report.criterion.as_ref().map(render_rational),
        level: None,
        cycles: None,
        witness: None,
        rho_equals_radius: report.rho_equals_radius,
    };
    match &report.verdict {
        ErgodicityVerdict::NotErgodic(NotErgodicReason::MeasureCriterion { .. }) => {
            out.reason = Some("MeasureCriterion");
        }
        ErgodicityVerdict::NotErgodic(NotErgodicReason::CycleSplit { level, .. }) => {
            out.reason = Some("CycleSplit");
            out.level = Some(*level);
            out.cycles = report.levels.last().map(|s| s.lengths.clone());
        }
        ErgodicityVerdict::ErgodicUpToLevel(k) => {
            out.level = Some(*k);
            out.cycles = report.levels.last().map(|s| s.lengths.clone());
        }
        ErgodicityVerdict::AssumptionViolated(o) => {
            let r = rho(p, o);
            out.reason = Some(r.verdict);
            out.witness = r.witness;
        }
        ErgodicityVerdict::NotIsometry(w) => {
            out.reason = Some(isometry_reason(w));
            out.witness = Some(isometry_witness(w));
        }
    }
    out
}

#[derive(Serialize)]
pub struct MeasureJson {
    pub haar: String,
    pub normalized: String,
}

/// Plain-text rendering of a JSON report: one `key: value` line per field,
/// nested objects indented, arrays of scalars on one line.
pub fn human(value: &Value) -> String {
    let mut out = String::new();
    write_human(value, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Null => Some("-".to_string()),
        _ => None,
    }
}

fn write_human(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => match v {
                        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
                            let items: Vec<String> = items.iter().filter_map(scalar).collect();
                            out.push_str(&format!("{pad}{k}: {}\n", items.join(" ")));
                        }
                        _ => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            write_human(v, indent + 1, out);
                        }
                    },
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_human(item, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
