//! Text and JSON renderings of command results.
//!
//! JSON reports name sets by canonical key and list everything in canonical
//! order, so identical inputs give byte-identical output.

use std::fmt::Write as _;

use connectif::interval::{ChainWitness, WitnessDefect};
use connectif::sheaf::{FunctorialityViolation, MatchingFamily, Presheaf, SheafVerdict};
use connectif::site::{AxiomReport, AxiomViolation, CoveringTable, SamplingMode, Sieve};
use connectif::structure::{StructureReport, StructureViolation};
use connectif::{ConnectivityStructure, GroundSet, SubsetMask};
use serde_json::{json, Value};

use crate::Format;

pub(crate) struct Report {
    text: String,
    json: Value,
    raw_json: Option<String>,
}

impl Report {
    pub(crate) fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json if self.raw_json.is_some() => self.raw_json.clone().unwrap_or_default(),
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                out.push('\n');
                out
            }
        }
    }

    pub(crate) fn validation(ground: &GroundSet, listed: usize, report: &StructureReport) -> Report {
        let mut text = String::new();
        if report.is_ok() {
            let _ = writeln!(text, "ok: valid connectivity structure");
        } else {
            for v in &report.violations {
                let _ = writeln!(text, "violation: {}", describe_violation(ground, v));
            }
            let _ = writeln!(text, "invalid: {} violation(s)", report.violations.len());
        }
        let violations: Vec<Value> = report
            .violations
            .iter()
            .map(|v| match v {
                StructureViolation::MissingEmpty => json!({ "kind": "missing-empty" }),
                StructureViolation::MissingUnion { left, right, union } => json!({
                    "kind": "missing-union",
                    "left": ground.key(*left),
                    "right": ground.key(*right),
                    "union": ground.key(*union),
                }),
            })
            .collect();
        let json = json!({
            "command": "validate",
            "ok": report.is_ok(),
            "listed": listed,
            "violations": violations,
        });
        Report {
            text,
            json,
            raw_json: None,
        }
    }

    /// The generated family as a canonical structure-mode space file.
    pub(crate) fn generated(k: &ConnectivityStructure) -> Report {
        let file = connectif::io::SpaceFile::from_structure(k);
        let text = lines(k.ground(), k.family());
        let raw = file.to_json();
        let json = serde_json::from_str(&raw).expect("space file is JSON");
        Report {
            text,
            json,
            raw_json: Some(raw),
        }
    }

    pub(crate) fn induced(k: &ConnectivityStructure, base: SubsetMask, induced: &ConnectivityStructure) -> Report {
        let g = k.ground();
        let json = json!({
            "command": "induced",
            "base": g.key(base),
            "family": keys(g, induced.family()),
        });
        Report {
            text: lines(g, induced.family()),
            json,
            raw_json: None,
        }
    }

    pub(crate) fn sieves(
        k: &ConnectivityStructure,
        base: SubsetMask,
        covering_only: bool,
        sieves: &[(Sieve, bool)],
    ) -> Report {
        let g = k.ground();
        let mut text = String::new();
        let what = if covering_only { "covering sieve(s)" } else { "sieve(s)" };
        let _ = writeln!(text, "{} {what} on {}", sieves.len(), g.show(base));
        for (s, covers) in sieves {
            let mark = if *covers { "  covering" } else { "" };
            let _ = writeln!(text, "  {}{mark}", show_sieve(g, s));
        }
        let listed: Vec<Value> = sieves
            .iter()
            .map(|(s, covers)| json!({ "members": keys(g, s.members()), "covering": covers }))
            .collect();
        let json = json!({
            "command": "sieves",
            "base": g.key(base),
            "covering_only": covering_only,
            "count": sieves.len(),
            "sieves": listed,
        });
        Report {
            text,
            json,
            raw_json: None,
        }
    }

    pub(crate) fn jtable(k: &ConnectivityStructure, table: &CoveringTable) -> Report {
        let g = k.ground();
        let width = k
            .family()
            .iter()
            .map(|&a| g.show(a).chars().count())
            .max()
            .unwrap_or(1)
            .max(6);
        let mut text = String::new();
        let _ = writeln!(text, "{:<width$}  |J|", "object");
        let mut objects = Vec::new();
        for (a, covers) in table.iter() {
            let shown = g.show(a);
            let pad = width - shown.chars().count();
            let _ = writeln!(text, "{shown}{}  {}", " ".repeat(pad), covers.len());
            if covers.len() > 1 {
                for c in covers {
                    let _ = writeln!(text, "{}    {}", " ".repeat(width), show_sieve(g, c));
                }
            }
            let sieves: Vec<Value> = covers.iter().map(|c| json!(keys(g, c.members()))).collect();
            objects.push(json!({
                "object": g.key(a),
                "size": covers.len(),
                "sieves": sieves,
            }));
        }
        let json = json!({ "command": "jtable", "objects": objects });
        Report {
            text,
            json,
            raw_json: None,
        }
    }

    pub(crate) fn irreducibles(k: &ConnectivityStructure, irreducibles: &[SubsetMask]) -> Report {
        let g = k.ground();
        let json = json!({ "command": "irreducibles", "irreducibles": keys(g, irreducibles) });
        Report {
            text: lines(g, irreducibles),
            json,
            raw_json: None,
        }
    }

    pub(crate) fn axioms(k: &ConnectivityStructure, mode: SamplingMode, reports: &[AxiomReport]) -> Report {
        let g = k.ground();
        let (mode_text, mode_json) = match mode {
            SamplingMode::Exhaustive => ("exhaustive".to_string(), json!({ "kind": "exhaustive" })),
            SamplingMode::Randomized { samples, seed } => (
                format!("randomized, {samples} samples, seed {seed}"),
                json!({ "kind": "randomized", "samples": samples, "seed": seed }),
            ),
        };
        let mut text = String::new();
        let mut listed = Vec::new();
        for r in reports {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                text,
                "{verdict} {}: {} instance(s), {} violation(s) ({mode_text})",
                r.axiom.name(),
                r.instances,
                r.violations.len()
            );
            for v in &r.violations {
                let _ = writeln!(text, "  {}", describe_axiom_violation(g, v));
            }
            let violations: Vec<Value> = r.violations.iter().map(|v| axiom_violation_json(g, v)).collect();
            listed.push(json!({
                "axiom": r.axiom.name(),
                "passed": r.passed(),
                "instances": r.instances,
                "violations": violations,
            }));
        }
        let json = json!({ "command": "axioms", "mode": mode_json, "reports": listed });
        Report {
            text,
            json,
            raw_json: None,
        }
    }

    pub(crate) fn sheaf(k: &ConnectivityStructure, f: &Presheaf, verdict: &SheafVerdict) -> Report {
        let g = k.ground();
        let mut text = String::new();
        let counterexample = match &verdict.counterexample {
            None => {
                let _ = writeln!(
                    text,
                    "SHEAF: every matching family on every covering sieve glues uniquely ({} checked)",
                    verdict.families_checked
                );
                Value::Null
            }
            Some(cx) => {
                let _ = writeln!(text, "NOT A SHEAF");
                let _ = writeln!(text, "  object: {}", g.show(cx.object));
                let _ = writeln!(text, "  covering sieve: {}", show_sieve(g, &cx.sieve));
                let _ = writeln!(text, "  matching family: {}", show_family(g, f, &cx.family));
                let _ = writeln!(text, "  amalgamations: {}", cx.amalgamations);
                json!({
                    "object": g.key(cx.object),
                    "sieve": keys(g, cx.sieve.members()),
                    "family": family_json(g, f, &cx.family),
                    "amalgamations": cx.amalgamations,
                })
            }
        };
        let json = json!({
            "command": "sheaf",
            "sheaf": verdict.is_sheaf(),
            "families_checked": verdict.families_checked,
            "counterexample": counterexample,
        });
        Report {
            text,
            json,
            raw_json: None,
        }
    }

    pub(crate) fn witness(w: &ChainWitness, verified: bool, file: String) -> Report {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "target {}, epsilon {}: {} piece(s)",
            w.target,
            w.epsilon,
            w.pieces.len()
        );
        for p in &w.pieces {
            let _ = writeln!(text, "  {p}");
        }
        let _ = writeln!(text, "{}", if verified { "verified" } else { "NOT verified" });
        let json = serde_json::from_str(&file).expect("witness file is JSON");
        Report {
            text,
            json,
            raw_json: Some(file),
        }
    }

    pub(crate) fn witness_check(w: &ChainWitness, defect: Option<WitnessDefect>) -> Report {
        let text = match &defect {
            None => format!(
                "VALID: {} piece(s) cover {} with length < {}\n",
                w.pieces.len(),
                w.target,
                w.epsilon
            ),
            Some(d) => format!("INVALID: {d}\n"),
        };
        let json = json!({
            "command": "interval-witness",
            "valid": defect.is_none(),
            "defect": defect.map(|d| d.to_string()),
        });
        Report {
            text,
            json,
            raw_json: None,
        }
    }
}

fn keys(g: &GroundSet, sets: &[SubsetMask]) -> Vec<String> {
    sets.iter().map(|&m| g.key(m)).collect()
}

fn lines(g: &GroundSet, sets: &[SubsetMask]) -> String {
    sets.iter().map(|&m| format!("{}\n", g.show(m))).collect()
}

fn show_sieve(g: &GroundSet, s: &Sieve) -> String {
    let members: Vec<String> = s.members().iter().map(|&m| g.show(m)).collect();
    format!("{{{}}}", members.join(", "))
}

fn show_family(g: &GroundSet, f: &Presheaf, m: &MatchingFamily) -> String {
    let parts: Vec<String> = m
        .assignment
        .iter()
        .map(|&(member, s)| format!("{} ↦ {:?}", g.show(member), f.sections(member)[s]))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn family_json(g: &GroundSet, f: &Presheaf, m: &MatchingFamily) -> Value {
    let entries: Vec<Value> = m
        .assignment
        .iter()
        .map(|&(member, s)| json!({ "member": g.key(member), "section": f.sections(member)[s] }))
        .collect();
    Value::Array(entries)
}

pub(crate) fn describe_violation(g: &GroundSet, v: &StructureViolation) -> String {
    match v {
        StructureViolation::MissingEmpty => "∅ is missing".to_string(),
        StructureViolation::MissingUnion { left, right, union } => {
            format!("{} ∪ {} = {} is missing", g.show(*left), g.show(*right), g.show(*union))
        }
    }
}

pub(crate) fn describe_functoriality(k: &ConnectivityStructure, f: &Presheaf, v: &FunctorialityViolation) -> String {
    let g = k.ground();
    let path = |p: &[SubsetMask]| p.iter().map(|&m| g.show(m)).collect::<Vec<_>>().join(" → ");
    format!(
        "section {:?} over {} restricts to {:?} along {} but to {:?} along {}",
        f.sections(v.upper)[v.section],
        g.show(v.upper),
        f.sections(v.lower)[v.first_image],
        path(&v.first_path),
        f.sections(v.lower)[v.second_image],
        path(&v.second_path),
    )
}

fn describe_axiom_violation(g: &GroundSet, v: &AxiomViolation) -> String {
    match v {
        AxiomViolation::Maximality { object } => format!("maximal sieve on {} does not cover", g.show(*object)),
        AxiomViolation::Stability { object, cover, to } => format!(
            "cover {} of {} restricted to {} does not cover",
            show_sieve(g, cover),
            g.show(*object),
            g.show(*to)
        ),
        AxiomViolation::Transitivity { object, cover, sieve } => format!(
            "sieve {} on {} is locally covering along {} but does not cover",
            show_sieve(g, sieve),
            g.show(*object),
            show_sieve(g, cover)
        ),
    }
}

fn axiom_violation_json(g: &GroundSet, v: &AxiomViolation) -> Value {
    match v {
        AxiomViolation::Maximality { object } => json!({ "object": g.key(*object) }),
        AxiomViolation::Stability { object, cover, to } => json!({
            "object": g.key(*object),
            "cover": keys(g, cover.members()),
            "restricted_to": g.key(*to),
        }),
        AxiomViolation::Transitivity { object, cover, sieve } => json!({
            "object": g.key(*object),
            "cover": keys(g, cover.members()),
            "sieve": keys(g, sieve.members()),
        }),
    }
}
