//! Text and JSON rendering of analysis reports.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::analysis::{CoreReport, CounterexampleReport, CoverReport, Outcome, QueryKind};
use crate::syntax::print_structure_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Cores(&'a CoreReport),
    Cover(&'a CoverReport),
    Counterexample(&'a CounterexampleReport),
}

pub fn render_report(report: Report<'_>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&to_json(report)).expect("plain JSON values");
            s.push('\n');
            s
        }
        Format::Text => to_text(report),
    }
}

fn query_name(q: QueryKind) -> &'static str {
    match q {
        QueryKind::Psc => "psc",
        QueryKind::Pce => "pce",
        QueryKind::Duality => "duality",
        QueryKind::Equiv => "equiv",
    }
}

pub fn to_json(report: Report<'_>) -> Value {
    match report {
        Report::Cores(r) => {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["query"] = json!("cores");
            v
        }
        Report::Cover(r) => {
            let mut v = serde_json::to_value(r).expect("serializable");
            v["query"] = json!("covers");
            v
        }
        Report::Counterexample(r) => {
            let mut obj = Map::new();
            obj.insert("query".into(), json!(query_name(r.query)));
            let params: Map<String, Value> =
                r.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            obj.insert("params".into(), Value::Object(params));
            obj.insert("outcome".into(), serde_json::to_value(r.outcome).expect("serializable"));
            if let Some(m) = &r.witness {
                obj.insert(
                    "witness_structure".into(),
                    json!(print_structure_file(m.vocab(), std::slice::from_ref(m))),
                );
            }
            if let Some(c) = &r.cover {
                obj.insert("cover".into(), json!(c));
            }
            if let Some(c) = &r.cores {
                obj.insert("cores".into(), json!(c));
            }
            obj.insert("elapsed_ms".into(), json!(r.elapsed_ms));
            obj.insert("search_complete".into(), json!(r.search_complete()));
            Value::Object(obj)
        }
    }
}

fn sets(xs: &[BTreeSet<String>]) -> String {
    if xs.is_empty() {
        return "none".to_string();
    }
    xs.iter()
        .map(|x| format!("{{{}}}", x.iter().cloned().collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn k_text(k: usize) -> String {
    if k == usize::MAX {
        "finite".to_string()
    } else {
        k.to_string()
    }
}

fn to_text(report: Report<'_>) -> String {
    let mut out = String::new();
    match report {
        Report::Cores(r) => {
            let _ = writeln!(out, "structure: {}", r.structure);
            let _ = writeln!(out, "theory: {{{}}}", r.theory.join("; "));
            let _ = writeln!(out, "k: {}", k_text(r.k));
            let _ = writeln!(out, "cores: {}", sets(&r.cores));
            let _ = writeln!(out, "minimal cores: {}", sets(&r.minimal_cores));
            if r.is_psc_witness_failure {
                let _ = writeln!(out, "no core of size at most {}", k_text(r.k));
            }
        }
        Report::Cover(r) => {
            let _ = writeln!(out, "structure: {}", r.structure);
            let _ = writeln!(out, "sentence: {}", r.sentence);
            let _ = writeln!(out, "k: {}", k_text(r.k));
            match &r.cover {
                Some(c) => {
                    let _ = writeln!(out, "cover: {}", sets(c));
                }
                None => {
                    let _ = writeln!(out, "no cover");
                }
            }
        }
        Report::Counterexample(r) => {
            let _ = writeln!(out, "query: {}", query_name(r.query));
            for (k, v) in &r.params {
                let _ = writeln!(out, "{k}: {v}");
            }
            match r.outcome {
                Outcome::Found => {
                    let _ = writeln!(out, "counterexample found");
                }
                Outcome::NoneUpTo { bound } => {
                    let _ = writeln!(out, "no counterexample up to size {bound} (search complete)");
                }
                Outcome::BudgetExhausted { completed_size } => {
                    let _ = writeln!(
                        out,
                        "time budget exhausted; sizes up to {completed_size} searched (search incomplete)"
                    );
                }
            }
            if let Some(m) = &r.witness {
                out.push_str(&print_structure_file(m.vocab(), std::slice::from_ref(m)));
            }
            if let Some(c) = &r.cover {
                let _ = writeln!(out, "cover: {}", sets(c));
            }
            if let Some(c) = &r.cores {
                let _ = writeln!(out, "cores: {}", sets(c));
            }
            if let Some(ms) = r.elapsed_ms {
                let _ = writeln!(out, "elapsed: {ms} ms");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none_report() -> CounterexampleReport {
        CounterexampleReport {
            query: QueryKind::Pce,
            params: vec![("k".into(), "3".into())],
            outcome: Outcome::NoneUpTo { bound: 4 },
            witness: None,
            cover: None,
            cores: None,
            elapsed_ms: None,
        }
    }

    #[test]
    fn none_up_to_text() {
        let text = render_report(Report::Counterexample(&none_report()), Format::Text);
        assert!(text.contains("no counterexample up to size 4 (search complete)\n"));
    }

    #[test]
    fn json_shape() {
        let v = to_json(Report::Counterexample(&none_report()));
        assert_eq!(v["query"], "pce");
        assert_eq!(v["outcome"]["kind"], "none_up_to");
        assert_eq!(v["outcome"]["bound"], 4);
        assert_eq!(v["elapsed_ms"], Value::Null);
        assert_eq!(v["search_complete"], true);
        assert!(v.get("witness_structure").is_none());
    }

    #[test]
    fn core_report_json() {
        let r = CoreReport {
            structure: "loop_pair".into(),
            theory: vec!["exists x. E(x,x)".into()],
            k: 2,
            cores: vec![["a".to_string(), "b".to_string()].into()],
            minimal_cores: vec![["a".to_string(), "b".to_string()].into()],
            is_psc_witness_failure: false,
        };
        let v = to_json(Report::Cores(&r));
        assert_eq!(v["query"], "cores");
        assert_eq!(v["minimal_cores"], json!([["a", "b"]]));
    }
}
