//! Text formats: JSON networks, edge-list distance graphs and JSON
//! scheduling instances.
//!
//! All numbers are written as exact rationals (`92`, `7/2`); strict weights
//! carry a trailing `~`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::graph::RootedDistanceGraph;
use crate::interval::IntervalUnion;
use crate::network::{build_tcsp, Tcsp};
use crate::rat::Rat;
use crate::scheduler::{Optimum, SchedulingInstance, Task};
use crate::weight::Weight;

/// Input error with a 1-based position in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FormatError {
    fn at(line: usize, column: usize, message: impl fmt::Display) -> Self {
        FormatError { line, column, message: message.to_string() }
    }

    fn json(err: serde_json::Error) -> Self {
        FormatError::at(err.line().max(1), err.column().max(1), err)
    }
}

/// Line and column of byte offset `offset`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before, |nl| &before[nl + 1..]).chars().count() + 1;
    (line, column)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    variables: usize,
    constraints: Vec<ConstraintRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintRecord {
    i: usize,
    j: usize,
    label: String,
}

/// Reads `{"variables": n, "constraints": [{"i":0,"j":1,"label":"[1,2]"}]}`.
pub fn parse_network(text: &str) -> Result<Tcsp, FormatError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(FormatError::json)?;
    let mut constraints = Vec::new();
    let mut search_from = 0;
    for record in &file.constraints {
        // serde does not keep spans, so find the label literal in the text
        let literal = serde_json::to_string(&record.label).expect("string serializes");
        let offset = text[search_from..].find(&literal).map_or(search_from, |k| search_from + k);
        search_from = offset + 1;
        let (line, column) = position(text, offset);
        let label: IntervalUnion = record
            .label
            .parse()
            .map_err(|e: crate::interval::LabelParseError| FormatError::at(line, column + e.column, e.message))?;
        validate_record(file.variables, record, &label).map_err(|m| FormatError::at(line, column, m))?;
        constraints.push((record.i, record.j, label));
    }
    build_tcsp(file.variables, constraints).map_err(|e| FormatError::at(1, 1, e))
}

fn validate_record(n: usize, record: &ConstraintRecord, label: &IntervalUnion) -> Result<(), String> {
    build_tcsp(n, [(record.i, record.j, label.clone())]).map(|_| ()).map_err(|e| e.to_string())
}

/// Writes every explicitly constrained pair and every other pair whose
/// label is not universal, in ascending order.
pub fn render_network(p: &Tcsp) -> String {
    let file = NetworkFile {
        variables: p.n(),
        constraints: p
            .labelled_pairs()
            .into_iter()
            .map(|(i, j)| ConstraintRecord { i, j, label: p.entry(i, j).to_string() })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("network serializes");
    out.push('\n');
    out
}

/// Reads an edge list: optional `vertices N` header, then `i j weight`
/// lines; `#` starts a comment. Absent edges weigh `+inf`. Without a header
/// the graph spans up to the largest index mentioned.
pub fn parse_edge_list(text: &str) -> Result<RootedDistanceGraph, FormatError> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, usize, usize, Weight)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<(usize, &str)> = split_fields(content);
        if fields.is_empty() {
            continue;
        }
        let err = |col: usize, msg: String| FormatError::at(line_no, col, msg);
        if fields[0].1 == "vertices" {
            if declared.is_some() || !edges.is_empty() {
                return Err(err(fields[0].0, "the vertices header must come first and only once".into()));
            }
            let [_, (col, count)] = fields[..] else {
                return Err(err(fields[0].0, "expected `vertices N`".into()));
            };
            let count: usize = count.parse().map_err(|_| err(col, format!("invalid vertex count `{count}`")))?;
            if count == 0 {
                return Err(err(col, "a graph needs at least the root vertex".into()));
            }
            declared = Some(count);
            continue;
        }
        let [(ci, si), (cj, sj), (cw, sw)] = fields[..] else {
            return Err(err(fields[0].0, "expected `i j weight`".into()));
        };
        let i: usize = si.parse().map_err(|_| err(ci, format!("invalid vertex `{si}`")))?;
        let j: usize = sj.parse().map_err(|_| err(cj, format!("invalid vertex `{sj}`")))?;
        let w: Weight = sw.parse().map_err(|_| err(cw, format!("invalid weight `{sw}`")))?;
        if i == j {
            return Err(err(ci, "self loops are not allowed".into()));
        }
        if let Some(n) = declared {
            if let Some((col, v)) = [(ci, i), (cj, j)].into_iter().find(|&(_, v)| v >= n) {
                return Err(err(col, format!("vertex {v} out of range for {n} vertices")));
            }
        }
        if edges.iter().any(|e| e.1 == i && e.2 == j) {
            return Err(err(ci, format!("duplicate edge {i} {j}")));
        }
        edges.push((line_no, i, j, w));
    }
    let size = declared.unwrap_or_else(|| edges.iter().map(|e| e.1.max(e.2) + 1).max().unwrap_or(1));
    let mut g = RootedDistanceGraph::new(size - 1);
    for (_, i, j, w) in edges {
        g.set_weight(i, j, w);
    }
    Ok(g)
}

/// Whitespace-separated fields with their 1-based columns.
fn split_fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in line.char_indices().chain([(line.len(), ' ')]) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..idx]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn render_edge_list(g: &RootedDistanceGraph) -> String {
    let mut out = format!("vertices {}\n", g.size());
    for i in 0..g.size() {
        for j in 0..g.size() {
            if i != j && g.weight(i, j).is_finite() {
                out.push_str(&format!("{i} {j} {}\n", g.weight(i, j)));
            }
        }
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    tasks: Vec<TaskRecord>,
    #[serde(default)]
    precedences: Vec<(usize, usize)>,
    #[serde(default)]
    disjunctions: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskRecord {
    d: Value,
    #[serde(default)]
    release: Option<Value>,
    #[serde(default)]
    due: Option<Value>,
}

fn number(v: &Value, what: &str, task: usize) -> Result<Rat, FormatError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(FormatError::at(1, 1, format!("task {task}: `{what}` must be a number"))),
    };
    text.parse().map_err(|e| FormatError::at(1, 1, format!("task {task}: `{what}`: {e}")))
}

/// Reads `{"tasks":[{"d":3,"release":0,"due":10}], "precedences":[[1,2]],
/// "disjunctions":[[1,3]]}`. Numbers may also be given as rational strings.
pub fn parse_instance(text: &str) -> Result<SchedulingInstance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(FormatError::json)?;
    let mut tasks = Vec::new();
    for (k, t) in file.tasks.iter().enumerate() {
        let task = k + 1;
        tasks.push(Task {
            duration: number(&t.d, "d", task)?,
            release: t.release.as_ref().map(|v| number(v, "release", task)).transpose()?,
            due: t.due.as_ref().map(|v| number(v, "due", task)).transpose()?,
        });
    }
    let inst = SchedulingInstance { tasks, precedences: file.precedences, disjunctions: file.disjunctions };
    inst.validate().map_err(|e| FormatError::at(1, 1, e))?;
    Ok(inst)
}

/// `{"makespan": "9", "starts": ["0", "2", "5"], "latency": "0"}`, or
/// `{"status": "infeasible"}`.
pub fn render_optimum(outcome: &Optimum) -> String {
    let value = match outcome {
        Optimum::Optimal(s) => serde_json::json!({
            "makespan": s.makespan.to_string(),
            "starts": s.start_times.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "latency": s.latency.to_string(),
        }),
        Optimum::Infeasible => serde_json::json!({ "status": "infeasible" }),
    };
    let mut out = serde_json::to_string_pretty(&value).expect("json value serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_to_stp, stp_to_graph};

    const CHAIN: &str = r#"{
  "variables": 4,
  "constraints": [
    {"i": 0, "j": 1, "label": "[10,20]"},
    {"i": 0, "j": 4, "label": "[60,70]"},
    {"i": 1, "j": 2, "label": "[30,40]"},
    {"i": 2, "j": 3, "label": "[-20,-10]"},
    {"i": 3, "j": 4, "label": "[40,50]"}
  ]
}"#;

    #[test]
    fn network_round_trip() {
        let p = parse_network(CHAIN).unwrap();
        assert_eq!(p.domain(1).to_string(), "[10,20]");
        let text = render_network(&p);
        assert_eq!(parse_network(&text).unwrap(), p);
        assert_eq!(render_network(&parse_network(&text).unwrap()), text);
    }

    #[test]
    fn network_errors_carry_positions() {
        let bad = CHAIN.replace("[30,40]", "[30,,40]");
        let e = parse_network(&bad).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.column > 20, "{e}");
        let e = parse_network("{\"variables\": 2,\n \"constraints\": [}").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_network(&CHAIN.replace("\"j\": 4", "\"j\": 9")).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("out of range"));
        let e = parse_network(&CHAIN.replace("[40,50]", "{}")).unwrap_err();
        assert_eq!(e.line, 8);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = stp_to_graph(&parse_network(CHAIN).unwrap()).unwrap();
        let text = render_edge_list(&g);
        assert!(text.starts_with("vertices 5\n0 1 20\n0 4 70\n1 0 -10\n"));
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_details() {
        let g = parse_edge_list("# two vertices\n0 1 3~   # strict\n\n1 0 -1/2\n").unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.weight(0, 1), &Weight::strict(3));
        assert_eq!(graph_to_stp(&g).entry(0, 1).to_string(), "[1/2,3)");
        assert_eq!(parse_edge_list("vertices 4\n").unwrap().size(), 4);
        let e = parse_edge_list("vertices 3\n0 1 2\n1 5 2\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let e = parse_edge_list("0 1 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert!(parse_edge_list("0 1 2\n0 1 3\n").is_err());
        assert!(parse_edge_list("1 1 0\n").is_err());
        assert!(parse_edge_list("0 1\n").is_err());
    }

    #[test]
    fn instances() {
        let inst = parse_instance(
            r#"{"tasks":[{"d":3,"release":0,"due":10},{"d":"5/2"}],"precedences":[[1,2]],"disjunctions":[]}"#,
        )
        .unwrap();
        assert_eq!(inst.tasks[1].duration, Rat::new(5, 2));
        assert_eq!(inst.tasks[0].due, Some(Rat::from_int(10)));
        assert_eq!(inst.precedences, vec![(1, 2)]);
        assert!(parse_instance(r#"{"tasks":[{"d":0}]}"#).is_err());
        assert!(parse_instance(r#"{"tasks":[{"d":1}],"precedences":[[1,2]]}"#).is_err());
        assert!(parse_instance(r#"{"tasks":[{"d":true}]}"#).is_err());
    }

    #[test]
    fn optimum_rendering() {
        let text = render_optimum(&Optimum::Infeasible);
        assert!(text.contains("infeasible"));
    }
}
