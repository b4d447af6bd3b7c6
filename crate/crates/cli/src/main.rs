use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tcsp::consistency::{self, Algorithm, Config, Outcome, RunReport, TraceLog, DEFAULT_MINUS_BUDGET};
use tcsp::formats::{self, FormatError};
use tcsp::scheduler::{optimum, Optimum};
use tcsp::search::{solve, Status};
use tcsp::{graph_to_stp, stp_to_graph, Tcsp, Weight};

/// Temporal constraint networks: filtering, solving, shortest paths and scheduling.
#[derive(Parser)]
#[command(name = "tcsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a consistency algorithm on a JSON network.
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Bdac3)]
        algorithm: AlgorithmArg,
        /// Revise-call cap; the minus variants default to 10000.
        #[arg(long)]
        budget: Option<u64>,
        /// Write one line per revise call to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide a JSON network and print a solution.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Shortest paths from and to one vertex of a distance graph.
    ShortestPaths {
        /// Edge list, or a JSON STP.
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Minimise the makespan of a JSON scheduling instance.
    Schedule {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Convert between JSON STPs and edge-list distance graphs.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Bdac3,
    Wbdac3,
    Bdac1,
    Pc1,
    Pc2,
    Bdac3Minus,
    Bdac1Minus,
    Pc2Minus,
}

impl AlgorithmArg {
    fn split(self) -> (Algorithm, bool) {
        match self {
            AlgorithmArg::Bdac3 => (Algorithm::Bdac3, false),
            AlgorithmArg::Wbdac3 => (Algorithm::Wbdac3, false),
            AlgorithmArg::Bdac1 => (Algorithm::Bdac1, false),
            AlgorithmArg::Pc1 => (Algorithm::Pc1, false),
            AlgorithmArg::Pc2 => (Algorithm::Pc2, false),
            AlgorithmArg::Bdac3Minus => (Algorithm::Bdac3, true),
            AlgorithmArg::Bdac1Minus => (Algorithm::Bdac1, true),
            AlgorithmArg::Pc2Minus => (Algorithm::Pc2, true),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Graph,
    Stp,
}

const EXIT_OK: u8 = 0;
const EXIT_INCONSISTENT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Error reported on stderr with exit code 2.
struct InputError(String);

impl InputError {
    fn format(path: &Path, e: FormatError) -> Self {
        InputError(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))
    }
}

struct Output {
    stdout: String,
    code: u8,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Tcsp, InputError> {
    formats::parse_network(&read(path)?).map_err(|e| InputError::format(path, e))
}

fn json_text(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
    s.push('\n');
    s
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Consistent => "consistent",
        Outcome::EmptyDomain => "inconsistent",
        Outcome::BudgetExhausted => "budget-exhausted",
    }
}

/// Human-readable reason for an `EmptyDomain` outcome.
fn empty_diagnostic(p: &Tcsp) -> String {
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            if p.entry(i, j).is_empty() {
                return format!("negative circuit detected: label of (X{i}, X{j}) became empty");
            }
        }
    }
    "negative circuit detected".to_string()
}

fn check(
    input: &Path,
    algorithm: AlgorithmArg,
    budget: Option<u64>,
    trace: Option<&Path>,
    format: Format,
) -> Result<Output, InputError> {
    let mut p = load_network(input)?;
    let (alg, minus) = algorithm.split();
    let cfg = if minus {
        Config::minus(budget.unwrap_or(DEFAULT_MINUS_BUDGET))
    } else {
        Config { budget, ..Config::default() }
    };
    let mut log = TraceLog::default();
    let report: RunReport = consistency::run(alg, &mut p, &cfg, &mut log);
    if let Some(path) = trace {
        let mut text = log.lines().join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write(path, &text)?;
    }
    let domains: Vec<String> = p.domains().iter().map(ToString::to_string).collect();
    let diagnostic = (report.outcome == Outcome::EmptyDomain).then(|| empty_diagnostic(&p));
    let stdout = match format {
        Format::Text => {
            let mut s = format!("outcome: {}\n", outcome_name(report.outcome));
            if let Some(d) = &diagnostic {
                s.push_str(&format!("diagnostic: {d}\n"));
            } else {
                s.push_str(&format!("domains: {}\n", domains.join(" ")));
            }
            s.push_str(&format!("revise calls: {}\ndomain updates: {}\n", report.revise_calls, report.domain_updates));
            s
        }
        Format::Json => json_text(json!({
            "algorithm": algorithm_label(algorithm),
            "outcome": outcome_name(report.outcome),
            "diagnostic": diagnostic,
            "domains": domains,
            "revise_calls": report.revise_calls,
            "domain_updates": report.domain_updates,
        })),
    };
    let code = match report.outcome {
        Outcome::Consistent => EXIT_OK,
        Outcome::EmptyDomain => EXIT_INCONSISTENT,
        Outcome::BudgetExhausted => EXIT_BUDGET,
    };
    Ok(Output { stdout, code })
}

fn algorithm_label(a: AlgorithmArg) -> String {
    a.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn solve_cmd(input: &Path, format: Format) -> Result<Output, InputError> {
    let p = load_network(input)?;
    let result = solve(&p);
    let values: Option<Vec<String>> =
        result.solution.as_ref().map(|a| a.values().iter().map(ToString::to_string).collect());
    let consistent = result.status == Status::Consistent;
    let stdout = match format {
        Format::Text => match &values {
            Some(v) => format!("solution: {}\n", v.join(" ")),
            None => "inconsistent\n".to_string(),
        },
        Format::Json => json_text(json!({
            "status": if consistent { "consistent" } else { "inconsistent" },
            "solution": values,
        })),
    };
    Ok(Output { stdout, code: if consistent { EXIT_OK } else { EXIT_INCONSISTENT } })
}

fn shortest_paths(input: &Path, source: usize, format: Format) -> Result<Output, InputError> {
    let text = read(input)?;
    let graph = if text.trim_start().starts_with('{') {
        let p = formats::parse_network(&text).map_err(|e| InputError::format(input, e))?;
        stp_to_graph(&p).map_err(|e| InputError(format!("{}: {e}", input.display())))?
    } else {
        formats::parse_edge_list(&text).map_err(|e| InputError::format(input, e))?
    };
    if source >= graph.size() {
        return Err(InputError(format!("source {source} out of range for {} vertices", graph.size())));
    }
    let mut p = graph_to_stp(&graph.swap_vertices(0, source));
    let report = consistency::bdac3(&mut p);
    if report.outcome != Outcome::Consistent {
        let stdout = match format {
            Format::Text => "negative circuit detected\n".to_string(),
            Format::Json => json_text(json!({ "outcome": "negative-circuit" })),
        };
        return Ok(Output { stdout, code: EXIT_INCONSISTENT });
    }
    // position of each original vertex after the swap
    let slot = |v: usize| {
        if v == source {
            0
        } else if v == 0 {
            source
        } else {
            v
        }
    };
    let mut from = Vec::new();
    let mut to = Vec::new();
    for v in (0..graph.size()).filter(|&v| v != source) {
        let domain = p.domain(slot(v));
        from.push(domain.upper_bound().map_or(Weight::PosInf, Weight::from_upper).to_string());
        to.push(domain.lower_bound().map_or(Weight::PosInf, Weight::from_lower).to_string());
    }
    let stdout = match format {
        Format::Text => format!("from X{source}: {}; to X{source}: {}\n", from.join(" "), to.join(" ")),
        Format::Json => json_text(json!({ "source": source, "from": from, "to": to })),
    };
    Ok(Output { stdout, code: EXIT_OK })
}

fn schedule(input: &Path, format: Format) -> Result<Output, InputError> {
    let inst = formats::parse_instance(&read(input)?).map_err(|e| InputError::format(input, e))?;
    let outcome = optimum(&inst).map_err(|e| InputError(format!("{}: {e}", input.display())))?;
    let stdout = match (&outcome, format) {
        (_, Format::Json) => formats::render_optimum(&outcome),
        (Optimum::Optimal(s), Format::Text) => {
            let starts: Vec<String> = s.start_times.iter().map(ToString::to_string).collect();
            format!("makespan: {}\nstarts: {}\nlatency: {}\n", s.makespan, starts.join(" "), s.latency)
        }
        (Optimum::Infeasible, Format::Text) => "infeasible\n".to_string(),
    };
    let code = if matches!(outcome, Optimum::Optimal(_)) { EXIT_OK } else { EXIT_INCONSISTENT };
    Ok(Output { stdout, code })
}

fn convert(input: &Path, to: Target, output: Option<&Path>) -> Result<Output, InputError> {
    let text = read(input)?;
    let is_json = text.trim_start().starts_with('{');
    let converted = match (to, is_json) {
        (Target::Graph, true) => {
            let p = formats::parse_network(&text).map_err(|e| InputError::format(input, e))?;
            let g = stp_to_graph(&p).map_err(|e| InputError(format!("{}: {e}", input.display())))?;
            formats::render_edge_list(&g)
        }
        (Target::Stp, false) => {
            let g = formats::parse_edge_list(&text).map_err(|e| InputError::format(input, e))?;
            formats::render_network(&graph_to_stp(&g))
        }
        (Target::Graph, false) => return Err(InputError(format!("{}: expected a JSON network", input.display()))),
        (Target::Stp, true) => return Err(InputError(format!("{}: expected an edge list", input.display()))),
    };
    match output {
        Some(path) => {
            write(path, &converted)?;
            Ok(Output { stdout: String::new(), code: EXIT_OK })
        }
        None => Ok(Output { stdout: converted, code: EXIT_OK }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { input, algorithm, budget, trace, format } => {
            check(input, *algorithm, *budget, trace.as_deref(), *format)
        }
        Command::Solve { input, format } => solve_cmd(input, *format),
        Command::ShortestPaths { input, source, format } => shortest_paths(input, *source, *format),
        Command::Schedule { input, format } => schedule(input, *format),
        Command::Convert { input, to, output } => convert(input, *to, output.as_deref()),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
