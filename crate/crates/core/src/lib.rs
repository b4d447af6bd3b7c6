//! Temporal constraint networks over exact rational time.
//!
//! The crate covers the interval-union label algebra, distance graphs with
//! strict weights, binarized-domain arc-consistency (`bdac3` and friends),
//! path-consistency, backtrack-free solution extraction, a disjunctive
//! solver and a makespan-minimising job-shop scheduler.

pub mod consistency;
pub mod error;
pub mod formats;
pub mod graph;
pub mod interval;
pub mod network;
pub mod rat;
pub mod scheduler;
pub mod search;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{
    bellman_ford, floyd_warshall, graph_to_stp, reachable, stp_to_graph, NegativeCircuit, RootedDistanceGraph,
};
pub use interval::{Bound, Interval, IntervalUnion, LabelParseError};
pub use network::{build_tcsp, check_solution, path_bounds, Assignment, PathBounds, Tcsp};
pub use rat::Rat;
pub use weight::{w_add, w_less, Weight};
