//! Solution extraction and the disjunctive search.

use crate::consistency::{bdac3, is_bd_arc_consistent, wbdac3};
use crate::error::{Error, Result};
use crate::graph::{floyd_warshall, stp_to_graph};
use crate::interval::{Bound, IntervalUnion};
use crate::network::{disconnected_variables, is_connected, Assignment, Tcsp};
use crate::rat::Rat;

fn require_stp(p: &Tcsp) -> Result<()> {
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            if !p.entry(i, j).is_convex() {
                return Err(Error::NotAnStp { i, j });
            }
        }
    }
    Ok(())
}

/// Anchors variables that have no finite path to or from `X0`.
///
/// Each round gives the lowest disconnected variable the domain `[0,+inf)`
/// and reruns `bdac3`. Returns `false` as soon as a rerun empties a domain,
/// `true` once the network is connected.
pub fn connect_x0(p: &mut Tcsp) -> Result<bool> {
    require_stp(p)?;
    for _ in 0..=p.n() {
        let Some(&i) = disconnected_variables(p).first() else { return Ok(true) };
        p.set_constraint(0, i, "[0,+inf)".parse().expect("valid label"));
        if !bdac3(p).is_consistent() {
            return Ok(false);
        }
    }
    Ok(is_connected(p))
}

/// A member of a non-empty convex domain.
fn pick_value(domain: &IntervalUnion) -> Rat {
    let lo = domain.lower_bound().expect("non-empty domain");
    let hi = domain.upper_bound().expect("non-empty domain");
    match (lo, hi) {
        (Bound::Finite { value, closed: true }, _) => value.clone(),
        (Bound::Finite { value: a, .. }, Bound::Finite { value: b, .. }) => a.midpoint(b),
        (Bound::Finite { value: a, .. }, _) => a + &Rat::one(),
        (_, Bound::Finite { value: b, closed: true }) => b.clone(),
        (_, Bound::Finite { value: b, .. }) => b - &Rat::one(),
        _ => Rat::zero(),
    }
}

/// Narrows every binarized domain to a single value without backtracking.
///
/// The lowest-index non-singleton domain is fixed and `bdac3` is rerun,
/// until all domains are singletons. The input must be a connected,
/// bdArc-consistent STP whose domains are all non-empty.
pub fn backtrack_free(p: &Tcsp) -> Result<Tcsp> {
    require_stp(p)?;
    if (1..p.size()).any(|i| p.domain(i).is_empty()) {
        return Err(Error::PreconditionViolated("a binarized domain is empty".into()));
    }
    if !is_connected(p) {
        return Err(Error::PreconditionViolated("network is not connected to X0".into()));
    }
    if !is_bd_arc_consistent(p) {
        return Err(Error::PreconditionViolated("network is not bdArc-consistent".into()));
    }
    let mut p = p.clone();
    while let Some(i) = (1..p.size()).find(|&i| !p.domain(i).is_singleton()) {
        let a = pick_value(p.domain(i));
        p.set_constraint(0, i, IntervalUnion::point(a));
        if !bdac3(&mut p).is_consistent() {
            return Err(Error::PreconditionViolated(format!("fixing X{i} emptied a domain")));
        }
    }
    Ok(p)
}

/// Reads `(0, a1, ..., an)` off singleton domains.
pub fn extract_solution(p: &Tcsp) -> Result<Assignment> {
    let mut values = vec![Rat::zero()];
    for i in 1..p.size() {
        values.push(p.domain(i).singleton_value().ok_or(Error::NotSingleton(i))?.clone());
    }
    Ok(Assignment(values))
}

/// Disjunctive entry to branch on: fewest parts, then lowest pair.
fn branching_pair(p: &Tcsp) -> Option<(usize, usize)> {
    p.disjunctive_pairs().into_iter().min_by_key(|&(i, j)| (p.entry(i, j).len(), i, j))
}

/// Depth-first search over convex sublabels. Returns a connected
/// bdArc-consistent STP refinement when one exists.
fn search(mut p: Tcsp) -> Option<Tcsp> {
    if !wbdac3(&mut p).is_consistent() {
        return None;
    }
    if let Some((i, j)) = branching_pair(&p) {
        let parts = p.entry(i, j).parts().to_vec();
        return parts.into_iter().find_map(|part| {
            let mut q = p.clone();
            q.set_constraint(i, j, IntervalUnion::single(part));
            search(q)
        });
    }
    // the leaf went through the weak filter only
    if !bdac3(&mut p).is_consistent() || !connect_x0(&mut p).expect("leaf is an STP") {
        return None;
    }
    // bound propagation cannot see a circuit of weight exactly 0~, since
    // going round it only turns closed bounds open
    let g = stp_to_graph(&p).expect("leaf is an STP");
    floyd_warshall(&g).is_ok().then_some(p)
}

pub fn consistent(p: &Tcsp) -> bool {
    search(p.clone()).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Connected bdArc-consistent STP refinement reached by the search.
    pub witness: Option<Tcsp>,
    pub solution: Option<Assignment>,
}

pub fn solve(p: &Tcsp) -> SolveResult {
    match search(p.clone()) {
        None => SolveResult { status: Status::Inconsistent, witness: None, solution: None },
        Some(witness) => {
            let singletons = backtrack_free(&witness).expect("search leaves satisfy the backtrack-free precondition");
            let solution = extract_solution(&singletons).expect("all domains are singletons");
            SolveResult { status: Status::Consistent, witness: Some(witness), solution: Some(solution) }
        }
    }
}
