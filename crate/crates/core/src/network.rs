//! Matrix representation of a temporal constraint network.
//!
//! Variable `X0` is the origin of the world; the entry `(0, i)` is the
//! binarized domain of `Xi`. The matrix always satisfies `m[i][i] = {0}` and
//! `m[j][i] = converse(m[i][j])`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{stp_to_graph, RootedDistanceGraph};
use crate::interval::{Interval, IntervalUnion};
use crate::rat::Rat;
use crate::weight::{w_add, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tcsp {
    size: usize,
    m: Vec<IntervalUnion>,
    /// Symmetric mask of explicitly constrained pairs.
    constrained: Vec<bool>,
}

impl Tcsp {
    /// Network over `X0..Xn` with no constraints.
    pub fn new(n: usize) -> Tcsp {
        let size = n + 1;
        let mut m = vec![IntervalUnion::universal(); size * size];
        for i in 0..size {
            m[i * size + i] = IntervalUnion::point(0);
        }
        Tcsp { size, m, constrained: vec![false; size * size] }
    }

    /// Index of the last variable.
    pub fn n(&self) -> usize {
        self.size - 1
    }

    /// Number of variables including `X0`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &IntervalUnion {
        &self.m[i * self.size + j]
    }

    /// Binarized domain of `Xi`.
    pub fn domain(&self, i: usize) -> &IntervalUnion {
        self.entry(0, i)
    }

    pub fn domains(&self) -> Vec<IntervalUnion> {
        (1..self.size).map(|i| self.domain(i).clone()).collect()
    }

    /// Overwrites `m[i][j]` and its mirror. The constraint mask is untouched.
    pub fn set(&mut self, i: usize, j: usize, label: IntervalUnion) {
        assert!(i != j, "diagonal entries are fixed to {{0}}");
        self.m[j * self.size + i] = label.converse();
        self.m[i * self.size + j] = label;
    }

    /// Overwrites `m[i][j]` and records an explicit constraint on the pair.
    pub fn set_constraint(&mut self, i: usize, j: usize, label: IntervalUnion) {
        self.set(i, j, label);
        self.constrained[i * self.size + j] = true;
        self.constrained[j * self.size + i] = true;
    }

    /// Adds `(Xj - Xi) ∈ label`, intersecting with any constraint already
    /// present on the pair.
    pub fn constrain(&mut self, i: usize, j: usize, label: &IntervalUnion) {
        let merged = if self.is_constrained(i, j) { self.entry(i, j).intersect(label) } else { label.clone() };
        self.set_constraint(i, j, merged);
    }

    pub fn is_constrained(&self, i: usize, j: usize) -> bool {
        self.constrained[i * self.size + j]
    }

    /// Explicitly constrained pairs `(i, j)` with `i < j`, ascending.
    pub fn constraints(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let size = self.size;
        (0..size).flat_map(move |i| (i + 1..size).map(move |j| (i, j))).filter(|&(i, j)| self.is_constrained(i, j))
    }

    /// Entries `(i, j)`, `i < j`, whose label has more than one convex part.
    pub fn disjunctive_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in i + 1..self.size {
                if self.entry(i, j).len() > 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_empty_entry(&self) -> bool {
        self.m.iter().any(IntervalUnion::is_empty)
    }

    /// True iff every label is convex.
    pub fn is_stp(&self) -> bool {
        self.m.iter().all(IntervalUnion::is_convex)
    }

    /// The STP of entrywise convex closures.
    pub fn convex_closure(&self) -> Tcsp {
        Tcsp {
            size: self.size,
            m: self.m.iter().map(IntervalUnion::convex_closure).collect(),
            constrained: self.constrained.clone(),
        }
    }

    /// Pairs `(i, j)`, `i < j`, that carry either an explicit constraint or
    /// a non-universal label. Used when writing a network back out.
    pub fn labelled_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.size {
            for j in i + 1..self.size {
                if self.is_constrained(i, j) || !self.entry(i, j).is_universal() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// True iff every entry of `self` is a subset of the matching entry of `other`.
    pub fn is_refinement_of(&self, other: &Tcsp) -> Result<bool> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch { left: self.size, right: other.size });
        }
        Ok(self.m.iter().zip(&other.m).all(|(a, b)| a.is_subset_of(b)))
    }

    pub fn check_solution(&self, a: &Assignment) -> bool {
        check_solution(self, a)
    }
}

/// Builds a network over `X0..Xn`. Constraints given with `i > j` are
/// stored through their converse; repeated pairs are intersected.
pub fn build_tcsp(n: usize, constraints: impl IntoIterator<Item = (usize, usize, IntervalUnion)>) -> Result<Tcsp> {
    let mut p = Tcsp::new(n);
    for (i, j, label) in constraints {
        for index in [i, j] {
            if index > n {
                return Err(Error::IndexOutOfRange { index, max: n });
            }
        }
        if i == j {
            return Err(Error::DiagonalConstraint(i));
        }
        if label.is_empty() {
            return Err(Error::EmptyLabel { i, j });
        }
        if i < j {
            p.constrain(i, j, &label);
        } else {
            p.constrain(j, i, &label.converse());
        }
    }
    Ok(p)
}

pub fn is_stp(p: &Tcsp) -> bool {
    p.is_stp()
}

pub fn is_refinement(refined: &Tcsp, p: &Tcsp) -> Result<bool> {
    refined.is_refinement_of(p)
}

/// One value per variable `X0..Xn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment(pub Vec<Rat>);

impl Assignment {
    pub fn values(&self) -> &[Rat] {
        &self.0
    }
}

pub fn check_solution(p: &Tcsp, a: &Assignment) -> bool {
    let v = &a.0;
    if v.len() != p.size() {
        return false;
    }
    (0..p.size()).all(|i| (i + 1..p.size()).all(|j| p.entry(i, j).contains(&(&v[j] - &v[i]))))
}

/// Bounds on the weight of any finite-weight elementary non-circuit path in
/// the distance graph of the convex closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBounds {
    pub lower: Weight,
    pub upper: Weight,
}

impl PathBounds {
    pub fn range(&self) -> Rat {
        let ub = self.upper.value().cloned().unwrap_or_default();
        let lb = self.lower.value().cloned().unwrap_or_default();
        ub - lb
    }
}

pub fn path_bounds(p: &Tcsp) -> PathBounds {
    let g = stp_to_graph(&p.convex_closure()).expect("the convex closure is an STP");
    path_bounds_of_graph(&g)
}

/// Path bounds that hold in every STP obtained by choosing one convex part
/// per entry: each edge gets its smallest weight over the parts. Equal to
/// `path_bounds` on an STP. The closure bounds can be too tight once a
/// disjunctive entry is narrowed to one of its parts, e.g. a domain
/// `(-8,-6) u [6,8]` contributes no negative edge to the closure.
pub fn clamp_bounds(p: &Tcsp) -> PathBounds {
    let mut g = RootedDistanceGraph::new(p.n());
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            let parts = p.entry(i, j).parts();
            if parts.is_empty() {
                g.set_weight(i, j, Weight::strict(0));
                g.set_weight(j, i, Weight::zero());
                continue;
            }
            let min = |w: &dyn Fn(&Interval) -> Weight| parts.iter().map(w).min().expect("non-empty");
            g.set_weight(i, j, min(&|q| Weight::from_upper(q.hi())));
            g.set_weight(j, i, min(&|q| Weight::from_lower(q.lo())));
        }
    }
    path_bounds_of_graph(&g)
}

/// Path bounds of a rooted distance graph over `size` vertices.
pub fn path_bounds_of_graph(g: &RootedDistanceGraph) -> PathBounds {
    let size = g.size();
    let n = size - 1;
    let zero = Weight::zero();
    let mut below: Vec<Weight> = Vec::new();
    let mut above: Vec<Weight> = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i == j {
                continue;
            }
            let w = g.weight(i, j);
            let back = g.weight(j, i);
            if *w < zero && (w < back || (i < j && w == back)) {
                below.push(w.clone());
            }
            if *w >= zero && w.is_finite() && (!back.is_finite() || back < w || (i < j && w == back)) {
                above.push(w.clone());
            }
        }
    }
    below.sort();
    above.sort_by(|a, b| b.cmp(a));
    let sum = |ws: &[Weight]| ws.iter().take(n).fold(Weight::zero(), |acc, w| w_add(&acc, w));
    PathBounds { lower: sum(&below), upper: sum(&above) }
}

/// `path_ub - path_lb`, ignoring strictness.
pub fn range(p: &Tcsp) -> Rat {
    path_bounds(p).range()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Connected,
    Disconnected,
}

/// Status of every variable `X0..Xn` with respect to `X0`, computed on the
/// distance graph of the convex closure.
pub fn connectivity(p: &Tcsp) -> Vec<Connectivity> {
    let g = stp_to_graph(&p.convex_closure()).expect("the convex closure is an STP");
    let forward = g.reachable_from(0);
    let backward = g.reaching(0);
    (0..p.size())
        .map(|i| if forward[i] || backward[i] { Connectivity::Connected } else { Connectivity::Disconnected })
        .collect()
}

pub fn disconnected_variables(p: &Tcsp) -> Vec<usize> {
    connectivity(p).iter().enumerate().filter(|(_, c)| **c == Connectivity::Disconnected).map(|(i, _)| i).collect()
}

pub fn is_connected(p: &Tcsp) -> bool {
    disconnected_variables(p).is_empty()
}

/// Breadth-first search helper shared with the graph module.
pub(crate) fn bfs(size: usize, mut has_edge: impl FnMut(usize, usize) -> bool, start: usize) -> Vec<bool> {
    let mut seen = vec![false; size];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for v in 0..size {
            if !seen[v] && has_edge(u, v) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}
