//! Random instance generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use tcsp::scheduler::{SchedulingInstance, Task};
use tcsp::{build_tcsp, Bound, Interval, IntervalUnion, Rat, Tcsp};

/// Shortest-path weight used by the oracles: `Fin(v, strict)` or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum W {
    Fin(i64, bool),
    Inf,
}

impl W {
    fn key(self) -> (i64, u8) {
        match self {
            W::Fin(v, strict) => (v, if strict { 0 } else { 1 }),
            W::Inf => (i64::MAX, 2),
        }
    }

    pub fn less(self, other: W) -> bool {
        self.key() < other.key()
    }

    pub fn add(self, other: W) -> W {
        match (self, other) {
            (W::Fin(a, s), W::Fin(b, t)) => W::Fin(a + b, s || t),
            _ => W::Inf,
        }
    }
}

pub fn int(r: &Rat) -> i64 {
    r.to_i64().expect("integer test data")
}

fn bound(v: i64, open: bool) -> Bound {
    if open {
        Bound::open(v)
    } else {
        Bound::closed(v)
    }
}

/// Distance-graph edges `(from, to, weight)` of a convex network; `None`
/// when some entry is empty.
pub fn edges_of(p: &Tcsp) -> Option<Vec<(usize, usize, W)>> {
    let mut edges = Vec::new();
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            let e = p.entry(i, j);
            assert!(e.is_convex(), "oracle expects convex entries");
            let part = e.parts().first()?;
            edges.extend(part_edges(i, j, part));
        }
    }
    Some(edges)
}

fn part_edges(i: usize, j: usize, part: &Interval) -> Vec<(usize, usize, W)> {
    let mut edges = Vec::new();
    if let Bound::Finite { value, closed } = part.hi() {
        edges.push((i, j, W::Fin(int(value), !closed)));
    }
    if let Bound::Finite { value, closed } = part.lo() {
        edges.push((j, i, W::Fin(-int(value), !closed)));
    }
    edges
}

/// Textbook all-pairs shortest paths; `None` on a negative circuit.
pub fn fw(size: usize, edges: &[(usize, usize, W)]) -> Option<Vec<Vec<W>>> {
    let mut d = vec![vec![W::Inf; size]; size];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = W::Fin(0, false);
    }
    for &(i, j, w) in edges {
        if w.less(d[i][j]) {
            d[i][j] = w;
        }
    }
    for k in 0..size {
        for i in 0..size {
            for j in 0..size {
                let via = d[i][k].add(d[k][j]);
                if via.less(d[i][j]) {
                    d[i][j] = via;
                }
            }
        }
    }
    let zero = W::Fin(0, false);
    (0..size).all(|i| !d[i][i].less(zero)).then_some(d)
}

/// Minimal label of `X_j - X_i` read off a d-graph.
pub fn minimal_label(d: &[Vec<W>], i: usize, j: usize) -> IntervalUnion {
    let lo = match d[j][i] {
        W::Fin(v, strict) => bound(-v, strict),
        W::Inf => Bound::NegInf,
    };
    let hi = match d[i][j] {
        W::Fin(v, strict) => bound(v, strict),
        W::Inf => Bound::PosInf,
    };
    Interval::new(lo, hi).map_or_else(IntervalUnion::empty, IntervalUnion::single)
}

pub fn stp_is_consistent(p: &Tcsp) -> bool {
    edges_of(p).and_then(|e| fw(p.size(), &e)).is_some()
}

/// Consistency of a disjunctive network by trying every choice of one
/// convex part per entry.
pub fn sublabel_oracle(p: &Tcsp) -> bool {
    let mut choices: Vec<Vec<Vec<(usize, usize, W)>>> = Vec::new();
    for i in 0..p.size() {
        for j in i + 1..p.size() {
            let e = p.entry(i, j);
            if e.is_empty() {
                return false;
            }
            if !e.is_universal() {
                choices.push(e.parts().iter().map(|part| part_edges(i, j, part)).collect());
            }
        }
    }
    let mut pick = vec![0usize; choices.len()];
    loop {
        let edges: Vec<_> = choices.iter().zip(&pick).flat_map(|(c, &k)| c[k].clone()).collect();
        if fw(p.size(), &edges).is_some() {
            return true;
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return false;
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn in_part(part: &Interval, x: &Rat) -> bool {
    let above = match part.lo() {
        Bound::Finite { value, closed: true } => x >= value,
        Bound::Finite { value, closed: false } => x > value,
        _ => true,
    };
    let below = match part.hi() {
        Bound::Finite { value, closed: true } => x <= value,
        Bound::Finite { value, closed: false } => x < value,
        _ => true,
    };
    above && below
}

/// Checks `(x_0, ..., x_n)` against every entry, part by part.
pub fn satisfies(p: &Tcsp, x: &[Rat]) -> bool {
    x.len() == p.size()
        && (0..p.size()).all(|i| {
            (i + 1..p.size()).all(|j| {
                let d = &x[j] - &x[i];
                p.entry(i, j).parts().iter().any(|part| in_part(part, &d))
            })
        })
}

/// Connected STP with a planted integer solution. Every variable hangs off a
/// random spanning tree rooted at `X0` with two finite bounds; extra
/// constraints may be half-bounded.
pub fn planted_stp(rng: &mut StdRng) -> Tcsp {
    let n = rng.gen_range(1..=8);
    let x: Vec<i64> = (0..=n).map(|v| if v == 0 { 0 } else { rng.gen_range(-20..=20) }).collect();
    let mut constraints = Vec::new();
    let label = |rng: &mut StdRng, i: usize, j: usize, tree: bool| {
        let diff = x[j] - x[i];
        let (lo_off, hi_off) = (rng.gen_range(0..=12), rng.gen_range(0..=12));
        let lo_open = lo_off > 0 && rng.gen_bool(0.5);
        let hi_open = hi_off > 0 && rng.gen_bool(0.5);
        let mut lo = bound((diff - lo_off).max(-50), lo_open);
        let mut hi = bound((diff + hi_off).min(50), hi_open);
        if !tree {
            match rng.gen_range(0..6) {
                0 => lo = Bound::NegInf,
                1 => hi = Bound::PosInf,
                _ => {}
            }
        }
        (i, j, IntervalUnion::single(Interval::new(lo, hi).expect("contains the planted difference")))
    };
    for v in 1..=n {
        let parent = rng.gen_range(0..v);
        constraints.push(label(rng, parent, v, true));
    }
    for i in 0..=n {
        for j in i + 1..=n {
            if !constraints.iter().any(|c| (c.0, c.1) == (i, j)) && rng.gen_bool(0.3) {
                constraints.push(label(rng, i, j, false));
            }
        }
    }
    build_tcsp(n, constraints).unwrap()
}

/// Arbitrary convex label: each end closed, open or infinite; occasionally
/// empty.
pub fn random_convex(rng: &mut StdRng) -> IntervalUnion {
    if rng.gen_bool(0.03) {
        return IntervalUnion::empty();
    }
    let a = rng.gen_range(-50..=50);
    let b = rng.gen_range(a..=50);
    let end = |rng: &mut StdRng, v: i64, inf: Bound| match rng.gen_range(0..3) {
        0 => Bound::closed(v),
        1 => Bound::open(v),
        _ => inf,
    };
    let lo = end(rng, a, Bound::NegInf);
    let hi = end(rng, b, Bound::PosInf);
    Interval::new(lo.clone(), hi.clone())
        .or_else(|| Interval::new(Bound::closed(a), Bound::closed(b)))
        .map(IntervalUnion::single)
        .unwrap()
}

/// STP with every pair independently labelled; not necessarily consistent.
pub fn random_stp(rng: &mut StdRng) -> Tcsp {
    let n = rng.gen_range(1..=6);
    let mut constraints = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            if rng.gen_bool(0.7) {
                constraints.push((i, j, random_convex(rng)));
            }
        }
    }
    let mut p = Tcsp::new(n);
    for (i, j, l) in constraints {
        p.set_constraint(i, j, l);
    }
    p
}

/// Label of one or two narrow convex parts with integer ends in `[-10, 10]`.
pub fn random_disjunctive(rng: &mut StdRng) -> IntervalUnion {
    let two = rng.gen_bool(0.6);
    let a = rng.gen_range(-10..=if two { 4 } else { 10 });
    let b = (a + rng.gen_range(0..=4)).min(10);
    let mut ends = vec![(a, b)];
    if two {
        let c = (b + rng.gen_range(1..=5)).min(10);
        if c > b {
            ends.push((c, (c + rng.gen_range(0..=4)).min(10)));
        }
    }
    let last = ends.len() - 1;
    let pieces = ends.iter().enumerate().map(|(k, &(a, b))| {
        let lo = if k == 0 && rng.gen_bool(0.05) { Bound::NegInf } else { bound(a, a < b && rng.gen_bool(0.4)) };
        let hi = if k == last && rng.gen_bool(0.05) { Bound::PosInf } else { bound(b, a < b && rng.gen_bool(0.4)) };
        Interval::new(lo, hi).unwrap()
    });
    IntervalUnion::from_parts(pieces.collect::<Vec<_>>())
}

pub fn random_tcsp(rng: &mut StdRng) -> Tcsp {
    let n = rng.gen_range(1..=3);
    let mut constraints = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            if rng.gen_bool(0.9) {
                constraints.push((i, j, random_disjunctive(rng)));
            }
        }
    }
    build_tcsp(n, constraints).unwrap()
}

/// Job-shop instance; due dates only when `due_dates` is set, since they can
/// split a binarized domain.
pub fn random_instance(rng: &mut StdRng, due_dates: bool) -> SchedulingInstance {
    let n = rng.gen_range(1..=5);
    let tasks = (0..n)
        .map(|_| {
            let mut t = Task::new(rng.gen_range(1..=9));
            if rng.gen_bool(0.3) {
                t.release = Some(Rat::from_int(rng.gen_range(0..=10)));
            }
            if due_dates && rng.gen_bool(0.3) {
                let earliest = t.release.as_ref().map_or(0, int) + int(&t.duration);
                t.due = Some(Rat::from_int(earliest + rng.gen_range(0..=20)));
            }
            t
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let mut precedences = Vec::new();
    let mut disjunctions = Vec::new();
    while !pairs.is_empty() {
        let (i, j) = pairs.swap_remove(rng.gen_range(0..pairs.len()));
        match rng.gen_range(0..4) {
            0 => precedences.push((i, j)),
            1 | 2 if disjunctions.len() < 5 => disjunctions.push((i, j)),
            _ => {}
        }
    }
    SchedulingInstance { tasks, precedences, disjunctions }
}

/// Minimum makespan over every orientation of the disjunctions, using the
/// earliest start times of each oriented network.
pub fn orientation_oracle(inst: &SchedulingInstance) -> Option<i64> {
    let size = inst.tasks.len() + 1;
    let d: Vec<i64> = inst.tasks.iter().map(|t| int(&t.duration)).collect();
    let mut base = Vec::new();
    for (k, t) in inst.tasks.iter().enumerate() {
        let i = k + 1;
        base.push((i, 0, W::Fin(-t.release.as_ref().map_or(0, int), false)));
        if let Some(due) = &t.due {
            base.push((0, i, W::Fin(int(due) - d[k], false)));
        }
    }
    let before = |i: usize, j: usize| (j, i, W::Fin(-d[i - 1], false));
    for &(i, j) in &inst.precedences {
        base.push(before(i, j));
    }
    let m = inst.disjunctions.len();
    (0..1u32 << m)
        .filter_map(|mask| {
            let mut edges = base.clone();
            for (k, &(i, j)) in inst.disjunctions.iter().enumerate() {
                edges.push(if mask >> k & 1 == 0 { before(i, j) } else { before(j, i) });
            }
            let dist = fw(size, &edges)?;
            (1..size)
                .map(|i| match dist[i][0] {
                    W::Fin(v, _) => -v + d[i - 1],
                    W::Inf => unreachable!("every task has a release edge"),
                })
                .max()
                .or(Some(0))
        })
        .min()
}

/// Start times respect releases, due dates, precedences and disjunctions.
pub fn schedule_is_valid(inst: &SchedulingInstance, starts: &[Rat]) -> bool {
    let end = |i: usize| &starts[i - 1] + &inst.tasks[i - 1].duration;
    inst.tasks.iter().enumerate().all(|(k, t)| {
        starts[k] >= t.release.clone().unwrap_or_default() && t.due.as_ref().map_or(true, |due| end(k + 1) <= *due)
    }) && inst.precedences.iter().all(|&(i, j)| starts[j - 1] >= end(i))
        && inst.disjunctions.iter().all(|&(i, j)| starts[j - 1] >= end(i) || starts[i - 1] >= end(j))
}
