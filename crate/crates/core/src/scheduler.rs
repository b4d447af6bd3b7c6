//! Job-shop instances as scheduling networks, and a branch-and-bound
//! makespan optimizer filtered by `bdac3`.
//!
//! Tasks are numbered from 1; variable `Xi` is the start of task `i` and
//! `X0` the global release date.

use crate::consistency::bdac3;
use crate::error::{Error, Result};
use crate::interval::{Bound, Interval, IntervalUnion};
use crate::network::{build_tcsp, Tcsp};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub duration: Rat,
    pub release: Option<Rat>,
    pub due: Option<Rat>,
}

impl Task {
    pub fn new(duration: impl Into<Rat>) -> Self {
        Task { duration: duration.into(), release: None, due: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchedulingInstance {
    pub tasks: Vec<Task>,
    /// `(i, j)`: task `j` starts after task `i` ends.
    pub precedences: Vec<(usize, usize)>,
    /// `(i, j)`: tasks `i` and `j` do not overlap.
    pub disjunctions: Vec<(usize, usize)>,
}

impl SchedulingInstance {
    pub fn durations(&self) -> Vec<Rat> {
        self.tasks.iter().map(|t| t.duration.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        for (k, t) in self.tasks.iter().enumerate() {
            let i = k + 1;
            if !t.duration.is_positive() {
                return invalid(format!("task {i} has non-positive duration {}", t.duration));
            }
            if t.release.as_ref().is_some_and(Rat::is_negative) {
                return invalid(format!("task {i} has a negative release date"));
            }
            if let Some(due) = &t.due {
                if (due - &t.duration).is_negative() {
                    return invalid(format!("task {i} is due before it can end"));
                }
            }
        }
        let n = self.tasks.len();
        for &(i, j) in self.precedences.iter().chain(&self.disjunctions) {
            if i == 0 || j == 0 || i > n || j > n {
                return invalid(format!("pair ({i}, {j}) refers to an unknown task"));
            }
            if i == j {
                return invalid(format!("pair ({i}, {j}) relates a task to itself"));
            }
        }
        Ok(())
    }
}

fn from(a: &Rat) -> IntervalUnion {
    IntervalUnion::single(Interval::new(Bound::closed(a.clone()), Bound::PosInf).expect("non-empty"))
}

fn upto(a: &Rat) -> IntervalUnion {
    IntervalUnion::single(Interval::new(Bound::NegInf, Bound::closed(a.clone())).expect("non-empty"))
}

/// The scheduling network of an instance.
pub fn compile(inst: &SchedulingInstance) -> Result<Tcsp> {
    inst.validate()?;
    let d = inst.durations();
    let mut constraints = Vec::new();
    for (k, t) in inst.tasks.iter().enumerate() {
        let i = k + 1;
        constraints.push((0, i, from(&Rat::zero())));
        if let Some(rd) = &t.release {
            constraints.push((0, i, from(rd)));
        }
        if let Some(dd) = &t.due {
            constraints.push((0, i, IntervalUnion::closed(Rat::zero(), dd - &t.duration)));
        }
    }
    for &(i, j) in &inst.precedences {
        constraints.push((i, j, from(&d[i - 1])));
    }
    for &(i, j) in &inst.disjunctions {
        constraints.push((i, j, upto(&-&d[j - 1]).union(&from(&d[i - 1]))));
    }
    build_tcsp(inst.tasks.len(), constraints)
}

/// `[a,b]` or `[a,+inf)` with `0 <= a`.
pub fn is_task_domain(label: &IntervalUnion) -> bool {
    match label.parts() {
        [part] => {
            let lo_ok = matches!(part.lo(), Bound::Finite { value, closed: true } if !value.is_negative());
            let hi_ok = matches!(part.hi(), Bound::PosInf | Bound::Finite { closed: true, .. });
            lo_ok && hi_ok
        }
        _ => false,
    }
}

/// `(-inf,a]` with `a < 0`, `[a,+inf)` with `a > 0`, or their union.
pub fn is_task_relation(label: &IntervalUnion) -> bool {
    let head = |p: &Interval| matches!((p.lo(), p.hi()), (Bound::NegInf, Bound::Finite { value, closed: true }) if value.is_negative());
    let tail = |p: &Interval| matches!((p.lo(), p.hi()), (Bound::Finite { value, closed: true }, Bound::PosInf) if value.is_positive());
    match label.parts() {
        [p] => head(p) || tail(p),
        [p, q] => head(p) && tail(q),
        _ => false,
    }
}

/// True iff every domain and every constrained task pair has one of the
/// shapes preserved by `bdac3` on scheduling networks.
pub fn has_scheduling_form(p: &Tcsp) -> bool {
    (1..p.size()).all(|i| is_task_domain(p.domain(i)))
        && p.constraints().filter(|&(i, _)| i != 0).all(|(i, j)| is_task_relation(p.entry(i, j)))
}

fn lower_of(p: &Tcsp, i: usize) -> Result<Rat> {
    if !is_task_domain(p.domain(i)) {
        return Err(Error::MalformedDomain(i));
    }
    Ok(p.domain(i).lower_bound().and_then(Bound::value).expect("finite lower bound").clone())
}

/// Earliest start of task `i`: the lower bound of its domain, which may be
/// a union once a due date bounds it.
fn earliest(p: &Tcsp, i: usize) -> Result<Rat> {
    match p.domain(i).lower_bound() {
        Some(Bound::Finite { value, closed: true }) => Ok(value.clone()),
        _ => Err(Error::MalformedDomain(i)),
    }
}

fn latest_end(p: &Tcsp, durations: &[Rat], start: impl Fn(&Tcsp, usize) -> Result<Rat>) -> Result<Rat> {
    let mut best = Rat::zero();
    for i in 1..p.size() {
        let end = start(p, i)? + &durations[i - 1];
        if end > best {
            best = end;
        }
    }
    Ok(best)
}

/// Optimum lower bound: the latest earliest completion time.
pub fn olb(p: &Tcsp, durations: &[Rat]) -> Result<Rat> {
    latest_end(p, durations, lower_of)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub start_times: Vec<Rat>,
    pub makespan: Rat,
    pub latency: Rat,
}

impl Schedule {
    pub fn new(start_times: Vec<Rat>, durations: &[Rat]) -> Self {
        let (makespan, latency) = metrics(&start_times, durations);
        Schedule { start_times, makespan, latency }
    }
}

fn metrics(starts: &[Rat], durations: &[Rat]) -> (Rat, Rat) {
    let makespan = starts.iter().zip(durations).map(|(s, d)| s + d).max().unwrap_or_default();
    let latency = starts.iter().min().cloned().unwrap_or_default();
    (makespan, latency)
}

/// `(makespan, latency)` recomputed from the start times.
pub fn schedule_metrics(s: &Schedule, durations: &[Rat]) -> (Rat, Rat) {
    metrics(&s.start_times, durations)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal(Schedule),
    Infeasible,
}

impl Optimum {
    pub fn makespan(&self) -> Option<&Rat> {
        match self {
            Optimum::Optimal(s) => Some(&s.makespan),
            Optimum::Infeasible => None,
        }
    }
}

/// Disjunctive task pair with the largest gap between the completion
/// bounds of its two orders; ties go to the lowest pair.
fn select_pair(p: &Tcsp, d: &[Rat]) -> Result<Option<(usize, usize)>> {
    let mut best: Option<((usize, usize), Rat)> = None;
    for (i, j) in p.disjunctive_pairs().into_iter().filter(|&(i, _)| i != 0) {
        let (ai, aj) = (earliest(p, i)?, earliest(p, j)?);
        let (di, dj) = (&d[i - 1], &d[j - 1]);
        let j_first = (&aj + dj).max(ai.clone()) + di;
        let i_first = (&ai + di).max(aj) + dj;
        let regret = (j_first - i_first).abs();
        if best.as_ref().map_or(true, |(_, r)| regret > *r) {
            best = Some(((i, j), regret));
        }
    }
    Ok(best.map(|(pair, _)| pair))
}

struct BranchAndBound<'a> {
    durations: Vec<Rat>,
    incumbent: Option<Schedule>,
    hook: &'a mut dyn FnMut(&Tcsp),
}

impl BranchAndBound<'_> {
    fn node(&mut self, mut p: Tcsp) -> Result<()> {
        if !bdac3(&mut p).is_consistent() {
            return Ok(());
        }
        (self.hook)(&p);
        let bound = latest_end(&p, &self.durations, earliest)?;
        if self.incumbent.as_ref().is_some_and(|z| z.makespan <= bound) {
            return Ok(());
        }
        // with due dates a domain can split; its parts are branched on last
        let branch = match select_pair(&p, &self.durations)? {
            Some(pair) => Some(pair),
            None => (1..p.size()).find(|&i| !p.domain(i).is_convex()).map(|i| (0, i)),
        };
        match branch {
            Some((i, j)) => {
                for part in p.entry(i, j).parts().to_vec() {
                    let mut q = p.clone();
                    q.set_constraint(i, j, IntervalUnion::single(part));
                    self.node(q)?;
                }
            }
            None => {
                let starts = (1..p.size()).map(|i| earliest(&p, i)).collect::<Result<Vec<_>>>()?;
                self.incumbent = Some(Schedule::new(starts, &self.durations));
            }
        }
        Ok(())
    }
}

/// Minimum makespan schedule, calling `hook` on the network of every node
/// that survives filtering.
pub fn optimum_observed(inst: &SchedulingInstance, hook: &mut dyn FnMut(&Tcsp)) -> Result<Optimum> {
    let p = compile(inst)?;
    let mut bb = BranchAndBound { durations: inst.durations(), incumbent: None, hook };
    bb.node(p)?;
    Ok(bb.incumbent.map_or(Optimum::Infeasible, Optimum::Optimal))
}

pub fn optimum(inst: &SchedulingInstance) -> Result<Optimum> {
    optimum_observed(inst, &mut |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{check_solution, Assignment};

    fn u(s: &str) -> IntervalUnion {
        s.parse().unwrap()
    }

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn tasks(ds: &[i64]) -> Vec<Task> {
        ds.iter().map(|&d| Task::new(d)).collect()
    }

    #[test]
    fn compiled_constraints() {
        let inst = SchedulingInstance { tasks: tasks(&[3, 2]), precedences: vec![(1, 2)], ..Default::default() };
        assert_eq!(compile(&inst).unwrap().entry(1, 2), &u("[3,+inf)"));
        let inst = SchedulingInstance { tasks: tasks(&[3, 2]), disjunctions: vec![(1, 2)], ..Default::default() };
        let p = compile(&inst).unwrap();
        assert_eq!(p.entry(1, 2), &u("(-inf,-2] u [3,+inf)"));
        assert_eq!(p.domain(1), &u("[0,+inf)"));
        let inst = SchedulingInstance {
            tasks: vec![Task { duration: r(4), release: None, due: Some(r(10)) }],
            ..Default::default()
        };
        assert_eq!(compile(&inst).unwrap().domain(1), &u("[0,6]"));
    }

    #[test]
    fn invalid_instances() {
        let bad = [
            SchedulingInstance { tasks: tasks(&[0]), ..Default::default() },
            SchedulingInstance {
                tasks: vec![Task { duration: r(5), release: None, due: Some(r(4)) }],
                ..Default::default()
            },
            SchedulingInstance { tasks: tasks(&[1, 1]), precedences: vec![(1, 3)], ..Default::default() },
            SchedulingInstance { tasks: tasks(&[1, 1]), disjunctions: vec![(2, 2)], ..Default::default() },
        ];
        for inst in bad {
            assert!(matches!(compile(&inst), Err(Error::InvalidInstance(_))), "{inst:?}");
        }
    }

    #[test]
    fn optimum_lower_bound() {
        let p = compile(&SchedulingInstance { tasks: tasks(&[5]), ..Default::default() }).unwrap();
        assert_eq!(olb(&p, &[r(5)]).unwrap(), r(5));
        let mut q = Tcsp::new(4);
        for (i, s) in ["[10,20]", "[40,50]", "[20,30]", "[60,70]"].iter().enumerate() {
            q.set(0, i + 1, u(s));
        }
        assert_eq!(olb(&q, &[r(5), r(5), r(5), r(5)]).unwrap(), r(65));
        q.set(0, 2, u("(40,50]"));
        assert_eq!(olb(&q, &[r(5), r(5), r(5), r(5)]), Err(Error::MalformedDomain(2)));
    }

    #[test]
    fn two_tasks_on_one_machine() {
        let inst = SchedulingInstance { tasks: tasks(&[3, 2]), disjunctions: vec![(1, 2)], ..Default::default() };
        assert_eq!(optimum(&inst).unwrap().makespan(), Some(&r(5)));
    }

    #[test]
    fn chain_of_three() {
        let inst =
            SchedulingInstance { tasks: tasks(&[2, 3, 4]), precedences: vec![(1, 2), (2, 3)], ..Default::default() };
        let Optimum::Optimal(s) = optimum(&inst).unwrap() else { panic!("feasible") };
        assert_eq!(s.makespan, r(9));
        assert_eq!(s.start_times, vec![r(0), r(2), r(5)]);
        assert_eq!(schedule_metrics(&s, &inst.durations()), (r(9), r(0)));
    }

    #[test]
    fn metrics_of_a_single_task() {
        let s = Schedule::new(vec![r(7)], &[r(1)]);
        assert_eq!((s.makespan.clone(), s.latency.clone()), (r(8), r(7)));
    }

    #[test]
    fn every_node_keeps_its_shape() {
        let inst = SchedulingInstance {
            tasks: tasks(&[3, 2, 4, 1]),
            precedences: vec![(1, 2), (3, 4)],
            disjunctions: vec![(1, 3), (2, 4)],
        };
        let mut nodes = 0;
        let out = optimum_observed(&inst, &mut |p| {
            nodes += 1;
            assert!(has_scheduling_form(p));
        })
        .unwrap();
        assert!(nodes > 0);
        let Optimum::Optimal(s) = out else { panic!("feasible") };
        let mut values = vec![r(0)];
        values.extend(s.start_times.iter().cloned());
        assert!(check_solution(&compile(&inst).unwrap(), &Assignment(values)));
    }

    #[test]
    fn due_dates_can_split_a_domain() {
        let inst = SchedulingInstance {
            tasks: vec![Task { duration: r(1), release: None, due: Some(r(18)) }, Task::new(8)],
            disjunctions: vec![(1, 2)],
            precedences: vec![],
        };
        let mut p = compile(&inst).unwrap();
        p.set_constraint(0, 2, u("[0,2]"));
        assert!(crate::consistency::bdac3(&mut p).is_consistent());
        assert_eq!(p.domain(1), &u("[0,1] u [8,17]"));
        assert!(!has_scheduling_form(&p));
    }

    #[test]
    fn split_domains_are_branched_on() {
        let inst = SchedulingInstance {
            tasks: vec![
                Task { duration: r(1), release: None, due: Some(r(18)) },
                Task { duration: r(8), release: None, due: Some(r(10)) },
            ],
            disjunctions: vec![(1, 2)],
            precedences: vec![],
        };
        let Optimum::Optimal(s) = optimum(&inst).unwrap() else { panic!("feasible") };
        assert_eq!(s.makespan, r(9));
    }

    #[test]
    fn tight_due_date_is_infeasible() {
        let inst = SchedulingInstance {
            tasks: vec![Task::new(3), Task { duration: r(2), release: None, due: Some(r(4)) }],
            precedences: vec![(1, 2)],
            ..Default::default()
        };
        assert_eq!(optimum(&inst).unwrap(), Optimum::Infeasible);
    }
}
