//! Binarized-domain arc-consistency and path-consistency.
//!
//! Every algorithm refines the network in place and reports how the run
//! ended. Domain revisions are clamped against `path_lb`, computed once from
//! the network handed to the run: a lower bound above `-path_lb` (or an
//! upper bound below `path_lb`) can only come from a negative circuit, so
//! the label is emptied on the spot. The `*-minus` variants drop the clamp
//! and must be given a revise budget, because they need not terminate.

use std::collections::VecDeque;
use std::fmt;
use std::hash::Hash;

use rustc_hash::FxHashSet;

use crate::interval::IntervalUnion;
use crate::network::{clamp_bounds, PathBounds, Tcsp};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Consistent,
    EmptyDomain,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub revise_calls: u64,
    pub domain_updates: u64,
}

impl RunReport {
    pub fn is_consistent(&self) -> bool {
        self.outcome == Outcome::Consistent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Bdac3,
    Wbdac3,
    Bdac1,
    Pc1,
    Pc2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bdac3 => "bdac3",
            Algorithm::Wbdac3 => "wbdac3",
            Algorithm::Bdac1 => "bdac1",
            Algorithm::Pc1 => "pc1",
            Algorithm::Pc2 => "pc2",
        }
    }

    fn minus_name(self) -> &'static str {
        match self {
            Algorithm::Bdac3 => "bdac3-minus",
            Algorithm::Wbdac3 => "wbdac3-minus",
            Algorithm::Bdac1 => "bdac1-minus",
            Algorithm::Pc1 => "pc1-minus",
            Algorithm::Pc2 => "pc2-minus",
        }
    }
}

/// Algorithms that have a clamp-free counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinusAlgorithm {
    Bdac3,
    Bdac1,
    Pc2,
}

impl From<MinusAlgorithm> for Algorithm {
    fn from(a: MinusAlgorithm) -> Self {
        match a {
            MinusAlgorithm::Bdac3 => Algorithm::Bdac3,
            MinusAlgorithm::Bdac1 => Algorithm::Bdac1,
            MinusAlgorithm::Pc2 => Algorithm::Pc2,
        }
    }
}

pub const DEFAULT_MINUS_BUDGET: u64 = 10_000;

/// Where the next pair is taken from in the worklist algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueueOrder {
    #[default]
    Fifo,
    Lifo,
}

pub type Pair = (usize, usize);
pub type Triple = (usize, usize, usize);

/// Fixed propagation order for `pc2`: the triples of `prefix` are taken
/// first, then those of `cycle` over and over. A scripted triple that is not
/// queued when its turn comes is skipped in favour of the queue head.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleScript {
    pub prefix: Vec<Triple>,
    pub cycle: Vec<Triple>,
}

impl TripleScript {
    fn get(&self, at: usize) -> Option<Triple> {
        if at < self.prefix.len() {
            Some(self.prefix[at])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(self.cycle[(at - self.prefix.len()) % self.cycle.len()])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Apply the `path_lb` clamp. Off only for the minus variants.
    pub clamp: bool,
    /// Maximum number of revise calls; `None` means unlimited.
    pub budget: Option<u64>,
    pub order: QueueOrder,
    /// Pass order for `bdac1`; defaults to the lexicographic pair order.
    pub pair_order: Option<Vec<Pair>>,
    pub triple_script: Option<TripleScript>,
}

impl Default for Config {
    fn default() -> Self {
        Config { clamp: true, budget: None, order: QueueOrder::Fifo, pair_order: None, triple_script: None }
    }
}

impl Config {
    pub fn minus(budget: u64) -> Self {
        Config { clamp: false, budget: Some(budget), ..Config::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Pair(usize, usize),
    Triple(usize, usize, usize),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Pair(i, j) => write!(f, "({i},{j})"),
            Step::Triple(i, k, j) => write!(f, "({i},{k},{j})"),
        }
    }
}

/// One revise call. `temp` is the refined label before the clamp is applied
/// and `new` the label left in the network afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReviseEvent {
    pub algorithm: &'static str,
    pub step: Step,
    pub old: IntervalUnion,
    pub temp: IntervalUnion,
    pub new: IntervalUnion,
}

impl ReviseEvent {
    pub fn changed(&self) -> bool {
        self.old != self.new
    }
}

impl fmt::Display for ReviseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} old={} temp={} new={}", self.algorithm, self.step, self.old, self.temp, self.new)
    }
}

/// Receives progress notifications from a run.
pub trait Observer {
    /// False when `revise` ignores its events, so runs can skip building them.
    fn wants_events(&self) -> bool {
        true
    }
    fn revise(&mut self, _event: &ReviseEvent) {}
    /// Called after every complete pass of `bdac1` and `pc1`.
    fn pass_end(&mut self, _pass: usize, _p: &Tcsp) {}
}

impl Observer for () {
    fn wants_events(&self) -> bool {
        false
    }
}

/// Observer that keeps every event and the domains after each pass.
#[derive(Clone, Debug, Default)]
pub struct TraceLog {
    pub events: Vec<ReviseEvent>,
    pub passes: Vec<Vec<IntervalUnion>>,
}

impl TraceLog {
    pub fn lines(&self) -> Vec<String> {
        self.events.iter().map(ToString::to_string).collect()
    }

    pub fn changes(&self) -> impl Iterator<Item = &ReviseEvent> {
        self.events.iter().filter(|e| e.changed())
    }
}

impl Observer for TraceLog {
    fn revise(&mut self, event: &ReviseEvent) {
        self.events.push(event.clone());
    }

    fn pass_end(&mut self, _pass: usize, p: &Tcsp) {
        self.passes.push(p.domains());
    }
}

/// Worklist with membership dedupe.
#[derive(Clone, Debug)]
pub struct PropagationQueue<T: Eq + Hash + Copy> {
    items: VecDeque<T>,
    members: FxHashSet<T>,
    order: QueueOrder,
}

impl<T: Eq + Hash + Copy> PropagationQueue<T> {
    pub fn new(order: QueueOrder) -> Self {
        PropagationQueue { items: VecDeque::new(), members: FxHashSet::default(), order }
    }

    /// Adds `item` unless it is already queued.
    pub fn push(&mut self, item: T) -> bool {
        if self.members.insert(item) {
            self.items.push_back(item);
            true
        } else {
            false
        }
    }

    pub fn pop(&mut self) -> Option<T> {
        let item = match self.order {
            QueueOrder::Fifo => self.items.pop_front(),
            QueueOrder::Lifo => self.items.pop_back(),
        }?;
        self.members.remove(&item);
        Some(item)
    }

    pub fn remove(&mut self, item: &T) -> bool {
        if self.members.remove(item) {
            self.items.retain(|x| x != item);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, item: &T) -> bool {
        self.members.contains(item)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Queued items in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }
}

/// True when a refined label is ruled out by the path bound: a finite lower
/// bound above `-path_lb` or a finite upper bound below `path_lb`.
fn violates_path_lb(temp: &IntervalUnion, path_lb: &Weight) -> bool {
    let Some(lo) = temp.lower_bound() else { return false };
    let hi = temp.upper_bound().expect("non-empty label has an upper bound");
    (lo.is_finite() && Weight::from_lower(lo) < *path_lb) || (hi.is_finite() && Weight::from_upper(hi) < *path_lb)
}

struct Run<'a> {
    algorithm: &'static str,
    path_lb: Option<Weight>,
    budget: Option<u64>,
    observer: &'a mut dyn Observer,
    calls: u64,
    updates: u64,
}

impl<'a> Run<'a> {
    fn new(alg: Algorithm, p: &Tcsp, cfg: &Config, observer: &'a mut dyn Observer) -> Self {
        Run {
            algorithm: if cfg.clamp { alg.name() } else { alg.minus_name() },
            path_lb: cfg.clamp.then(|| clamp_bounds(p).lower),
            budget: cfg.budget,
            observer,
            calls: 0,
            updates: 0,
        }
    }

    fn report(&self, outcome: Outcome) -> RunReport {
        RunReport { outcome, revise_calls: self.calls, domain_updates: self.updates }
    }

    fn out_of_budget(&self) -> bool {
        self.budget.is_some_and(|b| self.calls >= b)
    }

    /// Writes `temp` into `m[i][j]` if it differs, applying the clamp first.
    fn apply(&mut self, p: &mut Tcsp, step: Step, i: usize, j: usize, temp: IntervalUnion) -> bool {
        self.calls += 1;
        let old = p.entry(i, j);
        let changed = temp != *old;
        let clamped = changed && self.path_lb.as_ref().is_some_and(|lb| violates_path_lb(&temp, lb));
        if self.observer.wants_events() {
            let old = old.clone();
            let new = match (changed, clamped) {
                (false, _) => old.clone(),
                (true, true) => IntervalUnion::empty(),
                (true, false) => temp.clone(),
            };
            self.observer.revise(&ReviseEvent { algorithm: self.algorithm, step, old, temp: temp.clone(), new });
        }
        if changed {
            p.set(i, j, if clamped { IntervalUnion::empty() } else { temp });
            self.updates += 1;
        }
        changed
    }

    fn revise(&mut self, p: &mut Tcsp, i: usize, j: usize, weak: bool) -> bool {
        let via = if weak { p.domain(j).weak_compose(p.entry(j, i)) } else { p.domain(j).compose(p.entry(j, i)) };
        let temp = p.domain(i).intersect(&via);
        self.apply(p, Step::Pair(i, j), 0, i, temp)
    }

    fn revise_pc(&mut self, p: &mut Tcsp, (i, k, j): Triple) -> bool {
        let temp = p.entry(i, j).intersect(&p.entry(i, k).compose(p.entry(k, j)));
        self.apply(p, Step::Triple(i, k, j), i, j, temp)
    }
}

/// Revises the domain of `Xi` through the constraint with `Xj`:
/// `m[0][i] := m[0][i] ∩ (m[0][j] ⊗ m[j][i])`, followed by the clamp.
/// Returns true iff the domain was rewritten.
pub fn revise(p: &mut Tcsp, i: usize, j: usize, bounds: &PathBounds) -> bool {
    let mut run = Run {
        algorithm: "bdac3",
        path_lb: Some(bounds.lower.clone()),
        budget: None,
        observer: &mut (),
        calls: 0,
        updates: 0,
    };
    run.revise(p, i, j, false)
}

/// Ordered pairs `(i, j)`, `i, j >= 1`, of explicitly constrained variables,
/// lexicographic.
pub fn constrained_pairs(p: &Tcsp) -> Vec<Pair> {
    let mut pairs: Vec<Pair> = p.constraints().filter(|&(i, _)| i != 0).flat_map(|(i, j)| [(i, j), (j, i)]).collect();
    pairs.sort_unstable();
    pairs
}

/// Initial `bdac3` queue: the constrained pairs `(i, j)`, `0 < i < j`, in
/// lexicographic order, each followed by its reverse `(j, i)`.
pub fn seed_pairs(p: &Tcsp) -> Vec<Pair> {
    p.constraints().filter(|&(i, _)| i != 0).flat_map(|(i, j)| [(i, j), (j, i)]).collect()
}

pub fn run(alg: Algorithm, p: &mut Tcsp, cfg: &Config, observer: &mut dyn Observer) -> RunReport {
    let mut run = Run::new(alg, p, cfg, observer);
    if p.has_empty_entry() {
        return run.report(Outcome::EmptyDomain);
    }
    let outcome = match alg {
        Algorithm::Bdac3 => worklist(p, false, cfg, &mut run),
        Algorithm::Wbdac3 => worklist(p, true, cfg, &mut run),
        Algorithm::Bdac1 => passes(p, cfg, &mut run),
        Algorithm::Pc1 => pc1_passes(p, &mut run),
        Algorithm::Pc2 => pc2_worklist(p, cfg, &mut run),
    };
    run.report(outcome)
}

fn worklist(p: &mut Tcsp, weak: bool, cfg: &Config, run: &mut Run) -> Outcome {
    let mut q = PropagationQueue::new(cfg.order);
    for pair in seed_pairs(p) {
        q.push(pair);
    }
    while let Some((k, m)) = q.pop() {
        if run.out_of_budget() {
            return Outcome::BudgetExhausted;
        }
        if run.revise(p, k, m, weak) {
            if p.domain(k).is_empty() {
                return Outcome::EmptyDomain;
            }
            for i in 1..p.size() {
                if i != k && i != m && p.is_constrained(i, k) {
                    q.push((i, k));
                }
            }
        }
    }
    Outcome::Consistent
}

fn passes(p: &mut Tcsp, cfg: &Config, run: &mut Run) -> Outcome {
    let pairs = cfg.pair_order.clone().unwrap_or_else(|| constrained_pairs(p));
    let mut pass = 0;
    loop {
        pass += 1;
        let mut change = false;
        for &(i, j) in &pairs {
            if run.out_of_budget() {
                return Outcome::BudgetExhausted;
            }
            if run.revise(p, i, j, false) {
                if p.domain(i).is_empty() {
                    return Outcome::EmptyDomain;
                }
                change = true;
            }
        }
        run.observer.pass_end(pass, p);
        if !change {
            return Outcome::Consistent;
        }
    }
}

fn pc1_passes(p: &mut Tcsp, run: &mut Run) -> Outcome {
    let size = p.size();
    let mut pass = 0;
    loop {
        pass += 1;
        let mut change = false;
        for k in 0..size {
            for i in 0..size {
                for j in 0..size {
                    if i == j || k == i || k == j {
                        continue;
                    }
                    if run.out_of_budget() {
                        return Outcome::BudgetExhausted;
                    }
                    change |= run.revise_pc(p, (i, k, j));
                    if p.entry(i, j).is_empty() {
                        return Outcome::EmptyDomain;
                    }
                }
            }
        }
        run.observer.pass_end(pass, p);
        if !change {
            return Outcome::Consistent;
        }
    }
}

/// Queues the triples whose revision may be affected by a change to
/// `m[i][j]`, `i < j`.
/// Besides the triples that read `m[i][j]` directly (`(i,j,m)` and
/// `(m,i,j)`), this includes the ones that read its mirror `m[j][i]`.
fn pc2_related(p: &Tcsp, i: usize, j: usize, q: &mut PropagationQueue<Triple>) {
    let size = p.size();
    let constrained = |a: usize, b: usize| !p.entry(a, b).is_universal();
    for m in (i + 1..size).filter(|&m| m != j && constrained(j, m)) {
        q.push((i, j, m));
    }
    for m in (0..j).filter(|&m| m != i && constrained(m, i)) {
        q.push((m, i, j));
    }
    for m in (j + 1..size).filter(|&m| m != i && constrained(i, m)) {
        q.push((j, i, m));
    }
    for m in (0..i).filter(|&m| m != j && constrained(m, j)) {
        q.push((m, j, i));
    }
}

/// Initial `pc2` queue: every `(i,k,j)` with `i < j`, `k ∉ {i,j}` and both
/// `m[i][k]` and `m[k][j]` different from the universal label.
pub fn pc2_seed(p: &Tcsp) -> Vec<Triple> {
    let size = p.size();
    let mut out = Vec::new();
    for i in 0..size {
        for k in 0..size {
            for j in i + 1..size {
                if k != i && k != j && !p.entry(i, k).is_universal() && !p.entry(k, j).is_universal() {
                    out.push((i, k, j));
                }
            }
        }
    }
    out
}

fn pc2_worklist(p: &mut Tcsp, cfg: &Config, run: &mut Run) -> Outcome {
    let mut q = PropagationQueue::new(cfg.order);
    for t in pc2_seed(p) {
        q.push(t);
    }
    let mut script_at = 0;
    loop {
        let scripted = cfg.triple_script.as_ref().and_then(|s| s.get(script_at)).filter(|t| q.contains(t));
        let next = match scripted {
            Some(t) => {
                script_at += 1;
                q.remove(&t);
                Some(t)
            }
            None => q.pop(),
        };
        let Some((i, k, j)) = next else { return Outcome::Consistent };
        if run.out_of_budget() {
            return Outcome::BudgetExhausted;
        }
        if run.revise_pc(p, (i, k, j)) {
            if p.entry(i, j).is_empty() {
                return Outcome::EmptyDomain;
            }
            pc2_related(p, i, j, &mut q);
        }
    }
}

pub fn bdac3(p: &mut Tcsp) -> RunReport {
    run(Algorithm::Bdac3, p, &Config::default(), &mut ())
}

pub fn wbdac3(p: &mut Tcsp) -> RunReport {
    run(Algorithm::Wbdac3, p, &Config::default(), &mut ())
}

pub fn bdac1(p: &mut Tcsp) -> RunReport {
    run(Algorithm::Bdac1, p, &Config::default(), &mut ())
}

pub fn pc1(p: &mut Tcsp) -> RunReport {
    run(Algorithm::Pc1, p, &Config::default(), &mut ())
}

pub fn pc2(p: &mut Tcsp) -> RunReport {
    run(Algorithm::Pc2, p, &Config::default(), &mut ())
}

/// Clamp-free variant of `alg`, stopped after `budget` revise calls.
pub fn minus_variant(alg: MinusAlgorithm, p: &mut Tcsp, budget: u64) -> RunReport {
    assert!(budget > 0, "minus variants need a positive budget");
    run(alg.into(), p, &Config::minus(budget), &mut ())
}

/// True iff `m[0][i] ⊆ m[0][j] ⊗ m[j][i]` for every constrained pair.
pub fn is_bd_arc_consistent(p: &Tcsp) -> bool {
    constrained_pairs(p).into_iter().all(|(i, j)| p.domain(i).is_subset_of(&p.domain(j).compose(p.entry(j, i))))
}
