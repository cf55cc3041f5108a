//! Definition-level refinement checks used as ground truth.
//!
//! Nothing here is fast. Each check follows the set-theoretic definition as
//! closely as a finite computation allows: traces are tracked together with
//! the abstract states their images can reach, refusals are computed over
//! explicit alphabets, and the `_literal` variants enumerate trace sets
//! outright for small depths.

mod generate;
mod reach;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::refine::LabelMap;
use crate::space::{EventLabel, StateId, StateSpace};

pub use generate::{generate_machine_pair, generate_sources, RandomMachineSpec};
pub use reach::{brute_force_explore, BruteSpace};

/// Result of a bounded property check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropOutcome<T> {
    Holds,
    Violated(T),
    /// The precondition of the property does not hold.
    Skipped(&'static str),
}

impl<T> PropOutcome<T> {
    pub fn holds(&self) -> bool {
        matches!(self, PropOutcome::Holds)
    }
}

/// A concrete trace whose image is not an abstract trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceViolation {
    pub concrete: Vec<EventLabel>,
    pub image: Vec<EventLabel>,
}

/// A concrete failure whose image is not an abstract failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureViolation {
    pub concrete: Vec<EventLabel>,
    pub image: Vec<EventLabel>,
    pub refusal: BTreeSet<EventLabel>,
    pub abs_refusal: BTreeSet<EventLabel>,
}

/// A trace after which two stable states refuse different sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminismViolation {
    pub trace: Vec<EventLabel>,
    pub refusals: (BTreeSet<EventLabel>, BTreeSet<EventLabel>),
}

/// Depth that makes the bounded oracles exact: every pair of a concrete state
/// with a set of abstract states that is reachable at all is reachable within
/// this many steps, counting the empty set.
pub fn pair_depth_bound(abs: &StateSpace, conc: &StateSpace) -> usize {
    (abs.state_count() + 1) * conc.state_count() + 1
}

/// The two refusal alphabets: visible concrete labels, and abstract labels
/// together with the images of the visible concrete ones.
fn alphabets(abs: &StateSpace, conc: &StateSpace, map: &LabelMap) -> (BTreeSet<EventLabel>, BTreeSet<EventLabel>) {
    let sigma_c: BTreeSet<EventLabel> = conc.labels().filter(|l| !map.is_skip(l)).cloned().collect();
    let mut sigma_a: BTreeSet<EventLabel> = abs.labels().cloned().collect();
    for l in &sigma_c {
        sigma_a.insert(map.psi(l).expect("visible label"));
    }
    (sigma_c, sigma_a)
}

fn abs_refusal_def(
    map: &LabelMap,
    sigma_c: &BTreeSet<EventLabel>,
    sigma_a: &BTreeSet<EventLabel>,
    x: &BTreeSet<EventLabel>,
) -> BTreeSet<EventLabel> {
    sigma_a
        .iter()
        .filter(|y| {
            sigma_c
                .iter()
                .filter(|l| map.psi(l).as_ref() == Ok(*y))
                .all(|l| x.contains(l))
        })
        .cloned()
        .collect()
}

fn abstract_post(abs: &StateSpace, set: &BTreeSet<StateId>, y: &EventLabel) -> BTreeSet<StateId> {
    set.iter()
        .flat_map(|&a| abs.successors(a))
        .filter(|(l, _)| abs.label(*l) == y)
        .map(|(_, d)| d)
        .collect()
}

fn stable(ss: &StateSpace, s: StateId, skip: &BTreeSet<EventLabel>) -> bool {
    ss.successors(s).all(|(l, _)| !skip.contains(ss.label(l)))
}

type Config = (StateId, BTreeSet<StateId>);

/// Every concrete trace of length at most `k`, grouped by its last state and
/// the set of abstract states its image reaches. Returns the configurations
/// with one shortest witnessing trace each, in discovery order.
fn configurations(abs: &StateSpace, conc: &StateSpace, map: &LabelMap, k: usize) -> Vec<(Config, Vec<EventLabel>)> {
    let start: Config = (conc.initial(), BTreeSet::from([abs.initial()]));
    let mut seen: BTreeMap<Config, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut out = vec![(start, Vec::new())];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((i, depth)) = queue.pop_front() {
        if depth == k {
            continue;
        }
        let ((c, set), trace) = out[i].clone();
        for (l, d) in conc.successors(c) {
            let label = conc.label(l);
            let next = match map.psi(label) {
                Ok(y) => abstract_post(abs, &set, &y),
                Err(_) => set.clone(),
            };
            let cfg = (d, next);
            if !seen.contains_key(&cfg) {
                seen.insert(cfg.clone(), out.len());
                let mut t = trace.clone();
                t.push(label.clone());
                queue.push_back((out.len(), depth + 1));
                out.push((cfg, t));
            }
        }
    }
    out
}

/// Whether the image of every concrete trace of length at most `k` is an
/// abstract trace. Reports a shortest offending trace.
pub fn oracle_trace_refines(
    abs: &StateSpace,
    conc: &StateSpace,
    map: &LabelMap,
    k: usize,
) -> Result<(), TraceViolation> {
    for ((_, set), trace) in configurations(abs, conc, map, k) {
        if set.is_empty() {
            let image = map.tau(&trace).expect("concrete labels");
            return Err(TraceViolation { concrete: trace, image });
        }
    }
    Ok(())
}

/// Whether every concrete failure `(s, X)` with `|s| <= k` maps to an
/// abstract failure `(tau(s), AbsRefusal(X))`.
pub fn oracle_failure_refines(
    abs: &StateSpace,
    conc: &StateSpace,
    map: &LabelMap,
    k: usize,
) -> Result<(), FailureViolation> {
    let skip = map.skip_labels(conc);
    let (sigma_c, sigma_a) = alphabets(abs, conc, map);
    for ((c, set), trace) in configurations(abs, conc, map, k) {
        if !stable(conc, c, &skip) {
            continue;
        }
        let refusal: BTreeSet<EventLabel> = sigma_c.difference(&conc.enabled(c)).cloned().collect();
        let wanted = abs_refusal_def(map, &sigma_c, &sigma_a, &refusal);
        let matched = set
            .iter()
            .any(|&a| sigma_a.difference(&abs.enabled(a)).cloned().collect::<BTreeSet<_>>() == wanted);
        if !matched {
            let image = map.tau(&trace).expect("concrete labels");
            return Err(FailureViolation {
                concrete: trace,
                image,
                refusal,
                abs_refusal: wanted,
            });
        }
    }
    Ok(())
}

/// All traces of length at most `k`, as label sequences.
pub fn traces_upto(ss: &StateSpace, k: usize) -> BTreeSet<Vec<EventLabel>> {
    let mut out = BTreeSet::new();
    let mut layer: BTreeSet<(Vec<EventLabel>, StateId)> = BTreeSet::from([(Vec::new(), ss.initial())]);
    for depth in 0..=k {
        out.extend(layer.iter().map(|(t, _)| t.clone()));
        if depth == k {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|(t, s)| {
                ss.successors(*s).map(move |(l, d)| {
                    let mut t = t.clone();
                    t.push(ss.label(l).clone());
                    (t, d)
                })
            })
            .collect();
    }
    out
}

/// Trace refinement by enumerating both trace sets up to length `k`.
/// Exponential in `k`.
pub fn oracle_trace_refines_literal(abs: &StateSpace, conc: &StateSpace, map: &LabelMap, k: usize) -> bool {
    let abstract_traces = traces_upto(abs, k);
    traces_upto(conc, k)
        .iter()
        .all(|t| abstract_traces.contains(&map.tau(t).expect("concrete labels")))
}

/// Failure refinement by enumerating both failure sets up to length `k`.
/// Exponential in `k`.
pub fn oracle_failure_refines_literal(abs: &StateSpace, conc: &StateSpace, map: &LabelMap, k: usize) -> bool {
    let (sigma_c, sigma_a) = alphabets(abs, conc, map);
    let abstract_failures = abs.failures(&BTreeSet::new(), &sigma_a, k);
    conc.failures(&map.skip_labels(conc), &sigma_c, k)
        .iter()
        .all(|(t, x)| {
            let image = map.tau(t).expect("concrete labels");
            abstract_failures.contains(&(image, abs_refusal_def(map, &sigma_c, &sigma_a, x)))
        })
}

/// States from which some non-empty skip path returns to the same state,
/// found by a search from every state separately.
pub fn oracle_divergent_states(conc: &StateSpace, skip: &BTreeSet<EventLabel>) -> BTreeSet<StateId> {
    let skip_succ = |s: StateId| {
        conc.successors(s)
            .filter(|(l, _)| skip.contains(conc.label(*l)))
            .map(|(_, d)| d)
            .collect::<Vec<_>>()
    };
    conc.state_ids()
        .filter(|&s| {
            let mut seen = BTreeSet::new();
            let mut stack = skip_succ(s);
            while let Some(cur) = stack.pop() {
                if cur == s {
                    return true;
                }
                if seen.insert(cur) {
                    stack.extend(skip_succ(cur));
                }
            }
            false
        })
        .collect()
}

/// Divergence freedom by depth-first path search over skip steps: a state
/// met again on the current path closes a cycle, which is returned as a
/// label sequence.
pub fn oracle_divergence_free(conc: &StateSpace, skip: &BTreeSet<EventLabel>) -> Result<(), Vec<EventLabel>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        OnPath,
        Done,
    }
    let mut mark = vec![Mark::New; conc.state_count()];
    for root in conc.state_ids() {
        if mark[root.0] != Mark::New {
            continue;
        }
        // (state, label that led here, remaining skip successors)
        let mut path: Vec<(StateId, Option<EventLabel>, Vec<(EventLabel, StateId)>)> = Vec::new();
        let succ = |s: StateId| -> Vec<(EventLabel, StateId)> {
            let mut out: Vec<_> = conc
                .successors(s)
                .map(|(l, d)| (conc.label(l).clone(), d))
                .filter(|(l, _)| skip.contains(l))
                .collect();
            // popped from the back, so canonical order comes first
            out.reverse();
            out
        };
        mark[root.0] = Mark::OnPath;
        path.push((root, None, succ(root)));
        while let Some((_, _, rest)) = path.last_mut() {
            match rest.pop() {
                None => {
                    let (s, ..) = path.pop().unwrap();
                    mark[s.0] = Mark::Done;
                }
                Some((l, d)) => match mark[d.0] {
                    Mark::Done => {}
                    Mark::OnPath => {
                        let start = path.iter().position(|(s, ..)| *s == d).unwrap();
                        let mut cycle: Vec<EventLabel> =
                            path[start + 1..].iter().map(|(_, l, _)| l.clone().unwrap()).collect();
                        cycle.push(l);
                        return Err(cycle);
                    }
                    Mark::New => {
                        mark[d.0] = Mark::OnPath;
                        let next = succ(d);
                        path.push((d, Some(l), next));
                    }
                },
            }
        }
    }
    Ok(())
}

/// Every class of concrete traces with a common abstract image contains a
/// trace ending in a stable state. Checked per reachable configuration: some
/// skip path must lead from its concrete state to a stable state. Returns a
/// trace to a configuration where none does.
pub fn check_prop1(abs: &StateSpace, conc: &StateSpace, map: &LabelMap) -> PropOutcome<Vec<EventLabel>> {
    let skip = map.skip_labels(conc);
    if oracle_divergence_free(conc, &skip).is_err() {
        return PropOutcome::Skipped("concrete machine diverges");
    }
    for ((c, set), trace) in configurations(abs, conc, map, pair_depth_bound(abs, conc)) {
        if set.is_empty() {
            continue;
        }
        let mut seen = BTreeSet::from([c]);
        let mut queue = VecDeque::from([c]);
        let mut found = false;
        while let Some(s) = queue.pop_front() {
            if stable(conc, s, &skip) {
                found = true;
                break;
            }
            for (l, d) in conc.successors(s) {
                if skip.contains(conc.label(l)) && seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        if !found {
            return PropOutcome::Violated(trace);
        }
    }
    PropOutcome::Holds
}

/// Every abstract trace of length at most `k` is the image of some concrete
/// trace. Returns a shortest abstract trace without concrete counterpart.
pub fn check_prop2(abs: &StateSpace, conc: &StateSpace, map: &LabelMap, k: usize) -> PropOutcome<Vec<EventLabel>> {
    let skip = map.skip_labels(conc);
    let closure = |set: BTreeSet<StateId>| {
        let mut out = set.clone();
        let mut stack: Vec<StateId> = set.into_iter().collect();
        while let Some(s) = stack.pop() {
            for (l, d) in conc.successors(s) {
                if skip.contains(conc.label(l)) && out.insert(d) {
                    stack.push(d);
                }
            }
        }
        out
    };
    type Node = (BTreeSet<StateId>, BTreeSet<StateId>);
    let start: Node = (BTreeSet::from([abs.initial()]), closure(BTreeSet::from([conc.initial()])));
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::<EventLabel>::new())]);
    while let Some(((a_set, c_set), trace)) = queue.pop_front() {
        if c_set.is_empty() {
            return PropOutcome::Violated(trace);
        }
        if trace.len() == k {
            continue;
        }
        let labels: BTreeSet<EventLabel> = a_set.iter().flat_map(|&a| abs.enabled(a)).collect();
        for y in labels {
            let a_next = abstract_post(abs, &a_set, &y);
            let c_step: BTreeSet<StateId> = c_set
                .iter()
                .flat_map(|&c| conc.successors(c))
                .filter(|(l, _)| map.psi(conc.label(*l)).as_ref() == Ok(&y))
                .map(|(_, d)| d)
                .collect();
            let node = (a_next, closure(c_step));
            if seen.insert(node.clone()) {
                let mut t = trace.clone();
                t.push(y);
                queue.push_back((node, t));
            }
        }
    }
    PropOutcome::Holds
}

/// Event determinism in its failure form, for machines without skip events:
/// no trace may end in two states with different refusals. Explores sets of
/// states reachable by the same trace.
pub fn oracle_event_deterministic(ss: &StateSpace) -> Result<(), DeterminismViolation> {
    let alphabet: BTreeSet<EventLabel> = ss.labels().cloned().collect();
    let start = BTreeSet::from([ss.initial()]);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::<EventLabel>::new())]);
    while let Some((set, trace)) = queue.pop_front() {
        let mut refusals = set.iter().map(|&s| ss.refusal(s, &alphabet));
        let first = refusals.next().expect("non-empty set");
        if let Some(other) = refusals.find(|r| *r != first) {
            return Err(DeterminismViolation {
                trace,
                refusals: (first, other),
            });
        }
        let labels: BTreeSet<EventLabel> = set.iter().flat_map(|&s| ss.enabled(s)).collect();
        for y in labels {
            let next = abstract_post(ss, &set, &y);
            if seen.insert(next.clone()) {
                let mut t = trace.clone();
                t.push(y);
                queue.push_back((next, t));
            }
        }
    }
    Ok(())
}
