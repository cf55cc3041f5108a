//! Explicit labelled transition systems induced by machines.

mod divergence;
mod dot;
mod explore;
mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::model::Value;

pub use divergence::skip_cycle_through;
pub use dot::export_dot;
pub use explore::{explore, ExploreError, DEFAULT_MAX_STATES};
pub use io::{load_space, save_space, SpaceFormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Valuation of every machine variable, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State(pub Vec<Value>);

/// An event together with its parameter valuation.
///
/// Two labels of the same event with different arguments are different
/// symbols of the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventLabel {
    pub event: String,
    pub params: Vec<(String, Value)>,
}

impl EventLabel {
    pub fn plain(event: &str) -> Self {
        EventLabel {
            event: event.to_string(),
            params: Vec::new(),
        }
    }

    pub fn with(event: &str, params: &[(&str, Value)]) -> Self {
        EventLabel {
            event: event.to_string(),
            params: params
                .iter()
                .map(|(n, v)| (n.to_string(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.event)?;
        if !self.params.is_empty() {
            let args: Vec<_> = self.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub src: StateId,
    pub label: LabelId,
    pub dst: StateId,
}

/// The reachable part of a machine's state space.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub(crate) machine: String,
    pub(crate) variables: Vec<String>,
    pub(crate) states: IndexSet<State>,
    pub(crate) labels: IndexSet<EventLabel>,
    pub(crate) transitions: Vec<Transition>,
    /// Transition indices per source state, in canonical label order.
    pub(crate) outgoing: Vec<Vec<usize>>,
    /// Transition indices per label.
    pub(crate) by_label: Vec<Vec<usize>>,
}

/// A finite run from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub origin: StateId,
    pub steps: Vec<(EventLabel, StateId)>,
}

impl Trace {
    pub fn empty(origin: StateId) -> Self {
        Trace {
            origin,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> StateId {
        self.steps.last().map_or(self.origin, |(_, s)| *s)
    }

    pub fn labels(&self) -> Vec<EventLabel> {
        self.steps.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<_> = self.steps.iter().map(|(l, _)| l.to_string()).collect();
        write!(f, "<{}>", labels.join(", "))
    }
}

/// A failure: a trace paired with the refusal set of its stable last state.
pub type Failure = (Vec<EventLabel>, BTreeSet<EventLabel>);

impl StateSpace {
    pub(crate) fn new(machine: &str, variables: Vec<String>) -> Self {
        StateSpace {
            machine: machine.to_string(),
            variables,
            states: IndexSet::new(),
            labels: IndexSet::new(),
            transitions: Vec::new(),
            outgoing: Vec::new(),
            by_label: Vec::new(),
        }
    }

    /// Rebuilds a space from its parts, checking the structural invariants.
    pub fn from_parts(
        machine: &str,
        variables: Vec<String>,
        states: Vec<State>,
        labels: Vec<EventLabel>,
        transitions: Vec<Transition>,
    ) -> Result<Self, String> {
        let mut ss = StateSpace::new(machine, variables);
        for s in states {
            if s.0.len() != ss.variables.len() {
                return Err(format!("state has {} values for {} variables", s.0.len(), ss.variables.len()));
            }
            if !ss.states.insert(s) {
                return Err("duplicate state".into());
            }
            ss.outgoing.push(Vec::new());
        }
        if ss.states.is_empty() {
            return Err("state space has no initial state".into());
        }
        for l in labels {
            if !ss.labels.insert(l) {
                return Err("duplicate label".into());
            }
            ss.by_label.push(Vec::new());
        }
        let mut seen = std::collections::HashSet::new();
        for t in transitions {
            if t.src.0 >= ss.states.len() || t.dst.0 >= ss.states.len() || t.label.0 >= ss.labels.len() {
                return Err(format!("transition {t:?} out of range"));
            }
            if !seen.insert(t) {
                return Err(format!("duplicate transition {t:?}"));
            }
            ss.push_transition(t);
        }
        let reach = ss.reachable_from(ss.initial());
        if reach.len() != ss.states.len() {
            return Err("state space contains unreachable states".into());
        }
        Ok(ss)
    }

    pub(crate) fn push_transition(&mut self, t: Transition) {
        let i = self.transitions.len();
        self.transitions.push(t);
        self.outgoing[t.src.0].push(i);
        self.by_label[t.label.0].push(i);
    }

    pub fn machine_name(&self) -> &str {
        &self.machine
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn initial(&self) -> StateId {
        StateId(0)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state(&self, s: StateId) -> &State {
        &self.states[s.0]
    }

    pub fn find_state(&self, s: &State) -> Option<StateId> {
        self.states.get_index_of(s).map(StateId)
    }

    /// Looks a state up by `(variable, value)` pairs; all variables must be given.
    pub fn lookup(&self, valuation: &[(&str, Value)]) -> Option<StateId> {
        let mut values = Vec::with_capacity(self.variables.len());
        for var in &self.variables {
            let (_, v) = valuation.iter().find(|(n, _)| n == var)?;
            values.push(v.clone());
        }
        self.find_state(&State(values))
    }

    pub fn label(&self, l: LabelId) -> &EventLabel {
        &self.labels[l.0]
    }

    pub fn label_id(&self, l: &EventLabel) -> Option<LabelId> {
        self.labels.get_index_of(l).map(LabelId)
    }

    pub fn labels(&self) -> impl Iterator<Item = &EventLabel> {
        self.labels.iter()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transitions of `s` in canonical order.
    pub fn successors(&self, s: StateId) -> impl Iterator<Item = (LabelId, StateId)> + '_ {
        self.outgoing[s.0].iter().map(move |&i| {
            let t = self.transitions[i];
            (t.label, t.dst)
        })
    }

    pub fn transitions_with_label(&self, l: LabelId) -> impl Iterator<Item = &Transition> {
        self.by_label[l.0].iter().map(move |&i| &self.transitions[i])
    }

    /// `name=value` rendering of a state.
    pub fn render_state(&self, s: StateId) -> String {
        let parts: Vec<_> = self
            .variables
            .iter()
            .zip(&self.state(s).0)
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn valuation(&self, s: StateId) -> BTreeMap<&str, &Value> {
        self.variables
            .iter()
            .map(String::as_str)
            .zip(&self.state(s).0)
            .collect()
    }

    pub(crate) fn enabled_ids(&self, s: StateId) -> BTreeSet<LabelId> {
        self.successors(s).map(|(l, _)| l).collect()
    }

    /// Labels with at least one outgoing transition from `s`.
    pub fn enabled(&self, s: StateId) -> BTreeSet<EventLabel> {
        self.successors(s).map(|(l, _)| self.label(l).clone()).collect()
    }

    /// `alphabet` minus the labels enabled at `s`.
    ///
    /// # Panics
    /// If an enabled label is missing from `alphabet`.
    pub fn refusal(&self, s: StateId, alphabet: &BTreeSet<EventLabel>) -> BTreeSet<EventLabel> {
        let enabled = self.enabled(s);
        assert!(
            enabled.is_subset(alphabet),
            "refusal alphabet does not cover the labels enabled at {s}"
        );
        alphabet.difference(&enabled).cloned().collect()
    }

    /// Label mask marking the given labels.
    pub(crate) fn mask(&self, labels: &BTreeSet<EventLabel>) -> Vec<bool> {
        self.labels.iter().map(|l| labels.contains(l)).collect()
    }

    /// All labels of this space whose event is in `events`.
    pub fn labels_of_events(&self, events: &BTreeSet<String>) -> BTreeSet<EventLabel> {
        self.labels
            .iter()
            .filter(|l| events.contains(&l.event))
            .cloned()
            .collect()
    }

    pub(crate) fn is_stable_masked(&self, s: StateId, skip: &[bool]) -> bool {
        !self.successors(s).any(|(l, _)| skip[l.0])
    }

    pub fn is_stable(&self, s: StateId, skip_labels: &BTreeSet<EventLabel>) -> bool {
        self.is_stable_masked(s, &self.mask(skip_labels))
    }

    /// States with no outgoing skip-labelled transition.
    pub fn stable_states(&self, skip_labels: &BTreeSet<EventLabel>) -> BTreeSet<StateId> {
        let skip = self.mask(skip_labels);
        self.state_ids()
            .filter(|&s| self.is_stable_masked(s, &skip))
            .collect()
    }

    /// States lying on a non-empty cycle of skip-labelled transitions.
    pub fn divergent_states(&self, skip_labels: &BTreeSet<EventLabel>) -> BTreeSet<StateId> {
        divergence::divergent(self, &self.mask(skip_labels))
    }

    /// All failures `(σ, X)` with `|σ| <= max_depth`, `last(σ)` stable and
    /// `X` the refusal of `last(σ)` over `alphabet`. Enumerates traces
    /// explicitly, so the cost is exponential in `max_depth`.
    pub fn failures(
        &self,
        skip_labels: &BTreeSet<EventLabel>,
        alphabet: &BTreeSet<EventLabel>,
        max_depth: usize,
    ) -> BTreeSet<Failure> {
        let skip = self.mask(skip_labels);
        let mut out = BTreeSet::new();
        let mut layer: BTreeSet<(Vec<LabelId>, StateId)> =
            BTreeSet::from([(Vec::new(), self.initial())]);
        for depth in 0..=max_depth {
            for (trace, s) in &layer {
                if self.is_stable_masked(*s, &skip) {
                    let labels = trace.iter().map(|l| self.label(*l).clone()).collect();
                    out.insert((labels, self.refusal(*s, alphabet)));
                }
            }
            if depth == max_depth {
                break;
            }
            let mut next = BTreeSet::new();
            for (trace, s) in &layer {
                for (l, d) in self.successors(*s) {
                    let mut t = trace.clone();
                    t.push(l);
                    next.insert((t, d));
                }
            }
            layer = next;
        }
        out
    }

    /// Whether every step of `trace` is a transition of this space.
    pub fn replays(&self, trace: &Trace) -> bool {
        if trace.origin != self.initial() {
            return false;
        }
        let mut cur = trace.origin;
        for (label, dst) in &trace.steps {
            let Some(l) = self.label_id(label) else {
                return false;
            };
            if !self.successors(cur).any(|(ll, d)| ll == l && d == *dst) {
                return false;
            }
            cur = *dst;
        }
        true
    }

    pub(crate) fn reachable_from(&self, s: StateId) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(cur) = queue.pop_front() {
            for (_, d) in self.successors(cur) {
                if seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        seen
    }

    /// Shortest run from the initial state to `target`, in BFS order.
    pub fn path_to(&self, target: StateId) -> Option<Trace> {
        let mut parent: BTreeMap<StateId, (LabelId, StateId)> = BTreeMap::new();
        let mut queue = VecDeque::from([self.initial()]);
        let mut seen = BTreeSet::from([self.initial()]);
        while let Some(cur) = queue.pop_front() {
            if cur == target {
                let mut steps = Vec::new();
                let mut at = cur;
                while let Some(&(l, prev)) = parent.get(&at) {
                    steps.push((self.label(l).clone(), at));
                    at = prev;
                }
                steps.reverse();
                return Some(Trace {
                    origin: self.initial(),
                    steps,
                });
            }
            for (l, d) in self.successors(cur) {
                if seen.insert(d) {
                    parent.insert(d, (l, cur));
                    queue.push_back(d);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CompiledMachine;
    use crate::parser::parse_machine;

    fn space(src: &str) -> StateSpace {
        let m = CompiledMachine::new(&parse_machine(src).unwrap()).unwrap();
        explore(&m, 1000).unwrap()
    }

    const M0: &str = "machine m0 variables stock : int 0..3; coin : int 0..3;
      init stock := 3; coin := 0;
      events
        insert_coin == when stock > 0 /\\ coin + 1 <= stock then coin := coin + 1 end
        vend == when coin > 0 /\\ stock > 0 then stock := stock - 1 || coin := coin - 1 end
        restock == when stock = 0 then stock := 3 end
      end";

    fn names(ls: &BTreeSet<EventLabel>) -> Vec<String> {
        ls.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn enabled_and_refused() {
        let ss = space(M0);
        let init = ss.initial();
        assert_eq!(names(&ss.enabled(init)), ["insert_coin"]);
        let empty = ss.lookup(&[("stock", Value::Int(0)), ("coin", Value::Int(0))]).unwrap();
        assert_eq!(names(&ss.enabled(empty)), ["restock"]);

        let alphabet: BTreeSet<_> = ss.labels().cloned().collect();
        assert_eq!(names(&ss.refusal(init, &alphabet)), ["restock", "vend"]);
        let (_, full) = ss.state_ids().map(|s| (s, ss.enabled(s))).max_by_key(|(_, e)| e.len()).unwrap();
        assert_eq!(full.len(), 2);
    }

    #[test]
    fn deadlock_has_nothing_enabled() {
        let ss = space("machine m variables x : int 0..1; init x := 0; events e == when x = 0 then x := 1 end end");
        let s1 = ss.lookup(&[("x", Value::Int(1))]).unwrap();
        assert!(ss.enabled(s1).is_empty());
    }

    #[test]
    fn refusal_of_fully_enabled_state_is_empty() {
        let ss = space("machine m variables x : bool; init x := false; events a == then x := true end b == then x := false end end");
        let alphabet: BTreeSet<_> = ss.labels().cloned().collect();
        for s in ss.state_ids() {
            assert!(ss.refusal(s, &alphabet).is_empty());
        }
    }

    #[test]
    #[should_panic(expected = "does not cover")]
    fn refusal_requires_covering_alphabet() {
        let ss = space(M0);
        ss.refusal(ss.initial(), &BTreeSet::new());
    }

    #[test]
    fn no_skip_labels_means_all_stable() {
        let ss = space(M0);
        assert_eq!(ss.stable_states(&BTreeSet::new()).len(), ss.state_count());
        assert!(ss.divergent_states(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn m0_failures_at_depth_two() {
        let ss = space(M0);
        let alphabet: BTreeSet<_> = ss.labels().cloned().collect();
        let fs = ss.failures(&BTreeSet::new(), &alphabet, 2);
        let ic = EventLabel::plain("insert_coin");
        let vend = EventLabel::plain("vend");
        let restock = EventLabel::plain("restock");
        assert!(fs.contains(&(vec![], BTreeSet::from([vend.clone(), restock.clone()]))));
        assert!(fs.contains(&(vec![ic.clone()], BTreeSet::from([restock.clone()]))));
        // <insert_coin, vend> returns to stock=2, coin=0.
        assert!(fs.contains(&(vec![ic, vend.clone()], BTreeSet::from([vend, restock]))));
        assert!(fs.iter().all(|(t, _)| t.len() <= 2));
    }

    #[test]
    fn failures_skip_unstable_roots() {
        let ss = space(
            "machine c refines a variables x : int 0..1; init x := 0; events
               t == when x = 0 then x := 1 end
             end",
        );
        let skip: BTreeSet<_> = ss.labels().cloned().collect();
        assert!(ss.failures(&skip, &BTreeSet::new(), 0).is_empty());
        assert_eq!(ss.failures(&skip, &BTreeSet::new(), 1).len(), 1);
    }

    #[test]
    fn replay_and_paths() {
        let ss = space(M0);
        for s in ss.state_ids() {
            let t = ss.path_to(s).unwrap();
            assert_eq!(t.last(), s);
            assert!(ss.replays(&t));
        }
        let mut bogus = ss.path_to(StateId(3)).unwrap();
        bogus.steps.push((EventLabel::plain("restock"), StateId(0)));
        assert!(!ss.replays(&bogus));
    }

    #[test]
    fn from_parts_rejects_unreachable_states() {
        let err = StateSpace::from_parts(
            "m",
            vec!["x".into()],
            vec![State(vec![Value::Int(0)]), State(vec![Value::Int(1)])],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(err.contains("unreachable"));
    }
}
