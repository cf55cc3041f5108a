use std::collections::{BTreeSet, HashSet};

use super::trace::to_trace;
use super::{Counterexample, Detail, FailReason, LabelMap, Mapped, Verdict};
use crate::space::{skip_cycle_through, EventLabel, LabelId, StateId, StateSpace};

/// A visible concrete step being matched against several abstract successors.
struct Branch {
    label: LabelId,
    dst: StateId,
    abstract_label: LabelId,
    candidates: Vec<StateId>,
    pos: usize,
    first_failure: Option<Box<Counterexample>>,
}

struct Frame {
    abs: StateId,
    succ: Vec<(LabelId, StateId)>,
    pos: usize,
    branch: Option<Branch>,
}

struct Search<'a> {
    abs: &'a StateSpace,
    conc: &'a StateSpace,
    map: &'a LabelMap,
    divergent: BTreeSet<StateId>,
    skip_labels: BTreeSet<EventLabel>,
    seen: HashSet<(StateId, StateId)>,
    stack: Vec<Frame>,
    tc: Vec<(LabelId, StateId)>,
    ta: Vec<(LabelId, StateId)>,
}

type Outcome = Result<(), Box<Counterexample>>;

/// Failure-divergence refinement by joint exploration of concrete and
/// abstract states.
///
/// Every reachable pair is visited once. At a stable concrete state the
/// psi-image of its enabled labels must equal the labels enabled at the
/// abstract state; an unstable concrete state must not lie on a skip cycle.
/// Skip steps keep the abstract state; a visible step continues with each
/// abstract successor under the mapped label and succeeds if one of them
/// does. The search is depth first over labels in canonical order, so the
/// reported counterexample is reproducible.
///
/// Complete when the abstract space is event deterministic. Otherwise a pair
/// first met on a failing branch is not revisited, so some failures may be
/// missed.
pub fn check_failure_divergence(abs: &StateSpace, conc: &StateSpace, map: &LabelMap) -> Verdict {
    let skip_labels = map.skip_labels(conc);
    let mut search = Search {
        abs,
        conc,
        map,
        divergent: conc.divergent_states(&skip_labels),
        skip_labels,
        seen: HashSet::new(),
        stack: Vec::new(),
        tc: Vec::new(),
        ta: Vec::new(),
    };
    match search.run() {
        Ok(()) => Verdict::Refines,
        Err(cex) => Verdict::Fails(cex),
    }
}

impl Search<'_> {
    fn run(&mut self) -> Outcome {
        let mut pending = self.enter(self.conc.initial(), self.abs.initial());
        loop {
            let Some(top) = self.stack.last_mut() else {
                return pending.expect("search finished without a result");
            };
            if let Some(result) = pending.take() {
                self.tc.pop();
                match top.branch.as_mut() {
                    None => {
                        if result.is_err() {
                            self.stack.pop();
                            pending = Some(result);
                            continue;
                        }
                    }
                    Some(b) => {
                        self.ta.pop();
                        match result {
                            Ok(()) => top.branch = None,
                            Err(cex) => {
                                b.first_failure.get_or_insert(cex);
                                b.pos += 1;
                                if b.pos == b.candidates.len() {
                                    let cex = b.first_failure.take().unwrap();
                                    self.stack.pop();
                                    pending = Some(Err(cex));
                                    continue;
                                }
                            }
                        }
                    }
                }
            }

            let top = self.stack.last_mut().unwrap();
            if let Some(b) = &top.branch {
                let a = b.candidates[b.pos];
                self.tc.push((b.label, b.dst));
                self.ta.push((b.abstract_label, a));
                let dst = b.dst;
                pending = self.enter(dst, a);
                continue;
            }
            if top.pos == top.succ.len() {
                self.stack.pop();
                pending = Some(Ok(()));
                continue;
            }
            let (l, d) = top.succ[top.pos];
            top.pos += 1;
            let s_a = top.abs;
            let map = self.map;
            match &map.table[l.0] {
                Mapped::Skip => {
                    self.tc.push((l, d));
                    pending = self.enter(d, s_a);
                }
                Mapped::Abstract(y) => {
                    let candidates: Vec<StateId> = self
                        .abs
                        .successors(s_a)
                        .filter(|(al, _)| al == y)
                        .map(|(_, ad)| ad)
                        .collect();
                    if candidates.is_empty() {
                        let cex = self.unmatched(l, d);
                        self.stack.pop();
                        pending = Some(Err(cex));
                    } else {
                        top.branch = Some(Branch {
                            label: l,
                            dst: d,
                            abstract_label: *y,
                            candidates,
                            pos: 0,
                            first_failure: None,
                        });
                    }
                }
                Mapped::Foreign(_) => {
                    let cex = self.unmatched(l, d);
                    self.stack.pop();
                    pending = Some(Err(cex));
                }
            }
        }
    }

    /// Starts work on a pair. Returns a result right away for pairs already
    /// seen and for failed local checks; otherwise pushes a frame.
    fn enter(&mut self, c: StateId, a: StateId) -> Option<Outcome> {
        if !self.seen.insert((c, a)) {
            return Some(Ok(()));
        }
        if let Err(cex) = self.local_check(c, a) {
            return Some(Err(cex));
        }
        self.stack.push(Frame {
            abs: a,
            succ: self.conc.successors(c).collect(),
            pos: 0,
            branch: None,
        });
        None
    }

    fn local_check(&self, c: StateId, a: StateId) -> Outcome {
        let unstable = self
            .conc
            .successors(c)
            .any(|(l, _)| self.map.table[l.0] == Mapped::Skip);
        if unstable {
            if !self.divergent.contains(&c) {
                return Ok(());
            }
            let cycle = skip_cycle_through(self.conc, c, &self.skip_labels)
                .expect("divergent state lies on a skip cycle");
            return Err(self.counterexample(
                FailReason::Divergence,
                Detail::Divergence {
                    cycle: cycle.into_iter().map(|(l, _)| l).collect(),
                },
            ));
        }

        let abstract_enabled = self.abs.enabled_ids(a);
        let mut image = BTreeSet::new();
        let mut foreign = false;
        for l in self.conc.enabled_ids(c) {
            match &self.map.table[l.0] {
                Mapped::Abstract(y) => {
                    image.insert(*y);
                }
                _ => foreign = true,
            }
        }
        if !foreign && image == abstract_enabled {
            return Ok(());
        }
        let concrete_enabled = self.conc.enabled(c);
        let abstract_enabled = self.abs.enabled(a);
        let concrete_refusal = self.map.concrete_alphabet().difference(&concrete_enabled).cloned().collect();
        Err(self.counterexample(
            FailReason::FailureMismatch,
            Detail::FailureMismatch {
                abstract_refusal: self.map.abstract_alphabet().difference(&abstract_enabled).cloned().collect(),
                abs_refusal: self.map.abs_refusal(&concrete_refusal),
                concrete_enabled,
                abstract_enabled,
            },
        ))
    }

    fn counterexample(&self, reason: FailReason, detail: Detail) -> Box<Counterexample> {
        Box::new(Counterexample {
            reason,
            concrete_trace: to_trace(self.conc, &self.tc),
            abstract_trace: to_trace(self.abs, &self.ta),
            detail,
        })
    }

    fn unmatched(&self, l: LabelId, d: StateId) -> Box<Counterexample> {
        let unmatched = self.conc.label(l).clone();
        let image = self.map.psi(&unmatched).expect("visible label");
        let mut cex = self.counterexample(FailReason::TraceMismatch, Detail::TraceMismatch { unmatched, image });
        cex.concrete_trace.steps.push((self.conc.label(l).clone(), d));
        cex
    }
}
