use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Counterexample, Detail, FailReason, LabelMap, Mapped, Verdict};
use crate::space::{LabelId, StateId, StateSpace, Trace};

pub(crate) fn to_trace(ss: &StateSpace, steps: &[(LabelId, StateId)]) -> Trace {
    Trace {
        origin: ss.initial(),
        steps: steps.iter().map(|&(l, s)| (ss.label(l).clone(), s)).collect(),
    }
}

/// Abstract states reachable from `set` by one `y`-step, sorted.
pub(crate) fn post(abs: &StateSpace, set: &[StateId], y: LabelId) -> Vec<StateId> {
    let out: BTreeSet<StateId> = set
        .iter()
        .flat_map(|&a| abs.successors(a).filter(move |(l, _)| *l == y).map(|(_, d)| d))
        .collect();
    out.into_iter().collect()
}

struct Node {
    conc: StateId,
    set: Vec<StateId>,
    parent: Option<(usize, LabelId)>,
}

/// Decides whether every concealed and renamed concrete trace is an abstract
/// trace.
///
/// Explores pairs of a concrete state and the set of abstract states
/// reachable by the corresponding abstract trace, breadth first. This is
/// exact for nondeterministic abstract machines too. The counterexample is a
/// shortest concrete trace whose last step cannot be matched.
pub fn check_trace_refinement(abs: &StateSpace, conc: &StateSpace, map: &LabelMap) -> Verdict {
    let mut nodes = vec![Node {
        conc: conc.initial(),
        set: vec![abs.initial()],
        parent: None,
    }];
    let mut index: HashMap<(StateId, Vec<StateId>), usize> = HashMap::new();
    index.insert((conc.initial(), vec![abs.initial()]), 0);
    let mut queue = VecDeque::from([0]);

    while let Some(n) = queue.pop_front() {
        let succ: Vec<_> = conc.successors(nodes[n].conc).collect();
        for (l, d) in succ {
            let set = match &map.table[l.0] {
                Mapped::Skip => nodes[n].set.clone(),
                Mapped::Abstract(y) => post(abs, &nodes[n].set, *y),
                Mapped::Foreign(_) => Vec::new(),
            };
            if set.is_empty() {
                return Verdict::Fails(Box::new(mismatch(abs, conc, map, &nodes, n, l, d)));
            }
            let key = (d, set);
            if !index.contains_key(&key) {
                index.insert(key.clone(), nodes.len());
                queue.push_back(nodes.len());
                nodes.push(Node {
                    conc: d,
                    set: key.1,
                    parent: Some((n, l)),
                });
            }
        }
    }
    Verdict::Refines
}

fn mismatch(
    abs: &StateSpace,
    conc: &StateSpace,
    map: &LabelMap,
    nodes: &[Node],
    last: usize,
    label: LabelId,
    dst: StateId,
) -> Counterexample {
    let mut path = vec![last];
    while let Some((p, _)) = nodes[*path.last().unwrap()].parent {
        path.push(p);
    }
    path.reverse();

    let mut conc_steps = Vec::new();
    // (set before the step, abstract label) for every visible step
    let mut visible = Vec::new();
    for w in path.windows(2) {
        let (from, to) = (&nodes[w[0]], &nodes[w[1]]);
        let l = to.parent.unwrap().1;
        conc_steps.push((l, to.conc));
        if let Mapped::Abstract(y) = map.table[l.0] {
            visible.push((&from.set, y));
        }
    }
    conc_steps.push((label, dst));

    // Walk backwards choosing, for each visible step, a predecessor of the
    // state chosen for the step after it.
    let mut chosen = nodes[last].set[0];
    let mut abs_steps = Vec::with_capacity(visible.len());
    for (before, y) in visible.into_iter().rev() {
        abs_steps.push((y, chosen));
        chosen = *before
            .iter()
            .find(|&&a| abs.successors(a).any(|(l, d)| l == y && d == chosen))
            .expect("abstract sets are closed under predecessors");
    }
    abs_steps.reverse();

    let unmatched = conc.label(label).clone();
    let image = map.psi(&unmatched).expect("only visible steps can be unmatched");
    Counterexample {
        reason: FailReason::TraceMismatch,
        concrete_trace: to_trace(conc, &conc_steps),
        abstract_trace: to_trace(abs, &abs_steps),
        detail: Detail::TraceMismatch { unmatched, image },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_machine;
    use crate::refine::Pair;
    use crate::space::EventLabel;

    fn pair(a: &str, c: &str) -> Pair {
        Pair::build(&parse_machine(a).unwrap(), &parse_machine(c).unwrap(), 1000).unwrap()
    }

    const A: &str = "machine A variables pc : int 0..3; init pc := 0; events
        a == choose n : int 1..2 when pc = 0 then pc := n end
        b == when pc = 2 then pc := 3 end
      end";

    #[test]
    fn nondeterministic_abstract_is_handled_exactly() {
        let ok = pair(
            A,
            "machine C refines A variables pc : int 0..3; init pc := 0; events
               a refines a == when pc = 0 then pc := 2 end
               b refines b == when pc = 2 then pc := 3 end
             end",
        );
        assert!(ok.check_trace().refines());
    }

    #[test]
    fn shortest_unmatched_trace_is_reported() {
        let p = pair(
            A,
            "machine C refines A variables pc : int 0..3; init pc := 0; events
               a refines a == when pc = 0 then pc := 1 end
               b refines b == when pc = 1 \\/ pc = 2 then pc := pc + 1 end
             end",
        );
        let v = p.check_trace();
        let cex = v.counterexample().unwrap();
        assert_eq!(cex.reason, FailReason::TraceMismatch);
        let (a, b) = (EventLabel::plain("a"), EventLabel::plain("b"));
        assert_eq!(cex.concrete_trace.labels(), [a.clone(), b.clone(), b.clone()]);
        assert_eq!(cex.abstract_trace.labels(), [a, b]);
        // The abstract run goes through pc = 2, the only state enabling b.
        assert_eq!(cex.abstract_trace.steps[0].1, p.abs.lookup(&[("pc", crate::model::Value::Int(2))]).unwrap());
        assert!(p.conc.replays(&cex.concrete_trace));
        assert!(p.abs.replays(&cex.abstract_trace));
    }

    #[test]
    fn skips_keep_the_abstract_set() {
        let p = pair(
            "machine A variables x : int 0..1; init x := 0; events go == when x = 0 then x := 1 end end",
            "machine C refines A variables x : int 0..1; y : int 0..2; init x := 0; y := 0; events
               go refines go == when x = 0 /\\ y = 2 then x := 1 end
               tick == when y < 2 then y := y + 1 end
             end",
        );
        assert!(p.check_trace().refines());
    }
}
