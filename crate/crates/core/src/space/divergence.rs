use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{EventLabel, LabelId, StateId, StateSpace};

/// Marks states on a skip cycle using Tarjan's algorithm on the
/// skip-labelled subgraph: a state diverges iff its component has more than
/// one member or it has a skip self-loop.
pub(super) fn divergent(ss: &StateSpace, skip: &[bool]) -> BTreeSet<StateId> {
    let n = ss.state_count();
    let succ = |v: usize| -> Vec<usize> {
        ss.successors(StateId(v))
            .filter(|(l, _)| skip[l.0])
            .map(|(_, d)| d.0)
            .collect()
    };

    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut out = BTreeSet::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, its skip successors, position of the next successor)
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some((v, ws, pos)) = call.last_mut() {
            let v = *v;
            if *pos < ws.len() {
                let w = ws[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            let self_loop = ws.contains(&v);
            call.pop();
            if let Some((parent, ..)) = call.last() {
                low[*parent] = low[*parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                if component.len() > 1 || self_loop {
                    out.extend(component.into_iter().map(StateId));
                }
            }
        }
    }
    out
}

/// A shortest non-empty skip path from `s` back to itself, if one exists.
pub fn skip_cycle_through(
    ss: &StateSpace,
    s: StateId,
    skip_labels: &BTreeSet<EventLabel>,
) -> Option<Vec<(EventLabel, StateId)>> {
    let skip = ss.mask(skip_labels);
    let mut parent: BTreeMap<StateId, (LabelId, StateId)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (l, d) in ss.successors(s).filter(|(l, _)| skip[l.0]) {
        if d == s {
            return Some(vec![(ss.label(l).clone(), s)]);
        }
        if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(d) {
            e.insert((l, s));
            queue.push_back(d);
        }
    }
    while let Some(cur) = queue.pop_front() {
        for (l, d) in ss.successors(cur).filter(|(l, _)| skip[l.0]) {
            if d == s {
                let mut steps = vec![(ss.label(l).clone(), s)];
                let mut at = cur;
                while at != s {
                    let (pl, prev) = parent[&at];
                    steps.push((ss.label(pl).clone(), at));
                    at = prev;
                }
                steps.reverse();
                return Some(steps);
            }
            if d != s && !parent.contains_key(&d) {
                parent.insert(d, (l, cur));
                queue.push_back(d);
            }
        }
    }
    None
}
