use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use super::{EventLabel, LabelId, State, StateId, StateSpace, Transition};
use crate::model::{CompiledEvent, CompiledMachine, Domain, Value};

pub const DEFAULT_MAX_STATES: usize = 100_000;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("state space of `{machine}` exceeds {max_states} states")]
    BoundExceeded { machine: String, max_states: usize },
    #[error("event {label} assigns {value} to `{variable}` outside its domain, from state {state}")]
    OutOfDomain {
        state: String,
        label: String,
        variable: String,
        value: Value,
    },
}

/// Every combination of domain values, in canonical (odometer) order.
pub(crate) fn product(domains: &[&Domain]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::with_capacity(domains.len())];
    for d in domains {
        let vals = d.values();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn fire(m: &CompiledMachine, e: &CompiledEvent, state: &[Value], args: &[Value]) -> Result<Vec<Value>, (usize, Value)> {
    let mut next = state.to_vec();
    for (var, expr) in &e.actions {
        let v = expr.eval(state, args);
        if !m.domains[*var].contains(&v) {
            return Err((*var, v));
        }
        next[*var] = v;
    }
    Ok(next)
}

/// Breadth-first exploration from the initial state.
///
/// Successors of a state are ordered by event declaration, then by parameter
/// valuation in canonical domain order; states are numbered in discovery
/// order, so the result is identical across runs.
pub fn explore(m: &CompiledMachine, max_states: usize) -> Result<StateSpace, ExploreError> {
    let mut ss = StateSpace::new(m.name(), m.variables.clone());
    let bound = |ss: &StateSpace| ExploreError::BoundExceeded {
        machine: ss.machine.clone(),
        max_states,
    };
    if max_states == 0 {
        return Err(bound(&ss));
    }
    ss.states.insert(State(m.init.clone()));
    ss.outgoing.push(Vec::new());

    let arg_space: Vec<Vec<Vec<Value>>> = m
        .events
        .iter()
        .map(|e| {
            let doms: Vec<&Domain> = e.params.iter().chain(&e.choices).map(|p| &p.domain).collect();
            product(&doms)
        })
        .collect();

    let mut queue = VecDeque::from([StateId(0)]);
    while let Some(src) = queue.pop_front() {
        let state = ss.states[src.0].0.clone();
        let mut emitted: HashSet<(LabelId, StateId)> = HashSet::new();
        for (e, args_list) in m.events.iter().zip(&arg_space) {
            for args in args_list {
                if !e.guard.eval_bool(&state, args) {
                    continue;
                }
                let label = EventLabel {
                    event: e.name.clone(),
                    params: e
                        .params
                        .iter()
                        .zip(args)
                        .map(|(p, v)| (p.name.clone(), v.clone()))
                        .collect(),
                };
                let next = fire(m, e, &state, args).map_err(|(var, value)| ExploreError::OutOfDomain {
                    state: ss.render_state(src),
                    label: label.to_string(),
                    variable: m.variables[var].clone(),
                    value,
                })?;
                let (li, new_label) = ss.labels.insert_full(label);
                if new_label {
                    ss.by_label.push(Vec::new());
                }
                let (di, new_state) = ss.states.insert_full(State(next));
                if new_state {
                    if ss.states.len() > max_states {
                        return Err(bound(&ss));
                    }
                    ss.outgoing.push(Vec::new());
                    queue.push_back(StateId(di));
                }
                let (label, dst) = (LabelId(li), StateId(di));
                if emitted.insert((label, dst)) {
                    ss.push_transition(Transition { src, label, dst });
                }
            }
        }
    }
    Ok(ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_machine;

    fn compile(src: &str) -> CompiledMachine {
        CompiledMachine::new(&parse_machine(src).unwrap()).unwrap()
    }

    #[test]
    fn single_state_without_events() {
        let ss = explore(&compile("machine m variables x : int 0..0; init x := 0; events end"), 10).unwrap();
        assert_eq!((ss.state_count(), ss.transition_count()), (1, 0));
    }

    #[test]
    fn bound_is_enforced() {
        let m = compile(
            "machine m variables x : int 0..9; init x := 0; events
               inc == when x < 9 then x := x + 1 end
             end",
        );
        assert_eq!(explore(&m, 10).unwrap().state_count(), 10);
        assert!(matches!(explore(&m, 9), Err(ExploreError::BoundExceeded { max_states: 9, .. })));
    }

    #[test]
    fn assignments_read_the_pre_state() {
        let ss = explore(
            &compile(
                "machine m variables x : int 0..1; y : int 0..1; init x := 0; y := 1; events
                   swap == then x := y || y := x end
                 end",
            ),
            10,
        )
        .unwrap();
        assert_eq!(ss.state_count(), 2);
        assert_eq!(ss.state(StateId(1)).0, vec![Value::Int(1), Value::Int(0)]);
    }

    #[test]
    fn leaving_the_domain_is_an_error() {
        let m = compile(
            "machine m variables x : int 0..2; init x := 0; events
               inc == then x := x + 1 end
             end",
        );
        let err = explore(&m, 100).unwrap_err();
        assert!(matches!(err, ExploreError::OutOfDomain { ref variable, value: Value::Int(3), .. } if variable == "x"));
    }

    #[test]
    fn choices_do_not_appear_in_labels_and_collapse() {
        let ss = explore(
            &compile(
                "machine m variables pc : int 0..3; init pc := 0; events
                   a == choose n : int 1..2 where pc = 0 then pc := n end
                   b == choose k : bool when pc > 0 then pc := 0 end
                 end",
            ),
            10,
        )
        .unwrap();
        assert_eq!(ss.label_count(), 2);
        assert_eq!(ss.successors(StateId(0)).count(), 2);
        // Both values of `k` produce the same edge.
        assert_eq!(ss.successors(StateId(1)).count(), 1);
    }

    #[test]
    fn successor_order_is_canonical() {
        let ss = explore(
            &compile(
                "machine m variables c : enum {z, y, x}; init c := z; events
                   go == any t : enum {z, y, x} where t /= c then c := t end
                 end",
            ),
            10,
        )
        .unwrap();
        let labels: Vec<String> = ss.successors(StateId(0)).map(|(l, _)| ss.label(l).to_string()).collect();
        assert_eq!(labels, ["go(t=y)", "go(t=x)"]);
    }
}
