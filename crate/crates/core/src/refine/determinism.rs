use std::collections::BTreeMap;

use crate::space::{EventLabel, StateId, StateSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Determinism {
    Deterministic,
    /// `label` leads from `state` to two different states.
    Nondeterministic {
        state: StateId,
        label: EventLabel,
        successors: (StateId, StateId),
    },
}

impl Determinism {
    pub fn holds(&self) -> bool {
        matches!(self, Determinism::Deterministic)
    }
}

/// Label determinism: at most one successor per state and label. With a
/// single initial state this makes every trace end in a unique state, hence
/// with a unique refusal set.
pub fn is_event_deterministic(ss: &StateSpace) -> Determinism {
    for s in ss.state_ids() {
        let mut seen = BTreeMap::new();
        for (l, d) in ss.successors(s) {
            if let Some(&first) = seen.get(&l) {
                if first != d {
                    return Determinism::Nondeterministic {
                        state: s,
                        label: ss.label(l).clone(),
                        successors: (first, d),
                    };
                }
            } else {
                seen.insert(l, d);
            }
        }
    }
    Determinism::Deterministic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CompiledMachine, Value};
    use crate::parser::parse_machine;
    use crate::space::explore;

    fn space(src: &str) -> StateSpace {
        explore(&CompiledMachine::new(&parse_machine(src).unwrap()).unwrap(), 100).unwrap()
    }

    #[test]
    fn parameters_separate_labels() {
        let ss = space(
            "machine ADet variables pc : int 0..3; init pc := 0; events
               a == any npc : int 0..3 where pc = 0 /\\ npc in {1, 2} then pc := npc end
               b == when pc = 2 then pc := 3 end
             end",
        );
        assert!(is_event_deterministic(&ss).holds());
    }

    #[test]
    fn hidden_choice_is_nondeterministic() {
        let ss = space(
            "machine A variables pc : int 0..3; init pc := 0; events
               a == choose npc : int 1..2 when pc = 0 then pc := npc end
               b == when pc = 2 then pc := 3 end
             end",
        );
        let Determinism::Nondeterministic { state, label, successors } = is_event_deterministic(&ss) else {
            panic!("expected a witness");
        };
        assert_eq!(state, ss.initial());
        assert_eq!(label, EventLabel::plain("a"));
        assert_eq!(ss.state(successors.0).0, vec![Value::Int(1)]);
        assert_eq!(ss.state(successors.1).0, vec![Value::Int(2)]);
    }

    #[test]
    fn plain_guards_and_assignments_are_deterministic() {
        let ss = space(
            "machine m variables x : int 0..3; init x := 0; events
               up == when x < 3 then x := x + 1 end
               reset == when x = 3 then x := 0 end
             end",
        );
        assert!(is_event_deterministic(&ss).holds());
    }
}
