use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EventLabel, LabelId, State, StateId, StateSpace, Transition};
use crate::model::Value;

const FORMAT: &str = "ebfdr-space/1";

/// On-disk layout of an explored space. States and labels are listed in
/// index order; state 0 is initial. Transitions are `[src, label, dst]`
/// index triples grouped by source state.
#[derive(Serialize, Deserialize)]
struct SpaceFile {
    format: String,
    machine: String,
    variables: Vec<String>,
    states: Vec<Vec<Value>>,
    labels: Vec<EventLabel>,
    transitions: Vec<[usize; 3]>,
}

#[derive(Debug, Error)]
pub enum SpaceFormatError {
    #[error("malformed state space file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported state space format `{0}`")]
    Version(String),
    #[error("inconsistent state space file: {0}")]
    Structure(String),
}

pub fn save_space(ss: &StateSpace) -> String {
    let mut transitions = Vec::with_capacity(ss.transition_count());
    for s in ss.state_ids() {
        for (l, d) in ss.successors(s) {
            transitions.push([s.0, l.0, d.0]);
        }
    }
    let file = SpaceFile {
        format: FORMAT.to_string(),
        machine: ss.machine.clone(),
        variables: ss.variables.clone(),
        states: ss.states.iter().map(|s| s.0.clone()).collect(),
        labels: ss.labels.iter().cloned().collect(),
        transitions,
    };
    serde_json::to_string_pretty(&file).expect("state spaces serialize")
}

pub fn load_space(text: &str) -> Result<StateSpace, SpaceFormatError> {
    let file: SpaceFile = serde_json::from_str(text)?;
    if file.format != FORMAT {
        return Err(SpaceFormatError::Version(file.format));
    }
    StateSpace::from_parts(
        &file.machine,
        file.variables,
        file.states.into_iter().map(State).collect(),
        file.labels,
        file
            .transitions
            .into_iter()
            .map(|[s, l, d]| Transition {
                src: StateId(s),
                label: LabelId(l),
                dst: StateId(d),
            })
            .collect(),
    )
    .map_err(SpaceFormatError::Structure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CompiledMachine;
    use crate::parser::parse_machine;
    use crate::space::explore;

    #[test]
    fn round_trip() {
        let m = parse_machine(
            "machine m variables x : int 0..2; c : enum {p, q}; init x := 0; c := p; events
               go == any t : enum {p, q} where x < 2 then x := x + 1 || c := t end
             end",
        )
        .unwrap();
        let ss = explore(&CompiledMachine::new(&m).unwrap(), 100).unwrap();
        let text = save_space(&ss);
        assert!(text.contains("\"t\",\n"), "{text}");
        let back = load_space(&text).unwrap();
        assert_eq!(save_space(&back), text);
        assert_eq!(back.state_count(), ss.state_count());
        assert_eq!(back.transitions(), ss.transitions());
    }

    #[test]
    fn rejects_dangling_transitions() {
        let text = r#"{"format":"ebfdr-space/1","machine":"m","variables":["x"],"states":[[0]],"labels":[],"transitions":[[0,0,1]]}"#;
        assert!(matches!(load_space(text), Err(SpaceFormatError::Structure(_))));
        let text = text.replace("/1", "/9");
        assert!(matches!(load_space(&text), Err(SpaceFormatError::Version(_))));
    }
}
