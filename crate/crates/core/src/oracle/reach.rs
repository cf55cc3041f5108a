use std::collections::{BTreeSet, VecDeque};

use crate::model::{eval_expr, Bindings, Domain, Machine, Param, Value};
use crate::space::EventLabel;

/// A state space as plain sets of valuations, for comparison with
/// [`crate::space::explore`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteSpace {
    pub initial: Vec<Value>,
    pub states: BTreeSet<Vec<Value>>,
    pub transitions: BTreeSet<(Vec<Value>, EventLabel, Vec<Value>)>,
}

fn combos(params: &[&Param]) -> Vec<Vec<Value>> {
    match params.split_first() {
        None => vec![Vec::new()],
        Some((p, rest)) => {
            let tails = combos(rest);
            p.domain
                .values()
                .into_iter()
                .flat_map(|v| {
                    tails.iter().map(move |t| {
                        let mut c = vec![v.clone()];
                        c.extend(t.iter().cloned());
                        c
                    })
                })
                .collect()
        }
    }
}

/// Reachability straight from the syntax tree: every event is tried with
/// every argument combination in every reached state, evaluating guards and
/// actions with [`eval_expr`].
pub fn brute_force_explore(m: &Machine, max_states: usize) -> Result<BruteSpace, String> {
    let mut constants = BTreeSet::new();
    let mut note = |d: &Domain| {
        if let Domain::Enum(cs) = d {
            constants.extend(cs.iter().cloned());
        }
    };
    m.variables.iter().for_each(|v| note(&v.domain));
    m.events.iter().flat_map(|e| e.params.iter().chain(&e.choices)).for_each(|p| note(&p.domain));

    let base = Bindings::new().constants(constants.iter().cloned());
    let mut initial = Vec::new();
    for v in &m.variables {
        let a = m
            .init
            .iter()
            .find(|a| a.target == v.name)
            .ok_or_else(|| format!("{} not initialised", v.name))?;
        initial.push(eval_expr(&a.value, &base).map_err(|e| e.to_string())?);
    }

    let mut states = BTreeSet::from([initial.clone()]);
    let mut transitions = BTreeSet::new();
    let mut queue = VecDeque::from([initial.clone()]);
    while let Some(state) = queue.pop_front() {
        let mut env = base.clone();
        for (v, val) in m.variables.iter().zip(&state) {
            env = env.var(&v.name, val.clone());
        }
        for e in &m.events {
            let args: Vec<&Param> = e.params.iter().chain(&e.choices).collect();
            for combo in combos(&args) {
                let mut env = env.clone();
                for (p, v) in args.iter().zip(&combo) {
                    env = env.param(&p.name, v.clone());
                }
                if eval_expr(&e.guard, &env).map_err(|e| e.to_string())? != Value::Bool(true) {
                    continue;
                }
                let mut next = state.clone();
                for a in &e.actions {
                    let i = m.variables.iter().position(|v| v.name == a.target).ok_or("bad target")?;
                    let v = eval_expr(&a.value, &env).map_err(|e| e.to_string())?;
                    if !m.variables[i].domain.contains(&v) {
                        return Err(format!("{} leaves the domain of {}", e.name, a.target));
                    }
                    next[i] = v;
                }
                let label = EventLabel {
                    event: e.name.clone(),
                    params: e.params.iter().zip(&combo).map(|(p, v)| (p.name.clone(), v.clone())).collect(),
                };
                if states.insert(next.clone()) {
                    if states.len() > max_states {
                        return Err(format!("more than {max_states} states"));
                    }
                    queue.push_back(next.clone());
                }
                transitions.insert((state.clone(), label, next));
            }
        }
    }
    Ok(BruteSpace {
        initial,
        states,
        transitions,
    })
}
