use std::collections::BTreeSet;

use serde_json::{json, Map, Value as Json};

use super::{Detail, Verdict};
use crate::model::Value;
use crate::space::{EventLabel, StateId, StateSpace, Trace};

fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(n) => json!(n),
        Value::Bool(b) => json!(b),
        Value::Sym(s) => json!(s),
    }
}

pub fn label_json(l: &EventLabel) -> Json {
    let params: Map<String, Json> = l.params.iter().map(|(n, v)| (n.clone(), value_json(v))).collect();
    json!({ "event": l.event, "params": params })
}

fn state_json(ss: &StateSpace, s: StateId) -> Json {
    let state: Map<String, Json> = ss
        .variables()
        .iter()
        .zip(&ss.state(s).0)
        .map(|(n, v)| (n.clone(), value_json(v)))
        .collect();
    Json::Object(state)
}

/// `{initial, steps}`: the initial valuation and one `{event, params, state}`
/// object per step, `state` being the valuation reached by the step.
pub fn trace_json(ss: &StateSpace, t: &Trace) -> Json {
    let steps: Vec<Json> = t
        .steps
        .iter()
        .map(|(l, s)| {
            let mut obj = label_json(l);
            obj["state"] = state_json(ss, *s);
            obj
        })
        .collect();
    json!({ "initial": state_json(ss, t.origin), "steps": steps })
}

fn label_set(set: &BTreeSet<EventLabel>) -> Json {
    set.iter().map(|l| Json::String(l.to_string())).collect()
}

/// The verdict as a JSON object.
///
/// `{"result": "refines"}` on success. A failure adds `reason`,
/// `concrete_trace`, `abstract_trace` and `detail`.
pub fn verdict_json(v: &Verdict, abs: &StateSpace, conc: &StateSpace) -> Json {
    let Some(cex) = v.counterexample() else {
        return json!({ "result": "refines" });
    };
    let detail = match &cex.detail {
        Detail::FailureMismatch {
            concrete_enabled,
            abstract_enabled,
            abstract_refusal,
            abs_refusal,
        } => json!({
            "concrete_enabled": label_set(concrete_enabled),
            "abstract_enabled": label_set(abstract_enabled),
            "abstract_refusal": label_set(abstract_refusal),
            "abs_refusal": label_set(abs_refusal),
        }),
        Detail::Divergence { cycle } => json!({
            "cycle": cycle.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        }),
        Detail::TraceMismatch { unmatched, image } => json!({
            "unmatched": unmatched.to_string(),
            "image": image.to_string(),
        }),
    };
    json!({
        "result": "fails",
        "reason": cex.reason.as_str(),
        "concrete_trace": trace_json(conc, &cex.concrete_trace),
        "abstract_trace": trace_json(abs, &cex.abstract_trace),
        "detail": detail,
    })
}
