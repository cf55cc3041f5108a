use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::check::{assignable, machine_constants, Scope, Ty};
use super::{CompiledExpr, CompiledMachine, Machine, ModelError};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("machine `{concrete}` does not refine `{expected}`")]
    NotARefinement { concrete: String, expected: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("event `{event}` refines unknown abstract event `{target}`")]
    UnknownAbstractEvent { event: String, target: String },
    #[error("abstract event `{event}` is not refined by any concrete event")]
    NotRefined { event: String },
    #[error("event `{event}` lacks a witness for abstract parameter `{param}`")]
    MissingWitness { event: String, param: String },
    #[error("event `{event}` has a superfluous witness for `{param}`")]
    ExtraWitness { event: String, param: String },
    #[error("witness for `{param}` in event `{event}`: {message}")]
    BadWitness {
        event: String,
        param: String,
        message: String,
    },
    #[error("parameter `{param}` of event `{event}` has a different type than in `{target}`")]
    ParamType {
        event: String,
        target: String,
        param: String,
    },
}

/// How one abstract parameter gets its value from a concrete label.
#[derive(Debug, Clone)]
pub enum ParamSource {
    /// Copied from the concrete parameter at this index.
    Same(usize),
    /// Computed from the concrete parameters.
    Witness(CompiledExpr),
}

#[derive(Debug, Clone)]
pub struct PsiEntry {
    pub abstract_event: String,
    /// One entry per abstract parameter, in declaration order.
    pub sources: Vec<ParamSource>,
}

/// The concrete-to-abstract event correspondence of a refinement.
#[derive(Debug, Clone)]
pub struct RefinementLink {
    pub abstract_machine: CompiledMachine,
    pub concrete: CompiledMachine,
    /// Keyed by concrete event name; covers every event that is not new.
    pub psi_spec: BTreeMap<String, PsiEntry>,
    /// Concrete events that refine `skip`.
    pub new_events: BTreeSet<String>,
}

impl RefinementLink {
    pub fn is_new_event(&self, event: &str) -> bool {
        self.new_events.contains(event)
    }
}

/// Pairs an abstract machine with a concrete machine that names it in its
/// `refines` header, checking the event correspondence.
pub fn build_refinement_link(
    abstract_machine: &Machine,
    concrete: &Machine,
) -> Result<RefinementLink, LinkError> {
    if concrete.refines.as_deref() != Some(abstract_machine.name.as_str()) {
        return Err(LinkError::NotARefinement {
            concrete: concrete.name.clone(),
            expected: abstract_machine.name.clone(),
        });
    }
    let abs = CompiledMachine::new(abstract_machine)?;
    let conc = CompiledMachine::new(concrete)?;

    let mut constants = machine_constants(abstract_machine);
    constants.extend(machine_constants(concrete));

    let mut psi_spec = BTreeMap::new();
    let mut new_events = BTreeSet::new();
    let mut refined = HashSet::new();

    for ce in &concrete.events {
        let Some(clause) = &ce.refines else {
            new_events.insert(ce.name.clone());
            continue;
        };
        let Some(ae) = abstract_machine.event(&clause.abstract_event) else {
            return Err(LinkError::UnknownAbstractEvent {
                event: ce.name.clone(),
                target: clause.abstract_event.clone(),
            });
        };
        refined.insert(ae.name.as_str());

        for w in &clause.witnesses {
            let is_param = ae.params.iter().any(|p| p.name == w.param);
            let covered = ce.params.iter().any(|p| p.name == w.param);
            let repeated = clause.witnesses.iter().filter(|o| o.param == w.param).count() > 1;
            if !is_param || covered || repeated {
                return Err(LinkError::ExtraWitness {
                    event: ce.name.clone(),
                    param: w.param.clone(),
                });
            }
        }

        let scope = Scope {
            args: &ce.params,
            vars: None,
            constants: &constants,
        };
        let mut sources = Vec::with_capacity(ae.params.len());
        for ap in &ae.params {
            if let Some(i) = ce.params.iter().position(|p| p.name == ap.name) {
                if Ty::of_domain(&ce.params[i].domain) != Ty::of_domain(&ap.domain) {
                    return Err(LinkError::ParamType {
                        event: ce.name.clone(),
                        target: ae.name.clone(),
                        param: ap.name.clone(),
                    });
                }
                sources.push(ParamSource::Same(i));
                continue;
            }
            let Some(w) = clause.witnesses.iter().find(|w| w.param == ap.name) else {
                return Err(LinkError::MissingWitness {
                    event: ce.name.clone(),
                    param: ap.name.clone(),
                });
            };
            let bad = |message: String| LinkError::BadWitness {
                event: ce.name.clone(),
                param: ap.name.clone(),
                message,
            };
            let (expr, ty) = scope.compile(&w.value).map_err(bad)?;
            if !assignable(&ap.domain, &ty) {
                return Err(bad(format!("a value of type {ty} cannot bind this parameter")));
            }
            sources.push(ParamSource::Witness(expr));
        }
        psi_spec.insert(
            ce.name.clone(),
            PsiEntry {
                abstract_event: ae.name.clone(),
                sources,
            },
        );
    }

    if let Some(ae) = abstract_machine
        .events
        .iter()
        .find(|e| !refined.contains(e.name.as_str()))
    {
        return Err(LinkError::NotRefined {
            event: ae.name.clone(),
        });
    }

    Ok(RefinementLink {
        abstract_machine: abs,
        concrete: conc,
        psi_spec,
        new_events,
    })
}
