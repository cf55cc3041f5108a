use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{ParamSource, RefinementLink};
use crate::space::{EventLabel, LabelId, StateSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("{0} refines skip and has no abstract counterpart")]
    SkipLabel(EventLabel),
    #[error("{0} is not a label of the concrete machine")]
    Unknown(EventLabel),
}

/// Where a concrete label of the explored space goes under psi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Mapped {
    Skip,
    Abstract(LabelId),
    /// Maps to an abstract label that the abstract space never exhibits.
    Foreign(EventLabel),
}

/// The label-level refinement correspondence between two explored spaces.
///
/// `psi` renames concrete labels: same-named parameters are copied and the
/// rest are computed from witnesses, so the image depends on the label only.
/// Refusals are taken over alphabets of reachable labels: the concrete
/// alphabet holds the non-skip labels of the concrete space, the abstract one
/// the labels of the abstract space together with the psi-image of the
/// concrete alphabet.
#[derive(Debug, Clone)]
pub struct LabelMap {
    link: RefinementLink,
    concrete_alphabet: BTreeSet<EventLabel>,
    abstract_alphabet: BTreeSet<EventLabel>,
    preimage: BTreeMap<EventLabel, BTreeSet<EventLabel>>,
    pub(crate) table: Vec<Mapped>,
}

impl LabelMap {
    pub fn new(link: RefinementLink, abs: &StateSpace, conc: &StateSpace) -> Self {
        let mut map = LabelMap {
            link,
            concrete_alphabet: BTreeSet::new(),
            abstract_alphabet: abs.labels().cloned().collect(),
            preimage: BTreeMap::new(),
            table: Vec::with_capacity(conc.label_count()),
        };
        for l in conc.labels() {
            let mapped = match map.psi(l) {
                Err(_) => Mapped::Skip,
                Ok(y) => {
                    map.concrete_alphabet.insert(l.clone());
                    map.abstract_alphabet.insert(y.clone());
                    map.preimage.entry(y.clone()).or_default().insert(l.clone());
                    match abs.label_id(&y) {
                        Some(id) => Mapped::Abstract(id),
                        None => Mapped::Foreign(y),
                    }
                }
            };
            map.table.push(mapped);
        }
        map
    }

    pub fn link(&self) -> &RefinementLink {
        &self.link
    }

    pub fn is_skip(&self, l: &EventLabel) -> bool {
        self.link.is_new_event(&l.event)
    }

    /// Non-skip labels of the concrete space.
    pub fn concrete_alphabet(&self) -> &BTreeSet<EventLabel> {
        &self.concrete_alphabet
    }

    pub fn abstract_alphabet(&self) -> &BTreeSet<EventLabel> {
        &self.abstract_alphabet
    }

    /// Skip labels of the concrete space.
    pub fn skip_labels(&self, conc: &StateSpace) -> BTreeSet<EventLabel> {
        conc.labels_of_events(&self.link.new_events)
    }

    /// The abstract label a non-skip concrete label refines.
    pub fn psi(&self, l: &EventLabel) -> Result<EventLabel, LabelError> {
        if self.link.is_new_event(&l.event) {
            return Err(LabelError::SkipLabel(l.clone()));
        }
        let event = self
            .link
            .concrete
            .events
            .iter()
            .find(|e| e.name == l.event)
            .filter(|e| {
                e.params.len() == l.params.len()
                    && e.params.iter().zip(&l.params).all(|(p, (n, v))| &p.name == n && p.domain.contains(v))
            })
            .ok_or_else(|| LabelError::Unknown(l.clone()))?;
        let entry = &self.link.psi_spec[&event.name];
        let abstract_event = self
            .link
            .abstract_machine
            .events
            .iter()
            .find(|e| e.name == entry.abstract_event)
            .expect("link targets an abstract event");
        let args: Vec<_> = l.params.iter().map(|(_, v)| v.clone()).collect();
        let params = abstract_event
            .params
            .iter()
            .zip(&entry.sources)
            .map(|(p, src)| {
                let v = match src {
                    ParamSource::Same(i) => args[*i].clone(),
                    ParamSource::Witness(e) => e.eval(&[], &args),
                };
                (p.name.clone(), v)
            })
            .collect();
        Ok(EventLabel {
            event: entry.abstract_event.clone(),
            params,
        })
    }

    /// Conceals skip labels and renames the rest.
    pub fn tau(&self, sigma: &[EventLabel]) -> Result<Vec<EventLabel>, LabelError> {
        let mut out = Vec::with_capacity(sigma.len());
        for l in sigma {
            match self.psi(l) {
                Ok(y) => out.push(y),
                Err(LabelError::SkipLabel(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Abstract labels all of whose concrete counterparts lie in `refused`.
    ///
    /// An abstract label without any concrete counterpart counts as refused.
    pub fn abs_refusal(&self, refused: &BTreeSet<EventLabel>) -> BTreeSet<EventLabel> {
        debug_assert!(refused.iter().all(|l| !self.is_skip(l)));
        self.abstract_alphabet
            .iter()
            .filter(|y| {
                self.preimage
                    .get(*y)
                    .map_or(true, |pre| pre.is_subset(refused))
            })
            .cloned()
            .collect()
    }

    /// The psi-image of a set of concrete labels, skip labels dropped.
    pub fn image(&self, labels: &BTreeSet<EventLabel>) -> BTreeSet<EventLabel> {
        labels.iter().filter_map(|l| self.psi(l).ok()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_refinement_link, Value};
    use crate::parser::parse_machine;
    use crate::space::explore;

    fn map(abs: &str, conc: &str) -> (LabelMap, StateSpace, StateSpace) {
        let (a, c) = (parse_machine(abs).unwrap(), parse_machine(conc).unwrap());
        let link = build_refinement_link(&a, &c).unwrap();
        let a_ss = explore(&link.abstract_machine, 1000).unwrap();
        let c_ss = explore(&link.concrete, 1000).unwrap();
        (LabelMap::new(link, &a_ss, &c_ss), a_ss, c_ss)
    }

    #[test]
    fn witness_evaluation() {
        let (m, ..) = map(
            "machine A variables pc : int 0..3; init pc := 0; events
               a == any npc : int 1..2 where pc = 0 then pc := npc end
             end",
            "machine C refines A variables pc : int 0..3; init pc := 0; events
               a refines a with npc := extra - 4 == any extra : int 5..6 where pc = 0 then pc := extra - 4 end
             end",
        );
        let l = EventLabel::with("a", &[("extra", Value::Int(5))]);
        assert_eq!(m.psi(&l).unwrap(), EventLabel::with("a", &[("npc", Value::Int(1))]));
        let bad = EventLabel::with("a", &[("extra", Value::Int(9))]);
        assert!(matches!(m.psi(&bad), Err(LabelError::Unknown(_))));
    }

    #[test]
    fn skip_labels_have_no_image() {
        let (m, _, c) = map(
            "machine A variables x : int 0..1; init x := 0; events a == when x = 0 then x := 1 end end",
            "machine C refines A variables x : int 0..1; y : bool; init x := 0; y := false; events
               a refines a == when x = 0 /\\ y then x := 1 end
               s == when not y then y := true end
             end",
        );
        let s = EventLabel::plain("s");
        assert_eq!(m.psi(&s), Err(LabelError::SkipLabel(s.clone())));
        assert_eq!(m.tau(&[s.clone(), EventLabel::plain("a")]).unwrap(), vec![EventLabel::plain("a")]);
        assert_eq!(m.skip_labels(&c), BTreeSet::from([s]));
    }

    #[test]
    fn unreachable_images_still_join_the_abstract_alphabet() {
        let (m, ..) = map(
            "machine A variables x : int 0..1; init x := 0; events
               a == any p : int 0..1 where x = 0 /\\ p = 0 then x := 1 end
             end",
            "machine C refines A variables x : int 0..1; init x := 0; events
               a refines a with p := 1 == when x = 0 then x := 1 end
             end",
        );
        let a0 = EventLabel::with("a", &[("p", Value::Int(0))]);
        let a1 = EventLabel::with("a", &[("p", Value::Int(1))]);
        assert_eq!(m.abstract_alphabet(), &BTreeSet::from([a0.clone(), a1.clone()]));
        assert!(matches!(m.table[0], Mapped::Foreign(_)));
        // a(p=0) has no concrete counterpart, so it is always refused.
        assert_eq!(m.abs_refusal(&BTreeSet::new()), BTreeSet::from([a0]));
    }
}
