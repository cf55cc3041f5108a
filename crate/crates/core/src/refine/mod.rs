//! Trace and failure-divergence refinement between explored machines.

mod determinism;
mod fd;
mod label_map;
mod report;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{build_refinement_link, LinkError, Machine};
use crate::space::{explore, EventLabel, ExploreError, StateSpace, Trace};

pub use determinism::{is_event_deterministic, Determinism};
pub use fd::check_failure_divergence;
pub use label_map::{LabelError, LabelMap};
pub(crate) use label_map::Mapped;
pub use report::{label_json, trace_json, verdict_json};
pub use trace::check_trace_refinement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailReason {
    Divergence,
    FailureMismatch,
    TraceMismatch,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::Divergence => "divergence",
            FailReason::FailureMismatch => "failure-mismatch",
            FailReason::TraceMismatch => "trace-mismatch",
        }
    }
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detail {
    /// The last concrete state is stable and its visible behaviour differs
    /// from the paired abstract state. Both refusal views are recorded.
    FailureMismatch {
        concrete_enabled: BTreeSet<EventLabel>,
        abstract_enabled: BTreeSet<EventLabel>,
        abstract_refusal: BTreeSet<EventLabel>,
        abs_refusal: BTreeSet<EventLabel>,
    },
    /// Skip labels leading from the last concrete state back to itself.
    Divergence { cycle: Vec<EventLabel> },
    /// The final concrete step has no abstract counterpart. `image` is the
    /// abstract label it maps to.
    TraceMismatch { unmatched: EventLabel, image: EventLabel },
}

/// Corresponding concrete and abstract runs that witness a failed check.
///
/// For divergence and failure mismatches the abstract trace is the
/// concealed and renamed concrete trace. For a trace mismatch the final
/// concrete step is the offending one and has no abstract partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub reason: FailReason,
    pub concrete_trace: Trace,
    pub abstract_trace: Trace,
    pub detail: Detail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Refines,
    Fails(Box<Counterexample>),
}

impl Verdict {
    pub fn refines(&self) -> bool {
        matches!(self, Verdict::Refines)
    }

    pub fn reason(&self) -> Option<FailReason> {
        self.counterexample().map(|c| c.reason)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Refines => None,
            Verdict::Fails(c) => Some(c),
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Explore(#[from] ExploreError),
}

/// Both explored spaces of a refinement together with their label map.
#[derive(Debug, Clone)]
pub struct Pair {
    pub abs: StateSpace,
    pub conc: StateSpace,
    pub map: LabelMap,
}

impl Pair {
    pub fn build(abstract_machine: &Machine, concrete: &Machine, max_states: usize) -> Result<Pair, CheckError> {
        let link = build_refinement_link(abstract_machine, concrete)?;
        let abs = explore(&link.abstract_machine, max_states)?;
        let conc = explore(&link.concrete, max_states)?;
        let map = LabelMap::new(link, &abs, &conc);
        Ok(Pair { abs, conc, map })
    }

    pub fn check_trace(&self) -> Verdict {
        check_trace_refinement(&self.abs, &self.conc, &self.map)
    }

    pub fn check_fd(&self) -> Verdict {
        check_failure_divergence(&self.abs, &self.conc, &self.map)
    }

    pub fn skip_labels(&self) -> BTreeSet<EventLabel> {
        self.map.skip_labels(&self.conc)
    }
}
