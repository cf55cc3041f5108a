//! Event determinism: a hidden choice versus the same choice as a parameter.

use eventb_fdr::model::CompiledMachine;
use eventb_fdr::refine::{is_event_deterministic, Determinism};
use eventb_fdr::space::explore;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for file in ["listing_a.ebm", "listing_adet.ebm"] {
        let ss = explore(&CompiledMachine::new(&eventb_fdr::load(corpus.join(file))?)?, 1000)?;
        match is_event_deterministic(&ss) {
            Determinism::Deterministic => println!("{file}: deterministic"),
            Determinism::Nondeterministic { state, label, successors } => println!(
                "{file}: {label} leads from {} to {} and {}",
                ss.render_state(state),
                ss.render_state(successors.0),
                ss.render_state(successors.1)
            ),
        }
    }
    Ok(())
}
