//! Divergent states: states on a cycle of new events.

use eventb_fdr::model::CompiledMachine;
use eventb_fdr::space::{explore, skip_cycle_through};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for file in ["vending_m1.ebm", "vending_m1_skiploop.ebm"] {
        let cm = CompiledMachine::new(&eventb_fdr::load(corpus.join(file))?)?;
        let ss = explore(&cm, 10_000)?;
        let skip = ss.labels_of_events(&cm.new_event_names());
        let divergent = ss.divergent_states(&skip);
        println!("{file}: {} of {} states divergent", divergent.len(), ss.state_count());
        if let Some(&s) = divergent.iter().next() {
            let cycle = skip_cycle_through(&ss, s, &skip).expect("on a cycle");
            let labels: Vec<String> = cycle.iter().map(|(l, _)| l.to_string()).collect();
            println!("  {} loops through <{}>", ss.render_state(s), labels.join(", "));
        }
    }
    Ok(())
}
