//! Explores both vending machines and prints the abstract one as DOT.

use eventb_fdr::model::CompiledMachine;
use eventb_fdr::space::{explore, export_dot};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for file in ["vending_m0.ebm", "vending_m1.ebm"] {
        let m = eventb_fdr::load(corpus.join(file))?;
        let ss = explore(&CompiledMachine::new(&m)?, 10_000)?;
        println!("{}: {} states, {} transitions", m.name, ss.state_count(), ss.transition_count());
        if file == "vending_m0.ebm" {
            print!("{}", export_dot(&ss));
        }
    }
    Ok(())
}
