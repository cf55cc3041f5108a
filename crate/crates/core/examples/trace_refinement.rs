//! Trace refinement of the vending machine and of a mutant whose restock
//! guard was weakened.

use eventb_fdr::refine::Pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let m0 = eventb_fdr::load(corpus.join("vending_m0.ebm"))?;
    for file in ["vending_m1.ebm", "vending_m1_weak_guard.ebm", "vending_m1_free_water.ebm"] {
        let pair = Pair::build(&m0, &eventb_fdr::load(corpus.join(file))?, 10_000)?;
        match pair.check_trace().counterexample() {
            None => println!("{file}: refines"),
            Some(cex) => println!(
                "{file}: fails ({}), concrete {} vs abstract {}",
                cex.reason, cex.concrete_trace, cex.abstract_trace
            ),
        }
    }
    Ok(())
}
