//! Failure-divergence refinement with the full text report, for the vending
//! machine and two mutants.

use eventb_fdr::cli::verdict_text;
use eventb_fdr::refine::Pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let m0 = eventb_fdr::load(corpus.join("vending_m0.ebm"))?;
    for file in ["vending_m1.ebm", "vending_m1_skiploop.ebm", "vending_m1_no_vend_water.ebm"] {
        let pair = Pair::build(&m0, &eventb_fdr::load(corpus.join(file))?, 10_000)?;
        println!("== {file}");
        print!("{}", verdict_text(&pair.check_fd(), &pair.abs, &pair.conc));
    }
    Ok(())
}
