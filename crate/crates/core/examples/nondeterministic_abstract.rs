//! A concrete machine can failure-refine a nondeterministic abstract machine
//! while leaving an abstract trace uncovered.

use eventb_fdr::oracle::{check_prop2, oracle_failure_refines, pair_depth_bound};
use eventb_fdr::refine::Pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let a = eventb_fdr::load(corpus.join("listing_a.ebm"))?;
    let c = eventb_fdr::load(corpus.join("listing_c.ebm"))?;
    let p = Pair::build(&a, &c, 1000)?;
    let k = pair_depth_bound(&p.abs, &p.conc);
    println!("failure refinement by definition: {}", oracle_failure_refines(&p.abs, &p.conc, &p.map, k).is_ok());
    println!("check-fd verdict: {}", p.check_fd().refines());
    println!("abstract traces covered up to depth 8: {:?}", check_prop2(&p.abs, &p.conc, &p.map, 8));
    Ok(())
}
