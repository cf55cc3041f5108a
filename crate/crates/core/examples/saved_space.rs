//! Saves an abstract state space as JSON and checks against the loaded copy.

use eventb_fdr::model::build_refinement_link;
use eventb_fdr::refine::{check_failure_divergence, LabelMap};
use eventb_fdr::space::{explore, load_space, save_space};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let a = eventb_fdr::load(corpus.join("vending_m0.ebm"))?;
    let c = eventb_fdr::load(corpus.join("vending_m1.ebm"))?;
    let link = build_refinement_link(&a, &c)?;

    let text = save_space(&explore(&link.abstract_machine, 10_000)?);
    println!("{} bytes of JSON", text.len());
    let abs = load_space(&text)?;
    let conc = explore(&link.concrete, 10_000)?;
    let map = LabelMap::new(link, &abs, &conc);
    println!("check-fd against the loaded space: {:?}", check_failure_divergence(&abs, &conc, &map).refines());
    Ok(())
}
