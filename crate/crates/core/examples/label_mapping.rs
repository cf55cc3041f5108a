//! The label map between the vending machines: psi, tau and AbsRefusal.

use std::collections::BTreeSet;

use eventb_fdr::model::Value;
use eventb_fdr::refine::Pair;
use eventb_fdr::space::EventLabel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let a = eventb_fdr::load(corpus.join("vending_m0.ebm"))?;
    let c = eventb_fdr::load(corpus.join("vending_m1.ebm"))?;
    let pair = Pair::build(&a, &c, 10_000)?;
    let map = &pair.map;

    let soda = EventLabel::with("select_drink", &[("drink", Value::Sym("soda".into()))]);
    println!("psi(vend_soda) = {}", map.psi(&EventLabel::plain("vend_soda"))?);
    println!("psi(select_drink) fails: {}", map.psi(&soda).unwrap_err());

    let sigma = [EventLabel::plain("insert_coin"), soda];
    let shown: Vec<String> = map.tau(&sigma)?.iter().map(ToString::to_string).collect();
    println!("tau(<insert_coin, select_drink(soda)>) = <{}>", shown.join(", "));

    for refused in [&["vend_water", "vend_soda", "restock"][..], &["restock", "vend_soda"]] {
        let x: BTreeSet<EventLabel> = refused.iter().map(|l| EventLabel::plain(l)).collect();
        let y: Vec<String> = map.abs_refusal(&x).iter().map(ToString::to_string).collect();
        println!("AbsRefusal({refused:?}) = {{{}}}", y.join(", "));
    }
    Ok(())
}
