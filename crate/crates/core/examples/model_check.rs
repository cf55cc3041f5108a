//! Invariant checking over an explored state space.

use eventb_fdr::model::CompiledMachine;
use eventb_fdr::parser::parse_machine;
use eventb_fdr::space::explore;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = parse_machine(
        "machine tank
         variables level : int 0..4; valve : bool;
         invariant level < 4
         init level := 0; valve := false;
         events
           open == when not valve then valve := true end
           fill == when valve /\\ level < 4 then level := level + 1 end
           close == when valve then valve := false end
         end",
    )?;
    let cm = CompiledMachine::new(&m)?;
    let ss = explore(&cm, 1000)?;
    let inv = cm.invariant.as_ref().expect("declared");
    match ss.state_ids().find(|&s| !inv.eval_bool(&ss.state(s).0, &[])) {
        None => println!("invariant holds in all {} states", ss.state_count()),
        Some(s) => println!("violated in {} after {}", ss.render_state(s), ss.path_to(s).unwrap()),
    }
    Ok(())
}
