//! Compares the checkers with the definitional oracle on random machine pairs.
//! Usage: `cargo run --example differential -- [pairs]`.

use eventb_fdr::oracle::{
    generate_machine_pair, oracle_divergence_free, oracle_failure_refines, oracle_trace_refines, pair_depth_bound,
    RandomMachineSpec,
};
use eventb_fdr::refine::{is_event_deterministic, Pair};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let (mut refines, mut disagreements) = (0, 0);
    for seed in 0..n {
        let (a, c) = generate_machine_pair(&RandomMachineSpec::from_seed(seed));
        let Ok(p) = Pair::build(&a, &c, 10_000) else { continue };
        let k = pair_depth_bound(&p.abs, &p.conc);
        let trace_ok = p.check_trace().refines() == oracle_trace_refines(&p.abs, &p.conc, &p.map, k).is_ok();
        let fd = p.check_fd().refines();
        let def = oracle_failure_refines(&p.abs, &p.conc, &p.map, k).is_ok()
            && oracle_divergence_free(&p.conc, &p.skip_labels()).is_ok();
        let fd_ok = fd == def || !is_event_deterministic(&p.abs).holds();
        refines += usize::from(fd);
        if !(trace_ok && fd_ok) {
            disagreements += 1;
            println!("seed {seed} disagrees; rerun with `ebfdr oracle-seed {seed}`");
        }
    }
    println!("{n} seeds, {refines} refine, {disagreements} disagreements");
}
