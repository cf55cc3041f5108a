use clap::Parser;
use eventb_fdr::cli::{run, RunConfig};

fn main() {
    let out = run(&RunConfig::parse());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
