//! Parses a machine from text, prints it canonically and reports a parse error.

use eventb_fdr::parser::{parse_machine, pretty_print};

const SOURCE: &str = "
machine counter
variables n : int 0..3; on : bool;
init n := 0; on := true;
events
  tick == when on /\\ n < 3 then n := n + 1 end
  stop == any keep : bool where on then on := keep end
end";

fn main() {
    let m = parse_machine(SOURCE).expect("valid machine");
    let text = pretty_print(&m);
    print!("{text}");
    assert_eq!(parse_machine(&text).unwrap(), m);

    match parse_machine("machine broken variables end") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error at {}: {}", e.span, e.message),
    }
}
