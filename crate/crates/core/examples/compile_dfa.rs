//! Compiles an LTLf formula and prints the automaton.
//!
//! cargo run --example compile_dfa -- "F(a) & G(a -> F(b))" a,b

use sabpi::ltlf::{compile_dfa, parse_ltlf, PropositionSet};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let formula = args.next().unwrap_or_else(|| "!obs U exit".into());
    let ap = args.next().unwrap_or_else(|| "obs,exit".into());
    let ap = PropositionSet::new(ap.split(',').map(str::trim)).map_err(anyhow::Error::msg)?;
    let dfa = compile_dfa(&parse_ltlf(&formula, &ap)?, &ap)?;
    println!("{formula}: {} states, initial {}", dfa.num_states(), dfa.initial());
    println!("accepting {:?}, trap {:?}", dfa.accepting_states(), dfa.trap_states());
    for q in 0..dfa.num_states() {
        for sym in ap.symbols() {
            println!("  {q} --{}--> {}", ap.format_symbol(sym), dfa.step(q, sym));
        }
    }
    println!("{}", dfa.to_dot());
    Ok(())
}
