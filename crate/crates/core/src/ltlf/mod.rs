//! LTLf formulas, their parser, and translation to minimized DFAs.

mod compile;
mod dfa;
mod formula;
mod parser;

pub use compile::{compile_dfa, compile_dfa_with, CompileOptions, MAX_OBLIGATIONS};
pub use dfa::{Dfa, DfaDocument, StateId};
pub use formula::{CoreFormula, LtlfFormula, PropositionSet, Symbol, MAX_PROPOSITIONS};
pub use parser::parse_ltlf;
