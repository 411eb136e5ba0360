//! Complete deterministic automata over `2^AP` with trap-state annotation.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formula::{PropositionSet, Symbol};

pub type StateId = usize;

/// A complete DFA. Transitions are a dense `states x 2^|AP|` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    ap: PropositionSet,
    num_states: usize,
    initial: StateId,
    table: Vec<u32>,
    accepting: Vec<bool>,
    trap: Vec<bool>,
}

impl Dfa {
    /// Builds an automaton from a complete transition table and computes the
    /// trap set. `table[q * 2^|AP| + s]` is the successor of `q` on symbol `s`.
    pub fn from_parts(
        ap: PropositionSet,
        initial: StateId,
        table: Vec<u32>,
        accepting: Vec<bool>,
    ) -> Self {
        let num_states = accepting.len();
        assert_eq!(table.len(), num_states * ap.alphabet_size(), "transition table is not complete");
        assert!(initial < num_states);
        assert!(table.iter().all(|&t| (t as usize) < num_states));
        let trap = trap_states(num_states, ap.alphabet_size(), &table, &accepting);
        Dfa {
            ap,
            num_states,
            initial,
            table,
            accepting,
            trap,
        }
    }

    pub fn propositions(&self) -> &PropositionSet {
        &self.ap
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    #[inline]
    pub fn step(&self, q: StateId, symbol: Symbol) -> StateId {
        self.table[q * self.ap.alphabet_size() + symbol.index()] as usize
    }

    #[inline]
    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    /// A state from which no accepting state is reachable.
    #[inline]
    pub fn is_trap(&self, q: StateId) -> bool {
        self.trap[q]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.num_states).filter(|&q| self.accepting[q]).collect()
    }

    pub fn trap_states(&self) -> Vec<StateId> {
        (0..self.num_states).filter(|&q| self.trap[q]).collect()
    }

    pub fn run(&self, word: &[Symbol]) -> StateId {
        word.iter().fold(self.initial, |q, &s| self.step(q, s))
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.accepting[self.run(word)]
    }

    /// Serializable form: transitions keyed by symbol bitset.
    pub fn to_document(&self) -> DfaDocument {
        let alphabet = self.ap.alphabet_size();
        DfaDocument {
            propositions: self.ap.names().to_vec(),
            num_states: self.num_states,
            initial: self.initial,
            transitions: (0..self.num_states)
                .map(|q| self.table[q * alphabet..(q + 1) * alphabet].to_vec())
                .collect(),
            accepting: self.accepting_states(),
            trap: self.trap_states(),
        }
    }

    pub fn from_document(doc: &DfaDocument) -> Result<Self, String> {
        let ap = PropositionSet::new(doc.propositions.iter().cloned())?;
        let alphabet = ap.alphabet_size();
        if doc.transitions.len() != doc.num_states || doc.transitions.iter().any(|r| r.len() != alphabet) {
            return Err("transition table is not complete".into());
        }
        if doc.initial >= doc.num_states {
            return Err("initial state out of range".into());
        }
        let table: Vec<u32> = doc.transitions.iter().flatten().copied().collect();
        if table.iter().any(|&t| t as usize >= doc.num_states) {
            return Err("transition target out of range".into());
        }
        let mut accepting = vec![false; doc.num_states];
        for &q in &doc.accepting {
            *accepting.get_mut(q).ok_or("accepting state out of range")? = true;
        }
        Ok(Dfa::from_parts(ap, doc.initial, table, accepting))
    }

    /// Graphviz rendering. Parallel edges are merged and labelled with their
    /// symbol sets.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.num_states {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let style = if self.trap[q] { ", style=filled, fillcolor=gray80" } else { "" };
            let _ = writeln!(out, "  q{q} [shape={shape}{style}];");
        }
        let _ = writeln!(out, "  init -> q{};", self.initial);
        for q in 0..self.num_states {
            let mut targets: Vec<(usize, Vec<String>)> = Vec::new();
            for sym in self.ap.symbols() {
                let t = self.step(q, sym);
                let label = self.ap.format_symbol(sym);
                match targets.iter_mut().find(|(to, _)| *to == t) {
                    Some((_, labels)) => labels.push(label),
                    None => targets.push((t, vec![label])),
                }
            }
            for (t, labels) in targets {
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", labels.join(" "));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// JSON layout of a compiled automaton. `transitions[q][s]` is the successor
/// of state `q` on the symbol whose bitset value is `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaDocument {
    pub propositions: Vec<String>,
    pub num_states: usize,
    pub initial: StateId,
    pub transitions: Vec<Vec<u32>>,
    pub accepting: Vec<StateId>,
    pub trap: Vec<StateId>,
}

/// Backward reachability from the accepting set; everything not reached is a trap.
fn trap_states(num_states: usize, alphabet: usize, table: &[u32], accepting: &[bool]) -> Vec<bool> {
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); num_states];
    for q in 0..num_states {
        for s in 0..alphabet {
            let t = table[q * alphabet + s] as usize;
            if !preds[t].contains(&q) {
                preds[t].push(q);
            }
        }
    }
    let mut live = accepting.to_vec();
    let mut queue: VecDeque<usize> = (0..num_states).filter(|&q| accepting[q]).collect();
    while let Some(t) = queue.pop_front() {
        for &p in &preds[t] {
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    live.into_iter().map(|l| !l).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eventually_p() -> Dfa {
        let ap = PropositionSet::new(["p"]).unwrap();
        Dfa::from_parts(ap, 0, vec![0, 1, 1, 1], vec![false, true])
    }

    #[test]
    fn step_and_accept() {
        let d = eventually_p();
        assert_eq!(d.step(0, Symbol(1)), 1);
        assert_eq!(d.step(1, Symbol(0)), 1);
        assert!(d.accepts(&[Symbol(0), Symbol(0), Symbol(1)]));
        assert!(!d.accepts(&[Symbol(0), Symbol(0)]));
        assert!(d.trap_states().is_empty());
    }

    #[test]
    fn document_round_trip() {
        let d = eventually_p();
        let doc = d.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: DfaDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(Dfa::from_document(&back).unwrap(), d);
    }

    #[test]
    fn trap_is_unreachable_from_acceptance() {
        let ap = PropositionSet::new(["p"]).unwrap();
        // 0 --p--> 2 (sink, rejecting), 0 --!p--> 1 (accepting) --*--> 1
        let d = Dfa::from_parts(ap, 0, vec![1, 2, 1, 1, 2, 2], vec![false, true, false]);
        assert_eq!(d.trap_states(), vec![2]);
        assert!(d.to_dot().contains("q2 [shape=circle, style=filled"));
    }
}
