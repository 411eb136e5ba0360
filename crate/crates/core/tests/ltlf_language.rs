mod support;

use std::collections::VecDeque;

use proptest::prelude::*;
use sabpi::ltlf::{compile_dfa, parse_ltlf, Dfa, LtlfFormula, PropositionSet, Symbol};
use support::ltlf_eval::{all_words, satisfies, CORPUS};

fn compile(text: &str, names: &[&str]) -> (LtlfFormula, PropositionSet, Dfa) {
    let ap = PropositionSet::new(names.iter().copied()).unwrap();
    let f = parse_ltlf(text, &ap).unwrap();
    let d = compile_dfa(&f, &ap).unwrap();
    (f, ap, d)
}

#[test]
fn corpus_matches_semantics_on_all_short_words() {
    for (text, names) in CORPUS {
        let (f, ap, d) = compile(text, names);
        for w in all_words(&ap, 5) {
            assert_eq!(d.accepts(&w), satisfies(&f, &ap, &w), "{text} on {w:?}");
        }
    }
}

/// Pairwise distinguishability via the product automaton: every pair of
/// distinct states must reach a pair that disagrees on acceptance.
fn is_minimal(d: &Dfa) -> bool {
    let n = d.num_states();
    let symbols: Vec<Symbol> = d.propositions().symbols().collect();
    let mut distinct = vec![vec![false; n]; n];
    let mut queue = VecDeque::new();
    for a in 0..n {
        for b in 0..n {
            if d.is_accepting(a) != d.is_accepting(b) {
                distinct[a][b] = true;
                queue.push_back((a, b));
            }
        }
    }
    // Backward propagation over the pair graph.
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n * n];
    for a in 0..n {
        for b in 0..n {
            for &s in &symbols {
                preds[d.step(a, s) * n + d.step(b, s)].push((a, b));
            }
        }
    }
    while let Some((a, b)) = queue.pop_front() {
        for &(pa, pb) in &preds[a * n + b] {
            if !distinct[pa][pb] {
                distinct[pa][pb] = true;
                queue.push_back((pa, pb));
            }
        }
    }
    (0..n).all(|a| (0..n).all(|b| a == b || distinct[a][b]))
}

#[test]
fn corpus_automata_are_minimal() {
    for (text, names) in CORPUS {
        let (_, _, d) = compile(text, names);
        assert!(is_minimal(&d), "{text} not minimal");
    }
}

#[test]
fn traps_never_reach_acceptance() {
    for (text, names) in CORPUS {
        let (_, ap, d) = compile(text, names);
        for q in d.trap_states() {
            assert!(!d.is_accepting(q));
            let mut reach = vec![false; d.num_states()];
            reach[q] = true;
            for _ in 0..d.num_states() {
                for r in 0..d.num_states() {
                    if reach[r] {
                        for s in ap.symbols() {
                            let t = d.step(r, s);
                            reach[t] = true;
                        }
                    }
                }
            }
            for r in 0..d.num_states() {
                if reach[r] {
                    assert!(!d.is_accepting(r) && d.is_trap(r), "{text}: trap {q} reaches {r}");
                }
            }
        }
    }
}

#[test]
fn avoid_and_reach_matches_enumeration_up_to_length_four() {
    let (f, ap, d) = compile("G(!obs) & F(exit)", &["obs", "exit"]);
    let obs = ap.symbol(["obs"]).unwrap();
    for w in all_words(&ap, 4) {
        assert_eq!(d.accepts(&w), satisfies(&f, &ap, &w));
        if w.iter().any(|s| s.contains(0)) {
            assert!(d.is_trap(d.run(&w)));
        }
    }
    assert!(d.is_trap(d.step(d.initial(), obs)));
}

fn arb_formula() -> impl Strategy<Value = LtlfFormula> {
    let leaf = prop_oneof![
        Just(LtlfFormula::atom("a")),
        Just(LtlfFormula::atom("b")),
        Just(LtlfFormula::atom("c")),
        Just(LtlfFormula::True),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(LtlfFormula::not),
            inner.clone().prop_map(LtlfFormula::next),
            inner.clone().prop_map(LtlfFormula::eventually),
            inner.clone().prop_map(LtlfFormula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlfFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlfFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlfFormula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LtlfFormula::until(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_formulas_agree_with_semantics(f in arb_formula()) {
        let ap = PropositionSet::new(["a", "b", "c"]).unwrap();
        let d = compile_dfa(&f, &ap).unwrap();
        for w in all_words(&ap, 4) {
            prop_assert_eq!(d.accepts(&w), satisfies(&f, &ap, &w), "{} on {:?}", f, w);
        }
        prop_assert!(is_minimal(&d));
    }
}
