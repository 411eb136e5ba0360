//! Direct recursive LTLf semantics over finite words. Independent of the
//! automaton construction; used as the brute-force oracle.

use sabpi::ltlf::{LtlfFormula, PropositionSet, Symbol};

/// `word, pos |= f`. Positions at or past the end see the empty suffix, where
/// atoms, `X` and `U` are false.
pub fn holds(f: &LtlfFormula, ap: &PropositionSet, word: &[Symbol], pos: usize) -> bool {
    use LtlfFormula::*;
    let n = word.len();
    match f {
        True => true,
        False => false,
        Atom(name) => pos < n && word[pos].contains(ap.index_of(name).unwrap()),
        Not(a) => !holds(a, ap, word, pos),
        Or(a, b) => holds(a, ap, word, pos) || holds(b, ap, word, pos),
        And(a, b) => holds(a, ap, word, pos) && holds(b, ap, word, pos),
        Implies(a, b) => !holds(a, ap, word, pos) || holds(b, ap, word, pos),
        Next(a) => pos + 1 < n && holds(a, ap, word, pos + 1),
        Until(a, b) => (pos..n).any(|j| {
            holds(b, ap, word, j) && (pos..j).all(|k| holds(a, ap, word, k))
        }),
        Eventually(a) => (pos..n).any(|j| holds(a, ap, word, j)),
        Globally(a) => (pos..n).all(|j| holds(a, ap, word, j)),
    }
}

pub fn satisfies(f: &LtlfFormula, ap: &PropositionSet, word: &[Symbol]) -> bool {
    holds(f, ap, word, 0)
}

/// Every word over `2^ap` of length `0..=max_len`.
pub fn all_words(ap: &PropositionSet, max_len: usize) -> Vec<Vec<Symbol>> {
    let alphabet = ap.alphabet_size();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..alphabet {
                let mut w2: Vec<Symbol> = w.clone();
                w2.push(Symbol(s as u16));
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Formula corpus with |AP| <= 3, covering every operator and the benchmark
/// task shapes.
pub const CORPUS: &[(&str, &[&str])] = &[
    ("F(p)", &["p"]),
    ("G(p)", &["p"]),
    ("X(p)", &["p"]),
    ("!X(!p)", &["p"]),
    ("p U q", &["p", "q"]),
    ("!p U q", &["p", "q"]),
    ("G(!obs) & F(exit)", &["obs", "exit"]),
    ("!obs U exit", &["obs", "exit"]),
    ("F(key) & F(door) & (!door U key)", &["key", "door"]),
    ("F(door) & (!door U correctkey)", &["door", "correctkey"]),
    ("G(fuel) & F(sample -> good)", &["fuel", "sample", "good"]),
    ("G(fuel) & F(sample) & G(sample -> good)", &["fuel", "sample", "good"]),
    ("G(fire -> F(A)) & G(!fire -> F(B))", &["fire", "A", "B"]),
    ("G(a -> X(b))", &["a", "b"]),
    ("G(a -> X(X(b)))", &["a", "b"]),
    ("F(a & X(b U c))", &["a", "b", "c"]),
    ("G(F(a))", &["a"]),
    ("F(G(a))", &["a"]),
    ("(a U b) U c", &["a", "b", "c"]),
    ("a U (b U c)", &["a", "b", "c"]),
    ("X(X(X(a))) | G(b)", &["a", "b"]),
    ("F(a) -> F(b)", &["a", "b"]),
    ("G(a -> F(b)) & G(b -> F(c))", &["a", "b", "c"]),
    ("!(a U b) & X(true)", &["a", "b"]),
    ("true", &["a"]),
    ("false", &["a"]),
    ("F(a & F(b & F(c)))", &["a", "b", "c"]),
    ("G(a | b) & F(c)", &["a", "b", "c"]),
];
