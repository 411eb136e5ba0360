//! LTLf to DFA translation by formula progression.
//!
//! A state is the obligation that the remaining suffix must satisfy. After
//! normalization every obligation is a boolean combination of a fixed, finite
//! set of "next-position" variables: `alive` (the suffix is non-empty), the
//! root formula, every argument of an `X`, and every `U` subformula. States
//! are kept as full truth tables over those variables, which makes them
//! canonical: two obligations are the same state iff they are the same
//! boolean function. Progression substitutes each variable by its one-step
//! progression, so exploring from the root yields a deterministic automaton
//! directly, which is then minimized by partition refinement.
//!
//! Acceptance of a state is its value on the empty suffix: `alive`, atoms,
//! `X` and `U` are false there.

use std::collections::{HashMap, VecDeque};

use super::dfa::Dfa;
use super::formula::{CoreFormula, LtlfFormula, PropositionSet, Symbol};
use crate::error::DfaError;

/// Upper bound on progression variables; truth tables have `2^vars` entries.
pub const MAX_OBLIGATIONS: usize = 16;

#[derive(Clone, Debug)]
pub struct CompileOptions {
    /// Cap on states explored before minimization.
    pub max_states: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self { max_states: 4096 }
    }
}

/// Compiles with the default state budget.
pub fn compile_dfa(formula: &LtlfFormula, ap: &PropositionSet) -> Result<Dfa, DfaError> {
    compile_dfa_with(formula, ap, &CompileOptions::default())
}

pub fn compile_dfa_with(
    formula: &LtlfFormula,
    ap: &PropositionSet,
    options: &CompileOptions,
) -> Result<Dfa, DfaError> {
    let core = formula.normalize(ap);
    let vars = Variables::collect(&core);
    if vars.len() > MAX_OBLIGATIONS {
        return Err(DfaError::TooManyObligations {
            count: vars.len(),
            max: MAX_OBLIGATIONS,
        });
    }
    let raw = explore(&vars, ap, options.max_states)?;
    Ok(minimize(ap.clone(), &raw))
}

#[derive(Clone, Debug)]
enum Var {
    Alive,
    Formula(CoreFormula),
}

struct Variables {
    vars: Vec<Var>,
    index: HashMap<CoreFormula, usize>,
}

const ALIVE: usize = 0;
const ROOT: usize = 1;

impl Variables {
    fn collect(root: &CoreFormula) -> Self {
        let mut v = Variables {
            vars: vec![Var::Alive],
            index: HashMap::new(),
        };
        v.register(root);
        v.walk(root);
        v
    }

    fn len(&self) -> usize {
        self.vars.len()
    }

    fn register(&mut self, f: &CoreFormula) {
        if !self.index.contains_key(f) {
            self.index.insert(f.clone(), self.vars.len());
            self.vars.push(Var::Formula(f.clone()));
        }
    }

    fn walk(&mut self, f: &CoreFormula) {
        match f {
            CoreFormula::True | CoreFormula::False | CoreFormula::Atom(_) => {}
            CoreFormula::Not(a) => self.walk(a),
            CoreFormula::Or(a, b) => {
                self.walk(a);
                self.walk(b);
            }
            CoreFormula::Next(a) => {
                self.register(a);
                self.walk(a);
            }
            CoreFormula::Until(a, b) => {
                self.register(f);
                self.walk(a);
                self.walk(b);
            }
        }
    }

    fn var_of(&self, f: &CoreFormula) -> usize {
        self.index[f]
    }

    /// Truth-table index of the empty-suffix assignment.
    fn empty_suffix_assignment(&self) -> usize {
        let mut a = 0;
        for (i, v) in self.vars.iter().enumerate() {
            if let Var::Formula(f) = v {
                if holds_on_empty(f) {
                    a |= 1 << i;
                }
            }
        }
        debug_assert_eq!(a >> ALIVE & 1, 0);
        a
    }
}

fn holds_on_empty(f: &CoreFormula) -> bool {
    match f {
        CoreFormula::True => true,
        CoreFormula::False | CoreFormula::Atom(_) | CoreFormula::Next(_) | CoreFormula::Until(..) => {
            false
        }
        CoreFormula::Not(a) => !holds_on_empty(a),
        CoreFormula::Or(a, b) => holds_on_empty(a) || holds_on_empty(b),
    }
}

/// Boolean function over `n` variables stored as a truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Table {
    words: Vec<u64>,
}

impl Table {
    fn entries(nvars: usize) -> usize {
        1 << nvars
    }

    fn word_count(nvars: usize) -> usize {
        Self::entries(nvars).div_ceil(64)
    }

    fn tail_mask(nvars: usize) -> u64 {
        let n = Self::entries(nvars);
        if n % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (n % 64)) - 1
        }
    }

    fn constant(nvars: usize, value: bool) -> Self {
        let mut t = Table {
            words: vec![if value { u64::MAX } else { 0 }; Self::word_count(nvars)],
        };
        t.mask(nvars);
        t
    }

    fn variable(nvars: usize, var: usize) -> Self {
        let mut t = Table::constant(nvars, false);
        for a in 0..Self::entries(nvars) {
            if a >> var & 1 == 1 {
                t.set(a);
            }
        }
        t
    }

    fn mask(&mut self, nvars: usize) {
        if let Some(last) = self.words.last_mut() {
            *last &= Self::tail_mask(nvars);
        }
    }

    #[inline]
    fn get(&self, a: usize) -> bool {
        self.words[a >> 6] >> (a & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, a: usize) {
        self.words[a >> 6] |= 1 << (a & 63);
    }

    fn not(mut self, nvars: usize) -> Self {
        for w in &mut self.words {
            *w = !*w;
        }
        self.mask(nvars);
        self
    }

    fn or(mut self, other: &Table) -> Self {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        self
    }

    fn and(mut self, other: &Table) -> Self {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        self
    }
}

/// One-step progression of `f` through `symbol`, as a function of the
/// next-position variables.
fn progress(f: &CoreFormula, symbol: Symbol, vars: &Variables) -> Table {
    let n = vars.len();
    match f {
        CoreFormula::True => Table::constant(n, true),
        CoreFormula::False => Table::constant(n, false),
        CoreFormula::Atom(p) => Table::constant(n, symbol.contains(*p)),
        CoreFormula::Not(a) => progress(a, symbol, vars).not(n),
        CoreFormula::Or(a, b) => progress(a, symbol, vars).or(&progress(b, symbol, vars)),
        CoreFormula::Next(a) => {
            Table::variable(n, ALIVE).and(&Table::variable(n, vars.var_of(a)))
        }
        CoreFormula::Until(a, b) => {
            let stay = progress(a, symbol, vars)
                .and(&Table::variable(n, ALIVE))
                .and(&Table::variable(n, vars.var_of(f)));
            progress(b, symbol, vars).or(&stay)
        }
    }
}

/// For every assignment of the next-position variables, the assignment of
/// the current-position variables it induces under `symbol`.
fn substitution(vars: &Variables, symbol: Symbol) -> Vec<u32> {
    let n = vars.len();
    let per_var: Vec<Table> = vars
        .vars
        .iter()
        .map(|v| match v {
            Var::Alive => Table::constant(n, true),
            Var::Formula(f) => progress(f, symbol, vars),
        })
        .collect();
    (0..Table::entries(n))
        .map(|a| {
            per_var
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, t)| acc | (t.get(a) as u32) << i)
        })
        .collect()
}

fn apply(state: &Table, subst: &[u32], nvars: usize) -> Table {
    let mut out = Table::constant(nvars, false);
    for (a, &b) in subst.iter().enumerate() {
        if state.get(b as usize) {
            out.set(a);
        }
    }
    out
}

struct RawDfa {
    table: Vec<u32>,
    accepting: Vec<bool>,
}

fn explore(vars: &Variables, ap: &PropositionSet, budget: usize) -> Result<RawDfa, DfaError> {
    let n = vars.len();
    let alphabet = ap.alphabet_size();
    // Substitutions are shared by all states; cache them when they fit.
    let cache_ok = alphabet.saturating_mul(Table::entries(n)) <= 1 << 22;
    let cached: Vec<Vec<u32>> = if cache_ok {
        ap.symbols().map(|s| substitution(vars, s)).collect()
    } else {
        Vec::new()
    };
    let eps = vars.empty_suffix_assignment();

    let root = Table::variable(n, ROOT);
    let mut ids: HashMap<Table, u32> = HashMap::new();
    let mut states: Vec<Table> = Vec::new();
    ids.insert(root.clone(), 0);
    states.push(root);
    let mut table: Vec<u32> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let row_start = table.len();
        table.resize(row_start + alphabet, 0);
        for sym in ap.symbols() {
            let next = if cache_ok {
                apply(&states[q], &cached[sym.index()], n)
            } else {
                apply(&states[q], &substitution(vars, sym), n)
            };
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= budget {
                        return Err(DfaError::StateBudgetExceeded { budget });
                    }
                    let id = states.len() as u32;
                    ids.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id as usize);
                    id
                }
            };
            table[row_start + sym.index()] = id;
        }
    }
    // States are expanded in BFS order, which matches their ids.
    let accepting = states.iter().map(|s| s.get(eps)).collect();
    Ok(RawDfa { table, accepting })
}

/// Moore partition refinement, then renumbering in BFS order from the initial
/// state so the output is canonical for a given language and AP order.
fn minimize(ap: PropositionSet, raw: &RawDfa) -> Dfa {
    let alphabet = ap.alphabet_size();
    let n = raw.accepting.len();
    let mut class: Vec<u32> = raw.accepting.iter().map(|&a| a as u32).collect();
    let mut count = {
        let mut c = class.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = vec![0u32; n];
        for q in 0..n {
            let mut sig = Vec::with_capacity(alphabet + 1);
            sig.push(class[q]);
            sig.extend((0..alphabet).map(|s| class[raw.table[q * alphabet + s] as usize]));
            let fresh = sigs.len() as u32;
            next[q] = *sigs.entry(sig).or_insert(fresh);
        }
        let new_count = sigs.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let mut order: Vec<Option<u32>> = vec![None; count];
    let mut rep: Vec<usize> = Vec::new();
    order[class[0] as usize] = Some(0);
    rep.push(0);
    let mut head = 0;
    while head < rep.len() {
        let q = rep[head];
        head += 1;
        for s in 0..alphabet {
            let t = raw.table[q * alphabet + s] as usize;
            let c = class[t] as usize;
            if order[c].is_none() {
                order[c] = Some(rep.len() as u32);
                rep.push(t);
            }
        }
    }
    let mut table = Vec::with_capacity(rep.len() * alphabet);
    for &q in &rep {
        for s in 0..alphabet {
            let t = raw.table[q * alphabet + s] as usize;
            table.push(order[class[t] as usize].expect("reachable class"));
        }
    }
    let accepting = rep.iter().map(|&q| raw.accepting[q]).collect();
    Dfa::from_parts(ap, 0, table, accepting)
}
