//! LTLf expression trees and the declared proposition set they range over.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Hard cap on the number of atomic propositions. Symbols are `u16` bitsets.
pub const MAX_PROPOSITIONS: usize = 16;

/// An input symbol: the set of propositions that hold, as a bitset over the
/// declared [`PropositionSet`] order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(pub u16);

impl Symbol {
    pub const EMPTY: Symbol = Symbol(0);

    #[inline]
    pub fn contains(self, prop: usize) -> bool {
        self.0 >> prop & 1 == 1
    }

    #[inline]
    pub fn with(self, prop: usize) -> Symbol {
        Symbol(self.0 | 1 << prop)
    }

    #[inline]
    pub fn without(self, prop: usize) -> Symbol {
        Symbol(self.0 & !(1 << prop))
    }

    #[inline]
    pub fn union(self, other: Symbol) -> Symbol {
        Symbol(self.0 | other.0)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered, duplicate-free set of atomic proposition names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PropositionSet {
    names: Vec<String>,
}

impl PropositionSet {
    pub fn new<I, S>(names: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if !is_identifier(&name) || is_keyword(&name) {
                return Err(format!("'{name}' is not a valid proposition name"));
            }
            if out.contains(&name) {
                return Err(format!("proposition '{name}' declared twice"));
            }
            out.push(name);
        }
        if out.len() > MAX_PROPOSITIONS {
            return Err(format!(
                "{} propositions declared, at most {MAX_PROPOSITIONS} are supported",
                out.len()
            ));
        }
        Ok(Self { names: out })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of symbols in the alphabet `2^AP`.
    pub fn alphabet_size(&self) -> usize {
        1 << self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.alphabet_size() as u32).map(|s| Symbol(s as u16))
    }

    /// Builds a symbol from proposition names. Unknown names yield `None`.
    pub fn symbol<'a, I>(&self, names: I) -> Option<Symbol>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut sym = Symbol::EMPTY;
        for name in names {
            sym = sym.with(self.index_of(name)?);
        }
        Some(sym)
    }

    /// Renders a symbol as `{a,b}`.
    pub fn format_symbol(&self, sym: Symbol) -> String {
        let parts: Vec<&str> = (0..self.len())
            .filter(|&i| sym.contains(i))
            .map(|i| self.names[i].as_str())
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl TryFrom<Vec<String>> for PropositionSet {
    type Error = String;

    fn try_from(names: Vec<String>) -> Result<Self, Self::Error> {
        PropositionSet::new(names)
    }
}

impl From<PropositionSet> for Vec<String> {
    fn from(set: PropositionSet) -> Self {
        set.names
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "X" | "F" | "G" | "U" | "true" | "false")
}

/// LTLf formula as written, derived operators included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LtlfFormula {
    True,
    False,
    Atom(String),
    Not(Box<LtlfFormula>),
    Or(Box<LtlfFormula>, Box<LtlfFormula>),
    And(Box<LtlfFormula>, Box<LtlfFormula>),
    Implies(Box<LtlfFormula>, Box<LtlfFormula>),
    Next(Box<LtlfFormula>),
    Until(Box<LtlfFormula>, Box<LtlfFormula>),
    Eventually(Box<LtlfFormula>),
    Globally(Box<LtlfFormula>),
}

impl LtlfFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        LtlfFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LtlfFormula) -> Self {
        LtlfFormula::Not(Box::new(f))
    }

    pub fn or(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: LtlfFormula) -> Self {
        LtlfFormula::Next(Box::new(f))
    }

    pub fn until(a: LtlfFormula, b: LtlfFormula) -> Self {
        LtlfFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: LtlfFormula) -> Self {
        LtlfFormula::Eventually(Box::new(f))
    }

    pub fn globally(f: LtlfFormula) -> Self {
        LtlfFormula::Globally(Box::new(f))
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        use LtlfFormula::*;
        match self {
            True | False => {}
            Atom(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            Not(a) | Next(a) | Eventually(a) | Globally(a) => a.collect_atoms(out),
            Or(a, b) | And(a, b) | Implies(a, b) | Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Rewrites into the core grammar `true | false | p | !f | f | f | X f | f U f`,
    /// resolving atom names against `ap`.
    ///
    /// Panics if an atom is not declared in `ap`; [`crate::ltlf::parse_ltlf`]
    /// rejects such formulas up front.
    pub fn normalize(&self, ap: &PropositionSet) -> CoreFormula {
        use LtlfFormula::*;
        match self {
            True => CoreFormula::True,
            False => CoreFormula::False,
            Atom(name) => CoreFormula::Atom(
                ap.index_of(name)
                    .unwrap_or_else(|| panic!("atom '{name}' not declared")),
            ),
            Not(a) => CoreFormula::negate(a.normalize(ap)),
            Or(a, b) => CoreFormula::Or(Box::new(a.normalize(ap)), Box::new(b.normalize(ap))),
            And(a, b) => CoreFormula::negate(CoreFormula::Or(
                Box::new(CoreFormula::negate(a.normalize(ap))),
                Box::new(CoreFormula::negate(b.normalize(ap))),
            )),
            Implies(a, b) => CoreFormula::Or(
                Box::new(CoreFormula::negate(a.normalize(ap))),
                Box::new(b.normalize(ap)),
            ),
            Next(a) => CoreFormula::Next(Box::new(a.normalize(ap))),
            Until(a, b) => {
                CoreFormula::Until(Box::new(a.normalize(ap)), Box::new(b.normalize(ap)))
            }
            Eventually(a) => {
                CoreFormula::Until(Box::new(CoreFormula::True), Box::new(a.normalize(ap)))
            }
            Globally(a) => CoreFormula::negate(CoreFormula::Until(
                Box::new(CoreFormula::True),
                Box::new(CoreFormula::negate(a.normalize(ap))),
            )),
        }
    }

    fn precedence(&self) -> u8 {
        use LtlfFormula::*;
        match self {
            Implies(..) => 1,
            Or(..) => 2,
            And(..) => 3,
            Until(..) => 4,
            Not(_) | Next(_) | Eventually(_) | Globally(_) => 5,
            True | False | Atom(_) => 6,
        }
    }
}

impl fmt::Display for LtlfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LtlfFormula::*;
        let wrap = |f: &mut fmt::Formatter<'_>, child: &LtlfFormula, min: u8| {
            if child.precedence() < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(name) => write!(f, "{name}"),
            Not(a) => {
                write!(f, "!")?;
                wrap(f, a, 5)
            }
            Next(a) | Eventually(a) | Globally(a) => {
                let op = match self {
                    Next(_) => "X",
                    Eventually(_) => "F",
                    _ => "G",
                };
                write!(f, "{op}(")?;
                write!(f, "{a}")?;
                write!(f, ")")
            }
            Or(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " | ")?;
                wrap(f, b, 3)
            }
            And(a, b) => {
                wrap(f, a, 3)?;
                write!(f, " & ")?;
                wrap(f, b, 4)
            }
            Implies(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " -> ")?;
                wrap(f, b, 1)
            }
            Until(a, b) => {
                wrap(f, a, 5)?;
                write!(f, " U ")?;
                wrap(f, b, 4)
            }
        }
    }
}

/// Formula over the core operators only, with atoms resolved to proposition
/// indices. This is the input to automaton construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoreFormula {
    True,
    False,
    Atom(usize),
    Not(Box<CoreFormula>),
    Or(Box<CoreFormula>, Box<CoreFormula>),
    Next(Box<CoreFormula>),
    Until(Box<CoreFormula>, Box<CoreFormula>),
}

impl CoreFormula {
    /// Negation with double-negation and constant folding.
    pub fn negate(f: CoreFormula) -> CoreFormula {
        match f {
            CoreFormula::True => CoreFormula::False,
            CoreFormula::False => CoreFormula::True,
            CoreFormula::Not(inner) => *inner,
            other => CoreFormula::Not(Box::new(other)),
        }
    }
}
