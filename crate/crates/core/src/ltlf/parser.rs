//! Recursive-descent parser for the infix LTLf syntax.
//!
//! ```text
//! formula  := implies
//! implies  := or ( "->" implies )?
//! or       := and ( "|" and )*
//! and      := until ( "&" until )*
//! until    := unary ( "U" until )?
//! unary    := ( "!" | "X" | "F" | "G" ) unary | primary
//! primary  := "true" | "false" | ident | "(" formula ")"
//! ident    := [A-Za-z_][A-Za-z0-9_]*      (except X, F, G, U, true, false)
//! ```
//!
//! `->` and `U` associate to the right, `|` and `&` to the left.

use super::formula::{is_keyword, LtlfFormula, PropositionSet};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Eventually,
    Globally,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("'{name}'"),
            Token::True => "'true'".into(),
            Token::False => "'false'".into(),
            Token::Not => "'!'".into(),
            Token::And => "'&'".into(),
            Token::Or => "'|'".into(),
            Token::Implies => "'->'".into(),
            Token::Next => "'X'".into(),
            Token::Until => "'U'".into(),
            Token::Eventually => "'F'".into(),
            Token::Globally => "'G'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Token::Implies
                } else {
                    return Err(ParseError::syntax(start, "expected '->'"));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..=i];
                match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    "X" => Token::Next,
                    "U" => Token::Until,
                    "F" => Token::Eventually,
                    "G" => Token::Globally,
                    _ => Token::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(start, format!("unexpected character '{ch}'")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    atoms: Vec<(String, usize)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn implies(&mut self) -> Result<LtlfFormula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(LtlfFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<LtlfFormula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            lhs = LtlfFormula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LtlfFormula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Token::And {
            self.bump();
            lhs = LtlfFormula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlfFormula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Token::Until {
            self.bump();
            let rhs = self.until()?;
            return Ok(LtlfFormula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlfFormula, ParseError> {
        match self.peek() {
            Token::Not => {
                self.bump();
                Ok(LtlfFormula::not(self.unary()?))
            }
            Token::Next => {
                self.bump();
                Ok(LtlfFormula::next(self.unary()?))
            }
            Token::Eventually => {
                self.bump();
                Ok(LtlfFormula::eventually(self.unary()?))
            }
            Token::Globally => {
                self.bump();
                Ok(LtlfFormula::globally(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<LtlfFormula, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Token::True => Ok(LtlfFormula::True),
            Token::False => Ok(LtlfFormula::False),
            Token::Ident(name) => {
                self.atoms.push((name.clone(), offset));
                Ok(LtlfFormula::Atom(name))
            }
            Token::LParen => {
                let inner = self.implies()?;
                let close = self.offset();
                match self.bump() {
                    Token::RParen => Ok(inner),
                    other => Err(ParseError::syntax(
                        close,
                        format!("expected ')', found {}", other.describe()),
                    )),
                }
            }
            other => Err(ParseError::syntax(
                offset,
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }
}

/// Parses `text` and checks every atom against the declared propositions.
///
/// Syntax is checked before atoms, so a malformed formula reports the syntax
/// error even if it also names undeclared atoms.
pub fn parse_ltlf(text: &str, ap: &PropositionSet) -> Result<LtlfFormula, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        atoms: Vec::new(),
    };
    let formula = parser.implies()?;
    if *parser.peek() != Token::End {
        return Err(ParseError::syntax(
            parser.offset(),
            format!("unexpected {}", parser.peek().describe()),
        ));
    }
    for (name, offset) in &parser.atoms {
        debug_assert!(!is_keyword(name));
        if ap.index_of(name).is_none() {
            return Err(ParseError::UndeclaredAtom {
                name: name.clone(),
                offset: *offset,
            });
        }
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use LtlfFormula as L;

    fn ap(names: &[&str]) -> PropositionSet {
        PropositionSet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn eventually_key() {
        let f = parse_ltlf("F(key)", &ap(&["key"])).unwrap();
        assert_eq!(f, L::eventually(L::atom("key")));
    }

    #[test]
    fn rock_sample_task() {
        let f = parse_ltlf("G(fuel) & F(sample -> good)", &ap(&["fuel", "sample", "good"])).unwrap();
        assert_eq!(
            f,
            L::and(
                L::globally(L::atom("fuel")),
                L::eventually(L::implies(L::atom("sample"), L::atom("good")))
            )
        );
    }

    #[test]
    fn unbalanced_paren_reports_end_offset() {
        let err = parse_ltlf("F(doo", &ap(&["key"])).unwrap_err();
        match err {
            ParseError::Syntax { offset, .. } => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_atom_is_named() {
        let err = parse_ltlf("F(door) & G(!lava)", &ap(&["door"])).unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredAtom {
                name: "lava".into(),
                offset: 13
            }
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let ap = ap(&["a", "b", "c"]);
        assert_eq!(
            parse_ltlf("a | b & c", &ap).unwrap(),
            L::or(L::atom("a"), L::and(L::atom("b"), L::atom("c")))
        );
        assert_eq!(
            parse_ltlf("a -> b -> c", &ap).unwrap(),
            L::implies(L::atom("a"), L::implies(L::atom("b"), L::atom("c")))
        );
        assert_eq!(
            parse_ltlf("!a U b U c", &ap).unwrap(),
            L::until(L::not(L::atom("a")), L::until(L::atom("b"), L::atom("c")))
        );
        assert_eq!(
            parse_ltlf("X a & G !b", &ap).unwrap(),
            L::and(L::next(L::atom("a")), L::globally(L::not(L::atom("b"))))
        );
    }

    #[test]
    fn display_round_trips() {
        let ap = ap(&["a", "b", "c"]);
        for text in [
            "G(a -> F(b)) & !c U a",
            "(a | b) & c",
            "a -> (b -> c)",
            "(a -> b) -> c",
            "X(X(a)) | G(F(c))",
            "(a U b) U c",
            "!(a & b)",
        ] {
            let f = parse_ltlf(text, &ap).unwrap();
            let again = parse_ltlf(&f.to_string(), &ap).unwrap();
            assert_eq!(f, again, "{text} -> {f}");
        }
    }

    #[test]
    fn stray_tokens_are_rejected() {
        let ap = ap(&["a"]);
        assert!(matches!(parse_ltlf("a a", &ap), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_ltlf("a - a", &ap), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_ltlf("", &ap), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_ltlf("a $", &ap), Err(ParseError::Syntax { offset: 2, .. })));
    }
}
