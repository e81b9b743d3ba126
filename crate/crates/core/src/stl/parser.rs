//! Surface syntax:
//!
//! ```text
//! formula   := disj [ 'U' interval disj ]
//! disj      := conj { '|' conj }
//! conj      := unary { '&' unary }
//! unary     := '!' unary | 'F' interval unary | 'G' interval unary
//!            | '(' formula ')' | alias | predicate
//! interval  := '[' int ',' int ')'
//! predicate := linexpr ('<' | '>') linexpr
//! linexpr   := term { ('+' | '-') term }
//! term      := '-' term | number [ '*' var ] | var
//! ```
//!
//! `F`, `G` and `U` are reserved. Aliases are expanded in place.

use std::collections::BTreeMap;

use crate::Scalar;

use super::{default_var_index, default_var_name, Formula, Interval, Predicate, Relation, StlError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    LBracket,
    Comma,
    And,
    Or,
    Not,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, StlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ',' => Tok::Comma,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push((start, Tok::Num(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(StlError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Variable names and alias bindings used while parsing.
#[derive(Clone, Debug)]
pub struct ParseContext<T> {
    names: Vec<String>,
    aliases: BTreeMap<String, Formula<T>>,
}

impl<T: Scalar> ParseContext<T> {
    /// Components named `x`, `y`, `z`, `x3`, ... up to `dim`.
    pub fn new(dim: usize) -> Self {
        ParseContext {
            names: (0..dim).map(default_var_name).collect(),
            aliases: BTreeMap::new(),
        }
    }

    pub fn with_names(names: Vec<String>) -> Self {
        ParseContext {
            names,
            aliases: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn aliases(&self) -> &BTreeMap<String, Formula<T>> {
        &self.aliases
    }

    pub fn bind(&mut self, name: &str, formula: Formula<T>) -> Result<(), StlError> {
        if matches!(name, "F" | "G" | "U") || self.names.iter().any(|n| n == name) {
            return Err(StlError::Syntax {
                pos: 0,
                msg: format!("`{name}` is reserved and cannot name an alias"),
            });
        }
        for p in formula.predicates() {
            if p.dim() != self.dim() {
                return Err(StlError::PredicateDimension {
                    expected: self.dim(),
                    found: p.dim(),
                });
            }
        }
        self.aliases.insert(name.to_string(), formula);
        Ok(())
    }

    /// Parse and bind a definition of the form `name := formula`.
    pub fn define(&mut self, line: &str) -> Result<String, StlError> {
        let (name, body) = line.split_once(":=").ok_or(StlError::Syntax {
            pos: 0,
            msg: "alias definition must have the form `name := formula`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(StlError::Syntax {
                pos: 0,
                msg: format!("invalid alias name `{name}`"),
            });
        }
        let f = self.parse(body)?;
        self.bind(name, f)?;
        Ok(name.to_string())
    }

    pub fn parse(&self, text: &str) -> Result<Formula<T>, StlError> {
        let toks = lex(text)?;
        let mut p = Parser {
            ctx: self,
            toks,
            pos: 0,
            end: text.len(),
        };
        let f = p.formula()?;
        if p.pos < p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(f)
    }
}

/// Parse `text` over a `dim`-dimensional signal with default variable names.
pub fn parse<T: Scalar>(text: &str, dim: usize) -> Result<Formula<T>, StlError> {
    ParseContext::new(dim).parse(text)
}

struct Parser<'a, T> {
    ctx: &'a ParseContext<T>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<T: Scalar> Parser<'_, T> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err(&self, msg: &str) -> StlError {
        let found = match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".to_string(),
        };
        StlError::Syntax {
            pos: self.offset(),
            msg: format!("{msg} (found {found})"),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), StlError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {what}")))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula<T>, StlError> {
        let lhs = self.disj()?;
        if self.is_keyword("U") {
            self.pos += 1;
            let iv = self.interval()?;
            let rhs = self.disj()?;
            return Ok(Formula::until(iv, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula<T>, StlError> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = f.or(self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula<T>, StlError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula<T>, StlError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) if name == "F" || name == "G" => {
                self.pos += 1;
                let iv = self.interval()?;
                let inner = self.unary()?;
                Ok(if name == "F" {
                    Formula::finally(iv, inner)
                } else {
                    Formula::globally(iv, inner)
                })
            }
            Some(Tok::Ident(name)) if name == "U" => Err(self.err("`U` needs a left operand")),
            Some(Tok::Ident(name)) if self.ctx.aliases.contains_key(&name) => {
                self.pos += 1;
                Ok(self.ctx.aliases[&name].clone())
            }
            Some(Tok::Ident(_)) | Some(Tok::Num(_)) | Some(Tok::Minus) => self.predicate(),
            _ => Err(self.err("expected a formula")),
        }
    }

    fn interval(&mut self) -> Result<Interval, StlError> {
        self.expect(Tok::LBracket, "`[` opening an interval")?;
        let a = self.int()?;
        self.expect(Tok::Comma, "`,` in interval")?;
        let b = self.int()?;
        let at = self.offset();
        self.expect(Tok::RParen, "`)` closing the half-open interval")?;
        Interval::new(a, b).map_err(|_| StlError::Syntax {
            pos: at,
            msg: format!("empty interval [{a},{b}): the upper bound must exceed the lower bound"),
        })
    }

    fn int(&mut self) -> Result<usize, StlError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                let v = s
                    .parse::<usize>()
                    .map_err(|_| self.err("interval bounds must be non-negative integers"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn predicate(&mut self) -> Result<Formula<T>, StlError> {
        let (lc, lk) = self.linexpr()?;
        let rel = match self.peek() {
            Some(Tok::Lt) => Relation::Less,
            Some(Tok::Gt) => Relation::Greater,
            _ => return Err(self.err("expected `<` or `>`")),
        };
        self.pos += 1;
        let (rc, rk) = self.linexpr()?;
        let coeffs = lc.into_iter().zip(rc).map(|(a, b)| a - b).collect();
        Ok(Formula::pred(Predicate::new(coeffs, lk, rel, rk)))
    }

    fn linexpr(&mut self) -> Result<(Vec<T>, T), StlError> {
        let mut coeffs = vec![T::zero(); self.ctx.dim()];
        let mut constant = T::zero();
        let mut sign = T::one();
        loop {
            self.term(sign, &mut coeffs, &mut constant)?;
            match self.peek() {
                Some(Tok::Plus) => sign = T::one(),
                Some(Tok::Minus) => sign = -T::one(),
                _ => break,
            }
            self.pos += 1;
        }
        Ok((coeffs, constant))
    }

    fn term(&mut self, sign: T, coeffs: &mut [T], constant: &mut T) -> Result<(), StlError> {
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.term(-sign, coeffs, constant)
            }
            Some(Tok::Num(s)) => {
                let v = T::parse_decimal(&s).ok_or_else(|| self.err("malformed number"))?;
                self.pos += 1;
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    let i = self.var()?;
                    coeffs[i] = coeffs[i] + sign * v;
                } else {
                    *constant = *constant + sign * v;
                }
                Ok(())
            }
            Some(Tok::Ident(_)) => {
                let i = self.var()?;
                coeffs[i] = coeffs[i] + sign;
                Ok(())
            }
            _ => Err(self.err("expected a number or variable")),
        }
    }

    fn var(&mut self) -> Result<usize, StlError> {
        let (pos, name) = match self.toks.get(self.pos) {
            Some((p, Tok::Ident(n))) => (*p, n.clone()),
            _ => return Err(self.err("expected a variable")),
        };
        if let Some(i) = self.ctx.names.iter().position(|n| *n == name) {
            self.pos += 1;
            return Ok(i);
        }
        if let Some(index) = default_var_index(&name) {
            return Err(StlError::DimensionMismatch {
                name,
                index,
                dim: self.ctx.dim(),
            });
        }
        if matches!(name.as_str(), "F" | "G" | "U") || self.ctx.aliases.contains_key(&name) {
            return Err(StlError::Syntax {
                pos,
                msg: format!("`{name}` is not a signal variable"),
            });
        }
        Err(StlError::UnknownIdentifier(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: usize, b: usize) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn atomic_predicate() {
        let f: Formula<f64> = parse("x < 3", 2).unwrap();
        assert_eq!(
            f,
            Formula::pred(Predicate::new(vec![1.0, 0.0], 0.0, Relation::Less, 3.0))
        );
    }

    #[test]
    fn case_study_one_shape() {
        let mut ctx = ParseContext::<f64>::new(2);
        let blue = ctx
            .define("blue := (x>2 & x<3 & y>2 & y<3) | (x>4 & x<5 & y>4 & y<5)")
            .unwrap();
        assert_eq!(blue, "blue");
        let b = ctx.aliases()["blue"].clone();
        let f = ctx.parse("F[0,20)(F[0,1)(blue) & G[1,4)(!blue))").unwrap();
        let expected = Formula::finally(
            iv(0, 20),
            Formula::finally(iv(0, 1), b.clone()).and(Formula::globally(iv(1, 4), b.not())),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn missing_operand() {
        let e = parse::<f64>("G[0,4)", 1).unwrap_err();
        assert!(matches!(e, StlError::Syntax { pos: 6, .. }), "{e:?}");
    }

    #[test]
    fn empty_interval_is_an_error() {
        assert!(matches!(
            parse::<f64>("F[3,3)(x < 1)", 1),
            Err(StlError::Syntax { .. })
        ));
        assert!(parse::<f64>("F[4,2)(x < 1)", 1).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            parse::<f64>("y < 3", 1),
            Err(StlError::DimensionMismatch { index: 1, dim: 1, .. })
        ));
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(
            parse::<f64>("F[0,2)(red)", 2),
            Err(StlError::UnknownIdentifier(_))
        ));
    }

    #[test]
    fn affine_terms_are_collected() {
        let f: Formula<f64> = parse("2*x - y + 1 > 0.5 + x", 2).unwrap();
        assert_eq!(
            f,
            Formula::pred(Predicate::new(vec![1.0, -1.0], 1.0, Relation::Greater, 0.5))
        );
    }

    #[test]
    fn until_binds_loosest() {
        let f: Formula<f64> = parse("x < 1 & y < 1 U[0,4) x > 2", 2).unwrap();
        assert!(matches!(f, Formula::Until(_, ref l, _) if matches!(**l, Formula::And(..))));
        assert_eq!(f.horizon(), 4);
    }

    #[test]
    fn custom_names() {
        let ctx = ParseContext::<f64>::with_names(vec!["speed".into(), "alt".into()]);
        let f = ctx.parse("G[0,3)(alt > 100)").unwrap();
        assert_eq!(f.display_with(ctx.names()).to_string(), "G[0,3)(alt > 100)");
    }

    #[test]
    fn trailing_garbage() {
        assert!(parse::<f64>("x < 1 )", 1).is_err());
        assert!(parse::<f64>("x < 1 y", 2).is_err());
    }
}
