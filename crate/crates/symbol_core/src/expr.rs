//! Small arithmetic expression language: `+ - * / ^int`, parentheses,
//! numeric literals and a caller-supplied list of variable names.

use crate::autodiff::Scalar;
use crate::error::SymbolError;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, SymbolError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| SymbolError::Parse { pos: start, msg: format!("bad number '{text}'") })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '\u{2212}' {
            out.push((i, Tok::Op('-')));
            i += 1;
        } else {
            return Err(SymbolError::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [&'a str],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SymbolError> {
        Err(SymbolError::Parse { pos: self.here(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr, SymbolError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SymbolError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SymbolError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SymbolError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let neg = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek().cloned() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e4 => {
                    self.pos += 1;
                    let e = if neg { -(v as i32) } else { v as i32 };
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => self.err("exponent must be an integer literal"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, SymbolError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Expr::Var(i))
                }
                None => self.err(format!("unknown variable '{name}' (expected one of {:?})", self.vars)),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

impl Expr {
    /// Parse `src` with the given variable names (index = position in `vars`).
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, SymbolError> {
        let toks = lex(src)?;
        let mut p = Parser { toks, pos: 0, vars, len: src.len() };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }

    pub fn eval<T: Scalar>(&self, vars: &[T]) -> T {
        match self {
            Expr::Num(v) => vars[0].cst(*v),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Neg(a) => -a.eval(vars),
            Expr::Add(a, b) => a.eval(vars) + b.eval(vars),
            Expr::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Expr::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Expr::Div(a, b) => a.eval(vars) / b.eval(vars),
            Expr::Pow(a, n) => a.eval(vars).powi(*n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: &[&str] = &["x1", "x2", "xi1", "xi2"];

    #[test]
    fn precedence_and_powers() {
        let e = Expr::parse("xi1^2 + 2*xi2^2 - 1/(1+x1)^-1", V).unwrap();
        let v = e.eval(&[1.0, 0.0, 3.0, 0.5]);
        assert!((v - (9.0 + 0.5 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = Expr::parse("-x1^2", V).unwrap();
        assert_eq!(e.eval(&[3.0, 0.0, 0.0, 0.0]), -9.0);
    }

    #[test]
    fn scientific_literals() {
        let e = Expr::parse("1.5e-1*x2", V).unwrap();
        assert!((e.eval(&[0.0, 2.0, 0.0, 0.0]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Expr::parse("x1 +", V).is_err());
        assert!(Expr::parse("y + 1", V).is_err());
        assert!(Expr::parse("x1^1.5", V).is_err());
        assert!(Expr::parse("(x1", V).is_err());
        assert!(Expr::parse("x1 $ 2", V).is_err());
    }
}
