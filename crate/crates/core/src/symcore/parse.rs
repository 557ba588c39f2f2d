use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ExprError, RationalExpr, SymbolTable};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn syntax(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        pos,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Lexer, ExprError> {
    let mut toks = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                toks.push((Tok::Op(c), pos));
                it.next();
            }
            '−' => {
                toks.push((Tok::Op('-'), pos));
                it.next();
            }
            '·' | '×' => {
                toks.push((Tok::Op('*'), pos));
                it.next();
            }
            c if c.is_ascii_digit() => {
                let mut int = String::new();
                let mut frac = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_ascii_digit() {
                        int.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                if let Some(&(dot, '.')) = it.peek() {
                    it.next();
                    while let Some(&(_, d)) = it.peek() {
                        if d.is_ascii_digit() {
                            frac.push(d);
                            it.next();
                        } else {
                            break;
                        }
                    }
                    if frac.is_empty() {
                        return Err(syntax(dot, "expected digits after decimal point"));
                    }
                }
                let digits: BigInt = format!("{int}{frac}")
                    .parse()
                    .map_err(|_| syntax(pos, "malformed number"))?;
                let scale = num_traits::pow(BigInt::from(10u32), frac.len());
                toks.push((Tok::Num(BigRational::new(digits, scale)), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        name.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(name), pos));
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    toks.push((Tok::End, text.len()));
    Ok(Lexer { toks })
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.checked_add(&self.term()?)?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalExpr, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalExpr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Op('-') {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        let e = match self.bump() {
            Tok::Num(n) if n.is_integer() => {
                let k: i32 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(pos, "exponent too large"))?;
                k
            }
            _ => return Err(syntax(pos, "expected an integer exponent")),
        };
        base.checked_pow(if neg { -e } else { e })
    }

    fn atom(&mut self) -> Result<RationalExpr, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(RationalExpr::constant(n)),
            Tok::Ident(name) => match self.table.lookup(&name) {
                Some(s) => Ok(RationalExpr::var(s)),
                None => Err(ExprError::UndeclaredSymbol { name, pos }),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                match self.bump() {
                    Tok::Op(')') => Ok(e),
                    _ => Err(syntax(self.toks[self.at.saturating_sub(1)].1, "expected `)`")),
                }
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::Op(c) => Err(syntax(pos, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses an expression in the grammar documented at the module root.
pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<RationalExpr, ExprError> {
    let lexer = lex(text)?;
    let mut p = Parser {
        toks: lexer.toks,
        at: 0,
        table,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(syntax(p.pos(), "trailing input")),
    }
}

/// Exact rational literal such as `8/3`, `-2`, `0.125`.
pub fn parse_rational(text: &str) -> Result<BigRational, ExprError> {
    let e = parse_expr(text, &SymbolTable::new())?;
    match e.as_constant() {
        Some(c) => Ok(c),
        None => Err(syntax(0, "expected a rational constant")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{Polynomial, Symbol};
    use alloc::string::ToString;

    fn lorenz_table() -> SymbolTable {
        SymbolTable::with_params(["sigma", "r", "b"]).unwrap()
    }

    #[test]
    fn parses_polynomial() {
        let e = parse_expr("x^2 + y", &SymbolTable::new()).unwrap();
        let x = Polynomial::var(Symbol::x());
        let expected = &(&x * &x) + &Polynomial::var(Symbol::y());
        assert_eq!(e.as_polynomial(), Some(&expected));
    }

    #[test]
    fn parses_lorenz_component() {
        let t = lorenz_table();
        let e = parse_expr("sigma*(y - x)", &t).unwrap();
        let s = RationalExpr::var(Symbol::param("sigma"));
        let expected = &s * &(&RationalExpr::var(Symbol::y()) - &RationalExpr::var(Symbol::x()));
        assert!(e.equals(&expected));
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let err = parse_expr("(x+y)/(x - x)", &SymbolTable::new()).unwrap_err();
        assert_eq!(err, ExprError::ZeroDenominator);
    }

    #[test]
    fn error_positions() {
        let t = SymbolTable::new();
        match parse_expr("x + q", &t) {
            Err(ExprError::UndeclaredSymbol { name, pos }) => {
                assert_eq!(name, "q");
                assert_eq!(pos, 4);
            }
            other => panic!("{other:?}"),
        }
        match parse_expr("x + * y", &t) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("(x", &t), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x^y", &t), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("", &t), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let t = SymbolTable::new();
        let a = parse_expr("-x^2", &t).unwrap();
        let b = parse_expr("-(x^2)", &t).unwrap();
        assert!(a.equals(&b));
        let c = parse_expr("x^-2 * x^2", &t).unwrap();
        assert!(c.equals(&RationalExpr::one()));
    }

    #[test]
    fn decimals_and_rationals_are_exact() {
        assert_eq!(parse_rational("0.125").unwrap().to_string(), "1/8");
        assert_eq!(parse_rational("8/3").unwrap().to_string(), "8/3");
        assert_eq!(parse_rational("-2").unwrap().to_string(), "-2");
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn printed_form_reparses() {
        let t = lorenz_table();
        for src in [
            "sigma*x*y - 2*sigma*x^2 + y^2 - b*z*r",
            "(x + y)/(x^2 + sigma)",
            "2/3*x - 1/(x*y^2)",
            "-x/(y*(x + z)^2)",
        ] {
            let e = parse_expr(src, &t).unwrap();
            let printed = e.to_string();
            let back = parse_expr(&printed, &t).unwrap();
            assert!(back.equals(&e), "{src} -> {printed}");
        }
    }
}
