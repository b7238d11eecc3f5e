//! Text forms of polynomials and ideal files.
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)*
//! atom   := coeff | var | '(' poly ')'
//! var    := 'z' nat
//! coeff  := decimal ['i']
//! ```
//!
//! `*` is the concatenation product and is never implied by juxtaposition.
//! A complex literal `(a+bi)` is just a parenthesized sum. Ideal files hold a
//! `vars <d>` header followed by `gen <poly>` lines and optional `max_degree <n>`
//! and `tolerance <x>` lines; `#` starts a comment.

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};
use crate::ncpoly::{NcPoly, Word};

pub const GRAMMAR: &str = "\
poly   := ['+'|'-'] term (('+'|'-') term)*
term   := factor ('*' factor)*
factor := atom ('^' nat)*
atom   := coeff | var | '(' poly ')'
var    := 'z' nat            (1 <= nat <= d)
coeff  := decimal ['i']      (complex: '(' decimal ('+'|'-') decimal 'i' ')')
ideal file: 'vars <d>' header, then 'gen <poly>' lines,
            optional 'max_degree <n>' and 'tolerance <x>'; '#' starts a comment";

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.bump();
        }
        self.pos - start
    }

    /// Next token with its (line, column).
    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek() else {
            return Ok((Tok::End, line, col));
        };
        let tok = match b {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'z' => {
                self.bump();
                let start = self.pos;
                if self.digits() == 0 {
                    return Err(self.err(line, col, "expected variable index after 'z'"));
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let k = s
                    .parse::<usize>()
                    .map_err(|_| self.err(line, col, "variable index too large"))?;
                Tok::Var(k)
            }
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                let int = self.digits();
                let mut frac = 0;
                if self.peek() == Some(b'.') {
                    self.bump();
                    frac = self.digits();
                }
                if int + frac == 0 {
                    return Err(self.err(line, col, "malformed number"));
                }
                if matches!(self.peek(), Some(b'e' | b'E')) {
                    self.bump();
                    if matches!(self.peek(), Some(b'+' | b'-')) {
                        self.bump();
                    }
                    if self.digits() == 0 {
                        return Err(self.err(line, col, "malformed exponent"));
                    }
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
                let v: f64 = s
                    .parse()
                    .map_err(|_| self.err(line, col, format!("malformed number '{s}'")))?;
                if self.peek() == Some(b'i') {
                    self.bump();
                    Tok::Imag(v)
                } else {
                    Tok::Num(v)
                }
            }
            other => {
                return Err(self.err(
                    line,
                    col,
                    format!("unexpected character '{}'", other as char),
                ))
            }
        };
        Ok((tok, line, col))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    cur: (Tok, usize, usize),
    dim_vars: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, dim_vars: usize) -> Result<Self> {
        let mut lex = Lexer::new(src);
        let cur = lex.next()?;
        Ok(Parser { lex, cur, dim_vars })
    }

    fn advance(&mut self) -> Result<()> {
        self.cur = self.lex.next()?;
        Ok(())
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.cur.0 {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        Error::Syntax {
            line: self.cur.1,
            column: self.cur.2,
            message: format!("expected {what}, found {found}"),
        }
    }

    fn poly(&mut self) -> Result<NcPoly> {
        let mut negate = false;
        match self.cur.0 {
            Tok::Plus => self.advance()?,
            Tok::Minus => {
                negate = true;
                self.advance()?;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            let sign = match self.cur.0 {
                Tok::Plus => ONE,
                Tok::Minus => -ONE,
                _ => break,
            };
            self.advance()?;
            let t = self.term()?;
            acc = acc.checked_add(&t.scale(sign))?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NcPoly> {
        let mut acc = self.factor()?;
        while self.cur.0 == Tok::Star {
            self.advance()?;
            let f = self.factor()?;
            acc = acc.checked_mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NcPoly> {
        let mut base = self.atom()?;
        while self.cur.0 == Tok::Caret {
            self.advance()?;
            let k = match self.cur.0 {
                Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e6 => v as usize,
                _ => return Err(self.unexpected("a natural-number exponent")),
            };
            self.advance()?;
            base = base.pow(k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NcPoly> {
        let d = self.dim_vars;
        let out = match self.cur.0 {
            Tok::Num(v) => NcPoly::constant(d, C64::new(v, 0.0)),
            Tok::Imag(v) => NcPoly::constant(d, C64::new(0.0, v)),
            Tok::Var(k) => {
                if k == 0 || k > d {
                    return Err(Error::IndexOutOfRange {
                        index: k,
                        dim_vars: d,
                    });
                }
                NcPoly::monomial(d, Word::new(vec![k]), ONE)
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.poly()?;
                if self.cur.0 != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                inner
            }
            _ => return Err(self.unexpected("a coefficient, variable or '('")),
        };
        self.advance()?;
        Ok(out)
    }
}

/// Parses a polynomial in `z1..z{d}`.
pub fn parse_poly(text: &str, dim_vars: usize) -> Result<NcPoly> {
    if dim_vars == 0 {
        return Err(Error::InvalidArgument("dim_vars must be positive".into()));
    }
    let mut p = Parser::new(text, dim_vars)?;
    let f = p.poly()?;
    if p.cur.0 != Tok::End {
        return Err(p.unexpected("'+', '-', '*' or end of input"));
    }
    Ok(f)
}

fn fmt_real(x: f64) -> String {
    // shortest representation that parses back to the same f64
    format!("{x}")
}

/// Canonical text form: graded-lex term order, exact round trip through [`parse_poly`].
pub fn format_poly(f: &NcPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (w, c)) in f.terms().enumerate() {
        let (negative, body) = if c.im == 0.0 {
            let mag = fmt_real(c.re.abs());
            let body = if w.is_empty() {
                mag
            } else if c.re.abs() == 1.0 {
                w.to_string()
            } else {
                format!("{mag}*{w}")
            };
            (c.re.is_sign_negative(), body)
        } else if c.re == 0.0 {
            let mag = format!("{}i", fmt_real(c.im.abs()));
            let body = if w.is_empty() {
                mag
            } else {
                format!("{mag}*{w}")
            };
            (c.im.is_sign_negative(), body)
        } else {
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            let lit = format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs()));
            let body = if w.is_empty() { lit } else { format!("{lit}*{w}") };
            (false, body)
        };
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// Optional settings carried by an ideal file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdealOptions {
    pub max_degree: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdealFile {
    pub dim_vars: usize,
    pub generators: Vec<NcPoly>,
    pub options: IdealOptions,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

fn shift_error(e: Error, line: usize, col_offset: usize) -> Error {
    match e {
        Error::Syntax {
            line: l,
            column,
            message,
        } => Error::Syntax {
            line: line + l - 1,
            column: if l == 1 { column + col_offset } else { column },
            message,
        },
        other => other,
    }
}

pub fn parse_ideal_file(text: &str) -> Result<IdealFile> {
    let mut dim_vars = None;
    let mut generators = Vec::new();
    let mut options = IdealOptions::default();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (keyword, rest) = match trimmed.find(char::is_whitespace) {
            Some(p) => (&trimmed[..p], &trimmed[p..]),
            None => (trimmed, ""),
        };
        let value = rest.trim();
        let syntax = |message: String| Error::Syntax {
            line: line_no,
            column: indent + 1,
            message,
        };
        let Some(d) = dim_vars else {
            if keyword != "vars" {
                return Err(Error::MissingHeader);
            }
            let d: usize = value
                .parse()
                .map_err(|_| syntax(format!("invalid variable count '{value}'")))?;
            if d == 0 {
                return Err(syntax("variable count must be positive".into()));
            }
            dim_vars = Some(d);
            continue;
        };
        match keyword {
            "gen" => {
                let offset = indent + keyword.len() + (rest.len() - rest.trim_start().len());
                let g = parse_poly(value, d).map_err(|e| shift_error(e, line_no, offset))?;
                if g.is_zero() {
                    return Err(Error::ZeroGenerator { line: line_no });
                }
                generators.push(g);
            }
            "max_degree" => {
                options.max_degree = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(format!("invalid max_degree '{value}'")))?,
                );
            }
            "tolerance" => {
                let t: f64 = value
                    .parse()
                    .map_err(|_| syntax(format!("invalid tolerance '{value}'")))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(syntax("tolerance must be positive".into()));
                }
                options.tolerance = Some(t);
            }
            "vars" => return Err(syntax("duplicate vars header".into())),
            other => return Err(syntax(format!("unknown keyword '{other}'"))),
        }
    }
    let dim_vars = dim_vars.ok_or(Error::MissingHeader)?;
    Ok(IdealFile {
        dim_vars,
        generators,
        options,
    })
}

/// Ideal-file text for `generators` in `d` variables.
pub fn format_ideal_file(dim_vars: usize, generators: &[NcPoly]) -> String {
    let mut s = format!("vars {dim_vars}\n");
    for g in generators {
        s.push_str("gen ");
        s.push_str(&format_poly(g));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(ls: &[usize]) -> Word {
        Word::new(ls.to_vec())
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn parses_commutator() {
        let f = parse_poly("z1*z2 - z2*z1", 2).unwrap();
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(&w(&[1, 2])), r(1.0));
        assert_eq!(f.coeff(&w(&[2, 1])), r(-1.0));
    }

    #[test]
    fn parses_chain_relation() {
        let f = parse_poly("2*z3^2 - z2^2", 3).unwrap();
        assert_eq!(f.coeff(&w(&[3, 3])), r(2.0));
        assert_eq!(f.coeff(&w(&[2, 2])), r(-1.0));
        assert_eq!(f.num_terms(), 2);
    }

    #[test]
    fn parses_complex_literal() {
        let f = parse_poly("(1+2i)*z1", 1).unwrap();
        assert_eq!(f.num_terms(), 1);
        assert_eq!(f.coeff(&w(&[1])), C64::new(1.0, 2.0));
    }

    #[test]
    fn power_and_parentheses() {
        let f = parse_poly("(z1+z2)^2", 2).unwrap();
        assert_eq!(f.num_terms(), 4);
        assert_eq!(parse_poly("z1^0", 1).unwrap(), NcPoly::one(1));
        assert_eq!(parse_poly("-(-z1)", 1).unwrap(), NcPoly::var(1, 1).unwrap());
        assert_eq!(
            parse_poly("1e-3*z1", 1).unwrap().coeff(&w(&[1])),
            r(1e-3)
        );
    }

    #[test]
    fn errors_carry_position() {
        match parse_poly("z1 * * z2", 2) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            parse_poly("z3", 2),
            Err(Error::IndexOutOfRange {
                index: 3,
                dim_vars: 2
            })
        );
        assert!(matches!(parse_poly("z0", 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse_poly("z1 z2", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("(z1", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("z1^2.5", 2), Err(Error::Syntax { .. })));
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_poly(&NcPoly::zero(2)), "0");
        let f = parse_poly("z2*z1 - z1*z2", 2).unwrap();
        assert_eq!(format_poly(&f), "-z1*z2 + z2*z1");
        let g = NcPoly::monomial(1, w(&[1, 1]), r(0.5));
        assert_eq!(format_poly(&g), "0.5*z1^2");
        let h = parse_poly("3 - 2i*z1 + (0.25-1i)*z1*z2^3", 2).unwrap();
        assert_eq!(format_poly(&h), "3 - 2i*z1 + (0.25-1i)*z1*z2^3");
    }

    #[test]
    fn ideal_file_examples() {
        let f = parse_ideal_file("vars 2\ngen z1*z2 - z2*z1").unwrap();
        assert_eq!(f.dim_vars, 2);
        assert_eq!(f.generators.len(), 1);

        let f = parse_ideal_file("vars 5\n").unwrap();
        assert_eq!(f.dim_vars, 5);
        assert!(f.generators.is_empty());

        let f = parse_ideal_file("# monomials\nvars 3\ngen z1*z2\ngen z2*z1  # second\n").unwrap();
        assert_eq!(f.generators.len(), 2);
        assert_eq!(f.generators[1], parse_poly("z2*z1", 3).unwrap());

        let f = parse_ideal_file("vars 2\nmax_degree 6\ntolerance 1e-9\n").unwrap();
        assert_eq!(f.options.max_degree, Some(6));
        assert_eq!(f.options.tolerance, Some(1e-9));
    }

    #[test]
    fn ideal_file_errors() {
        assert_eq!(parse_ideal_file("gen z1\n"), Err(Error::MissingHeader));
        assert_eq!(parse_ideal_file("# nothing\n"), Err(Error::MissingHeader));
        match parse_ideal_file("vars 2\n\ngen z1 + + z2\n") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 10)),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            parse_ideal_file("vars 2\ngen z1 - z1\n"),
            Err(Error::ZeroGenerator { line: 2 })
        );
        assert!(matches!(
            parse_ideal_file("vars 2\nfoo 1\n"),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_ideal_file("vars 2\ngen z3\n"),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    fn arb_poly() -> impl Strategy<Value = NcPoly> {
        let coeff = prop_oneof![
            (-1e3f64..1e3).prop_map(|x| C64::new(x, 0.0)),
            (-1e3f64..1e3).prop_map(|y| C64::new(0.0, y)),
            (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(x, y)| C64::new(x, y)),
            Just(C64::new(1.0, 0.0)),
            Just(C64::new(-1.0, 0.0)),
            (-1e-8f64..1e-8).prop_map(|x| C64::new(x, x * 3.0)),
        ];
        let term = (proptest::collection::vec(1usize..=3, 0..5), coeff);
        proptest::collection::vec(term, 0..6).prop_map(|ts| {
            NcPoly::from_terms(3, ts.into_iter().map(|(ls, c)| (Word::new(ls), c))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(f in arb_poly()) {
            let text = format_poly(&f);
            let back = parse_poly(&text, 3).unwrap();
            prop_assert_eq!(back, f, "text was {}", text);
        }
    }
}
