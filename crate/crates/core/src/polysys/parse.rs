//! Reader for the plain-text system format:
//!
//! ```text
//! # comment
//! 3                 <- number of equations
//! x1 x2             <- variable names, in index order
//! x1^3 + x1*x2^2;   <- one polynomial per ';'
//! (1.5-0.5i)*x1*x2 - 2;
//! ...
//! ```

use num_complex::Complex64 as C64;

use super::{Monomial, PolySystem, Polynomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { value: f64, integer: Option<u32> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes `lines`, numbering them from `first_line` (1-based).
fn lex(lines: &[&str], first_line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut last = (first_line, 1);
    for (k, raw) in lines.iter().enumerate() {
        let line = first_line + k;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let simple = match ch {
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ';' => Some(Tok::Semi),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, column });
                i += 1;
                continue;
            }
            if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut integral = true;
                if i < chars.len() && chars[i] == '.' {
                    integral = false;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        integral = false;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    // otherwise the 'e' starts an identifier and is rejected later
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| syntax(line, column, format!("malformed number '{text}'")))?;
                let integer = if integral { text.parse::<u32>().ok() } else { None };
                out.push(Token {
                    tok: Tok::Number { value, integer },
                    line,
                    column,
                });
                continue;
            }
            if is_ident_start(ch) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    column,
                });
                continue;
            }
            return Err(syntax(line, column, format!("unexpected character '{ch}'")));
        }
        last = (line, chars.len() + 1);
    }
    out.push(Token {
        tok: Tok::End,
        line: last.0,
        column: last.1,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn at_end(&self) -> bool {
        self.peek().tok == Tok::End
    }

    fn polynomial(&mut self) -> Result<Polynomial> {
        let n = self.names.len();
        let mut poly = Polynomial::zero(n);
        let mut first = true;
        loop {
            let t = self.peek().clone();
            let sign = match t.tok {
                Tok::Plus => {
                    self.next();
                    1.0
                }
                Tok::Minus => {
                    self.next();
                    -1.0
                }
                Tok::Semi if first => return Err(syntax(t.line, t.column, "empty polynomial")),
                _ if first => 1.0,
                Tok::Semi => {
                    self.next();
                    return Ok(poly);
                }
                Tok::End => return Err(syntax(t.line, t.column, "missing ';'")),
                _ => return Err(syntax(t.line, t.column, "expected '+', '-' or ';'")),
            };
            first = false;
            let (mono, coef) = self.term()?;
            poly.add_term(mono, coef * sign);
        }
    }

    fn term(&mut self) -> Result<(Monomial, C64)> {
        let n = self.names.len();
        let mut exps = vec![0u32; n];
        let mut coef = C64::new(1.0, 0.0);
        loop {
            self.factor(&mut exps, &mut coef)?;
            if self.peek().tok == Tok::Star {
                self.next();
            } else {
                break;
            }
        }
        Ok((Monomial(exps), coef))
    }

    fn factor(&mut self, exps: &mut [u32], coef: &mut C64) -> Result<()> {
        let t = self.next();
        match t.tok {
            Tok::Number { value, .. } => {
                *coef *= value;
                Ok(())
            }
            Tok::LParen => {
                *coef *= self.complex()?;
                Ok(())
            }
            Tok::Ident(name) => {
                let Some(v) = self.names.iter().position(|s| *s == name) else {
                    return Err(syntax(
                        t.line,
                        t.column,
                        format!("undeclared variable '{name}'"),
                    ));
                };
                let mut power = 1;
                if self.peek().tok == Tok::Caret {
                    self.next();
                    let e = self.next();
                    match e.tok {
                        Tok::Number {
                            integer: Some(k), ..
                        } => power = k,
                        _ => {
                            return Err(syntax(
                                e.line,
                                e.column,
                                "exponent must be a nonnegative integer",
                            ))
                        }
                    }
                }
                exps[v] = exps[v]
                    .checked_add(power)
                    .ok_or_else(|| syntax(t.line, t.column, "exponent overflow"))?;
                Ok(())
            }
            Tok::End => Err(syntax(t.line, t.column, "unexpected end of input")),
            _ => Err(syntax(t.line, t.column, "expected a coefficient or variable")),
        }
    }

    /// Inside parentheses: `a`, `bi`, `a+bi`, `a-bi`, with optional signs.
    fn complex(&mut self) -> Result<C64> {
        let mut value = C64::new(0.0, 0.0);
        let mut parts = 0;
        loop {
            let t = self.peek().clone();
            let sign = match t.tok {
                Tok::Plus => {
                    self.next();
                    1.0
                }
                Tok::Minus => {
                    self.next();
                    -1.0
                }
                Tok::RParen if parts > 0 => {
                    self.next();
                    return Ok(value);
                }
                _ if parts == 0 => 1.0,
                _ => return Err(syntax(t.line, t.column, "expected ')' in complex literal")),
            };
            let t = self.next();
            let part = match t.tok {
                Tok::Number { value: x, .. } => {
                    if matches!(&self.peek().tok, Tok::Ident(s) if s == "i") {
                        self.next();
                        C64::new(0.0, x)
                    } else {
                        C64::new(x, 0.0)
                    }
                }
                Tok::Ident(ref s) if s == "i" => C64::new(0.0, 1.0),
                _ => return Err(syntax(t.line, t.column, "expected a number in complex literal")),
            };
            value += part * sign;
            parts += 1;
            if parts > 2 {
                return Err(syntax(t.line, t.column, "too many parts in complex literal"));
            }
        }
    }
}

/// Splits off the first line that is not blank after comment removal.
fn header_line<'a>(lines: &[&'a str], from: usize) -> Option<(usize, &'a str)> {
    (from..lines.len()).find_map(|k| {
        let body = lines[k].split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((k, body))
    })
}

/// Parses a polynomial system from the text format.
pub fn parse_system(text: &str) -> Result<PolySystem> {
    let lines: Vec<&str> = text.lines().collect();
    let Some((count_line, count_text)) = header_line(&lines, 0) else {
        return Err(Error::EmptySystem("input is empty".into()));
    };
    let trimmed = count_text.trim();
    let column = count_text.find(trimmed).unwrap_or(0) + 1;
    let count: usize = trimmed.parse().map_err(|_| {
        syntax(
            count_line + 1,
            column,
            format!("expected the equation count, found '{trimmed}'"),
        )
    })?;
    if count == 0 {
        return Err(Error::EmptySystem("equation count is zero".into()));
    }

    let Some((names_line, names_text)) = header_line(&lines, count_line + 1) else {
        return Err(Error::EmptySystem("missing variable declaration line".into()));
    };
    let mut names: Vec<String> = Vec::new();
    for (offset, name) in word_offsets(names_text) {
        let ok = name.chars().next().is_some_and(is_ident_start) && name.chars().all(is_ident_char);
        if !ok {
            return Err(syntax(
                names_line + 1,
                offset + 1,
                format!("invalid variable name '{name}'"),
            ));
        }
        if names.iter().any(|s| s == name) {
            return Err(Error::Variables(format!("variable '{name}' declared twice")));
        }
        names.push(name.to_string());
    }

    let tokens = lex(&lines[names_line + 1..], names_line + 2)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        names: &names,
    };
    let mut equations = Vec::with_capacity(count);
    while !parser.at_end() {
        equations.push(parser.polynomial()?);
    }
    // The header count normally equals the number of equations; a square-system
    // style header giving the variable count is accepted as well.
    if equations.len() != count && count != names.len() {
        let t = parser.peek();
        return Err(syntax(
            t.line,
            t.column,
            format!("expected {count} polynomials, found {}", equations.len()),
        ));
    }
    PolySystem::new(names, equations)
}

fn word_offsets(s: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = s;
    let mut base = 0;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start();
        base += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let word = &trimmed[..end];
        let at = base;
        base += end;
        rest = &trimmed[end..];
        Some((at, word))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_system() {
        let f = parse_system("2\nx1 x2\nx1^3 + x1*x2^2;\nx1*x2^2 + x2^3;\nx1^2*x2 + x1*x2^2;")
            .unwrap();
        assert_eq!(f.neqs(), 3);
        assert_eq!(f.nvars(), 2);
        assert_eq!(f.equations()[0].num_terms(), 2);
        assert_eq!(f.equations()[0].coefficient(&[3, 0]), C64::new(1.0, 0.0));
    }

    #[test]
    fn identity_system() {
        let f = parse_system("1\nx\nx;").unwrap();
        assert_eq!(f.equations()[0].coefficient(&[1]), C64::new(1.0, 0.0));
        assert_eq!(f.equations()[0].num_terms(), 1);
    }

    #[test]
    fn complex_coefficient() {
        let f = parse_system("1\nx\n(1.5-0.5i)*x^2 - 1;").unwrap();
        let p = &f.equations()[0];
        assert_eq!(p.coefficient(&[2]), C64::new(1.5, -0.5));
        assert_eq!(p.coefficient(&[0]), C64::new(-1.0, 0.0));
    }

    #[test]
    fn comments_whitespace_and_literals() {
        let text = "# header comment\n 2 # count\n\n a b\n  2.5e-1*a\n * b^2 # split\n + (i)*b - (2)*a*a;\n(-1e3i)*a;\n";
        let f = parse_system(text).unwrap();
        let p = &f.equations()[0];
        assert_eq!(p.coefficient(&[1, 2]), C64::new(0.25, 0.0));
        assert_eq!(p.coefficient(&[0, 1]), C64::new(0.0, 1.0));
        assert_eq!(p.coefficient(&[2, 0]), C64::new(-2.0, 0.0));
        assert_eq!(f.equations()[1].coefficient(&[1, 0]), C64::new(0.0, -1000.0));
    }

    #[test]
    fn reports_position_of_errors() {
        let err = parse_system("1\nx\nx^2 + * 3;").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 3,
                column: 7,
                message: "expected a coefficient or variable".into()
            }
        );
        let err = parse_system("1\nx\nx + y;").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 5, .. }), "{err}");
        let err = parse_system("1\nx\nx^1.5;").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 3, .. }), "{err}");
        let err = parse_system("two\nx\nx;").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, column: 1, .. }), "{err}");
    }

    #[test]
    fn count_mismatches() {
        assert!(matches!(parse_system("2\nx\nx;"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_system("1\nx y\nx;y;x;"), Err(Error::Syntax { .. })));
        // header equal to the variable count
        assert_eq!(parse_system("1\nx\nx;x^2;").unwrap().neqs(), 2);
        assert!(matches!(parse_system("1\nx\nx"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_system("1\nx\n;"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn declaration_errors() {
        assert!(matches!(parse_system(""), Err(Error::EmptySystem(_))));
        assert!(matches!(parse_system("0\nx\n"), Err(Error::EmptySystem(_))));
        assert!(matches!(parse_system("1\n"), Err(Error::EmptySystem(_))));
        assert!(matches!(parse_system("1\nx x\nx;"), Err(Error::Variables(_))));
        assert!(matches!(parse_system("1\n2x\nx;"), Err(Error::Syntax { .. })));
    }
}
