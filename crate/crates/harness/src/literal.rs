//! Body literals: `interval{a,b}`, `ball{r}`, `ball{r,cx,cy}`,
//! `polygon{(nx,ny),...; h1,...}` and `smooth{a0; a1,b1; a2,b2; ...}`.
//!
//! Numbers may be written as small arithmetic expressions over decimal
//! literals, `pi` and `sqrt(..)`, e.g. `ball{4/pi}`.

use ou_brunn_core::ConvexBody;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LiteralError {
    #[error("body literal `{0}`: expected `name{{...}}`")]
    Shape(String),
    #[error("body literal `{0}`: unknown constructor `{1}`")]
    Constructor(String, String),
    #[error("body literal `{0}`: {1}")]
    Syntax(String, String),
    #[error("body literal `{0}`: {1}")]
    Body(String, ou_brunn_core::Error),
}

pub fn parse_body(src: &str) -> Result<ConvexBody, LiteralError> {
    let s = src.trim();
    let open = s.find('{').ok_or_else(|| LiteralError::Shape(src.into()))?;
    if !s.ends_with('}') {
        return Err(LiteralError::Shape(src.into()));
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let syntax = |msg: String| LiteralError::Syntax(src.into(), msg);
    let body = match name {
        "interval" => match numbers(inner).map_err(syntax)?[..] {
            [a, b] => ConvexBody::interval(a, b),
            _ => return Err(syntax("interval takes two numbers".into())),
        },
        "ball" => match numbers(inner).map_err(syntax)?[..] {
            [r] => ConvexBody::ball(r, [0.0, 0.0]),
            [r, cx, cy] => ConvexBody::ball(r, [cx, cy]),
            _ => return Err(syntax("ball takes a radius and optionally a centre".into())),
        },
        "polygon" => {
            let (normals, offsets) = inner.split_once(';').ok_or_else(|| syntax("polygon needs `normals; offsets`".into()))?;
            let normals = pairs(normals).map_err(syntax)?;
            let offsets = numbers(offsets).map_err(syntax)?;
            ConvexBody::polygon(normals, offsets)
        }
        "smooth" => {
            let mut groups = inner.split(';');
            let a0 = match numbers(groups.next().unwrap_or("")).map_err(syntax)?[..] {
                [a0] => a0,
                _ => return Err(syntax("smooth starts with the constant coefficient".into())),
            };
            let (mut cos, mut sin) = (vec![a0], vec![0.0]);
            for g in groups {
                match numbers(g).map_err(syntax)?[..] {
                    [a, b] => {
                        cos.push(a);
                        sin.push(b);
                    }
                    _ => return Err(syntax("each harmonic is `a_k, b_k`".into())),
                }
            }
            ConvexBody::smooth(cos, sin)
        }
        other => return Err(LiteralError::Constructor(src.into(), other.into())),
    };
    body.map_err(|e| LiteralError::Body(src.into(), e))
}

/// Comma-separated numeric expressions.
fn numbers(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(eval).collect()
}

/// `(x, y), (x, y), ...`
fn pairs(s: &str) -> Result<Vec<[f64; 2]>, String> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("unclosed `(`")?;
        match numbers(&body[..close])?[..] {
            [x, y] => out.push([x, y]),
            _ => return Err("normals are `(nx, ny)` pairs".into()),
        }
        rest = body[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(out)
}

/// Evaluates `expr := term (('+' | '-') term)*`,
/// `term := factor (('*' | '/') factor)*`,
/// `factor := '-' factor | number | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'`.
pub fn eval(s: &str) -> Result<f64, String> {
    let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if toks.is_empty() {
        return Err("empty number".into());
    }
    let mut p = Parser { toks, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in `{}`", s.trim()));
    }
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

struct Parser {
    toks: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.factor()?;
        loop {
            if self.eat('*') {
                v *= self.factor()?;
            } else if self.eat('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, String> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        if self.eat('(') {
            let v = self.expr()?;
            return if self.eat(')') { Ok(v) } else { Err("missing `)`".into()) };
        }
        let rest: String = self.toks[self.pos..].iter().collect();
        if rest.starts_with("pi") {
            self.pos += 2;
            return Ok(std::f64::consts::PI);
        }
        if rest.starts_with("sqrt(") {
            self.pos += 4;
            return Ok(self.factor()?.sqrt());
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            let exp_sign = matches!(c, '+' | '-') && matches!(self.toks.get(self.pos.wrapping_sub(1)), Some('e' | 'E'));
            if c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E') || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.toks[start..self.pos].iter().collect();
        text.parse::<f64>().map_err(|_| format!("bad number `{text}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_expressions() {
        assert_eq!(eval("4/pi").unwrap(), 4.0 / std::f64::consts::PI);
        assert_eq!(eval("-1.5e-1").unwrap(), -0.15);
        assert_eq!(eval("2*(1+sqrt(4))").unwrap(), 6.0);
        assert_eq!(eval("1e3").unwrap(), 1000.0);
        assert!(eval("1/0").is_err());
        assert!(eval("2x").is_err());
    }

    #[test]
    fn constructors() {
        assert_eq!(parse_body("interval{-1, 1}").unwrap(), ConvexBody::interval(-1.0, 1.0).unwrap());
        assert_eq!(parse_body(" ball{2} ").unwrap(), ConvexBody::ball(2.0, [0.0, 0.0]).unwrap());
        assert_eq!(parse_body("ball{0.8,0.5,0.3}").unwrap(), ConvexBody::ball(0.8, [0.5, 0.3]).unwrap());
        assert_eq!(
            parse_body("polygon{(1,0),(0,1),(-1,0),(0,-1); 1,1,1,1}").unwrap(),
            ConvexBody::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
        );
        assert_eq!(
            parse_body("smooth{1; 0,0; 0.25,0}").unwrap(),
            ConvexBody::smooth(vec![1.0, 0.0, 0.25], vec![0.0, 0.0, 0.0]).unwrap()
        );
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(parse_body("ball"), Err(LiteralError::Shape(_))));
        assert!(matches!(parse_body("cube{1}"), Err(LiteralError::Constructor(..))));
        assert!(matches!(parse_body("interval{1}"), Err(LiteralError::Syntax(..))));
        assert!(matches!(parse_body("interval{1,0}"), Err(LiteralError::Body(..))));
        assert!(matches!(parse_body("smooth{1; 0,0; 0.5,0}"), Err(LiteralError::Body(..))));
        assert!(matches!(parse_body("polygon{(1,0),(0,1); 1,1}"), Err(LiteralError::Body(..))));
    }
}
