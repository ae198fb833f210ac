//! Parser for the textual form of field elements, e.g. `(-1)/(e1*e3)` or
//! `b/2 - 1/(k*b)` style fixtures (variables e1, e2, e3, b).

use num_bigint::BigInt;

use super::poly::Poly;
use super::ratfun::RatFun;
use super::RatError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, RatError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push((Tok::Int(txt.parse().expect("digits")), st));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(cs[st..i].iter().collect()), st));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(RatError::Parse { pos: i, msg: format!("unexpected character '{}'", c) });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T, RatError> {
        Err(RatError::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<RatFun, RatError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c)) = self.peek() {
            let c = *c;
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc + t } else { acc - t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun, RatError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c)) = self.peek() {
            let c = *c;
            if c != '*' && c != '/' {
                break;
            }
            self.pos += 1;
            let t = self.unary()?;
            acc = if c == '*' {
                acc * t
            } else {
                let at = self.here();
                acc.checked_div(&t).map_err(|_| RatError::Parse { pos: at, msg: "division by zero".into() })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFun, RatError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFun, RatError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let neg = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = match self.peek() {
                Some(Tok::Int(n)) => {
                    let n: i32 = n.try_into().or_else(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    n
                }
                _ => return self.err("expected integer exponent"),
            };
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return self.err("negative power of zero");
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFun, RatError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RatFun::from_bigint(n))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "e1" => Ok(RatFun::e1()),
                    "e2" => Ok(RatFun::e2()),
                    "e3" => Ok(RatFun::e3()),
                    "b" | "beta" => Ok(RatFun::beta()),
                    _ => {
                        self.pos -= 1;
                        self.err(&format!("unknown variable '{}'", id))
                    }
                }
            }
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
            _ => self.err("expected number, variable or '('"),
        }
    }
}

pub fn parse_ratfun(s: &str) -> Result<RatFun, RatError> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, len: s.chars().count() };
    let r = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(r)
}

impl std::str::FromStr for RatFun {
    type Err = RatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ratfun(s)
    }
}

/// A polynomial in e1, e2, e3 given by exponent triples (e1, e2, e3).
pub type E3Poly = Vec<([u16; 3], BigInt)>;

/// Substitute e3 = -e1 - e2 and normalize.
pub fn eliminate_e3(expr: &E3Poly) -> RatFun {
    let e3 = Poly::linear(-1, -1);
    let mut acc = Poly::zero();
    for (m, c) in expr {
        let t = Poly::monomial([m[0], m[1], 0], c.clone()).mul(&e3.pow(m[2] as u32));
        acc = acc.add(&t);
    }
    RatFun::from_poly(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_rendering() {
        for s in ["(e1^2 - 3*e1*e2)/(2*e2 + 7)", "(-1)/(e1^2 + e1*e2)", "(0)/(1)", "(e1*b + 1)/(e2)"] {
            let r = parse_ratfun(s).unwrap();
            assert_eq!(r.to_string(), s);
        }
    }

    #[test]
    fn e3_is_eliminated() {
        let r = parse_ratfun("e1+e2+e3").unwrap();
        assert!(r.is_zero());
        let r = parse_ratfun("-1/(e1*e3)").unwrap();
        assert_eq!(r.to_string(), "(1)/(e1^2 + e1*e2)");
        assert_eq!(parse_ratfun("e1^-2 * e1^3").unwrap(), RatFun::e1());
    }

    #[test]
    fn eliminate_examples() {
        let one = BigInt::from(1);
        let p = vec![([1, 0, 0], one.clone()), ([0, 1, 0], one.clone()), ([0, 0, 1], one.clone())];
        assert!(eliminate_e3(&p).is_zero());
        assert_eq!(eliminate_e3(&vec![([0, 0, 1], one.clone())]), RatFun::weight(-1, -1));
        assert_eq!(eliminate_e3(&vec![([1, 0, 1], one)]).to_string(), "(-e1^2 - e1*e2)/(1)");
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_ratfun("e1 + x") {
            Err(RatError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {:?}", other),
        }
        assert!(parse_ratfun("1/(e1-e1)").is_err());
        assert!(parse_ratfun("(e1").is_err());
    }
}
