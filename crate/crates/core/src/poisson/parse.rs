//! Reader for the text form printed by `CoeffSum::render` and
//! `Multivector::render`, also used for hand-transcribed formulas.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::coeff::{CoeffSum, Monomial, Signature};
use super::multivector::Multivector;
use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| Error::Parse(text.clone()))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<CoeffSum> {
        let mut acc = CoeffSum::zero();
        let mut neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let p = self.product()?;
            acc.add_assign(&if neg { p.neg() } else { p });
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<CoeffSum> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                acc = acc.scale(&Rational::from_integer(d).recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            other => Err(Error::Parse(format!("expected a number, found {other:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let e: i64 = self.integer()?.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
        Ok(if neg { -e } else { e })
    }

    fn power(&mut self) -> Result<CoeffSum> {
        let sig = self.sig;
        let tok = self.toks.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(CoeffSum::constant(sig, Rational::from_integer(n))),
            Tok::Op('(') => {
                let inner = self.sum()?;
                self.expect(')')?;
                if self.eat('^') {
                    let e = self.exponent()?;
                    if e < 0 {
                        return Err(Error::Parse("negative power of a sum".into()));
                    }
                    return Ok(inner.pow(sig, e as u32));
                }
                Ok(inner)
            }
            Tok::Ident(name) if name == "exp" => {
                self.expect('(')?;
                let lin = self.linear()?;
                self.expect(')')?;
                Ok(CoeffSum::exp(sig, lin))
            }
            Tok::Ident(name) => {
                let e = if self.eat('^') { self.exponent()? } else { 1 };
                let mut m = Monomial::one(sig);
                if let Some(i) = coord_index(&name, sig.y_name, sig.n_y) {
                    m.y[i] = e;
                } else if let Some(s) = sig.symbol_index(&name) {
                    if e < 0 && !sig.symbols[s].invertible {
                        return Err(Error::Parse(format!("symbol {name} is not invertible")));
                    }
                    m.f[s] = e;
                } else {
                    return Err(Error::Parse(format!("unknown name {name:?}")));
                }
                Ok(CoeffSum::term(Rational::one(), m))
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }

    /// A rational linear form in the x's, as inside `exp(...)`.
    fn linear(&mut self) -> Result<Vec<Rational>> {
        let mut lin = vec![Rational::zero(); self.sig.n_x];
        let mut neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        loop {
            let mut c = Rational::one();
            if let Some(Tok::Num(_)) = self.peek() {
                c = Rational::from_integer(self.integer()?);
                if self.eat('/') {
                    c /= Rational::from_integer(self.integer()?);
                }
                self.expect('*')?;
            }
            let name = match self.toks.get(self.pos).cloned() {
                Some(Tok::Ident(n)) => n,
                other => return Err(Error::Parse(format!("expected an x coordinate, found {other:?}"))),
            };
            self.pos += 1;
            let l = x_index(self.sig, &name).ok_or_else(|| Error::Parse(format!("unknown x coordinate {name:?}")))?;
            if self.eat('/') {
                c /= Rational::from_integer(self.integer()?);
            }
            lin[l] += if neg { -c } else { c };
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(lin);
            }
        }
    }
}

fn coord_index(name: &str, prefix: char, n: usize) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let i: usize = rest.parse().ok()?;
    (i < n && !rest.is_empty()).then_some(i)
}

fn x_index(sig: &Signature, name: &str) -> Option<usize> {
    (0..sig.n_x).find(|&l| sig.x_name(l) == name)
}

pub fn parse_coeff(sig: &Signature, s: &str) -> Result<CoeffSum> {
    let mut p = Parser { sig, toks: tokenize(s)?, pos: 0 };
    let out = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(out)
}

/// Lines `basis : coefficient`, where basis is `1` or coordinate names joined
/// by `^`. Blank lines and `#` comments are skipped; repeated bases add up.
pub fn parse_multivector(sig: Arc<Signature>, s: &str) -> Result<Multivector> {
    let mut out = Multivector::zero(sig.clone());
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (basis, coeff) =
            line.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in line {line:?}")))?;
        let basis = basis.trim();
        let idx: Vec<usize> = if basis == "1" {
            Vec::new()
        } else {
            basis
                .split('^')
                .map(|name| {
                    let name = name.trim();
                    coord_index(name, sig.y_name, sig.n_y)
                        .or_else(|| x_index(&sig, name).map(|l| sig.n_y + l))
                        .ok_or_else(|| Error::Parse(format!("unknown coordinate {name:?}")))
                })
                .collect::<Result<_>>()?
        };
        let c = parse_coeff(&sig, coeff)?;
        out = out.add(&Multivector::basis(sig.clone(), &idx, c)?)?;
    }
    Ok(out)
}
