use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};

/// Coordinates and function symbols shared by every coefficient of a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub n_y: usize,
    pub n_x: usize,
    pub symbols: Vec<Symbol>,
    /// Prefix for the first group of coordinates, `y` (homogeneous) or `z` (chart).
    pub y_name: char,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub invertible: bool,
    /// Constant symbols (like a deformation parameter) have zero derivative.
    pub constant: bool,
}

impl Symbol {
    pub fn function(name: &str) -> Self {
        Symbol { name: name.into(), invertible: false, constant: false }
    }

    pub fn invertible(name: &str) -> Self {
        Symbol { name: name.into(), invertible: true, constant: false }
    }

    pub fn constant(name: &str) -> Self {
        Symbol { name: name.into(), invertible: false, constant: true }
    }
}

impl Signature {
    pub fn new(n_y: usize, n_x: usize, symbols: Vec<Symbol>) -> Self {
        Signature { n_y, n_x, symbols, y_name: 'y' }
    }

    pub fn dim(&self) -> usize {
        self.n_y + self.n_x
    }

    pub fn x_name(&self, l: usize) -> String {
        if self.n_x == 1 {
            "x".into()
        } else {
            format!("x{}", l + 1)
        }
    }

    /// Name of coordinate `c`, with y's first and x's after.
    pub fn coord_name(&self, c: usize) -> String {
        if c < self.n_y {
            format!("{}{c}", self.y_name)
        } else {
            self.x_name(c - self.n_y)
        }
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

/// The non-scalar part of a term: y^a exp(<lin, x>) f^e.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub y: Vec<i64>,
    pub lin: Vec<Rational>,
    pub f: Vec<i64>,
}

impl Monomial {
    pub fn one(sig: &Signature) -> Self {
        Monomial { y: vec![0; sig.n_y], lin: vec![Rational::zero(); sig.n_x], f: vec![0; sig.symbols.len()] }
    }

    fn mul(&self, other: &Self) -> Self {
        Monomial {
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + b).collect(),
            lin: self.lin.iter().zip(&other.lin).map(|(a, b)| a + b).collect(),
            f: self.f.iter().zip(&other.f).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn y_degree(&self) -> i64 {
        self.y.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct CoeffTerm<'a> {
    pub c: &'a Rational,
    pub mono: &'a Monomial,
}

/// A finite sum of `c * Monomial`, kept merged with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffSum(BTreeMap<Monomial, Rational>);

/// Per-symbol, per-x-coordinate right-hand sides of d(symbol)/dx.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTable {
    pub rules: Vec<Vec<Option<CoeffSum>>>,
}

impl DerivationTable {
    pub fn empty(sig: &Signature) -> Self {
        DerivationTable { rules: vec![vec![None; sig.n_x]; sig.symbols.len()] }
    }

    pub fn set(&mut self, symbol: usize, x: usize, rhs: CoeffSum) {
        self.rules[symbol][x] = Some(rhs);
    }

    pub fn get(&self, symbol: usize, x: usize) -> Option<&CoeffSum> {
        self.rules.get(symbol).and_then(|r| r.get(x)).and_then(Option::as_ref)
    }
}

impl CoeffSum {
    pub fn zero() -> Self {
        CoeffSum(BTreeMap::new())
    }

    pub fn term(c: Rational, mono: Monomial) -> Self {
        let mut s = Self::zero();
        s.add_term(c, mono);
        s
    }

    pub fn constant(sig: &Signature, c: Rational) -> Self {
        Self::term(c, Monomial::one(sig))
    }

    pub fn y(sig: &Signature, i: usize, power: i64) -> Self {
        let mut m = Monomial::one(sig);
        m.y[i] = power;
        Self::term(Rational::one(), m)
    }

    pub fn exp(sig: &Signature, lin: Vec<Rational>) -> Self {
        let mut m = Monomial::one(sig);
        m.lin = lin;
        Self::term(Rational::one(), m)
    }

    pub fn symbol(sig: &Signature, s: usize, power: i64) -> Self {
        let mut m = Monomial::one(sig);
        m.f[s] = power;
        Self::term(Rational::one(), m)
    }

    pub fn add_term(&mut self, c: Rational, mono: Monomial) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = CoeffTerm<'_>> {
        self.0.iter().map(|(mono, c)| CoeffTerm { c, mono })
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.0 {
            self.add_term(c.clone(), m.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CoeffSum(self.0.iter().map(|(m, v)| (m.clone(), v * c)).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(c1 * c2, m1.mul(m2));
            }
        }
        out
    }

    pub fn pow(&self, sig: &Signature, e: u32) -> Self {
        (0..e).fold(CoeffSum::constant(sig, Rational::one()), |acc, _| acc.mul(self))
    }

    /// Partial derivative in coordinate `c` (y's first, then x's).
    pub fn derivative(&self, sig: &Signature, c: usize, table: &DerivationTable) -> Result<Self> {
        let mut out = Self::zero();
        if c < sig.n_y {
            for (m, v) in &self.0 {
                let a = m.y[c];
                if a != 0 {
                    let mut m2 = m.clone();
                    m2.y[c] -= 1;
                    out.add_term(v * Rational::from_integer(a.into()), m2);
                }
            }
            return Ok(out);
        }
        let l = c - sig.n_y;
        for (m, v) in &self.0 {
            if !m.lin[l].is_zero() {
                out.add_term(v * &m.lin[l], m.clone());
            }
            for (s, &e) in m.f.iter().enumerate() {
                if e == 0 || sig.symbols[s].constant {
                    continue;
                }
                let rule = table.get(s, l).ok_or_else(|| {
                    Error::Symbolic(format!("no derivation rule for {} in {}", sig.symbols[s].name, sig.x_name(l)))
                })?;
                let mut m2 = m.clone();
                m2.f[s] -= 1;
                let lead = CoeffSum::term(v * Rational::from_integer(e.into()), m2);
                out.add_assign(&lead.mul(rule));
            }
        }
        Ok(out)
    }

    /// Replaces symbol `s` by `value`; negative powers need a single-term value.
    pub fn substitute(&self, sig: &Signature, s: usize, value: &CoeffSum) -> Result<Self> {
        let mut out = Self::zero();
        for (m, v) in &self.0 {
            let e = m.f[s];
            let mut m2 = m.clone();
            m2.f[s] = 0;
            let base = CoeffSum::term(v.clone(), m2);
            let factor = if e >= 0 {
                value.pow(sig, e as u32)
            } else {
                value.inverse()?.pow(sig, (-e) as u32)
            };
            out.add_assign(&base.mul(&factor));
        }
        Ok(out)
    }

    fn inverse(&self) -> Result<Self> {
        let mut it = self.0.iter();
        match (it.next(), it.next()) {
            (Some((m, c)), None) => Ok(CoeffSum::term(
                c.recip(),
                Monomial {
                    y: m.y.iter().map(|a| -a).collect(),
                    lin: m.lin.iter().map(|a| -a.clone()).collect(),
                    f: m.f.iter().map(|a| -a).collect(),
                },
            )),
            _ => Err(Error::Symbolic("only single-term coefficients can be inverted".into())),
        }
    }

    /// Appends `extra` unused symbols to every monomial.
    pub fn pad_symbols(&self, extra: usize) -> Self {
        CoeffSum(
            self.0
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.f.extend(std::iter::repeat_n(0, extra));
                    (m, c.clone())
                })
                .collect(),
        )
    }

    pub fn eval(&self, y: &[f64], x: &[f64], f: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(m, c)| {
                let mut v = to_f64(c);
                for (a, &e) in y.iter().zip(&m.y) {
                    v *= a.powi(e as i32);
                }
                let lin: f64 = m.lin.iter().zip(x).map(|(l, xv)| to_f64(l) * xv).sum();
                v *= lin.exp();
                for (a, &e) in f.iter().zip(&m.f) {
                    v *= a.powi(e as i32);
                }
                v
            })
            .sum()
    }

    /// Canonical text: terms in monomial order, `c*factor*...`.
    pub fn render(&self, sig: &Signature) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.y.iter().enumerate() {
                push_power(&mut factors, &format!("{}{i}", sig.y_name), e);
            }
            if m.lin.iter().any(|l| !l.is_zero()) {
                let mut lin = String::new();
                for (l, v) in m.lin.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    if v.is_negative() {
                        lin.push('-');
                    } else if !lin.is_empty() {
                        lin.push('+');
                    }
                    if !v.abs().is_one() {
                        lin.push_str(&format!("{}*", v.abs()));
                    }
                    lin.push_str(&sig.x_name(l));
                }
                factors.push(format!("exp({lin})"));
            }
            for (s, &e) in m.f.iter().enumerate() {
                push_power(&mut factors, &sig.symbols[s].name, e);
            }
            let a = c.abs();
            if factors.is_empty() || !a.is_one() {
                factors.insert(0, a.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.0.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

fn push_power(out: &mut Vec<String>, name: &str, e: i64) {
    match e {
        0 => {}
        1 => out.push(name.to_string()),
        _ => out.push(format!("{name}^{e}")),
    }
}
