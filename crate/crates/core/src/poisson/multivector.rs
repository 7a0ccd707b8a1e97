use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;

use super::coeff::{CoeffSum, DerivationTable, Monomial, Signature};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Multivector field in the coordinate basis; keys are strictly increasing
/// coordinate indices (y's first, then x's).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    sig: Arc<Signature>,
    terms: BTreeMap<Vec<usize>, CoeffSum>,
}

/// Sign of the permutation sorting `a ++ b`, or None if they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut inversions = 0usize;
    for &i in a {
        for &j in b {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((inversions % 2 == 1, merged))
}

impl Multivector {
    pub fn zero(sig: Arc<Signature>) -> Self {
        Multivector { sig, terms: BTreeMap::new() }
    }

    /// `coeff * d_{idx[0]} ^ d_{idx[1]} ^ ...` with arbitrary index order.
    pub fn basis(sig: Arc<Signature>, idx: &[usize], coeff: CoeffSum) -> Result<Self> {
        let dim = sig.dim();
        if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
            return Err(Error::Symbolic(format!("coordinate index {bad} out of range ({dim} coordinates)")));
        }
        let mut out = Self::zero(sig);
        let mut sorted = idx.to_vec();
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(out);
        }
        out.add_at(sorted, if odd { coeff.neg() } else { coeff });
        Ok(out)
    }

    /// The function `f` as a degree-0 multivector.
    pub fn function(sig: Arc<Signature>, f: CoeffSum) -> Self {
        let mut out = Self::zero(sig);
        out.add_at(Vec::new(), f);
        out
    }

    /// `sum_i y_i d_{y_i}`.
    pub fn euler(sig: Arc<Signature>) -> Self {
        let mut out = Self::zero(sig.clone());
        for i in 0..sig.n_y {
            out.add_at(vec![i], CoeffSum::y(&sig, i, 1));
        }
        out
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, CoeffSum> {
        &self.terms
    }

    pub fn get(&self, idx: &[usize]) -> CoeffSum {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_at(&mut self, idx: Vec<usize>, c: CoeffSum) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(idx.clone()).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::Symbolic("multivectors use different coordinates or symbols".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_at(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul_coeff(&CoeffSum::constant(&self.sig, c.clone()))
    }

    pub fn mul_coeff(&self, f: &CoeffSum) -> Self {
        let mut out = Self::zero(self.sig.clone());
        for (k, c) in &self.terms {
            out.add_at(k.clone(), c.mul(f));
        }
        out
    }

    /// Degree when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.sig.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((odd, idx)) = merge_sign(a, b) {
                    let c = ca.mul(cb);
                    out.add_at(idx, if odd { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Right derivative in the odd variable dual to coordinate `l`.
    pub fn right_derivative(&self, l: usize) -> Self {
        let mut out = Self::zero(self.sig.clone());
        for (idx, c) in &self.terms {
            if let Some(s) = idx.iter().position(|&i| i == l) {
                let p = idx.len();
                let mut rest = idx.clone();
                rest.remove(s);
                out.add_at(rest, if (p - 1 - s) % 2 == 1 { c.neg() } else { c.clone() });
            }
        }
        out
    }

    /// Coefficientwise partial derivative in coordinate `c`.
    pub fn derivative(&self, c: usize, table: &DerivationTable) -> Result<Self> {
        let mut out = Self::zero(self.sig.clone());
        for (idx, coeff) in &self.terms {
            out.add_at(idx.clone(), coeff.derivative(&self.sig, c, table)?);
        }
        Ok(out)
    }

    /// Schouten bracket, with symbol derivatives taken from `table`.
    ///
    /// Uses odd variables: [P,Q] = sum_l (P d/dtheta_l) ^ d_l Q
    /// - (-1)^{(p-1)(q-1)} (Q d/dtheta_l) ^ d_l P, termwise in p and q.
    pub fn schouten(&self, other: &Self, table: &DerivationTable) -> Result<Self> {
        self.check(other)?;
        let dim = self.sig.dim();
        let sig = &self.sig;
        // derivatives are only needed along directions the other side contains
        let used = |m: &Self| -> Vec<bool> {
            let mut u = vec![false; dim];
            m.terms.keys().flatten().for_each(|&l| u[l] = true);
            u
        };
        let diffs = |m: &Self, need: Vec<bool>| -> Result<Vec<(Vec<usize>, CoeffSum, Vec<CoeffSum>)>> {
            m.terms
                .iter()
                .map(|(k, c)| {
                    let d = (0..dim)
                        .map(|l| if need[l] { c.derivative(sig, l, table) } else { Ok(CoeffSum::zero()) })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((k.clone(), c.clone(), d))
                })
                .collect()
        };
        let ta = diffs(self, used(other))?;
        let tb = diffs(other, used(self))?;
        let parts: Vec<Self> = ta
            .par_iter()
            .map(|(i, a, da)| {
                let mut acc = Self::zero(sig.clone());
                let p = i.len() as i64;
                for (j, b, db) in &tb {
                    let q = j.len() as i64;
                    let graded_odd = ((p - 1) * (q - 1)).rem_euclid(2) == 1;
                    for (s, &l) in i.iter().enumerate() {
                        let rest = without(i, s);
                        let right_odd = (p - 1 - s as i64) % 2 == 1;
                        if let Some((odd, idx)) = merge_sign(&rest, j) {
                            let c = a.mul(&db[l]);
                            acc.add_at(idx, if odd ^ right_odd { c.neg() } else { c });
                        }
                    }
                    for (s, &l) in j.iter().enumerate() {
                        let rest = without(j, s);
                        let right_odd = (q - 1 - s as i64) % 2 == 1;
                        if let Some((odd, idx)) = merge_sign(&rest, i) {
                            let c = b.mul(&da[l]);
                            // overall factor -(-1)^{(p-1)(q-1)}
                            let neg = odd ^ right_odd ^ !graded_odd;
                            acc.add_at(idx, if neg { c.neg() } else { c });
                        }
                    }
                }
                acc
            })
            .collect();
        let mut out = Self::zero(sig.clone());
        for part in parts {
            for (k, c) in part.terms {
                out.add_at(k, c);
            }
        }
        Ok(out)
    }

    pub fn hamiltonian_field(&self, x: usize) -> Result<Self> {
        if x >= self.sig.n_x {
            return Err(Error::Symbolic(format!("no polydisc coordinate x{}", x + 1)));
        }
        Ok(self.right_derivative(self.sig.n_y + x))
    }

    /// Coefficient of the top monomial in `pi^(dim/2) ^ euler`.
    pub fn pfaffian(&self) -> Result<CoeffSum> {
        if self.degree().is_some_and(|d| d != 2) {
            return Err(Error::Symbolic("pfaffian needs a bivector".into()));
        }
        let dim = self.sig.dim();
        if dim.is_multiple_of(2) {
            return Err(Error::Symbolic(format!("pfaffian needs an odd number of coordinates, got {dim}")));
        }
        let mut acc = Self::euler(self.sig.clone());
        for _ in 0..(dim - 1) / 2 {
            acc = self.wedge(&acc)?;
        }
        Ok(acc.get(&(0..dim).collect::<Vec<_>>()))
    }

    pub fn substitute(&self, s: usize, value: &CoeffSum) -> Result<Self> {
        let mut out = Self::zero(self.sig.clone());
        for (idx, c) in &self.terms {
            out.add_at(idx.clone(), c.substitute(&self.sig, s, value)?);
        }
        Ok(out)
    }

    /// The same multivector over `sig`, whose symbols must extend the current ones.
    pub fn extend_symbols(&self, sig: Arc<Signature>) -> Result<Self> {
        let old = &self.sig;
        if sig.n_y != old.n_y || sig.n_x != old.n_x || sig.symbols.get(..old.symbols.len()) != Some(&old.symbols[..]) {
            return Err(Error::Symbolic("target signature does not extend the current one".into()));
        }
        let pad = sig.symbols.len() - old.symbols.len();
        let mut out = Self::zero(sig);
        for (idx, c) in &self.terms {
            out.add_at(idx.clone(), c.pad_symbols(pad));
        }
        Ok(out)
    }

    /// Numeric coefficients at a point.
    pub fn eval(&self, y: &[f64], x: &[f64], f: &[f64]) -> BTreeMap<Vec<usize>, f64> {
        self.terms.iter().map(|(k, c)| (k.clone(), c.eval(y, x, f))).collect()
    }

    /// Restricts to the affine chart `y_c = 1` with coordinates `z_k = y_k / y_c`.
    /// Needs coefficients of y-degree equal to the number of y-directions in each term.
    pub fn to_chart(&self, c: usize) -> Result<Self> {
        let sig = &self.sig;
        if c >= sig.n_y {
            return Err(Error::Symbolic(format!("chart index {c} out of range")));
        }
        let keep: Vec<usize> = (0..sig.n_y).filter(|&k| k != c).collect();
        let mut chart_sig = Signature::new(sig.n_y - 1, sig.n_x, sig.symbols.clone());
        chart_sig.y_name = 'z';
        let chart_sig = Arc::new(chart_sig);
        let new_index = |i: usize| -> usize {
            if i < sig.n_y {
                keep.iter().position(|&k| k == i).expect("index kept")
            } else {
                i - 1
            }
        };
        let restrict = |cs: &CoeffSum| -> CoeffSum {
            let mut out = CoeffSum::zero();
            for t in cs.terms() {
                let m = Monomial {
                    y: keep.iter().map(|&k| t.mono.y[k]).collect(),
                    lin: t.mono.lin.clone(),
                    f: t.mono.f.clone(),
                };
                out.add_term(t.c.clone(), m);
            }
            out
        };
        let mut out = Self::zero(chart_sig.clone());
        for (idx, coeff) in &self.terms {
            let ydirs = idx.iter().filter(|&&i| i < sig.n_y).count() as i64;
            if coeff.terms().any(|t| t.mono.y_degree() != ydirs) {
                return Err(Error::Symbolic("coefficient degree does not descend to the chart".into()));
            }
            // d_{y_c} pushes forward to -sum_k z_k d_{z_k}
            let mut pieces: Vec<(Vec<usize>, CoeffSum)> = vec![(Vec::new(), restrict(coeff))];
            for &i in idx {
                let mut next = Vec::new();
                for (prefix, cs) in pieces {
                    if i == c {
                        for &k in &keep {
                            let mut p = prefix.clone();
                            p.push(new_index(k));
                            next.push((p, cs.mul(&CoeffSum::y(&chart_sig, new_index(k), 1)).neg()));
                        }
                    } else {
                        let mut p = prefix;
                        p.push(new_index(i));
                        next.push((p, cs));
                    }
                }
                pieces = next;
            }
            for (p, cs) in pieces {
                out = out.add(&Multivector::basis(chart_sig.clone(), &p, cs)?)?;
            }
        }
        Ok(out)
    }

    /// Canonical text, one basis monomial per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (idx, c) in &self.terms {
            let names: Vec<String> = idx.iter().map(|&i| self.sig.coord_name(i)).collect();
            let basis = if names.is_empty() { "1".to_string() } else { names.join("^") };
            out.push_str(&format!("{basis} : {}\n", c.render(&self.sig)));
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(CoeffSum::max_abs_coefficient).fold(0.0, f64::max)
    }
}

/// Pfaffian of an even skew matrix by expansion along the first row.
pub fn pfaffian_f64(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 1..n {
        if a[0][j] == 0.0 {
            continue;
        }
        let rest: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<f64>> = rest.iter().map(|&r| rest.iter().map(|&c| a[r][c]).collect()).collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * a[0][j] * pfaffian_f64(&minor);
    }
    total
}

fn without(v: &[usize], s: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    out.remove(s);
    out
}
