use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::realize::{Preset, SemiToricRealization};
use crate::error::{Error, Result};
use crate::exact::{q, Rational};
use crate::poisson::{parse_coeff, CoeffSum, DerivationTable, Multivector, Signature, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExampleName {
    X4,
    C41,
    X5,
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleName::X4 => "x4",
            ExampleName::C41 => "c41",
            ExampleName::X5 => "x5",
        })
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x4" => Ok(ExampleName::X4),
            "c41" => Ok(ExampleName::C41),
            "x5" => Ok(ExampleName::X5),
            _ => Err(Error::InvalidParameter(format!("unknown example {s:?}, expected x4, c41 or x5"))),
        }
    }
}

/// Value of a function symbol at x = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Initial {
    Value(Rational),
    /// The deformation parameter itself.
    Epsilon,
}

#[derive(Clone, Debug)]
pub struct ExampleDeformation {
    pub name: ExampleName,
    pub realization: SemiToricRealization,
    pub sig: Arc<Signature>,
    pub ansatz: Multivector,
    pub derivations: DerivationTable,
    /// Per symbol; None for constant symbols.
    pub initial: Vec<Option<Initial>>,
}

// (symbol, x coordinate, right-hand side)
const X4_TABLE: &[(&str, &str, &str)] = &[
    ("eta", "x", "-1/8*exp(2*x)*xi1*xi3"),
    ("xi0", "x", "1/2*xi0*eta"),
    ("xi1", "x", "-1/3*xi1*eta"),
    ("xi2", "x", "1/2*xi2*eta"),
    ("xi3", "x", "-xi3*eta + exp(-3*x)*xi0*xi2"),
];

const C41_TABLE: &[(&str, &str, &str)] = &[
    ("xi", "x", "xi*eta"),
    ("eta", "x", "eps^2/4*(xi^2*exp(-2*x) - exp(2*x)*xi^-2)"),
];

const X5_TABLE: &[(&str, &str, &str)] = &[
    ("xi0", "x1", "-xi0*eta + 1/2*exp(-15*x1+15*x2)*xi1*xi4"),
    ("xi1", "x1", "0"),
    ("xi2", "x1", "0"),
    ("xi3", "x1", "xi3*eta - 1/2*exp(15*x1+15*x2)*xi2*xi4"),
    ("xi4", "x1", "0"),
    ("eta", "x1", "1/4*exp(-15*x1-5*x2)*xi1*xi3 - 1/4*exp(15*x1-5*x2)*xi0*xi2"),
    ("xi0", "x2", "1/3*xi0*eta - 1/2*exp(-15*x1+15*x2)*xi1*xi4"),
    ("xi1", "x2", "0"),
    ("xi2", "x2", "0"),
    ("xi3", "x2", "1/3*xi3*eta - 1/2*exp(15*x1+15*x2)*xi2*xi4"),
    ("xi4", "x2", "-2/3*xi4*eta + 1/3*exp(-20*x2)*xi0*xi3"),
    ("eta", "x2", "1/12*exp(-15*x1-5*x2)*xi1*xi3 + 1/12*exp(15*x1-5*x2)*xi0*xi2"),
];

fn table_from(sig: &Signature, rows: &[(&str, &str, &str)]) -> Result<DerivationTable> {
    let mut t = DerivationTable::empty(sig);
    for &(s, x, rhs) in rows {
        let si = sig.symbol_index(s).ok_or_else(|| Error::Parse(format!("unknown symbol {s}")))?;
        let xi = (0..sig.n_x).find(|&l| sig.x_name(l) == x).ok_or_else(|| Error::Parse(format!("unknown x {x}")))?;
        t.set(si, xi, parse_coeff(sig, rhs)?);
    }
    Ok(t)
}

/// sum over the given pairs of y_a d_a ^ y_b d_b.
fn log_pairs(sig: &Arc<Signature>, pairs: &[(usize, usize)]) -> Result<Multivector> {
    let mut out = Multivector::zero(sig.clone());
    for &(a, b) in pairs {
        let c = CoeffSum::y(sig, a, 1).mul(&CoeffSum::y(sig, b, 1));
        out = out.add(&Multivector::basis(sig.clone(), &[a, b], c)?)?;
    }
    Ok(out)
}

impl ExampleDeformation {
    pub fn new(name: ExampleName) -> Result<Self> {
        let (preset, symbols, rows) = match name {
            ExampleName::X4 => (
                Preset::X4,
                vec![
                    Symbol::function("xi0"),
                    Symbol::function("xi1"),
                    Symbol::function("xi2"),
                    Symbol::function("xi3"),
                    Symbol::function("eta"),
                ],
                X4_TABLE,
            ),
            ExampleName::C41 => (
                Preset::C41,
                vec![Symbol::invertible("xi"), Symbol::function("eta"), Symbol::constant("eps")],
                C41_TABLE,
            ),
            ExampleName::X5 => (
                Preset::X5,
                vec![
                    Symbol::function("xi0"),
                    Symbol::function("xi1"),
                    Symbol::function("xi2"),
                    Symbol::function("xi3"),
                    Symbol::function("xi4"),
                    Symbol::function("eta"),
                ],
                X5_TABLE,
            ),
        };
        let r = SemiToricRealization::preset(preset)?;
        let n = r.n();
        let base = r.pi0.signature();
        let sig = Arc::new(Signature::new(base.n_y, base.n_x, symbols));
        let derivations = table_from(&sig, rows)?;
        let sym = |s: &str, e: i64| CoeffSum::symbol(&sig, sig.symbol_index(s).expect("declared symbol"), e);
        let mut ansatz = r.pi0.extend_symbols(sig.clone())?;
        for i in 0..n {
            let rho = r.build_rho(i, (i + 1) % n)?.bivector.extend_symbols(sig.clone())?;
            let factor = match name {
                ExampleName::C41 => sym("eps", 1).mul(&sym("xi", if i % 2 == 0 { 1 } else { -1 })),
                _ => sym(&format!("xi{i}"), 1),
            };
            ansatz = ansatz.add(&rho.mul_coeff(&factor))?;
        }
        let pairs: Vec<(usize, usize)> = match name {
            ExampleName::X5 => vec![(1, 2), (2, 3), (3, 1)],
            _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        };
        ansatz = ansatz.add(&log_pairs(&sig, &pairs)?.mul_coeff(&sym("eta", 1)))?;
        let initial = sig
            .symbols
            .iter()
            .map(|s| match (name, s.name.as_str()) {
                (_, "eps") => None,
                (_, "eta") => Some(Initial::Value(q(0))),
                (ExampleName::C41, _) => Some(Initial::Value(q(1))),
                _ => Some(Initial::Epsilon),
            })
            .collect();
        Ok(ExampleDeformation { name, realization: r, sig, ansatz, derivations, initial })
    }

    /// [pi, pi] with symbol derivatives replaced by the table.
    pub fn master_residual(&self) -> Result<Multivector> {
        self.ansatz.schouten(&self.ansatz, &self.derivations)
    }

    /// Fails with a defect naming the first surviving term.
    pub fn verify(&self) -> Result<()> {
        let r = self.master_residual()?;
        if let Some((idx, c)) = r.terms().iter().next() {
            let names: Vec<String> = idx.iter().map(|&i| self.sig.coord_name(i)).collect();
            return Err(Error::Defect(format!(
                "{}: [pi, pi] has a nonzero term {} : {}",
                self.name,
                names.join("^"),
                c.render(&self.sig)
            )));
        }
        if self.sig.n_x > 1 {
            if let Some(msg) = self.incompatibility()? {
                return Err(Error::Defect(format!("{}: {msg}", self.name)));
            }
        }
        Ok(())
    }

    /// First symbol whose mixed second derivatives disagree, if any.
    pub fn incompatibility(&self) -> Result<Option<String>> {
        let t = &self.derivations;
        let sig = &self.sig;
        for s in 0..sig.symbols.len() {
            for a in 0..sig.n_x {
                for b in a + 1..sig.n_x {
                    let (Some(ra), Some(rb)) = (t.get(s, a), t.get(s, b)) else {
                        continue;
                    };
                    let ab = ra.derivative(sig, sig.n_y + b, t)?;
                    let ba = rb.derivative(sig, sig.n_y + a, t)?;
                    let diff = ab.sub(&ba);
                    if !diff.is_zero() {
                        return Ok(Some(format!(
                            "mixed derivatives of {} in {}, {} differ by {}",
                            sig.symbols[s].name,
                            sig.x_name(a),
                            sig.x_name(b),
                            diff.render(sig)
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn pfaffian(&self) -> Result<CoeffSum> {
        self.ansatz.pfaffian()
    }

    pub fn hamiltonian(&self, l: usize) -> Result<Multivector> {
        self.ansatz.hamiltonian_field(l)
    }

    /// The table as `d(symbol)/d(x) = rhs` lines in table order.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for l in 0..self.sig.n_x {
            for (s, sym) in self.sig.symbols.iter().enumerate() {
                if let Some(rhs) = self.derivations.get(s, l) {
                    out.push_str(&format!("d({})/d({}) = {}\n", sym.name, self.sig.x_name(l), rhs.render(&self.sig)));
                }
            }
        }
        out
    }
}
