use std::sync::Arc;

use serde::Serialize;

use super::examples::{ExampleDeformation, Initial};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::format::sci;
use crate::poisson::{pfaffian_f64, CoeffSum, DerivationTable, Multivector, Signature, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub eps: f64,
    /// The grid is [-xmax, xmax].
    pub xmax: f64,
    pub step: f64,
    /// Point of C^n where residual and Pfaffian are sampled; default y_i = i + 1.
    pub sample_y: Option<Vec<f64>>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { eps: 1e-2, xmax: 0.5, step: 1e-3, sample_y: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub x: f64,
    /// Values of the non-constant symbols, in signature order.
    pub values: Vec<f64>,
    /// Largest coefficient of [pi, pi] at the sample point.
    pub residual: f64,
    /// Symbolic Pfaffian evaluated at the sample point.
    pub pfaffian: f64,
    /// The same value from the numeric Pfaffian of the bordered matrix.
    pub pfaffian_matrix: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrationReport {
    pub names: Vec<String>,
    pub samples: Vec<Sample>,
    pub max_residual: f64,
    pub max_pfaffian_rel_error: f64,
}

const BLOW_UP: f64 = 1e8;

impl IntegrationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push_str(",residual,pfaffian\n");
        for s in &self.samples {
            out.push_str(&sci(s.x));
            for v in &s.values {
                out.push(',');
                out.push_str(&sci(*v));
            }
            out.push_str(&format!(",{},{}\n", sci(s.residual), sci(s.pfaffian)));
        }
        out
    }
}

/// Fixed-step RK4 from x = 0 in both directions, then residual and Pfaffian
/// checks at every grid point. Symbol derivatives for the residual come from
/// finite differences of the computed trajectory, not from the table.
pub fn integrate(ex: &ExampleDeformation, opts: &IntegrationOptions) -> Result<IntegrationReport> {
    let sig = &ex.sig;
    if sig.n_x != 1 {
        return Err(Error::InvalidParameter(format!(
            "{} has {} polydisc coordinates; integration handles ordinary differential equations only",
            ex.name, sig.n_x
        )));
    }
    if !(opts.step > 0.0 && opts.xmax >= 0.0 && opts.eps.is_finite()) {
        return Err(Error::InvalidParameter("need step > 0, xmax >= 0 and finite eps".into()));
    }
    let steps = (opts.xmax / opts.step).round() as usize;
    if steps < 3 {
        return Err(Error::InvalidParameter("grid needs at least three steps on each side".into()));
    }
    let h = opts.xmax / steps as f64;
    let fs: Vec<usize> = (0..sig.symbols.len()).filter(|&s| !sig.symbols[s].constant).collect();
    let rules: Vec<CoeffSum> = fs
        .iter()
        .map(|&s| {
            ex.derivations
                .get(s, 0)
                .cloned()
                .ok_or_else(|| Error::Symbolic(format!("no rule for {}", sig.symbols[s].name)))
        })
        .collect::<Result<_>>()?;
    let full = |state: &[f64]| -> Vec<f64> {
        let mut v = vec![opts.eps; sig.symbols.len()];
        for (k, &s) in fs.iter().enumerate() {
            v[s] = state[k];
        }
        v
    };
    let zeros = vec![0.0; sig.n_y];
    let rhs = |x: f64, state: &[f64]| -> Vec<f64> {
        let f = full(state);
        rules.iter().map(|r| r.eval(&zeros, &[x], &f)).collect()
    };
    let start: Vec<f64> = fs
        .iter()
        .map(|&s| match &ex.initial[s] {
            Some(Initial::Value(v)) => to_f64(v),
            Some(Initial::Epsilon) | None => opts.eps,
        })
        .collect();
    let run = |dir: f64| -> Result<Vec<Vec<f64>>> {
        let mut out = vec![start.clone()];
        let mut y = start.clone();
        let dh = dir * h;
        for step in 0..steps {
            let x = dir * h * step as f64;
            let axpy = |a: &[f64], k: &[f64], c: f64| -> Vec<f64> { a.iter().zip(k).map(|(u, v)| u + c * v).collect() };
            let k1 = rhs(x, &y);
            let k2 = rhs(x + dh / 2.0, &axpy(&y, &k1, dh / 2.0));
            let k3 = rhs(x + dh / 2.0, &axpy(&y, &k2, dh / 2.0));
            let k4 = rhs(x + dh, &axpy(&y, &k3, dh));
            for i in 0..y.len() {
                y[i] += dh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if y.iter().any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(Error::Numeric(format!("solution blows up near x = {}", x + dh)));
            }
            out.push(y.clone());
        }
        Ok(out)
    };
    let (fwd, bwd) = rayon::join(|| run(1.0), || run(-1.0));
    let (fwd, bwd) = (fwd?, bwd?);
    let mut traj: Vec<Vec<f64>> = bwd.into_iter().skip(1).rev().collect();
    traj.extend(fwd);
    let xs: Vec<f64> = (0..traj.len()).map(|i| (i as f64 - steps as f64) * h).collect();
    let derivs = finite_differences(&traj, h);

    let (rsig, residual_form) = residual_form(ex, &fs)?;
    let pf = ex.pfaffian()?;
    let y: Vec<f64> = opts.sample_y.clone().unwrap_or_else(|| (0..sig.n_y).map(|i| i as f64 + 1.0).collect());
    if y.len() != sig.n_y {
        return Err(Error::InvalidParameter(format!("sample point needs {} coordinates", sig.n_y)));
    }
    let dim = sig.dim();
    let k = (dim - 1) / 2;
    let k_factorial: f64 = (1..=k).map(|i| i as f64).product();
    let mut samples = Vec::with_capacity(traj.len());
    for (idx, state) in traj.iter().enumerate() {
        let x = [xs[idx]];
        let f = full(state);
        let mut fr = f.clone();
        fr.extend(&derivs[idx]);
        debug_assert_eq!(fr.len(), rsig.symbols.len());
        let residual = residual_form.eval(&y, &x, &fr).values().fold(0.0f64, |a, v| a.max(v.abs()));
        let pfaffian = pf.eval(&y, &x, &f);
        let mut a = vec![vec![0.0; dim + 1]; dim + 1];
        for (key, v) in ex.ansatz.eval(&y, &x, &f) {
            a[key[0]][key[1]] = v;
            a[key[1]][key[0]] = -v;
        }
        for (i, &yi) in y.iter().enumerate() {
            a[i][dim] = yi;
            a[dim][i] = -yi;
        }
        let pfaffian_matrix = k_factorial * pfaffian_f64(&a);
        samples.push(Sample { x: xs[idx], values: state.clone(), residual, pfaffian, pfaffian_matrix });
    }
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let max_pfaffian_rel_error = samples
        .iter()
        .map(|s| (s.pfaffian - s.pfaffian_matrix).abs() / s.pfaffian.abs().max(s.pfaffian_matrix.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(IntegrationReport {
        names: fs.iter().map(|&s| sig.symbols[s].name.clone()).collect(),
        samples,
        max_residual,
        max_pfaffian_rel_error,
    })
}

/// [pi, pi] over a signature with one extra symbol d_f per function f,
/// standing for df/dx.
fn residual_form(ex: &ExampleDeformation, fs: &[usize]) -> Result<(Arc<Signature>, Multivector)> {
    let sig = &ex.sig;
    let mut symbols = sig.symbols.clone();
    symbols.extend(fs.iter().map(|&s| Symbol::function(&format!("d_{}", sig.symbols[s].name))));
    let rsig = Arc::new(Signature::new(sig.n_y, sig.n_x, symbols));
    let mut table = DerivationTable::empty(&rsig);
    for (k, &s) in fs.iter().enumerate() {
        table.set(s, 0, CoeffSum::symbol(&rsig, sig.symbols.len() + k, 1));
    }
    let pi = ex.ansatz.extend_symbols(rsig.clone())?;
    let form = pi.schouten(&pi, &table)?;
    Ok((rsig, form))
}

/// Fourth-order differences on a uniform grid, one-sided near the ends.
fn finite_differences(traj: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    let len = traj.len();
    let width = traj[0].len();
    let at = |i: usize, c: usize| traj[i][c];
    (0..len)
        .map(|i| {
            (0..width)
                .map(|c| {
                    let v = if i >= 2 && i + 2 < len {
                        at(i - 2, c) - 8.0 * at(i - 1, c) + 8.0 * at(i + 1, c) - at(i + 2, c)
                    } else if i == 0 {
                        -25.0 * at(0, c) + 48.0 * at(1, c) - 36.0 * at(2, c) + 16.0 * at(3, c) - 3.0 * at(4, c)
                    } else if i == 1 {
                        -3.0 * at(0, c) - 10.0 * at(1, c) + 18.0 * at(2, c) - 6.0 * at(3, c) + at(4, c)
                    } else if i == len - 1 {
                        25.0 * at(i, c) - 48.0 * at(i - 1, c) + 36.0 * at(i - 2, c) - 16.0 * at(i - 3, c)
                            + 3.0 * at(i - 4, c)
                    } else {
                        3.0 * at(i + 1, c) + 10.0 * at(i, c) - 18.0 * at(i - 1, c) + 6.0 * at(i - 2, c)
                            - at(i - 3, c)
                    };
                    v / (12.0 * h)
                })
                .collect()
        })
        .collect()
}
