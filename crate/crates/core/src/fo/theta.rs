use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_fo, fo_q1};
use crate::error::{Error, Result};
use crate::format::sci;

const TAIL: f64 = 1e-15;

fn i2pi() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaParams {
    pub tau: Complex64,
    pub n: usize,
    /// The theta series runs over -K ..= K+1.
    pub k_trunc: usize,
}

fn tail_bound(im: f64, n: usize, k: usize) -> f64 {
    (-PI * im * (k * k.saturating_sub(1)) as f64 / n as f64).exp()
}

impl ThetaParams {
    /// Chooses the least truncation whose dropped tail is below 1e-15.
    pub fn new(tau: Complex64, n: usize) -> Result<Self> {
        if tau.im <= 0.0 || !tau.im.is_finite() {
            return Err(Error::InvalidParameter(format!("Im(tau) must be positive, got {}", tau.im)));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        let k_trunc = (2..).find(|&k| tail_bound(tau.im, n, k) < TAIL).expect("bound decreases to zero");
        Ok(ThetaParams { tau, n, k_trunc })
    }

    pub fn with_truncation(tau: Complex64, n: usize, k_trunc: usize) -> Result<Self> {
        let p = Self::new(tau, n)?;
        if k_trunc < p.k_trunc {
            return Err(Error::Numeric(format!(
                "truncation {k_trunc} leaves a tail of {:.1e}; need at least {}",
                tail_bound(tau.im, n, k_trunc),
                p.k_trunc
            )));
        }
        Ok(ThetaParams { k_trunc, ..p })
    }

    /// exp(2 pi i tau / n).
    pub fn eps(&self) -> Complex64 {
        (i2pi() * self.tau / self.n as f64).exp()
    }
}

fn series(xi: Complex64, p: &ThetaParams, derivative: bool) -> Complex64 {
    let kk = p.k_trunc as i64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in -kk..=kk + 1 {
        let kf = k as f64;
        let e = (i2pi() * (kf * xi + kf * (kf - 1.0) / 2.0 * p.tau)).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += if derivative { sign * i2pi() * kf * e } else { sign * e };
    }
    s
}

pub fn theta(xi: Complex64, p: &ThetaParams) -> Complex64 {
    series(xi, p, false)
}

fn theta_prime(xi: Complex64, p: &ThetaParams) -> Complex64 {
    series(xi, p, true)
}

fn shifts(alpha: usize, p: &ThetaParams) -> impl Iterator<Item = Complex64> + '_ {
    let n = p.n as f64;
    (0..p.n).map(move |j| Complex64::new(j as f64 / n, 0.0) + p.tau * (alpha as f64 / n))
}

/// theta_alpha(0) for 0 <= alpha < n.
fn theta_alpha0(alpha: usize, p: &ThetaParams) -> Complex64 {
    let n = p.n as f64;
    let a = alpha as f64;
    let prod: Complex64 = shifts(alpha, p).map(|x| theta(x, p)).product();
    prod * (i2pi() * (a * (a - n) / (2.0 * n) * p.tau + a / (2.0 * n))).exp()
}

/// theta_alpha'(0) / theta_alpha(0) minus its limit 2 pi i alpha, for 1 <= alpha < n.
fn log_derivative_deviation(alpha: usize, p: &ThetaParams) -> Complex64 {
    shifts(alpha, p).map(|x| theta_prime(x, p) / theta(x, p)).sum()
}

pub fn theta_alpha_log_derivative(alpha: usize, p: &ThetaParams) -> Complex64 {
    i2pi() * alpha as f64 + log_derivative_deviation(alpha, p)
}

/// theta_0'(0); theta(0) vanishes so only the first factor is differentiated.
pub fn c_numeric(p: &ThetaParams) -> Complex64 {
    let rest: Complex64 = shifts(0, p).skip(1).map(|x| theta(x, p)).product();
    theta_prime(Complex64::new(0.0, 0.0), p) * rest
}

/// -2 pi i prod_{j=1}^{n-1} (1 - exp(2 pi i j / n)).
pub fn cyclotomic_c(n: usize) -> Complex64 {
    let prod: Complex64 =
        (1..n).map(|j| Complex64::new(1.0, 0.0) - (i2pi() * (j as f64 / n as f64)).exp()).product();
    -i2pi() * prod
}

/// Coefficients keyed by (i, j, a, b) with i < j and a <= b: the coefficient
/// of y_a y_b in {y_i, y_j}.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketTensor {
    pub n: usize,
    pub entries: BTreeMap<(usize, usize, usize, usize), Complex64>,
}

impl BracketTensor {
    fn add(&mut self, i: usize, j: usize, a: usize, b: usize, v: Complex64) {
        *self.entries.entry((i, j, a.min(b), a.max(b))).or_default() += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// q(eps) - q0, computed without subtracting the limit.
fn deviation(n: usize, k: usize, p: &ThetaParams) -> BracketTensor {
    let mut out = BracketTensor { n, ..Default::default() };
    let c0 = c_numeric(p);
    let ni = n as i64;
    let ta: Vec<Complex64> = (0..n).map(|a| theta_alpha0(a, p)).collect();
    let ld: Vec<Complex64> = (0..n).map(|a| if a == 0 { Complex64::default() } else { log_derivative_deviation(a, p) }).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as i64;
            let beta = (k as i64 * d).rem_euclid(ni) as usize;
            out.add(i, j, i, j, ld[d as usize] + ld[beta]);
            for r in 1..ni {
                if r == d {
                    continue;
                }
                let num = (d + r * (k as i64 - 1)).rem_euclid(ni) as usize;
                if num == 0 {
                    continue;
                }
                let den1 = (k as i64 * r).rem_euclid(ni) as usize;
                let den2 = (d - r).rem_euclid(ni) as usize;
                let v = ta[num] * c0 / (ta[den1] * ta[den2]);
                let a = (j as i64 - r).rem_euclid(ni) as usize;
                let b = (i as i64 + r).rem_euclid(ni) as usize;
                out.add(i, j, a, b, v);
            }
        }
    }
    out
}

/// The bracket {y_i, y_j} for i < j, from truncated theta series.
pub fn fo_bracket_numeric(n: usize, k: usize, p: &ThetaParams) -> Result<BracketTensor> {
    check_fo(n, k, false)?;
    if p.n != n {
        return Err(Error::InvalidParameter("theta parameters were built for another n".into()));
    }
    let mut out = deviation(n, k, p);
    let t = super::fo_toric(n, k)?.m;
    for i in 0..n {
        for j in i + 1..n {
            out.add(i, j, i, j, i2pi() * crate::exact::to_f64(&t[(i, j)]));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub imtau: f64,
    pub eps_abs: f64,
    /// max |q(eps) - q0|
    pub residual0: f64,
    /// max |(q(eps) - q0)/eps - C(n) q1|
    pub residual1: f64,
    /// |theta_0'(0) - (-2 pi i n)| / (2 pi n)
    pub c_rel_error: f64,
}

impl SweepRow {
    pub fn csv_header() -> &'static str {
        "imtau,eps_abs,residual0,residual1"
    }

    pub fn csv(&self) -> String {
        format!("{},{},{},{}", sci(self.imtau), sci(self.eps_abs), sci(self.residual0), sci(self.residual1))
    }
}

pub fn fo_sweep(n: usize, k: usize, imtaus: &[f64]) -> Result<Vec<SweepRow>> {
    check_fo(n, k, false)?;
    let q1 = fo_q1(n, k)?;
    let c = cyclotomic_c(n);
    let expected = -i2pi() * n as f64;
    imtaus
        .par_iter()
        .map(|&im| {
            let p = ThetaParams::new(Complex64::new(0.0, im), n)?;
            let eps = p.eps();
            let mut dev = deviation(n, k, &p);
            for e in dev.entries.values_mut() {
                *e /= eps;
            }
            for t in &q1 {
                let (a, b) = t.bivector;
                let sign = if a < b { 1.0 } else { -1.0 };
                dev.add(a.min(b), a.max(b), t.monomial.0, t.monomial.1, -c * sign);
            }
            let residual0 = deviation(n, k, &p).max_abs();
            Ok(SweepRow {
                imtau: im,
                eps_abs: eps.norm(),
                residual0,
                residual1: dev.max_abs(),
                c_rel_error: (c_numeric(&p) - expected).norm() / expected.norm(),
            })
        })
        .collect()
}

/// Local log-log slopes between consecutive sweep rows, as (residual0, residual1).
pub fn sweep_slopes(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .map(|w| {
            let de = (w[1].eps_abs / w[0].eps_abs).ln();
            ((w[1].residual0 / w[0].residual0).ln() / de, (w[1].residual1 / w[0].residual1).ln() / de)
        })
        .collect()
}
