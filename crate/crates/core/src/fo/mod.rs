//! Feigin-Odesskii brackets: toric limits, first-order terms, their
//! biresidue matrices and the codimension-two splitting.
//!
//! Exact matrices here are the coefficient matrices divided by 2 pi i, so the
//! transcendental factor never enters rational arithmetic.

mod theta;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::biresidue::BiresidueMatrix;
use crate::catalog::{make, FamilyTag};
use crate::classify::identify;
use crate::deform::SemiToricRealization;
use crate::error::{Error, Result};
use crate::exact::{q, qf, QMatrix, Rational};

pub use theta::{
    c_numeric, cyclotomic_c, fo_bracket_numeric, fo_sweep, sweep_slopes, theta, theta_alpha_log_derivative, BracketTensor,
    SweepRow, ThetaParams,
};

/// k' in [1, n) with k k' = 1 mod n.
pub fn mod_inverse(k: i64, n: i64) -> Result<i64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("modulus {n} must be at least 2")));
    }
    let e = k.rem_euclid(n).extended_gcd(&n);
    if e.gcd != 1 {
        return Err(Error::InvalidParameter(format!("gcd({k},{n}) = {} is not 1", e.gcd)));
    }
    Ok(e.x.rem_euclid(n))
}

fn residue(a: i64, n: usize) -> i64 {
    a.rem_euclid(n as i64)
}

pub fn g_fn(n: usize, alpha: i64) -> Rational {
    let a = residue(alpha, n);
    qf(a * (n as i64 - a), 2)
}

pub fn h_fn(n: usize, alpha: i64, beta: i64) -> i64 {
    let twice = |a: i64| {
        let a = residue(a, n);
        a * (n as i64 - a)
    };
    let t = twice(alpha) + twice(beta) - twice(alpha + beta);
    assert!(t % 2 == 0, "h({alpha},{beta}) is not an integer for n={n}");
    t / 2
}

pub fn check_fo(n: usize, k: usize, symplectic: bool) -> Result<()> {
    if n < 2 || k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    if n.gcd(&k) != 1 {
        return Err(Error::InvalidParameter(format!("gcd({n},{k}) must be 1")));
    }
    if symplectic && n.gcd(&(k + 1)) != 1 {
        return Err(Error::InvalidParameter(format!("gcd({n},{}) must be 1", k + 1)));
    }
    Ok(())
}

/// The toric limit divided by 2 pi i:
/// m[i][j] = (j-i mod n) + (k(j-i) mod n) - n off the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricCoeffMatrix {
    pub n: usize,
    pub k: usize,
    pub m: QMatrix,
}

pub fn fo_toric(n: usize, k: usize) -> Result<ToricCoeffMatrix> {
    check_fo(n, k, false)?;
    let m = QMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Rational::zero()
        } else {
            let d = j as i64 - i as i64;
            q(residue(d, n) + residue(k as i64 * d, n) - n as i64)
        }
    });
    Ok(ToricCoeffMatrix { n, k, m })
}

/// One summand y_{i+1} y_{i+k'} d_i ^ d_{i+k'+1} of the first-order term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Q1Term {
    pub i: usize,
    pub monomial: (usize, usize),
    pub bivector: (usize, usize),
}

pub fn fo_q1(n: usize, k: usize) -> Result<Vec<Q1Term>> {
    check_fo(n, k, false)?;
    let kp = mod_inverse(k as i64, n as i64)? as usize;
    Ok((0..n)
        .map(|i| Q1Term { i, monomial: ((i + 1) % n, (i + kp) % n), bivector: (i, (i + kp + 1) % n) })
        .collect())
}

/// k~ with k~ + 1 = min((1+k)^-1, (1+k^-1)^-1) mod n.
pub fn k_tilde(n: usize, k: usize) -> Result<usize> {
    check_fo(n, k, true)?;
    let ni = n as i64;
    let kp = mod_inverse(k as i64, ni)?;
    let a = mod_inverse(1 + k as i64, ni)?;
    let b = mod_inverse(1 + kp, ni)?;
    Ok(a.min(b) as usize - 1)
}

/// The inverse direction: k = ((1 + k~)^-1 - 1) mod n.
pub fn k_from_tilde(n: usize, kt: usize) -> Result<usize> {
    let ni = n as i64;
    let inv = mod_inverse(1 + kt as i64, ni)?;
    Ok((inv - 1).rem_euclid(ni) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoBiresidue {
    /// Biresidues of q0 / (2 pi i), so 2 pi i times those of q0.
    pub b: BiresidueMatrix,
    /// `perm[i] = (k'+1) i mod n`, the column of the one in row i of P.
    pub perm: Vec<usize>,
    pub k_tilde: usize,
}

pub fn fo_biresidue(n: usize, k: usize) -> Result<FoBiresidue> {
    check_fo(n, k, true)?;
    let t = fo_toric(n, k)?.m;
    let chart = QMatrix::from_fn(n - 1, n - 1, |i, j| &t[(i + 1, j + 1)] - &t[(i + 1, 0)] - &t[(0, j + 1)]);
    let inv = chart.invert().map_err(|_| Error::Defect(format!("toric limit of q_{n},{k} is not log symplectic")))?;
    let b = BiresidueMatrix::from_chart_block(&inv)?;
    let nq = q(n as i64);
    let expect = QMatrix::from_fn(n, n, |i, j| if i == j { q(1) - nq.recip() } else { -nq.recip() });
    if b.matrix().mul(&t)? != expect {
        return Err(Error::Defect(format!("B Pi differs from I - U/n for n={n}, k={k}")));
    }
    let kp = mod_inverse(k as i64, n as i64)? as usize;
    let perm: Vec<usize> = (0..n).map(|i| (kp + 1) * i % n).collect();
    let kt = k_tilde(n, k)?;
    // B = -(1/n) P^-1 C P, i.e. b[a][b] = -(1/n) C[s(a)][s(b)] with s the inverse of perm
    let c = make(&FamilyTag::C { n, k: kt })?;
    let mut s = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        s[p] = i;
    }
    if b != c.permute(&s).scale(&-nq.recip()) {
        return Err(Error::Defect(format!("B is not -(1/n) P^-1 C P for n={n}, k={k}")));
    }
    Ok(FoBiresidue { b, perm, k_tilde: kt })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoVerification {
    pub n: usize,
    pub k: usize,
    pub k_tilde: usize,
    pub sigma: Vec<usize>,
    pub lambda: String,
    pub q1_edges: Vec<(usize, usize)>,
}

/// All exact checks for one (n, k): B Pi, identification, and the first-order
/// summands as rho bivectors of the toric realization.
pub fn fo_verify(n: usize, k: usize) -> Result<FoVerification> {
    let fb = fo_biresidue(n, k)?;
    let id = identify(&fb.b)?.ok_or_else(|| Error::Defect(format!("toric limit of q_{n},{k} has no full cycle")))?;
    let want = FamilyTag::C { n, k: fb.k_tilde };
    if id.tag != want {
        return Err(Error::Defect(format!("identified as {}, expected {want}", id.tag)));
    }
    let idx: Vec<usize> = (1..n).collect();
    let r = SemiToricRealization::from_omega(fb.b.matrix().principal(&idx), 0)?;
    if r.b != fb.b {
        return Err(Error::Defect("toric realization does not reproduce B".into()));
    }
    let terms = fo_q1(n, k)?;
    let edges = fb.b.smoothing_diagram().edges;
    let mut q1_edges = Vec::new();
    for t in &terms {
        let (i, j) = t.bivector;
        let rho = r.build_rho(i, j)?;
        let mut want = vec![0i64; n];
        want[t.monomial.0] += 1;
        want[t.monomial.1] += 1;
        let mono_ok = rho.bivector.terms().len() == 1
            && rho.bivector.terms().values().all(|c| c.terms().all(|u| u.mono.y == want && u.c.abs() == q(1)));
        let sign_ok = rho.bivector.get(&[i.min(j), i.max(j)]).terms().all(|u| (*u.c == q(1)) == (i < j));
        if !mono_ok || !sign_ok {
            return Err(Error::Defect(format!("q1 summand {} is not rho_{i}{j}", t.i)));
        }
        q1_edges.push((i.min(j), i.max(j)));
    }
    q1_edges.sort();
    if q1_edges != edges.iter().copied().collect::<Vec<_>>() {
        return Err(Error::Defect("q1 summands do not run over the smoothable edges".into()));
    }
    Ok(FoVerification { n, k, k_tilde: fb.k_tilde, sigma: id.sigma, lambda: id.lambda.to_string(), q1_edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Codim2Split {
    pub n1: i64,
    pub n2: i64,
    pub k1: i64,
    pub k2: i64,
    pub cf: Vec<i64>,
}

type M2 = [[i64; 2]; 2];

fn mul2(a: M2, b: M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// n/d = [q1, ..., qg] = q1 - 1/(q2 - 1/(...)) with every q >= 2.
pub fn minus_continued_fraction(n: i64, d: i64) -> Vec<i64> {
    let (mut a, mut b) = (n, d);
    let mut out = Vec::new();
    while b != 0 {
        // ceiling division keeps the remainder non-positive
        let c = (a + b - 1).div_euclid(b);
        out.push(c);
        let r = c * b - a;
        a = b;
        b = r;
    }
    out
}

pub fn codim2_split(n: usize, k: usize) -> Result<Codim2Split> {
    if k < 1 || k >= n || n.gcd(&(k + 1)) != 1 {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n and gcd(n, k+1) = 1, got n={n}, k={k}")));
    }
    let (ni, ki) = (n as i64, k as i64);
    let cf = minus_continued_fraction(ni, ki + 1);
    let t = |p: i64| -> M2 { [[1, p], [0, 1]] };
    let s: M2 = [[0, -1], [1, 0]];
    let mut a = t(cf[0]);
    for &p in &cf[1..] {
        a = mul2(mul2(a, s), t(p));
    }
    let b = mul2(a, t(-1));
    let split = Codim2Split { n1: b[0][0], n2: b[0][1], k1: b[1][0], k2: b[1][1], cf };
    let ok = split.n1 + split.n2 == ni
        && split.k1 + split.k2 == ki + 1
        && split.n1 * split.k2 - split.n2 * split.k1 == 1
        && [split.n1, split.n2, split.k1, split.k2].iter().all(|&v| v > 0);
    if !ok {
        return Err(Error::Defect(format!("codimension-two split failed for n={n}, k={k}: {split:?}")));
    }
    Ok(split)
}

/// Every positive (n1, n2, k1, k2) with the three defining identities.
pub fn codim2_brute_force(n: usize, k: usize) -> Vec<(i64, i64, i64, i64)> {
    let (ni, ki) = (n as i64, k as i64);
    let mut out = Vec::new();
    for n1 in 1..ni {
        for k1 in 1..=ki {
            let (n2, k2) = (ni - n1, ki + 1 - k1);
            if n1 * k2 - n2 * k1 == 1 {
                out.push((n1, n2, k1, k2));
            }
        }
    }
    out
}
