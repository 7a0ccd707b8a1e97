use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::biresidue::{BiresidueMatrix, EdgeTheta};
use crate::classify::combinations;
use crate::error::{Error, Result};
use crate::exact::{is_integer, q, qf, to_i64, QMatrix, QVector, Rational};
use crate::poisson::{CoeffSum, Monomial, Multivector, Signature};

/// A semi-toric log symplectic form on P^{n-1} x D^m.
///
/// `omega` is the matrix of the form in the log basis dlog z_1..dlog z_{n-1},
/// dx_1..dx_m of the chart y_0 = 1, so `omega = sum_{a<b} omega[a][b] e_a ^ e_b`.
/// `pi` is its inverse, the matrix of the Poisson bivector in the dual basis
/// z_k d_{z_k}, d_{x_l}.
#[derive(Clone, Debug)]
pub struct SemiToricRealization {
    pub b: BiresidueMatrix,
    pub m: usize,
    /// Vertices (from 1..n-1) whose principal block is kept invertible; empty
    /// for hand-chosen forms.
    pub j: Vec<usize>,
    pub omega: QMatrix,
    pub pi: QMatrix,
    /// pi in homogeneous coordinates y_0..y_{n-1}, x_1..x_m.
    pub pi0: Multivector,
}

#[derive(Clone, Debug)]
pub struct RhoBivector {
    pub edge: (usize, usize),
    pub theta: EdgeTheta,
    pub lambda: QVector,
    pub bivector: Multivector,
}

/// Named forms with hand-chosen coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    X4,
    C41,
    X5,
}

impl SemiToricRealization {
    /// The construction from the polydisc dimension bound: the full chart
    /// block of B, plus dlog z_i ^ dx_k for each vertex i outside J.
    pub fn realize(b: &BiresidueMatrix, m: usize) -> Result<Self> {
        let n = b.n();
        let big = n - 1 + m;
        if big % 2 == 1 {
            return Err(Error::InvalidParameter(format!("n-1+m = {big} must be even")));
        }
        if m > n - 1 {
            return Err(Error::InvalidParameter(format!("m = {m} exceeds n-1 = {}", n - 1)));
        }
        let size = n - 1 - m;
        if b.rank() < size {
            return Err(Error::InvalidParameter(format!(
                "rank {} is below n-1-m = {size}; the polydisc needs dimension at least {}",
                b.rank(),
                b.min_polydisc_dim()
            )));
        }
        let j = combinations(n - 1, size)
            .into_iter()
            .map(|s| s.into_iter().map(|v| v + 1).collect::<Vec<_>>())
            .find(|s| b.matrix().principal(s).determinant().is_ok_and(|d| !d.is_zero()))
            .ok_or_else(|| Error::Defect(format!("no invertible principal block of size {size} despite rank")))?;
        let mut omega = QMatrix::zeros(big, big);
        for r in 1..n {
            for c in 1..n {
                omega[(r - 1, c - 1)] = b.get(r, c).clone();
            }
        }
        let outside: Vec<usize> = (1..n).filter(|v| !j.contains(v)).collect();
        for (k, &v) in outside.iter().enumerate() {
            omega[(v - 1, n - 1 + k)] = q(1);
            omega[(n - 1 + k, v - 1)] = q(-1);
        }
        let pi = omega.invert().map_err(|_| Error::Defect("realization matrix is singular".into()))?;
        let pi0 = homogeneous_lift(&pi, n, m)?;
        Ok(SemiToricRealization { b: b.clone(), m, j, omega, pi, pi0 })
    }

    /// The realization with the least admissible polydisc dimension.
    pub fn minimal(b: &BiresidueMatrix) -> Result<Self> {
        Self::realize(b, b.min_polydisc_dim())
    }

    /// A realization from an explicit log-basis matrix.
    pub fn from_omega(omega: QMatrix, m: usize) -> Result<Self> {
        if !omega.is_skew() {
            return Err(Error::InvalidParameter("omega must be skew".into()));
        }
        let big = omega.rows();
        if big < m + 1 || big % 2 == 1 {
            return Err(Error::InvalidParameter(format!("omega of size {big} does not fit m = {m}")));
        }
        let n = big - m + 1;
        let idx: Vec<usize> = (0..n - 1).collect();
        let b = BiresidueMatrix::from_chart_block(&omega.principal(&idx))?;
        let pi = omega.invert()?;
        let pi0 = homogeneous_lift(&pi, n, m)?;
        Ok(SemiToricRealization { b, m, j: Vec::new(), omega, pi, pi0 })
    }

    pub fn preset(p: Preset) -> Result<Self> {
        let (b, scale, xs, m): (&[&[i64]], Rational, Vec<Vec<Rational>>, usize) = match p {
            Preset::X4 => (
                &[&[0, 3, -1], &[-3, 0, 2], &[1, -2, 0]],
                qf(1, 12),
                vec![[-3, 3, -1].iter().map(|&c| qf(c, 24)).collect()],
                1,
            ),
            Preset::C41 => (
                &[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]],
                qf(1, 4),
                vec![[1, -1, 1].iter().map(|&c| qf(-c, 8)).collect()],
                1,
            ),
            Preset::X5 => (
                &[&[0, 2, 0, -1], &[-2, 0, 2, 1], &[0, -2, 0, 1], &[1, -1, -1, 0]],
                qf(1, 60),
                vec![
                    [-3, 2, -3, 2].iter().map(|&c| qf(-c, 30)).collect(),
                    [-1, 0, 1, -2].iter().map(|&c| qf(c, 30)).collect(),
                ],
                2,
            ),
        };
        let k = b.len();
        let big = k + m;
        let mut omega = QMatrix::zeros(big, big);
        for r in 0..k {
            for c in 0..k {
                omega[(r, c)] = q(b[r][c]) * &scale;
            }
        }
        for (l, col) in xs.iter().enumerate() {
            for r in 0..k {
                omega[(r, k + l)] = col[r].clone();
                omega[(k + l, r)] = -col[r].clone();
            }
        }
        Self::from_omega(omega, m)
    }

    pub fn n(&self) -> usize {
        self.b.n()
    }

    /// The vector (theta - e_i - e_j ; lambda) obtained from Omega v, read in
    /// the log coordinates of a chart y_c = 1 with c outside {i, j}.
    pub fn lambda_for_edge(&self, i: usize, j: usize) -> Result<QVector> {
        let n = self.n();
        if !self.b.is_smoothable(i, j) {
            return Err(Error::InvalidParameter(format!("edge ({i},{j}) is not smoothable")));
        }
        let theta = self.b.theta(i, j)?;
        let c = (0..n).find(|&v| v != i && v != j).expect("n >= 3 for a smoothable edge");
        let others: Vec<usize> = (0..n).filter(|&v| v != c).collect();
        let pos = |v: usize| others.iter().position(|&w| w == v).expect("vertex in chart");
        let big = n - 1 + self.m;
        // dlog z_k (chart 0) in terms of the log coordinates of chart c
        let mut basis = QMatrix::zeros(big, big);
        if c == 0 {
            basis = QMatrix::identity(big);
        } else {
            for k in 1..n {
                if k == c {
                    basis[(k - 1, pos(0))] = q(-1);
                } else {
                    basis[(k - 1, pos(k))] = q(1);
                    basis[(k - 1, pos(0))] = q(-1);
                }
            }
            for l in n - 1..big {
                basis[(l, l)] = q(1);
            }
        }
        let omega_c = basis.transpose().mul(&self.omega)?.mul(&basis)?;
        let bij = self.b.get(i, j).clone();
        let mut v = vec![Rational::zero(); big];
        v[pos(i)] = bij.recip();
        v[pos(j)] = -bij.recip();
        let t = omega_c.mul_vec(&v)?;
        for &k in &others {
            let want = if k == i || k == j { q(-1) } else { theta.theta[k].clone() };
            if t[pos(k)] != want {
                return Err(Error::Defect(format!(
                    "edge ({i},{j}): Omega v gives {} at vertex {k}, expected {want}",
                    t[pos(k)]
                )));
            }
        }
        Ok(t[n - 1..].to_vec())
    }

    /// exp(<lambda, x>) prod_k y_k^theta_k d_{y_i} ^ d_{y_j}, checked to commute
    /// with pi0 and with itself.
    pub fn build_rho(&self, i: usize, j: usize) -> Result<RhoBivector> {
        let lambda = self.lambda_for_edge(i, j)?;
        let theta = self.b.theta(i, j)?;
        let sig = self.pi0.signature().clone();
        let bivector = rho_bivector(&sig, i, j, &theta.theta, &lambda)?;
        let table = crate::poisson::DerivationTable::empty(&sig);
        let with_pi = self.pi0.schouten(&bivector, &table)?;
        if !with_pi.is_zero() {
            return Err(Error::Defect(format!("[pi0, rho_{i}{j}] does not vanish:\n{}", with_pi.render())));
        }
        if !bivector.schouten(&bivector, &table)?.is_zero() {
            return Err(Error::Defect(format!("[rho_{i}{j}, rho_{i}{j}] does not vanish")));
        }
        Ok(RhoBivector { edge: (i, j), theta, lambda, bivector })
    }

    /// Rho bivectors of every smoothable edge, in the diagram's edge order.
    pub fn all_rhos(&self) -> Result<Vec<RhoBivector>> {
        self.b.smoothing_diagram().edges.iter().map(|&(i, j)| self.build_rho(i, j)).collect()
    }
}

pub(crate) fn rho_bivector(
    sig: &Arc<Signature>,
    i: usize,
    j: usize,
    theta: &[Rational],
    lambda: &[Rational],
) -> Result<Multivector> {
    let mut mono = Monomial::one(sig);
    for (k, t) in theta.iter().enumerate() {
        if !is_integer(t) || t.is_negative() {
            return Err(Error::InvalidParameter(format!("theta {t} at vertex {k} is not a non-negative integer")));
        }
        mono.y[k] = to_i64(t).expect("small integer");
    }
    mono.lin = lambda.to_vec();
    Multivector::basis(sig.clone(), &[i, j], CoeffSum::term(Rational::one(), mono))
}

/// The bivector on C^n x D^m, invariant under rescaling and with zero
/// contraction against dlog(y_0 ... y_{n-1}), that restricts to `pi` on the
/// chart y_0 = 1.
pub fn homogeneous_lift(pi: &QMatrix, n: usize, m: usize) -> Result<Multivector> {
    let big = n - 1 + m;
    if pi.rows() != big || pi.cols() != big {
        return Err(Error::Dimension(format!("expected a {big}x{big} matrix")));
    }
    let nq = q(n as i64);
    let p: Vec<Rational> = (0..n - 1).map(|k| -(0..n - 1).map(|l| pi[(k, l)].clone()).sum::<Rational>() / &nq).collect();
    // pairing on homogeneous log directions, index 0 is y_0
    let mut hom = QMatrix::zeros(n, n);
    for k in 1..n {
        hom[(k, 0)] = p[k - 1].clone();
        hom[(0, k)] = -p[k - 1].clone();
        for l in 1..n {
            if k != l {
                hom[(k, l)] = &pi[(k - 1, l - 1)] + &p[k - 1] - &p[l - 1];
            }
        }
    }
    let sig = Arc::new(Signature::new(n, m, vec![]));
    let mut out = Multivector::zero(sig.clone());
    let yy = |a: usize, b: usize| CoeffSum::y(&sig, a, 1).mul(&CoeffSum::y(&sig, b, 1));
    for a in 0..n {
        for b in a + 1..n {
            let c = CoeffSum::constant(&sig, hom[(a, b)].clone()).mul(&yy(a, b));
            out = out.add(&Multivector::basis(sig.clone(), &[a, b], c)?)?;
        }
    }
    for l in 0..m {
        let vhat: Vec<Rational> = (0..n - 1).map(|k| pi[(k, n - 1 + l)].clone()).collect();
        let v0 = -vhat.iter().sum::<Rational>() / &nq;
        for a in 0..n {
            let va = if a == 0 { v0.clone() } else { &vhat[a - 1] + &v0 };
            let c = CoeffSum::constant(&sig, va).mul(&CoeffSum::y(&sig, a, 1));
            out = out.add(&Multivector::basis(sig.clone(), &[a, n + l], c)?)?;
        }
        for l2 in l + 1..m {
            let c = CoeffSum::constant(&sig, pi[(n - 1 + l, n - 1 + l2)].clone());
            out = out.add(&Multivector::basis(sig.clone(), &[n + l, n + l2], c)?)?;
        }
    }
    Ok(out)
}

/// The chart form sum_{a<b} pi[a][b] e_a ^ e_b with e_k = z_k d_{z_k}, e_x = d_x.
pub fn chart_bivector(pi: &QMatrix, n: usize, m: usize) -> Result<Multivector> {
    let mut cs = Signature::new(n - 1, m, vec![]);
    cs.y_name = 'z';
    let sig = Arc::new(cs);
    let big = n - 1 + m;
    let mut out = Multivector::zero(sig.clone());
    let field = |a: usize| {
        if a < n - 1 {
            CoeffSum::y(&sig, a, 1)
        } else {
            CoeffSum::constant(&sig, q(1))
        }
    };
    for a in 0..big {
        for b in a + 1..big {
            let c = CoeffSum::constant(&sig, pi[(a, b)].clone()).mul(&field(a)).mul(&field(b));
            out = out.add(&Multivector::basis(sig.clone(), &[a, b], c)?)?;
        }
    }
    Ok(out)
}
