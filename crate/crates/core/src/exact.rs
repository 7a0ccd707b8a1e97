//! Exact rational scalars and dense matrices.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type QVector = Vec<Rational>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVector {
    v.iter().map(|&x| q(x)).collect()
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((p, d)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, d))
        }
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Integer value of `x` if it is integral and fits in an i64.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::Dimension(format!("row {bad} has {} entries, expected {c}", rows[bad].len())));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| qvec(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        self.submatrix(idx, idx)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("add".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&q(-1)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<QVector> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!("matrix has {} columns, vector {}", self.cols, v.len())));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect())
    }

    /// Row-reduces in place to reduced echelon form, returning pivot columns.
    /// Pivot choice: leftmost column first, topmost nonzero row within it.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let x = &self[(r, j)] * &inv;
                self[(r, j)] = x;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let x = &self[(i, j)] - &f * &self[(r, j)];
                    self[(i, j)] = x;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let x = &m[(i, j)] - &f * &m[(c, j)];
                    m[(i, j)] = x;
                }
            }
        }
        Ok(det)
    }

    pub fn solve_linear(&self, b: &[Rational]) -> Result<Option<QVector>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("system has {} rows, rhs {}", self.rows, b.len())));
        }
        let mut aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Ok(Some(x))
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(aug.submatrix(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn in_row_span(&self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("matrix has {} columns, vector {}", self.cols, v.len())));
        }
        let mut rows = self.to_rows();
        rows.push(v.to_vec());
        let ext = QMatrix { rows: self.rows + 1, cols: self.cols, data: rows.into_iter().flatten().collect() };
        Ok(ext.rank() == self.rank())
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| self[(i, j)] == -self[(j, i)].clone()))
    }

    pub fn max_abs(&self) -> Rational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix {}x{}\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn rank_small() {
        let x4 = m(&[vec![0, 2, -1, -1], vec![-2, 0, 3, -1], vec![1, -3, 0, 2], vec![1, 1, -2, 0]]);
        assert_eq!(x4.rank(), 2);
        assert_eq!(QMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn solve_cases() {
        let id = QMatrix::identity(2);
        assert_eq!(id.solve_linear(&[qf(1, 2), q(-3)]).unwrap(), Some(vec![qf(1, 2), q(-3)]));
        let a = m(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(a.solve_linear(&[q(1), q(3)]).unwrap(), None);
        // free variable set to zero
        assert_eq!(a.solve_linear(&[q(1), q(2)]).unwrap(), Some(vec![q(1), q(0)]));
        assert!(a.solve_linear(&[q(1)]).is_err());
    }

    #[test]
    fn invert_cases() {
        assert_eq!(QMatrix::identity(3).invert().unwrap(), QMatrix::identity(3));
        let a = m(&[vec![0, 2], vec![-2, 0]]);
        let inv = QMatrix::from_rows(vec![vec![q(0), qf(-1, 2)], vec![qf(1, 2), q(0)]]).unwrap();
        assert_eq!(a.invert().unwrap(), inv);
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).invert(), Err(Error::Singular));
    }

    #[test]
    fn row_span_cases() {
        assert!(!QMatrix::zeros(1, 1).in_row_span(&[q(1)]).unwrap());
        assert!(m(&[vec![1, 1]]).in_row_span(&[q(2), q(2)]).unwrap());
        let x4j = m(&[vec![0, 2, -1], vec![-2, 0, 3], vec![1, -3, 0]]);
        assert!(!x4j.in_row_span(&qvec(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_rational("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(qf(-3, 2).to_string(), "-3/2");
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = QMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |v| {
                QMatrix::from_fn(r, c, |i, j| {
                    let (a, b) = v[i * c + j];
                    qf(a, b)
                })
            })
        })
    }

    /// Independent rank: largest k with a nonzero k x k minor.
    fn rank_by_minors(a: &QMatrix) -> usize {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=a.rows().min(a.cols())).rev() {
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    if !a.submatrix(&rs, &cs).determinant().unwrap().is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(a in small_matrix(5)) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn rank_matches_minors(a in small_matrix(4)) {
            prop_assert_eq!(a.rank(), rank_by_minors(&a));
        }

        #[test]
        fn inverse_is_exact(a in small_matrix(4)) {
            if a.is_square() && a.rank() == a.rows() {
                let inv = a.invert().unwrap();
                prop_assert_eq!(inv.mul(&a).unwrap(), QMatrix::identity(a.rows()));
            }
        }

        #[test]
        fn solutions_satisfy(a in small_matrix(4), b in prop::collection::vec(-5i64..=5, 4)) {
            let b: QVector = b.into_iter().take(a.rows()).map(q).collect();
            if b.len() == a.rows() {
                if let Some(x) = a.solve_linear(&b).unwrap() {
                    prop_assert_eq!(a.mul_vec(&x).unwrap(), b);
                }
            }
        }

        #[test]
        fn row_span_matches_transposed_solve(a in small_matrix(4), v in prop::collection::vec(-3i64..=3, 4)) {
            let v: QVector = v.into_iter().take(a.cols()).map(q).collect();
            if v.len() == a.cols() {
                let solvable = a.transpose().solve_linear(&v).unwrap().is_some();
                prop_assert_eq!(a.in_row_span(&v).unwrap(), solvable);
            }
        }
    }
}
