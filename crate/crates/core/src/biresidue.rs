//! Biresidue matrices, smoothable edges and smoothing diagrams.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{is_integer, q, QMatrix, QVector, Rational};

/// Skew-symmetric rational matrix with zero row sums.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BiresidueMatrix {
    b: QMatrix,
}

impl BiresidueMatrix {
    pub fn validate(b: QMatrix) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::NotSquare { rows: b.rows(), cols: b.cols() });
        }
        let n = b.rows();
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
        }
        for i in 0..n {
            for j in i..n {
                if b[(i, j)] != -b[(j, i)].clone() {
                    return Err(Error::NotSkew { i, j });
                }
            }
        }
        for i in 0..n {
            let s: Rational = b.row(i).iter().sum();
            if !s.is_zero() {
                return Err(Error::RowSum { row: i, sum: s.to_string() });
            }
        }
        Ok(BiresidueMatrix { b })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::validate(QMatrix::from_i64(rows)?)
    }

    /// Rebuilds the full matrix from its block on indices 1..n-1, filling
    /// column 0 so that rows sum to zero.
    pub fn from_chart_block(bhat: &QMatrix) -> Result<Self> {
        if !bhat.is_skew() {
            return Err(Error::InvalidParameter("chart block must be skew".into()));
        }
        let n = bhat.rows() + 1;
        let mut b = QMatrix::zeros(n, n);
        for i in 1..n {
            for j in 1..n {
                b[(i, j)] = bhat[(i - 1, j - 1)].clone();
            }
            let s: Rational = bhat.row(i - 1).iter().sum();
            b[(i, 0)] = -s.clone();
            b[(0, i)] = s;
        }
        Self::validate(b)
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.b
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.b[(i, j)]
    }

    pub fn rank(&self) -> usize {
        self.b.rank()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BiresidueMatrix { b: self.b.scale(c) }
    }

    /// The matrix with entries `self[sigma[i]][sigma[j]]`.
    pub fn permute(&self, sigma: &[usize]) -> Self {
        BiresidueMatrix { b: QMatrix::from_fn(self.n(), self.n(), |i, j| self.b[(sigma[i], sigma[j])].clone()) }
    }

    pub fn theta(&self, i: usize, j: usize) -> Result<EdgeTheta> {
        let n = self.n();
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidParameter(format!("bad edge ({i},{j}) for n={n}")));
        }
        let bij = self.get(i, j);
        if bij.is_zero() {
            return Err(Error::ZeroBiresidue(i, j));
        }
        let theta = (0..n)
            .map(|k| {
                if k == i || k == j {
                    Rational::zero()
                } else {
                    (self.get(j, k) + self.get(k, i)) / bij
                }
            })
            .collect();
        Ok(EdgeTheta { i, j, theta })
    }

    pub fn is_smoothable(&self, i: usize, j: usize) -> bool {
        match self.theta(i, j) {
            Ok(t) => t.theta.iter().all(|x| is_integer(x) && !x.is_negative()),
            Err(_) => false,
        }
    }

    pub fn smoothing_diagram(&self) -> SmoothingDiagram {
        let n = self.n();
        let mut edges = BTreeSet::new();
        let mut angles = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.is_smoothable(i, j) {
                    continue;
                }
                edges.insert((i, j));
                let t = self.theta(i, j).expect("smoothable edge has nonzero biresidue");
                for (k, x) in t.theta.iter().enumerate() {
                    if !x.is_zero() {
                        let w = if *x == q(2) { 2 } else { 1 };
                        angles.insert(((i, j), k), w);
                    }
                }
            }
        }
        SmoothingDiagram { n, edges, angles }
    }

    /// Finds `(sigma, lambda)` with `other[i][j] = lambda * self[sigma[i]][sigma[j]]`.
    /// Returns the lexicographically least such `sigma`.
    pub fn projectively_equivalent(&self, other: &Self) -> Option<(Vec<usize>, Rational)> {
        let n = self.n();
        if other.n() != n {
            return None;
        }
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => return Some(((0..n).collect(), Rational::one())),
            (true, false) | (false, true) => return None,
            _ => {}
        }
        let inv1: Vec<_> = (0..n).map(|v| row_invariant(&self.b, v)).collect();
        let inv2: Vec<_> = (0..n).map(|v| row_invariant(&other.b, v)).collect();
        let mut c1 = inv1.clone();
        let mut c2 = inv2.clone();
        c1.sort();
        c2.sort();
        if c1 != c2 {
            return None;
        }
        let s1 = self.smoothing_diagram().edges;
        let s2 = other.smoothing_diagram().edges;
        if s1.len() != s2.len() {
            return None;
        }
        let cands: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&v| inv1[v] == inv2[i]).collect()).collect();
        let search = Search { b1: &self.b, b2: &other.b, s1: &s1, s2: &s2, cands: &cands, n };
        cands[0].par_iter().find_map_first(|&first| {
            let mut sigma = vec![first];
            let mut used = vec![false; n];
            used[first] = true;
            let mut lambda = None;
            if search.dfs(&mut sigma, &mut used, &mut lambda) {
                Some((sigma, lambda.unwrap_or_else(Rational::one)))
            } else {
                None
            }
        })
    }

    pub fn min_polydisc_dim(&self) -> usize {
        let n = self.n();
        let r = self.rank();
        (0..).find(|&m| (n - 1 + m).is_multiple_of(2) && r + m >= n - 1).expect("m = n-1 always qualifies")
    }
}

/// Sorted absolute row entries normalised by the row's largest one.
fn row_invariant(b: &QMatrix, v: usize) -> Vec<Rational> {
    let mut row: Vec<Rational> = b.row(v).iter().map(|x| x.abs()).collect();
    let max = row.iter().max().cloned().unwrap_or_else(Rational::zero);
    if !max.is_zero() {
        for x in &mut row {
            *x /= &max;
        }
    }
    row.sort();
    row
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

struct Search<'a> {
    b1: &'a QMatrix,
    b2: &'a QMatrix,
    s1: &'a BTreeSet<(usize, usize)>,
    s2: &'a BTreeSet<(usize, usize)>,
    cands: &'a [Vec<usize>],
    n: usize,
}

impl Search<'_> {
    fn consistent(&self, sigma: &[usize], lambda: &mut Option<Rational>) -> bool {
        let i = sigma.len() - 1;
        let si = sigma[i];
        for (j, &sj) in sigma.iter().enumerate().take(i) {
            if self.s2.contains(&edge(i, j)) != self.s1.contains(&edge(si, sj)) {
                return false;
            }
            let a = &self.b1[(si, sj)];
            let b = &self.b2[(i, j)];
            if a.is_zero() != b.is_zero() {
                return false;
            }
            if a.is_zero() {
                continue;
            }
            match lambda {
                Some(l) => {
                    if &(a * &*l) != b {
                        return false;
                    }
                }
                None => *lambda = Some(b / a),
            }
        }
        true
    }

    fn dfs(&self, sigma: &mut Vec<usize>, used: &mut [bool], lambda: &mut Option<Rational>) -> bool {
        let saved = lambda.clone();
        if !self.consistent(sigma, lambda) {
            *lambda = saved;
            return false;
        }
        let i = sigma.len();
        if i == self.n {
            return true;
        }
        for &v in &self.cands[i] {
            if used[v] {
                continue;
            }
            used[v] = true;
            sigma.push(v);
            if self.dfs(sigma, used, lambda) {
                return true;
            }
            sigma.pop();
            used[v] = false;
        }
        *lambda = saved;
        false
    }
}

/// The values theta_{ijk} for one edge; entries at i and j are zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeTheta {
    pub i: usize,
    pub j: usize,
    pub theta: QVector,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SmoothingDiagram {
    pub n: usize,
    /// Smoothable edges as (i, j) with i < j.
    pub edges: BTreeSet<(usize, usize)>,
    /// Angle weight at vertex k for edge (i, j): 1 light, 2 dark.
    pub angles: BTreeMap<((usize, usize), usize), u8>,
}

impl SmoothingDiagram {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn angles_of(&self, e: (usize, usize)) -> Vec<(usize, u8)> {
        let e = edge(e.0, e.1);
        self.angles.iter().filter(|(key, _)| key.0 == e).map(|(key, &w)| (key.1, w)).collect()
    }
}
