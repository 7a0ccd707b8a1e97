//! Chains and cycles of smoothable edges, catalog identification and
//! holonomicity.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::biresidue::{BiresidueMatrix, SmoothingDiagram};
use crate::catalog::{catalog_cached, FamilyTag};
use crate::error::{Error, Result};
use crate::exact::{q, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SmoothableComponents {
    pub chains: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
}

fn neighbours(d: &SmoothingDiagram, v: usize) -> Vec<usize> {
    let mut out: Vec<usize> = d
        .edges
        .iter()
        .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
        .collect();
    out.sort();
    out
}

pub fn components(d: &SmoothingDiagram) -> Result<SmoothableComponents> {
    let n = d.n;
    let adj: Vec<Vec<usize>> = (0..n).map(|v| neighbours(d, v)).collect();
    if let Some(v) = (0..n).find(|&v| adj[v].len() > 2) {
        return Err(Error::InvalidParameter(format!("vertex {v} lies on {} smoothable edges", adj[v].len())));
    }
    let mut seen = vec![false; n];
    let mut out = SmoothableComponents::default();
    let walk = |start: usize, seen: &mut Vec<bool>| {
        let mut path = vec![start];
        seen[start] = true;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&w| !seen[w]) {
            seen[next] = true;
            path.push(next);
            cur = next;
        }
        path
    };
    for v in 0..n {
        if !seen[v] && adj[v].len() == 1 {
            out.chains.push(walk(v, &mut seen));
        }
    }
    for v in 0..n {
        if !seen[v] && adj[v].len() == 2 {
            out.cycles.push(walk(v, &mut seen));
        }
    }
    Ok(out)
}

/// The Hamiltonian cycle of smoothable edges, if there is one.
pub fn has_full_cycle(b: &BiresidueMatrix) -> Option<Vec<usize>> {
    let comps = components(&b.smoothing_diagram()).ok()?;
    match comps.cycles.as_slice() {
        [c] if c.len() == b.n() && comps.chains.is_empty() => Some(c.clone()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identification {
    pub tag: FamilyTag,
    /// `b[i][j] = lambda * make(tag)[sigma[i]][sigma[j]]`.
    pub sigma: Vec<usize>,
    pub lambda: Rational,
}

pub fn identify(b: &BiresidueMatrix) -> Result<Option<Identification>> {
    if has_full_cycle(b).is_none() {
        return Ok(None);
    }
    let n = b.n();
    for entry in catalog_cached(n)?.iter() {
        if let Some((sigma, lambda)) = entry.matrix.projectively_equivalent(b) {
            return Ok(Some(Identification { tag: entry.tag.clone(), sigma, lambda }));
        }
    }
    Err(Error::Defect(format!(
        "classification violated: full smoothable cycle but no catalog member of size {n} matches"
    )))
}

/// Catalog members of size n with rank n-1, checked against the gcd rule.
pub fn corank_one_catalog(n: usize) -> Result<Vec<FamilyTag>> {
    let found: Vec<FamilyTag> =
        catalog_cached(n)?.iter().filter(|e| e.matrix.rank() == n - 1).map(|e| e.tag.clone()).collect();
    let expected: BTreeSet<FamilyTag> = (1..n)
        .filter(|&k| 2 * k < n && n.gcd(&k) == 1 && n.gcd(&(k + 1)) == 1)
        .map(|k| FamilyTag::C { n, k })
        .collect();
    if found.iter().cloned().collect::<BTreeSet<_>>() != expected {
        return Err(Error::Defect(format!(
            "corank-one classification violated at n={n}: found {}",
            found.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
        )));
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolonomicReport {
    pub holonomic: bool,
    /// Least odd subset, by size then lexicographically, whose principal
    /// submatrix has the all-ones vector in its row span.
    pub witness: Option<Vec<usize>>,
    pub subsets_checked: usize,
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

pub fn is_holonomic(b: &BiresidueMatrix) -> HolonomicReport {
    let n = b.n();
    let mut checked = 0;
    for size in (1..=n).step_by(2) {
        let subsets = combinations(n, size);
        let ones = vec![q(1); size];
        let hit = subsets.par_iter().find_first(|j| {
            b.matrix().principal(j).in_row_span(&ones).expect("principal submatrix has matching width")
        });
        if let Some(j) = hit {
            let pos = subsets.iter().position(|s| s == j).unwrap_or(0);
            return HolonomicReport { holonomic: false, witness: Some(j.clone()), subsets_checked: checked + pos + 1 };
        }
        checked += subsets.len();
    }
    HolonomicReport { holonomic: true, witness: None, subsets_checked: checked }
}
