//! The families of biresidue matrices with a full smoothable cycle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::biresidue::BiresidueMatrix;
use crate::error::{Error, Result};
use crate::exact::{q, QMatrix, QVector, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum FamilyTag {
    C { n: usize, k: usize },
    /// `i` has length gcd(n, k), entries 0 or 1.
    CI { n: usize, k: usize, i: Vec<u8> },
    X4,
    X5,
    Y(usize),
    Z(usize),
}

impl FamilyTag {
    pub fn n(&self) -> usize {
        match self {
            FamilyTag::C { n, .. } | FamilyTag::CI { n, .. } | FamilyTag::Y(n) | FamilyTag::Z(n) => *n,
            FamilyTag::X4 => 4,
            FamilyTag::X5 => 5,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        match self {
            FamilyTag::C { n, k } => {
                if *k < 1 || 2 * k >= *n {
                    return bad(format!("C:{n},{k} needs 1 <= k < n/2"));
                }
            }
            FamilyTag::CI { n, k, i } => {
                if *k < 1 || 2 * k >= *n {
                    return bad(format!("C:{n},{k} needs 1 <= k < n/2"));
                }
                let d = n.gcd(k);
                if i.len() != d {
                    return bad(format!("I must have length gcd({n},{k}) = {d}, got {}", i.len()));
                }
                if i.iter().any(|&b| b > 1) {
                    return bad("I entries must be 0 or 1".into());
                }
            }
            FamilyTag::X4 | FamilyTag::X5 => {}
            FamilyTag::Y(n) => {
                if *n < 6 || n % 4 != 2 {
                    return bad(format!("Y:{n} needs n = 2(2k+1) >= 6"));
                }
            }
            FamilyTag::Z(n) => {
                if *n < 15 || n % 5 != 0 || (n / 5) % 2 == 0 {
                    return bad(format!("Z:{n} needs n = 5(2k+1) >= 15"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::C { n, k } => write!(f, "C:{n},{k}"),
            FamilyTag::CI { n, k, i } => {
                let bits: String = i.iter().map(|b| char::from(b'0' + b)).collect();
                write!(f, "C:{n},{k},I={bits}")
            }
            FamilyTag::X4 => write!(f, "X4"),
            FamilyTag::X5 => write!(f, "X5"),
            FamilyTag::Y(n) => write!(f, "Y:{n}"),
            FamilyTag::Z(n) => write!(f, "Z:{n}"),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown family tag {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let tag = match s {
            "X4" => FamilyTag::X4,
            "X5" => FamilyTag::X5,
            _ => {
                let (fam, args) = s.split_once(':').ok_or_else(bad)?;
                match fam {
                    "Y" => FamilyTag::Y(num(args)?),
                    "Z" => FamilyTag::Z(num(args)?),
                    "C" => {
                        let parts: Vec<&str> = args.split(',').collect();
                        match parts.as_slice() {
                            [n, k] => FamilyTag::C { n: num(n)?, k: num(k)? },
                            [n, k, i] => {
                                let bits = i.trim().strip_prefix("I=").ok_or_else(bad)?;
                                let i = bits
                                    .chars()
                                    .map(|c| match c {
                                        '0' => Ok(0),
                                        '1' => Ok(1),
                                        _ => Err(bad()),
                                    })
                                    .collect::<Result<Vec<u8>>>()?;
                                FamilyTag::CI { n: num(n)?, k: num(k)?, i }
                            }
                            _ => return Err(bad()),
                        }
                    }
                    _ => return Err(bad()),
                }
            }
        };
        tag.check()?;
        Ok(tag)
    }
}

/// The row (0, 1 x k, 0 x (n-1-2k), -1 x k).
pub fn row_basic(n: usize, k: usize) -> Result<QVector> {
    if 2 * k >= n {
        return Err(Error::InvalidParameter(format!("row_basic needs k < n/2, got n={n}, k={k}")));
    }
    let mut v = vec![q(0); n];
    for j in 1..=k {
        v[j] = q(1);
        v[n - j] = q(-1);
    }
    Ok(v)
}

/// `T^s v` where `(T v)[j] = v[j-1]`.
pub fn cyclic_shift(v: &[Rational], s: i64) -> QVector {
    let n = v.len() as i64;
    if n == 0 {
        return Vec::new();
    }
    (0..n).map(|j| v[(j - s).rem_euclid(n) as usize].clone()).collect()
}

fn from_row_fn(n: usize, row: impl Fn(usize) -> Result<QVector>) -> Result<BiresidueMatrix> {
    let rows = (0..n).map(row).collect::<Result<Vec<_>>>()?;
    BiresidueMatrix::validate(QMatrix::from_rows(rows)?)
}

/// Extends literal leading rows by `r_i = T^p r_{i-p}`.
fn periodic(n: usize, lead: Vec<Vec<i64>>) -> Result<BiresidueMatrix> {
    let p = lead.len();
    let lead: Vec<QVector> = lead.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    from_row_fn(n, |i| Ok(cyclic_shift(&lead[i % p], (p * (i / p)) as i64)))
}

fn signed_row(n: usize, prefix: &[i64], last_plus: usize) -> Vec<i64> {
    (0..n)
        .map(|c| {
            if c < prefix.len() {
                prefix[c]
            } else if c <= last_plus {
                1
            } else {
                -1
            }
        })
        .collect()
}

pub fn make(tag: &FamilyTag) -> Result<BiresidueMatrix> {
    tag.check()?;
    match tag {
        FamilyTag::C { n, k } => {
            let r = row_basic(*n, *k)?;
            from_row_fn(*n, |i| Ok(cyclic_shift(&r, i as i64)))
        }
        FamilyTag::CI { n, k, i: bits } => {
            let d = bits.len();
            from_row_fn(*n, |i| {
                let kk = k - bits[i % d] as usize;
                Ok(cyclic_shift(&row_basic(*n, kk)?, i as i64))
            })
        }
        FamilyTag::X4 => {
            BiresidueMatrix::from_i64(&[vec![0, 2, -1, -1], vec![-2, 0, 3, -1], vec![1, -3, 0, 2], vec![1, 1, -2, 0]])
        }
        FamilyTag::X5 => BiresidueMatrix::from_i64(&[
            vec![0, 1, 1, -1, -1],
            vec![-1, 0, 2, 0, -1],
            vec![-1, -2, 0, 2, 1],
            vec![1, 0, -2, 0, 1],
            vec![1, 1, -1, -1, 0],
        ]),
        FamilyTag::Y(n) => {
            let h = n / 2;
            let mut r0 = vec![0, 2];
            r0.extend(std::iter::repeat_n(1, h - 2));
            r0.extend(std::iter::repeat_n(-1, h));
            let mut r1 = vec![-2, 0];
            r1.extend(std::iter::repeat_n(1, h));
            r1.extend(std::iter::repeat_n(-1, h - 2));
            periodic(*n, vec![r0, r1])
        }
        FamilyTag::Z(n) => {
            let h = (n - 1) / 2;
            periodic(
                *n,
                vec![
                    signed_row(*n, &[0], h),
                    signed_row(*n, &[-1, 0, 2, 2], h),
                    signed_row(*n, &[-1, -2, 0, 2], h + 2),
                    signed_row(*n, &[-1, -2, -2, 0], h + 4),
                    signed_row(*n, &[-1, -1, -1, -1, 0], h + 4),
                ],
            )
        }
    }
}

/// Every tag of size n before deduplication, in catalog order.
pub fn candidate_tags(n: usize) -> Vec<FamilyTag> {
    let mut tags = Vec::new();
    let ks = || (1..n).filter(move |k| 2 * k < n);
    tags.extend(ks().map(|k| FamilyTag::C { n, k }));
    for k in ks() {
        let d = n.gcd(&k);
        if d < 2 {
            continue;
        }
        for mask in 1..(1u64 << d) - 1 {
            let i: Vec<u8> = (0..d).map(|s| ((mask >> (d - 1 - s)) & 1) as u8).collect();
            if (1..d).all(|r| {
                let rot: Vec<u8> = (0..d).map(|s| i[(s + r) % d]).collect();
                i <= rot
            }) {
                tags.push(FamilyTag::CI { n, k, i });
            }
        }
    }
    if n == 4 {
        tags.push(FamilyTag::X4);
    }
    if n == 5 {
        tags.push(FamilyTag::X5);
    }
    if n >= 6 && n % 4 == 2 {
        tags.push(FamilyTag::Y(n));
    }
    if n >= 15 && n.is_multiple_of(5) && (n / 5) % 2 == 1 {
        tags.push(FamilyTag::Z(n));
    }
    tags
}

/// A catalog representative with the candidate tags found equivalent to it.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub tag: FamilyTag,
    pub matrix: BiresidueMatrix,
    pub orbit: Vec<FamilyTag>,
}

/// All family members of size n up to projective equivalence.
pub fn catalog_entries(n: usize) -> Result<Vec<CatalogEntry>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("catalog needs n >= 3, got {n}")));
    }
    let made: Vec<(FamilyTag, BiresidueMatrix)> = candidate_tags(n)
        .into_par_iter()
        .map(|t| make(&t).map(|m| (t, m)))
        .collect::<Result<_>>()?;
    let mut out: Vec<CatalogEntry> = Vec::new();
    for (tag, matrix) in made {
        if matrix.matrix().is_zero() {
            continue;
        }
        match out.iter_mut().find(|e| e.matrix.projectively_equivalent(&matrix).is_some()) {
            Some(e) => e.orbit.push(tag),
            None => out.push(CatalogEntry { orbit: vec![tag.clone()], tag, matrix }),
        }
    }
    Ok(out)
}

/// Memoised `catalog_entries`, shared across threads.
pub fn catalog_cached(n: usize) -> Result<Arc<Vec<CatalogEntry>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<CatalogEntry>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("catalog cache poisoned").get(&n) {
        return Ok(hit.clone());
    }
    let entries = Arc::new(catalog_entries(n)?);
    cache.lock().expect("catalog cache poisoned").insert(n, entries.clone());
    Ok(entries)
}

pub fn catalog_for_n(n: usize) -> Result<Vec<(FamilyTag, BiresidueMatrix)>> {
    Ok(catalog_entries(n)?.into_iter().map(|e| (e.tag, e.matrix)).collect())
}

/// Count of j in 0..n with n dividing neither jk nor j(k+1).
pub fn rank_count_formula(n: usize, k: usize) -> usize {
    (0..n).filter(|&j| !(j * k).is_multiple_of(n) && !(j * (k + 1)).is_multiple_of(n)).count()
}

/// The relation sum_j (r_{5j} + r_{5j+3} - r_{5j+4}) over the rows of Z_n.
pub fn z_row_relation(b: &BiresidueMatrix) -> QVector {
    let n = b.n();
    let mut acc = vec![Rational::zero(); n];
    for j in 0..n / 5 {
        for c in 0..n {
            acc[c] += b.get(5 * j, c) + b.get(5 * j + 3, c) - b.get(5 * j + 4, c);
        }
    }
    acc
}
