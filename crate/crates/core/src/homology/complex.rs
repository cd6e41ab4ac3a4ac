use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::linalg::{rank_exact, SparseVec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_traits::Zero;

/// One `(hdeg, weight)` piece of a complex.
///
/// `differential[i]` is the image of basis element `i` in the cell
/// `(hdeg - 1, weight)`, as a sparse vector over that cell's basis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cell {
    pub labels: Vec<String>,
    pub differential: Vec<SparseVec>,
}

impl Cell {
    pub fn new(labels: Vec<String>, differential: Vec<SparseVec>) -> Self {
        Cell { labels, differential }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// A finite chain complex, bigraded by homological degree and weight, with a
/// weight-preserving differential of degree -1.
///
/// When `hdeg_cap` is set, cells above the cap were not built, so homology in
/// the top stored degree is only a lower bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TruncatedComplex {
    cells: BTreeMap<(i32, u32), Cell>,
    max_weight: u32,
    hdeg_cap: Option<i32>,
}

impl TruncatedComplex {
    pub fn new(max_weight: u32) -> Self {
        TruncatedComplex {
            cells: BTreeMap::new(),
            max_weight,
            hdeg_cap: None,
        }
    }

    pub fn with_hdeg_cap(max_weight: u32, cap: i32) -> Self {
        TruncatedComplex {
            cells: BTreeMap::new(),
            max_weight,
            hdeg_cap: Some(cap),
        }
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn hdeg_cap(&self) -> Option<i32> {
        self.hdeg_cap
    }

    /// Stores a cell; empty cells are dropped.
    pub fn insert_cell(&mut self, hdeg: i32, weight: u32, cell: Cell) {
        if cell.dim() > 0 {
            self.cells.insert((hdeg, weight), cell);
        } else {
            self.cells.remove(&(hdeg, weight));
        }
    }

    pub fn cell(&self, hdeg: i32, weight: u32) -> Option<&Cell> {
        self.cells.get(&(hdeg, weight))
    }

    pub fn dim(&self, hdeg: i32, weight: u32) -> usize {
        self.cell(hdeg, weight).map_or(0, Cell::dim)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(i32, u32), &Cell)> {
        self.cells.iter()
    }

    /// Reorders the basis of one cell: new position `k` holds old element
    /// `perm[k]`. Differentials in and out of the cell are rewritten.
    pub fn permute_cell(&mut self, hdeg: i32, weight: u32, perm: &[usize]) -> Result<()> {
        let n = self.dim(hdeg, weight);
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                left: perm.len(),
                right: n,
            });
        }
        let mut inv = vec![usize::MAX; n];
        for (k, &p) in perm.iter().enumerate() {
            if p >= n || inv[p] != usize::MAX {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            inv[p] = k;
        }
        if let Some(cell) = self.cells.get_mut(&(hdeg, weight)) {
            cell.labels = perm.iter().map(|&p| cell.labels[p].clone()).collect();
            cell.differential = perm.iter().map(|&p| cell.differential[p].clone()).collect();
        }
        if let Some(above) = self.cells.get_mut(&(hdeg + 1, weight)) {
            for row in &mut above.differential {
                for (i, _) in row.iter_mut() {
                    *i = inv[*i];
                }
                row.sort_by_key(|(i, _)| *i);
            }
        }
        Ok(())
    }

    /// Checks that every image lies in the target cell and that `d∘d = 0`.
    pub fn check_d_squared(&self) -> Result<()> {
        let bad = self.cells.par_iter().find_map_any(|(&(h, w), cell)| {
            let target = self.dim(h - 1, w);
            let below = self.cell(h - 1, w);
            for row in &cell.differential {
                if row.iter().any(|(i, _)| *i >= target) {
                    return Some(Error::DimensionMismatch {
                        hdeg: h,
                        weight: w,
                        msg: "differential leaves the target cell".into(),
                    });
                }
                let Some(below) = below else { continue };
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (j, c) in row {
                    for (k, v) in &below.differential[*j] {
                        *acc.entry(*k).or_insert_with(Scalar::zero) += c * v;
                    }
                }
                if acc.values().any(|v| !v.is_zero()) {
                    return Some(Error::DSquaredNonzero { hdeg: h, weight: w });
                }
            }
            if cell.differential.len() != cell.dim() {
                return Some(Error::DimensionMismatch {
                    hdeg: h,
                    weight: w,
                    msg: "one image per basis element expected".into(),
                });
            }
            None
        });
        bad.map_or(Ok(()), Err)
    }

    /// Ranks of all differentials, keyed by source cell.
    pub fn ranks(&self) -> BTreeMap<(i32, u32), usize> {
        self.cells
            .par_iter()
            .map(|(&k, cell)| (k, rank_exact(&cell.differential)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BettiCell {
    pub dim: usize,
    /// Set when the cell sits at the homological truncation.
    pub lower_bound: bool,
}

/// Homology dimensions per `(hdeg, weight)`; zero cells are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BettiTable {
    cells: BTreeMap<(i32, u32), BettiCell>,
    max_weight: u32,
}

impl BettiTable {
    pub fn new(max_weight: u32) -> Self {
        BettiTable {
            cells: BTreeMap::new(),
            max_weight,
        }
    }

    pub fn set(&mut self, hdeg: i32, weight: u32, cell: BettiCell) {
        if cell.dim > 0 || cell.lower_bound {
            self.cells.insert((hdeg, weight), cell);
        } else {
            self.cells.remove(&(hdeg, weight));
        }
    }

    pub fn get(&self, hdeg: i32, weight: u32) -> usize {
        self.cells.get(&(hdeg, weight)).map_or(0, |c| c.dim)
    }

    pub fn is_lower_bound(&self, hdeg: i32, weight: u32) -> bool {
        self.cells.get(&(hdeg, weight)).is_some_and(|c| c.lower_bound)
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(i32, u32), &BettiCell)> {
        self.cells.iter()
    }

    /// Nonzero dimensions only, for comparisons that ignore truncation flags.
    pub fn dims(&self) -> BTreeMap<(i32, u32), usize> {
        self.cells
            .iter()
            .filter(|(_, c)| c.dim > 0)
            .map(|(&k, c)| (k, c.dim))
            .collect()
    }
}

/// Homology of a complex: `dim C - rank d_out - rank d_in` per cell.
pub fn betti(c: &TruncatedComplex) -> Result<BettiTable> {
    c.check_d_squared()?;
    let ranks = c.ranks();
    let mut table = BettiTable::new(c.max_weight);
    for (&(h, w), cell) in c.cells() {
        let out = ranks.get(&(h, w)).copied().unwrap_or(0);
        let inc = ranks.get(&(h + 1, w)).copied().unwrap_or(0);
        table.set(
            h,
            w,
            BettiCell {
                dim: cell.dim() - out - inc,
                lower_bound: c.hdeg_cap == Some(h),
            },
        );
    }
    Ok(table)
}

fn parity_sign(h: i32) -> i64 {
    if h.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_of_complex(c: &TruncatedComplex) -> BTreeMap<u32, i64> {
    let mut out: BTreeMap<u32, i64> = BTreeMap::new();
    for (&(h, w), cell) in c.cells() {
        *out.entry(w).or_default() += parity_sign(h) * cell.dim() as i64;
    }
    out.retain(|_, v| *v != 0);
    out
}

pub fn euler_of_betti(b: &BettiTable) -> BTreeMap<u32, i64> {
    let mut out: BTreeMap<u32, i64> = BTreeMap::new();
    for (&(h, w), cell) in b.cells() {
        *out.entry(w).or_default() += parity_sign(h) * cell.dim as i64;
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Euler characteristic per weight, computed at chain level and checked
/// against the homology-level value.
pub fn euler(c: &TruncatedComplex) -> Result<BTreeMap<u32, i64>> {
    let chain = euler_of_complex(c);
    let hom = euler_of_betti(&betti(c)?);
    if chain != hom {
        return Err(Error::Inconsistent(format!(
            "chain-level Euler characteristic {chain:?} differs from homology-level {hom:?}"
        )));
    }
    Ok(chain)
}

/// Outcome of comparing `0 -> sub -> mid -> quot -> 0` cell by cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LesReport {
    pub euler_sub: BTreeMap<u32, i64>,
    pub euler_mid: BTreeMap<u32, i64>,
    pub euler_quot: BTreeMap<u32, i64>,
    pub violations: Vec<String>,
}

impl LesReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Consistency checks forced by a short exact sequence of complexes.
///
/// Chain dimensions must add up. Per weight the Euler characteristics must add
/// up, and at each spot of the long exact homology sequence the middle term is
/// bounded by its neighbours.
pub fn les_check(sub: &TruncatedComplex, mid: &TruncatedComplex, quot: &TruncatedComplex) -> Result<LesReport> {
    let mut keys: Vec<(i32, u32)> = sub
        .cells()
        .chain(mid.cells())
        .chain(quot.cells())
        .map(|(k, _)| *k)
        .collect();
    keys.sort_unstable();
    keys.dedup();
    for &(h, w) in &keys {
        let (s, m, q) = (sub.dim(h, w), mid.dim(h, w), quot.dim(h, w));
        if m != s + q {
            return Err(Error::DimensionMismatch {
                hdeg: h,
                weight: w,
                msg: format!("{m} != {s} + {q}"),
            });
        }
    }
    let (hs, hm, hq) = (betti(sub)?, betti(mid)?, betti(quot)?);
    let mut report = LesReport {
        euler_sub: euler_of_complex(sub),
        euler_mid: euler_of_complex(mid),
        euler_quot: euler_of_complex(quot),
        violations: Vec::new(),
    };
    let weights: std::collections::BTreeSet<u32> = keys.iter().map(|k| k.1).collect();
    for w in weights {
        let get = |m: &BTreeMap<u32, i64>| m.get(&w).copied().unwrap_or(0);
        let (s, m, q) = (get(&report.euler_sub), get(&report.euler_mid), get(&report.euler_quot));
        if m != s + q {
            report
                .violations
                .push(format!("weight {w}: chain Euler {m} != {s} + {q}"));
        }
        let hom = |b: &BettiTable| -> i64 {
            b.cells()
                .filter(|(k, _)| k.1 == w)
                .map(|(k, c)| parity_sign(k.0) * c.dim as i64)
                .sum()
        };
        let (s, m, q) = (hom(&hs), hom(&hm), hom(&hq));
        if m != s + q {
            report
                .violations
                .push(format!("weight {w}: homology Euler {m} != {s} + {q}"));
        }
    }
    for &(h, w) in &keys {
        let (s, m, q) = (hs.get(h, w), hm.get(h, w), hq.get(h, w));
        if m > s + q {
            report
                .violations
                .push(format!("(h={h}, w={w}): H(mid)={m} > H(sub)+H(quot)={}", s + q));
        }
        let s_below = hs.get(h - 1, w);
        if q > m + s_below {
            report.violations.push(format!(
                "(h={h}, w={w}): H(quot)={q} > H(mid)+H_(h-1)(sub)={}",
                m + s_below
            ));
        }
        let q_above = hq.get(h + 1, w);
        if s > m + q_above {
            report.violations.push(format!(
                "(h={h}, w={w}): H(sub)={s} > H(mid)+H_(h+1)(quot)={}",
                m + q_above
            ));
        }
    }
    Ok(report)
}

/// Dimensions of the free graded-commutative algebra on a bigraded space,
/// up to `max_weight`: polynomial on even-degree classes, exterior on odd.
/// Only classes of positive weight are used as generators; the unit sits at
/// `(0, 0)`.
pub fn free_graded_commutative_closure(
    generators: &BTreeMap<(i32, u32), usize>,
    max_weight: u32,
) -> BTreeMap<(i32, u32), u64> {
    let mut acc: BTreeMap<(i32, u32), u64> = BTreeMap::from([((0, 0), 1)]);
    for (&(h, w), &d) in generators {
        if w == 0 || w > max_weight {
            continue;
        }
        let odd = h.rem_euclid(2) == 1;
        for _ in 0..d {
            let mut next = acc.clone();
            if odd {
                // multiply by (1 + t)
                for (&(h0, w0), &c) in &acc {
                    if w0 + w <= max_weight {
                        *next.entry((h0 + h, w0 + w)).or_default() += c;
                    }
                }
            } else {
                // multiply by 1/(1 - t) = 1 + t + t^2 + ...
                for (&(h0, w0), &c) in &acc {
                    let mut k = 1;
                    while w0 + k * w <= max_weight {
                        *next.entry((h0 + k as i32 * h, w0 + k * w)).or_default() += c;
                        k += 1;
                    }
                }
            }
            acc = next;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    /// 0 <- a <- b, a one-dimensional cell mapped isomorphically.
    fn iso() -> TruncatedComplex {
        let mut c = TruncatedComplex::new(1);
        c.insert_cell(0, 1, Cell::new(vec!["a".into()], vec![vec![]]));
        c.insert_cell(1, 1, Cell::new(vec!["b".into()], vec![vec![(0, int(2))]]));
        c
    }

    #[test]
    fn acyclic_cell() {
        let b = betti(&iso()).unwrap();
        assert!(b.dims().is_empty());
        assert_eq!(euler(&iso()).unwrap(), BTreeMap::new());
    }

    #[test]
    fn zero_differential_gives_dimensions() {
        let mut c = TruncatedComplex::new(2);
        c.insert_cell(0, 2, Cell::new(vec!["a".into(), "b".into()], vec![vec![], vec![]]));
        c.insert_cell(1, 2, Cell::new(vec!["c".into()], vec![vec![]]));
        let b = betti(&c).unwrap();
        assert_eq!(b.get(0, 2), 2);
        assert_eq!(b.get(1, 2), 1);
    }

    #[test]
    fn d_squared_is_detected() {
        let mut c = iso();
        c.insert_cell(2, 1, Cell::new(vec!["e".into()], vec![vec![(0, int(1))]]));
        assert_eq!(betti(&c).unwrap_err(), Error::DSquaredNonzero { hdeg: 2, weight: 1 });
    }

    #[test]
    fn truncation_flags_top_cell() {
        let mut c = TruncatedComplex::with_hdeg_cap(1, 1);
        c.insert_cell(1, 1, Cell::new(vec!["b".into()], vec![vec![]]));
        let b = betti(&c).unwrap();
        assert!(b.is_lower_bound(1, 1));
    }

    #[test]
    fn les_with_zero_sub() {
        let zero = TruncatedComplex::new(1);
        let r = les_check(&zero, &iso(), &iso()).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(les_check(&iso(), &iso(), &iso()).is_err());
    }

    #[test]
    fn closure_of_one_even_and_one_odd_class() {
        // k[a] ⊗ Λ[b], a at (0,1), b at (1,2)
        let gens = BTreeMap::from([((0, 1), 1), ((1, 2), 1)]);
        let c = free_graded_commutative_closure(&gens, 4);
        let expect = BTreeMap::from([
            ((0, 0), 1),
            ((0, 1), 1),
            ((0, 2), 1),
            ((0, 3), 1),
            ((0, 4), 1),
            ((1, 2), 1),
            ((1, 3), 1),
            ((1, 4), 1),
        ]);
        assert_eq!(c, expect);
    }

    #[test]
    fn closure_two_even_classes() {
        // k[a, b] with a, b at (0, 1): weight w has w + 1 monomials
        let c = free_graded_commutative_closure(&BTreeMap::from([((0, 1), 2)]), 5);
        for w in 0..=5 {
            assert_eq!(c[&(0, w)], u64::from(w) + 1);
        }
    }
}
