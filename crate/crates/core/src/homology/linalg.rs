use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// A sparse vector: `(index, value)` pairs sorted by index, no zero values.
pub type SparseVec = Vec<(usize, Scalar)>;

type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators and divides out the content.
fn integer_row(row: &SparseVec) -> IntRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (*i, c.numer() * (&lcm / c.denom())))
        .collect();
    out.sort_by_key(|(i, _)| *i);
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let Some((_, first)) = row.first() else {
        return;
    };
    let mut g = first.abs();
    for (_, c) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(c);
    }
    let flip = row[0].1.sign() == Sign::Minus;
    if !g.is_one() || flip {
        let g = if flip { -g } else { g };
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// `a*r - b*p` where `a`, `b` cancel the common leading entry.
fn eliminate(r: &IntRow, p: &IntRow) -> IntRow {
    let g = r[0].1.gcd(&p[0].1);
    let a = &p[0].1 / &g;
    let b = &r[0].1 / &g;
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < r.len() || j < p.len() {
        let ord = match (r.get(i), p.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push((r[i].0, &a * &r[i].1));
                i += 1;
            }
            Ordering::Greater => {
                out.push((p[j].0, -(&b * &p[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = &a * &r[i].1 - &b * &p[j].1;
                if !v.is_zero() {
                    out.push((r[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    make_primitive(&mut out);
    out
}

/// Rank over the rationals of the matrix whose rows are `rows`.
///
/// Fraction-free elimination over big integers with content removal after
/// every step; sparse, small rows are used as pivots first.
pub fn rank_exact(rows: &[SparseVec]) -> usize {
    let mut work: Vec<IntRow> = rows.iter().map(integer_row).filter(|r| !r.is_empty()).collect();
    work.sort_by_cached_key(|r| {
        let mag = r.iter().map(|(_, c)| c.bits()).max().unwrap_or(0);
        (r.len(), mag)
    });
    let mut pivots: HashMap<usize, IntRow> = HashMap::new();
    for mut r in work {
        while let Some(&(lead, _)) = r.first() {
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, r);
                break;
            };
            if r.len() < p.len() {
                // keep the sparser row as the pivot
                let old = pivots.insert(lead, r).unwrap();
                r = eliminate(&old, &pivots[&lead]);
            } else {
                r = eliminate(&r, p);
            }
        }
    }
    pivots.len()
}

/// A pivot row with unit lead, and how it combines the inserted rows.
type Pivot = (BTreeMap<usize, Scalar>, BTreeMap<usize, Scalar>);

/// Incremental row echelon form over the rationals that remembers how every
/// pivot row is built from the inserted rows.
#[derive(Debug, Clone, Default)]
pub struct RowReducer {
    /// lead column -> (row with unit lead, combination of inserted rows)
    pivots: BTreeMap<usize, Pivot>,
    inserted: usize,
}

fn axpy(target: &mut BTreeMap<usize, Scalar>, c: &Scalar, src: &BTreeMap<usize, Scalar>) {
    for (i, v) in src {
        let e = target.entry(*i).or_insert_with(Scalar::zero);
        *e += c * v;
        if e.is_zero() {
            target.remove(i);
        }
    }
}

impl RowReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `row`; returns the residual and the combination `c` of inserted
    /// rows with `row = residual + sum c_j row_j`.
    pub fn reduce(&self, row: &SparseVec) -> (SparseVec, SparseVec) {
        let mut work: BTreeMap<usize, Scalar> = row.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut residual = Vec::new();
        while let Some((&col, _)) = work.iter().next() {
            let c = work.remove(&col).unwrap();
            match self.pivots.get(&col) {
                Some((prow, pcombo)) => {
                    for (i, v) in prow.iter().skip(1) {
                        let e = work.entry(*i).or_insert_with(Scalar::zero);
                        *e -= &c * v;
                        if e.is_zero() {
                            work.remove(i);
                        }
                    }
                    axpy(&mut combo, &c, pcombo);
                }
                None => residual.push((col, c)),
            }
        }
        (residual, combo.into_iter().collect())
    }

    /// Inserts a row. Returns `None` when it enlarged the span, otherwise the
    /// linear relation `sum r_j row_j = 0` (over all inserted rows including
    /// this one) that certifies the dependence.
    pub fn insert(&mut self, row: &SparseVec) -> Option<SparseVec> {
        let idx = self.inserted;
        self.inserted += 1;
        let (residual, combo) = self.reduce(row);
        if residual.is_empty() {
            let mut rel: BTreeMap<usize, Scalar> = combo.into_iter().map(|(i, c)| (i, -c)).collect();
            rel.insert(idx, Scalar::one());
            return Some(rel.into_iter().collect());
        }
        // residual = row - sum combo_j row_j
        let lead = residual[0].0;
        let inv = Scalar::one() / &residual[0].1;
        let prow: BTreeMap<usize, Scalar> = residual.iter().map(|(i, c)| (*i, c * &inv)).collect();
        let mut pcombo: BTreeMap<usize, Scalar> = combo.into_iter().map(|(i, c)| (i, -c * &inv)).collect();
        pcombo.insert(idx, inv);
        self.pivots.insert(lead, (prow, pcombo));
        None
    }

    /// Coefficients `c` with `row = sum c_j row_j`, if `row` is in the span.
    pub fn solve(&self, row: &SparseVec) -> Option<SparseVec> {
        let (residual, combo) = self.reduce(row);
        residual.is_empty().then_some(combo)
    }
}

/// Expresses `v` in a kernel basis whose vectors have distinct last entries
/// with coefficient 1.
pub fn solve_in_kernel(kernel: &[SparseVec], v: SparseVec) -> Option<SparseVec> {
    let by_lead: HashMap<usize, usize> = kernel
        .iter()
        .enumerate()
        .map(|(k, vec)| (vec.last().expect("nonzero relation").0, k))
        .collect();
    let mut work: BTreeMap<usize, Scalar> = v.into_iter().collect();
    let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
    while let Some((&j, c)) = work.iter().next_back() {
        let c = c.clone();
        let k = *by_lead.get(&j)?;
        for (i, x) in &kernel[k] {
            let e = work.entry(*i).or_insert_with(Scalar::zero);
            *e -= &c * x;
            if e.is_zero() {
                work.remove(i);
            }
        }
        out.insert(k, c);
    }
    Some(out.into_iter().collect())
}
