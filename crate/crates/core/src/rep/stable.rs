//! The stable complex `Λ[C(R)]`, the symmetrized trace map into `R_n`, and
//! the two complexes it cuts out: its image (the invariant subcomplex) and its
//! kernel (the obstruction complex).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{rep_n, MatrixVariableAlgebra};
use crate::comm::{CommMonomial, CommPoly, FreeCdga, VarTable, Variable};
use crate::cyclic::{cyclic_basis, cyclic_differential, CyclicWord};
use crate::error::{Error, Result};
use crate::graded::{render_terms, Alphabet};
use crate::homology::{betti, solve_in_kernel, Cell, RowReducer, SparseVec, TruncatedComplex};
use crate::presentation::DgaPresentation;
use crate::scalar::Scalar;

/// `Λ[C(R)]` truncated by weight: the free graded-commutative algebra on the
/// good cyclic words, with the cyclic differential extended as a derivation.
#[derive(Debug, Clone)]
pub struct StableComplex {
    alphabet: Arc<Alphabet>,
    words: Vec<CyclicWord>,
    cdga: FreeCdga,
    max_weight: u32,
}

pub fn stable_complex(pres: &DgaPresentation, max_weight: u32) -> Result<StableComplex> {
    let basis = cyclic_basis(pres, max_weight)?;
    let mut words: Vec<CyclicWord> = basis.into_values().flatten().collect();
    words.sort_by(|a, b| (a.weight, a.hdeg, &a.word).cmp(&(b.weight, b.hdeg, &b.word)));
    let a = pres.alphabet();
    let vars = words
        .iter()
        .map(|cw| Variable::new(cw.render(a), cw.hdeg, cw.weight))
        .collect();
    let table = Arc::new(VarTable::new(vars)?);
    let index: HashMap<&CyclicWord, u32> = words.iter().enumerate().map(|(i, cw)| (cw, i as u32)).collect();
    let diff = words
        .par_iter()
        .map(|cw| {
            let mut p = CommPoly::zero(&table);
            for (t, c) in cyclic_differential(pres, cw)? {
                let v = index
                    .get(&t)
                    .ok_or_else(|| Error::Inconsistent(format!("cyclic word {} missing", t.render(a))))?;
                p.add_term(CommMonomial::var(*v), c);
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StableComplex {
        alphabet: Arc::clone(a),
        cdga: FreeCdga::new(table, diff)?,
        words,
        max_weight,
    })
}

impl StableComplex {
    pub fn words(&self) -> &[CyclicWord] {
        &self.words
    }

    pub fn cdga(&self) -> &FreeCdga {
        &self.cdga
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn complex(&self, budget: usize) -> Result<TruncatedComplex> {
        self.cdga.complex(self.max_weight, budget)
    }

    /// `[w] ↦ Tr(X^w)` for every cyclic word.
    pub fn trace_images(&self, alg: &MatrixVariableAlgebra) -> Result<Vec<CommPoly>> {
        if alg.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        self.words.par_iter().map(|cw| alg.trace_cyclic(cw)).collect()
    }
}

/// The symmetrized trace map on one `(hdeg, weight)` cell, row-reduced.
#[derive(Debug, Clone)]
pub struct TraceCell {
    pub hdeg: i32,
    pub weight: u32,
    /// Basis of the stable cell (same order as in [`StableComplex::complex`]).
    pub monomials: Vec<CommMonomial>,
    /// Images in `R_n`.
    pub images: Vec<CommPoly>,
    /// Coordinates of `R_n` monomials met so far.
    pub columns: HashMap<CommMonomial, usize>,
    pub reducer: RowReducer,
    /// Indices of monomials whose images form a basis of the image.
    pub basis: Vec<usize>,
    /// Kernel basis: each vector is a relation among the monomials, whose
    /// last entry has coefficient 1 and is distinct across the basis.
    pub kernel: Vec<SparseVec>,
}

impl TraceCell {
    fn coordinates(columns: &mut HashMap<CommMonomial, usize>, p: &CommPoly) -> SparseVec {
        let mut row: SparseVec = p
            .terms()
            .map(|(m, c)| {
                let next = columns.len();
                (*columns.entry(m.clone()).or_insert(next), c.clone())
            })
            .collect();
        row.sort_by_key(|(i, _)| *i);
        row
    }

    /// Coordinates of `p`, or `None` if it uses a monomial outside the span.
    fn coordinates_in_span(&self, p: &CommPoly) -> Option<SparseVec> {
        let mut row = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            row.push((*self.columns.get(m)?, c.clone()));
        }
        row.sort_by_key(|(i, _)| *i);
        Some(row)
    }
}

fn build_trace_cell(
    stable: &StableComplex,
    images: &[CommPoly],
    alg: &MatrixVariableAlgebra,
    hdeg: i32,
    weight: u32,
    monomials: Vec<CommMonomial>,
) -> Result<TraceCell> {
    let st = stable.cdga.table();
    let mapped: Vec<CommPoly> = monomials
        .par_iter()
        .map(|m| CommPoly::monomial(st, m.clone(), Scalar::one()).substitute(alg.table(), images))
        .collect::<Result<_>>()?;
    let mut cell = TraceCell {
        hdeg,
        weight,
        monomials,
        images: Vec::new(),
        columns: HashMap::new(),
        reducer: RowReducer::new(),
        basis: Vec::new(),
        kernel: Vec::new(),
    };
    for (i, p) in mapped.iter().enumerate() {
        let row = TraceCell::coordinates(&mut cell.columns, p);
        match cell.reducer.insert(&row) {
            None => cell.basis.push(i),
            Some(rel) => cell.kernel.push(rel),
        }
    }
    cell.images = mapped;
    Ok(cell)
}

/// Row-reduced trace map on every cell of weight `0..=max_weight`.
pub fn trace_cells(
    stable: &StableComplex,
    alg: &MatrixVariableAlgebra,
    budget: usize,
) -> Result<BTreeMap<(i32, u32), TraceCell>> {
    let images = stable.trace_images(alg)?;
    let mut jobs = Vec::new();
    for w in 0..=stable.max_weight {
        for (h, monos) in stable.cdga.monomials_of_weight(w, budget)? {
            jobs.push((h, w, monos));
        }
    }
    jobs.into_par_iter()
        .map(|(h, w, monos)| build_trace_cell(stable, &images, alg, h, w, monos).map(|c| ((h, w), c)))
        .collect()
}

fn render_combination(stable: &StableComplex, cell: &TraceCell, v: &SparseVec) -> String {
    let t = stable.cdga.table();
    render_terms(v.iter().map(|(i, c)| (cell.monomials[*i].render(t), c)))
}

/// The subcomplex of `R_n^{GL}` spanned by trace monomials, weights `0..=max_weight`.
///
/// The basis of each cell is a maximal independent set of trace monomials;
/// the differential is the differential of `R_n`, solved in that basis.
pub fn invariant_subcomplex(
    pres: &DgaPresentation,
    n: usize,
    max_weight: u32,
    budget: usize,
) -> Result<TruncatedComplex> {
    let stable = stable_complex(pres, max_weight)?;
    let alg = rep_n(pres, n)?;
    let cells = trace_cells(&stable, &alg, budget)?;
    invariant_from_cells(&stable, &alg, &cells)
}

fn invariant_from_cells(
    stable: &StableComplex,
    alg: &MatrixVariableAlgebra,
    cells: &BTreeMap<(i32, u32), TraceCell>,
) -> Result<TruncatedComplex> {
    let st = stable.cdga.table();
    let built: Vec<Result<(i32, u32, Cell)>> = cells
        .par_iter()
        .map(|(&(h, w), cell)| {
            let below = cells.get(&(h - 1, w));
            // inserted-row index in the lower cell -> position in its basis
            let pos_below: HashMap<usize, usize> = below
                .map(|b| b.basis.iter().enumerate().map(|(k, &i)| (i, k)).collect())
                .unwrap_or_default();
            let mut rows = Vec::with_capacity(cell.basis.len());
            for &i in &cell.basis {
                let dp = alg.cdga().d(&cell.images[i])?;
                if dp.is_zero() {
                    rows.push(Vec::new());
                    continue;
                }
                let escape = || {
                    Error::Inconsistent(format!(
                        "d Tr({}) leaves the span of trace monomials at (h={}, w={w})",
                        cell.monomials[i].render(st),
                        h - 1
                    ))
                };
                let below = below.ok_or_else(escape)?;
                let coords = below.coordinates_in_span(&dp).ok_or_else(escape)?;
                let combo = below.reducer.solve(&coords).ok_or_else(escape)?;
                let mut row: SparseVec = combo.into_iter().map(|(j, c)| (pos_below[&j], c)).collect();
                row.sort_by_key(|(k, _)| *k);
                rows.push(row);
            }
            let labels = cell.basis.iter().map(|&i| cell.monomials[i].render(st)).collect();
            Ok((h, w, Cell::new(labels, rows)))
        })
        .collect();
    let mut c = TruncatedComplex::new(stable.max_weight);
    for b in built {
        let (h, w, cell) = b?;
        c.insert_cell(h, w, cell);
    }
    Ok(c)
}

/// Matrix of `Λ[C(R)]_{h,w} → (R_n)_{h,w}` in monomial coordinates.
#[derive(Debug, Clone)]
pub struct SymTraceMatrix {
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    /// `rows[i]` is the image of domain element `i`.
    pub rows: Vec<SparseVec>,
    pub rank: usize,
}

pub fn sym_trace_matrix(
    pres: &DgaPresentation,
    n: usize,
    hdeg: i32,
    weight: u32,
    budget: usize,
) -> Result<SymTraceMatrix> {
    let stable = stable_complex(pres, weight)?;
    let alg = rep_n(pres, n)?;
    let images = stable.trace_images(&alg)?;
    let monos = stable
        .cdga
        .monomials_of_weight(weight, budget)?
        .remove(&hdeg)
        .unwrap_or_default();
    let cell = build_trace_cell(&stable, &images, &alg, hdeg, weight, monos)?;
    let mut codomain = vec![String::new(); cell.columns.len()];
    for (m, &i) in &cell.columns {
        codomain[i] = m.render(alg.table());
    }
    let mut cols = cell.columns.clone();
    let rows = cell
        .images
        .iter()
        .map(|p| TraceCell::coordinates(&mut cols, p))
        .collect();
    Ok(SymTraceMatrix {
        domain: cell.monomials.iter().map(|m| m.render(stable.cdga.table())).collect(),
        codomain,
        rows,
        rank: cell.basis.len(),
    })
}

/// `K(A, n)`: the kernel of the symmetrized trace map, a subcomplex of `Λ[C(R)]`.
pub fn obstruction_complex(
    pres: &DgaPresentation,
    n: usize,
    max_weight: u32,
    budget: usize,
) -> Result<TruncatedComplex> {
    let stable = stable_complex(pres, max_weight)?;
    let alg = rep_n(pres, n)?;
    let cells = trace_cells(&stable, &alg, budget)?;
    obstruction_from_cells(&stable, &cells, budget)
}

fn obstruction_from_cells(
    stable: &StableComplex,
    cells: &BTreeMap<(i32, u32), TraceCell>,
    budget: usize,
) -> Result<TruncatedComplex> {
    let sc = stable.complex(budget)?;
    let mut out = TruncatedComplex::new(stable.max_weight);
    for (&(h, w), cell) in cells {
        if cell.kernel.is_empty() {
            continue;
        }
        let stable_cell = sc
            .cell(h, w)
            .ok_or_else(|| Error::Inconsistent(format!("stable cell (h={h}, w={w}) missing")))?;
        let below = cells.get(&(h - 1, w));
        let mut rows = Vec::with_capacity(cell.kernel.len());
        for k in &cell.kernel {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (i, c) in k {
                for (j, v) in &stable_cell.differential[*i] {
                    *acc.entry(*j).or_insert_with(Scalar::zero) += c * v;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            if acc.is_empty() {
                rows.push(Vec::new());
                continue;
            }
            let escape = || {
                Error::Inconsistent(format!(
                    "differential of a kernel element at (h={h}, w={w}) leaves the kernel"
                ))
            };
            let below = below.ok_or_else(escape)?;
            let row = solve_in_kernel(&below.kernel, acc.into_iter().collect()).ok_or_else(escape)?;
            rows.push(row);
        }
        let labels = cell
            .kernel
            .iter()
            .map(|k| render_combination(stable, cell, k))
            .collect();
        out.insert_cell(h, w, Cell::new(labels, rows));
    }
    Ok(out)
}

/// When the invariant homology reaches its stable value, per weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityRow {
    pub weight: u32,
    /// Stable Betti numbers by hdeg.
    pub stable: BTreeMap<i32, usize>,
    /// Invariant Betti numbers by hdeg, for `n = 1..=max_n`.
    pub per_n: Vec<BTreeMap<i32, usize>>,
    /// Least `n` from which every computed `n' >= n` agrees with the stable value.
    pub reached: Option<u32>,
}

pub fn empirical_stability(
    pres: &DgaPresentation,
    max_weight: u32,
    max_n: usize,
    budget: usize,
) -> Result<Vec<StabilityRow>> {
    let stable = stable_complex(pres, max_weight)?;
    let sb = betti(&stable.complex(budget)?)?;
    let mut per_n = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let alg = rep_n(pres, n)?;
        let cells = trace_cells(&stable, &alg, budget)?;
        per_n.push(betti(&invariant_from_cells(&stable, &alg, &cells)?)?);
    }
    let by_weight = |b: &crate::homology::BettiTable, w: u32| -> BTreeMap<i32, usize> {
        b.cells()
            .filter(|(k, c)| k.1 == w && c.dim > 0)
            .map(|(k, c)| (k.0, c.dim))
            .collect()
    };
    let mut rows = Vec::new();
    for w in 0..=max_weight {
        let s = by_weight(&sb, w);
        let ns: Vec<BTreeMap<i32, usize>> = per_n.iter().map(|b| by_weight(b, w)).collect();
        let mut reached = None;
        for k in (0..ns.len()).rev() {
            if ns[k] == s {
                reached = Some(k as u32 + 1);
            } else {
                break;
            }
        }
        rows.push(StabilityRow {
            weight: w,
            stable: s,
            per_n: ns,
            reached,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{free_graded_commutative_closure, les_check};
    use crate::presentation::builtin_resolution;

    const BUDGET: usize = 100_000;

    #[test]
    fn invariant_cells_of_dual_numbers_at_two() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let c = invariant_subcomplex(&p, 2, 2, BUDGET).unwrap();
        assert_eq!(c.dim(0, 2), 2);
        assert_eq!(c.cell(0, 2).unwrap().labels, vec!["[x]*[x]", "[x*x]"]);
        assert_eq!(c.dim(1, 2), 1);
        assert_eq!(c.cell(1, 2).unwrap().labels, vec!["[x1]"]);
    }

    #[test]
    fn rank_one_invariants_are_everything() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let inv = invariant_subcomplex(&p, 1, 4, BUDGET).unwrap();
        let full = rep_n(&p, 1).unwrap().complex(4, BUDGET).unwrap();
        for (&(h, w), cell) in full.cells() {
            assert_eq!(inv.dim(h, w), cell.dim(), "(h={h}, w={w})");
        }
    }

    #[test]
    fn stable_complex_small_cases() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let s = stable_complex(&p, 4).unwrap();
        let c = s.complex(BUDGET).unwrap();
        assert_eq!(c.cell(0, 1).unwrap().labels, vec!["[x]"]);
        // d([x][x*x1]) = [x][x*x*x]
        let t = s.cdga().table();
        let x = t.position("[x]").unwrap();
        let xx1 = t.position("[x*x1]").unwrap();
        let xxx = t.position("[x*x*x]").unwrap();
        let m = CommPoly::var(t, x).mul(&CommPoly::var(t, xx1)).unwrap();
        let expect = CommPoly::var(t, x).mul(&CommPoly::var(t, xxx)).unwrap();
        assert_eq!(s.cdga().d(&m).unwrap(), expect);
    }

    #[test]
    fn sym_trace_small_ranks() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let m = sym_trace_matrix(&p, 1, 0, 1, BUDGET).unwrap();
        assert_eq!((m.domain.len(), m.rank), (1, 1));
        let m = sym_trace_matrix(&p, 1, 2, 3, BUDGET).unwrap();
        assert_eq!(m.rank, 1);
        assert_eq!(m.codomain, vec!["x2.1.1"]);
    }

    #[test]
    fn stable_homology_is_free_on_cyclic_homology() {
        let p = builtin_resolution("dual-numbers", 6).unwrap();
        let sb = betti(&stable_complex(&p, 6).unwrap().complex(BUDGET).unwrap()).unwrap();
        let cb = betti(&crate::cyclic::cyclic_complex(&p, 6).unwrap()).unwrap();
        let closure = free_graded_commutative_closure(&cb.dims(), 6);
        let got: BTreeMap<(i32, u32), u64> = sb.dims().into_iter().map(|(k, v)| (k, v as u64)).collect();
        assert_eq!(got, closure);
    }

    #[test]
    fn short_exact_sequence_at_rank_one() {
        let p = builtin_resolution("dual-numbers", 5).unwrap();
        let stable = stable_complex(&p, 5).unwrap();
        let alg = rep_n(&p, 1).unwrap();
        let cells = trace_cells(&stable, &alg, BUDGET).unwrap();
        let k = obstruction_from_cells(&stable, &cells, BUDGET).unwrap();
        let inv = invariant_from_cells(&stable, &alg, &cells).unwrap();
        let mid = stable.complex(BUDGET).unwrap();
        let r = les_check(&k, &mid, &inv).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        // [x*x1] and [x]*[x1] both map to x*x1 when n = 1
        assert_eq!(k.dim(1, 3), 1);
        for (&(h, w), cell) in mid.cells() {
            assert_eq!(cell.dim(), k.dim(h, w) + inv.dim(h, w));
        }
    }

    #[test]
    fn sandwich_kernel_vanishes_in_degree_one() {
        let p = builtin_resolution("sandwich", 4).unwrap();
        let k = obstruction_complex(&p, 1, 4, BUDGET).unwrap();
        for w in 0..=4 {
            assert_eq!(k.dim(1, w), 0);
        }
    }

    #[test]
    fn large_rank_has_no_kernel() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let k = obstruction_complex(&p, 3, 3, BUDGET).unwrap();
        assert_eq!(k.cells().count(), 0);
    }
}
