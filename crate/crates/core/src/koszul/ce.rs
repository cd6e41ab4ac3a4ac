//! Chevalley–Eilenberg complexes of `gl_r(Ā)` and the generalized-trace map
//! into the shifted cyclic complex.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::FiniteGradedAlgebra;
use crate::comm::{monomials_of_weight, CommMonomial, CommPoly, VarTable, Variable};
use crate::cyclic::{canonical_cyclic, CyclicWord};
use crate::error::{Error, Result};
use crate::graded::{render_terms, Letter};
use crate::homology::{solve_in_kernel, Cell, RowReducer, SparseVec, TruncatedComplex};
use crate::scalar::{sign, Scalar};

/// `gl_r(Ā)` with its suspended basis `e_ij ⊗ a` as odd variables, so that
/// wedges are graded-commutative monomials.
#[derive(Debug, Clone)]
pub struct GlAlgebra {
    alg: Arc<FiniteGradedAlgebra>,
    r: usize,
    table: Arc<VarTable>,
}

impl GlAlgebra {
    /// Only algebras concentrated in homological degree 0 are supported.
    pub fn new(alg: Arc<FiniteGradedAlgebra>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("matrix size must be >= 1".into()));
        }
        if !alg.is_ungraded() {
            return Err(Error::InvalidArgument(
                "Chevalley-Eilenberg complexes need an algebra in degree 0".into(),
            ));
        }
        let mut vars = Vec::with_capacity(alg.dim() * r * r);
        for g in alg.basis() {
            for i in 0..r {
                for j in 0..r {
                    vars.push(Variable::new(format!("e{}{}.{}", i + 1, j + 1, g.name), 1, g.weight));
                }
            }
        }
        Ok(GlAlgebra {
            table: Arc::new(VarTable::new(vars)?),
            alg,
            r,
        })
    }

    pub fn algebra(&self) -> &Arc<FiniteGradedAlgebra> {
        &self.alg
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn var(&self, a: Letter, i: usize, j: usize) -> u32 {
        (a as usize * self.r * self.r + i * self.r + j) as u32
    }

    pub fn var_position(&self, v: u32) -> (Letter, usize, usize) {
        let v = v as usize;
        let rr = self.r * self.r;
        ((v / rr) as Letter, (v % rr) / self.r, v % self.r)
    }

    /// `[e_ij ⊗ a, e_kl ⊗ b] = δ_jk e_il ⊗ ab − δ_li e_kj ⊗ ba`.
    pub fn bracket(&self, u: u32, v: u32) -> CommPoly {
        let (a, i, j) = self.var_position(u);
        let (b, k, l) = self.var_position(v);
        let mut out = CommPoly::zero(&self.table);
        if j == k {
            for (c, x) in self.alg.product(a, b) {
                out.add_term(CommMonomial::var(self.var(*c, i, l)), x.clone());
            }
        }
        if l == i {
            for (c, x) in self.alg.product(b, a) {
                out.add_term(CommMonomial::var(self.var(*c, k, j)), -x.clone());
            }
        }
        out
    }

    /// Images of the basis under `ad E_ab`, for use as an even derivation.
    pub fn gl_action_images(&self, a: usize, b: usize) -> Vec<CommPoly> {
        (0..self.table.len() as u32)
            .map(|v| {
                let (x, i, j) = self.var_position(v);
                let mut p = CommPoly::zero(&self.table);
                if b == i {
                    p.add_term(CommMonomial::var(self.var(x, a, j)), Scalar::one());
                }
                if j == a {
                    p.add_term(CommMonomial::var(self.var(x, i, b)), -Scalar::one());
                }
                p
            })
            .collect()
    }

    pub fn is_invariant(&self, p: &CommPoly) -> Result<bool> {
        for a in 0..self.r {
            for b in 0..self.r {
                if !p.derive(&self.gl_action_images(a, b), false)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Variables of a wedge monomial, in order.
    pub fn factors(m: &CommMonomial) -> Vec<u32> {
        m.factors().iter().map(|(v, _)| *v).collect()
    }

    /// Wedges of one weight, grouped by wedge degree.
    pub fn wedges(&self, weight: u32, budget: usize) -> Result<BTreeMap<i32, Vec<CommMonomial>>> {
        monomials_of_weight(&self.table, weight, budget)
    }
}

/// `d(ξ_1 ∧ … ∧ ξ_k) = Σ_{i<j} (−1)^{i+j} [ξ_i, ξ_j] ∧ ξ_1 ∧ … ξ̂_i … ξ̂_j … ∧ ξ_k`.
pub fn ce_differential(gl: &GlAlgebra, p: &CommPoly) -> Result<CommPoly> {
    let t = gl.table();
    let mut out = CommPoly::zero(t);
    for (m, c) in p.terms() {
        let xs = GlAlgebra::factors(m);
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let br = gl.bracket(xs[i], xs[j]);
                if br.is_zero() {
                    continue;
                }
                let rest: Vec<u32> = xs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, v)| *v)
                    .collect();
                let term = br.mul(&CommPoly::product_of_vars(t, &rest))?;
                out.add_assign_scaled(&term, &(c * sign((i + j) % 2 == 1)))?;
            }
        }
    }
    Ok(out)
}

fn coordinates(index: &HashMap<CommMonomial, usize>, p: &CommPoly) -> Result<SparseVec> {
    let mut row = Vec::with_capacity(p.num_terms());
    for (m, c) in p.terms() {
        let i = index
            .get(m)
            .ok_or_else(|| Error::Inconsistent("wedge outside the enumerated basis".into()))?;
        row.push((*i, c.clone()));
    }
    row.sort_by_key(|(i, _)| *i);
    Ok(row)
}

struct InvariantCell {
    monomials: Vec<CommMonomial>,
    index: HashMap<CommMonomial, usize>,
    kernel: Vec<SparseVec>,
}

fn invariant_cell(gl: &GlAlgebra, monomials: Vec<CommMonomial>) -> Result<InvariantCell> {
    let t = gl.table();
    let index: HashMap<CommMonomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let n = monomials.len();
    let actions: Vec<Vec<CommPoly>> = (0..gl.r * gl.r)
        .map(|k| gl.gl_action_images(k / gl.r, k % gl.r))
        .collect();
    let rows: Vec<SparseVec> = monomials
        .par_iter()
        .map(|m| {
            let p = CommPoly::monomial(t, m.clone(), Scalar::one());
            let mut row = Vec::new();
            for (k, images) in actions.iter().enumerate() {
                for (i, c) in coordinates(&index, &p.derive(images, false)?)? {
                    row.push((k * n + i, c));
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut reducer = RowReducer::new();
    let kernel = rows.iter().filter_map(|r| reducer.insert(r)).collect();
    Ok(InvariantCell {
        monomials,
        index,
        kernel,
    })
}

/// The complex of `gl_r(k)`-invariant wedges of `gl_r(Ā)`, wedge degree at
/// most `max_k`, weight at most `max_weight`.
pub fn ce_complex(gl: &GlAlgebra, max_k: u32, max_weight: u32, budget: usize) -> Result<TruncatedComplex> {
    let t = gl.table();
    let mut cells: BTreeMap<(i32, u32), InvariantCell> = BTreeMap::new();
    let mut truncated = false;
    for w in 0..=max_weight {
        for (k, monos) in gl.wedges(w, budget)? {
            if k > max_k as i32 {
                truncated = true;
                continue;
            }
            cells.insert((k, w), invariant_cell(gl, monos)?);
        }
    }
    let mut out = if truncated {
        TruncatedComplex::with_hdeg_cap(max_weight, max_k as i32)
    } else {
        TruncatedComplex::new(max_weight)
    };
    for (&(k, w), cell) in &cells {
        let mut rows = Vec::with_capacity(cell.kernel.len());
        for v in &cell.kernel {
            let mut p = CommPoly::zero(t);
            for (i, c) in v {
                p.add_term(cell.monomials[*i].clone(), c.clone());
            }
            let dp = ce_differential(gl, &p)?;
            if dp.is_zero() {
                rows.push(Vec::new());
                continue;
            }
            let escape = || Error::Inconsistent(format!("CE differential leaves the invariants at (k={k}, w={w})"));
            let below = cells.get(&(k - 1, w)).ok_or_else(escape)?;
            let coords = coordinates(&below.index, &dp)?;
            rows.push(solve_in_kernel(&below.kernel, coords).ok_or_else(escape)?);
        }
        let labels = cell
            .kernel
            .iter()
            .map(|v| render_terms(v.iter().map(|(i, c)| (cell.monomials[*i].render(t), c))))
            .collect();
        out.insert_cell(k, w, Cell::new(labels, rows));
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        if cur.len() == used.len() {
            let mut inv = 0;
            for i in 0..cur.len() {
                for j in i + 1..cur.len() {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), inv % 2 == 1));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `ϑ(ξ_0 ∧ … ∧ ξ_k) = Σ_{σ ∈ S_k} sgn(σ) Tr(ξ_0 ⊗ ξ_σ(1) ⊗ … ⊗ ξ_σ(k))`,
/// as a combination of good cyclic words in `Ā[1]`.
pub fn lqt_theta(gl: &GlAlgebra, p: &CommPoly) -> Result<BTreeMap<CyclicWord, Scalar>> {
    let a = gl.alg.suspended();
    let mut out: BTreeMap<CyclicWord, Scalar> = BTreeMap::new();
    for (m, c) in p.terms() {
        let xs = GlAlgebra::factors(m);
        let Some((&head, tail)) = xs.split_first() else {
            continue;
        };
        for (perm, neg) in permutations(tail.len()) {
            let seq: Vec<u32> = std::iter::once(head).chain(perm.iter().map(|&i| tail[i])).collect();
            let pos: Vec<(Letter, usize, usize)> = seq.iter().map(|&v| gl.var_position(v)).collect();
            let closed = (0..pos.len()).all(|q| pos[q].2 == pos[(q + 1) % pos.len()].1);
            if !closed {
                continue;
            }
            let word: Vec<Letter> = pos.iter().map(|x| x.0).collect();
            if let Some((cw, s)) = canonical_cyclic(a, &word)? {
                let e = out.entry(cw).or_insert_with(Scalar::zero);
                *e += c * s * sign(neg);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Wedges of weight `<= max_weight` on which `ϑ ∘ d_CE` and `d ∘ ϑ` disagree,
/// where `d = −b` is the differential of the shifted complex `CC̄(A)[1]`.
pub fn theta_chain_map_violations(gl: &GlAlgebra, max_weight: u32, budget: usize) -> Result<Vec<String>> {
    let t = gl.table();
    let mut monos = Vec::new();
    for w in 1..=max_weight {
        for (_, ms) in gl.wedges(w, budget)? {
            monos.extend(ms);
        }
    }
    let bad: Vec<Option<String>> = monos
        .par_iter()
        .map(|m| {
            let p = CommPoly::monomial(t, m.clone(), Scalar::one());
            let lhs = lqt_theta(gl, &ce_differential(gl, &p)?)?;
            let mut rhs: BTreeMap<CyclicWord, Scalar> = BTreeMap::new();
            for (cw, c) in lqt_theta(gl, &p)? {
                for (u, x) in gl.alg.cyclic_b(&cw)? {
                    *rhs.entry(u).or_insert_with(Scalar::zero) -= &c * x;
                }
            }
            rhs.retain(|_, c| !c.is_zero());
            Ok((lhs != rhs).then(|| m.render(t)))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::betti;

    const BUDGET: usize = 100_000;

    fn gl(name: &str, r: usize) -> GlAlgebra {
        GlAlgebra::new(Arc::new(FiniteGradedAlgebra::from_name(name).unwrap()), r).unwrap()
    }

    /// Partitions of `k` into distinct odd parts at most `max`.
    fn distinct_odd(k: u32, max: u32) -> usize {
        fn go(k: u32, part: u32, max: u32) -> usize {
            if k == 0 {
                return 1;
            }
            (part..=max.min(k)).step_by(2).map(|p| go(k - p, p + 2, max)).sum()
        }
        go(k, 1, max)
    }

    #[test]
    fn ce_of_dual_numbers_rank_one() {
        let c = ce_complex(&gl("dual-numbers", 1), 4, 4, BUDGET).unwrap();
        let b = betti(&c).unwrap();
        assert_eq!((b.get(0, 0), b.get(1, 1), b.get(2, 2)), (1, 1, 0));
    }

    #[test]
    fn ce_invariants_match_distinct_odd_partitions() {
        for r in 2..=3usize {
            let c = ce_complex(&gl("square-zero:1", r), 5, 5, BUDGET).unwrap();
            for k in 0..=5u32 {
                assert_eq!(c.dim(k as i32, k), distinct_odd(k, 2 * r as u32 - 1), "r={r}, k={k}");
            }
        }
        let c = ce_complex(&gl("dual-numbers", 2), 4, 4, BUDGET).unwrap();
        assert_eq!(c.dim(4, 4), 1);
        let c = ce_complex(&gl("dual-numbers", 3), 2, 2, BUDGET).unwrap();
        assert_eq!(c.dim(2, 2), 0);
    }

    #[test]
    fn ce_d_squares_to_zero() {
        for name in ["truncated:2", "truncated:3"] {
            let g = gl(name, 2);
            for w in 1..=4 {
                for (_, ms) in g.wedges(w, BUDGET).unwrap() {
                    for m in ms {
                        let p = CommPoly::monomial(g.table(), m, Scalar::one());
                        let dd = ce_differential(&g, &ce_differential(&g, &p).unwrap()).unwrap();
                        assert!(dd.is_zero(), "{name}: {}", p.render());
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_basis_is_invariant() {
        let g = gl("truncated:2", 2);
        for w in 1..=3 {
            for (_, ms) in g.wedges(w, BUDGET).unwrap() {
                let cell = invariant_cell(&g, ms).unwrap();
                for v in &cell.kernel {
                    let mut p = CommPoly::zero(g.table());
                    for (i, c) in v {
                        p.add_term(cell.monomials[*i].clone(), c.clone());
                    }
                    assert!(g.is_invariant(&p).unwrap());
                }
            }
        }
        let c = ce_complex(&g, 3, 3, BUDGET).unwrap();
        betti(&c).unwrap();
    }

    #[test]
    fn theta_examples() {
        let g = gl("dual-numbers", 2);
        let t = g.table();
        let e11 = CommPoly::var(t, g.var(0, 0, 0));
        let th = lqt_theta(&g, &e11).unwrap();
        assert_eq!(th.len(), 1);
        let (cw, c) = th.into_iter().next().unwrap();
        assert_eq!(
            (cw.render(g.algebra().suspended()), c),
            ("[x]".to_string(), Scalar::one())
        );
        // x ⊗ x is bad in the suspended letters, so this wedge maps to zero
        let w = CommPoly::product_of_vars(t, &[g.var(0, 0, 1), g.var(0, 1, 0)]);
        assert!(lqt_theta(&g, &w).unwrap().is_empty());
        let g2 = gl("truncated:2", 2);
        let x = 0;
        let xx = 1;
        let w = CommPoly::product_of_vars(g2.table(), &[g2.var(x, 0, 1), g2.var(xx, 1, 0)]);
        let th = lqt_theta(&g2, &w).unwrap();
        assert_eq!(th.len(), 1);
    }

    #[test]
    fn theta_is_a_chain_map() {
        for name in ["dual-numbers", "truncated:2", "truncated:3", "square-zero:2"] {
            for r in 1..=2 {
                let v = theta_chain_map_violations(&gl(name, r), 4, BUDGET).unwrap();
                assert!(v.is_empty(), "{name}, r={r}: {v:?}");
            }
        }
    }
}
