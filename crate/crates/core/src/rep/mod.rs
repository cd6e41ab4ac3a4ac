//! The representation functor `R ↦ R_n` on free DG algebras: matrix
//! variables, traces of cyclic words, the infinitesimal `gl_n` action and the
//! stabilization maps.

mod stable;

use std::sync::Arc;

use rayon::prelude::*;

use crate::comm::{CommMonomial, CommPoly, FreeCdga, VarTable, Variable};
use crate::cyclic::CyclicWord;
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Letter, NcPoly};
use crate::homology::{rank_exact, SparseVec, TruncatedComplex};
use crate::presentation::DgaPresentation;
use crate::scalar::Scalar;

pub use stable::{
    empirical_stability, invariant_subcomplex, obstruction_complex, stable_complex, sym_trace_matrix, trace_cells,
    StabilityRow, StableComplex, SymTraceMatrix, TraceCell,
};

/// An `n x n` matrix of commutative polynomials, row-major.
pub type PolyMatrix = Vec<CommPoly>;

/// `R_n`: the free graded-commutative algebra on the entries `x^α_{ij}` of
/// one matrix per generator, with `d x^α_{ij} = (d X^α)_{ij}`.
#[derive(Debug, Clone)]
pub struct MatrixVariableAlgebra {
    n: usize,
    alphabet: Arc<Alphabet>,
    complete_to_weight: Option<u32>,
    cdga: FreeCdga,
}

/// Name of the variable for entry `(i, j)` (0-based) of generator `name`.
pub fn matrix_var_name(name: &str, i: usize, j: usize) -> String {
    format!("{name}.{}.{}", i + 1, j + 1)
}

/// Builds `R_n` for a presentation.
pub fn rep_n(pres: &DgaPresentation, n: usize) -> Result<MatrixVariableAlgebra> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size must be at least 1".into()));
    }
    let a = pres.alphabet();
    let mut vars = Vec::with_capacity(a.len() * n * n);
    for g in a.generators() {
        for i in 0..n {
            for j in 0..n {
                vars.push(Variable::new(matrix_var_name(&g.name, i, j), g.hdeg, g.weight));
            }
        }
    }
    let table = Arc::new(VarTable::new(vars)?);
    let zero = FreeCdga::new(Arc::clone(&table), vec![CommPoly::zero(&table); table.len()])?;
    let mut alg = MatrixVariableAlgebra {
        n,
        alphabet: Arc::clone(a),
        complete_to_weight: pres.complete_to_weight(),
        cdga: zero,
    };
    let diffs: Vec<Vec<CommPoly>> = (0..a.len() as Letter)
        .into_par_iter()
        .map(|l| alg.evaluate_poly(pres.diff_of(l)))
        .collect::<Result<_>>()?;
    let diff: Vec<CommPoly> = diffs.into_iter().flatten().collect();
    alg.cdga = FreeCdga::new(table, diff)?;
    Ok(alg)
}

impl MatrixVariableAlgebra {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.cdga.table()
    }

    pub fn cdga(&self) -> &FreeCdga {
        &self.cdga
    }

    /// Index of `x^l_{ij}`, 0-based indices.
    pub fn var(&self, l: Letter, i: usize, j: usize) -> u32 {
        (l as usize * self.n * self.n + i * self.n + j) as u32
    }

    /// `(letter, i, j)` of a variable index.
    pub fn var_position(&self, v: u32) -> (Letter, usize, usize) {
        let v = v as usize;
        let nn = self.n * self.n;
        ((v / nn) as Letter, (v % nn) / self.n, v % self.n)
    }

    pub fn generator_matrix(&self, l: Letter) -> PolyMatrix {
        let t = self.table();
        (0..self.n * self.n)
            .map(|k| CommPoly::var(t, self.var(l, k / self.n, k % self.n)))
            .collect()
    }

    fn identity(&self, c: &Scalar) -> PolyMatrix {
        let t = self.table();
        (0..self.n * self.n)
            .map(|k| {
                if k / self.n == k % self.n {
                    CommPoly::monomial(t, CommMonomial::one(), c.clone())
                } else {
                    CommPoly::zero(t)
                }
            })
            .collect()
    }

    pub fn mat_mul(&self, a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CommPoly::zero(self.table());
                for k in 0..n {
                    let (x, y) = (&a[i * n + k], &b[k * n + j]);
                    if !x.is_zero() && !y.is_zero() {
                        acc.add_assign_scaled(&x.mul(y)?, &Scalar::from_integer(1.into()))?;
                    }
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// The matrix `X^{w_1} X^{w_2} ... X^{w_k}`; the identity for the empty word.
    pub fn evaluate_word_matrix(&self, w: &[Letter]) -> Result<PolyMatrix> {
        let Some((&first, rest)) = w.split_first() else {
            return Ok(self.identity(&Scalar::from_integer(1.into())));
        };
        let mut acc = self.generator_matrix(first);
        for &l in rest {
            acc = self.mat_mul(&acc, &self.generator_matrix(l))?;
        }
        Ok(acc)
    }

    pub fn evaluate_poly(&self, p: &NcPoly) -> Result<PolyMatrix> {
        let mut out: PolyMatrix = vec![CommPoly::zero(self.table()); self.n * self.n];
        for (w, c) in p.terms() {
            let m = self.evaluate_word_matrix(w)?;
            for (o, e) in out.iter_mut().zip(&m) {
                o.add_assign_scaled(e, c)?;
            }
        }
        Ok(out)
    }

    pub fn trace(&self, m: &PolyMatrix) -> Result<CommPoly> {
        let mut acc = CommPoly::zero(self.table());
        for i in 0..self.n {
            acc.add_assign_scaled(&m[i * self.n + i], &Scalar::from_integer(1.into()))?;
        }
        Ok(acc)
    }

    pub fn trace_word(&self, w: &[Letter]) -> Result<CommPoly> {
        self.trace(&self.evaluate_word_matrix(w)?)
    }

    /// `Tr(X^{w})` for the representative of a cyclic word.
    pub fn trace_cyclic(&self, cw: &CyclicWord) -> Result<CommPoly> {
        self.trace_word(&cw.word)
    }

    /// Images of all variables under the derivation `[E_ab, -]`:
    /// `x_{ij} ↦ δ_{ia} x_{bj} - x_{ia} δ_{bj}`.
    pub fn gl_action_images(&self, a: usize, b: usize) -> Vec<CommPoly> {
        let t = self.table();
        (0..t.len() as u32)
            .map(|v| {
                let (l, i, j) = self.var_position(v);
                let mut p = CommPoly::zero(t);
                if i == a {
                    p.add_term(CommMonomial::var(self.var(l, b, j)), Scalar::from_integer(1.into()));
                }
                if j == b {
                    p.add_term(CommMonomial::var(self.var(l, i, a)), Scalar::from_integer((-1).into()));
                }
                p
            })
            .collect()
    }

    /// `E_ab · p` for every elementary matrix, in order `(a, b)` row-major.
    /// `p` is `gl_n`-invariant iff every residual vanishes.
    pub fn infinitesimal_invariance_check(&self, p: &CommPoly) -> Result<Vec<CommPoly>> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                out.push(p.derive(&self.gl_action_images(a, b), false)?);
            }
        }
        Ok(out)
    }

    pub fn is_invariant(&self, p: &CommPoly) -> Result<bool> {
        Ok(self.infinitesimal_invariance_check(p)?.iter().all(CommPoly::is_zero))
    }

    /// `μ_{n, n-1}`: variables with an index equal to `n` go to zero, the
    /// others to their namesakes in `target = R_{n-1}`.
    pub fn stabilization_map(&self, p: &CommPoly, target: &MatrixVariableAlgebra) -> Result<CommPoly> {
        if target.n + 1 != self.n || target.alphabet != self.alphabet {
            return Err(Error::InvalidArgument(
                "stabilization target must be R_{n-1} of the same presentation".into(),
            ));
        }
        let tt = target.table();
        let images: Vec<CommPoly> = (0..self.table().len() as u32)
            .map(|v| {
                let (l, i, j) = self.var_position(v);
                if i + 1 == self.n || j + 1 == self.n {
                    CommPoly::zero(tt)
                } else {
                    CommPoly::var(tt, target.var(l, i, j))
                }
            })
            .collect();
        p.substitute(tt, &images)
    }

    /// The complex `R_n` in weights `0..=max_weight`.
    pub fn complex(&self, max_weight: u32, budget: usize) -> Result<TruncatedComplex> {
        if let Some(bound) = self.complete_to_weight {
            if max_weight > bound {
                return Err(Error::BeyondCompleteness {
                    requested: max_weight,
                    bound,
                });
            }
        }
        self.cdga.complex(max_weight, budget)
    }

    /// Dimension of the `gl_n`-invariants of the cell `(hdeg, weight)`,
    /// computed as the common kernel of the `E_ab` actions on all monomials.
    pub fn invariant_dimension(&self, hdeg: i32, weight: u32, budget: usize) -> Result<usize> {
        let cells = self.cdga.monomials_of_weight(weight, budget)?;
        let Some(monos) = cells.get(&hdeg) else {
            return Ok(0);
        };
        let index: std::collections::HashMap<&CommMonomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let actions: Vec<Vec<CommPoly>> = (0..self.n * self.n)
            .map(|k| self.gl_action_images(k / self.n, k % self.n))
            .collect();
        let t = self.table();
        let rows: Vec<SparseVec> = monos
            .par_iter()
            .map(|m| {
                let p = CommPoly::monomial(t, m.clone(), Scalar::from_integer(1.into()));
                let mut row = Vec::new();
                for (k, images) in actions.iter().enumerate() {
                    let img = p.derive(images, false).expect("same table");
                    for (mm, c) in img.terms() {
                        row.push((k * monos.len() + index[mm], c.clone()));
                    }
                }
                row.sort_by_key(|(i, _)| *i);
                row
            })
            .collect();
        Ok(monos.len() - rank_exact(&rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{canonical_cyclic, cyclic_basis};
    use crate::homology::betti;
    use crate::presentation::builtin_resolution;

    #[test]
    fn commuting_plane_at_one_has_zero_differential() {
        let p = builtin_resolution("commuting-plane", 4).unwrap();
        let r = rep_n(&p, 1).unwrap();
        assert!(r.cdga().diff().iter().all(CommPoly::is_zero));
    }

    #[test]
    fn commuting_plane_at_two() {
        let p = builtin_resolution("commuting-plane", 4).unwrap();
        let r = rep_n(&p, 2).unwrap();
        let t11 = r.var(2, 0, 0);
        assert_eq!(r.cdga().diff()[t11 as usize].render(), "x.1.2*y.2.1 - x.2.1*y.1.2");
    }

    #[test]
    fn dual_numbers_at_one_keeps_the_formula() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let r = rep_n(&p, 1).unwrap();
        let d = r.cdga().diff();
        assert_eq!(d[1].render(), "x.1.1*x.1.1");
        // d x2 = x x1 - x1 x = 0 once commutative
        assert!(d[2].is_zero());
        assert_eq!(d[3].render(), "2*x.1.1*x2.1.1");
    }

    #[test]
    fn word_matrices() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let r1 = rep_n(&p, 1).unwrap();
        assert_eq!(r1.evaluate_word_matrix(&[0, 0]).unwrap()[0].render(), "x.1.1*x.1.1");
        assert!(r1.evaluate_word_matrix(&[1, 1]).unwrap()[0].is_zero());
        let r2 = rep_n(&p, 2).unwrap();
        let m = r2.evaluate_word_matrix(&[1, 1]).unwrap();
        // (X1 X1)_{11} = x1_{11}^2 + x1_{12} x1_{21}, first term vanishes
        assert_eq!(m[0].render(), "x1.1.2*x1.2.1");
        assert_eq!(r2.trace_word(&[0]).unwrap().render(), "x.1.1 + x.2.2");
    }

    #[test]
    fn invariance_examples() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let r = rep_n(&p, 2).unwrap();
        assert!(r.is_invariant(&r.trace_word(&[0]).unwrap()).unwrap());
        let x11 = CommPoly::var(r.table(), r.var(0, 0, 0));
        let res = r.infinitesimal_invariance_check(&x11).unwrap();
        assert!(!res[1].is_zero(), "E_12 moves x_11");
        let prod = r
            .trace_word(&[0, 0])
            .unwrap()
            .mul(&r.trace_word(&[1]).unwrap())
            .unwrap();
        assert!(r.is_invariant(&prod).unwrap());
    }

    #[test]
    fn stabilization_examples() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let r2 = rep_n(&p, 2).unwrap();
        let r1 = rep_n(&p, 1).unwrap();
        let x12 = CommPoly::var(r2.table(), r2.var(0, 0, 1));
        assert!(r2.stabilization_map(&x12, &r1).unwrap().is_zero());
        let x11 = CommPoly::var(r2.table(), r2.var(0, 0, 0));
        assert_eq!(r2.stabilization_map(&x11, &r1).unwrap().render(), "x.1.1");
        for cells in cyclic_basis(&p, 4).unwrap().values() {
            for cw in cells {
                let lhs = r2.stabilization_map(&r2.trace_cyclic(cw).unwrap(), &r1).unwrap();
                assert_eq!(lhs, r1.trace_cyclic(cw).unwrap());
            }
        }
    }

    #[test]
    fn trace_respects_cyclic_signs() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let r = rep_n(&p, 2).unwrap();
        // x1 x x1 x ... pick words and compare Tr(w) with sign * Tr(rep)
        for w in [vec![1, 0], vec![1, 1, 0], vec![2, 1], vec![0, 1, 0]] {
            let tw = r.trace_word(&w).unwrap();
            match canonical_cyclic(p.alphabet(), &w).unwrap() {
                Some((cw, s)) => assert_eq!(tw, r.trace_cyclic(&cw).unwrap().scale(&s)),
                None => assert!(tw.is_zero()),
            }
        }
    }

    #[test]
    fn dual_numbers_rep_one_betti_to_weight_three() {
        let p = builtin_resolution("dual-numbers", 3).unwrap();
        let c = rep_n(&p, 1).unwrap().complex(3, 1000).unwrap();
        let b = betti(&c).unwrap();
        let expect = std::collections::BTreeMap::from([((0, 0), 1), ((0, 1), 1), ((2, 3), 1)]);
        assert_eq!(b.dims(), expect);
        assert_eq!(crate::homology::euler(&c).unwrap()[&3], 1);
    }

    #[test]
    fn d_squared_in_rep_two() {
        for name in ["dual-numbers", "commuting-plane", "square-zero:2"] {
            let p = builtin_resolution(name, 5).unwrap();
            let r = rep_n(&p, 2).unwrap();
            assert!(r.cdga().d_squared_violations().unwrap().is_empty(), "{name}");
        }
    }
}
