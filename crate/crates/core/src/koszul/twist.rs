//! Twisting cochains: the bar-side cochain `f`, the composite `τ_{r,n}`,
//! Maurer–Cartan residuals and twisted tensor products.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::ce::{ce_differential, lqt_theta, GlAlgebra};
use super::FiniteGradedAlgebra;
use crate::comm::{normalize_comm, CommMonomial, CommPoly, FreeCdga, VarTable, Variable};
use crate::error::{Error, Result};
use crate::graded::{Letter, NcPoly};
use crate::homology::{Cell, SparseVec, TruncatedComplex};
use crate::presentation::{builtin_resolution, DgaPresentation};
use crate::rep::{rep_n, MatrixVariableAlgebra};
use crate::scalar::{sign, Scalar};

type CochainFn = dyn Fn(&[Letter]) -> Option<NcPoly> + Send + Sync;

/// Components `f_k: Ā^{⊗k} → R` of a twisting cochain `B(A) → R`, on basis tensors.
#[derive(Clone)]
pub struct BarCochain {
    alg: Arc<FiniteGradedAlgebra>,
    pres: DgaPresentation,
    f: Arc<CochainFn>,
}

impl fmt::Debug for BarCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BarCochain")
            .field("algebra", &self.alg.name())
            .field("presentation", &self.pres.name())
            .finish()
    }
}

impl BarCochain {
    pub fn new(
        alg: Arc<FiniteGradedAlgebra>,
        pres: DgaPresentation,
        f: impl Fn(&[Letter]) -> Option<NcPoly> + Send + Sync + 'static,
    ) -> Self {
        BarCochain {
            alg,
            pres,
            f: Arc::new(f),
        }
    }

    /// Dual numbers against their standard resolution: `f_k(x^{⊗k}) = x_{k−1}`,
    /// with components up to `k = max_len`.
    pub fn dual_numbers(max_len: u32) -> Result<Self> {
        let pres = builtin_resolution("dual-numbers", max_len.max(1))?;
        let a = Arc::clone(pres.alphabet());
        let f = move |w: &[Letter]| -> Option<NcPoly> {
            let name = match w.len() {
                0 => return None,
                1 => "x".to_string(),
                k => format!("x{}", k - 1),
            };
            a.position(&name).map(|l| NcPoly::generator(&a, l))
        };
        Ok(Self::new(Arc::new(FiniteGradedAlgebra::dual_numbers()), pres, f))
    }

    pub fn algebra(&self) -> &Arc<FiniteGradedAlgebra> {
        &self.alg
    }

    pub fn presentation(&self) -> &DgaPresentation {
        &self.pres
    }

    pub fn value(&self, w: &[Letter]) -> Result<NcPoly> {
        (self.f)(w).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "no cochain component for {}",
                self.alg.suspended().render_word(w)
            ))
        })
    }

    /// `T(a_1 ⊗ … ⊗ a_{k+1}) = Σ_j (−1)^{jk} Tr_n f_{k+1}(a_{1+j}, …, a_{k+1+j})`.
    pub fn t_map(&self, mats: &MatrixVariableAlgebra, w: &[Letter]) -> Result<CommPoly> {
        if !self.alg.is_ungraded() {
            return Err(Error::InvalidArgument(
                "T is implemented for algebras in degree 0".into(),
            ));
        }
        let len = w.len();
        let k = len.saturating_sub(1);
        let mut out = CommPoly::zero(mats.table());
        for j in 0..len {
            let rot: Vec<Letter> = w[j..].iter().chain(&w[..j]).copied().collect();
            let tr = mats.trace(&mats.evaluate_poly(&self.value(&rot)?)?)?;
            out.add_assign_scaled(&tr, &sign((j * k) % 2 == 1))?;
        }
        Ok(out)
    }
}

/// Outcome of a Maurer–Cartan check: basis elements with nonzero residual.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct McReport {
    pub checked: usize,
    pub failures: Vec<(String, String)>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tensors in `Ā[1]` of homological degree `1..=max_degree`.
pub fn bar_words(alg: &FiniteGradedAlgebra, max_degree: u32) -> Vec<Vec<Letter>> {
    let a = alg.suspended();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 0..a.len() as Letter {
                let mut nw = w.clone();
                nw.push(l);
                if a.word_hdeg(&nw) <= max_degree as i32 {
                    next.push(nw);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `d_R f + f b' + m (f ⊗ f) Δ` on every bar tensor of degree at most `max_degree`.
pub fn verify_bar_cochain(f: &BarCochain, max_degree: u32) -> Result<McReport> {
    let a = f.alg.suspended();
    let words = bar_words(&f.alg, max_degree);
    let results: Vec<Option<(String, String)>> = words
        .par_iter()
        .map(|w| {
            let mut res = f.pres.extend_derivation(&f.value(w)?)?;
            for (u, c) in f.alg.bar_differential(w).terms() {
                res.add_assign_scaled(&f.value(u)?, c)?;
            }
            for i in 1..w.len() {
                let s = sign(a.word_hdeg(&w[..i]).rem_euclid(2) == 1);
                let prod = f.value(&w[..i])?.mul(&f.value(&w[i..])?)?;
                res.add_assign_scaled(&prod, &s)?;
            }
            Ok((!res.is_zero()).then(|| (a.render_word(w), res.render())))
        })
        .collect::<Result<_>>()?;
    Ok(McReport {
        checked: words.len(),
        failures: results.into_iter().flatten().collect(),
    })
}

/// A finite truncation of a counital DG coalgebra; basis element 0 is the counit's dual `1`.
#[derive(Debug, Clone)]
pub struct FiniteCoalgebra {
    pub labels: Vec<String>,
    pub hdeg: Vec<i32>,
    pub weight: Vec<u32>,
    /// `d[c]` in basis coordinates.
    pub d: Vec<SparseVec>,
    /// `Δ(c) = Σ coeff · left ⊗ right`, including the terms with `1`.
    pub delta: Vec<Vec<(usize, usize, Scalar)>>,
}

impl FiniteCoalgebra {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `d_R τ(c) + τ(d c) + Σ (−1)^{|c'|} τ(c') τ(c'')` over the reduced coproduct.
pub fn verify_cochain(coalg: &FiniteCoalgebra, target: &FreeCdga, tau: &[CommPoly]) -> Result<McReport> {
    if tau.len() != coalg.len() {
        return Err(Error::LengthMismatch {
            left: tau.len(),
            right: coalg.len(),
        });
    }
    let results: Vec<Option<(String, String)>> = (0..coalg.len())
        .into_par_iter()
        .map(|c| {
            let mut res = target.d(&tau[c])?;
            for (i, x) in &coalg.d[c] {
                res.add_assign_scaled(&tau[*i], x)?;
            }
            for (l, r, x) in &coalg.delta[c] {
                if *l == 0 || *r == 0 {
                    continue;
                }
                let s = sign(coalg.hdeg[*l].rem_euclid(2) == 1);
                res.add_assign_scaled(&tau[*l].mul(&tau[*r])?, &(x * s))?;
            }
            Ok((!res.is_zero()).then(|| (coalg.labels[c].clone(), res.render())))
        })
        .collect::<Result<_>>()?;
    Ok(McReport {
        checked: coalg.len(),
        failures: results.into_iter().flatten().collect(),
    })
}

/// The Chevalley–Eilenberg coalgebra of `gl_r(Ā)` (all wedges, not only
/// invariants) up to wedge degree `max_k` and weight `max_weight`, with the
/// shuffle coproduct.
pub fn ce_coalgebra(
    gl: &GlAlgebra,
    max_k: u32,
    max_weight: u32,
    budget: usize,
) -> Result<(FiniteCoalgebra, Vec<CommMonomial>)> {
    let t = gl.table();
    let mut monos: Vec<CommMonomial> = Vec::new();
    for w in 0..=max_weight {
        for (k, ms) in gl.wedges(w, budget)? {
            if k <= max_k as i32 {
                monos.extend(ms);
            }
        }
    }
    let index: HashMap<CommMonomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut d = Vec::with_capacity(monos.len());
    let mut delta = Vec::with_capacity(monos.len());
    for m in &monos {
        let p = CommPoly::monomial(t, m.clone(), Scalar::one());
        let mut row = Vec::new();
        for (u, c) in ce_differential(gl, &p)?.terms() {
            let i = index
                .get(u)
                .ok_or_else(|| Error::Inconsistent("CE differential left the truncation".into()))?;
            row.push((*i, c.clone()));
        }
        row.sort_by_key(|(i, _)| *i);
        d.push(row);
        let xs = GlAlgebra::factors(m);
        let k = xs.len();
        let mut terms = Vec::with_capacity(1 << k);
        for mask in 0u32..(1 << k) {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            let mut inversions = 0;
            for (pos, v) in xs.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    // passes every earlier element that went right
                    inversions += right.len();
                    left.push(*v);
                } else {
                    right.push(*v);
                }
            }
            let key = |vs: &[u32]| normalize_comm(t, vs).map(|(m, _)| m).unwrap_or_else(CommMonomial::one);
            terms.push((index[&key(&left)], index[&key(&right)], sign(inversions % 2 == 1)));
        }
        delta.push(terms);
    }
    let coalg = FiniteCoalgebra {
        labels: monos.iter().map(|m| m.render(t)).collect(),
        hdeg: monos.iter().map(|m| m.hdeg(t)).collect(),
        weight: monos.iter().map(|m| m.weight(t)).collect(),
        d,
        delta,
    };
    Ok((coalg, monos))
}

/// `τ_{r,n} = T ∘ s^{-1} ∘ ϑ : CE(gl_r(Ā)) → R_n`.
#[derive(Debug, Clone)]
pub struct TauRn {
    pub gl: GlAlgebra,
    pub f: BarCochain,
    pub mats: MatrixVariableAlgebra,
}

pub fn tau_rn(f: &BarCochain, r: usize, n: usize) -> Result<TauRn> {
    Ok(TauRn {
        gl: GlAlgebra::new(Arc::clone(&f.alg), r)?,
        mats: rep_n(&f.pres, n)?,
        f: f.clone(),
    })
}

impl TauRn {
    /// `s^{-1}` is the identity on words: a cyclic word of homological degree
    /// `k + 1` in `Ā[1]` is read as the cyclic tensor of degree `k`.
    pub fn value(&self, p: &CommPoly) -> Result<CommPoly> {
        let mut out = CommPoly::zero(self.mats.table());
        for (cw, c) in lqt_theta(&self.gl, p)? {
            out.add_assign_scaled(&self.f.t_map(&self.mats, &cw.word)?, &c)?;
        }
        Ok(out)
    }

    pub fn coalgebra(&self, max_k: u32, budget: usize) -> Result<(FiniteCoalgebra, Vec<CommPoly>)> {
        let max_weight = self
            .f
            .pres
            .complete_to_weight()
            .unwrap_or(max_k)
            .min(max_k * max_weight_per_letter(&self.f.alg));
        let (coalg, monos) = ce_coalgebra(&self.gl, max_k, max_weight, budget)?;
        let t = self.gl.table();
        let taus = monos
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                if i == 0 {
                    return Ok(CommPoly::zero(self.mats.table()));
                }
                self.value(&CommPoly::monomial(t, m.clone(), Scalar::one()))
            })
            .collect::<Result<_>>()?;
        Ok((coalg, taus))
    }
}

fn max_weight_per_letter(alg: &FiniteGradedAlgebra) -> u32 {
    alg.basis().iter().map(|g| g.weight).max().unwrap_or(1)
}

/// Maurer–Cartan check for `τ_{r,n}` on wedges of degree at most `max_degree`.
pub fn verify_tau_rn(tau: &TauRn, max_degree: u32, budget: usize) -> Result<McReport> {
    let (coalg, taus) = tau.coalgebra(max_degree, budget)?;
    verify_cochain(&coalg, tau.mats.cdga(), &taus)
}

/// The complex `R ⊗_τ C` with
/// `d(m ⊗ c) = d m ⊗ c + (−1)^{|m|} m ⊗ d c + Σ (−1)^{|m|} m τ(c') ⊗ c''`,
/// truncated at total weight `max_weight`.
pub fn twisted_tensor(
    coalg: &FiniteCoalgebra,
    algebra: &FreeCdga,
    tau: &[CommPoly],
    max_weight: u32,
    budget: usize,
) -> Result<TruncatedComplex> {
    let t = algebra.table();
    let mut mono_by_weight: Vec<BTreeMap<i32, Vec<CommMonomial>>> = Vec::new();
    for w in 0..=max_weight {
        mono_by_weight.push(algebra.monomials_of_weight(w, budget)?);
    }
    // basis of each cell: (algebra monomial, coalgebra index)
    let mut cells: BTreeMap<(i32, u32), Vec<(CommMonomial, usize)>> = BTreeMap::new();
    for c in 0..coalg.len() {
        let wc = coalg.weight[c];
        if wc > max_weight {
            continue;
        }
        for (wm, by_h) in mono_by_weight.iter().enumerate().take((max_weight - wc) as usize + 1) {
            for (h, ms) in by_h {
                let cell = cells.entry((h + coalg.hdeg[c], wm as u32 + wc)).or_default();
                cell.extend(ms.iter().map(|m| (m.clone(), c)));
            }
        }
    }
    let index: HashMap<(CommMonomial, usize), usize> = cells
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, k)| (k.clone(), i)))
        .collect();
    let mut out = TruncatedComplex::new(max_weight);
    for (&(h, w), basis) in &cells {
        let rows = basis
            .par_iter()
            .map(|(m, c)| {
                let mp = CommPoly::monomial(t, m.clone(), Scalar::one());
                let s = sign(m.hdeg(t).rem_euclid(2) == 1);
                let mut acc: BTreeMap<(CommMonomial, usize), Scalar> = BTreeMap::new();
                let mut push = |p: &CommPoly, c2: usize, x: &Scalar| {
                    for (mm, v) in p.terms() {
                        *acc.entry((mm.clone(), c2)).or_insert_with(Scalar::zero) += v * x;
                    }
                };
                push(&algebra.d(&mp)?, *c, &Scalar::one());
                for (c2, x) in &coalg.d[*c] {
                    push(&mp, *c2, &(x * &s));
                }
                for (l, r, x) in &coalg.delta[*c] {
                    if tau[*l].is_zero() {
                        continue;
                    }
                    push(&mp.mul(&tau[*l])?, *r, &(x * &s));
                }
                let mut row = Vec::new();
                for (k, v) in acc {
                    if v.is_zero() {
                        continue;
                    }
                    let i = index.get(&k).ok_or_else(|| {
                        Error::Inconsistent(format!("twisted differential leaves the truncation at (h={h}, w={w})"))
                    })?;
                    row.push((*i, v));
                }
                row.sort_by_key(|(i, _)| *i);
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = basis
            .iter()
            .map(|(m, c)| format!("{} ⊗ {}", m.render(t), coalg.labels[*c]))
            .collect();
        out.insert_cell(h, w, Cell::new(labels, rows));
    }
    Ok(out)
}

/// The standard cochain `Sym^c(V[1]) → Sym(V)` for a one-dimensional `V`
/// of weight 1 in homological degree 0 (`odd = false`) or 1 (`odd = true`).
pub fn standard_cochain(odd: bool, max_weight: u32) -> Result<(FiniteCoalgebra, FreeCdga, Vec<CommPoly>)> {
    let vh = i32::from(odd);
    let table = Arc::new(VarTable::new(vec![Variable::new("v", vh, 1)])?);
    let algebra = FreeCdga::new(Arc::clone(&table), vec![CommPoly::zero(&table)])?;
    // divided powers of s v; only 1 and s v when s v is odd
    let top = if odd { max_weight } else { 1.min(max_weight) };
    let n = top as usize + 1;
    let labels = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "sv".to_string(),
            k => format!("sv^[{k}]"),
        })
        .collect();
    let coalg = FiniteCoalgebra {
        labels,
        hdeg: (0..n as i32).map(|k| k * (vh + 1)).collect(),
        weight: (0..n as u32).collect(),
        d: vec![Vec::new(); n],
        delta: (0..n)
            .map(|k| (0..=k).map(|i| (i, k - i, Scalar::one())).collect())
            .collect(),
    };
    let tau = (0..n)
        .map(|k| {
            if k == 1 {
                CommPoly::var(&table, 0)
            } else {
                CommPoly::zero(&table)
            }
        })
        .collect();
    Ok((coalg, algebra, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::betti;

    const BUDGET: usize = 100_000;

    #[test]
    fn bar_words_by_degree() {
        let w = bar_words(&FiniteGradedAlgebra::dual_numbers(), 4);
        assert_eq!(w.len(), 4);
        assert_eq!(bar_words(&FiniteGradedAlgebra::square_zero(2), 2).len(), 6);
    }

    #[test]
    fn dual_numbers_cochain_satisfies_mc() {
        let f = BarCochain::dual_numbers(11).unwrap();
        let r = verify_bar_cochain(&f, 10).unwrap();
        assert_eq!(r.checked, 10);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn wrong_cochain_fails_mc() {
        let good = BarCochain::dual_numbers(4).unwrap();
        let pres = good.presentation().clone();
        let a = Arc::clone(pres.alphabet());
        let bad = BarCochain::new(Arc::clone(good.algebra()), pres, move |w: &[Letter]| {
            let l = a.position(if w.len() == 1 { "x" } else { "x1" })?;
            Some(NcPoly::generator(&a, l))
        });
        assert!(!verify_bar_cochain(&bad, 3).unwrap().passed());
    }

    #[test]
    fn missing_component_is_an_error() {
        let f = BarCochain::dual_numbers(2).unwrap();
        assert!(verify_bar_cochain(&f, 5).is_err());
    }

    #[test]
    fn t_map_examples() {
        let f = BarCochain::dual_numbers(4).unwrap();
        let mats = rep_n(f.presentation(), 2).unwrap();
        assert_eq!(f.t_map(&mats, &[0]).unwrap().render(), "x.1.1 + x.2.2");
        // the two rotations of x ⊗ x cancel
        assert!(f.t_map(&mats, &[0, 0]).unwrap().is_zero());
        // x ⊗ x ⊗ x: three equal rotations with sign +1
        assert_eq!(f.t_map(&mats, &[0, 0, 0]).unwrap().render(), "3*x2.1.1 + 3*x2.2.2");
    }

    #[test]
    fn t_map_is_a_chain_map_on_cycles() {
        // b vanishes for dual numbers, so every T(w) must be a cycle
        let f = BarCochain::dual_numbers(5).unwrap();
        for n in 1..=2 {
            let mats = rep_n(f.presentation(), n).unwrap();
            for len in 1..=5 {
                let t = f.t_map(&mats, &vec![0; len]).unwrap();
                assert!(mats.cdga().d(&t).unwrap().is_zero(), "n={n}, len={len}");
            }
        }
    }

    #[test]
    fn tau_rn_satisfies_mc() {
        let f = BarCochain::dual_numbers(8).unwrap();
        for r in 1..=2 {
            for n in 1..=2 {
                let tau = tau_rn(&f, r, n).unwrap();
                let rep = verify_tau_rn(&tau, 8, BUDGET).unwrap();
                assert!(rep.passed(), "r={r}, n={n}: {:?}", rep.failures);
                // the CE coalgebra is an exterior algebra on r² odd generators
                assert_eq!(rep.checked, 1 << (r * r));
            }
        }
    }

    #[test]
    fn standard_cochains_are_acyclic() {
        for odd in [false, true] {
            let (c, r, tau) = standard_cochain(odd, 6).unwrap();
            assert!(verify_cochain(&c, &r, &tau).unwrap().passed());
            let b = betti(&twisted_tensor(&c, &r, &tau, 6, BUDGET).unwrap()).unwrap();
            let nonzero: Vec<_> = b.dims().into_iter().filter(|(_, d)| *d > 0).collect();
            assert_eq!(nonzero, vec![((0, 0), 1)], "odd = {odd}");
        }
    }

    #[test]
    fn zero_cochain_is_twisting() {
        let (c, r, tau) = standard_cochain(true, 4).unwrap();
        let zero: Vec<CommPoly> = tau.iter().map(|p| CommPoly::zero(p.table())).collect();
        assert!(verify_cochain(&c, &r, &zero).unwrap().passed());
    }

    #[test]
    fn tau_one_one_twisted_tensor_is_a_complex() {
        let f = BarCochain::dual_numbers(4).unwrap();
        let tau = tau_rn(&f, 1, 1).unwrap();
        let (coalg, taus) = tau.coalgebra(4, BUDGET).unwrap();
        let c = twisted_tensor(&coalg, tau.mats.cdga(), &taus, 4, BUDGET).unwrap();
        betti(&c).unwrap();
    }
}
