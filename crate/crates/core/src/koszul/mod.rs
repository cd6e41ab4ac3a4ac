//! Koszul-duality machinery at small scale: finite-dimensional augmented
//! algebras, their reduced Connes complexes, Chevalley–Eilenberg complexes
//! of matrix Lie algebras over them, and twisting cochains.

mod ce;
mod twist;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

pub use ce::{ce_complex, ce_differential, lqt_theta, theta_chain_map_violations, GlAlgebra};
pub use twist::{
    bar_words, ce_coalgebra, standard_cochain, tau_rn, twisted_tensor, verify_bar_cochain, verify_cochain,
    verify_tau_rn, BarCochain, FiniteCoalgebra, McReport, TauRn,
};

use crate::cyclic::{canonical_cyclic, cyclic_basis_of, project_to_cyclic, CyclicWord};
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator, Letter, NcPoly};
use crate::homology::{Cell, TruncatedComplex};
use crate::presentation::Builtin;
use crate::scalar::{sign, Scalar};

/// `A = k ⊕ Ā` with `Ā` finite-dimensional, given by structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGradedAlgebra {
    name: String,
    /// Basis of `Ā`, in canonical `(weight, hdeg, name)` order.
    basis: Vec<Generator>,
    products: HashMap<(Letter, Letter), Vec<(Letter, Scalar)>>,
    /// The same basis, suspended by one homological degree.
    suspended: Arc<Alphabet>,
}

/// Nonzero products `((i, j), [(k, c_k)])` meaning `b_i b_j = Σ c_k b_k`.
pub type ProductTable = Vec<((usize, usize), Vec<(usize, Scalar)>)>;

impl FiniteGradedAlgebra {
    /// `products` lists nonzero products `b_i b_j = Σ c_k b_k` by input index.
    pub fn new(name: impl Into<String>, basis: Vec<Generator>, products: ProductTable) -> Result<Self> {
        let suspended = Alphabet::new(
            basis
                .iter()
                .map(|g| Generator::new(g.name.clone(), g.hdeg + 1, g.weight))
                .collect(),
        )?;
        let pos: Vec<Letter> = basis
            .iter()
            .map(|g| suspended.position(&g.name).expect("same names"))
            .collect();
        let mut sorted = basis.clone();
        for (i, g) in basis.iter().enumerate() {
            sorted[pos[i] as usize] = g.clone();
        }
        let mut table: HashMap<(Letter, Letter), Vec<(Letter, Scalar)>> = HashMap::new();
        for ((i, j), terms) in products {
            let get = |k: usize| {
                pos.get(k)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("basis index {k} out of range")))
            };
            let key = (get(i)?, get(j)?);
            let mut out: BTreeMap<Letter, Scalar> = BTreeMap::new();
            for (k, c) in terms {
                let g = &basis[k.min(basis.len().saturating_sub(1))];
                let lhs = (&basis[i], &basis[j]);
                if k >= basis.len() || g.weight != lhs.0.weight + lhs.1.weight || g.hdeg != lhs.0.hdeg + lhs.1.hdeg {
                    return Err(Error::Degree {
                        name: format!("{}*{}", lhs.0.name, lhs.1.name),
                        msg: "product does not respect the grading".into(),
                    });
                }
                *out.entry(get(k)?).or_insert_with(Scalar::zero) += c;
            }
            out.retain(|_, c| !c.is_zero());
            if !out.is_empty() {
                table.insert(key, out.into_iter().collect());
            }
        }
        let alg = FiniteGradedAlgebra {
            name: name.into(),
            basis: sorted,
            products: table,
            suspended: Arc::new(suspended),
        };
        if let Some((a, b, c)) = alg.associativity_violation() {
            return Err(Error::InvalidArgument(format!(
                "multiplication is not associative on ({a}, {b}, {c})"
            )));
        }
        Ok(alg)
    }

    /// `k[x]/(x^{m+1})` with `deg x = (0, 1)`.
    pub fn truncated(m: u32) -> Self {
        let name = |i: u32| if i == 1 { "x".to_string() } else { format!("x^{i}") };
        let basis = (1..=m).map(|i| Generator::new(name(i), 0, i)).collect();
        let mut products = Vec::new();
        for i in 1..=m {
            for j in 1..=m - i {
                products.push((
                    ((i - 1) as usize, (j - 1) as usize),
                    vec![((i + j - 1) as usize, Scalar::one())],
                ));
            }
        }
        let label = if m == 1 {
            "dual-numbers".into()
        } else {
            format!("truncated:{m}")
        };
        Self::new(label, basis, products).expect("valid by construction")
    }

    pub fn dual_numbers() -> Self {
        Self::truncated(1)
    }

    /// `k[x_1..x_d]/(x_1..x_d)^2`.
    pub fn square_zero(d: u32) -> Self {
        let basis = (1..=d).map(|i| Generator::new(format!("x{i}"), 0, 1)).collect();
        Self::new(format!("square-zero:{d}"), basis, Vec::new()).expect("valid by construction")
    }

    /// `dual-numbers`, `square-zero:d` or `truncated:m`.
    pub fn from_name(spec: &str) -> Result<Self> {
        match Builtin::parse(spec)? {
            Builtin::DualNumbers => Ok(Self::dual_numbers()),
            Builtin::SquareZero(d) => Ok(Self::square_zero(d)),
            Builtin::Truncated(m) => Ok(Self::truncated(m)),
            _ => Err(Error::InvalidArgument(format!(
                "`{spec}` is not a finite-dimensional algebra"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    /// Basis of `Ā[1]` as an alphabet; words are tensors of suspended elements.
    pub fn suspended(&self) -> &Arc<Alphabet> {
        &self.suspended
    }

    pub fn product(&self, a: Letter, b: Letter) -> &[(Letter, Scalar)] {
        self.products.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether every basis element sits in homological degree 0.
    pub fn is_ungraded(&self) -> bool {
        self.basis.iter().all(|g| g.hdeg == 0)
    }

    fn mul_vec(&self, u: &BTreeMap<Letter, Scalar>, b: Letter, left: bool) -> BTreeMap<Letter, Scalar> {
        let mut out: BTreeMap<Letter, Scalar> = BTreeMap::new();
        for (a, c) in u {
            let p = if left { self.product(*a, b) } else { self.product(b, *a) };
            for (k, v) in p {
                *out.entry(*k).or_insert_with(Scalar::zero) += c * v;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn associativity_violation(&self) -> Option<(String, String, String)> {
        let n = self.dim() as Letter;
        for a in 0..n {
            for b in 0..n {
                let ab: BTreeMap<Letter, Scalar> = self.product(a, b).iter().cloned().collect();
                for c in 0..n {
                    let lhs = self.mul_vec(&ab, c, true);
                    let bc: BTreeMap<Letter, Scalar> = self.product(b, c).iter().cloned().collect();
                    let rhs = self.mul_vec(&bc, a, false);
                    if lhs != rhs {
                        let nm = |l: Letter| self.basis[l as usize].name.clone();
                        return Some((nm(a), nm(b), nm(c)));
                    }
                }
            }
        }
        None
    }

    /// `(-1)^{|s a_0| + … + |s a_{i-1}| + |a_i|}`, the sign of contracting
    /// positions `i, i+1` of a suspended tensor.
    fn contraction_sign(&self, w: &[Letter], i: usize) -> Scalar {
        let before: i32 = w[..i].iter().map(|&l| self.basis[l as usize].hdeg + 1).sum();
        sign((before + self.basis[w[i] as usize].hdeg).rem_euclid(2) == 1)
    }

    /// The bar differential `b'`: contract adjacent pairs, no wrap-around term.
    pub fn bar_differential(&self, w: &[Letter]) -> NcPoly {
        let mut out = NcPoly::zero(&self.suspended);
        for i in 0..w.len().saturating_sub(1) {
            let s = self.contraction_sign(w, i);
            for (k, c) in self.product(w[i], w[i + 1]) {
                let mut nw = Vec::with_capacity(w.len() - 1);
                nw.extend_from_slice(&w[..i]);
                nw.push(*k);
                nw.extend_from_slice(&w[i + 2..]);
                out.add_term(nw, c * &s);
            }
        }
        out
    }

    /// The Hochschild differential `b = b' + (wrap-around term)`, where the
    /// wrap term contracts the last factor onto the first after a signed rotation.
    pub fn hochschild_b(&self, w: &[Letter]) -> Result<NcPoly> {
        let mut out = self.bar_differential(w);
        if w.len() >= 2 {
            let (rot, s) = crate::cyclic::rotate(&self.suspended, w)?;
            let s0 = self.contraction_sign(&rot, 0);
            for (k, c) in self.product(rot[0], rot[1]) {
                let mut nw = Vec::with_capacity(w.len() - 1);
                nw.push(*k);
                nw.extend_from_slice(&rot[2..]);
                out.add_term(nw, c * &s * &s0);
            }
        }
        Ok(out)
    }

    /// `b` on a cyclic word, in the good-word basis.
    pub fn cyclic_b(&self, cw: &CyclicWord) -> Result<BTreeMap<CyclicWord, Scalar>> {
        Ok(project_to_cyclic(&self.hochschild_b(&cw.word)?))
    }
}

/// The reduced cyclic complex `CC̄(A)` together with its word bases.
///
/// A cyclic tensor `a_0 ⊗ … ⊗ a_k` is stored as the cyclic word in the
/// suspended letters `s a_i`; its cyclic degree is one less than the
/// homological degree of that word.
#[derive(Debug, Clone)]
pub struct ConnesComplex {
    pub complex: TruncatedComplex,
    /// Basis of each `(cyclic degree, weight)` cell.
    pub words: BTreeMap<(i32, u32), Vec<CyclicWord>>,
}

pub fn connes_complex(alg: &FiniteGradedAlgebra, max_k: Option<u32>, max_weight: u32) -> Result<ConnesComplex> {
    let a = alg.suspended();
    let mut words: BTreeMap<(i32, u32), Vec<CyclicWord>> = BTreeMap::new();
    for ((h, w), ws) in cyclic_basis_of(a, max_weight) {
        let kept: Vec<CyclicWord> = ws
            .into_iter()
            .filter(|cw| max_k.is_none_or(|k| cw.word.len() as u32 <= k + 1))
            .collect();
        if !kept.is_empty() {
            words.insert((h - 1, w), kept);
        }
    }
    let index: HashMap<&CyclicWord, usize> = words
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, cw)| (cw, i)))
        .collect();
    let built: Vec<((i32, u32), Cell)> = words
        .par_iter()
        .map(|(&(h, w), ws)| {
            let rows = ws
                .iter()
                .map(|cw| {
                    let mut row: Vec<(usize, Scalar)> = Vec::new();
                    for (t, c) in alg.cyclic_b(cw)? {
                        let i = index
                            .get(&t)
                            .ok_or_else(|| Error::Inconsistent(format!("cyclic tensor {} missing", t.render(a))))?;
                        row.push((*i, c));
                    }
                    row.sort_by_key(|(i, _)| *i);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let labels = ws.iter().map(|cw| cw.render(a)).collect();
            Ok(((h, w), Cell::new(labels, rows)))
        })
        .collect::<Result<_>>()?;
    let mut complex = match max_k {
        Some(k) if alg.is_ungraded() => TruncatedComplex::with_hdeg_cap(max_weight, k as i32),
        _ => TruncatedComplex::new(max_weight),
    };
    for ((h, w), cell) in built {
        complex.insert_cell(h, w, cell);
    }
    Ok(ConnesComplex { complex, words })
}

/// Class of a tensor in the cyclic coinvariants, or `None` if it vanishes there.
pub fn cyclic_class(alg: &FiniteGradedAlgebra, w: &[Letter]) -> Result<Option<(CyclicWord, Scalar)>> {
    canonical_cyclic(alg.suspended(), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{betti, euler_of_complex};

    #[test]
    fn algebra_constructors() {
        let t = FiniteGradedAlgebra::truncated(3);
        assert_eq!(t.dim(), 3);
        let x = t.suspended().position("x").unwrap();
        let x2 = t.suspended().position("x^2").unwrap();
        assert_eq!(t.product(x, x), &[(x2, Scalar::one())]);
        assert!(t.product(x2, x2).is_empty());
        assert_eq!(FiniteGradedAlgebra::from_name("square-zero:1").unwrap().dim(), 1);
        assert!(FiniteGradedAlgebra::from_name("sandwich").is_err());
    }

    #[test]
    fn rejects_non_associative_tables() {
        let basis = vec![
            Generator::new("a", 0, 1),
            Generator::new("b", 0, 2),
            Generator::new("c", 0, 3),
        ];
        // a*a = b, a*b = c, b*a = 0: (a a) a = b a = 0 but a (a a) = a b = c
        let products = vec![((0, 0), vec![(1, Scalar::one())]), ((0, 1), vec![(2, Scalar::one())])];
        assert!(FiniteGradedAlgebra::new("bad", basis, products).is_err());
    }

    #[test]
    fn dual_numbers_cyclic_homology() {
        let c = connes_complex(&FiniteGradedAlgebra::dual_numbers(), None, 9).unwrap();
        let b = betti(&c.complex).unwrap();
        for ((h, w), cell) in b.cells() {
            let expect = usize::from(h % 2 == 0 && *w == (*h as u32) + 1);
            assert_eq!(cell.dim, expect, "(h={h}, w={w})");
        }
        assert_eq!(b.get(8, 9), 1);
    }

    #[test]
    fn square_zero_has_zero_differential() {
        let alg = FiniteGradedAlgebra::square_zero(2);
        let c = connes_complex(&alg, None, 6).unwrap();
        assert!(c
            .complex
            .cells()
            .all(|(_, cell)| cell.differential.iter().all(Vec::is_empty)));
        // two letters, one of each: the single good word [x1*x2]
        assert_eq!(c.complex.dim(1, 2), 1);
    }

    #[test]
    fn truncated_euler_characteristics() {
        // even minus odd cyclic homology in weight n is 1 unless (m+1) | n
        for m in 1..=3u32 {
            let c = connes_complex(&FiniteGradedAlgebra::truncated(m), None, 9).unwrap();
            c.complex.check_d_squared().unwrap();
            let e = euler_of_complex(&c.complex);
            for n in 1..=9 {
                let expect = i64::from(n % (m + 1) != 0);
                assert_eq!(e.get(&n).copied().unwrap_or(0), expect, "m={m}, n={n}");
            }
        }
    }

    #[test]
    fn hochschild_b_squares_to_zero_on_tensors() {
        let alg = FiniteGradedAlgebra::truncated(3);
        let a = alg.suspended().clone();
        for w in crate::cyclic::words_up_to(&a, 6)
            .into_iter()
            .flatten()
            .filter(|w| !w.is_empty())
        {
            let bw = alg.hochschild_b(&w).unwrap();
            let mut bb = NcPoly::zero(&a);
            for (u, c) in bw.terms() {
                bb.add_assign_scaled(&alg.hochschild_b(u).unwrap(), c).unwrap();
            }
            assert!(bb.is_zero(), "b^2 on {}", a.render_word(&w));
            let mut bb = NcPoly::zero(&a);
            for (u, c) in alg.bar_differential(&w).terms() {
                bb.add_assign_scaled(&alg.bar_differential(u), c).unwrap();
            }
            assert!(bb.is_zero(), "b'^2 on {}", a.render_word(&w));
        }
    }

    #[test]
    fn empty_algebra_gives_empty_complex() {
        let alg = FiniteGradedAlgebra::new("k", Vec::new(), Vec::new()).unwrap();
        assert_eq!(connes_complex(&alg, None, 5).unwrap().complex.cells().count(), 0);
    }
}
