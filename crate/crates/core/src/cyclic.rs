//! Signed cyclic rotation, the norm operator, cyclic derivatives and the
//! cyclic quotient `C(R) = R̄ / [R, R]` of a free DG algebra.
//!
//! A word is *bad* when some rotation returns it with a minus sign; bad words
//! lie in the span of graded commutators. Good words, taken up to rotation,
//! form a basis of the cyclic quotient. The representative of a class is its
//! lexicographically least rotation; for words with rotational symmetry the
//! smallest rotation index realizing it is used.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::{Alphabet, Letter, NcPoly, Word};
use crate::homology::{Cell, SparseVec, TruncatedComplex};
use crate::presentation::DgaPresentation;
use crate::scalar::{sign, Scalar};

/// One rotation step: the last letter moves to the front with its Koszul sign.
pub fn rotate(a: &Alphabet, w: &[Letter]) -> Result<(Word, Scalar)> {
    let (&last, rest) = w.split_last().ok_or(Error::EmptyWord)?;
    let neg = a.is_odd(last) && a.word_is_odd(rest);
    let mut out = Vec::with_capacity(w.len());
    out.push(last);
    out.extend_from_slice(rest);
    Ok((out, sign(neg)))
}

/// All rotations `τ^k w` for `k = 0..len`, as `(word, negative?)`.
fn rotations(a: &Alphabet, w: &[Letter]) -> Vec<(Word, bool)> {
    let n = w.len();
    let mut out = Vec::with_capacity(n);
    let mut cur = w.to_vec();
    let mut neg = false;
    for _ in 0..n {
        out.push((cur.clone(), neg));
        let (&last, rest) = cur.split_last().expect("nonempty");
        if a.is_odd(last) && a.word_is_odd(rest) {
            neg = !neg;
        }
        cur.rotate_right(1);
    }
    out
}

/// `τ` extended linearly; the empty word is fixed.
pub fn rotate_poly(p: &NcPoly) -> NcPoly {
    let a = p.alphabet();
    let mut out = NcPoly::zero(a);
    for (w, c) in p.terms() {
        if w.is_empty() {
            out.add_term(Vec::new(), c.clone());
        } else {
            let (r, s) = rotate(a, w).expect("nonempty");
            out.add_term(r, c * s);
        }
    }
    out
}

/// `N = 1 + τ + ... + τ^{n-1}` on words of length `n`, with `N(1) = 1`.
pub fn norm_operator(a: &Arc<Alphabet>, w: &[Letter]) -> NcPoly {
    let mut out = NcPoly::zero(a);
    if w.is_empty() {
        out.add_term(Vec::new(), Scalar::one());
        return out;
    }
    for (r, neg) in rotations(a, w) {
        out.add_term(r, sign(neg));
    }
    out
}

pub fn norm_poly(p: &NcPoly) -> NcPoly {
    let a = p.alphabet();
    let mut out = NcPoly::zero(a);
    for (w, c) in p.terms() {
        out.add_assign_scaled(&norm_operator(a, w), c).expect("same alphabet");
    }
    out
}

/// `T_x(x w) = w`, zero on words not starting with `x`.
pub fn partial_trace(p: &NcPoly, x: Letter) -> NcPoly {
    let mut out = NcPoly::zero(p.alphabet());
    for (w, c) in p.terms() {
        if w.first() == Some(&x) {
            out.add_term(w[1..].to_vec(), c.clone());
        }
    }
    out
}

/// The cyclic derivative `∂/∂x = T_x ∘ N`.
pub fn cyclic_derivative(p: &NcPoly, x: Letter) -> NcPoly {
    partial_trace(&norm_poly(p), x)
}

/// A basis element of the cyclic quotient: a good word in canonical position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    pub word: Word,
    pub hdeg: i32,
    pub weight: u32,
}

impl CyclicWord {
    pub fn is_odd(&self) -> bool {
        self.hdeg.rem_euclid(2) == 1
    }

    pub fn render(&self, a: &Alphabet) -> String {
        format!("[{}]", a.render_word(&self.word))
    }
}

/// Canonical class of `w` in the cyclic quotient.
///
/// `None` if `w` is bad; otherwise the representative and the sign `s` with
/// `w ≡ s · representative`.
pub fn canonical_cyclic(a: &Alphabet, w: &[Letter]) -> Result<Option<(CyclicWord, Scalar)>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let rots = rotations(a, w);
    // bad iff some rotation returns the same word with the opposite sign
    if rots.iter().any(|(r, neg)| *neg && r.as_slice() == w) {
        return Ok(None);
    }
    let (best, neg) = rots
        .iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| x.0.cmp(&y.0).then(i.cmp(j)))
        .map(|(_, r)| r.clone())
        .expect("nonempty");
    let cw = CyclicWord {
        hdeg: a.word_hdeg(&best),
        weight: a.word_weight(&best),
        word: best,
    };
    Ok(Some((cw, sign(neg))))
}

/// Whether `w` is good and already its own representative.
pub fn is_canonical_good(a: &Alphabet, w: &[Letter]) -> bool {
    match canonical_cyclic(a, w) {
        Ok(Some((cw, s))) => cw.word == w && s.is_one(),
        _ => false,
    }
}

/// Image of an element in the cyclic quotient, keyed by representative.
pub fn project_to_cyclic(p: &NcPoly) -> BTreeMap<CyclicWord, Scalar> {
    let a = p.alphabet();
    let mut out: BTreeMap<CyclicWord, Scalar> = BTreeMap::new();
    for (w, c) in p.terms() {
        if w.is_empty() {
            continue;
        }
        if let Some((cw, s)) = canonical_cyclic(a, w).expect("nonempty") {
            let e = out.entry(cw).or_insert_with(Scalar::zero);
            *e += c * s;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Every word of weight `1..=max_weight`, grouped by weight.
pub fn words_up_to(a: &Alphabet, max_weight: u32) -> Vec<Vec<Word>> {
    let mut by_weight: Vec<Vec<Word>> = vec![Vec::new(); max_weight as usize + 1];
    by_weight[0].push(Vec::new());
    for w in 1..=max_weight {
        let mut cur = Vec::new();
        for l in 0..a.len() as Letter {
            let gw = a.get(l).weight;
            if gw > w {
                continue;
            }
            for prefix in &by_weight[(w - gw) as usize] {
                let mut nw = prefix.clone();
                nw.push(l);
                cur.push(nw);
            }
        }
        cur.sort();
        by_weight[w as usize] = cur;
    }
    by_weight
}

/// Good cyclic words of weight `1..=max_weight`, keyed by `(hdeg, weight)`.
pub fn cyclic_basis(pres: &DgaPresentation, max_weight: u32) -> Result<BTreeMap<(i32, u32), Vec<CyclicWord>>> {
    pres.ensure_weight(max_weight)?;
    Ok(cyclic_basis_of(pres.alphabet(), max_weight))
}

pub(crate) fn cyclic_basis_of(a: &Alphabet, max_weight: u32) -> BTreeMap<(i32, u32), Vec<CyclicWord>> {
    let words = words_up_to(a, max_weight);
    let found: Vec<CyclicWord> = words
        .into_par_iter()
        .skip(1)
        .flat_map_iter(|ws| {
            ws.into_iter()
                .filter(|w| is_canonical_good(a, w))
                .map(|w| CyclicWord {
                    hdeg: a.word_hdeg(&w),
                    weight: a.word_weight(&w),
                    word: w,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out: BTreeMap<(i32, u32), Vec<CyclicWord>> = BTreeMap::new();
    for cw in found {
        out.entry((cw.hdeg, cw.weight)).or_default().push(cw);
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// Differential of one cyclic word, expressed in the cyclic basis.
pub fn cyclic_differential(pres: &DgaPresentation, cw: &CyclicWord) -> Result<BTreeMap<CyclicWord, Scalar>> {
    let p = NcPoly::monomial(pres.alphabet(), cw.word.clone(), Scalar::one());
    Ok(project_to_cyclic(&pres.extend_derivation(&p)?))
}

/// The cyclic complex `C(R)` in weights `1..=max_weight`.
pub fn cyclic_complex(pres: &DgaPresentation, max_weight: u32) -> Result<TruncatedComplex> {
    let basis = cyclic_basis(pres, max_weight)?;
    let index: HashMap<&CyclicWord, usize> = basis
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, cw)| (cw, i)))
        .collect();
    let cells: Vec<Result<(i32, u32, Cell)>> = basis
        .par_iter()
        .map(|(&(h, w), words)| {
            let mut rows = Vec::with_capacity(words.len());
            for cw in words {
                let mut row: SparseVec = Vec::new();
                for (t, c) in cyclic_differential(pres, cw)? {
                    let j = index.get(&t).ok_or_else(|| {
                        Error::Inconsistent(format!(
                            "d{} hits {} outside the basis",
                            cw.render(pres.alphabet()),
                            t.render(pres.alphabet())
                        ))
                    })?;
                    row.push((*j, c));
                }
                row.sort_by_key(|(i, _)| *i);
                rows.push(row);
            }
            let labels = words.iter().map(|cw| cw.render(pres.alphabet())).collect();
            Ok((h, w, Cell::new(labels, rows)))
        })
        .collect();
    let mut c = TruncatedComplex::new(max_weight);
    for cell in cells {
        let (h, w, cell) = cell?;
        c.insert_cell(h, w, cell);
    }
    Ok(c)
}
