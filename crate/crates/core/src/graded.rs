//! Bigraded generators, words and the free (noncommutative) algebra on them.
//!
//! Every generator carries a homological degree `hdeg` (its parity drives the
//! Koszul sign rule) and a positive polynomial `weight`. Generators of an
//! [`Alphabet`] are kept sorted by `(weight, hdeg, name)`; a [`Word`] is a
//! sequence of indices into that order, so comparing words as vectors is the
//! lexicographic order induced by the generator order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub hdeg: i32,
    pub weight: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, hdeg: i32, weight: u32) -> Self {
        Generator {
            name: name.into(),
            hdeg,
            weight,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.hdeg.rem_euclid(2) == 1
    }
}

pub type Letter = u32;

/// A word in the free algebra: indices into an [`Alphabet`].
pub type Word = Vec<Letter>;

/// An ordered set of generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
    odd: Vec<bool>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    /// Sorts the generators into canonical order; names must be distinct.
    pub fn new(mut gens: Vec<Generator>) -> Result<Self> {
        gens.sort_by(|a, b| (a.weight, a.hdeg, &a.name).cmp(&(b.weight, b.hdeg, &b.name)));
        let mut index = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        let odd = gens.iter().map(Generator::is_odd).collect();
        Ok(Alphabet { gens, odd, index })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, i: Letter) -> &Generator {
        &self.gens[i as usize]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn position(&self, name: &str) -> Option<Letter> {
        self.index.get(name).map(|&i| i as Letter)
    }

    #[inline]
    pub fn is_odd(&self, i: Letter) -> bool {
        self.odd[i as usize]
    }

    pub fn word_hdeg(&self, w: &[Letter]) -> i32 {
        w.iter().map(|&l| self.gens[l as usize].hdeg).sum()
    }

    pub fn word_weight(&self, w: &[Letter]) -> u32 {
        w.iter().map(|&l| self.gens[l as usize].weight).sum()
    }

    pub fn word_is_odd(&self, w: &[Letter]) -> bool {
        w.iter().filter(|&&l| self.odd[l as usize]).count() % 2 == 1
    }

    pub fn render_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&l| self.gens[l as usize].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Koszul sign of a reordering.
///
/// `perm[k]` is the original position of the element that ends up at position
/// `k`; `parities[i]` is the parity (0 or 1) of the element originally at
/// position `i`. The result is `(-1)^m` with `m` the number of odd-odd pairs
/// whose relative order is reversed.
pub fn koszul_sign(perm: &[usize], parities: &[u8]) -> Result<Scalar> {
    if perm.len() != parities.len() {
        return Err(Error::LengthMismatch {
            left: perm.len(),
            right: parities.len(),
        });
    }
    let k = perm.len();
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mut m = 0usize;
    for a in 0..k {
        for b in a + 1..k {
            if perm[a] > perm[b] && parities[perm[a]] % 2 == 1 && parities[perm[b]] % 2 == 1 {
                m += 1;
            }
        }
    }
    Ok(crate::scalar::sign(m % 2 == 1))
}

/// An element of the free algebra on an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPoly {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, Scalar>,
}

impl NcPoly {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        NcPoly {
            alphabet: Arc::clone(alphabet),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        Self::monomial(alphabet, Vec::new(), Scalar::one())
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, word: Word, coeff: Scalar) -> Self {
        let mut p = Self::zero(alphabet);
        p.add_term(word, coeff);
        p
    }

    pub fn generator(alphabet: &Arc<Alphabet>, letter: Letter) -> Self {
        Self::monomial(alphabet, vec![letter], Scalar::one())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn same_alphabet(&self, other: &NcPoly) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Letter]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &NcPoly, c: &Scalar) -> Result<()> {
        if !self.same_alphabet(other) {
            return Err(Error::AlphabetMismatch);
        }
        for (w, a) in &other.terms {
            self.add_term(w.clone(), a * c);
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Scalar::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> NcPoly {
        let mut out = NcPoly::zero(&self.alphabet);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// Concatenation product; no signs arise.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        if !self.same_alphabet(other) {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = NcPoly::zero(&self.alphabet);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = Vec::with_capacity(u.len() + v.len());
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        Ok(out)
    }

    /// `(hdeg, weight)` if every term shares it; `None` for zero or mixed.
    pub fn bidegree(&self) -> Option<(i32, u32)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let deg = (self.alphabet.word_hdeg(first), self.alphabet.word_weight(first));
        it.all(|w| (self.alphabet.word_hdeg(w), self.alphabet.word_weight(w)) == deg)
            .then_some(deg)
    }

    /// Applies the derivation sending letter `l` to `images[l]`.
    ///
    /// For an odd derivation the term acting on position `i` carries the sign
    /// `(-1)^{hdeg of the letters before i}`.
    pub fn derive(&self, images: &[NcPoly], odd: bool) -> Result<NcPoly> {
        let mut out = NcPoly::zero(&self.alphabet);
        for (w, c) in &self.terms {
            let mut prefix_odd = false;
            for (i, &l) in w.iter().enumerate() {
                let img = &images[l as usize];
                if !img.same_alphabet(self) {
                    return Err(Error::AlphabetMismatch);
                }
                let coeff = if odd && prefix_odd { -c.clone() } else { c.clone() };
                for (v, a) in &img.terms {
                    let mut nw = Vec::with_capacity(w.len() + v.len());
                    nw.extend_from_slice(&w[..i]);
                    nw.extend_from_slice(v);
                    nw.extend_from_slice(&w[i + 1..]);
                    out.add_term(nw, a * &coeff);
                }
                if self.alphabet.is_odd(l) {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        Ok(out)
    }

    /// Canonical text form: `*`-joined names, `p/q` coefficients, ` + `/` - ` joins.
    pub fn render(&self) -> String {
        render_terms(self.terms.iter().map(|(w, c)| (self.alphabet.render_word(w), c)))
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Shared renderer: `(monomial text, coefficient)` pairs, monomial `"1"` for the unit.
pub(crate) fn render_terms<'a>(terms: impl Iterator<Item = (String, &'a Scalar)>) -> String {
    let mut out = String::new();
    for (i, (mono, c)) in terms.enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let abs = c.abs();
        if mono == "1" {
            out.push_str(&fmt_scalar(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&fmt_scalar(&abs));
            out.push('*');
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(vec![Generator::new("y", 0, 1), Generator::new("x", 0, 1)]).unwrap())
    }

    #[test]
    fn koszul_sign_basic_cases() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]).unwrap(), int(1));
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), int(-1));
        assert_eq!(koszul_sign(&[1, 0], &[0, 1]).unwrap(), int(1));
        assert!(matches!(koszul_sign(&[1, 0], &[1]), Err(Error::LengthMismatch { .. })));
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
    }

    #[test]
    fn alphabet_is_sorted_by_weight_hdeg_name() {
        let a = Alphabet::new(vec![
            Generator::new("t", 1, 2),
            Generator::new("y", 0, 1),
            Generator::new("x", 0, 1),
        ])
        .unwrap();
        let names: Vec<_> = a.generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["x", "y", "t"]);
        assert!(Alphabet::new(vec![Generator::new("x", 0, 1), Generator::new("x", 1, 2)]).is_err());
    }

    #[test]
    fn nc_products() {
        let a = ab();
        let x = NcPoly::generator(&a, a.position("x").unwrap());
        let y = NcPoly::generator(&a, a.position("y").unwrap());
        assert_eq!(x.mul(&y).unwrap().render(), "x*y");
        let s = x.add(&y).unwrap().mul(&x).unwrap();
        assert_eq!(s.render(), "x*x + y*x");
        assert!(NcPoly::zero(&a).mul(&x).unwrap().is_zero());
        let other = Arc::new(Alphabet::new(vec![Generator::new("x", 0, 1)]).unwrap());
        assert_eq!(x.mul(&NcPoly::generator(&other, 0)), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn rendering_of_coefficients() {
        let a = ab();
        let mut p = NcPoly::zero(&a);
        p.add_term(vec![0, 1], int(-2));
        p.add_term(vec![1], Scalar::new(1.into(), 2.into()));
        p.add_term(vec![], int(3));
        assert_eq!(p.render(), "3 - 2*x*y + 1/2*y");
        assert_eq!(NcPoly::zero(&a).render(), "0");
    }
}
