//! Free DG algebras given by generators and a differential on generators,
//! their text format, and the built-in resolutions.

mod builtins;
mod parse;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator, Letter, NcPoly};

pub use builtins::{builtin_census, builtin_resolution, Builtin};
pub use parse::{parse_any, parse_presentation, parse_scalar_poly, ParsedPresentation};

/// Which homological degrees a presentation may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeConvention {
    /// Connective algebras: `hdeg >= 0` and `d = 0` on degree-0 generators.
    NonNegative,
    /// Total degrees of a bicomplex; negative degrees allowed.
    Total,
}

/// A free DG algebra `k<V>` with `d` given on the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgaPresentation {
    alphabet: Arc<Alphabet>,
    diff: Vec<NcPoly>,
    convention: DegreeConvention,
    complete_to_weight: Option<u32>,
    name: Option<String>,
}

impl DgaPresentation {
    /// Validates degrees and weights. `diff[l]` is the differential of letter `l`.
    pub fn new(
        alphabet: Arc<Alphabet>,
        diff: Vec<NcPoly>,
        convention: DegreeConvention,
        complete_to_weight: Option<u32>,
    ) -> Result<Self> {
        if diff.len() != alphabet.len() {
            return Err(Error::LengthMismatch {
                left: diff.len(),
                right: alphabet.len(),
            });
        }
        for (g, p) in alphabet.generators().iter().zip(&diff) {
            validate_generator(g, p, &alphabet, convention)?;
        }
        Ok(DgaPresentation {
            alphabet,
            diff,
            convention,
            complete_to_weight,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn generators(&self) -> &[Generator] {
        self.alphabet.generators()
    }

    pub fn diff(&self) -> &[NcPoly] {
        &self.diff
    }

    pub fn diff_of(&self, l: Letter) -> &NcPoly {
        &self.diff[l as usize]
    }

    pub fn convention(&self) -> DegreeConvention {
        self.convention
    }

    pub fn complete_to_weight(&self) -> Option<u32> {
        self.complete_to_weight
    }

    /// Fails when `weight` is past the declared completeness bound.
    pub fn ensure_weight(&self, weight: u32) -> Result<()> {
        match self.complete_to_weight {
            Some(bound) if weight > bound => Err(Error::BeyondCompleteness {
                requested: weight,
                bound,
            }),
            _ => Ok(()),
        }
    }

    /// The Leibniz extension of `d` to an arbitrary element.
    pub fn extend_derivation(&self, p: &NcPoly) -> Result<NcPoly> {
        p.derive(&self.diff, true)
    }

    /// `d(d(g))` for every generator of weight at most `max_weight`.
    pub fn verify_d_squared(&self, max_weight: u32) -> Result<DSquaredReport> {
        self.ensure_weight(max_weight)?;
        let mut report = DSquaredReport {
            checked: 0,
            violations: Vec::new(),
        };
        for (g, p) in self.generators().iter().zip(&self.diff) {
            if g.weight > max_weight {
                continue;
            }
            report.checked += 1;
            let dd = self.extend_derivation(p)?;
            if !dd.is_zero() {
                report.violations.push((g.name.clone(), dd.render()));
            }
        }
        Ok(report)
    }

    /// Signed generator count per weight: even minus odd.
    pub fn weight_census(&self) -> GeneratorCensus {
        let mut c = GeneratorCensus::default();
        for g in self.generators() {
            *c.coeffs.entry(g.weight).or_default() += if g.is_odd() { -1 } else { 1 };
        }
        c.coeffs.retain(|_, v| *v != 0);
        c.known_to = self.complete_to_weight;
        c
    }

    /// Canonical text form in the presentation file format. Two files that
    /// differ only in comments, spacing or line order render identically.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(w) = self.complete_to_weight {
            let _ = writeln!(out, "complete-to-weight {w}");
        }
        for g in self.generators() {
            let _ = writeln!(out, "generator {} hdeg {} weight {}", g.name, g.hdeg, g.weight);
        }
        for (g, p) in self.generators().iter().zip(&self.diff) {
            if !p.is_zero() {
                let _ = writeln!(out, "d {} = {}", g.name, p.render());
            }
        }
        out
    }
}

fn validate_generator(g: &Generator, p: &NcPoly, alphabet: &Arc<Alphabet>, convention: DegreeConvention) -> Result<()> {
    let err = |msg: String| Error::Degree {
        name: g.name.clone(),
        msg,
    };
    if g.weight == 0 {
        return Err(err("weight must be positive".into()));
    }
    if convention == DegreeConvention::NonNegative && g.hdeg < 0 {
        return Err(err("negative homological degree".into()));
    }
    if !p.same_alphabet(&NcPoly::zero(alphabet)) {
        return Err(Error::AlphabetMismatch);
    }
    if convention == DegreeConvention::NonNegative && g.hdeg == 0 && !p.is_zero() {
        return Err(err("generators of degree 0 must have zero differential".into()));
    }
    for (w, _) in p.terms() {
        let (h, wt) = (alphabet.word_hdeg(w), alphabet.word_weight(w));
        if wt != g.weight {
            return Err(err(format!(
                "weight mismatch: term {} has weight {wt}, expected {}",
                alphabet.render_word(w),
                g.weight
            )));
        }
        if h != g.hdeg - 1 {
            return Err(err(format!(
                "hdeg mismatch: term {} has hdeg {h}, expected {}",
                alphabet.render_word(w),
                g.hdeg - 1
            )));
        }
    }
    Ok(())
}

/// Generators whose `d∘d` does not vanish, with the rendered value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSquaredReport {
    pub checked: usize,
    pub violations: Vec<(String, String)>,
}

impl DSquaredReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `d_i` = (#even generators of weight i) - (#odd generators of weight i).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorCensus {
    pub coeffs: BTreeMap<u32, i64>,
    /// Weight up to which the census is known to be complete, if bounded.
    pub known_to: Option<u32>,
}

impl GeneratorCensus {
    pub fn get(&self, weight: u32) -> i64 {
        self.coeffs.get(&weight).copied().unwrap_or(0)
    }

    /// `d_1, ..., d_max` as a vector indexed from weight 1.
    pub fn to_vec(&self, max: u32) -> Vec<i64> {
        (1..=max).map(|i| self.get(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn dual_numbers_differentials() {
        let p = builtin_resolution("dual-numbers", 4).unwrap();
        let a = p.alphabet();
        let x1 = a.position("x1").unwrap();
        let x2 = a.position("x2").unwrap();
        let x3 = a.position("x3").unwrap();
        assert_eq!(p.diff_of(x1).render(), "x*x");
        assert_eq!(p.diff_of(x2).render(), "x*x1 - x1*x");
        assert_eq!(p.diff_of(x3).render(), "x*x2 - x1*x1 + x2*x");
        // d(x1 x1) = x^2 x1 - x1 x^2
        let sq = NcPoly::generator(a, x1).mul(&NcPoly::generator(a, x1)).unwrap();
        assert_eq!(p.extend_derivation(&sq).unwrap().render(), "x*x*x1 - x1*x*x");
    }

    #[test]
    fn d_squared_violation_reported() {
        let text = "generator x hdeg 0 weight 2\ngenerator t hdeg 1 weight 2\n\
                    generator u hdeg 2 weight 2\nd t = x\nd u = t\n";
        let p = parse_presentation(text).unwrap();
        let r = p.verify_d_squared(2).unwrap();
        assert_eq!(r.violations, vec![("u".to_string(), "x".to_string())]);
    }

    #[test]
    fn censuses() {
        let dual = builtin_resolution("dual-numbers", 6).unwrap().weight_census();
        assert_eq!(dual.to_vec(6), vec![1, -1, 1, -1, 1, -1]);
        let plane = builtin_resolution("commuting-plane", 6).unwrap().weight_census();
        assert_eq!(plane.to_vec(4), vec![2, -1, 0, 0]);
        let empty = parse_presentation("").unwrap().weight_census();
        assert!(empty.coeffs.is_empty());
    }

    #[test]
    fn completeness_bound_enforced() {
        let s = builtin_resolution("sandwich", 10).unwrap();
        assert!(s.verify_d_squared(4).unwrap().is_clean());
        assert_eq!(
            s.verify_d_squared(5).unwrap_err(),
            Error::BeyondCompleteness { requested: 5, bound: 4 }
        );
    }

    #[test]
    fn render_round_trips() {
        for name in ["dual-numbers", "square-zero:2", "commuting-plane", "sandwich"] {
            let p = builtin_resolution(name, 5).unwrap();
            let q = parse_presentation(&p.render()).unwrap();
            assert_eq!(p.render(), q.render(), "{name}");
        }
        let p = parse_presentation("generator x hdeg 0 weight 1\ngenerator t hdeg 1 weight 2\nd t = 1/2*x*x").unwrap();
        assert_eq!(p.diff_of(1).coeff(&[0, 0]), int(1) / int(2));
    }
}
