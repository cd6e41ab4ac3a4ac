//! Noncommutative differential forms `T_R(Ω¹R[−1])` with differential
//! `d_R + ∂`, the commutative de Rham algebra, and their comparison under
//! the representation functor.

use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;

use crate::comm::{CommPoly, FreeCdga, VarTable, Variable};
use crate::cyclic::cyclic_complex;
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator, Letter, NcPoly};
use crate::homology::{betti, BettiTable};
use crate::presentation::{DegreeConvention, DgaPresentation};
use crate::rep::{matrix_var_name, rep_n, stable_complex};
use crate::scalar::Scalar;

/// Name of the one-form attached to a generator or variable.
pub fn form_name(name: &str) -> String {
    format!("∂{name}")
}

/// The forms algebra of a free DG algebra, with bookkeeping for `∂`.
#[derive(Debug, Clone)]
pub struct FormPresentation {
    source: DgaPresentation,
    forms: DgaPresentation,
    /// Letter of `g` in the forms alphabet, per source letter.
    base: Vec<Letter>,
    /// Letter of `∂g` in the forms alphabet, per source letter.
    dual: Vec<Letter>,
}

impl FormPresentation {
    pub fn source(&self) -> &DgaPresentation {
        &self.source
    }

    /// The forms algebra with its total differential `d_R + ∂`.
    pub fn presentation(&self) -> &DgaPresentation {
        &self.forms
    }

    pub fn base_letter(&self, l: Letter) -> Letter {
        self.base[l as usize]
    }

    pub fn form_letter(&self, l: Letter) -> Letter {
        self.dual[l as usize]
    }

    /// A polynomial of the source algebra, read inside the forms algebra.
    pub fn embed(&self, p: &NcPoly) -> NcPoly {
        let a = self.forms.alphabet();
        let mut out = NcPoly::zero(a);
        for (w, c) in p.terms() {
            out.add_term(w.iter().map(|&l| self.base[l as usize]).collect(), c.clone());
        }
        out
    }

    /// The universal derivation `∂`, of degree −1.
    pub fn partial(&self, p: &NcPoly) -> Result<NcPoly> {
        p.derive(&self.partial_images(), true)
    }

    /// The internal differential `d_R`, extended by `d(∂g) = −∂(dg)`.
    pub fn internal(&self, p: &NcPoly) -> Result<NcPoly> {
        p.derive(&self.internal_images()?, true)
    }

    fn partial_images(&self) -> Vec<NcPoly> {
        let a = self.forms.alphabet();
        let mut images = vec![NcPoly::zero(a); a.len()];
        for (b, f) in self.base.iter().zip(&self.dual) {
            images[*b as usize] = NcPoly::generator(a, *f);
        }
        images
    }

    fn internal_images(&self) -> Result<Vec<NcPoly>> {
        let a = self.forms.alphabet();
        let mut images = vec![NcPoly::zero(a); a.len()];
        for (l, (b, f)) in self.base.iter().zip(&self.dual).enumerate() {
            let dg = self.embed(self.source.diff_of(l as Letter));
            images[*f as usize] = self.partial(&dg)?.scale(&-Scalar::one());
            images[*b as usize] = dg;
        }
        Ok(images)
    }

    /// Generators on which `∂² = 0` or `d_R ∂ + ∂ d_R = 0` fails.
    pub fn anticommutation_violations(&self) -> Result<Vec<String>> {
        let a = self.forms.alphabet();
        let mut bad = Vec::new();
        for l in 0..a.len() as Letter {
            let g = NcPoly::generator(a, l);
            let dg = self.partial(&g)?;
            if !self.partial(&dg)?.is_zero() {
                bad.push(format!("∂∂{}", a.get(l).name));
            }
            let anti = self.internal(&dg)?.add(&self.partial(&self.internal(&g)?)?)?;
            if !anti.is_zero() {
                bad.push(format!("[d, ∂]{}", a.get(l).name));
            }
        }
        Ok(bad)
    }
}

/// Doubles the generators of `pres` with one-forms `∂g` of degree `|g| − 1`.
pub fn nc_forms(pres: &DgaPresentation) -> Result<FormPresentation> {
    let src = pres.alphabet();
    let mut gens = Vec::with_capacity(2 * src.len());
    for g in src.generators() {
        gens.push(Generator::new(g.name.clone(), g.hdeg, g.weight));
        gens.push(Generator::new(form_name(&g.name), g.hdeg - 1, g.weight));
    }
    let alphabet = Arc::new(Alphabet::new(gens)?);
    let locate = |name: &str| {
        alphabet
            .position(name)
            .ok_or_else(|| Error::Inconsistent(format!("generator {name} lost while doubling")))
    };
    let mut base = Vec::with_capacity(src.len());
    let mut dual = Vec::with_capacity(src.len());
    for g in src.generators() {
        base.push(locate(&g.name)?);
        dual.push(locate(&form_name(&g.name))?);
    }
    // a placeholder with zero differential, so that embed and partial work
    let zero = DgaPresentation::new(
        Arc::clone(&alphabet),
        vec![NcPoly::zero(&alphabet); alphabet.len()],
        DegreeConvention::Total,
        pres.complete_to_weight(),
    )?;
    let mut fp = FormPresentation {
        source: pres.clone(),
        forms: zero,
        base,
        dual,
    };
    let internal = fp.internal_images()?;
    let partial = fp.partial_images();
    let total = internal
        .iter()
        .zip(&partial)
        .map(|(d, p)| d.add(p))
        .collect::<Result<Vec<_>>>()?;
    let name = pres
        .name()
        .map(|n| format!("forms({n})"))
        .unwrap_or_else(|| "forms".into());
    fp.forms =
        DgaPresentation::new(alphabet, total, DegreeConvention::Total, pres.complete_to_weight())?.with_name(name);
    let bad = fp.anticommutation_violations()?;
    if !bad.is_empty() {
        return Err(Error::Inconsistent(format!(
            "forms differential fails on {}",
            bad.join(", ")
        )));
    }
    Ok(fp)
}

/// Reduced Karoubi–de Rham homology: the homology of `C(T_R(Ω¹R[−1]))` in weights `1..=W`.
pub fn reduced_hdr(pres: &DgaPresentation, max_weight: u32) -> Result<BettiTable> {
    pres.ensure_weight(max_weight)?;
    let fp = nc_forms(pres)?;
    betti(&cyclic_complex(fp.presentation(), max_weight)?)
}

/// `DR(B)`: the commutative algebra with a variable `∂v` of degree `|v| − 1`
/// for each `v`, and differential `d_B + ∂_B`.
pub fn comm_derham(cdga: &FreeCdga) -> Result<FreeCdga> {
    let src = cdga.table();
    let n = src.len();
    let mut vars: Vec<Variable> = src.vars().to_vec();
    vars.extend(
        src.vars()
            .iter()
            .map(|v| Variable::new(form_name(&v.name), v.hdeg - 1, v.weight)),
    );
    let table = Arc::new(VarTable::new(vars)?);
    // old variable i keeps index i; its form is n + i
    let embed_images: Vec<CommPoly> = (0..n as u32).map(|v| CommPoly::var(&table, v)).collect();
    let mut partial_images = vec![CommPoly::zero(&table); 2 * n];
    for (v, img) in partial_images.iter_mut().take(n).enumerate() {
        *img = CommPoly::var(&table, (n + v) as u32);
    }
    let mut diff = Vec::with_capacity(2 * n);
    let mut form_diff = Vec::with_capacity(n);
    for (v, dv) in cdga.diff().iter().enumerate() {
        let dv = dv.substitute(&table, &embed_images)?;
        form_diff.push(dv.derive(&partial_images, true)?.scale(&-Scalar::one()));
        diff.push(dv.add(&partial_images[v])?);
    }
    diff.extend(form_diff);
    FreeCdga::new(table, diff)
}

/// Outcome of comparing `(T_R(Ω¹R[−1]))_n` with `DR(R_n)` generator by generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P3Report {
    pub n: usize,
    pub checked: usize,
    /// `(generator, left differential, right differential)` for each disagreement.
    pub mismatches: Vec<(String, String, String)>,
}

impl P3Report {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Matches `(∂r)_{ij}` with `∂(r_{ij})` and compares the two differentials on
/// every generator of weight at most `max_weight`.
pub fn p3_check(pres: &DgaPresentation, n: usize, max_weight: u32) -> Result<P3Report> {
    pres.ensure_weight(max_weight)?;
    let fp = nc_forms(pres)?;
    let left = rep_n(fp.presentation(), n)?;
    let right = comm_derham(rep_n(pres, n)?.cdga())?;
    let (lt, rt) = (left.table(), right.table());
    if lt.len() != rt.len() {
        return Err(Error::LengthMismatch {
            left: lt.len(),
            right: rt.len(),
        });
    }
    let fa = fp.presentation().alphabet();
    let src = pres.alphabet();
    // right-hand variable for each left-hand one
    let mut target = vec![0u32; lt.len()];
    for l in 0..src.len() as Letter {
        let name = &src.get(l).name;
        for i in 0..n {
            for j in 0..n {
                let entry = matrix_var_name(name, i, j);
                let find = |s: &str| {
                    rt.position(s)
                        .ok_or_else(|| Error::Inconsistent(format!("no variable {s} in DR(R_n)")))
                };
                target[left.var(fp.base_letter(l), i, j) as usize] = find(&entry)?;
                target[left.var(fp.form_letter(l), i, j) as usize] = find(&form_name(&entry))?;
            }
        }
    }
    let images: Vec<CommPoly> = target.iter().map(|&v| CommPoly::var(rt, v)).collect();
    let results = (0..lt.len() as u32)
        .into_par_iter()
        .filter(|&v| fa.get(left.var_position(v).0).weight <= max_weight)
        .map(|v| {
            let lhs = left.cdga().diff()[v as usize].substitute(rt, &images)?;
            let rhs = &right.diff()[target[v as usize] as usize];
            Ok((lhs != *rhs).then(|| (lt.get(v).name.clone(), lhs.render(), rhs.render())))
        })
        .collect::<Result<Vec<_>>>()?;
    let checked = results.len();
    Ok(P3Report {
        n,
        checked,
        mismatches: results.into_iter().flatten().collect(),
    })
}

/// Homology of `Λ[C(T_R(Ω¹R[−1]))]`, the stable trace part of `DR(R_n)`.
pub fn stable_derham(pres: &DgaPresentation, max_weight: u32, budget: usize) -> Result<BettiTable> {
    pres.ensure_weight(max_weight)?;
    let fp = nc_forms(pres)?;
    betti(&stable_complex(fp.presentation(), max_weight)?.complex(budget)?)
}
