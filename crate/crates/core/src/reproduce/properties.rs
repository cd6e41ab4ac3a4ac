//! Randomized consistency checks on small instances.
//!
//! Every `check_*` function takes its instance explicitly and returns a
//! description of the failure, if any, so the same checks can be driven by a
//! seeded generator here or by a property-testing harness.

use std::sync::Arc;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclic::{
    canonical_cyclic, cyclic_derivative, norm_operator, norm_poly, project_to_cyclic, rotate, rotate_poly,
};
use crate::error::Result;
use crate::graded::{koszul_sign, Alphabet, Generator, Letter, NcPoly, Word};
use crate::presentation::builtin_resolution;
use crate::rep::{rep_n, MatrixVariableAlgebra};
use crate::scalar::{sign, Scalar};

/// The property suites, by name.
pub const PROPERTY_NAMES: [&str; 5] = [
    "koszul-sign",
    "cyclic-canonical",
    "cyclic-derivative",
    "trace-invariance",
    "mu-compatibility",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Single-letter generators `a, b, c, …` of weight 1 with the given parities.
pub fn parity_alphabet(parities: &[u8]) -> Result<Arc<Alphabet>> {
    let gens = parities
        .iter()
        .enumerate()
        .map(|(i, p)| Generator::new(((b'a' + i as u8) as char).to_string(), i32::from(*p % 2), 1))
        .collect();
    Ok(Arc::new(Alphabet::new(gens)?))
}

fn word_poly(a: &Arc<Alphabet>, w: &[Letter]) -> NcPoly {
    NcPoly::monomial(a, w.to_vec(), Scalar::one())
}

/// The sign of `σ ∘ τ` is the sign of `τ` times the sign of `σ` on the
/// reordered parities, and one rotation step carries the sign of the cyclic
/// permutation.
pub fn check_koszul(parities: &[u8], sigma: &[usize], tau: &[usize]) -> Result<Option<String>> {
    let composite: Vec<usize> = sigma.iter().map(|&s| tau[s]).collect();
    let moved: Vec<u8> = tau.iter().map(|&t| parities[t]).collect();
    let lhs = koszul_sign(&composite, parities)?;
    let rhs = koszul_sign(tau, parities)? * koszul_sign(sigma, &moved)?;
    if lhs != rhs {
        return Ok(Some(format!(
            "parities {parities:?}, σ {sigma:?}, τ {tau:?}: {lhs} vs {rhs}"
        )));
    }
    let n = parities.len();
    if n > 0 {
        let a = parity_alphabet(&[0, 1])?;
        let w: Word = parities
            .iter()
            .map(|&p| a.position(if p % 2 == 1 { "b" } else { "a" }).expect("letter"))
            .collect();
        let (_, s) = rotate(&a, &w)?;
        let perm: Vec<usize> = std::iter::once(n - 1).chain(0..n - 1).collect();
        let expect = koszul_sign(&perm, parities)?;
        if s != expect {
            return Ok(Some(format!("rotation of {parities:?}: {s} vs {expect}")));
        }
    }
    Ok(None)
}

/// `τ^n = 1`, `N τ = N`, a word is bad exactly when `N` kills it, and the
/// canonical representative carries the sign relating the two norms.
pub fn check_cyclic(a: &Arc<Alphabet>, w: &[Letter]) -> Result<Option<String>> {
    let shown = a.render_word(w);
    let p = word_poly(a, w);
    let mut r = p.clone();
    for _ in 0..w.len() {
        r = rotate_poly(&r);
    }
    if r != p {
        return Ok(Some(format!("τ^n {shown} ≠ {shown}")));
    }
    let n = norm_operator(a, w);
    if norm_poly(&rotate_poly(&p)) != n {
        return Ok(Some(format!("Nτ ≠ N on {shown}")));
    }
    match canonical_cyclic(a, w)? {
        None if !n.is_zero() => Ok(Some(format!("{shown} is bad but N ≠ 0"))),
        None => Ok(None),
        Some(_) if n.is_zero() => Ok(Some(format!("{shown} is good but N = 0"))),
        Some((cw, s)) => {
            if norm_operator(a, &cw.word).scale(&s) != n {
                return Ok(Some(format!("N({shown}) ≠ {s}·N{}", cw.render(a))));
            }
            if project_to_cyclic(&rotate_poly(&p)) != project_to_cyclic(&p) {
                return Ok(Some(format!("rotation changes the class of {shown}")));
            }
            Ok(None)
        }
    }
}

/// `∂w/∂x = Σ_{v_k = x} (−1)^{|v_1…v_{k−1}||v_k…v_n|} v_{k+1}…v_n v_1…v_{k−1}`.
pub fn cyclic_derivative_by_formula(a: &Arc<Alphabet>, w: &[Letter], x: Letter) -> NcPoly {
    let mut out = NcPoly::zero(a);
    for k in 0..w.len() {
        if w[k] != x {
            continue;
        }
        let neg = a.word_is_odd(&w[..k]) && a.word_is_odd(&w[k..]);
        let word: Word = w[k + 1..].iter().chain(&w[..k]).copied().collect();
        out.add_term(word, sign(neg));
    }
    out
}

/// Cyclic derivatives kill every graded commutator `[u, v]` and agree with
/// the explicit formula on `u v`.
pub fn check_cyclic_derivative(a: &Arc<Alphabet>, u: &[Letter], v: &[Letter]) -> Result<Option<String>> {
    let (pu, pv) = (word_poly(a, u), word_poly(a, v));
    let s = sign(a.word_is_odd(u) && a.word_is_odd(v));
    let comm = pu.mul(&pv)?.sub(&pv.mul(&pu)?.scale(&s))?;
    let uv: Word = u.iter().chain(v).copied().collect();
    for x in 0..a.len() as Letter {
        let d = cyclic_derivative(&comm, x);
        if !d.is_zero() {
            return Ok(Some(format!(
                "∂/∂{} of [{}, {}] is {}",
                a.get(x).name,
                a.render_word(u),
                a.render_word(v),
                d.render()
            )));
        }
        let got = cyclic_derivative(&word_poly(a, &uv), x);
        let want = cyclic_derivative_by_formula(a, &uv, x);
        if got != want {
            return Ok(Some(format!(
                "∂/∂{} of {}: {} vs {}",
                a.get(x).name,
                a.render_word(&uv),
                got.render(),
                want.render()
            )));
        }
    }
    Ok(None)
}

/// `Tr(X^w)` is `gl_n`-invariant, and vanishes for bad words.
pub fn check_trace_invariance(alg: &MatrixVariableAlgebra, w: &[Letter]) -> Result<Option<String>> {
    let a = alg.alphabet();
    let t = alg.trace_word(w)?;
    if !alg.is_invariant(&t)? {
        return Ok(Some(format!(
            "Tr {} is not invariant at n = {}",
            a.render_word(w),
            alg.n()
        )));
    }
    if canonical_cyclic(a, w)?.is_none() && !t.is_zero() {
        return Ok(Some(format!("bad word {} has trace {}", a.render_word(w), t.render())));
    }
    Ok(None)
}

/// `μ_{n,n−1}(Tr_n X^w) = Tr_{n−1} X^w`.
pub fn check_mu(big: &MatrixVariableAlgebra, small: &MatrixVariableAlgebra, w: &[Letter]) -> Result<Option<String>> {
    let lhs = big.stabilization_map(&big.trace_word(w)?, small)?;
    let rhs = small.trace_word(w)?;
    if lhs != rhs {
        let a = big.alphabet();
        return Ok(Some(format!(
            "μ Tr {} at n = {}: {} vs {}",
            a.render_word(w),
            big.n(),
            lhs.render(),
            rhs.render()
        )));
    }
    Ok(None)
}

fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn random_word(rng: &mut impl Rng, letters: usize, min: usize, max: usize) -> Word {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| rng.gen_range(0..letters) as Letter).collect()
}

fn random_alphabet(rng: &mut impl Rng) -> Result<Arc<Alphabet>> {
    let k = rng.gen_range(1..=3);
    let parities: Vec<u8> = (0..k).map(|_| rng.gen_range(0..=1)).collect();
    parity_alphabet(&parities)
}

const TRACE_EXAMPLES: [&str; 5] = ["dual-numbers", "commuting-plane", "square-zero:2", "sandwich", "free:2"];

/// Words over the generators of weight at most `max_weight`.
fn random_weighted_word(rng: &mut impl Rng, a: &Alphabet, max_weight: u32) -> Word {
    let mut w = Vec::new();
    let mut total = 0;
    let target = rng.gen_range(1..=max_weight);
    while total < target {
        let fits: Vec<Letter> = (0..a.len() as Letter)
            .filter(|&l| total + a.get(l).weight <= target)
            .collect();
        let Some(&l) = fits.choose(rng) else { break };
        total += a.get(l).weight;
        w.push(l);
    }
    w
}

/// Runs one suite on `cases` instances drawn from a generator seeded with `seed`.
pub fn run_property(name: &str, cases: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    match name {
        "koszul-sign" => {
            for _ in 0..cases {
                let n = rng.gen_range(1..=7);
                let parities: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
                let (s, t) = (random_perm(&mut rng, n), random_perm(&mut rng, n));
                failures.extend(check_koszul(&parities, &s, &t)?);
            }
        }
        "cyclic-canonical" => {
            for _ in 0..cases {
                let a = random_alphabet(&mut rng)?;
                let w = random_word(&mut rng, a.len(), 1, 8);
                failures.extend(check_cyclic(&a, &w)?);
            }
        }
        "cyclic-derivative" => {
            for _ in 0..cases {
                let a = random_alphabet(&mut rng)?;
                let u = random_word(&mut rng, a.len(), 1, 4);
                let v = random_word(&mut rng, a.len(), 1, 4);
                failures.extend(check_cyclic_derivative(&a, &u, &v)?);
            }
        }
        "trace-invariance" | "mu-compatibility" => {
            let mut algs = Vec::new();
            for ex in TRACE_EXAMPLES {
                let p = builtin_resolution(ex, 4)?;
                let ms = (1..=3).map(|n| rep_n(&p, n)).collect::<Result<Vec<_>>>()?;
                algs.push(ms);
            }
            for _ in 0..cases {
                let ms = algs.choose(&mut rng).expect("nonempty");
                let a = ms[0].alphabet();
                if name == "trace-invariance" {
                    let n = rng.gen_range(1..=3);
                    let w = random_weighted_word(&mut rng, a, if n == 3 { 3 } else { 4 });
                    failures.extend(check_trace_invariance(&ms[n - 1], &w)?);
                } else {
                    let n = rng.gen_range(2..=3);
                    let w = random_weighted_word(&mut rng, a, if n == 3 { 3 } else { 4 });
                    failures.extend(check_mu(&ms[n - 1], &ms[n - 2], &w)?);
                }
            }
        }
        other => {
            return Err(crate::error::Error::InvalidArgument(format!(
                "unknown property suite `{other}`; expected one of {}",
                PROPERTY_NAMES.join(", ")
            )))
        }
    }
    Ok(PropertyReport {
        name: name.to_string(),
        cases,
        failures,
    })
}

pub fn run_all_properties(cases: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    PROPERTY_NAMES.iter().map(|n| run_property(n, cases, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a_few_cases() {
        for r in run_all_properties(40, 7).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.name, r.failures);
            assert_eq!(r.cases, 40);
        }
    }

    #[test]
    fn formula_catches_a_wrong_sign() {
        let a = parity_alphabet(&[1, 1]).unwrap();
        // ∂(ab)/∂a = b, and ∂(ab)/∂b = −a since |a||b| is odd
        let d = cyclic_derivative_by_formula(&a, &[0, 1], 1);
        assert_eq!(d.render(), "-a");
        assert_eq!(cyclic_derivative(&word_poly(&a, &[0, 1]), 1), d);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_property("nope", 1, 0).is_err());
    }
}
