use std::sync::Arc;

use super::{DegreeConvention, DgaPresentation, GeneratorCensus};
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator, Letter, NcPoly};
use crate::scalar::int;

/// The built-in examples, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Resolution of `k[x]/(x^2)`.
    DualNumbers,
    /// Cobar-type resolution of the square-zero extension on `d` letters.
    SquareZero(u32),
    /// `k<x, y, t>`, `dt = xy - yx`, resolving `k[x, y]`.
    CommutingPlane,
    /// Partial resolution of `k<x, y>/(x[x, y]y)`, complete to weight 4.
    Sandwich,
    /// `k[x]/(x^{m+1})`: generator census only.
    Truncated(u32),
    /// The free algebra on `d` even generators of weight 1, zero differential.
    Free(u32),
}

impl Builtin {
    /// Accepts `name`, `name:p` and `name(p)` spellings.
    pub fn parse(spec: &str) -> Result<Builtin> {
        let spec = spec.trim();
        let spec = spec.strip_prefix("builtin:").unwrap_or(spec);
        let (name, param) = if let Some((n, p)) = spec.split_once(':') {
            (n, Some(p))
        } else if let Some((n, p)) = spec.strip_suffix(')').and_then(|s| s.split_once('(')) {
            (n, Some(p))
        } else {
            (spec, None)
        };
        let num = |p: Option<&str>| -> Result<u32> {
            p.and_then(|s| s.trim().parse().ok())
                .filter(|&v: &u32| v >= 1)
                .ok_or_else(|| Error::UnknownBuiltin(spec.to_string()))
        };
        match name {
            "dual-numbers" if param.is_none() => Ok(Builtin::DualNumbers),
            "square-zero" => Ok(Builtin::SquareZero(num(param)?)),
            "commuting-plane" if param.is_none() => Ok(Builtin::CommutingPlane),
            "sandwich" if param.is_none() => Ok(Builtin::Sandwich),
            "truncated" => Ok(Builtin::Truncated(num(param)?)),
            "free" => Ok(Builtin::Free(num(param)?)),
            _ => Err(Error::UnknownBuiltin(spec.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::DualNumbers => "dual-numbers".into(),
            Builtin::SquareZero(d) => format!("square-zero:{d}"),
            Builtin::CommutingPlane => "commuting-plane".into(),
            Builtin::Sandwich => "sandwich".into(),
            Builtin::Truncated(m) => format!("truncated:{m}"),
            Builtin::Free(d) => format!("free:{d}"),
        }
    }

    /// Materializes the generators of weight at most `max_weight`.
    pub fn presentation(&self, max_weight: u32) -> Result<DgaPresentation> {
        let p = match *self {
            Builtin::DualNumbers => dual_numbers(max_weight)?,
            Builtin::SquareZero(d) => square_zero(d, max_weight)?,
            Builtin::CommutingPlane => commuting_plane()?,
            Builtin::Sandwich => sandwich()?,
            Builtin::Truncated(1) => dual_numbers(max_weight)?,
            Builtin::Truncated(_) => return Err(Error::CensusOnly(self.name())),
            Builtin::Free(d) => free(d)?,
        };
        Ok(p.with_name(self.name()))
    }

    /// Signed generator counts up to `max_weight`.
    pub fn census(&self, max_weight: u32) -> Result<GeneratorCensus> {
        match *self {
            Builtin::Truncated(m) => Ok(truncated_census(m, max_weight)),
            _ => {
                let mut c = self.presentation(max_weight)?.weight_census();
                c.coeffs.retain(|&w, _| w <= max_weight);
                c.known_to = Some(max_weight);
                Ok(c)
            }
        }
    }
}

pub fn builtin_resolution(spec: &str, max_weight: u32) -> Result<DgaPresentation> {
    Builtin::parse(spec)?.presentation(max_weight)
}

pub fn builtin_census(spec: &str, max_weight: u32) -> Result<GeneratorCensus> {
    Builtin::parse(spec)?.census(max_weight)
}

fn letter(a: &Alphabet, name: &str) -> Letter {
    a.position(name).expect("generator registered above")
}

fn word_poly(a: &Arc<Alphabet>, terms: &[(i64, &[&str])]) -> NcPoly {
    let mut p = NcPoly::zero(a);
    for (c, names) in terms {
        p.add_term(names.iter().map(|n| letter(a, n)).collect(), int(*c));
    }
    p
}

fn dual_name(i: u32) -> String {
    if i == 0 {
        "x".into()
    } else {
        format!("x{i}")
    }
}

/// Generators `x_i` of hdeg `i`, weight `i + 1`, with
/// `d x_i = sum_{j=0}^{i-1} (-1)^j x_j x_{i-1-j}` and `x_0 = x`.
fn dual_numbers(max_weight: u32) -> Result<DgaPresentation> {
    let top = max_weight.max(1);
    let gens = (0..top)
        .map(|i| Generator::new(dual_name(i), i as i32, i + 1))
        .collect();
    let a = Arc::new(Alphabet::new(gens)?);
    let mut diff = vec![NcPoly::zero(&a); a.len()];
    for i in 1..top {
        let mut p = NcPoly::zero(&a);
        for j in 0..i {
            let s = if j % 2 == 0 { 1 } else { -1 };
            p.add_term(
                vec![letter(&a, &dual_name(j)), letter(&a, &dual_name(i - 1 - j))],
                int(s),
            );
        }
        diff[letter(&a, &dual_name(i)) as usize] = p;
    }
    DgaPresentation::new(a, diff, DegreeConvention::NonNegative, Some(max_weight))
}

/// Generators `y_w` for nonempty words `w` of length at most `max_weight` in
/// `d` letters; `d y_w = sum_{w = uv} (-1)^{len(u) - 1} y_u y_v`.
fn square_zero(d: u32, max_weight: u32) -> Result<DgaPresentation> {
    if d > 26 {
        return Err(Error::InvalidArgument("at most 26 letters".into()));
    }
    let letters: Vec<char> = (0..d).map(|i| (b'a' + i as u8) as char).collect();
    let mut words: Vec<String> = Vec::new();
    let mut layer: Vec<String> = vec![String::new()];
    for _ in 0..max_weight.max(1) {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |c| format!("{w}{c}")))
            .collect();
        words.extend(layer.iter().cloned());
    }
    let gens = words
        .iter()
        .map(|w| Generator::new(format!("y_{w}"), w.len() as i32 - 1, w.len() as u32))
        .collect();
    let a = Arc::new(Alphabet::new(gens)?);
    let mut diff = vec![NcPoly::zero(&a); a.len()];
    for w in &words {
        let mut p = NcPoly::zero(&a);
        for k in 1..w.len() {
            let (u, v) = w.split_at(k);
            let s = if k % 2 == 1 { 1 } else { -1 };
            p.add_term(
                vec![letter(&a, &format!("y_{u}")), letter(&a, &format!("y_{v}"))],
                int(s),
            );
        }
        diff[letter(&a, &format!("y_{w}")) as usize] = p;
    }
    let pres = DgaPresentation::new(a, diff, DegreeConvention::NonNegative, Some(max_weight))?;
    let report = pres.verify_d_squared(max_weight)?;
    if !report.is_clean() {
        return Err(Error::Inconsistent(format!(
            "square-zero differential fails d^2 = 0 at {:?}",
            report.violations[0]
        )));
    }
    Ok(pres)
}

fn commuting_plane() -> Result<DgaPresentation> {
    let a = Arc::new(Alphabet::new(vec![
        Generator::new("x", 0, 1),
        Generator::new("y", 0, 1),
        Generator::new("t", 1, 2),
    ])?);
    let mut diff = vec![NcPoly::zero(&a); 3];
    diff[letter(&a, "t") as usize] = word_poly(&a, &[(1, &["x", "y"]), (-1, &["y", "x"])]);
    DgaPresentation::new(a, diff, DegreeConvention::NonNegative, None)
}

fn sandwich() -> Result<DgaPresentation> {
    let a = Arc::new(Alphabet::new(vec![
        Generator::new("x", 0, 1),
        Generator::new("y", 0, 1),
        Generator::new("t", 1, 4),
    ])?);
    let mut diff = vec![NcPoly::zero(&a); 3];
    diff[letter(&a, "t") as usize] = word_poly(&a, &[(1, &["x", "x", "y", "y"]), (-1, &["x", "y", "x", "y"])]);
    DgaPresentation::new(a, diff, DegreeConvention::NonNegative, Some(4))
}

fn free(d: u32) -> Result<DgaPresentation> {
    let gens: Vec<Generator> = if d == 1 {
        vec![Generator::new("x", 0, 1)]
    } else {
        (1..=d).map(|i| Generator::new(format!("x{i}"), 0, 1)).collect()
    };
    let a = Arc::new(Alphabet::new(gens)?);
    let diff = vec![NcPoly::zero(&a); a.len()];
    DgaPresentation::new(a, diff, DegreeConvention::NonNegative, None)
}

/// `sum d_i q^i = q - q^{m+1} / (1 + q + ... + q^m)`.
///
/// Since `1/(1 + ... + q^m) = (1 - q) sum_k q^{k(m+1)}`, the second term
/// contributes `-1` at every multiple of `m + 1` and `+1` just after it.
fn truncated_census(m: u32, max_weight: u32) -> GeneratorCensus {
    let mut c = GeneratorCensus {
        known_to: Some(max_weight),
        ..Default::default()
    };
    if max_weight >= 1 {
        c.coeffs.insert(1, 1);
    }
    let mut e = m + 1;
    while e <= max_weight {
        *c.coeffs.entry(e).or_default() -= 1;
        if e < max_weight {
            *c.coeffs.entry(e + 1).or_default() += 1;
        }
        e += m + 1;
    }
    c.coeffs.retain(|_, v| *v != 0);
    c
}
