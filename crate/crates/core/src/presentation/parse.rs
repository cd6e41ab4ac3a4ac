use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{DegreeConvention, DgaPresentation};
use crate::comm::{CommPoly, FreeCdga, VarTable, Variable};
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator, NcPoly};
use crate::scalar::Scalar;

/// A presentation file is either a free (noncommutative) DG algebra or, with
/// the `commutative` header, a free graded-commutative one.
#[derive(Debug, Clone)]
pub enum ParsedPresentation {
    Free(DgaPresentation),
    Commutative(FreeCdga),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '∂'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '∂')
}

fn tokenize(s: &str, line: usize) -> Result<Vec<Tok>> {
    let syntax = |msg: String| Error::Syntax { line, msg };
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                n.push(d);
                chars.next();
            }
            out.push(Tok::Num(n.parse().map_err(|_| syntax(format!("bad number `{n}`")))?));
        } else if is_ident_start(c) {
            let mut n = String::new();
            while let Some(&d) = chars.peek().filter(|d| is_ident_char(**d)) {
                n.push(d);
                chars.next();
            }
            out.push(Tok::Ident(n));
        } else {
            chars.next();
            out.push(match c {
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                _ => return Err(syntax(format!("unexpected character `{c}`"))),
            });
        }
    }
    Ok(out)
}

/// Parses `c1*a*b - 2/3*c + ...` into `(coefficient, factor names)` terms.
pub fn parse_scalar_poly(s: &str, line: usize) -> Result<Vec<(Scalar, Vec<String>)>> {
    let syntax = |msg: &str| Error::Syntax {
        line,
        msg: msg.to_string(),
    };
    let toks = tokenize(s, line)?;
    if toks.is_empty() {
        return Err(syntax("empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut i = 0;
    let mut first = true;
    while i < toks.len() {
        let mut coeff = Scalar::one();
        match toks[i] {
            Tok::Plus => i += 1,
            Tok::Minus => {
                coeff = -coeff;
                i += 1;
            }
            _ if first => {}
            _ => return Err(syntax("expected `+` or `-` between terms")),
        }
        first = false;
        let mut names = Vec::new();
        loop {
            match toks.get(i) {
                Some(Tok::Num(n)) => {
                    i += 1;
                    let mut v = Scalar::from_integer(n.clone());
                    if toks.get(i) == Some(&Tok::Slash) {
                        let Some(Tok::Num(d)) = toks.get(i + 1) else {
                            return Err(syntax("expected a denominator after `/`"));
                        };
                        if d.is_zero() {
                            return Err(syntax("zero denominator"));
                        }
                        v /= Scalar::from_integer(d.clone());
                        i += 2;
                    }
                    coeff *= v;
                }
                Some(Tok::Ident(n)) => {
                    names.push(n.clone());
                    i += 1;
                }
                _ => return Err(syntax("expected a coefficient or generator name")),
            }
            if toks.get(i) == Some(&Tok::Star) {
                i += 1;
            } else {
                break;
            }
        }
        terms.push((coeff, names));
    }
    Ok(terms)
}

struct RawGen {
    name: String,
    hdeg: i32,
    weight: u32,
}

struct RawFile {
    commutative: bool,
    complete_to_weight: Option<u32>,
    gens: Vec<(usize, RawGen)>,
    diffs: Vec<(usize, String, String)>,
}

fn parse_int<T: std::str::FromStr>(s: Option<&str>, line: usize, what: &str) -> Result<T> {
    s.and_then(|v| v.parse().ok()).ok_or_else(|| Error::Syntax {
        line,
        msg: format!("expected an integer {what}"),
    })
}

fn read_lines(text: &str) -> Result<RawFile> {
    let mut raw = RawFile {
        commutative: false,
        complete_to_weight: None,
        gens: Vec::new(),
        diffs: Vec::new(),
    };
    for (k, full) in text.lines().enumerate() {
        let line = k + 1;
        let l = full.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut words = l.split_whitespace();
        match words.next() {
            Some("generator") => {
                let name = words.next().ok_or_else(|| Error::Syntax {
                    line,
                    msg: "missing generator name".into(),
                })?;
                if !name.starts_with(is_ident_start) || !name.chars().all(is_ident_char) {
                    return Err(Error::Syntax {
                        line,
                        msg: format!("invalid generator name `{name}`"),
                    });
                }
                if words.next() != Some("hdeg") {
                    return Err(Error::Syntax {
                        line,
                        msg: "expected `hdeg`".into(),
                    });
                }
                let hdeg = parse_int(words.next(), line, "hdeg")?;
                if words.next() != Some("weight") {
                    return Err(Error::Syntax {
                        line,
                        msg: "expected `weight`".into(),
                    });
                }
                let weight = parse_int(words.next(), line, "weight")?;
                if words.next().is_some() {
                    return Err(Error::Syntax {
                        line,
                        msg: "trailing input".into(),
                    });
                }
                raw.gens.push((
                    line,
                    RawGen {
                        name: name.to_string(),
                        hdeg,
                        weight,
                    },
                ));
            }
            Some("d") => {
                let rest = l[1..].trim_start();
                let (name, rhs) = rest.split_once('=').ok_or_else(|| Error::Syntax {
                    line,
                    msg: "expected `d <name> = <polynomial>`".into(),
                })?;
                raw.diffs.push((line, name.trim().to_string(), rhs.trim().to_string()));
            }
            Some("complete-to-weight") => {
                raw.complete_to_weight = Some(parse_int(words.next(), line, "weight bound")?);
            }
            Some("commutative") => raw.commutative = true,
            Some(other) => {
                return Err(Error::Syntax {
                    line,
                    msg: format!("unknown directive `{other}`"),
                })
            }
            None => unreachable!(),
        }
    }
    Ok(raw)
}

/// Parses a free DG algebra presentation.
pub fn parse_presentation(text: &str) -> Result<DgaPresentation> {
    match parse_any(text)? {
        ParsedPresentation::Free(p) => Ok(p),
        ParsedPresentation::Commutative(_) => Err(Error::Syntax {
            line: 1,
            msg: "expected a free (noncommutative) presentation".into(),
        }),
    }
}

/// Parses either flavour of presentation file.
pub fn parse_any(text: &str) -> Result<ParsedPresentation> {
    let raw = read_lines(text)?;
    let mut seen_d: HashMap<String, usize> = HashMap::new();
    for (line, name, _) in &raw.diffs {
        if seen_d.insert(name.clone(), *line).is_some() {
            return Err(Error::Syntax {
                line: *line,
                msg: format!("second differential for `{name}`"),
            });
        }
    }
    if raw.commutative {
        return parse_commutative(raw).map(ParsedPresentation::Commutative);
    }
    let gens: Vec<Generator> = raw
        .gens
        .iter()
        .map(|(_, g)| Generator::new(g.name.clone(), g.hdeg, g.weight))
        .collect();
    for (_, g) in &raw.gens {
        if g.hdeg < 0 {
            return Err(Error::Degree {
                name: g.name.clone(),
                msg: "negative homological degree".into(),
            });
        }
    }
    let alphabet = Arc::new(Alphabet::new(gens)?);
    let mut diff = vec![NcPoly::zero(&alphabet); alphabet.len()];
    for (line, name, rhs) in &raw.diffs {
        let target = alphabet.position(name).ok_or_else(|| Error::UnknownGenerator {
            line: *line,
            name: name.clone(),
        })?;
        let mut p = NcPoly::zero(&alphabet);
        for (c, names) in parse_scalar_poly(rhs, *line)? {
            let word = names
                .iter()
                .map(|n| {
                    alphabet.position(n).ok_or_else(|| Error::UnknownGenerator {
                        line: *line,
                        name: n.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            p.add_term(word, c);
        }
        diff[target as usize] = p;
    }
    DgaPresentation::new(alphabet, diff, DegreeConvention::NonNegative, raw.complete_to_weight)
        .map(ParsedPresentation::Free)
}

fn parse_commutative(raw: RawFile) -> Result<FreeCdga> {
    let vars = raw
        .gens
        .iter()
        .map(|(_, g)| Variable::new(g.name.clone(), g.hdeg, g.weight))
        .collect();
    let table = Arc::new(VarTable::new(vars)?);
    let mut diff = vec![CommPoly::zero(&table); table.len()];
    for (line, name, rhs) in &raw.diffs {
        let target = table.position(name).ok_or_else(|| Error::UnknownGenerator {
            line: *line,
            name: name.clone(),
        })?;
        let mut p = CommPoly::zero(&table);
        for (c, names) in parse_scalar_poly(rhs, *line)? {
            let factors = names
                .iter()
                .map(|n| {
                    table.position(n).ok_or_else(|| Error::UnknownGenerator {
                        line: *line,
                        name: n.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            p.add_assign_scaled(&CommPoly::product_of_vars(&table, &factors), &c)?;
        }
        diff[target as usize] = p;
    }
    FreeCdga::new(table, diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn transcribes_the_weight_two_truncation() {
        let p = parse_presentation(
            "# dual numbers to weight 2\ngenerator x hdeg 0 weight 1\ngenerator t hdeg 1 weight 2\nd t = x*x\n",
        )
        .unwrap();
        assert_eq!(p.generators().len(), 2);
        assert_eq!(p.diff_of(1).render(), "x*x");
    }

    #[test]
    fn weight_mismatch_rejected() {
        let e =
            parse_presentation("generator x hdeg 0 weight 1\ngenerator t hdeg 1 weight 3\nd t = x*x\n").unwrap_err();
        match e {
            Error::Degree { name, msg } => {
                assert_eq!(name, "t");
                assert!(msg.starts_with("weight mismatch"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_presentation_is_valid() {
        let p = parse_presentation("# nothing here\n").unwrap();
        assert!(p.generators().is_empty());
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!(
            parse_presentation("generator x hdeg 0 weight 1\ngenerator t hdeg 1 weight 2\nd t = x*z\n").unwrap_err(),
            Error::UnknownGenerator {
                line: 3,
                name: "z".into()
            }
        );
        assert!(matches!(
            parse_presentation("generator x hdeg zero weight 1").unwrap_err(),
            Error::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_presentation("generator x hdeg 0 weight 1\nd x = x x").unwrap_err(),
            Error::Syntax { line: 2, .. }
        ));
    }

    #[test]
    fn coefficients_and_signs() {
        let t = parse_scalar_poly("-2/4*a*b + 3 - c", 1).unwrap();
        assert_eq!(t[0], (int(-1) / int(2), vec!["a".into(), "b".into()]));
        assert_eq!(t[1], (int(3), vec![]));
        assert_eq!(t[2], (int(-1), vec!["c".into()]));
    }

    #[test]
    fn commutative_files() {
        let text = "commutative\ngenerator x hdeg 0 weight 1\ngenerator t hdeg 1 weight 2\nd t = x*x\n";
        let ParsedPresentation::Commutative(c) = parse_any(text).unwrap() else {
            panic!("expected commutative");
        };
        assert!(c.d_squared_violations().unwrap().is_empty());
    }
}
