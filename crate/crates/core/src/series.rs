//! Truncated power series with integer coefficients, and the generating
//! functions built from them: Euler characteristics, ζ-products, the
//! Molien–Weyl constant term, necklace counts and the identities they satisfy.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cyclic::is_canonical_good;
use crate::error::{Error, Result};
use crate::graded::{Alphabet, Generator};
use crate::homology::BettiTable;
use crate::presentation::GeneratorCensus;

/// Longest word the brute-force counters will enumerate.
pub const DEFAULT_LENGTH_CAP: u32 = 16;

/// A power series truncated at total degree `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    vars: Arc<Vec<String>>,
    order: u32,
    coeffs: BTreeMap<Vec<u32>, BigInt>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl PowerSeries {
    pub fn zero(vars: &[&str], order: u32) -> Self {
        PowerSeries {
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(vars: &[&str], order: u32) -> Self {
        let mut s = Self::zero(vars, order);
        s.coeffs.insert(vec![0; vars.len()], BigInt::one());
        s
    }

    /// Univariate series in `q` from its leading coefficients.
    pub fn from_coefficients(coeffs: &[i64], order: u32) -> Self {
        let mut s = Self::zero(&["q"], order);
        for (i, c) in coeffs.iter().enumerate().take(order as usize + 1) {
            s.add_term(vec![i as u32], BigInt::from(*c));
        }
        s
    }

    fn empty_like(&self) -> Self {
        PowerSeries {
            vars: Arc::clone(&self.vars),
            order: self.order,
            coeffs: BTreeMap::new(),
        }
    }

    fn unit_like(&self) -> Self {
        let mut s = self.empty_like();
        s.coeffs.insert(vec![0; self.nvars()], BigInt::one());
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.coeffs.get(exps).cloned().unwrap_or_default()
    }

    /// Adds `c · q^exps`; terms beyond the truncation order are dropped.
    pub fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        assert_eq!(exps.len(), self.nvars(), "exponent arity");
        if total(&exps) > self.order || c.is_zero() {
            return;
        }
        match self.coeffs.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficients of `q^0 .. q^order` of a univariate series.
    pub fn coefficients(&self) -> Vec<BigInt> {
        assert_eq!(self.nvars(), 1, "coefficients() needs one variable");
        (0..=self.order).map(|i| self.coeff(&[i])).collect()
    }

    /// Sum of coefficients per total degree.
    pub fn by_total_degree(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.order as usize + 1];
        for (e, c) in &self.coeffs {
            out[total(e) as usize] += c;
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    pub fn truncate(&self, order: u32) -> Self {
        PowerSeries {
            vars: Arc::clone(&self.vars),
            order: order.min(self.order),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| total(e) <= order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (e, c) in &other.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let rhs: Vec<(&Vec<u32>, &BigInt)> = other.coeffs.iter().collect();
        let partial = |(ea, ca): (&Vec<u32>, &BigInt)| {
            let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
            let ta = total(ea);
            for (eb, cb) in &rhs {
                if ta + total(eb) > order {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * *cb;
            }
            acc
        };
        let merge = |mut a: HashMap<Vec<u32>, BigInt>, b: HashMap<Vec<u32>, BigInt>| {
            for (e, c) in b {
                *a.entry(e).or_default() += c;
            }
            a
        };
        let acc = if self.coeffs.len() * rhs.len() > 4096 {
            self.coeffs.par_iter().map(partial).reduce(HashMap::new, merge)
        } else {
            self.coeffs.iter().map(partial).fold(HashMap::new(), merge)
        };
        let mut out = self.empty_like();
        out.order = order;
        out.coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be `±1`.
    pub fn inverse(&self) -> Result<Self> {
        let zero = vec![0; self.nvars()];
        let c0 = self.coeff(&zero);
        if !(c0.is_one() || (-&c0).is_one()) {
            return Err(Error::NonInteger(format!(
                "series with constant term {c0} has no integral inverse"
            )));
        }
        // f = c0 (1 - g)  =>  1/f = c0 (1 + g + g^2 + ...)
        let mut g = self.empty_like();
        for (e, c) in &self.coeffs {
            if e != &zero {
                g.add_term(e.clone(), -(c * &c0));
            }
        }
        let mut out = self.unit_like();
        let mut power = self.unit_like();
        for _ in 0..self.order {
            power = power.mul(&g)?;
            if power.coeffs.is_empty() {
                break;
            }
            out = out.add(&power)?;
        }
        if !c0.is_one() {
            out = out.neg();
        }
        Ok(out)
    }

    /// `self^e` for any integer `e` (negative powers need a `±1` constant term).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut out = self.unit_like();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(out)
    }

    /// Multiplies by `(1 - q^exps)^e` using the binomial series.
    pub fn mul_one_minus_pow(&self, exps: &[u32], e: &BigInt) -> Result<Self> {
        let step = total(exps);
        if step == 0 {
            return Err(Error::InvalidArgument("(1 - 1)^e is not a power series".into()));
        }
        if e.is_zero() || step > self.order {
            return Ok(self.clone());
        }
        let mut factor = self.empty_like();
        let mut binom = BigInt::one();
        let mut k: u32 = 0;
        while k * step <= self.order {
            let c = if k.is_multiple_of(2) { binom.clone() } else { -&binom };
            factor.add_term(exps.iter().map(|x| x * k).collect(), c);
            // binom(e, k+1) = binom(e, k) (e - k) / (k + 1)
            binom = binom * (e - BigInt::from(k)) / BigInt::from(k + 1);
            if binom.is_zero() {
                break;
            }
            k += 1;
        }
        self.mul(&factor)
    }

    /// Index of the first total degree where `self` and `other` differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<u32> {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<&Vec<u32>> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter()
            .filter(|e| total(e) <= order && self.coeff(e) != other.coeff(e))
            .map(|e| total(e))
            .min()
    }

    fn subst_power(&self, s: u32) -> Self {
        let mut out = self.empty_like();
        for (e, c) in &self.coeffs {
            out.add_term(e.iter().map(|x| x * s).collect(), c.clone());
        }
        out
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.iter())
                .filter(|(x, _)| **x > 0)
                .map(|(x, v)| if *x == 1 { v.clone() } else { format!("{v}^{x}") })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{abs}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

fn q_series(order: u32) -> PowerSeries {
    PowerSeries::one(&["q"], order)
}

/// `∏_i (1 - q^i)^{-d_i n²}`.
pub fn chi_rep(census: &GeneratorCensus, n: usize, order: u32) -> Result<PowerSeries> {
    let n2 = BigInt::from(n * n);
    let mut s = q_series(order);
    for i in 1..=order {
        let d = census.get(i);
        if d != 0 {
            s = s.mul_one_minus_pow(&[i], &(-BigInt::from(d) * &n2))?;
        }
    }
    Ok(s)
}

fn ensure_census(census: &GeneratorCensus, order: u32) -> Result<()> {
    match census.known_to {
        Some(k) if k < order => Err(Error::BeyondCompleteness {
            requested: order,
            bound: k,
        }),
        _ => Ok(()),
    }
}

/// `∏_{s≥1} (1 - Σ_i d_i q^{si})^{-1}`.
pub fn zeta_closed(census: &GeneratorCensus, order: u32) -> Result<PowerSeries> {
    ensure_census(census, order)?;
    let mut inner = q_series(order);
    for i in 1..=order {
        inner.add_term(vec![i], -BigInt::from(census.get(i)));
    }
    product_of_inverses(&inner, order)
}

/// `∏_{s≥1} f(q^s)^{-1}` for `f` with constant term 1.
fn product_of_inverses(f: &PowerSeries, order: u32) -> Result<PowerSeries> {
    let factors = (1..=order.max(1))
        .into_par_iter()
        .map(|s| f.subst_power(s).inverse())
        .collect::<Result<Vec<_>>>()?;
    factors.into_iter().try_fold(q_series(order), |acc, g| acc.mul(&g))
}

/// An increasing sequence starting at 1 with consecutive gaps at most `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Train {
    pub stops: Vec<u32>,
    pub m: u32,
}

impl Train {
    pub fn len(&self) -> usize {
        self.stops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.m + self.stops.last().copied().unwrap_or(0)
    }
}

/// Every `m`-train of weight at most `max_weight`.
pub fn trains(m: u32, max_weight: u32) -> Vec<Train> {
    fn go(m: u32, max_weight: u32, cur: &mut Vec<u32>, out: &mut Vec<Train>) {
        out.push(Train { stops: cur.clone(), m });
        let last = *cur.last().expect("trains start at 1");
        for gap in 1..=m {
            if m + last + gap > max_weight {
                break;
            }
            cur.push(last + gap);
            go(m, max_weight, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 1 && m < max_weight {
        go(m, max_weight, &mut vec![1], &mut out);
    }
    out
}

/// `∏_s (1 - q^s + Σ_τ (-1)^{l(τ)-1} q^{s w_τ})^{-1}` by enumerating trains.
pub fn zeta_trains(m: u32, order: u32) -> Result<PowerSeries> {
    if m == 0 {
        return Err(Error::InvalidArgument("trains need m >= 1".into()));
    }
    let mut inner = q_series(order);
    inner.add_term(vec![1], BigInt::from(-1));
    for t in trains(m, order) {
        let c = if t.len() % 2 == 1 { 1 } else { -1 };
        inner.add_term(vec![t.weight()], BigInt::from(c));
    }
    product_of_inverses(&inner, order)
}

/// `∏_i (1 - q^i)^{b_i - a_i}` from even (`a`) and odd (`b`) dimensions per weight.
pub fn chi_sym_hc(a: &BTreeMap<u32, i64>, b: &BTreeMap<u32, i64>, order: u32) -> Result<PowerSeries> {
    let mut s = q_series(order);
    for i in 1..=order {
        let e = b.get(&i).copied().unwrap_or(0) - a.get(&i).copied().unwrap_or(0);
        if e != 0 {
            s = s.mul_one_minus_pow(&[i], &BigInt::from(e))?;
        }
    }
    Ok(s)
}

/// Even and odd homology dimensions per weight of a Betti table.
pub fn parity_dims(b: &BettiTable) -> (BTreeMap<u32, i64>, BTreeMap<u32, i64>) {
    let mut even = BTreeMap::new();
    let mut odd = BTreeMap::new();
    for ((h, w), cell) in b.cells() {
        let target = if h.rem_euclid(2) == 0 { &mut even } else { &mut odd };
        *target.entry(*w).or_insert(0) += cell.dim as i64;
    }
    (even, odd)
}

/// Laurent polynomial in torus variables, per power of `q`.
type TorusSeries = Vec<HashMap<Vec<i32>, BigInt>>;

fn torus_mul_factor(
    cur: &TorusSeries,
    factor: &[(u32, Vec<i32>, BigInt)],
    bound: i32,
    budget: usize,
) -> Result<TorusSeries> {
    let order = cur.len() - 1;
    let mut out: TorusSeries = vec![HashMap::new(); order + 1];
    let results: Vec<(usize, HashMap<Vec<i32>, BigInt>)> = (0..=order)
        .into_par_iter()
        .map(|target| {
            let mut acc: HashMap<Vec<i32>, BigInt> = HashMap::new();
            for (qd, z, c) in factor {
                let qd = *qd as usize;
                if qd > target {
                    continue;
                }
                for (e, v) in &cur[target - qd] {
                    let ne: Vec<i32> = e.iter().zip(z).map(|(a, b)| a + b).collect();
                    if ne.iter().any(|x| x.abs() > bound) {
                        continue;
                    }
                    *acc.entry(ne).or_default() += v * c;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            (target, acc)
        })
        .collect();
    let mut size = 0;
    for (t, m) in results {
        size += m.len();
        out[t] = m;
    }
    if size > budget {
        return Err(Error::CellBudget {
            hdeg: 0,
            weight: order as u32,
            size,
            budget,
        });
    }
    Ok(out)
}

/// Euler characteristic of the invariant homology of `Rep_n`, as the
/// constant term of the torus integrand times the Weyl factor over `n!`.
pub fn molien_weyl(census: &GeneratorCensus, n: usize, order: u32, budget: usize) -> Result<PowerSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("molien_weyl needs n >= 1".into()));
    }
    let bound = (order as usize + n) as i32;
    let zero = vec![0i32; n];
    let mut cur: TorusSeries = vec![HashMap::new(); order as usize + 1];
    cur[0].insert(zero.clone(), BigInt::one());
    // Weyl factor ∏_{a≠b} (1 - z_a/z_b)
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut z = zero.clone();
            z[a] += 1;
            z[b] -= 1;
            let f = vec![(0, zero.clone(), BigInt::one()), (0, z, BigInt::from(-1))];
            cur = torus_mul_factor(&cur, &f, bound, budget)?;
        }
    }
    // off-diagonal factors (1 - z_a/z_b q^i)^{-d_i}; the diagonal ones are scalar
    for i in 1..=order {
        let d = census.get(i);
        if d == 0 {
            continue;
        }
        let e = BigInt::from(-d);
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut f = Vec::new();
                let mut binom = BigInt::one();
                let mut k: u32 = 0;
                while k * i <= order {
                    let mut z = zero.clone();
                    z[a] += k as i32;
                    z[b] -= k as i32;
                    let c = if k.is_multiple_of(2) { binom.clone() } else { -&binom };
                    f.push((k * i, z, c));
                    binom = binom * (&e - BigInt::from(k)) / BigInt::from(k + 1);
                    if binom.is_zero() {
                        break;
                    }
                    k += 1;
                }
                cur = torus_mul_factor(&cur, &f, bound, budget)?;
            }
        }
    }
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    let mut ct = q_series(order);
    ct.coeffs.clear();
    for (qd, m) in cur.iter().enumerate() {
        let c = m.get(&zero).cloned().unwrap_or_default();
        let (quot, rem) = c.div_rem(&fact);
        if !rem.is_zero() {
            return Err(Error::NonInteger(format!(
                "constant term {c} at q^{qd} is not divisible by {n}!"
            )));
        }
        ct.add_term(vec![qd as u32], quot);
    }
    // diagonal part: ∏_i (1 - q^i)^{-d_i n}
    let mut diag = q_series(order);
    for i in 1..=order {
        let d = census.get(i);
        if d != 0 {
            diag = diag.mul_one_minus_pow(&[i], &BigInt::from(-d * n as i64))?;
        }
    }
    ct.mul(&diag)
}

fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            out = -out;
        }
        p += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// `Φ_r(d)`: cyclic words of length `r` in `d` letters.
pub fn necklaces(d: u64, r: u64) -> BigInt {
    let s: BigInt = (1..=r)
        .filter(|m| r.is_multiple_of(*m))
        .map(|m| BigInt::from(euler_phi(m)) * BigInt::from(d).pow((r / m) as u32))
        .sum();
    s / BigInt::from(r)
}

/// `M_r(d)`: primitive cyclic words of length `r` in `d` letters.
pub fn primitive_necklaces(d: u64, r: u64) -> BigInt {
    let s: BigInt = (1..=r)
        .filter(|n| r.is_multiple_of(*n))
        .map(|n| BigInt::from(mobius(n)) * BigInt::from(d).pow((r / n) as u32))
        .sum();
    s / BigInt::from(r)
}

fn all_words(d: u32, r: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (d as u64).pow(r);
    (0..total).map(move |mut k| {
        let mut w = vec![0; r as usize];
        for slot in w.iter_mut().rev() {
            *slot = (k % d as u64) as u32;
            k /= d as u64;
        }
        w
    })
}

fn smallest_period(w: &[u32]) -> usize {
    let r = w.len();
    (1..=r)
        .find(|p| r.is_multiple_of(*p) && (0..r).all(|i| w[i] == w[(i + p) % r]))
        .unwrap_or(r)
}

fn is_least_rotation(w: &[u32]) -> bool {
    let r = w.len();
    (1..r).all(|k| {
        let rot = w[k..].iter().chain(&w[..k]);
        w.iter().cmp(rot) != std::cmp::Ordering::Greater
    })
}

/// `(Φ_r, M_r)` by listing rotation classes.
pub fn necklaces_brute(d: u32, r: u32) -> (u64, u64) {
    let mut all = 0;
    let mut primitive = 0;
    for w in all_words(d, r) {
        if is_least_rotation(&w) {
            all += 1;
            if smallest_period(&w) == w.len() {
                primitive += 1;
            }
        }
    }
    (all, primitive)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecklaceRow {
    pub r: u32,
    pub phi: BigInt,
    pub primitive: BigInt,
    /// Brute-force counts, present for `r <= brute_cap`.
    pub brute: Option<(u64, u64)>,
}

impl NecklaceRow {
    pub fn agrees(&self) -> bool {
        match self.brute {
            Some((a, p)) => self.phi == BigInt::from(a) && self.primitive == BigInt::from(p),
            None => true,
        }
    }
}

pub fn necklace_counts(d: u32, r_max: u32, brute_cap: u32) -> Result<Vec<NecklaceRow>> {
    if d == 0 {
        return Err(Error::InvalidArgument("alphabet size must be >= 1".into()));
    }
    Ok((1..=r_max)
        .into_par_iter()
        .map(|r| NecklaceRow {
            r,
            phi: necklaces(d as u64, r as u64),
            primitive: primitive_necklaces(d as u64, r as u64),
            brute: (r <= brute_cap).then(|| necklaces_brute(d, r)),
        })
        .collect())
}

fn odd_letters(d: usize) -> Alphabet {
    Alphabet::new((1..=d).map(|i| Generator::new(format!("sx{i}"), 1, 1)).collect()).expect("distinct names")
}

fn check_cap(len: u32, cap: u32) -> Result<()> {
    if len > cap {
        return Err(Error::InvalidArgument(format!(
            "word length {len} exceeds the enumeration cap {cap}"
        )));
    }
    Ok(())
}

/// Good cyclic words in `d` odd letters with `content[i]` copies of letter `i`.
pub fn good_cyclic_count(content: &[u32], cap: u32) -> Result<u64> {
    let d = content.len();
    if d == 0 {
        return Err(Error::InvalidArgument("empty alphabet".into()));
    }
    let len: u32 = content.iter().sum();
    check_cap(len, cap)?;
    if len == 0 {
        return Ok(0);
    }
    let a = odd_letters(d);
    let mut count = 0;
    let mut w = Vec::with_capacity(len as usize);
    let mut left = content.to_vec();
    fn go(a: &Alphabet, left: &mut [u32], w: &mut Vec<u32>, len: usize, count: &mut u64) {
        if w.len() == len {
            if is_canonical_good(a, w) {
                *count += 1;
            }
            return;
        }
        for l in 0..left.len() {
            if left[l] > 0 {
                left[l] -= 1;
                w.push(l as u32);
                go(a, left, w, len, count);
                w.pop();
                left[l] += 1;
            }
        }
    }
    go(&a, &mut left, &mut w, len as usize, &mut count);
    Ok(count)
}

/// Good cyclic words in `d` odd letters, by content, for lengths `1..=max_len`.
pub fn good_cyclic_census(d: usize, max_len: u32, cap: u32) -> Result<BTreeMap<Vec<u32>, u64>> {
    check_cap(max_len, cap)?;
    let a = odd_letters(d);
    let per_len: Vec<BTreeMap<Vec<u32>, u64>> = (1..=max_len)
        .into_par_iter()
        .map(|r| {
            let mut m = BTreeMap::new();
            for w in all_words(d as u32, r) {
                if is_canonical_good(&a, &w) {
                    let mut content = vec![0u32; d];
                    for l in &w {
                        content[*l as usize] += 1;
                    }
                    *m.entry(content).or_insert(0) += 1;
                }
            }
            m
        })
        .collect();
    Ok(per_len.into_iter().flatten().collect())
}

/// The identities checked by [`verify_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// Odd parts versus distinct parts.
    Cid1,
    /// Parts not divisible by `m+1` versus parts repeated at most `m` times.
    Cid2(u32),
    /// The multigraded form in `d` letters.
    Cidd(u32),
    /// The single-variable form in `d` letters with necklace exponents.
    Cidd1(u32),
}

impl Identity {
    pub fn parse(s: &str) -> Result<Identity> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = || -> Result<u32> {
            let a = arg.ok_or_else(|| Error::InvalidArgument(format!("`{head}` needs a parameter")))?;
            match a.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::InvalidArgument(format!("bad parameter `{a}` for `{head}`"))),
            }
        };
        match head {
            "cid1" if arg.is_none() => Ok(Identity::Cid1),
            "cid2" => Ok(Identity::Cid2(num()?)),
            "cidd" => Ok(Identity::Cidd(num()?)),
            "cidd1" => Ok(Identity::Cidd1(num()?)),
            _ => Err(Error::InvalidArgument(format!("unknown identity `{s}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Identity::Cid1 => "cid1".into(),
            Identity::Cid2(m) => format!("cid2:{m}"),
            Identity::Cidd(d) => format!("cidd:{d}"),
            Identity::Cidd1(d) => format!("cidd1:{d}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub identity: Identity,
    pub lhs: PowerSeries,
    pub rhs: PowerSeries,
    /// Smallest total degree where the two sides (or any auxiliary form) differ.
    pub first_mismatch: Option<u32>,
}

impl IdentityReport {
    pub fn verified(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn verify_identity(which: Identity, order: u32) -> Result<IdentityReport> {
    let (lhs, rhs, extra) = match which {
        Identity::Cid1 => {
            let mut lhs = q_series(order);
            for n in (1..=order).step_by(2) {
                lhs = lhs.mul_one_minus_pow(&[n], &BigInt::from(-1))?;
            }
            let mut rhs = q_series(order);
            for s in 1..=order {
                let mut f = q_series(order);
                f.add_term(vec![s], BigInt::one());
                rhs = rhs.mul(&f)?;
            }
            (lhs, rhs, None)
        }
        Identity::Cid2(m) => {
            let mut lhs = q_series(order);
            for n in (1..=order).filter(|n| n % (m + 1) != 0) {
                lhs = lhs.mul_one_minus_pow(&[n], &BigInt::from(-1))?;
            }
            let mut rhs = q_series(order);
            for s in 1..=order {
                let mut f = q_series(order);
                for k in 1..=m {
                    f.add_term(vec![s * k], BigInt::one());
                }
                rhs = rhs.mul(&f)?;
            }
            (lhs, rhs, None)
        }
        Identity::Cidd(d) => {
            let d = d as usize;
            let names: Vec<String> = (1..=d).map(|i| format!("q{i}")).collect();
            let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let census = good_cyclic_census(d, order, DEFAULT_LENGTH_CAP)?;
            let mut lhs = PowerSeries::one(&vars, order);
            for (content, c) in &census {
                let r: u32 = content.iter().sum();
                let e = if r.is_multiple_of(2) {
                    BigInt::from(*c)
                } else {
                    -BigInt::from(*c)
                };
                lhs = lhs.mul_one_minus_pow(content, &e)?;
            }
            let mut rhs = PowerSeries::one(&vars, order);
            for s in 1..=order {
                let mut f = PowerSeries::one(&vars, order);
                for i in 0..d {
                    let mut e = vec![0; d];
                    e[i] = s;
                    f.add_term(e, BigInt::one());
                }
                rhs = rhs.mul(&f)?;
            }
            (lhs, rhs, None)
        }
        Identity::Cidd1(d) => {
            let mut lhs = q_series(order);
            for r in 1..=order {
                let phi = necklaces(d as u64, r as u64);
                let e = if r % 2 == 0 { phi } else { -phi };
                lhs = lhs.mul_one_minus_pow(&[r], &e)?;
            }
            for j in 1.. {
                let odd = 2 * j - 1;
                if 2 * odd > order {
                    break;
                }
                let mm = primitive_necklaces(d as u64, odd as u64);
                for k in (1..).take_while(|k| 2 * k * odd <= order) {
                    lhs = lhs.mul_one_minus_pow(&[2 * k * odd], &-mm.clone())?;
                }
            }
            let mut rhs = q_series(order);
            for s in 1..=order {
                let mut f = q_series(order);
                f.add_term(vec![s], BigInt::from(d));
                rhs = rhs.mul(&f)?;
            }
            // the same left side with exponents counted by brute force
            let census = good_cyclic_census(d as usize, order, DEFAULT_LENGTH_CAP)?;
            let mut c = vec![0u64; order as usize + 1];
            for (content, n) in census {
                c[content.iter().sum::<u32>() as usize] += n;
            }
            let mut brute = q_series(order);
            for r in 1..=order {
                let e = BigInt::from(c[r as usize]);
                let e = if r % 2 == 0 { e } else { -e };
                brute = brute.mul_one_minus_pow(&[r], &e)?;
            }
            (lhs, rhs, Some(brute))
        }
    };
    let mut first_mismatch = lhs.first_mismatch(&rhs);
    if let Some(b) = &extra {
        first_mismatch = min_opt(first_mismatch, b.first_mismatch(&rhs));
    }
    Ok(IdentityReport {
        identity: which,
        lhs,
        rhs,
        first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin_census;
    use proptest::prelude::*;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coefficients().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    /// Partitions of `n` into distinct parts, by direct recursion.
    fn distinct_partitions(n: u32, min: u32) -> u64 {
        if n == 0 {
            return 1;
        }
        (min..=n).map(|p| distinct_partitions(n - p, p + 1)).sum()
    }

    #[test]
    fn chi_rep_examples() {
        let dual = builtin_census("dual-numbers", 10).unwrap();
        assert_eq!(ints(&chi_rep(&dual, 1, 3).unwrap()), vec![1, 1, 0, 1]);
        assert_eq!(ints(&chi_rep(&dual, 0, 5).unwrap()), vec![1, 0, 0, 0, 0, 0]);
        let plane = builtin_census("commuting-plane", 10).unwrap();
        assert_eq!(ints(&chi_rep(&plane, 1, 2).unwrap()), vec![1, 2, 2]);
    }

    #[test]
    fn zeta_of_dual_numbers_counts_distinct_partitions() {
        let dual = builtin_census("dual-numbers", 12).unwrap();
        let z = ints(&zeta_closed(&dual, 12).unwrap());
        let expect: Vec<i64> = (0..=12).map(|n| distinct_partitions(n, 1) as i64).collect();
        assert_eq!(z, expect);
        assert_eq!(&z[..10], &[1, 1, 1, 2, 2, 3, 4, 5, 6, 8]);
    }

    #[test]
    fn zeta_of_empty_census_is_one() {
        let z = zeta_closed(&GeneratorCensus::default(), 6).unwrap();
        assert_eq!(ints(&z), vec![1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn trains_match_truncated_census() {
        for m in 1..=3 {
            let census = builtin_census(&format!("truncated:{m}"), 20).unwrap();
            assert_eq!(
                zeta_trains(m, 20).unwrap(),
                zeta_closed(&census, 20).unwrap(),
                "m = {m}"
            );
        }
        let single: Vec<_> = trains(3, 4).into_iter().filter(|t| t.len() == 1).collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].weight(), 4);
    }

    #[test]
    fn molien_weyl_rank_one_is_chi_rep() {
        for name in ["dual-numbers", "commuting-plane", "square-zero:2"] {
            let c = builtin_census(name, 8).unwrap();
            assert_eq!(
                molien_weyl(&c, 1, 8, 1_000_000).unwrap(),
                chi_rep(&c, 1, 8).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn molien_weyl_stabilizes_towards_zeta() {
        let c = builtin_census("dual-numbers", 8).unwrap();
        let z = ints(&zeta_closed(&c, 8).unwrap());
        for n in 1..=3usize {
            let mw = ints(&molien_weyl(&c, n, 8, 1_000_000).unwrap());
            for s in 0..=n {
                assert_eq!(mw[s], z[s], "n = {n}, s = {s}");
            }
        }
        let mw2 = ints(&molien_weyl(&c, 2, 4, 1_000_000).unwrap());
        assert_eq!(mw2[2], 1);
    }

    #[test]
    fn sym_hc_examples() {
        let a: BTreeMap<u32, i64> = (0..10).map(|j| (2 * j + 1, 1)).collect();
        let s = chi_sym_hc(&a, &BTreeMap::new(), 12).unwrap();
        let cid = verify_identity(Identity::Cid1, 12).unwrap();
        assert_eq!(s, cid.lhs);
        assert_eq!(ints(&chi_sym_hc(&a, &a, 12).unwrap())[1..], [0; 12]);
    }

    #[test]
    fn necklace_small_values() {
        let rows = necklace_counts(2, 12, 12).unwrap();
        assert!(rows.iter().all(NecklaceRow::agrees));
        assert_eq!(rows[1].phi, BigInt::from(3));
        assert_eq!(rows[1].primitive, BigInt::from(1));
        assert_eq!(rows[2].primitive, BigInt::from(2));
        for d in 1..=3 {
            let r1 = &necklace_counts(d, 1, 1).unwrap()[0];
            assert_eq!(
                (r1.phi.clone(), r1.primitive.clone()),
                (BigInt::from(d), BigInt::from(d))
            );
        }
    }

    #[test]
    fn necklace_formulas_match_enumeration() {
        for d in 1..=3 {
            assert!(necklace_counts(d, 12, 12).unwrap().iter().all(NecklaceRow::agrees));
        }
    }

    #[test]
    fn good_cyclic_small_counts() {
        assert_eq!(good_cyclic_count(&[2], 16).unwrap(), 0);
        assert_eq!(good_cyclic_count(&[1], 16).unwrap(), 1);
        assert_eq!(good_cyclic_count(&[1, 1], 16).unwrap(), 1);
        assert!(good_cyclic_count(&[17], 16).is_err());
    }

    #[test]
    fn identities_hold() {
        assert!(verify_identity(Identity::Cid1, 30).unwrap().verified());
        assert!(verify_identity(Identity::Cid2(3), 30).unwrap().verified());
        assert!(verify_identity(Identity::Cidd1(2), 14).unwrap().verified());
        assert!(verify_identity(Identity::Cidd(2), 8).unwrap().verified());
    }

    #[test]
    fn identity_names_round_trip() {
        for id in [Identity::Cid1, Identity::Cid2(3), Identity::Cidd(2), Identity::Cidd1(4)] {
            assert_eq!(Identity::parse(&id.name()).unwrap(), id);
        }
        assert!(Identity::parse("cid2").is_err());
        assert!(Identity::parse("cid9").is_err());
    }

    proptest! {
        #[test]
        fn inverse_is_inverse(cs in proptest::collection::vec(-5i64..5, 1..8)) {
            let mut v = vec![1];
            v.extend(cs);
            let s = PowerSeries::from_coefficients(&v, 10);
            let p = s.mul(&s.inverse().unwrap()).unwrap();
            prop_assert_eq!(p, q_series(10));
        }

        #[test]
        fn binomial_factor_matches_pow(i in 1u32..4, e in -4i64..5) {
            let mut base = q_series(12);
            base.add_term(vec![i], BigInt::from(-1));
            let direct = base.pow(e).unwrap();
            let binom = q_series(12).mul_one_minus_pow(&[i], &BigInt::from(e)).unwrap();
            prop_assert_eq!(direct, binom);
        }
    }
}
