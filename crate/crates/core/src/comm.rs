//! Free graded-commutative algebras `Sym(V_even) ⊗ Λ(V_odd)` and free
//! commutative DG algebras on them.
//!
//! Variables live in a [`VarTable`] whose order is fixed by the caller; every
//! monomial is kept sorted in that order with its reordering sign absorbed in
//! the coefficient.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graded::render_terms;
use crate::homology::{Cell, SparseVec, TruncatedComplex};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub hdeg: i32,
    pub weight: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, hdeg: i32, weight: u32) -> Self {
        Variable {
            name: name.into(),
            hdeg,
            weight,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.hdeg.rem_euclid(2) == 1
    }
}

/// Ordered commutative variables; the order is the one given at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    vars: Vec<Variable>,
    odd: Vec<bool>,
    index: HashMap<String, u32>,
}

impl VarTable {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.name.clone(), i as u32).is_some() {
                return Err(Error::DuplicateGenerator(v.name.clone()));
            }
        }
        let odd = vars.iter().map(Variable::is_odd).collect();
        Ok(VarTable { vars, odd, index })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, i: u32) -> &Variable {
        &self.vars[i as usize]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn position(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn is_odd(&self, i: u32) -> bool {
        self.odd[i as usize]
    }
}

/// A sorted monomial: `(variable, exponent)` pairs with positive exponents,
/// odd variables to the first power only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CommMonomial(Vec<(u32, u32)>);

impl CommMonomial {
    pub fn one() -> Self {
        CommMonomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        CommMonomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn hdeg(&self, t: &VarTable) -> i32 {
        self.0.iter().map(|&(v, e)| t.get(v).hdeg * e as i32).sum()
    }

    pub fn weight(&self, t: &VarTable) -> u32 {
        self.0.iter().map(|&(v, e)| t.get(v).weight * e).sum()
    }

    pub fn is_odd(&self, t: &VarTable) -> bool {
        self.0.iter().filter(|&&(v, _)| t.is_odd(v)).count() % 2 == 1
    }

    pub fn render(&self, t: &VarTable) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for &(v, e) in &self.0 {
            for _ in 0..e {
                parts.push(t.get(v).name.as_str());
            }
        }
        parts.join("*")
    }
}

/// Sorts a product of variables into canonical order.
///
/// Returns the monomial and the Koszul sign of the sort, or `None` when an odd
/// variable occurs twice.
pub fn normalize_comm(t: &VarTable, factors: &[u32]) -> Option<(CommMonomial, Scalar)> {
    let mut inversions = 0usize;
    let odd: Vec<u32> = factors.iter().copied().filter(|&v| t.is_odd(v)).collect();
    for (i, &a) in odd.iter().enumerate() {
        for &b in &odd[..i] {
            if b == a {
                return None;
            }
            if b > a {
                inversions += 1;
            }
        }
    }
    let mut sorted: Vec<u32> = factors.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((u, e)) if *u == v => *e += 1,
            _ => out.push((v, 1)),
        }
    }
    Some((CommMonomial(out), crate::scalar::sign(inversions % 2 == 1)))
}

/// Product of two canonical monomials: the result and whether the sign is
/// negative, or `None` if it vanishes.
pub fn mul_monomials(t: &VarTable, a: &CommMonomial, b: &CommMonomial) -> Option<(CommMonomial, bool)> {
    let mut out = Vec::with_capacity(a.0.len() + b.0.len());
    let mut neg = false;
    // odd variables of `a` not yet passed; each odd variable of `b` that is
    // placed before them crosses all of them
    let mut odd_a_remaining = a.0.iter().filter(|(v, _)| t.is_odd(*v)).count();
    let (mut i, mut j) = (0, 0);
    while i < a.0.len() || j < b.0.len() {
        let take_a = match (a.0.get(i), b.0.get(j)) {
            (Some(x), Some(y)) => {
                if x.0 == y.0 {
                    if t.is_odd(x.0) {
                        return None;
                    }
                    out.push((x.0, x.1 + y.1));
                    i += 1;
                    j += 1;
                    continue;
                }
                x.0 < y.0
            }
            (Some(_), None) => true,
            _ => false,
        };
        if take_a {
            if t.is_odd(a.0[i].0) {
                odd_a_remaining -= 1;
            }
            out.push(a.0[i]);
            i += 1;
        } else {
            if t.is_odd(b.0[j].0) && odd_a_remaining % 2 == 1 {
                neg = !neg;
            }
            out.push(b.0[j]);
            j += 1;
        }
    }
    Some((CommMonomial(out), neg))
}

/// An element of the free graded-commutative algebra on a [`VarTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommPoly {
    table: Arc<VarTable>,
    terms: BTreeMap<CommMonomial, Scalar>,
}

impl CommPoly {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        CommPoly {
            table: Arc::clone(table),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::monomial(table, CommMonomial::one(), Scalar::one())
    }

    pub fn var(table: &Arc<VarTable>, v: u32) -> Self {
        Self::monomial(table, CommMonomial::var(v), Scalar::one())
    }

    pub fn monomial(table: &Arc<VarTable>, m: CommMonomial, c: Scalar) -> Self {
        let mut p = Self::zero(table);
        p.add_term(m, c);
        p
    }

    /// The product of `factors` in the given order.
    pub fn product_of_vars(table: &Arc<VarTable>, factors: &[u32]) -> Self {
        match normalize_comm(table, factors) {
            Some((m, s)) => Self::monomial(table, m, s),
            None => Self::zero(table),
        }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    fn check(&self, other: &CommPoly) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) || self.table == other.table {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CommMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &CommMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: CommMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &CommPoly, c: &Scalar) -> Result<()> {
        self.check(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
        Ok(())
    }

    pub fn add(&self, other: &CommPoly) -> Result<CommPoly> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &CommPoly) -> Result<CommPoly> {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Scalar::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> CommPoly {
        let mut out = Self::zero(&self.table);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        out
    }

    pub fn mul(&self, other: &CommPoly) -> Result<CommPoly> {
        self.check(other)?;
        let mut out = Self::zero(&self.table);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((m, neg)) = mul_monomials(&self.table, a, b) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `(hdeg, weight)` if all terms share it; `None` for zero or mixed.
    pub fn bidegree(&self) -> Option<(i32, u32)> {
        let mut it = self.terms.keys().map(|m| (m.hdeg(&self.table), m.weight(&self.table)));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// The algebra map sending variable `v` to `images[v]`.
    ///
    /// Images must have the parity of the variable they replace.
    pub fn substitute(&self, target: &Arc<VarTable>, images: &[CommPoly]) -> Result<CommPoly> {
        let mut out = CommPoly::zero(target);
        for (m, c) in &self.terms {
            let mut acc = CommPoly::monomial(target, CommMonomial::one(), c.clone());
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    acc = acc.mul(&images[v as usize])?;
                    if acc.is_zero() {
                        break;
                    }
                }
            }
            out.add_assign_scaled(&acc, &Scalar::one())?;
        }
        Ok(out)
    }

    /// Applies the derivation that sends variable `v` to `images[v]`.
    ///
    /// An odd derivation picks up the Koszul sign of the factors it passes;
    /// an even one does not.
    pub fn derive(&self, images: &[CommPoly], odd: bool) -> Result<CommPoly> {
        let t = &self.table;
        let mut out = CommPoly::zero(t);
        for (m, c) in &self.terms {
            let f = &m.0;
            let mut prefix_odd = false;
            for (i, &(v, e)) in f.iter().enumerate() {
                let img = &images[v as usize];
                if !img.is_zero() {
                    let mut left = f[..i].to_vec();
                    if e > 1 {
                        left.push((v, e - 1));
                    }
                    let left = CommMonomial(left);
                    let right = CommMonomial(f[i + 1..].to_vec());
                    let mut coeff = c * Scalar::from_integer(e.into());
                    if odd && prefix_odd {
                        coeff = -coeff;
                    }
                    let lp = CommPoly::monomial(t, left, coeff);
                    let term = lp.mul(img)?.mul(&CommPoly::monomial(t, right, Scalar::one()))?;
                    out.add_assign_scaled(&term, &Scalar::one())?;
                }
                if t.is_odd(v) && e % 2 == 1 {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        render_terms(self.terms.iter().map(|(m, c)| (m.render(&self.table), c)))
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A free graded-commutative algebra with a differential of degree -1 given on
/// the variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCdga {
    table: Arc<VarTable>,
    diff: Vec<CommPoly>,
}

impl FreeCdga {
    pub fn new(table: Arc<VarTable>, diff: Vec<CommPoly>) -> Result<Self> {
        if diff.len() != table.len() {
            return Err(Error::LengthMismatch {
                left: diff.len(),
                right: table.len(),
            });
        }
        for (i, p) in diff.iter().enumerate() {
            let v = table.get(i as u32);
            p.check(&CommPoly::zero(&table))?;
            if let Some((h, w)) = p.bidegree() {
                if h != v.hdeg - 1 || w != v.weight {
                    return Err(Error::Degree {
                        name: v.name.clone(),
                        msg: format!(
                            "differential has bidegree ({h}, {w}), expected ({}, {})",
                            v.hdeg - 1,
                            v.weight
                        ),
                    });
                }
            } else if !p.is_zero() {
                return Err(Error::Degree {
                    name: v.name.clone(),
                    msg: "differential is not homogeneous".into(),
                });
            }
        }
        Ok(FreeCdga { table, diff })
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn diff(&self) -> &[CommPoly] {
        &self.diff
    }

    pub fn d(&self, p: &CommPoly) -> Result<CommPoly> {
        p.derive(&self.diff, true)
    }

    /// The presentation file form, with the `commutative` header.
    pub fn render(&self) -> String {
        let mut out = String::from("commutative\n");
        for v in self.table.vars() {
            out.push_str(&format!("generator {} hdeg {} weight {}\n", v.name, v.hdeg, v.weight));
        }
        for (v, p) in self.table.vars().iter().zip(&self.diff) {
            if !p.is_zero() {
                out.push_str(&format!("d {} = {}\n", v.name, p.render()));
            }
        }
        out
    }

    /// Variables whose image under `d∘d` is nonzero, with that image.
    pub fn d_squared_violations(&self) -> Result<Vec<(String, CommPoly)>> {
        let mut out = Vec::new();
        for (i, p) in self.diff.iter().enumerate() {
            let dd = self.d(p)?;
            if !dd.is_zero() {
                out.push((self.table.get(i as u32).name.clone(), dd));
            }
        }
        Ok(out)
    }

    /// All monomials of the given weight, grouped by hdeg.
    pub fn monomials_of_weight(&self, weight: u32, budget: usize) -> Result<BTreeMap<i32, Vec<CommMonomial>>> {
        monomials_of_weight(&self.table, weight, budget)
    }

    /// The complex of all weights `0..=max_weight`.
    pub fn complex(&self, max_weight: u32, budget: usize) -> Result<TruncatedComplex> {
        let per_weight: Vec<Result<Vec<(i32, u32, Cell)>>> = (0..=max_weight)
            .into_par_iter()
            .map(|w| self.weight_cells(w, budget))
            .collect();
        let mut c = TruncatedComplex::new(max_weight);
        for cells in per_weight {
            for (h, w, cell) in cells? {
                c.insert_cell(h, w, cell);
            }
        }
        Ok(c)
    }

    fn weight_cells(&self, w: u32, budget: usize) -> Result<Vec<(i32, u32, Cell)>> {
        let groups = self.monomials_of_weight(w, budget)?;
        let index: HashMap<i32, HashMap<&CommMonomial, usize>> = groups
            .iter()
            .map(|(&h, ms)| (h, ms.iter().enumerate().map(|(i, m)| (m, i)).collect()))
            .collect();
        let mut out = Vec::new();
        for (&h, ms) in &groups {
            let target = index.get(&(h - 1));
            let rows: Result<Vec<SparseVec>> = ms
                .par_iter()
                .map(|m| {
                    let dm = self.d(&CommPoly::monomial(&self.table, m.clone(), Scalar::one()))?;
                    let mut row: SparseVec = Vec::with_capacity(dm.num_terms());
                    for (mm, c) in dm.terms() {
                        let j = target.and_then(|t| t.get(mm)).ok_or_else(|| {
                            Error::Inconsistent(format!(
                                "d({}) has term {} outside its cell",
                                m.render(&self.table),
                                mm.render(&self.table)
                            ))
                        })?;
                        row.push((*j, c.clone()));
                    }
                    row.sort_by_key(|(i, _)| *i);
                    Ok(row)
                })
                .collect();
            let labels = ms.iter().map(|m| m.render(&self.table)).collect();
            out.push((h, w, Cell::new(labels, rows?)));
        }
        Ok(out)
    }
}

/// Enumerates monomials of one weight, grouped by hdeg; fails once any group
/// exceeds `budget`.
pub fn monomials_of_weight(t: &VarTable, weight: u32, budget: usize) -> Result<BTreeMap<i32, Vec<CommMonomial>>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: &VarTable,
        v: usize,
        remaining: u32,
        hdeg: i32,
        cur: &mut Vec<(u32, u32)>,
        out: &mut BTreeMap<i32, Vec<CommMonomial>>,
        budget: usize,
        weight: u32,
    ) -> Result<()> {
        if remaining == 0 {
            let bucket = out.entry(hdeg).or_default();
            bucket.push(CommMonomial(cur.clone()));
            if bucket.len() > budget {
                return Err(Error::CellBudget {
                    hdeg,
                    weight,
                    size: bucket.len(),
                    budget,
                });
            }
            return Ok(());
        }
        if v == t.len() {
            return Ok(());
        }
        let var = t.get(v as u32);
        let max_e = if var.is_odd() { 1 } else { remaining / var.weight };
        for e in (0..=max_e).rev() {
            if e * var.weight > remaining {
                continue;
            }
            if e > 0 {
                cur.push((v as u32, e));
            }
            rec(
                t,
                v + 1,
                remaining - e * var.weight,
                hdeg + var.hdeg * e as i32,
                cur,
                out,
                budget,
                weight,
            )?;
            if e > 0 {
                cur.pop();
            }
        }
        Ok(())
    }
    if t.vars().iter().any(|v| v.weight == 0) {
        return Err(Error::InvalidArgument(
            "weight-0 variables make weight cells infinite".into(),
        ));
    }
    let mut out = BTreeMap::new();
    rec(t, 0, weight, 0, &mut Vec::new(), &mut out, budget, weight)?;
    for ms in out.values_mut() {
        ms.sort();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn table() -> Arc<VarTable> {
        Arc::new(
            VarTable::new(vec![
                Variable::new("x", 0, 1),
                Variable::new("y1", 1, 1),
                Variable::new("y2", 1, 1),
                Variable::new("z", 2, 1),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn normalize_examples() {
        let t = table();
        let (m, s) = normalize_comm(&t, &[2, 1]).unwrap();
        assert_eq!(m.render(&t), "y1*y2");
        assert_eq!(s, int(-1));
        let (m, s) = normalize_comm(&t, &[0, 0]).unwrap();
        assert_eq!(m, CommMonomial(vec![(0, 2)]));
        assert_eq!(s, int(1));
        assert!(normalize_comm(&t, &[1, 1]).is_none());
    }

    #[test]
    fn graded_commutativity_examples() {
        let t = table();
        let y1 = CommPoly::var(&t, 1);
        let y2 = CommPoly::var(&t, 2);
        assert_eq!(y1.mul(&y2).unwrap().render(), "y1*y2");
        assert_eq!(y2.mul(&y1).unwrap().render(), "-y1*y2");
        assert!(y1.mul(&y1).unwrap().is_zero());
        let x = CommPoly::var(&t, 0);
        assert_eq!(x.mul(&x).unwrap().render(), "x*x");
    }

    #[test]
    fn mismatched_tables_rejected() {
        let other = Arc::new(VarTable::new(vec![Variable::new("q", 0, 1)]).unwrap());
        let a = CommPoly::var(&table(), 0);
        let b = CommPoly::var(&other, 0);
        assert_eq!(a.mul(&b).unwrap_err(), Error::VariableMismatch);
    }

    #[test]
    fn leibniz_on_dual_numbers_level_one() {
        // k[x, x1], d x1 = x^2: d(x * x1) = x^3
        let t = Arc::new(VarTable::new(vec![Variable::new("x", 0, 1), Variable::new("x1", 1, 2)]).unwrap());
        let x = CommPoly::var(&t, 0);
        let cdga = FreeCdga::new(Arc::clone(&t), vec![CommPoly::zero(&t), x.mul(&x).unwrap()]).unwrap();
        let p = x.mul(&CommPoly::var(&t, 1)).unwrap();
        assert_eq!(cdga.d(&p).unwrap().render(), "x*x*x");
        assert!(cdga.d_squared_violations().unwrap().is_empty());
    }

    #[test]
    fn monomial_counts() {
        // x even, y1 y2 odd, z even, all weight 1: weight 2 monomials
        let ms = monomials_of_weight(&table(), 2, 100).unwrap();
        let total: usize = ms.values().map(Vec::len).sum();
        // x^2, z^2, xz, x y1, x y2, y1 z, y2 z, y1 y2
        assert_eq!(total, 8);
        assert!(matches!(
            monomials_of_weight(&table(), 2, 1),
            Err(Error::CellBudget { .. })
        ));
    }

    fn arb_poly() -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
        proptest::collection::vec((proptest::collection::vec(0u32..4, 0..4), -3i64..=3), 0..4)
    }

    fn build(t: &Arc<VarTable>, spec: &[(Vec<u32>, i64)], hdeg_parity: Option<bool>) -> CommPoly {
        let mut p = CommPoly::zero(t);
        for (f, c) in spec {
            let q = CommPoly::product_of_vars(t, f).scale(&int(*c));
            let odd = f.iter().filter(|&&v| t.is_odd(v)).count() % 2 == 1;
            if hdeg_parity.is_none_or(|par| par == odd) {
                p.add_assign_scaled(&q, &int(1)).unwrap();
            }
        }
        p
    }

    proptest! {
        #[test]
        fn graded_commutativity(a in arb_poly(), b in arb_poly(), pa: bool, pb: bool) {
            let t = table();
            let p = build(&t, &a, Some(pa));
            let q = build(&t, &b, Some(pb));
            let s = if pa && pb { int(-1) } else { int(1) };
            prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap().scale(&s));
        }

        #[test]
        fn associativity(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let t = table();
            let (p, q, r) = (build(&t, &a, None), build(&t, &b, None), build(&t, &c, None));
            prop_assert_eq!(
                p.mul(&q).unwrap().mul(&r).unwrap(),
                p.mul(&q.mul(&r).unwrap()).unwrap()
            );
        }

        #[test]
        fn normalization_idempotent(f in proptest::collection::vec(0u32..4, 0..6)) {
            let t = table();
            if let Some((m, _)) = normalize_comm(&t, &f) {
                let flat: Vec<u32> = m.factors().iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize)).collect();
                let (m2, s2) = normalize_comm(&t, &flat).unwrap();
                prop_assert_eq!(m2, m);
                prop_assert_eq!(s2, int(1));
            }
        }

        #[test]
        fn bidegree_additive(a in proptest::collection::vec(0u32..4, 1..4), b in proptest::collection::vec(0u32..4, 1..4)) {
            let t = table();
            let p = CommPoly::product_of_vars(&t, &a);
            let q = CommPoly::product_of_vars(&t, &b);
            let pq = p.mul(&q).unwrap();
            if let (Some((h1, w1)), Some((h2, w2)), Some(hw)) = (p.bidegree(), q.bidegree(), pq.bidegree()) {
                prop_assert_eq!(hw, (h1 + h2, w1 + w2));
            }
        }

        #[test]
        fn odd_derivation_is_leibniz(a in arb_poly(), b in arb_poly(), pa: bool) {
            // the derivation y1 -> x, z -> y2 (odd), others -> 0
            let t = table();
            let images = vec![
                CommPoly::zero(&t),
                CommPoly::var(&t, 0),
                CommPoly::zero(&t),
                CommPoly::var(&t, 2),
            ];
            let p = build(&t, &a, Some(pa));
            let q = build(&t, &b, None);
            let lhs = p.mul(&q).unwrap().derive(&images, true).unwrap();
            let s = if pa { int(-1) } else { int(1) };
            let rhs = p.derive(&images, true).unwrap().mul(&q).unwrap()
                .add(&p.mul(&q.derive(&images, true).unwrap()).unwrap().scale(&s)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
