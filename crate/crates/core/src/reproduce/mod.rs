//! Executable acceptance checks. Each criterion recomputes its data from
//! scratch and compares it with values fixed by the definitions.

pub mod properties;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use crate::cyclic::cyclic_complex;
use crate::derham::{p3_check, reduced_hdr, stable_derham};
use crate::error::{Error, Result};
use crate::homology::{betti, euler_of_complex, free_graded_commutative_closure, les_check, BettiTable};
use crate::koszul::{
    ce_complex, standard_cochain, tau_rn, theta_chain_map_violations, twisted_tensor, verify_bar_cochain,
    verify_cochain, verify_tau_rn, BarCochain, FiniteGradedAlgebra, GlAlgebra,
};
use crate::presentation::{builtin_census, builtin_resolution};
use crate::rep::{
    empirical_stability, invariant_subcomplex, obstruction_complex, rep_n, stable_complex, sym_trace_matrix,
};
use crate::series::{chi_rep, molien_weyl, necklace_counts, verify_identity, zeta_closed, zeta_trains, Identity};

pub use properties::{run_all_properties, run_property, PropertyReport, PROPERTY_NAMES};

/// Number of criteria in the suite.
pub const CRITERIA: u32 = 14;

/// Randomized cases per property suite in criterion 14.
pub const PROPERTY_CASES: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scoreboard {
    pub results: Vec<CriterionResult>,
}

impl Scoreboard {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "DG validation of the built-in resolutions",
        2 => "rank-one homology of the dual numbers",
        3 => "rank-one homology of the commuting plane",
        4 => "reduced cyclic homology of the dual numbers",
        5 => "stable homology is free on cyclic homology",
        6 => "invariant homology stabilizes for the dual numbers",
        7 => "trace surjectivity in degree 0 and its failure above",
        8 => "obstruction complex additivity and the sandwich kernel",
        9 => "generating-function identities",
        10 => "Molien–Weyl series",
        11 => "twisting cochains and the trace chain map",
        12 => "Chevalley–Eilenberg invariants of square-zero(1)",
        13 => "de Rham vanishing and the forms comparison",
        14 => "randomized property suites",
        _ => "unknown criterion",
    }
}

/// Runs one criterion. Internal errors count as failures with the error as detail.
pub fn run_criterion(id: u32, budget: usize) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => c1(),
        2 => c2(budget),
        3 => c3(budget),
        4 => c4(),
        5 => c5(budget),
        6 => c6(budget),
        7 => c7(budget),
        8 => c8(budget),
        9 => c9(),
        10 => c10(budget),
        11 => c11(budget),
        12 => c12(budget),
        13 => c13(budget),
        14 => c14(),
        _ => Err(Error::InvalidArgument(format!("criteria are numbered 1..={CRITERIA}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        title: title(id).to_string(),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_suite(ids: &[u32], budget: usize) -> Scoreboard {
    Scoreboard {
        results: ids.iter().map(|&id| run_criterion(id, budget)).collect(),
    }
}

type Outcome = Result<(bool, String)>;

/// Collects mismatch messages; the criterion passes when none were recorded.
#[derive(Default)]
struct Tally {
    checked: usize,
    problems: Vec<String>,
}

impl Tally {
    fn expect<T: PartialEq + std::fmt::Debug>(&mut self, what: impl FnOnce() -> String, got: T, want: T) {
        self.checked += 1;
        if got != want {
            self.problems
                .push(format!("{}: got {got:?}, expected {want:?}", what()));
        }
    }

    fn finish(self) -> Outcome {
        const SHOWN: usize = 6;
        if self.problems.is_empty() {
            return Ok((true, format!("{} checks", self.checked)));
        }
        let mut s = format!("{} of {} checks failed: ", self.problems.len(), self.checked);
        s.push_str(&self.problems.iter().take(SHOWN).cloned().collect::<Vec<_>>().join("; "));
        if self.problems.len() > SHOWN {
            let _ = write!(s, "; …");
        }
        Ok((false, s))
    }
}

fn nonzero_cells(b: &BettiTable) -> BTreeMap<(i32, u32), usize> {
    b.dims().into_iter().filter(|(_, d)| *d > 0).collect()
}

fn c1() -> Outcome {
    let mut t = Tally::default();
    for (name, w) in [
        ("dual-numbers", 12),
        ("square-zero:1", 8),
        ("square-zero:2", 8),
        ("commuting-plane", 12),
        ("sandwich", 4),
    ] {
        let r = builtin_resolution(name, w)?.verify_d_squared(w)?;
        t.expect(|| format!("d² on {name} to weight {w}"), r.violations, vec![]);
    }
    t.finish()
}

fn c2(budget: usize) -> Outcome {
    let p = builtin_resolution("dual-numbers", 8)?;
    let b = betti(&rep_n(&p, 1)?.complex(8, budget)?)?;
    let mut t = Tally::default();
    for w in 0..=8 {
        t.expect(|| format!("H_1 weight {w}"), b.get(1, w), 0);
    }
    for (h, w, d) in [(3, 5, 1), (3, 6, 1), (3, 7, 0), (5, 7, 1), (5, 8, 2)] {
        t.expect(|| format!("H_{h} weight {w}"), b.get(h, w), d);
    }
    t.finish()
}

fn c3(budget: usize) -> Outcome {
    let p = builtin_resolution("commuting-plane", 6)?;
    let b = betti(&rep_n(&p, 1)?.complex(6, budget)?)?;
    let mut t = Tally::default();
    for k in 0..=3i32 {
        for w in 0..=6u32 {
            let want = (w as i64 - 2 * k as i64 + 1).max(0) as usize;
            t.expect(|| format!("H_{k} weight {w}"), b.get(k, w), want);
        }
    }
    t.finish()
}

fn c4() -> Outcome {
    let p = builtin_resolution("dual-numbers", 9)?;
    let b = betti(&cyclic_complex(&p, 9)?)?;
    let want: BTreeMap<(i32, u32), usize> = (0..=4).map(|j| ((2 * j, 2 * j as u32 + 1), 1)).collect();
    let mut t = Tally::default();
    t.expect(|| "nonzero cells through weight 9".into(), nonzero_cells(&b), want);
    t.finish()
}

fn c5(budget: usize) -> Outcome {
    let mut t = Tally::default();
    for name in ["dual-numbers", "commuting-plane"] {
        let p = builtin_resolution(name, 8)?;
        let stable = betti(&stable_complex(&p, 8)?.complex(budget)?)?;
        let cyc = betti(&cyclic_complex(&p, 8)?)?;
        let closure: BTreeMap<(i32, u32), u64> = free_graded_commutative_closure(&cyc.dims(), 8)
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .collect();
        let got: BTreeMap<(i32, u32), u64> = nonzero_cells(&stable).into_iter().map(|(k, d)| (k, d as u64)).collect();
        t.expect(|| format!("{name}: stable vs closure"), got, closure);
    }
    t.finish()
}

fn c6(budget: usize) -> Outcome {
    let p = builtin_resolution("dual-numbers", 4)?;
    let rows = empirical_stability(&p, 4, 4, budget)?;
    let mut t = Tally::default();
    for row in &rows {
        let w = row.weight;
        let at4: BTreeMap<i32, usize> = row.per_n[3]
            .iter()
            .filter(|(_, d)| **d > 0)
            .map(|(h, d)| (*h, *d))
            .collect();
        let stable: BTreeMap<i32, usize> = row
            .stable
            .iter()
            .filter(|(_, d)| **d > 0)
            .map(|(h, d)| (*h, *d))
            .collect();
        t.expect(|| format!("weight {w}: n = 4 vs stable"), at4, stable);
        let ok = row.reached.is_some_and(|n| n <= w.max(1));
        t.expect(|| format!("weight {w}: N(w) = {:?} ≤ max(w, 1)", row.reached), ok, true);
    }
    t.finish()
}

fn c7(budget: usize) -> Outcome {
    let mut t = Tally::default();
    for name in ["dual-numbers", "commuting-plane"] {
        let p = builtin_resolution(name, 4)?;
        for n in 1..=3 {
            let alg = rep_n(&p, n)?;
            for w in 1..=4 {
                let m = sym_trace_matrix(&p, n, 0, w, budget)?;
                let inv = alg.invariant_dimension(0, w, budget)?;
                t.expect(
                    || format!("{name} n = {n} w = {w}: trace rank vs invariants"),
                    m.rank,
                    inv,
                );
            }
        }
    }
    let p = builtin_resolution("dual-numbers", 5)?;
    let stable = betti(&stable_complex(&p, 5)?.complex(budget)?)?;
    let rank_one = betti(&rep_n(&p, 1)?.complex(5, budget)?)?;
    t.expect(|| "stable H_3 weight 5".into(), stable.get(3, 5), 0);
    t.expect(|| "H_3(A, 1) weight 5".into(), rank_one.get(3, 5), 1);
    t.finish()
}

fn c8(budget: usize) -> Outcome {
    let mut t = Tally::default();
    let p = builtin_resolution("dual-numbers", 5)?;
    let k = obstruction_complex(&p, 1, 5, budget)?;
    let inv = invariant_subcomplex(&p, 1, 5, budget)?;
    let mid = stable_complex(&p, 5)?.complex(budget)?;
    let r = les_check(&k, &mid, &inv)?;
    t.expect(
        || "long exact sequence and Euler additivity".into(),
        r.violations,
        vec![],
    );
    for w in 0..=5 {
        let sum = r.euler_sub.get(&w).copied().unwrap_or(0) + r.euler_quot.get(&w).copied().unwrap_or(0);
        t.expect(
            || format!("χ additivity at weight {w}"),
            sum,
            r.euler_mid.get(&w).copied().unwrap_or(0),
        );
    }
    let s = builtin_resolution("sandwich", 4)?;
    let ks = obstruction_complex(&s, 1, 4, budget)?;
    for r in 0..=4 {
        t.expect(|| format!("sandwich K_{{{r},1}}"), ks.dim(1, r), 0);
    }
    t.finish()
}

fn c9() -> Outcome {
    let mut t = Tally::default();
    for (id, order) in [
        (Identity::Cid1, 30),
        (Identity::Cid2(2), 30),
        (Identity::Cid2(3), 30),
        (Identity::Cidd1(2), 14),
    ] {
        let r = verify_identity(id, order)?;
        t.expect(
            || format!("{} to q^{order}: first mismatch", id.name()),
            r.first_mismatch,
            None,
        );
    }
    for m in 1..=3 {
        let census = builtin_census(&format!("truncated:{m}"), 20)?;
        let a = zeta_trains(m, 20)?;
        let b = zeta_closed(&census, 20)?;
        t.expect(
            || format!("zeta trains m = {m}: first mismatch"),
            a.first_mismatch(&b),
            None,
        );
    }
    for row in necklace_counts(2, 12, 12)? {
        t.expect(|| format!("necklace counts r = {}", row.r), row.agrees(), true);
    }
    t.finish()
}

fn c10(budget: usize) -> Outcome {
    let mut t = Tally::default();
    let census = builtin_census("dual-numbers", 12)?;
    let mw1 = molien_weyl(&census, 1, 12, budget)?;
    t.expect(
        || "n = 1 against chi_rep".into(),
        mw1.first_mismatch(&chi_rep(&census, 1, 12)?),
        None,
    );
    let zeta = zeta_closed(&builtin_census("dual-numbers", 8)?, 8)?;
    let census8 = builtin_census("dual-numbers", 8)?;
    for n in 1..=3usize {
        let mw = molien_weyl(&census8, n, 8, budget)?;
        for s in 0..=n as u32 {
            t.expect(
                || format!("n = {n}, q^{s} against zeta"),
                mw.coeff(&[s]),
                zeta.coeff(&[s]),
            );
        }
    }
    let mw2 = molien_weyl(&census8, 2, 4, budget)?;
    let p = builtin_resolution("dual-numbers", 4)?;
    let chi = euler_of_complex(&invariant_subcomplex(&p, 2, 4, budget)?);
    for w in 0..=4u32 {
        let e = BigInt::from(chi.get(&w).copied().unwrap_or(0));
        t.expect(
            || format!("n = 2, q^{w} against invariant Euler characteristic"),
            mw2.coeff(&[w]),
            e,
        );
    }
    t.finish()
}

fn c11(budget: usize) -> Outcome {
    let mut t = Tally::default();
    let f = BarCochain::dual_numbers(11)?;
    let r = verify_bar_cochain(&f, 10)?;
    t.expect(|| "f_k to degree 10".into(), r.failures, vec![]);
    let f8 = BarCochain::dual_numbers(8)?;
    for r in 1..=2 {
        for n in 1..=2 {
            let rep = verify_tau_rn(&tau_rn(&f8, r, n)?, 8, budget)?;
            t.expect(|| format!("τ_{{{r},{n}}} to degree 8"), rep.failures, vec![]);
        }
    }
    let dual = Arc::new(FiniteGradedAlgebra::dual_numbers());
    for r in 1..=2 {
        let gl = GlAlgebra::new(Arc::clone(&dual), r)?;
        let v = theta_chain_map_violations(&gl, 4, budget)?;
        t.expect(|| format!("ϑ chain map, r = {r}, weight ≤ 4"), v, vec![]);
    }
    for odd in [false, true] {
        let (c, alg, tau) = standard_cochain(odd, 6)?;
        t.expect(
            || format!("standard cochain MC (odd = {odd})"),
            verify_cochain(&c, &alg, &tau)?.failures,
            vec![],
        );
        let b = betti(&twisted_tensor(&c, &alg, &tau, 6, budget)?)?;
        t.expect(
            || format!("standard twisted tensor (odd = {odd})"),
            nonzero_cells(&b),
            BTreeMap::from([((0, 0), 1)]),
        );
    }
    t.finish()
}

/// Partitions of `k` into distinct odd parts at most `max`, by recursion.
fn distinct_odd_partitions(k: u32, max: u32) -> usize {
    fn go(k: u32, part: u32, max: u32) -> usize {
        if k == 0 {
            return 1;
        }
        (part..=max.min(k)).step_by(2).map(|p| go(k - p, p + 2, max)).sum()
    }
    go(k, 1, max)
}

fn c12(budget: usize) -> Outcome {
    let mut t = Tally::default();
    let alg = Arc::new(FiniteGradedAlgebra::square_zero(1));
    for r in 2..=3usize {
        let c = ce_complex(&GlAlgebra::new(Arc::clone(&alg), r)?, 5, 5, budget)?;
        for k in 0..=5u32 {
            t.expect(
                || format!("r = {r}, k = {k}"),
                c.dim(k as i32, k),
                distinct_odd_partitions(k, 2 * r as u32 - 1),
            );
        }
    }
    t.finish()
}

fn c13(budget: usize) -> Outcome {
    let mut t = Tally::default();
    for name in ["free:1", "commuting-plane"] {
        let b = reduced_hdr(&builtin_resolution(name, 6)?, 6)?;
        t.expect(
            || format!("reduced HDR of {name} to weight 6"),
            nonzero_cells(&b),
            BTreeMap::new(),
        );
    }
    let plane = builtin_resolution("commuting-plane", 4)?;
    for n in 1..=2 {
        let r = p3_check(&plane, n, 4)?;
        t.expect(|| format!("forms comparison at n = {n}"), r.mismatches, vec![]);
    }
    for name in ["dual-numbers", "commuting-plane"] {
        let b = stable_derham(&builtin_resolution(name, 5)?, 5, budget)?;
        t.expect(
            || format!("stable de Rham of {name} to weight 5"),
            nonzero_cells(&b),
            BTreeMap::from([((0, 0), 1)]),
        );
    }
    t.finish()
}

fn c14() -> Outcome {
    let mut t = Tally::default();
    for (i, name) in PROPERTY_NAMES.iter().enumerate() {
        let r = run_property(name, PROPERTY_CASES, 0x5eed + i as u64)?;
        t.expect(|| format!("{name} ({} cases)", r.cases), r.failures, vec![]);
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_odd_small_values() {
        // 1, 1, 0, 1, 1, 1 for k = 0..=5 with parts up to 5
        let v: Vec<usize> = (0..=5).map(|k| distinct_odd_partitions(k, 5)).collect();
        assert_eq!(v, vec![1, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn unknown_criterion_fails_cleanly() {
        let r = run_criterion(99, 1000);
        assert!(!r.passed);
        assert!(r.detail.starts_with("error"));
    }

    #[test]
    fn tally_reports_mismatches() {
        let mut t = Tally::default();
        t.expect(|| "a".into(), 1, 1);
        t.expect(|| "b".into(), 1, 2);
        let (ok, detail) = t.finish().unwrap();
        assert!(!ok);
        assert!(detail.starts_with("1 of 2 checks failed: b"));
    }
}
