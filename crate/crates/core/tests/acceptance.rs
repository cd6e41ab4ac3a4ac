//! Runs every acceptance criterion and prints one line per criterion.
//!
//! Two criteria carry expected values that the mathematics contradicts, and
//! they are pinned to fail in exactly the predicted cells:
//!
//! * Criterion 2 expects `H_3(A,1)` in weights 5 and 6 and two classes of
//!   `H_5` in weight 8, as if the printed generators spanned free
//!   `A`-modules. They do not: `x g = d(x1 x3)` and `x g2 + g1 = 2 d(x1 x5)`
//!   (see `dual_numbers_rank_one.rs`).
//! * Criterion 3 asks for `dim H_k(A,1)(w) = max(0, w − 2k + 1)` for the
//!   commuting plane, i.e. a polynomial algebra `A[t]`. Here `t` has degree
//!   1, so `t² = 0` and `H_k` vanishes for `k ≥ 2`.

use std::io::Write;

use drep_core::reproduce::{run_criterion, CRITERIA};
use drep_core::DEFAULT_CELL_BUDGET;

const KNOWN_DEVIATIONS: [(u32, &str); 2] = [
    (
        2,
        "2 of 14 checks failed: H_3 weight 6: got 0, expected 1; H_5 weight 8: got 1, expected 2",
    ),
    (
        3,
        "4 of 28 checks failed: H_2 weight 4: got 0, expected 1; H_2 weight 5: got 0, expected 2; \
         H_2 weight 6: got 0, expected 3; H_3 weight 6: got 0, expected 1",
    ),
];

#[test]
fn acceptance_criteria() {
    let mut out = std::io::stdout().lock();
    let mut unexpected = Vec::new();
    writeln!(out).unwrap();
    for id in 1..=CRITERIA {
        let r = run_criterion(id, DEFAULT_CELL_BUDGET);
        let mark = if r.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "criterion {:>2} {mark} [{} ms] {}: {}",
            r.id, r.millis, r.title, r.detail
        )
        .unwrap();
        if let Some((_, detail)) = KNOWN_DEVIATIONS.iter().find(|(k, _)| *k == id) {
            if r.passed || r.detail != *detail {
                unexpected.push(format!(
                    "criterion {id} deviates differently than recorded: {}",
                    r.detail
                ));
            }
        } else if !r.passed {
            unexpected.push(format!("criterion {id}: {}", r.detail));
        }
    }
    assert!(unexpected.is_empty(), "{unexpected:#?}");
}

#[test]
fn commuting_plane_deviation_is_confined_to_degrees_two_and_three() {
    use drep_core::homology::betti;
    use drep_core::presentation::builtin_resolution;
    use drep_core::rep::rep_n;

    let p = builtin_resolution("commuting-plane", 6).unwrap();
    let b = betti(&rep_n(&p, 1).unwrap().complex(6, DEFAULT_CELL_BUDGET).unwrap()).unwrap();
    for w in 0..=6u32 {
        assert_eq!(b.get(0, w), w as usize + 1);
        assert_eq!(b.get(1, w), (w as usize).saturating_sub(1));
        assert_eq!(b.get(2, w), 0);
        assert_eq!(b.get(3, w), 0);
    }
}
